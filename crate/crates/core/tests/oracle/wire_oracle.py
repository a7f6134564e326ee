#!/usr/bin/env python3
"""Builds golden update messages byte by byte from the documented layout.

Written without reference to the Rust encoder. Prints TOML.
"""
import ipaddress

TAGS = {"plain": 0x00, "conventional": 0x01, "apvas": 0xA1}


def nlri(prefix):
    net = ipaddress.IPv4Network(prefix)
    n = net.prefixlen
    return bytes([n]) + net.network_address.packed[: (n + 7) // 8]


def segments(path):
    out = (2 + 6 * len(path)).to_bytes(2, "big")
    for asn, pcount, flags in path:
        out += bytes([pcount, flags]) + asn.to_bytes(4, "big")
    return out


def ski(i):
    return bytes((i * 16 + k) & 0xFF for k in range(20))


def conventional_block(n):
    out = b"\x01"
    for i in range(n):
        sig = bytes([0xC0 + i]) * 96
        out += ski(i + 1) + len(sig).to_bytes(2, "big") + sig
    return out


def apvas_block(n, fill):
    out = b"\xa1" + (64).to_bytes(2, "big") + bytes([fill]) * 64
    for i in range(n):
        out += ski(i + 1)
    return out


def message(suite, path, prefix, block=b""):
    return bytes([TAGS[suite]]) + segments(path) + block + nlri(prefix)


CASES = [
    ("plain", [(65001, 1, 0)], "192.0.2.0/24"),
    ("plain", [(65003, 1, 0), (65002, 1, 0), (65001, 1, 0)], "198.18.0.0/15"),
    ("plain", [(4200000000, 1, 0x80), (65001, 1, 0)], "0.0.0.0/0"),
    ("conventional", [(65001, 1, 0)], "192.0.2.0/24"),
    ("conventional", [(65002, 1, 0), (65001, 1, 0)], "10.0.0.0/8"),
    ("conventional", [(65004, 1, 0), (65003, 1, 0), (65002, 1, 0)], "203.0.113.128/25"),
    ("apvas", [(65001, 1, 0)], "192.0.2.0/24"),
    ("apvas", [(65002, 1, 0), (65001, 1, 0)], "10.0.0.0/8"),
    ("apvas", [(65004, 1, 0), (65003, 1, 0), (65002, 1, 0)], "203.0.113.128/25"),
]


def main():
    for i, (suite, path, prefix) in enumerate(CASES):
        n = len(path)
        if suite == "conventional":
            block = conventional_block(n)
        elif suite == "apvas":
            block = apvas_block(n, 0x5A + i)
        else:
            block = b""
        msg = message(suite, path, prefix, block)
        print("[[message]]")
        print(f'suite = "{suite}"')
        print(f'nlri = "{prefix}"')
        print(f"path = {[a for a, _, _ in path]}")
        print(f"flags = {[f for _, _, f in path]}")
        if suite != "plain":
            print(f"skis = {[ski(k + 1).hex() for k in range(n)]}".replace("'", '"'))
        if suite == "conventional":
            print(f"sig_fill = {[0xC0 + k for k in range(n)]}")
        if suite == "apvas":
            print(f"sigma_fill = {0x5A + i}")
        print(f"sig_block_len = {len(block)}")
        print(f'bytes = "{msg.hex()}"')
        print()


if __name__ == "__main__":
    main()
