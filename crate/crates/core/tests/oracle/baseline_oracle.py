#!/usr/bin/env python3
"""Independent oracle for the conventional-suite per-hop signature.

Deterministic Schnorr over BN254 G1 with affine double-and-add. Prints TOML.
"""
from h2g_oracle import P, add, expand_message_xmd

R = 21888242871839275222246405745257275088548364400416034343698204186575808495617
G = (1, 2)
NONCE_DST = b"APVAS-BASELINE-NONCE-v1"
CHALLENGE_DST = b"APVAS-BASELINE-CHALLENGE-v1"


def mul(k, pt):
    acc = None
    while k:
        if k & 1:
            acc = add(acc, pt)
        pt = add(pt, pt)
        k >>= 1
    return acc


def enc(pt):
    if pt is None:
        return bytes(64)
    return pt[0].to_bytes(32, "big") + pt[1].to_bytes(32, "big")


def hash_to_scalar(parts, dst):
    msg = b"".join(len(p).to_bytes(4, "big") + p for p in parts)
    return int.from_bytes(expand_message_xmd(msg, dst, 48), "big") % R


def sign(sk, msg):
    pk = enc(mul(sk, G))
    k = hash_to_scalar([sk.to_bytes(32, "big"), msg], NONCE_DST) or 1
    r = enc(mul(k, G))
    e = hash_to_scalar([r, pk, msg], CHALLENGE_DST)
    return pk, r + ((k + e * sk) % R).to_bytes(32, "big")


SECRETS = [1, 0xDEADBEEF, R - 1]
MESSAGES = [b"", b"route", bytes.fromhex("0000fdea01000000fde9a118c00002")]

if __name__ == "__main__":
    print("# conventional-suite signatures")
    for sk in SECRETS:
        for m in MESSAGES:
            pk, sig = sign(sk, m)
            print("[[vector]]")
            print('sk = "%s"' % sk.to_bytes(32, "big").hex())
            print('msg = "%s"' % m.hex())
            print('pk = "%s"' % pk.hex())
            print('sig = "%s"' % sig.hex())
            print()
