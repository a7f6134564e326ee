//! `apvas`: keys, signatures, message inspection and experiments.
//!
//! Exit codes: 0 success, 1 verification false, 2 usage or configuration
//! error, 3 I/O or decode error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apvas_core::baseline;
use apvas_core::bimodal::{chain_commitment, verify_and_cache};
use apvas_core::netsim::report::compare_report;
use apvas_core::netsim::{run_experiment, write_csv, ExperimentResult, TopologyConfig};
use apvas_core::wire::describe_update;
use apvas_core::*;
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::OsRng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

const SEED_ENV: &str = "APVAS_SEED";

#[derive(Parser)]
#[command(name = "apvas", version, about = "Path validation with bimodal aggregate signatures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Toml,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair (seeded by --seed or APVAS_SEED when given).
    Keygen {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add a signature to a claim, starting or extending a chain.
    Sign {
        #[arg(long)]
        key: PathBuf,
        /// Message as UTF-8 text.
        #[arg(long, conflicts_with = "msg_hex", required_unless_present = "msg_hex")]
        msg: Option<String>,
        /// Message as hex.
        #[arg(long)]
        msg_hex: Option<String>,
        /// Existing claim; a fresh claim when absent.
        #[arg(long)]
        claim: Option<PathBuf>,
        /// Chain index to extend; a new chain when absent.
        #[arg(long)]
        chain: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge claims over disjoint (key, message) pairs.
    Aggregate {
        #[arg(long = "claim", required = true, num_args = 1..)]
        claims: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a claim file; prints true or false.
    Verify {
        #[arg(long)]
        claim: PathBuf,
    },
    /// Decode an update message and list its fields with byte offsets.
    Inspect {
        #[arg(long)]
        msg: PathBuf,
        /// The file holds hex text instead of raw bytes.
        #[arg(long)]
        hex: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the memory experiment and write CSV and summaries to a directory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// plain, conventional, apvas or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all suites on a topology and print the comparison report.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Regenerate the frozen vectors from this implementation.
    Golden {
        #[arg(long)]
        out: PathBuf,
        /// Required; overwriting frozen vectors hides regressions.
        #[arg(long)]
        confirm: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<NetsimError> for CliError {
    fn from(e: NetsimError) -> Self {
        match e {
            NetsimError::Io(_) | NetsimError::Csv(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn decode_hex(what: &str, s: &str) -> Result<Vec<u8>> {
    hex::decode(s.trim()).map_err(|e| CliError::Io(format!("{what}: {e}")))
}

fn params() -> PublicParams {
    setup("bn254").expect("supported curve")
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

#[derive(Serialize, Deserialize)]
struct KeyFile {
    secret_key: String,
    public_key: String,
}

fn load_key(params: &PublicParams, path: &Path) -> Result<KeyPair> {
    let text = String::from_utf8(read(path)?).map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))?;
    let file: KeyFile = toml::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let sk = Scalar::from_bytes(&decode_hex("secret_key", &file.secret_key)?)
        .map_err(|e| CliError::Io(format!("secret_key: {e}")))?;
    let kp = KeyPair::from_secret(params, sk).map_err(|e| CliError::Io(format!("secret_key: {e}")))?;
    if hex::encode(kp.public().to_bytes()) != file.public_key.trim() {
        return Err(CliError::Io(format!("{}: public_key does not match secret_key", path.display())));
    }
    Ok(kp)
}

fn load_claim(path: &Path) -> Result<SignatureClaim> {
    SignatureClaim::from_bytes(&read(path)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn claim_line(claim: &SignatureClaim) -> String {
    format!(
        "chains={} entries={} sigma={}",
        claim.chains().len(),
        claim.entry_count(),
        hex::encode(claim.sigma().to_bytes())
    )
}

fn keygen(seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let p = params();
    let kp = match seed.or(env_seed()?) {
        Some(s) => user_key_gen(&p, &mut ChaCha20Rng::seed_from_u64(s)),
        None => user_key_gen(&p, &mut OsRng),
    };
    let file = KeyFile {
        secret_key: hex::encode(kp.secret().to_bytes()),
        public_key: hex::encode(kp.public().to_bytes()),
    };
    let text = toml::to_string(&file).expect("strings serialize");
    match out {
        Some(path) => {
            write(&path, &text)?;
            println!("public_key = \"{}\"", file.public_key);
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn sign(
    key: &Path,
    msg: Option<String>,
    msg_hex: Option<String>,
    claim: Option<PathBuf>,
    chain: Option<usize>,
    out: &Path,
) -> Result<()> {
    let p = params();
    let kp = load_key(&p, key)?;
    let msg = match (msg, msg_hex) {
        (Some(m), _) => m.into_bytes(),
        (None, Some(h)) => decode_hex("msg-hex", &h)?,
        (None, None) => unreachable!("clap requires one"),
    };
    let mut base = match &claim {
        Some(path) => load_claim(path)?,
        None => SignatureClaim::empty(),
    };
    if !base.is_empty() && !verify_and_cache(&p, &mut base) {
        return Err(CliError::Usage("input claim does not verify; refusing to extend it".into()));
    }
    let slot = chain.map_or(ChainSlot::New, ChainSlot::Extend);
    let signed = seq_agg_sign(&p, &kp, &msg, &base, slot).map_err(|e| CliError::Usage(e.to_string()))?;
    write(out, signed.to_bytes())?;
    println!("{}", claim_line(&signed));
    Ok(())
}

fn aggregate(paths: &[PathBuf], out: &Path) -> Result<()> {
    let mut acc = SignatureClaim::empty();
    for path in paths {
        acc = agg_sign(&acc, &load_claim(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    write(out, acc.to_bytes())?;
    println!("{}", claim_line(&acc));
    Ok(())
}

fn verify_cmd(path: &Path) -> Result<bool> {
    let ok = verify(&params(), &load_claim(path)?);
    println!("{ok}");
    Ok(ok)
}

#[derive(Serialize)]
struct FieldRecord {
    offset: usize,
    len: usize,
    name: String,
    value: String,
}

#[derive(Serialize)]
struct InspectRecord {
    suite: String,
    total_len: usize,
    field: Vec<FieldRecord>,
}

fn inspect(path: &Path, is_hex: bool, format: Format) -> Result<()> {
    let raw = read(path)?;
    let bytes = if is_hex {
        let text = String::from_utf8(raw).map_err(|_| CliError::Io("hex input is not UTF-8".into()))?;
        decode_hex("message", &text.split_whitespace().collect::<String>())?
    } else {
        raw
    };
    let (msg, fields) = describe_update(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match format {
        Format::Text => {
            println!("suite {} ({} bytes)", msg.suite(), bytes.len());
            for f in fields {
                println!("{:>5} {:>4}  {:<28} {}", f.offset, f.len, f.name, f.value);
            }
        }
        Format::Toml => {
            let record = InspectRecord {
                suite: msg.suite().name().to_string(),
                total_len: bytes.len(),
                field: fields
                    .into_iter()
                    .map(|f| FieldRecord { offset: f.offset, len: f.len, name: f.name, value: f.value })
                    .collect(),
            };
            print!("{}", toml::to_string(&record).expect("plain record serializes"));
        }
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<TopologyConfig> {
    let text = String::from_utf8(read(path)?).map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))?;
    let mut cfg: TopologyConfig = text.parse()?;
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    s.parse::<Suite>().map(|x| vec![x]).map_err(|_| {
        CliError::Usage(format!("unknown suite {s:?}; expected plain, conventional, apvas or all"))
    })
}

fn run_all(cfg: &TopologyConfig, suites: &[Suite]) -> Result<Vec<ExperimentResult>> {
    let mut out = Vec::new();
    for &s in suites {
        let r = run_experiment(cfg, s)?;
        if r.stats.verification_failures > 0 || r.stats.audit_failures > 0 {
            return Err(CliError::Usage(format!(
                "{s}: {} verification failures, {} audit failures",
                r.stats.verification_failures, r.stats.audit_failures
            )));
        }
        out.push(r);
    }
    Ok(out)
}

fn simulate(config: &Path, suite: &str, out: &Path) -> Result<()> {
    let suites = parse_suites(suite)?;
    let cfg = load_config(config)?;
    let results = run_all(&cfg, &suites)?;
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;

    let mut csv = Vec::new();
    write_csv(&results, &mut csv)?;
    write(&out.join("results.csv"), &csv)?;
    for r in &results {
        write(&out.join(format!("summary-{}.toml", r.suite.name())), r.summary().to_toml()?)?;
    }
    if results.len() > 1 {
        let doc = compare_report(&results)?;
        write(&out.join("report.toml"), doc.to_toml()?)?;
        write(&out.join("report.txt"), doc.to_text())?;
    }
    for r in &results {
        println!(
            "{}: {} messages, {} accepted, {} conflicts",
            r.suite, r.stats.messages_delivered, r.stats.accepted, r.stats.conflicts
        );
    }
    println!("wrote {}", out.join("results.csv").display());
    Ok(())
}

fn report(config: &Path, format: Format) -> Result<()> {
    let cfg = load_config(config)?;
    let doc = compare_report(&run_all(&cfg, &Suite::ALL)?)?;
    match format {
        Format::Text => print!("{}", doc.to_text()),
        Format::Toml => print!("{}", doc.to_toml()?),
    }
    Ok(())
}

const BASELINE_SECRETS: [&str; 3] = [
    "0000000000000000000000000000000000000000000000000000000000000001",
    "00000000000000000000000000000000000000000000000000000000deadbeef",
    "30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000000",
];
const GOLDEN_MESSAGES: [&str; 3] = ["", "726f757465", "0000fdea01000000fde9a118c00002"];

fn golden(out: &Path, confirm: bool) -> Result<()> {
    if !confirm {
        return Err(CliError::Usage("golden rewrites frozen vectors; pass --confirm to proceed".into()));
    }
    let p = params();
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;

    let mut h2g = String::from("# hash_to_group golden vectors, DST \"APVAS-H2G-v1\"\n");
    let mut q128 = b"q128_".to_vec();
    q128.extend([b'q'; 128]);
    let all_bytes: Vec<u8> = (0..=255).collect();
    let inputs: [&[u8]; 7] = [b"", b"abc", b"A", b"B", b"abcdef0123456789", &q128, &all_bytes];
    for m in inputs {
        let _ = writeln!(h2g, "[[vector]]\nmsg = \"{}\"\npoint = \"{}\"\n", hex::encode(m), hex::encode(p.hash_to_group(m).to_bytes()));
    }
    write(&out.join("h2g_golden.toml"), h2g)?;

    let mut base = String::from("# conventional-suite signatures\n");
    for sk_hex in BASELINE_SECRETS {
        let sk = Scalar::from_bytes(&hex::decode(sk_hex).expect("literal")).expect("reduced literal");
        let pk = baseline::public_key(&p, &sk);
        for m_hex in GOLDEN_MESSAGES {
            let m = hex::decode(m_hex).expect("literal");
            let sig = baseline::sign(&p, &sk, &m);
            let _ = writeln!(
                base,
                "[[vector]]\nsk = \"{sk_hex}\"\nmsg = \"{m_hex}\"\npk = \"{}\"\nsig = \"{}\"\n",
                hex::encode(pk.to_bytes()),
                hex::encode(sig)
            );
        }
    }
    write(&out.join("baseline_golden.toml"), base)?;

    let mut first = String::from("# single-entry chain signatures\n");
    let seeded = user_key_gen(&p, &mut ChaCha20Rng::from_seed([1; 32]));
    let keys = [
        (KeyPair::from_secret(&p, Scalar::from_u64(1)).expect("nonzero"), "41"),
        (KeyPair::from_secret(&p, Scalar::from_u64(2)).expect("nonzero"), "41"),
        (seeded.clone(), "41"),
        (seeded, "0000fdea01000000fde9a118c00002"),
    ];
    for (kp, m_hex) in keys {
        let m = hex::decode(m_hex).expect("literal");
        let entry = ChainEntry::new(*kp.public(), m.clone());
        let c = chain_commitment(&p, &GroupElem::identity(), &entry, std::slice::from_ref(&entry));
        let claim = seq_agg_sign(&p, &kp, &m, &SignatureClaim::empty(), ChainSlot::New).expect("fresh claim");
        let _ = writeln!(
            first,
            "[[vector]]\nsk = \"{}\"\npk = \"{}\"\nmsg = \"{m_hex}\"\ncommitment = \"{}\"\nsigma = \"{}\"\n",
            hex::encode(kp.secret().to_bytes()),
            hex::encode(kp.public().to_bytes()),
            hex::encode(c.to_bytes()),
            hex::encode(claim.sigma().to_bytes())
        );
    }
    write(&out.join("apvas_golden.toml"), first)?;
    println!("wrote h2g_golden.toml, baseline_golden.toml, apvas_golden.toml to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Keygen { seed, out } => keygen(seed, out)?,
        Command::Sign { key, msg, msg_hex, claim, chain, out } => sign(&key, msg, msg_hex, claim, chain, &out)?,
        Command::Aggregate { claims, out } => aggregate(&claims, &out)?,
        Command::Verify { claim } => {
            if !verify_cmd(&claim)? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Inspect { msg, hex, format } => inspect(&msg, hex, format)?,
        Command::Simulate { config, suite, out } => simulate(&config, &suite, &out)?,
        Command::Report { config, format } => report(&config, format)?,
        Command::Golden { out, confirm } => golden(&out, confirm)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
