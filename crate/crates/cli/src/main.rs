//! fkex: simulate the Shpilrain-Ushakov (and Ko-Lee style) key exchange
//! over Thompson's group F and run the eavesdropper attacks against it.
//!
//! Subcommands:
//!   exchange  - run one honest exchange, write the transcript as JSON
//!   attack    - recover the shared key from a transcript file
//!   bench-nf  - measure normal-form computation scaling
//!   selftest  - reduced invariant and attack sweeps, nonzero exit on failure
//!
//! Every command is deterministic for a fixed --seed (bench timings aside).
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thompson::attack::{
    attack_kl, attack_restriction, attack_transitivity, attack_word_level, case_branch,
    AttackResult, CaseBranch,
};
use thompson::convert::{nf_to_pl, pl_to_word, word_to_pl};
use thompson::numerics::set_scale_limit;
use thompson::protocol::{run_exchange, Role, SharedKey, Transcript, TranscriptDoc, Variant};
use thompson::subgroups::{sample_a, sample_b};
use thompson::words::{
    nf_from_word, nf_from_word_letterwise, nf_invert, nf_multiply, Letter, Sign, Word,
};
use thompson::NormalForm;

#[derive(Parser)]
#[command(
    name = "fkex",
    version,
    about = "Thompson group F key-exchange simulator and cryptanalysis harness"
)]
struct Cli {
    /// Override the dyadic scale limit (default 2^20)
    #[arg(long, global = true)]
    scale_limit: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Su,
    Kl,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Su => Variant::Su,
            VariantArg::Kl => Variant::Kl,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Restriction,
    Transitivity,
    Word,
    Kl,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one honest exchange and emit the transcript document
    Exchange(ExchangeArgs),
    /// Run eavesdropper attacks against a transcript document
    Attack(AttackArgs),
    /// Measure how normal-form computation scales with word length
    BenchNf(BenchArgs),
    /// Run the invariant suite and attack sweeps at reduced trial counts
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ExchangeArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::Su)]
    variant: VariantArg,
    /// Subgroup parameter
    #[arg(long, default_value_t = 4)]
    s: u32,
    #[arg(long, default_value_t = 256)]
    w_length: u32,
    #[arg(long, default_value_t = 256)]
    key_length: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include the private keys and the shared key in the document
    #[arg(long)]
    include_private: bool,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// Transcript document produced by `fkex exchange`
    transcript: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest length exponent (lengths are powers of two)
    #[arg(long, default_value_t = 10)]
    min_pow: u32,
    /// Largest length exponent
    #[arg(long, default_value_t = 20)]
    max_pow: u32,
    /// Also time the letterwise quadratic fallback on small lengths
    #[arg(long)]
    contrast: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 100)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(limit) = cli.scale_limit {
        set_scale_limit(limit);
    }
    let outcome = match cli.command {
        Command::Exchange(args) => cmd_exchange(args),
        Command::Attack(args) => cmd_attack(args),
        Command::BenchNf(args) => cmd_bench_nf(args),
        Command::Selftest(args) => cmd_selftest(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: &Option<PathBuf>, contents: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_exchange(args: ExchangeArgs) -> anyhow::Result<ExitCode> {
    let exchange = run_exchange(
        args.variant.into(),
        args.s,
        args.w_length,
        args.key_length,
        args.seed,
    )?;
    let private = args
        .include_private
        .then_some((&exchange.alice, &exchange.bob, &exchange.key));
    let doc = exchange.transcript.to_doc(private);
    let json = serde_json::to_string_pretty(&doc)?;
    emit(&args.output, &format!("{json}\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn applicable_methods(method: MethodArg, t: &Transcript) -> anyhow::Result<Vec<MethodArg>> {
    let methods = match (method, t.variant) {
        (MethodArg::All, Variant::Su) => {
            let mut ms = vec![MethodArg::Restriction, MethodArg::Word];
            if t.public.s >= 2 {
                ms.push(MethodArg::Transitivity);
            }
            ms
        }
        (MethodArg::All, Variant::Kl) => vec![MethodArg::Kl],
        (MethodArg::Kl, Variant::Kl) => vec![MethodArg::Kl],
        (m, Variant::Su) if m != MethodArg::Kl => vec![m],
        (m, v) => return Err(anyhow!("method {m:?} does not apply to a {v:?} transcript")),
    };
    Ok(methods)
}

fn run_method(m: MethodArg, t: &Transcript) -> thompson::Result<AttackResult> {
    match m {
        MethodArg::Restriction => attack_restriction(t),
        MethodArg::Word => attack_word_level(t),
        MethodArg::Kl => attack_kl(t),
        MethodArg::Transitivity => {
            let target = match case_branch(t)? {
                CaseBranch::AtOrBelow => Role::Alice,
                CaseBranch::Above => Role::Bob,
            };
            attack_transitivity(t, target)
        }
        MethodArg::All => unreachable!("expanded by applicable_methods"),
    }
}

fn cmd_attack(args: AttackArgs) -> anyhow::Result<ExitCode> {
    let raw = fs::read_to_string(&args.transcript)
        .with_context(|| format!("reading {}", args.transcript.display()))?;
    let doc: TranscriptDoc = serde_json::from_str(&raw).context("parsing transcript document")?;
    let transcript = Transcript::from_doc(&doc)?;
    let honest_key: Option<SharedKey> = doc
        .private
        .as_ref()
        .map(|p| anyhow::Ok(SharedKey(p.shared_key.parse::<NormalForm>()?)))
        .transpose()?;

    let methods = applicable_methods(args.method, &transcript)?;
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for m in methods {
        match run_method(m, &transcript) {
            Ok(mut r) => {
                if let Some(honest) = &honest_key {
                    r.check_against(honest);
                }
                results.push(r);
            }
            Err(e) => failures.push(format!("{m:?}: {e}")),
        }
    }
    let keys_agree = results.windows(2).all(|w| w[0].key == w[1].key);
    let verified = failures.is_empty()
        && !results.is_empty()
        && keys_agree
        && results.iter().all(|r| r.verification.all_passed());

    let rendered = match args.format {
        Format::Json => {
            let docs: Vec<_> = results.iter().map(|r| r.to_doc()).collect();
            let body = serde_json::json!({
                "results": docs,
                "errors": failures,
                "keys_agree": keys_agree,
                "verified": verified,
            });
            format!("{}\n", serde_json::to_string_pretty(&body)?)
        }
        Format::Text => {
            let mut out = String::new();
            for r in &results {
                let d = r.to_doc();
                out.push_str(&format!(
                    "method {:?}: cracked {:?} ({:?})\n  recovered: {} | {}\n  key: {}\n  memberships {}/{} reconstruction {} aux {:?} honest {:?}\n",
                    d.method,
                    d.cracked_party,
                    d.case_branch,
                    d.recovered_pair[0],
                    d.recovered_pair[1],
                    d.key,
                    d.verification.first_membership,
                    d.verification.second_membership,
                    d.verification.reconstruction,
                    d.verification.aux_identity,
                    d.verification.key_matches_honest,
                ));
            }
            for f in &failures {
                out.push_str(&format!("attack error: {f}\n"));
            }
            out.push_str(&format!("keys agree: {keys_agree}\nverified: {verified}\n"));
            out
        }
    };
    emit(&args.output, &rendered)?;
    Ok(if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn random_word(len: usize, max_index: u32, rng: &mut ChaCha8Rng) -> Word {
    use rand_chacha::rand_core::RngCore;
    let letters = (0..len)
        .map(|_| {
            let r = rng.next_u32();
            Letter {
                index: (r >> 1) % max_index,
                sign: if r & 1 == 0 { Sign::Plus } else { Sign::Minus },
            }
        })
        .collect();
    Word::new(letters)
}

/// One timing window: repeats a full pass over the word set until ~12ms of
/// wall time has passed, returning seconds per pass.
fn window_time(words: &[Word], f: &dyn Fn(&Word) -> NormalForm) -> f64 {
    let mut passes = 0u32;
    let start = Instant::now();
    loop {
        for w in words {
            std::hint::black_box(f(std::hint::black_box(w)));
        }
        passes += 1;
        if start.elapsed().as_millis() >= 12 {
            break;
        }
    }
    start.elapsed().as_secs_f64() / passes as f64
}

/// Seconds per call over a fixed word set: fastest of three windows.
fn time_words(words: &[Word], f: &dyn Fn(&Word) -> NormalForm) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        best = best.min(window_time(words, f));
    }
    best / words.len() as f64
}

/// Scaling ratio between two word sets, measured with interleaved windows
/// so that machine speed drift hits both sides of every round equally; the
/// median round is reported.
fn time_ratio(small: &[Word], large: &[Word], f: &dyn Fn(&Word) -> NormalForm) -> f64 {
    let mut ratios: Vec<f64> = (0..5)
        .map(|_| {
            let t_small = window_time(small, f);
            let t_large = window_time(large, f);
            t_large / t_small
        })
        .collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ratios[ratios.len() / 2]
}

fn cmd_bench_nf(args: BenchArgs) -> anyhow::Result<ExitCode> {
    if args.min_pow > args.max_pow || args.max_pow > 24 {
        return Err(anyhow!("length exponents must satisfy min <= max <= 24"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut lengths = Vec::new();
    let mut word_sets = Vec::new();
    for pow in args.min_pow..=args.max_pow {
        let n = 1usize << pow;
        lengths.push(n);
        word_sets.push(
            (0..2)
                .map(|_| random_word(n, 5, &mut rng))
                .collect::<Vec<_>>(),
        );
    }
    let times: Vec<f64> = word_sets
        .iter()
        .map(|ws| time_words(ws, &|w| nf_from_word(w)))
        .collect();
    let mut ratios = Vec::new();
    for i in 0..lengths.len() {
        if i + 2 < lengths.len() && lengths[i] * 4 == lengths[i + 2] {
            let r = time_ratio(&word_sets[i], &word_sets[i + 2], &|w| nf_from_word(w));
            ratios.push((lengths[i], r));
        }
    }
    let soft_pass = ratios.iter().all(|&(_, r)| r <= 5.0);

    let contrast = if args.contrast {
        let mut rows = Vec::new();
        for pow in [8u32, 10, 12] {
            let n = 1usize << pow;
            let ws: Vec<Word> = (0..2).map(|_| random_word(n, 5, &mut rng)).collect();
            rows.push((n, time_words(&ws, &|w| nf_from_word_letterwise(w))));
        }
        Some(rows)
    } else {
        None
    };

    match args.format {
        Format::Json => {
            let body = serde_json::json!({
                "seed": args.seed,
                "lengths": lengths,
                "seconds": times,
                "ratios": ratios.iter().map(|&(n, r)| serde_json::json!({"n": n, "t4n_over_tn": r})).collect::<Vec<_>>(),
                "soft_pass": soft_pass,
                "quadratic_contrast": contrast.as_ref().map(|rows| {
                    rows.iter().map(|&(n, t)| serde_json::json!({"n": n, "seconds": t})).collect::<Vec<_>>()
                }),
            });
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
        Format::Text => {
            println!("normal-form timing (divide and conquer):");
            for (n, t) in lengths.iter().zip(&times) {
                println!("  n = {n:>8}: {:>12.3} us", t * 1e6);
            }
            println!("ratios t(4n)/t(n), soft linearithmic threshold 5.0:");
            for (n, r) in &ratios {
                println!("  n = {n:>8}: {r:.2}");
            }
            if let Some(rows) = &contrast {
                println!("letterwise fallback (quadratic contrast):");
                let mut prev: Option<(usize, f64)> = None;
                for &(n, t) in rows {
                    let note = match prev {
                        Some((pn, pt)) if n == pn * 4 => format!(" (ratio {:.1})", t / pt),
                        _ => String::new(),
                    };
                    println!("  n = {n:>8}: {:>12.3} us{note}", t * 1e6);
                    prev = Some((n, t));
                }
            }
            println!("soft pass: {soft_pass}");
        }
    }
    Ok(if soft_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

struct Report {
    lines: Vec<(String, bool, String)>,
}

impl Report {
    fn new() -> Report {
        Report { lines: Vec::new() }
    }

    fn record<F: FnOnce() -> thompson::Result<bool>>(&mut self, name: &str, run: F) {
        let (ok, detail) = match run() {
            Ok(true) => (true, String::new()),
            Ok(false) => (false, "check returned false".to_string()),
            Err(e) => (false, format!("error: {e}")),
        };
        self.lines.push((name.to_string(), ok, detail));
    }

    fn all_passed(&self) -> bool {
        self.lines.iter().all(|(_, ok, _)| *ok)
    }
}

fn cmd_selftest(args: SelftestArgs) -> anyhow::Result<ExitCode> {
    let trials = args.trials;
    let mut report = Report::new();
    let derived = |i: u32| args.seed ^ (i as u64);

    report.record("protocol key agreement (su)", || {
        for i in 0..trials {
            let e = run_exchange(Variant::Su, 2 + i % 3, 32, 24, derived(i))?;
            let kb = thompson::protocol::su_key_bob(&e.transcript.u1, &e.bob.first, &e.bob.second);
            if kb != e.key {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("protocol key agreement (kl)", || {
        for i in 0..trials {
            let e = run_exchange(Variant::Kl, 2 + i % 3, 32, 24, derived(i))?;
            let kb = thompson::protocol::kl_key_bob(&e.transcript.u1, &e.bob.first, &e.bob.second);
            if kb != e.key {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("restriction attack recovers the key", || {
        for i in 0..trials {
            let e = run_exchange(Variant::Su, 2 + i % 4, 32, 24, derived(i))?;
            let r = attack_restriction(&e.transcript)?;
            if r.key != e.key || !r.verification.all_passed() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("word-level attack agrees with restriction", || {
        for i in 0..trials {
            let e = run_exchange(Variant::Su, 2 + i % 4, 32, 24, derived(i))?;
            let r1 = attack_restriction(&e.transcript)?;
            let r2 = attack_word_level(&e.transcript)?;
            if r1.key != r2.key || r2.key != e.key {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("transitivity attack recovers the key", || {
        for i in 0..trials {
            let e = run_exchange(Variant::Su, 2 + i % 3, 32, 24, derived(i))?;
            let target = match case_branch(&e.transcript)? {
                CaseBranch::AtOrBelow => Role::Alice,
                CaseBranch::Above => Role::Bob,
            };
            let r = attack_transitivity(&e.transcript, target)?;
            if r.key != e.key || !r.verification.all_passed() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("kl attack recovers the key", || {
        for i in 0..trials {
            let e = run_exchange(Variant::Kl, 2 + i % 3, 32, 24, derived(i))?;
            let r = attack_kl(&e.transcript)?;
            if r.key != e.key || !r.verification.all_passed() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("subgroups commute elementwise", || {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        for i in 0..trials {
            let s = 1 + i % 5;
            let a = sample_a(s, 12, &mut rng);
            let b = sample_b(s, 12, &mut rng);
            if nf_multiply(&a, &b) != nf_multiply(&b, &a) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("normalization matches letterwise fallback and maps", || {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0x5eed);
        for _ in 0..trials {
            let w = random_word(14, 4, &mut rng);
            let fast = nf_from_word(&w);
            if fast != nf_from_word_letterwise(&w) {
                return Ok(false);
            }
            if word_to_pl(&w)? != nf_to_pl(&fast)? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("geometry-algebra round trip", || {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0xf00d);
        for _ in 0..trials {
            let g = nf_from_word(&random_word(12, 4, &mut rng));
            if pl_to_word(&nf_to_pl(&g)?)? != g {
                return Ok(false);
            }
        }
        Ok(true)
    });
    report.record("transcript products rebuild", || {
        for i in 0..trials.min(20) {
            let e = run_exchange(Variant::Su, 2, 24, 16, derived(i))?;
            let u1 = nf_multiply(
                &nf_multiply(&e.alice.first, &e.transcript.public.w),
                &e.alice.second,
            );
            if u1 != e.transcript.u1 {
                return Ok(false);
            }
            if nf_multiply(&e.transcript.u1, &nf_invert(&e.transcript.u1)) != NormalForm::identity()
            {
                return Ok(false);
            }
        }
        Ok(true)
    });

    match args.format {
        Format::Json => {
            let body = serde_json::json!({
                "trials": trials,
                "seed": args.seed,
                "checks": report.lines.iter().map(|(name, ok, detail)| serde_json::json!({
                    "name": name, "pass": ok, "detail": detail,
                })).collect::<Vec<_>>(),
                "all_passed": report.all_passed(),
            });
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
        Format::Text => {
            for (name, ok, detail) in &report.lines {
                if *ok {
                    println!("PASS {name} ({trials} trials)");
                } else {
                    println!("FAIL {name}: {detail}");
                }
            }
            println!(
                "selftest: {}",
                if report.all_passed() {
                    "all passed"
                } else {
                    "FAILURES"
                }
            );
        }
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
