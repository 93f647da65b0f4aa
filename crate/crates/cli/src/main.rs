use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use galois_sums::characters::{character, enumerate_characters, Section};
use galois_sums::codebook::{
    build_codebook, export_codebook, imax_exhaustive, table2, CodebookParams, ExportFormat, DEFAULT_ENTRY_CAP,
    DEFAULT_PAIR_CAP, TABLE2_Q,
};
use galois_sums::poly::Polynomial;
use galois_sums::ring::DEFAULT_ELEMENT_CAP;
use galois_sums::sums::{default_tolerance, gauss_sum, jacobi_sum, tilde_jacobi, SumValue, DEFAULT_TERM_CAP};
use galois_sums::verify::{run_suite, SUITES};
use galois_sums::{Error, GaloisRing, RingElement, RingParams};

const EXIT_BAD_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(name = "galois-sums", version, about = "Galois ring character sums and Jacobi-sum codebooks")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report (or, for `codebook`, the matrix) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on brute-force terms.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_CAP)]
    cap_terms: u128,
    /// Cap on row pairs scanned for Imax.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_CAP)]
    cap_pairs: u128,
    /// Cap on ring size q^n.
    #[arg(long, global = true, default_value_t = DEFAULT_ELEMENT_CAP)]
    cap_elements: u64,
    /// Cap on codebook matrix entries N*K.
    #[arg(long, global = true, default_value_t = DEFAULT_ENTRY_CAP)]
    cap_entries: u128,
    /// Absolute tolerance on comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Perturb computed values before comparison (harness testing).
    #[arg(long, global = true, hide = true)]
    inject_disagreement: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RingArgs {
    #[arg(short = 'p', long)]
    p: u64,
    #[arg(short = 'n', long, default_value_t = 1)]
    n: u32,
    #[arg(short = 's', long, default_value_t = 1)]
    s: u32,
    /// Modulus coefficients over Z_(p^n), constant term first, e.g. `1,1,1`.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AMode {
    /// a = 1
    Unit,
    /// a = 0
    Zero,
    /// a = p
    P,
}

#[derive(Subcommand)]
enum Cmd {
    /// Modulus, sizes, Teichmuller set and unit-group basis.
    Ring(RingArgs),
    /// Every multiplicative character with its triviality level.
    Chars(RingArgs),
    /// Gauss sum G(chi, lambda_b).
    Gauss {
        #[command(flatten)]
        ring: RingArgs,
        /// Character exponents against the unit-group basis.
        #[arg(long, value_delimiter = ',')]
        chi: Vec<u64>,
        /// Twist b as coordinates (or a single integer).
        #[arg(long, default_value = "1")]
        b: String,
    },
    /// Jacobi sum J_a(chi_1, ..., chi_m); repeat --chi once per character.
    Jacobi {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "chi", required = true)]
        chis: Vec<String>,
        #[arg(short = 'a', long, default_value = "1")]
        a: String,
    },
    /// Modified Jacobi sum over (R*)^k x R^(m-k).
    TildeJacobi {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "chi", required = true)]
        chis: Vec<String>,
        #[arg(short = 'k', long)]
        k: usize,
        #[arg(short = 'a', long, default_value = "1")]
        a: String,
    },
    /// Build a codebook, scan Imax and optionally export the matrix.
    Codebook {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(short = 'm', long, default_value_t = 3)]
        m: usize,
        #[arg(short = 'k', long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = AMode::Unit)]
        a_mode: AMode,
        #[arg(long, default_value = "smallest")]
        section: Section,
        /// Exponents of psi_0 over GR(p^(n-1), .); trivial by default.
        #[arg(long, value_delimiter = ',')]
        psi0: Option<Vec<u64>>,
        /// Matrix format for --out.
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
    },
    /// Analytic parameters for n = 2, m = 3, k = 1.
    Table2 {
        /// Extra q values appended to the default eight.
        #[arg(long = "q")]
        extra: Vec<u64>,
    },
    /// Run a named verification suite, or `all`.
    Verify { suite: String },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeLimit { .. } | Error::TooLarge { .. } => EXIT_CAP,
            _ => EXIT_BAD_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_BAD_INPUT,
            message: e.to_string(),
        }
    }
}

/// Report text or JSON, plus whether every check passed.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

fn build_ring(args: &RingArgs, cli: &Cli) -> Result<GaloisRing, Failure> {
    let params = RingParams::new(args.p, args.n, args.s)?;
    let modulus = args.modulus.clone().map(Polynomial::new).transpose()?;
    Ok(GaloisRing::build(params, modulus, cli.cap_elements)?)
}

fn parse_element(ring: &GaloisRing, text: &str) -> Result<RingElement, Failure> {
    let vals = text
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<Vec<u64>, _>>()
        .map_err(|e| Error::Parse(format!("element '{text}': {e}")))?;
    let x = if vals.len() == 1 {
        ring.scalar(vals[0])
    } else {
        RingElement::from_coords(vals)
    };
    ring.validate(&x)?;
    Ok(x)
}

fn parse_exponents(text: &str) -> Result<Vec<u64>, Failure> {
    Ok(text
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<Vec<u64>, _>>()
        .map_err(|e| Error::Parse(format!("character '{text}': {e}")))?)
}

fn show_element(x: &RingElement) -> String {
    match x.coords() {
        [c] => c.to_string(),
        cs => format!("{cs:?}"),
    }
}

fn sum_outcome(mut v: SumValue, cli: &Cli, label: String) -> Outcome {
    if cli.inject_disagreement {
        v.value += 1.0;
    }
    let record = v.record(cli.tol.max(default_tolerance(v.terms)));
    let text = format!(
        "{label} = {:.12} {:+.12}i\n|value| = {:.12}\nexpected: {}\nrule: {}\nterms: {}\nagree: {}",
        v.value.re,
        v.value.im,
        v.value.norm(),
        v.expected,
        v.rule,
        v.terms,
        record.agree
    );
    Outcome {
        ok: record.agree,
        json: serde_json::to_value(&record).expect("records serialize"),
        text,
    }
}

fn cmd_ring(ring: &GaloisRing) -> Outcome {
    let ug = ring.unit_group();
    let teich: Vec<String> = ring.teichmuller_set().iter().map(show_element).collect();
    let gens: Vec<String> = ug.generators(ring).iter().map(show_element).collect();
    let basis: Vec<String> = gens.iter().zip(ug.orders()).map(|(g, o)| format!("<{g}> order {o}")).collect();
    let text = format!(
        "GR({}^{}, {}^{})\nmodulus: {}\n|R| = {}\n|R*| = {}\nT = {{{}}}\nunit basis: {}",
        ring.p(),
        ring.n(),
        ring.p(),
        ring.n() as u64 * ring.s() as u64,
        ring.modulus(),
        ring.size(),
        ring.unit_count(),
        teich.join(","),
        basis.join(", ")
    );
    let json = json!({
        "ring": ring.description(),
        "size": ring.size(),
        "units": ring.unit_count(),
        "teichmuller": ring.teichmuller_set(),
        "generators": ug.generators(ring),
        "orders": ug.orders(),
    });
    Outcome { text, json, ok: true }
}

fn cmd_chars(ring: &GaloisRing) -> Outcome {
    let chars = enumerate_characters(ring);
    let text = chars
        .iter()
        .map(|c| format!("{c}  level {}", c.level()))
        .collect::<Vec<_>>()
        .join("\n");
    let json = json!({
        "orders": ring.unit_group().orders(),
        "characters": chars.iter().map(|c| c.record()).collect::<Vec<_>>(),
    });
    Outcome { text, json, ok: true }
}

fn cmd_codebook(
    cli: &Cli,
    ring: &GaloisRing,
    m: usize,
    k: usize,
    a_mode: AMode,
    section: Section,
    psi0: Option<Vec<u64>>,
    format: ExportFormat,
) -> Result<Outcome, Failure> {
    let mut params = CodebookParams::new(ring, m, k)?;
    params.section = section;
    if let Some(e) = psi0 {
        params.psi0 = e;
    }
    match a_mode {
        AMode::Unit => {}
        AMode::Zero => {
            params.a = ring.zero();
            params.allow_non_unit = true;
        }
        AMode::P => {
            params.a = ring.scalar(ring.p());
            params.allow_non_unit = true;
        }
    }
    let cb = build_codebook(ring, &params, cli.cap_entries)?;
    let mut rep = imax_exhaustive(&cb, cli.cap_pairs)?;
    if cli.inject_disagreement {
        rep.imax_measured += 1.0;
    }
    if let Some(path) = &cli.out {
        fs::write(path, export_codebook(&cb, format)?)?;
    }
    let ok = (rep.imax_measured - rep.imax_formula).abs() <= cli.tol && rep.imax_measured >= rep.welch - 1e-12;
    let text = format!(
        "N = {}\nK = {}\nimax_measured = {:.12}\nimax_formula = {:.12}\nwelch = {:.12}\nratio = {:.12}\nargmax = ({}, {})\nagree: {ok}",
        rep.n_rows, rep.length, rep.imax_measured, rep.imax_formula, rep.welch, rep.ratio, rep.argmax[0], rep.argmax[1]
    );
    Ok(Outcome {
        json: serde_json::to_value(&rep).expect("reports serialize"),
        text,
        ok,
    })
}

fn cmd_table2(extra: &[u64]) -> Result<Outcome, Failure> {
    let mut qs = TABLE2_Q.to_vec();
    qs.extend(extra.iter().filter(|q| !TABLE2_Q.contains(q)));
    let rows = table2(&qs)?;
    let mut text = format!("{:>5} {:>15} {:>12} {:>16} {:>16} {:>16}", "q", "N", "K", "Imax", "I_W", "Imax/I_W");
    for r in &rows {
        text.push('\n');
        text.push_str(&r.to_string());
    }
    Ok(Outcome {
        text,
        json: serde_json::to_value(&rows).expect("rows serialize"),
        ok: true,
    })
}

fn cmd_verify(cli: &Cli, suite: &str) -> Result<Outcome, Failure> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut reports = Vec::new();
    for name in names {
        let mut rep = run_suite(name, cli.tol.max(1e-6), cli.seed)?;
        if cli.inject_disagreement {
            rep.failures.push("injected disagreement".into());
        }
        log::info!("{rep}");
        reports.push(rep);
    }
    let mut text = String::new();
    for rep in &reports {
        text.push_str(&format!("{rep}: {}\n", if rep.passed() { "pass" } else { "FAIL" }));
        for f in rep.failures.iter().take(20) {
            text.push_str(&format!("  {f}\n"));
        }
    }
    Ok(Outcome {
        ok: reports.iter().all(|r| r.passed()),
        json: serde_json::to_value(&reports).expect("reports serialize"),
        text: text.trim_end().to_string(),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.tol < 1e-12 {
        return Err(Error::InvalidParams("tolerance must be at least 1e-12".into()).into());
    }
    if cli.cap_terms == 0 || cli.cap_pairs == 0 || cli.cap_elements == 0 || cli.cap_entries == 0 {
        return Err(Error::InvalidParams("caps must be positive".into()).into());
    }
    match &cli.cmd {
        Cmd::Ring(r) => Ok(cmd_ring(&build_ring(r, cli)?)),
        Cmd::Chars(r) => Ok(cmd_chars(&build_ring(r, cli)?)),
        Cmd::Gauss { ring, chi, b } => {
            let ring = build_ring(ring, cli)?;
            let chi = character(&ring, chi)?;
            let b = parse_element(&ring, b)?;
            let v = gauss_sum(&ring, &chi, &b)?;
            Ok(sum_outcome(v, cli, format!("G({chi}, λ_{})", show_element(&b))))
        }
        Cmd::Jacobi { ring, chis, a } => {
            let ring = build_ring(ring, cli)?;
            let chars = chis
                .iter()
                .map(|c| Ok(character(&ring, &parse_exponents(c)?)?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let a = parse_element(&ring, a)?;
            let v = jacobi_sum(&ring, &chars, &a, cli.cap_terms)?;
            Ok(sum_outcome(v, cli, format!("J_{}", show_element(&a))))
        }
        Cmd::TildeJacobi { ring, chis, k, a } => {
            let ring = build_ring(ring, cli)?;
            let chars = chis
                .iter()
                .map(|c| Ok(character(&ring, &parse_exponents(c)?)?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let a = parse_element(&ring, a)?;
            let v = tilde_jacobi(&ring, &chars, *k, &a, cli.cap_terms)?;
            Ok(sum_outcome(v, cli, format!("J̃_{}", show_element(&a))))
        }
        Cmd::Codebook {
            ring,
            m,
            k,
            a_mode,
            section,
            psi0,
            format,
        } => {
            let ring = build_ring(ring, cli)?;
            cmd_codebook(cli, &ring, *m, *k, *a_mode, *section, psi0.clone(), *format)
        }
        Cmd::Table2 { extra } => cmd_table2(extra),
        Cmd::Verify { suite } => cmd_verify(cli, suite),
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("GALOIS_SUMS_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring GALOIS_SUMS_THREADS={v}"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("values serialize")
            } else {
                out.text
            };
            let report_to_file = cli.out.is_some() && !matches!(cli.cmd, Cmd::Codebook { .. });
            if report_to_file {
                let path = cli.out.as_ref().expect("checked");
                if let Err(e) = fs::write(path, body + "\n") {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_BAD_INPUT);
                }
            } else {
                // a closed pipe (e.g. `| head`) is not an error
                let _ = writeln!(std::io::stdout().lock(), "{body}");
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_DISAGREE)
            }
        }
        Err(f) => {
            if cli.json {
                println!("{}", json!({ "error": f.message, "exit_code": f.code }));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
