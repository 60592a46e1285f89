//! Batch front end: runs one job file end to end and writes its artifacts.
//!
//! A job file picks a group law (`gm`, `ec`, `mixed`, `indep`, `intseq`) and
//! supplies the payload for it; command-line flags override job keys, which
//! override built-in defaults.  Successful runs write `report.json` and,
//! for groups that produce a divisor or gcd series, `series.csv` into the
//! output directory, then print the paths written.  Reruns of the same job
//! produce byte-identical files.  Failures print a single JSON object to
//! stderr and exit with 2 (malformed input), 3 (violated hypothesis), or
//! 4 (internal certification failure).

mod job;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use divseq::ellff::{
    ec_nontorsion_certificate, ec_sequence, Certificate, EllCurveFF, EllPointFF,
};
use divseq::error::{Error, ErrorKind, Result};
use divseq::mulgrp::{gm_sequence, mult_independent, GmPoint, IndependenceMode};
use divseq::parse::parse_ratfun;
use divseq::seqlab::{
    analyze, int_gcd_sequence, mixed_sequence, pq_bound_check, sequence_report_json, series_csv,
};
use divseq::{PlaceRegistry, RationalFunction};

use job::JobSpec;

#[derive(Parser)]
#[command(
    name = "divseq",
    version,
    about = "Divisor sequences for points on split semiabelian groups over Q(t)"
)]
struct Cli {
    /// Job file describing the run
    #[arg(long)]
    job: PathBuf,
    /// Horizon override: compute the sequence for n = 1..=NMAX
    #[arg(long)]
    nmax: Option<u64>,
    /// Output directory override
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 keeps the library default)
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for the specialization search in nontorsion certificates
    #[arg(long)]
    seed: Option<u64>,
    /// Trailing-window override for stabilization checks
    #[arg(long)]
    window: Option<u32>,
    /// Artifacts to write
    #[arg(long, value_parser = ["json", "csv", "both"])]
    format: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code: u8 = match e.kind() {
                ErrorKind::Parse => 2,
                ErrorKind::Hypothesis => 3,
                ErrorKind::Certification => 4,
            };
            let payload = json!({
                "error": {
                    "exit_code": code,
                    "kind": e.kind().as_str(),
                    "message": e.to_string(),
                }
            });
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&payload).expect("error object serializes")
            );
            ExitCode::from(code)
        }
    }
}

/// Settings after merging flags over job keys over defaults.
struct Settings {
    nmax: u64,
    seed: u64,
    window: Option<u32>,
    trials: u32,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(&cli.job).map_err(|e| Error::Parse {
        line: 0,
        col: 0,
        msg: format!("cannot read job file {}: {e}", cli.job.display()),
    })?;
    let spec = job::parse_job(&text)?;

    let settings = Settings {
        nmax: cli.nmax.or(spec.nmax).unwrap_or(60),
        seed: cli.seed.or(spec.seed).unwrap_or(0),
        window: cli.window.or(spec.window),
        trials: spec.trials.unwrap_or(8),
    };
    let threads = cli.threads.or(spec.threads).unwrap_or(0);
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(spec.out.as_deref().unwrap_or(".")));
    let format = cli
        .format
        .clone()
        .or_else(|| spec.format.clone())
        .unwrap_or_else(|| "both".into());

    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Certification(format!("thread pool: {e}")))?;
    }

    let (envelope, csv) = match spec.group.as_str() {
        "gm" => run_gm(&spec, &settings)?,
        "ec" => run_ec(&spec, &settings)?,
        "mixed" => run_mixed(&spec, &settings)?,
        "indep" => run_indep(&spec)?,
        "intseq" => run_intseq(&spec, &settings)?,
        other => unreachable!("job parser admitted group `{other}`"),
    };

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Error::Certification(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut json_text =
        serde_json::to_string_pretty(&envelope).expect("report object serializes");
    json_text.push('\n');

    // A group without a series always gets report.json; otherwise `format`
    // picks the artifacts.
    let want_json = csv.is_none() || format != "csv";
    let want_csv = csv.is_some() && format != "json";
    let mut written = Vec::new();
    if want_json {
        let path = out_dir.join("report.json");
        write_artifact(&path, &json_text)?;
        written.push(path);
    }
    if want_csv {
        let path = out_dir.join("series.csv");
        write_artifact(&path, csv.as_deref().expect("checked above"))?;
        written.push(path);
    }
    Ok(written)
}

fn write_artifact(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body)
        .map_err(|e| Error::Certification(format!("cannot write {}: {e}", path.display())))
}

/// Missing-payload diagnostic pointing at the whole file.
fn missing(group: &str, key: &str) -> Error {
    Error::Parse {
        line: 0,
        col: 0,
        msg: format!("group `{group}` requires key `{key}`"),
    }
}

/// Parses one expression from a job value, rebasing parse diagnostics onto
/// the job file position of its key.
fn parse_expr(spec: &JobSpec, key: &str, src: &str) -> Result<RationalFunction> {
    parse_ratfun(src).map_err(|e| match e {
        Error::Parse { col, msg, .. } => {
            let (line, key_col) = spec.positions.get(key).copied().unwrap_or((0, 0));
            Error::Parse {
                line,
                col: key_col,
                msg: format!("in `{key}`, expression column {col}: {msg}"),
            }
        }
        other => other,
    })
}

fn parse_exprs(spec: &JobSpec, key: &str, srcs: &[String]) -> Result<Vec<RationalFunction>> {
    srcs.iter().map(|s| parse_expr(spec, key, s)).collect()
}

fn canonical(fs: &[RationalFunction]) -> Vec<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

fn run_gm(spec: &JobSpec, settings: &Settings) -> Result<(Value, Option<String>)> {
    let coords = parse_exprs(
        spec,
        "coords",
        spec.coords.as_deref().ok_or_else(|| missing("gm", "coords"))?,
    )?;
    let p = GmPoint::new(coords.clone())?;
    let q = match &spec.q_coords {
        Some(srcs) => Some(GmPoint::new(parse_exprs(spec, "q_coords", srcs)?)?),
        None => None,
    };
    let q_echo = q.as_ref().map(|q| canonical(q.coords()));

    let mut reg = PlaceRegistry::new();
    let seq = gm_sequence(&p, q.as_ref(), settings.nmax, &mut reg)?;
    // Comparing against the identity section makes the torsion progression
    // structure meaningful; against a second point only the bound survives.
    let report = analyze(&seq, q.is_none(), settings.window, Vec::new())?;
    let check = pq_bound_check(&seq, settings.window)?;
    let envelope = json!({
        "group": "gm",
        "inputs": {
            "coords": canonical(&coords),
            "q_coords": q_echo,
            "nmax": settings.nmax,
        },
        "report": sequence_report_json(&report, &check, &reg),
    });
    Ok((envelope, Some(series_csv(&seq, &reg))))
}

/// Curve and base point shared by the `ec` and `mixed` groups, with the
/// nontorsion certificate already enforced.
fn elliptic_payload(
    spec: &JobSpec,
    settings: &Settings,
    group: &str,
) -> Result<(EllCurveFF, EllPointFF, Vec<RationalFunction>, Value)> {
    let ai = parse_exprs(
        spec,
        "a_invariants",
        spec.a_invariants
            .as_deref()
            .ok_or_else(|| missing(group, "a_invariants"))?,
    )?;
    let [a1, a2, a3, a4, a6]: [RationalFunction; 5] =
        ai.clone().try_into().expect("job parser enforces five entries");
    let curve = EllCurveFF::new(a1, a2, a3, a4, a6)?;
    let pt = parse_exprs(
        spec,
        "point",
        spec.point.as_deref().ok_or_else(|| missing(group, "point"))?,
    )?;
    let p = EllPointFF::affine(pt[0].clone(), pt[1].clone());

    let cert = match ec_nontorsion_certificate(&curve, &p, settings.trials, settings.seed)? {
        Certificate::NonTorsion { witness } => json!({
            "verdict": "nontorsion",
            "witness": witness.to_string(),
        }),
        Certificate::TorsionOrder(k) => return Err(Error::TorsionBasePoint(k)),
        Certificate::Inconclusive { tried } => {
            return Err(Error::CertificateInconclusive(tried))
        }
    };
    Ok((curve, p, ai, cert))
}

fn run_ec(spec: &JobSpec, settings: &Settings) -> Result<(Value, Option<String>)> {
    let (curve, p, ai, cert) = elliptic_payload(spec, settings, "ec")?;
    let q = match &spec.q_point {
        Some(srcs) => {
            let qt = parse_exprs(spec, "q_point", srcs)?;
            Some(EllPointFF::affine(qt[0].clone(), qt[1].clone()))
        }
        None => None,
    };
    let q_echo = q
        .as_ref()
        .and_then(|q| q.coordinates())
        .map(|(x, y)| vec![x.to_string(), y.to_string()]);
    let p_echo = p.coordinates().map(|(x, y)| vec![x.to_string(), y.to_string()]);

    let mut reg = PlaceRegistry::new();
    let (seq, tags) = ec_sequence(&curve, &p, q.as_ref(), settings.nmax, &mut reg)?;
    let report = analyze(&seq, q.is_none(), settings.window, tags)?;
    let check = pq_bound_check(&seq, settings.window)?;
    let envelope = json!({
        "group": "ec",
        "inputs": {
            "a_invariants": canonical(&ai),
            "point": p_echo,
            "q_point": q_echo,
            "nmax": settings.nmax,
            "seed": settings.seed,
            "trials": settings.trials,
        },
        "certificate": cert,
        "report": sequence_report_json(&report, &check, &reg),
    });
    Ok((envelope, Some(series_csv(&seq, &reg))))
}

fn run_mixed(spec: &JobSpec, settings: &Settings) -> Result<(Value, Option<String>)> {
    let (curve, p, ai, cert) = elliptic_payload(spec, settings, "mixed")?;
    let coords = spec
        .coords
        .as_deref()
        .ok_or_else(|| missing("mixed", "coords"))?;
    let f = parse_expr(spec, "coords", &coords[0])?;
    let p_echo = p.coordinates().map(|(x, y)| vec![x.to_string(), y.to_string()]);

    let mut reg = PlaceRegistry::new();
    let (seq, tags) = mixed_sequence(&curve, &p, &f, settings.nmax, &mut reg)?;
    let report = analyze(&seq, true, settings.window, tags)?;
    let check = pq_bound_check(&seq, settings.window)?;
    let envelope = json!({
        "group": "mixed",
        "inputs": {
            "a_invariants": canonical(&ai),
            "point": p_echo,
            "coords": [f.to_string()],
            "nmax": settings.nmax,
            "seed": settings.seed,
            "trials": settings.trials,
        },
        "certificate": cert,
        "report": sequence_report_json(&report, &check, &reg),
    });
    Ok((envelope, Some(series_csv(&seq, &reg))))
}

fn run_indep(spec: &JobSpec) -> Result<(Value, Option<String>)> {
    let coords = parse_exprs(
        spec,
        "coords",
        spec.coords
            .as_deref()
            .ok_or_else(|| missing("indep", "coords"))?,
    )?;
    let mode = match spec.mode.as_deref().unwrap_or("exact") {
        "modulo-constants" => IndependenceMode::ModuloConstants,
        _ => IndependenceMode::Exact,
    };
    let verdict = mult_independent(&coords, mode)?;
    let envelope = json!({
        "group": "indep",
        "inputs": {
            "coords": canonical(&coords),
            "mode": spec.mode.as_deref().unwrap_or("exact"),
        },
        "report": verdict.to_json(),
    });
    Ok((envelope, None))
}

fn run_intseq(spec: &JobSpec, settings: &Settings) -> Result<(Value, Option<String>)> {
    let a = spec.a.ok_or_else(|| missing("intseq", "a"))?;
    let b = spec.b.ok_or_else(|| missing("intseq", "b"))?;
    let nmax = u32::try_from(settings.nmax)
        .map_err(|_| Error::Invalid("integer horizon must fit in 32 bits".into()))?;
    let report = int_gcd_sequence(a, b, nmax, settings.window)?;
    let envelope = json!({
        "group": "intseq",
        "inputs": {
            "a": a,
            "b": b,
            "nmax": nmax,
        },
        "report": report.to_json(),
    });
    Ok((envelope, Some(report.to_csv())))
}
