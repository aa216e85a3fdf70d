use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use ffkg_core::approx::{Psi, DEFAULT_COUNT_BUDGET};
use ffkg_core::counting::{big_t_series, counts_table, phi_series, write_counts_csv, CountVariant, Dims};
use ffkg_core::experiment::{run, summarize, write_runs_csv, RunConfig};
use ffkg_core::measure::{expected_n, verify_prop1, verify_prop2, MeasureOptions, VerifyConfig, DEFAULT_MEASURE_BUDGET};
use ffkg_core::{ExactRational, FieldSpec};
use serde_json::json;

use crate::{Command, Common, Format};

pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Everything validated from the shared flags before any computation.
struct Setup {
    field: FieldSpec,
    dims: Dims,
    psi: Psi,
}

fn setup(c: &Common) -> Result<Setup> {
    let modulus = c
        .modulus
        .as_deref()
        .map(|text| {
            text.split(',')
                .map(|t| t.trim().parse::<u32>().with_context(|| format!("bad modulus residue {t:?}")))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let field = FieldSpec::new(c.p, c.l, modulus)?;
    let dims = Dims::new(c.m, c.n)?;
    let psi = Psi::parse(&c.psi, c.allow_unit_psi)?;
    psi.exponents(c.q).context("psi must be defined for every r <= Q")?;
    if let Some(threads) = c.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(Setup { field, dims, psi })
}

fn config_lines(c: &Common, s: &Setup) -> Vec<String> {
    let modulus = s
        .field
        .modulus()
        .map(|m| m.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .unwrap_or_default();
    vec![
        format!("p={} l={} k={} modulus={}", s.field.p(), s.field.l(), s.field.k(), modulus),
        format!("m={} n={} psi={} Q={}", s.dims.m, s.dims.n, s.psi, c.q),
    ]
}

fn config_json(c: &Common, s: &Setup) -> serde_json::Value {
    json!({
        "p": s.field.p(),
        "l": s.field.l(),
        "k": s.field.k(),
        "modulus": s.field.modulus(),
        "m": s.dims.m,
        "n": s.dims.n,
        "psi": s.psi.to_string(),
        "Q": c.q,
    })
}

fn with_output<F>(out: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    with_output(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
        writeln!(w)
    })
}

fn rational_pair(r: &ExactRational) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

pub fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::VerifyProp1(c) => verify(&c, false),
        Command::VerifyProp2(c) => verify(&c, true),
        Command::Counts(c) => counts(&c),
        Command::Phi(c) => phi(&c),
        Command::ExpectedN(c) => expected(&c),
        Command::TRatio(c) => t_ratio(&c),
        Command::Run(c) => run_samples(&c),
    }
}

fn verify(c: &Common, pairs: bool) -> Result<Outcome> {
    let s = setup(c)?;
    let cfg = VerifyConfig {
        field: s.field.clone(),
        dims: s.dims,
        psi: s.psi.clone(),
        q_max: c.q,
        options: MeasureOptions {
            budget: c.budget.unwrap_or(DEFAULT_MEASURE_BUDGET),
            full_enumeration: c.full_enumeration,
        },
    };
    let (value, pass) = if pairs {
        eprintln!("ffkg: verifying the product rule on pairs of height <= {}^{}", s.field.k(), c.q);
        let report = verify_prop2(&cfg)?;
        eprintln!(
            "ffkg: {} independent pairs passed, {} failed; {} dependent ({} violate the product rule)",
            report.independent_passed, report.independent_failed, report.dependent, report.dependent_violating
        );
        (serde_json::to_value(&report)?, report.all_pass())
    } else {
        eprintln!("ffkg: verifying mu(B_q) for vectors of height <= {}^{}", s.field.k(), c.q);
        let report = verify_prop1(&cfg)?;
        eprintln!("ffkg: {} passed, {} failed", report.passed, report.failed);
        (serde_json::to_value(&report)?, report.all_pass())
    };
    write_json(c.out.as_deref(), &value)?;
    Ok(Outcome::from_pass(pass))
}

fn counts(c: &Common) -> Result<Outcome> {
    let s = setup(c)?;
    let rows = counts_table(c.q, s.dims.m, &s.field);
    match c.format {
        Format::Csv => {
            let preamble = config_lines(c, &s);
            with_output(c.out.as_deref(), |mut w| write_counts_csv(&mut w, &preamble, &rows))?;
        }
        Format::Json => write_json(c.out.as_deref(), &json!({ "config": config_json(c, &s), "rows": rows }))?,
    }
    Ok(Outcome::Pass)
}

fn phi(c: &Common) -> Result<Outcome> {
    let s = setup(c)?;
    let exact = phi_series(c.q, &s.psi, s.dims, &s.field, CountVariant::ExactEnumeration)?;
    let paper = phi_series(c.q, &s.psi, s.dims, &s.field, CountVariant::PaperFormula)?;
    match c.format {
        Format::Csv => {
            let preamble = config_lines(c, &s);
            with_output(c.out.as_deref(), |w| {
                for line in &preamble {
                    writeln!(w, "# {line}")?;
                }
                writeln!(w, "Q,phi_exact_num,phi_exact_den,phi_paper_num,phi_paper_den")?;
                for (q, (e, p)) in exact.iter().zip(&paper).enumerate() {
                    let ((en, ed), (pn, pd)) = (rational_pair(e), rational_pair(p));
                    writeln!(w, "{q},{en},{ed},{pn},{pd}")?;
                }
                Ok(())
            })?;
        }
        Format::Json => {
            let k = s.field.k();
            let rows: Vec<_> = exact
                .iter()
                .zip(&paper)
                .enumerate()
                .map(|(q, (e, p))| json!({ "Q": q, "phi_exact": e.to_k_string(k), "phi_paper": p.to_k_string(k) }))
                .collect();
            write_json(c.out.as_deref(), &json!({ "config": config_json(c, &s), "rows": rows }))?;
        }
    }
    Ok(Outcome::Pass)
}

fn expected(c: &Common) -> Result<Outcome> {
    let s = setup(c)?;
    let k = s.field.k();
    let budget = c.budget.unwrap_or(DEFAULT_MEASURE_BUDGET);
    eprintln!("ffkg: averaging N({}, A) over every cylinder", c.q);
    let mean = expected_n(c.q, &s.psi, s.dims, &s.field, budget)?;
    let exact = phi_series(c.q, &s.psi, s.dims, &s.field, CountVariant::ExactEnumeration)?.pop().expect("Q + 1 terms");
    let paper = phi_series(c.q, &s.psi, s.dims, &s.field, CountVariant::PaperFormula)?.pop().expect("Q + 1 terms");
    let pass = mean == exact;
    let value = json!({
        "config": config_json(c, &s),
        "expected_n": mean.to_k_string(k),
        "phi_exact": exact.to_k_string(k),
        "phi_paper": paper.to_k_string(k),
        "matches_phi_exact": pass,
        "matches_phi_paper": mean == paper,
    });
    write_json(c.out.as_deref(), &value)?;
    Ok(Outcome::from_pass(pass))
}

/// Ceiling asserted on `T(Q) / Φ(Q)`.
const T_RATIO_BOUND: f64 = 4.0;

fn t_ratio(c: &Common) -> Result<Outcome> {
    let s = setup(c)?;
    let budget = c.budget.unwrap_or(DEFAULT_COUNT_BUDGET);
    eprintln!("ffkg: summing divisor counts up to height {}^{}", s.field.k(), c.q);
    let t = big_t_series(c.q, &s.psi, s.dims, &s.field, budget)?;
    let exact = phi_series(c.q, &s.psi, s.dims, &s.field, CountVariant::ExactEnumeration)?;
    let ratios: Vec<f64> = t.iter().zip(&exact).map(|(t, p)| (t.clone() * invert(p)).to_f64()).collect();
    let pass = ratios.iter().all(|&r| r <= T_RATIO_BOUND);
    match c.format {
        Format::Csv => {
            let preamble = config_lines(c, &s);
            with_output(c.out.as_deref(), |w| {
                for line in &preamble {
                    writeln!(w, "# {line}")?;
                }
                writeln!(w, "Q,T_num,T_den,phi_exact_num,phi_exact_den,ratio")?;
                for (q, ((t, p), r)) in t.iter().zip(&exact).zip(&ratios).enumerate() {
                    let ((tn, td), (pn, pd)) = (rational_pair(t), rational_pair(p));
                    writeln!(w, "{q},{tn},{td},{pn},{pd},{r:.9}")?;
                }
                Ok(())
            })?;
        }
        Format::Json => {
            let k = s.field.k();
            let rows: Vec<_> = t
                .iter()
                .zip(&exact)
                .zip(&ratios)
                .enumerate()
                .map(|(q, ((t, p), r))| json!({ "Q": q, "T": t.to_k_string(k), "phi_exact": p.to_k_string(k), "ratio": r }))
                .collect();
            write_json(
                c.out.as_deref(),
                &json!({ "config": config_json(c, &s), "bound": T_RATIO_BOUND, "rows": rows }),
            )?;
        }
    }
    Ok(Outcome::from_pass(pass))
}

fn invert(r: &ExactRational) -> ExactRational {
    ExactRational::new(r.denom().clone(), r.numer().clone())
}

fn run_samples(c: &Common) -> Result<Outcome> {
    let s = setup(c)?;
    let cfg = RunConfig {
        field: s.field.clone(),
        dims: s.dims,
        psi: s.psi.clone(),
        q_max: c.q,
        samples: c.samples,
        seed: c.seed,
        epsilon: c.epsilon,
        orbit_representatives: c.orbit,
        budget: c.budget.unwrap_or(DEFAULT_COUNT_BUDGET),
    };
    eprintln!("ffkg: sampling {} matrices at precision {}", cfg.samples, cfg.precision()?);
    let records = run(&cfg)?;
    let summary = serde_json::to_value(summarize(&cfg, &records)?)?;
    match c.out.as_deref() {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            with_output(Some(&dir.join("runs.csv")), |mut w| write_runs_csv(&mut w, &records))?;
            write_json(Some(&dir.join("summary.json")), &summary)?;
            eprintln!("ffkg: wrote {} records to {}", records.len(), dir.display());
        }
        None => match c.format {
            Format::Csv => with_output(None, |mut w| write_runs_csv(&mut w, &records))?,
            Format::Json => write_json(None, &summary)?,
        },
    }
    Ok(Outcome::Pass)
}
