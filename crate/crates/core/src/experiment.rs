//! Monte Carlo comparison of `N(Q, A)` against `Φ(Q)` for Haar-random `A`.
//!
//! Membership in `B_q` for `‖q‖∞ ≤ k^Q` depends only on the first
//! `t = Q + s(Q)` coefficients of each entry, so sampling those coefficients
//! uniformly samples the relevant cylinder exactly.
//!
//! Randomness is SplitMix64. Sample `i` of a run seeded with `seed` starts
//! from state `seed + i · 2^40 · γ` (wrapping), which is the master stream
//! jumped ahead by `i · 2^40` draws. Coefficients are drawn row by row, then
//! column by column, then by depth.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::FieldSpec;
use crate::approx::{shell_counts, CountOptions, Psi};
use crate::counting::{big_t_series, phi_series, CountVariant, Dims};
use crate::error::{Error, Result};
use crate::laurent::{Frac, FracMatrix};
use crate::rational::ExactRational;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Draws per sample stream.
pub const SAMPLE_STREAM_SPACING: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream of sample `index` within the run seeded by `seed`.
    pub fn for_sample(seed: u64, index: u64) -> Self {
        let mut rng = Self::new(seed);
        rng.jump(index.wrapping_mul(SAMPLE_STREAM_SPACING));
        rng
    }

    /// Advances the stream by `draws` outputs in constant time.
    pub fn jump(&mut self, draws: u64) {
        self.state = self.state.wrapping_add(draws.wrapping_mul(GOLDEN_GAMMA));
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, bound)`: draws at or above the largest multiple of
    /// `bound` are rejected, the rest reduced mod `bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let limit = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let z = self.next_u64();
            // `limit` is the last accepted value; for powers of two nothing is rejected.
            if z <= limit {
                return z % bound;
            }
        }
    }
}

/// An `m × n` matrix of `t` uniform coefficients per entry.
pub fn sample_matrix(rng: &mut SplitMix64, m: usize, n: usize, t: usize, f: &FieldSpec) -> FracMatrix {
    assert!(t >= 1, "sampled entries need at least one coefficient");
    let k = f.k() as u64;
    let entries = (0..m * n)
        .map(|_| {
            Frac::new((0..t).map(|_| f.elem(rng.below(k) as u32).expect("draw below k")).collect())
        })
        .collect();
    FracMatrix::new(m, n, entries).expect("well-formed sample")
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub dims: Dims,
    pub psi: Psi,
    pub q_max: u32,
    pub samples: u64,
    pub seed: u64,
    pub epsilon: f64,
    /// Count one vector per scalar orbit and scale by `k − 1`.
    pub orbit_representatives: bool,
    pub budget: u128,
}

impl RunConfig {
    /// Sampled precision `Q_max + s(Q_max)`.
    pub fn precision(&self) -> Result<usize> {
        Ok(self.q_max as usize + self.psi.eval(self.q_max)? as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::EmptyInput);
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::NonPositiveInput(self.epsilon));
        }
        self.psi.exponents(self.q_max)?;
        if self.precision()? == 0 {
            return Err(Error::InvalidPsi("sampled precision would be zero".into()));
        }
        Ok(())
    }
}

/// One `(sample, Q)` outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub sample: u64,
    #[serde(rename = "Q")]
    pub q: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub phi_exact: ExactRational,
    pub phi_paper: ExactRational,
    #[serde(rename = "T")]
    pub t: ExactRational,
    pub residual: ExactRational,
    /// `|N − Φ| / (√Φ · ln(Φ)^{3/2+ε})`, present when `Φ > e`.
    pub normalized: Option<f64>,
}

/// `|residual| / (√Φ · ln(Φ)^{3/2+ε})`, or `None` when `Φ ≤ e`.
pub fn normalize_residual(residual: &ExactRational, phi: &ExactRational, epsilon: f64) -> Option<f64> {
    let phi = phi.to_f64();
    if phi <= std::f64::consts::E {
        return None;
    }
    Some(residual.abs().to_f64() / (phi.sqrt() * phi.ln().powf(1.5 + epsilon)))
}

/// Deterministic per-`Q` quantities shared by every sample.
struct Targets {
    phi_exact: Vec<ExactRational>,
    phi_paper: Vec<ExactRational>,
    big_t: Vec<ExactRational>,
}

fn targets(cfg: &RunConfig) -> Result<Targets> {
    Ok(Targets {
        phi_exact: phi_series(cfg.q_max, &cfg.psi, cfg.dims, &cfg.field, CountVariant::ExactEnumeration)?,
        phi_paper: phi_series(cfg.q_max, &cfg.psi, cfg.dims, &cfg.field, CountVariant::PaperFormula)?,
        big_t: big_t_series(cfg.q_max, &cfg.psi, cfg.dims, &cfg.field, cfg.budget)?,
    })
}

/// Shell counts of one sample; `N(Q)` is their prefix sum.
pub fn sample_shells(cfg: &RunConfig, sample: u64) -> Result<Vec<u64>> {
    let t = cfg.precision()?;
    let mut rng = SplitMix64::for_sample(cfg.seed, sample);
    let a = sample_matrix(&mut rng, cfg.dims.m, cfg.dims.n, t, &cfg.field);
    let opts = CountOptions { orbit_representatives: cfg.orbit_representatives, budget: cfg.budget };
    shell_counts(cfg.q_max, &a, &cfg.psi, &cfg.field, &opts).map_err(|e| match e {
        Error::InsufficientPrecision { .. } => unreachable!("sampled precision covers every shell: {e}"),
        other => other,
    })
}

/// Runs every sample, in parallel on the current rayon pool, and returns
/// records ordered by sample then `Q`.
pub fn run(cfg: &RunConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let targets = targets(cfg)?;
    let per_sample: Vec<Vec<u64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| sample_shells(cfg, i))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(per_sample.len() * (cfg.q_max as usize + 1));
    for (sample, shells) in per_sample.into_iter().enumerate() {
        let mut n = 0u64;
        for (q, shell) in shells.into_iter().enumerate() {
            n += shell;
            let phi_exact = targets.phi_exact[q].clone();
            let residual = &ExactRational::from_integer(n) - &phi_exact;
            records.push(RunRecord {
                seed: cfg.seed,
                sample: sample as u64,
                q: q as u32,
                n,
                normalized: normalize_residual(&residual, &phi_exact, cfg.epsilon),
                phi_exact,
                phi_paper: targets.phi_paper[q].clone(),
                t: targets.big_t[q].clone(),
                residual,
            });
        }
    }
    Ok(records)
}

pub const RUNS_CSV_HEADER: &str =
    "seed,sample,Q,N,phi_exact_num,phi_exact_den,phi_paper_num,phi_paper_den,T_num,T_den,residual,normalized";

/// Writes `runs.csv`. `residual` is the exact value `N − Φ` as `num` or
/// `num/den`; `normalized` is empty where it is undefined.
pub fn write_runs_csv<W: Write>(out: &mut W, records: &[RunRecord]) -> io::Result<()> {
    writeln!(out, "{RUNS_CSV_HEADER}")?;
    for r in records {
        let normalized = r.normalized.map(|v| format!("{v:.9}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.sample,
            r.q,
            r.n,
            r.phi_exact.numer(),
            r.phi_exact.denom(),
            r.phi_paper.numer(),
            r.phi_paper.denom(),
            r.t.numer(),
            r.t.denom(),
            r.residual,
            normalized
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QStats {
    #[serde(rename = "Q")]
    pub q: u32,
    pub samples: u64,
    pub mean_n: f64,
    /// Unbiased sample variance; zero for a single sample.
    pub var_n: f64,
    pub phi_exact: f64,
    pub phi_paper: f64,
    pub t: f64,
    pub max_normalized: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub per_q: Vec<QStats>,
    /// Largest normalized residual over all records.
    pub max_normalized: Option<f64>,
    /// Least-squares slope of the per-`Q` maximum against `Q`.
    pub trend_slope: Option<f64>,
    /// Whether the per-`Q` maximum strictly increases across every defined `Q`.
    pub monotone_increasing: bool,
}

pub fn residual_stats(records: &[RunRecord]) -> Result<Stats> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let q_max = records.iter().map(|r| r.q).max().expect("non-empty");
    let mut per_q = Vec::new();
    for q in 0..=q_max {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.q == q).collect();
        if rows.is_empty() {
            continue;
        }
        let count = rows.len() as f64;
        let mean = rows.iter().map(|r| r.n as f64).sum::<f64>() / count;
        let var = if rows.len() > 1 {
            rows.iter().map(|r| (r.n as f64 - mean).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        let max_normalized = rows.iter().filter_map(|r| r.normalized).reduce(f64::max);
        per_q.push(QStats {
            q,
            samples: rows.len() as u64,
            mean_n: mean,
            var_n: var,
            phi_exact: rows[0].phi_exact.to_f64(),
            phi_paper: rows[0].phi_paper.to_f64(),
            t: rows[0].t.to_f64(),
            max_normalized,
        });
    }
    let series: Vec<(f64, f64)> =
        per_q.iter().filter_map(|s| s.max_normalized.map(|v| (s.q as f64, v))).collect();
    let max_normalized = series.iter().map(|&(_, v)| v).reduce(f64::max);
    let trend_slope = (series.len() >= 2).then(|| {
        let len = series.len() as f64;
        let mx = series.iter().map(|p| p.0).sum::<f64>() / len;
        let my = series.iter().map(|p| p.1).sum::<f64>() / len;
        let sxy: f64 = series.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = series.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let monotone_increasing = series.len() >= 2 && series.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(Stats { per_q, max_normalized, trend_slope, monotone_increasing })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub p: u32,
    pub l: u32,
    pub k: u32,
    pub modulus: Option<Vec<u32>>,
    pub m: usize,
    pub n: usize,
    pub psi: String,
    #[serde(rename = "Q")]
    pub q_max: u32,
    pub samples: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub precision: usize,
    pub orbit_representatives: bool,
    pub log_base: &'static str,
    pub stats: Stats,
}

pub fn summarize(cfg: &RunConfig, records: &[RunRecord]) -> Result<RunSummary> {
    Ok(RunSummary {
        p: cfg.field.p(),
        l: cfg.field.l(),
        k: cfg.field.k(),
        modulus: cfg.field.modulus().map(<[u32]>::to_vec),
        m: cfg.dims.m,
        n: cfg.dims.n,
        psi: cfg.psi.to_string(),
        q_max: cfg.q_max,
        samples: cfg.samples,
        seed: cfg.seed,
        epsilon: cfg.epsilon,
        precision: cfg.precision()?,
        orbit_representatives: cfg.orbit_representatives,
        log_base: "natural",
        stats: residual_stats(records)?,
    })
}
