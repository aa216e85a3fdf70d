use ffkg_core::algebra::{FieldSpec, Poly, PolyVec};
use ffkg_core::approx::{bq_member, Psi, DEFAULT_COUNT_BUDGET};
use ffkg_core::counting::{phi, CountVariant, Dims};
use ffkg_core::experiment::{run, sample_matrix, write_runs_csv, RunConfig, SplitMix64};
use ffkg_core::measure::{lin_indep, measure_bq, MeasureOptions};

#[test]
fn seed_one_reference_bits() {
    // SplitMix64(seed = 1), low bit of the first eight outputs.
    let f = FieldSpec::prime(2).unwrap();
    let a = sample_matrix(&mut SplitMix64::new(1), 1, 1, 8, &f);
    let bits: Vec<usize> = a.get(0, 0).coeffs().iter().map(|c| c.index()).collect();
    assert_eq!(bits, vec![1, 1, 0, 1, 1, 0, 1, 1]);

    let again = sample_matrix(&mut SplitMix64::new(1), 1, 1, 8, &f);
    assert_eq!(a, again);
}

#[test]
fn draws_are_uniform_at_two_stream_positions() {
    for k in [2u32, 3, 4, 5] {
        for sample in [0u64, 17] {
            let mut rng = SplitMix64::for_sample(2024, sample);
            let draws = 100_000u64;
            let mut freq = vec![0u64; k as usize];
            for _ in 0..draws {
                freq[rng.below(k as u64) as usize] += 1;
            }
            let p = 1.0 / k as f64;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            let chi2: f64 = freq
                .iter()
                .map(|&o| (o as f64 - draws as f64 * p).powi(2) / (draws as f64 * p))
                .sum();
            for &o in &freq {
                assert!((o as f64 - draws as f64 * p).abs() <= 4.0 * sigma, "k={k} freq={freq:?}");
            }
            // Far beyond the 99.99% quantile for at most 4 degrees of freedom.
            assert!(chi2 < 30.0, "k={k} chi2={chi2}");
        }
    }
}

fn v(f: &FieldSpec, comps: &[&[u64]]) -> PolyVec {
    PolyVec(comps.iter().map(|c| Poly::from_ints(f, c)).collect())
}

#[test]
fn membership_frequency_matches_exact_measure() {
    let f = FieldSpec::prime(2).unwrap();
    let psi = Psi::linear(1, 1).unwrap();
    let samples = 4000u64;
    let t = 3 + psi.eval(3).unwrap() as usize;
    let mats: Vec<_> = (0..samples)
        .map(|i| sample_matrix(&mut SplitMix64::for_sample(77, i), 2, 1, t, &f))
        .collect();
    for q in [v(&f, &[&[1], &[]]), v(&f, &[&[0, 1], &[1]]), v(&f, &[&[1, 1, 1], &[0, 0, 1]]), v(&f, &[&[1], &[1, 0, 0, 1]])] {
        let mu = measure_bq(&q, &psi, 1, &f, &MeasureOptions::default()).unwrap().value().to_f64();
        let hits = mats.iter().filter(|a| bq_member(&q, a, &psi, &f).unwrap()).count();
        let freq = hits as f64 / samples as f64;
        let tol = 5.0 * (mu * (1.0 - mu) / samples as f64).sqrt();
        assert!((freq - mu).abs() <= tol, "q={} freq={freq} mu={mu}", q.format(&f));
    }
}

#[test]
fn independent_indicators_are_uncorrelated() {
    let f = FieldSpec::prime(3).unwrap();
    let psi = Psi::linear(1, 1).unwrap();
    let samples = 4000u64;
    let t = 2 + psi.eval(2).unwrap() as usize;
    let pairs = [
        (v(&f, &[&[1], &[]]), v(&f, &[&[], &[1]])),
        (v(&f, &[&[0, 1], &[1]]), v(&f, &[&[1], &[2]])),
        (v(&f, &[&[1, 1], &[0, 2]]), v(&f, &[&[0, 0, 1], &[1]])),
    ];
    for (q, q2) in pairs {
        assert!(lin_indep(&q, &q2, &f).unwrap());
        let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
        for i in 0..samples {
            let a = sample_matrix(&mut SplitMix64::for_sample(5, i), 2, 1, t, &f);
            let x = bq_member(&q, &a, &psi, &f).unwrap() as u8 as f64;
            let y = bq_member(&q2, &a, &psi, &f).unwrap() as u8 as f64;
            s1 += x;
            s2 += y;
            s12 += x * y;
        }
        let m = samples as f64;
        let cov = s12 / m - (s1 / m) * (s2 / m);
        assert!(cov.abs() <= 5.0 / m.sqrt(), "cov={cov}");
    }
}

#[test]
fn sample_mean_tracks_exact_main_term_not_formula() {
    let f = FieldSpec::prime(2).unwrap();
    let dims = Dims::new(2, 1).unwrap();
    let psi = Psi::linear(1, 1).unwrap();
    let cfg = RunConfig {
        field: f.clone(),
        dims,
        psi: psi.clone(),
        q_max: 3,
        samples: 3000,
        seed: 11,
        epsilon: 0.1,
        orbit_representatives: false,
        budget: DEFAULT_COUNT_BUDGET,
    };
    let records = run(&cfg).unwrap();
    for q in 0..=3u32 {
        let ns: Vec<f64> = records.iter().filter(|r| r.q == q).map(|r| r.n as f64).collect();
        let mean = ns.iter().sum::<f64>() / ns.len() as f64;
        let var = ns.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (ns.len() as f64 - 1.0);
        let se = (var / ns.len() as f64).sqrt();
        let exact = phi(q, &psi, dims, &f, CountVariant::ExactEnumeration).unwrap().to_f64();
        let paper = phi(q, &psi, dims, &f, CountVariant::PaperFormula).unwrap().to_f64();
        assert!((mean - exact).abs() <= 5.0 * se, "Q={q} mean={mean} exact={exact} se={se}");
        assert!((mean - paper).abs() > 5.0 * se, "Q={q} mean={mean} paper={paper} se={se}");
    }
}

#[test]
fn records_respect_support_and_orbit_structure() {
    for (p, orbit) in [(3u32, false), (3, true), (5, true)] {
        let f = FieldSpec::prime(p).unwrap();
        let cfg = RunConfig {
            field: f.clone(),
            dims: Dims::new(2, 1).unwrap(),
            psi: Psi::linear(1, 1).unwrap(),
            q_max: 2,
            samples: 50,
            seed: 8,
            epsilon: 0.1,
            orbit_representatives: orbit,
            budget: DEFAULT_COUNT_BUDGET,
        };
        let records = run(&cfg).unwrap();
        assert_eq!(records.len(), 50 * 3);
        let k = p as u64;
        for r in &records {
            assert_eq!(r.n % (k - 1), 0);
            assert!(r.n <= k.pow(2 * (r.q + 1)) - 1);
        }
    }
}

#[test]
fn orbit_option_does_not_change_output() {
    let f = FieldSpec::prime(3).unwrap();
    let base = RunConfig {
        field: f,
        dims: Dims::new(2, 1).unwrap(),
        psi: Psi::linear(1, 1).unwrap(),
        q_max: 2,
        samples: 20,
        seed: 4,
        epsilon: 0.1,
        orbit_representatives: false,
        budget: DEFAULT_COUNT_BUDGET,
    };
    let a = run(&base).unwrap();
    let b = run(&RunConfig { orbit_representatives: true, ..base }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_is_thread_count_independent() {
    let cfg = RunConfig {
        field: FieldSpec::prime(2).unwrap(),
        dims: Dims::new(2, 1).unwrap(),
        psi: Psi::linear(2, 1).unwrap(),
        q_max: 4,
        samples: 40,
        seed: 42,
        epsilon: 0.1,
        orbit_representatives: false,
        budget: DEFAULT_COUNT_BUDGET,
    };
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let records = pool.install(|| run(&cfg)).unwrap();
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &records).unwrap();
        buf
    };
    let one = render(1);
    assert_eq!(one, render(4));
    assert_eq!(one, render(1));
}
