use ffkg_core::algebra::{FieldElem, FieldSpec, Poly, PolyVec};
use ffkg_core::approx::{bq_member, count_solutions, floor_to_v, CountOptions, Psi};
use ffkg_core::laurent::{poly_frac_mul, qa_fracpart, Frac, FracMatrix, Valuation};
use proptest::prelude::*;

fn field(index: usize) -> FieldSpec {
    match index % 4 {
        0 => FieldSpec::prime(2).unwrap(),
        1 => FieldSpec::prime(3).unwrap(),
        2 => FieldSpec::new(2, 2, None).unwrap(),
        _ => FieldSpec::prime(5).unwrap(),
    }
}

fn poly(f: &FieldSpec, raw: &[u32]) -> Poly {
    Poly::new(raw.iter().map(|&c| f.elem(c % f.k()).unwrap()).collect())
}

fn frac(f: &FieldSpec, raw: &[u32]) -> Frac {
    Frac::new(raw.iter().map(|&c| f.elem(c % f.k()).unwrap()).collect())
}

fn valuation_index(v: Valuation) -> usize {
    match v {
        Valuation::Exact(e) => e,
        Valuation::BelowPrecision(t) => t + 1,
    }
}

proptest! {
    #[test]
    fn abs_is_multiplicative(fi in 0usize..4, a in prop::collection::vec(0u32..256, 0..6), b in prop::collection::vec(0u32..256, 0..6)) {
        let f = field(fi);
        let (a, b) = (poly(&f, &a), poly(&f, &b));
        prop_assert_eq!(a.mul(&b, &f).abs(&f), a.abs(&f) * b.abs(&f));
    }

    #[test]
    fn abs_is_ultrametric(fi in 0usize..4, a in prop::collection::vec(0u32..256, 0..6), b in prop::collection::vec(0u32..256, 0..6)) {
        let f = field(fi);
        let (a, b) = (poly(&f, &a), poly(&f, &b));
        let (na, nb, ns) = (a.abs(&f), b.abs(&f), a.add(&b, &f).abs(&f));
        prop_assert!(ns <= na.clone().max(nb.clone()));
        if na != nb {
            prop_assert_eq!(ns, na.max(nb));
        }
    }

    #[test]
    fn frac_valuation_is_ultrametric(fi in 0usize..4, raw in prop::collection::vec((0u32..256, 0u32..256), 1..10)) {
        let f = field(fi);
        let x = frac(&f, &raw.iter().map(|p| p.0).collect::<Vec<_>>());
        let y = frac(&f, &raw.iter().map(|p| p.1).collect::<Vec<_>>());
        let (vx, vy) = (valuation_index(x.abs()), valuation_index(y.abs()));
        let vs = valuation_index(x.add(&y, &f).abs());
        prop_assert!(vs >= vx.min(vy));
        if vx != vy {
            prop_assert_eq!(vs, vx.min(vy));
        }
    }

    #[test]
    fn extending_precision_keeps_known_coefficients(
        fi in 0usize..4,
        q in prop::collection::vec(0u32..256, 1..4),
        x in prop::collection::vec(0u32..256, 4..8),
        extra in prop::collection::vec(0u32..256, 1..5),
    ) {
        let f = field(fi);
        let q = poly(&f, &q);
        let short = frac(&f, &x);
        let long = frac(&f, &x.iter().chain(&extra).copied().collect::<Vec<_>>());
        let (int_s, frac_s) = poly_frac_mul(&q, &short, &f).unwrap();
        let (int_l, frac_l) = poly_frac_mul(&q, &long, &f).unwrap();
        prop_assert_eq!(int_s, int_l);
        prop_assert_eq!(frac_s.coeffs(), &frac_l.coeffs()[..frac_s.precision()]);
    }

    #[test]
    fn small_multiplier_scales_the_valuation(
        fi in 0usize..4,
        q in prop::collection::vec(0u32..256, 1..3),
        lead_zeros in 1usize..4,
        x in prop::collection::vec(0u32..256, 1..6),
    ) {
        let f = field(fi);
        let q = poly(&f, &q);
        prop_assume!(!q.is_zero());
        let mut raw = vec![0u32; lead_zeros];
        raw.push(1);
        raw.extend(x);
        let x = frac(&f, &raw);
        let v = match x.abs() { Valuation::Exact(v) => v, _ => unreachable!() };
        let d = q.degree().unwrap();
        prop_assume!(d < v && v + d <= x.precision());
        let (int, fr) = poly_frac_mul(&q, &x, &f).unwrap();
        // No carry into the polynomial part; ‖q·x‖ = k^{deg q} · k^{-v}.
        prop_assert!(int.is_zero());
        prop_assert_eq!(fr.abs(), Valuation::Exact(v - d));
    }

    #[test]
    fn fractional_part_is_linear_in_q(
        fi in 0usize..4,
        a in prop::collection::vec(0u32..256, 6),
        q1 in prop::collection::vec(0u32..256, 4),
        q2 in prop::collection::vec(0u32..256, 4),
    ) {
        let f = field(fi);
        let mat = FracMatrix::column(vec![frac(&f, &a[..3]), frac(&f, &a[3..])]).unwrap();
        let v1 = PolyVec(vec![poly(&f, &q1[..2]), poly(&f, &q1[2..])]);
        let v2 = PolyVec(vec![poly(&f, &q2[..2]), poly(&f, &q2[2..])]);
        let lhs = qa_fracpart(&v1.add(&v2, &f), &mat, &f).unwrap();
        let r1 = qa_fracpart(&v1, &mat, &f).unwrap();
        let r2 = qa_fracpart(&v2, &mat, &f).unwrap();
        let window = lhs.precision().min(r1.precision()).min(r2.precision());
        let sum = r1.components()[0].add(&r2.components()[0], &f);
        prop_assert_eq!(&lhs.components()[0].coeffs()[..window], &sum.coeffs()[..window]);
    }

    #[test]
    fn membership_is_scalar_invariant(
        fi in 0usize..4,
        a in prop::collection::vec(0u32..256, 10),
        q in prop::collection::vec(0u32..256, 4),
        c in 1u32..256,
    ) {
        let f = field(fi);
        let mat = FracMatrix::column(vec![frac(&f, &a[..5]), frac(&f, &a[5..])]).unwrap();
        let q = PolyVec(vec![poly(&f, &q[..2]), poly(&f, &q[2..])]);
        prop_assume!(!q.is_zero());
        let c = f.elem(1 + c % (f.k() - 1)).unwrap();
        let psi = Psi::linear(1, 2).unwrap();
        prop_assert_eq!(bq_member(&q.scale(c, &f), &mat, &psi, &f).unwrap(), bq_member(&q, &mat, &psi, &f).unwrap());
    }

    #[test]
    fn counts_are_orbit_multiples_and_grow_with_q(fi in 0usize..4, seed in any::<u64>()) {
        let f = field(fi);
        let psi = Psi::linear(1, 1).unwrap();
        let q_max = if f.k() > 3 { 1 } else { 3 };
        let t = q_max as usize + 1 + psi.eval(q_max + 1).unwrap() as usize;
        let mut rng = ffkg_core::experiment::SplitMix64::new(seed);
        let a = ffkg_core::experiment::sample_matrix(&mut rng, 2, 1, t, &f);
        let opts = CountOptions::default();
        let mut prev = 0;
        for q in 0..=q_max + 1 {
            // Evaluate every Q on the same refined matrix.
            let n = count_solutions(q, &a, &psi, &f, &opts).unwrap();
            prop_assert_eq!(n % (f.k() as u64 - 1), 0);
            prop_assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn floor_to_v_brackets(x in 1e-9f64..10.0, k in 2u32..4) {
        let n = floor_to_v(x, k).unwrap();
        let lo = (k as f64).powi(-n as i32);
        prop_assert!(lo <= x * (1.0 + 1e-12));
        prop_assert!(x < (k as f64).powi(-(n as i32) + 1) * (1.0 + 1e-12));
    }
}

#[test]
fn scalar_multiples_share_the_whole_orbit() {
    let f = FieldSpec::prime(5).unwrap();
    let q = PolyVec(vec![Poly::from_ints(&f, &[1, 2]), Poly::from_ints(&f, &[3])]);
    let orbit = ffkg_core::counting::scalar_orbit(&q, &f);
    assert_eq!(orbit.len(), 4);
    assert!(orbit.iter().all(|v| v.height_exp() == q.height_exp()));
    assert!(orbit.contains(&q.scale(FieldElem::ONE, &f)));
}
