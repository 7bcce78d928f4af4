use coqsim::fock::{oracle_check_auto, OracleOp};
use coqsim::gates::{bit_flip, encode_superposition};
use coqsim::measurement::{cat_basis_branches, project_parity, HomodyneDensity};
use coqsim::{coherent_overlap, BeamsplitterParams, CoherentTerm, LogicalParams, Parity, SuperposedState};
use num_complex::Complex64;
use proptest::prelude::*;

fn amp(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, phi)| Complex64::from_polar(r, phi))
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(re, im)| re.abs() + im.abs() > 0.05)
        .prop_map(|(re, im)| Complex64::new(re, im))
}

fn state(n_modes: usize, max_terms: usize, radius: f64) -> impl Strategy<Value = SuperposedState> {
    prop::collection::vec((coeff(), prop::collection::vec(amp(radius), n_modes)), 1..=max_terms).prop_filter_map(
        "normalizable",
        move |terms| {
            let terms = terms.into_iter().map(|(c, a)| CoherentTerm::new(c, a)).collect();
            SuperposedState::new(n_modes, terms).ok()?.normalize().ok()
        },
    )
}

/// `||a - b||^2` from inner products.
fn dist_sqr(a: &SuperposedState, b: &SuperposedState) -> f64 {
    a.norm_sqr() + b.norm_sqr() - 2.0 * a.inner_product(b).unwrap().re
}

proptest! {
    #[test]
    fn unitaries_preserve_norm(
        s in state(2, 3, 5.0),
        beta in amp(5.0),
        eps in -3.2..3.2f64,
        theta in -3.2..3.2f64,
    ) {
        let outs = [
            s.displace(0, beta).unwrap(),
            s.phase_shift(1, eps).unwrap(),
            s.parity(0).unwrap(),
            s.beamsplitter(&BeamsplitterParams::new(theta, 0, 1)).unwrap(),
        ];
        for o in &outs {
            prop_assert!((o.norm_sqr() - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn beamsplitter_angles_add(s in state(2, 3, 4.0), t1 in -2.0..2.0f64, t2 in -2.0..2.0f64) {
        let bs = |x: &SuperposedState, t| x.beamsplitter(&BeamsplitterParams::new(t, 0, 1)).unwrap();
        let two = bs(&bs(&s, t1), t2);
        let one = bs(&s, t1 + t2);
        prop_assert!(dist_sqr(&two, &one).abs() < 1e-12);
    }

    #[test]
    fn overlap_bounded_and_gaussian(a in amp(8.0), b in amp(8.0)) {
        let o = coherent_overlap(a, b);
        prop_assert!(o.norm() <= 1.0 + 1e-15);
        prop_assert!((o.norm() - (-(a - b).norm_sqr() / 2.0).exp()).abs() < 1e-13);
        prop_assert!((coherent_overlap(b, a) - o.conj()).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip(s in state(3, 4, 10.0)) {
        let back = SuperposedState::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn bit_flip_is_an_involution(alpha in 0.5..15.0f64, mu in coeff(), nu in coeff()) {
        let p = LogicalParams::new(alpha).unwrap();
        let s = encode_superposition(mu, nu, &p).unwrap();
        let twice = bit_flip(&bit_flip(&s, 0, &p).unwrap(), 0, &p).unwrap();
        prop_assert!(dist_sqr(&twice, &s).abs() < 1e-12);
    }

    #[test]
    fn parity_projectors_idempotent_and_complete(s in state(2, 3, 4.0), mode in 0..2usize) {
        let even = project_parity(&s, mode, Parity::Even).unwrap();
        let odd = project_parity(&s, mode, Parity::Odd).unwrap();
        let even2 = project_parity(&even, mode, Parity::Even).unwrap();
        prop_assert!(dist_sqr(&even2, &even).abs() < 1e-12);
        prop_assert!(project_parity(&even, mode, Parity::Odd).unwrap().norm_sqr() < 1e-12);
        prop_assert!(dist_sqr(&even.superpose(&odd).unwrap(), &s).abs() < 1e-12);
        prop_assert!((even.norm_sqr() + odd.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cat_branches_complete(s in state(2, 3, 6.0), alpha in 0.5..10.0f64, mode in 0..2usize) {
        let p = LogicalParams::new(alpha).unwrap();
        let records = cat_basis_branches(&s, mode, &p).unwrap();
        let total: f64 = records.iter().map(|r| r.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for r in &records {
            prop_assert!((r.post_state.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn homodyne_density_normalized(s in state(2, 3, 5.0), angle in -3.2..3.2f64, mode in 0..2usize) {
        let d = HomodyneDensity::new(&s, mode, angle).unwrap();
        let total = coqsim::measurement::simpson(|x| d.at(x), -40.0, 40.0, 40_000);
        prop_assert!((total - 1.0).abs() < 1e-6, "total {}", total);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn analytic_matches_fock(
        s in state(2, 2, 2.0),
        other in state(2, 2, 2.0),
        beta in amp(1.5),
        eps in -3.2..3.2f64,
        theta in -3.2..3.2f64,
        alpha in 0.2..3.0f64,
    ) {
        let ops = [
            OracleOp::Overlap { other },
            OracleOp::Displacement { mode: 1, beta },
            OracleOp::Phase { mode: 0, epsilon: eps },
            OracleOp::Beamsplitter { theta },
            OracleOp::Parity { mode: 1 },
            OracleOp::CatMeasure { mode: 0, alpha },
        ];
        for op in &ops {
            let d = oracle_check_auto(&s, op).unwrap();
            prop_assert!(d <= 1e-8, "{} deviates by {}", op.name(), d);
        }
    }
}
