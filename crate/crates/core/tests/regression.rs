use coqsim::fidelity::{sweep, SweepConfig};

// (alpha, avg_fidelity, renorm_fidelity, leakage) with exact beamsplitters,
// enumerated branches and the four basis inputs.
const GOLDEN: [(f64, f64, f64, f64); 4] = [
    (3.0, 0.5693337929406057, 0.7221288196067365, 0.21215053442111398),
    (6.0, 0.8263117807461697, 0.8829377561391931, 0.06414118471262623),
    (10.0, 0.9272737613898895, 0.9501525599825857, 0.024079251764180354),
    (20.0, 0.9804551664896516, 0.986503092740219, 0.006130672124472908),
];

#[test]
fn cnot_sweep_golden_values() {
    let cfg = SweepConfig::exact_default(GOLDEN.iter().map(|g| g.0).collect());
    let points = sweep(&cfg).unwrap();
    for (pt, &(alpha, avg, renorm, leak)) in points.iter().zip(&GOLDEN) {
        assert_eq!(pt.alpha, alpha);
        assert!((pt.avg_fidelity - avg).abs() < 1e-9, "avg at {alpha}: {}", pt.avg_fidelity);
        assert!((pt.renorm_fidelity - renorm).abs() < 1e-9, "renorm at {alpha}: {}", pt.renorm_fidelity);
        assert!((pt.leakage - leak).abs() < 1e-9, "leakage at {alpha}: {}", pt.leakage);
    }
}

#[test]
fn sweep_order_follows_input() {
    let cfg = SweepConfig::exact_default(vec![20.0, 3.0, 10.0]);
    let alphas: Vec<f64> = sweep(&cfg).unwrap().iter().map(|p| p.alpha).collect();
    assert_eq!(alphas, vec![20.0, 3.0, 10.0]);
}
