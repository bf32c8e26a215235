use ssh_sre::asymptotics::{asymptotic_table, zero_mode_table};
use ssh_sre::{AsymptoticParams, ChainSpec, ChargeResolvedTable, DefectKind, OccupationPolicy, Phase, SolvedChain, Window};

const ELL: usize = 20;
const WINDOWS: [(Phase, usize); 4] =
    [(Phase::Topological, 170), (Phase::Trivial, 90), (Phase::Defect, 41), (Phase::Defect, 141)];

fn chain() -> SolvedChain {
    SolvedChain::new(ChainSpec::two_defect(400, 0.3, DefectKind::OneSite)).unwrap()
}

fn lattice(sc: &SolvedChain, policy: &OccupationPolicy, m: usize, n: f64) -> ChargeResolvedTable {
    let lambdas = sc.lambdas(policy, Window::new(m, ELL)).unwrap();
    ChargeResolvedTable::from_lambdas(&lambdas, n).unwrap()
}

fn max_deviation(a: &ChargeResolvedTable, b: &ChargeResolvedTable) -> f64 {
    let mut worst: f64 = 0.0;
    for dq in -2..=2 {
        worst = worst.max((a.z_n_dq(dq) - b.z_n_dq(dq)).abs());
        worst = worst.max((a.probability_dq(dq) - b.probability_dq(dq)).abs());
        worst = worst.max((a.sre_dq(dq).unwrap() - b.sre_dq(dq).unwrap()).abs());
        worst = worst.max((a.sre_vn_dq(dq).unwrap() - b.sre_vn_dq(dq).unwrap()).abs());
    }
    worst
}

#[test]
fn bulk_windows_match_theta_asymptotics() {
    let sc = chain();
    let params = AsymptoticParams::new(0.3).unwrap();
    let policy = OccupationPolicy::below_half();
    for (phase, m) in WINDOWS {
        for n in [1.0, 2.0, 3.0] {
            let lat = lattice(&sc, &policy, m, n);
            let asy = asymptotic_table(phase, n, ELL, &params).unwrap();
            let dev = max_deviation(&lat, &asy);
            assert!(dev < 1e-3, "{phase:?} m={m} n={n}: {dev:e}");
            assert!((lat.totals.s_n - asy.totals.s_n).abs() < 1e-3);
        }
    }
}

#[test]
fn lattice_equipartition_patterns() {
    let sc = chain();
    let policy = OccupationPolicy::below_half();
    let spread = |t: &ChargeResolvedTable, dqs: &[i64]| {
        let s: Vec<f64> = dqs.iter().map(|&d| t.sre_vn_dq(d).unwrap()).collect();
        s.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - s.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let def = lattice(&sc, &policy, 41, 1.0);
    let occupied: Vec<i64> = (-3..=3).filter(|&d| def.probability_dq(d) > 1e-3).collect();
    assert!(occupied.len() >= 3);
    assert!(spread(&def, &occupied) < 1e-3);
    let top = lattice(&sc, &policy, 170, 1.0);
    let triv = lattice(&sc, &policy, 90, 1.0);
    for t in [&top, &triv] {
        assert!(spread(t, &[-2, 0, 2]) < 1e-3);
        assert!(spread(t, &[-3, -1, 1, 3]) < 1e-3);
    }
    assert!((top.sre_vn_dq(0).unwrap() - triv.sre_vn_dq(1).unwrap()).abs() < 1e-3);
    assert!((top.sre_vn_dq(1).unwrap() - triv.sre_vn_dq(0).unwrap()).abs() < 1e-3);
}

#[test]
fn excited_zero_mode_matches_closed_form() {
    let sc = chain();
    let params = AsymptoticParams::new(0.3).unwrap();
    for p in [0.02, 0.1, 0.5, 0.98] {
        for n in [1.0, 2.0] {
            let over_first = lattice(&sc, &OccupationPolicy::hybrid(p, 0.0), 41, n);
            let asy = zero_mode_table(p, n, &params, ELL).unwrap();
            let dev = max_deviation(&over_first, &asy);
            assert!(dev < 1e-3, "defect 1, p={p} n={n}: {dev:e}");
            // Over defect 2 the hybrid weight p sits inside the window.
            let over_second = lattice(&sc, &OccupationPolicy::hybrid(p, 0.0), 141, n);
            let asy = zero_mode_table(1.0 - p, n, &params, ELL).unwrap();
            let dev = max_deviation(&over_second, &asy);
            assert!(dev < 1e-3, "defect 2, p={p} n={n}: {dev:e}");
        }
    }
}
