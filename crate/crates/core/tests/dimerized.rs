use std::f64::consts::LN_2;

use ssh_sre::asymptotics::dimerized_table;
use ssh_sre::{ChainSpec, ChargeResolvedTable, DefectKind, OccupationPolicy, Phase, SolvedChain, Window};

const ELL: usize = 20;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn expected_multiset(phase: Phase) -> Vec<f64> {
    let (zeros, halves, ones) = match phase {
        Phase::Trivial => (ELL, 0, ELL),
        Phase::Topological => (ELL - 1, 2, ELL - 1),
        Phase::Defect => (ELL, 1, ELL - 1),
    };
    let mut v = vec![0.0; zeros];
    v.extend(vec![0.5; halves]);
    v.extend(vec![1.0; ones]);
    v
}

#[test]
fn correlation_spectra_and_tables() {
    for kind in [DefectKind::OneSite, DefectKind::ThreeSite] {
        let sc = SolvedChain::new(ChainSpec::two_defect(400, 1.0, kind)).unwrap();
        let policy = OccupationPolicy::below_half();
        for (phase, m) in [(Phase::Topological, 170), (Phase::Trivial, 90), (Phase::Defect, 41), (Phase::Defect, 141)] {
            let lambdas = sorted(sc.lambdas(&policy, Window::new(m, ELL)).unwrap());
            for (a, b) in lambdas.iter().zip(expected_multiset(phase)) {
                assert!((a - b).abs() < 1e-10, "{kind:?} {phase:?} m={m}");
            }
            for n in [1.0, 2.0, 3.0] {
                let lat = ChargeResolvedTable::from_lambdas(&lambdas, n).unwrap();
                let exact = dimerized_table(phase, ELL, n, None).unwrap();
                assert!((lat.totals.s_n - exact.totals.s_n).abs() < 1e-12);
                assert!((lat.totals.s_c - exact.totals.s_c).abs() < 1e-12);
                assert!((lat.totals.s_f - exact.totals.s_f).abs() < 1e-12);
                for dq in -3..=3 {
                    assert!((lat.z_n_dq(dq) - exact.z_n_dq(dq)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn hybridized_zero_mode_in_the_dimerized_limit() {
    let sc = SolvedChain::new(ChainSpec::two_defect(400, 1.0, DefectKind::OneSite)).unwrap();
    for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
        let lambdas = sc.lambdas(&OccupationPolicy::hybrid(p, 0.3), Window::new(41, ELL)).unwrap();
        for n in [1.0, 2.0] {
            let lat = ChargeResolvedTable::from_lambdas(&lambdas, n).unwrap();
            let exact = dimerized_table(Phase::Defect, ELL, n, Some(p)).unwrap();
            for dq in -2..=2 {
                assert!((lat.z_n_dq(dq) - exact.z_n_dq(dq)).abs() < 1e-12, "p={p} n={n} dq={dq}");
            }
            assert!((lat.totals.s_n - exact.totals.s_n).abs() < 1e-12);
            assert!((lat.totals.s_f - exact.totals.s_f).abs() < 1e-12);
        }
    }
    let half = dimerized_table(Phase::Defect, ELL, 1.0, Some(0.5)).unwrap();
    assert!((half.totals.s - 2.0 * LN_2).abs() < 1e-14);
}
