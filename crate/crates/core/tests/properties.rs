use proptest::prelude::*;

use ssh_sre::entanglement::{config_fluct_split, SectorLogs};
use ssh_sre::model::classify_window;
use ssh_sre::statmech::{constrained_entropy, solve_mu, SectorDecomposition};
use ssh_sre::{charged_moment, srpf_exact, total_renyi, total_vn, ChainSpec, ChargeResolvedTable, DefectKind, Window};

fn lambdas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..14)
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(l in lambdas()) {
        let z: f64 = srpf_exact(&l, 1.0).unwrap().iter().sum();
        prop_assert!((z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sectors_sum_to_the_uncharged_moment(l in lambdas(), n in 0.3f64..4.0) {
        let z: f64 = srpf_exact(&l, n).unwrap().iter().sum();
        let total = charged_moment(&l, n, 0.0).unwrap().re;
        prop_assert!((z - total).abs() < 1e-12 * total.max(1.0));
    }

    #[test]
    fn fourier_transform_of_charged_moments(l in prop::collection::vec(0.0f64..=1.0, 1..8), n in 0.5f64..3.0) {
        let z = srpf_exact(&l, n).unwrap();
        let points = 64;
        for (q, zq) in z.iter().enumerate() {
            let mut acc = 0.0;
            for k in 0..points {
                let alpha = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / points as f64;
                let m = charged_moment(&l, n, alpha).unwrap();
                acc += (m * num_complex::Complex64::from_polar(1.0, -alpha * q as f64)).re;
            }
            prop_assert!((acc / points as f64 - zq).abs() < 1e-12);
        }
    }

    #[test]
    fn configuration_plus_fluctuation_is_total(l in lambdas(), n in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let t = ChargeResolvedTable::from_lambdas(&l, n).unwrap();
        let (s_c, s_f) = config_fluct_split(&t);
        prop_assert!((s_c + s_f - total_vn(&l).unwrap()).abs() < 1e-10);
        if n != 1.0 {
            prop_assert!((t.totals.s_n - total_renyi(&l, n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn sector_entropies_bounded_by_sector_dimension(l in lambdas()) {
        let logs = SectorLogs::von_neumann(&l);
        for q in 0..logs.log_z.len() {
            if let Some(s) = logs.vn_entropy(q) {
                let dim = binomial(l.len(), q);
                prop_assert!(s > -1e-10 && s <= dim.ln() + 1e-10);
            }
        }
    }

    #[test]
    fn constrained_entropy_decomposes(eps in prop::collection::vec(-8.0f64..8.0, 2..30), frac in 0.05f64..0.95) {
        let q = frac * eps.len() as f64;
        let mu = solve_mu(&eps, q).unwrap();
        let direct = constrained_entropy(&eps, mu);
        let sectors = SectorDecomposition::new(&eps, mu);
        prop_assert!((direct - sectors.entropy()).abs() < 1e-8);
    }

    #[test]
    fn window_classification_is_total(m in 1usize..=200, ell in 1usize..=40) {
        let spec = ChainSpec::two_defect(400, 0.3, DefectKind::OneSite);
        let w = Window::new(m, ell);
        let sites = spec.defect_sites().unwrap();
        let inside = sites.iter().filter(|&&s| w.contains_site(s, 400)).count();
        match classify_window(&spec, w) {
            Ok(class) => prop_assert_eq!(class.defect.is_some(), inside == 1),
            Err(_) => prop_assert!(inside > 1),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
