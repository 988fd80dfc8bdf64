use proptest::prelude::*;
use subgauss_core::deviation::{bilinear_form, deviation_matrix, quad_form, spectral_norm, weyl_bounds};
use subgauss_core::montecarlo::wilson_interval;
use subgauss_core::samplers::{sample_ensemble, FamilyKind, FamilySpec};

fn family_strategy() -> impl Strategy<Value = FamilySpec> {
    (1usize..6, 0usize..3, prop::collection::vec(0.1f64..4.0, 6)).prop_map(|(dim, which, params)| {
        let kind = match which {
            0 => FamilyKind::StandardGaussian,
            1 => FamilyKind::Rademacher,
            _ => FamilyKind::AnisotropicGaussian(params[..dim].to_vec()),
        };
        FamilySpec::new(kind, dim).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polarization_identity(fam in family_strategy(), n_rows in 1usize..40, seed: u64,
                             a in prop::collection::vec(-2.0f64..2.0, 6),
                             b in prop::collection::vec(-2.0f64..2.0, 6)) {
        let dim = fam.dim;
        let dev = deviation_matrix(&sample_ensemble(&fam, n_rows, seed).unwrap());
        let (z1, z2) = (&a[..dim], &b[..dim]);
        let plus: Vec<f64> = z1.iter().zip(z2).map(|(x, y)| x + y).collect();
        let minus: Vec<f64> = z1.iter().zip(z2).map(|(x, y)| x - y).collect();
        let polar = (quad_form(&dev, &plus).unwrap() - quad_form(&dev, &minus).unwrap()) / 4.0;
        let direct = bilinear_form(&dev, z1, z2).unwrap();
        let scale = spectral_norm(&dev).unwrap() * 16.0 + 1.0;
        prop_assert!((polar - direct).abs() <= 1e-12 * scale);
    }

    #[test]
    fn quad_form_dominated_by_norm(fam in family_strategy(), n_rows in 1usize..40, seed: u64,
                                   a in prop::collection::vec(-2.0f64..2.0, 6)) {
        let dev = deviation_matrix(&sample_ensemble(&fam, n_rows, seed).unwrap());
        let z = &a[..fam.dim];
        let zz: f64 = z.iter().map(|x| x * x).sum();
        let norm = spectral_norm(&dev).unwrap();
        prop_assert!(quad_form(&dev, z).unwrap().abs() <= norm * zz * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn prefix_stability(fam in family_strategy(), short in 1usize..30, extra in 0usize..30, seed: u64) {
        let a = sample_ensemble(&fam, short, seed).unwrap();
        let b = sample_ensemble(&fam, short + extra, seed).unwrap();
        for j in 0..short {
            prop_assert_eq!(a.rows.row(j), b.rows.row(j));
        }
    }

    #[test]
    fn weyl_always_holds(fam in family_strategy(), n_rows in 1usize..60, seed: u64) {
        let w = weyl_bounds(&sample_ensemble(&fam, n_rows, seed).unwrap(), 0.5).unwrap();
        let tol = 1e-10 * (1.0 + w.spec_norm_d);
        prop_assert!((w.lam_max_emp - w.lam_max_exp).abs() <= w.spec_norm_d + tol);
        prop_assert!((w.lam_min_emp - w.lam_min_exp).abs() <= w.spec_norm_d + tol);
    }

    #[test]
    fn wilson_interval_is_ordered(trials in 1usize..5000, frac in 0.0f64..=1.0, conf in 0.5f64..0.999) {
        let failures = ((trials as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(failures, trials, conf).unwrap();
        let p = failures as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }
}

/// Empirical coverage of the 95% Wilson interval for a Bernoulli(0.1) mean
/// over 200 trials stays near its nominal level.
#[test]
fn wilson_coverage() {
    use rand_core::RngCore;
    let p = 0.1;
    let mut rng = subgauss_core::rng::stream(3, 0);
    let reps = 4000;
    let mut covered = 0;
    for _ in 0..reps {
        let f = (0..200)
            .filter(|_| ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64) < p)
            .count();
        let (lo, hi) = wilson_interval(f, 200, 0.95).unwrap();
        if lo <= p && p <= hi {
            covered += 1;
        }
    }
    let rate = covered as f64 / reps as f64;
    assert!((0.92..=0.975).contains(&rate), "coverage {rate}");
}
