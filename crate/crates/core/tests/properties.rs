use proptest::prelude::*;
use sphmean::forward::{spherical_mean, spherical_mean_direct, Bump, Phantom};
use sphmean::geometry::{distance, midplane};
use sphmean::transforms::{hilbert_transform, GridSpec, ProfileGrid};

fn bump(c: (f64, f64), radius: f64, amplitude: f64) -> Bump {
    Bump {
        center: vec![c.0, c.1],
        radius,
        smoothness: 6,
        amplitude,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn midplane_points_are_equidistant(
        x0 in prop::array::uniform3(-1.0f64..1.0),
        x1 in prop::array::uniform3(-1.0f64..1.0),
        t in prop::array::uniform3(-1.0f64..1.0),
    ) {
        prop_assume!(distance(&x0, &x1) > 1e-3);
        let m = midplane(&x0, &x1).unwrap();
        // Project an arbitrary point onto the midplane.
        let dot: f64 = t.iter().zip(&m.omega_star).map(|(a, b)| a * b).sum();
        let p: Vec<f64> = t.iter().zip(&m.omega_star).map(|(a, w)| a + (m.s_star - dot) * w).collect();
        prop_assert!((distance(&p, &x0) - distance(&p, &x1)).abs() < 1e-12);
        let norm: f64 = m.omega_star.iter().map(|w| w * w).sum();
        prop_assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spherical_mean_is_linear(
        c1 in (-0.3f64..0.3, -0.3f64..0.3),
        c2 in (-0.3f64..0.3, -0.3f64..0.3),
        x in (-0.5f64..0.5, -0.5f64..0.5),
        r in 0.0f64..1.2,
        k in -2.0f64..2.0,
    ) {
        let a = Phantom::new(2, vec![bump(c1, 0.4, 1.0)]).unwrap();
        let b = Phantom::new(2, vec![bump(c2, 0.3, k)]).unwrap();
        let both = Phantom::new(2, vec![bump(c1, 0.4, 1.0), bump(c2, 0.3, k)]).unwrap();
        let x = [x.0, x.1];
        let sum = spherical_mean(&a, &x, r).unwrap() + spherical_mean(&b, &x, r).unwrap();
        prop_assert!((spherical_mean(&both, &x, r).unwrap() - sum).abs() < 1e-13);
    }

    #[test]
    fn spherical_mean_matches_direct_quadrature(
        x in (-0.5f64..0.5, -0.5f64..0.5),
        r in 0.05f64..1.0,
    ) {
        let p = Phantom::new(2, vec![bump((0.1, -0.1), 0.5, 1.0)]).unwrap();
        let x = [x.0, x.1];
        let fast = spherical_mean(&p, &x, r).unwrap();
        let direct = spherical_mean_direct(&p, &x, r, 4096).unwrap();
        prop_assert!((fast - direct).abs() < 1e-9, "{} vs {}", fast, direct);
    }

    #[test]
    fn hilbert_transform_of_a_shifted_gaussian_shifts(shift in -2.0f64..2.0) {
        let grid = GridSpec::spanning(-20.0, 20.0, 4001).unwrap();
        let g = ProfileGrid::from_fn(grid, |s| (-(s * s)).exp());
        let gs = ProfileGrid::from_fn(grid, |s| (-((s - shift) * (s - shift))).exp());
        let (h, hs) = (hilbert_transform(&g).unwrap(), hilbert_transform(&gs).unwrap());
        for s in [-1.0, 0.0, 0.7] {
            let a = h.interpolate(s).unwrap();
            let b = hs.interpolate(s + shift).unwrap();
            prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
        }
    }
}
