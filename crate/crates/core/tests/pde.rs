use std::f64::consts::PI;

use dqg::pde::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn trig(grid: &ManifoldGrid, a: &[f64; 4]) -> GridFunction {
    GridFunction::from_fn(grid, |x| a[0] * x[0].cos() + a[1] * (2.0 * x[0]).sin() + a[2] * (3.0 * x[0] + 0.4).cos() + a[3]).unwrap()
}

fn c1_norm(f: &GridFunction) -> f64 {
    let g = f.gradient();
    f.sup_norm() + g.iter().fold(0.0f64, |m, p| m.max(p[0].abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mild_solution_depends_lipschitz_on_terminal_data(
        a in prop::array::uniform4(-1.0f64..1.0), b in prop::array::uniform4(-1.0f64..1.0),
    ) {
        let grid = ManifoldGrid::circle(64, 0.5).unwrap();
        let h = field(|x: [f64; 2], p: [f64; 2]| x[0].cos() + 0.8 * p[0].abs() - 0.3 * p[0], 1.1);
        let (y1, y2) = (trig(&grid, &a), trig(&grid, &b));
        let cfg = MildConfig::default();
        let s1 = mild_solve(&grid, &y1, &h, 1.0, &cfg).unwrap();
        let s2 = mild_solve(&grid, &y2, &h, 1.0, &cfg).unwrap();
        let diff = y1.values().iter().zip(y2.values()).map(|(p, q)| p - q).collect::<Vec<_>>();
        let d = GridFunction::new(&grid, diff).unwrap();
        let data = c1_norm(&d);
        prop_assume!(data > 1e-8);
        for (f1, f2) in s1.slices().iter().zip(s2.slices()) {
            let k = f1.max_abs_diff(f2).unwrap() / data;
            prop_assert!(k <= 3.0, "K = {k}");
        }
    }
}

#[test]
fn declared_lipschitz_bounds_sampled_ratios() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for grid in [ManifoldGrid::circle(32, 0.5).unwrap(), ManifoldGrid::torus(16, 0.5).unwrap(), ManifoldGrid::sphere(12, 2.0).unwrap()] {
        let sphere = matches!(grid.manifold(), Manifold::Sphere2 { .. });
        // |<b, p>| with b = (1, 0.5) in coordinates; on the sphere b = (sin(phi), 0) has unit speed.
        let h = field(
            move |x: [f64; 2], p: [f64; 2]| {
                if sphere {
                    1.5 * (x[1].sin() * p[0]).abs()
                } else {
                    1.5 * (p[0] + 0.5 * p[1]).abs()
                }
            },
            1.5 * 1.25f64.sqrt(),
        );
        let seen = sampled_lipschitz(&grid, &h, 4000, 2.0, &mut rng);
        assert!(seen <= h.lipschitz() * (1.0 + 1e-12), "{seen} > {}", h.lipschitz());
        assert!(seen > 0.5 * h.lipschitz());
    }
}

#[test]
fn picard_residuals_decay_geometrically() {
    let grid = ManifoldGrid::torus(24, 0.5).unwrap();
    let terminal = GridFunction::from_fn(&grid, |x| (x[0] - x[1]).sin()).unwrap();
    let h = field(|x: [f64; 2], p: [f64; 2]| x[1].cos() + (p[0] - p[1]).abs(), 2f64.sqrt());
    let cfg = MildConfig { window: 1.0, ..MildConfig::default() };
    let v = mild_solve(&grid, &terminal, &h, 1.0, &cfg).unwrap();
    let r = v.residuals();
    assert!(*r.last().unwrap() < cfg.tolerance);
    for k in 0..r.len().saturating_sub(4) {
        if r[k] > 1e-13 {
            assert!(r[k + 4] <= 0.5 * r[k], "{:?}", &r[k..k + 5]);
        }
    }
}

#[test]
fn mild_and_fd_agree_on_torus_and_sphere() {
    let torus = ManifoldGrid::torus(32, 0.5).unwrap();
    let sphere = ManifoldGrid::sphere(16, 2.0).unwrap();
    let ht = field(|x: [f64; 2], p: [f64; 2]| 0.5 * x[0].sin() + 0.4 * (p[0] + p[1]).abs(), 0.4 * 2f64.sqrt());
    let hs = field(|x: [f64; 2], p: [f64; 2]| x[0].cos() + 0.3 * (x[1].sin() * p[0]).abs(), 0.3);
    let cases: [(&ManifoldGrid, &dyn HamiltonianField, GridFunction); 2] = [
        (&torus, &ht, GridFunction::from_fn(&torus, |x| (x[0] + 2.0 * x[1]).cos()).unwrap()),
        (&sphere, &hs, GridFunction::from_fn(&sphere, |x| x[0].sin() * x[1].cos() + 0.5 * x[0].cos()).unwrap()),
    ];
    for (grid, h, y) in cases {
        let mild = mild_solve(grid, &y, h, 0.5, &MildConfig { dt: 1e-3, ..MildConfig::default() }).unwrap();
        let fd = fd_solve(grid, &y, h, 0.5, &FdConfig::default()).unwrap();
        let err = mild.initial().max_abs_diff(fd.initial()).unwrap();
        assert!(err <= 1e-2, "{:?}: {err}", grid.manifold());
    }
}

#[test]
fn circle_terminal_slice_and_times() {
    let grid = ManifoldGrid::circle(16, 1.0).unwrap();
    let y = GridFunction::from_fn(&grid, |x| (x[0] - PI).abs()).unwrap();
    let v = mild_solve(&grid, &y, &field(|_: [f64; 2], _: [f64; 2]| 0.0, 0.0), 0.3, &MildConfig::default()).unwrap();
    assert_eq!(v.terminal().values(), y.values());
    assert_eq!(v.times().first(), Some(&0.0));
    assert!((v.horizon() - 0.3).abs() < 1e-15);
}
