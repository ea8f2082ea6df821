use kgmp::asymptotics::{bubble, hcheck_potential, limit_profile, phase_ratio, BubbleSpec};
use kgmp::elliptic::{assemble, dirichlet_energy};
use kgmp::energy::energy;
use kgmp::gauge::{continuity_check, solve_gauge, truncation_sequence};
use kgmp::model::inner;
use kgmp::{build_grid, sphere_area, Field, Geometry, Params, RadialGrid};
use proptest::prelude::*;

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![
        (3usize..=8).prop_map(|n| Geometry::sphere(n).unwrap()),
        (3usize..=8, 0.5f64..3.0).prop_map(|(n, r)| Geometry::ball(n, r).unwrap()),
    ]
}

fn grid() -> impl Strategy<Value = RadialGrid> {
    (geometry(), 8usize..120, prop_oneof![Just(1.0), Just(1.5), Just(2.0)])
        .prop_map(|(g, n, gamma)| build_grid(g, n, gamma).unwrap())
}

/// Smooth random field: a short cosine series in `r / r_max`.
fn field_on(grid: &RadialGrid, coeffs: &[f64]) -> Field {
    let rmax = grid.geometry.r_max;
    Field::from_fn(grid, |r| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * std::f64::consts::PI * r / rmax).cos())
            .sum()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..6)
}

fn params(n: usize) -> impl Strategy<Value = Params> {
    (0.3f64..2.0, 0.3f64..2.0, 0.3f64..2.0).prop_flat_map(move |(m0, m1, q)| {
        (-0.95f64..0.95).prop_map(move |frac| {
            Params::new(n, 2.5f64.min(2.0 * n as f64 / (n as f64 - 2.0)), m0, m1, q, frac * m0).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_is_self_adjoint(g in grid(), a in coeffs(), b in coeffs(), pot in 0.0f64..5.0) {
        let op = assemble(&g, &Field::constant(&g, pot)).unwrap();
        let (mut u, mut v) = (field_on(&g, &a), field_on(&g, &b));
        if g.geometry.is_dirichlet() {
            let last = g.len() - 1;
            u[last] = 0.0;
            v[last] = 0.0;
        }
        let lhs = inner(&g, &op.apply(&u).unwrap(), &v);
        let rhs = inner(&g, &u, &op.apply(&v).unwrap());
        let scale = (inner(&g, &u, &u) * inner(&g, &v, &v)).sqrt();
        let stiff = op.conductance().iter().fold(0.0f64, |m, k| m.max(*k))
            / g.cell_weights.iter().fold(f64::INFINITY, |m, w| m.min(*w));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * (1.0 + stiff));
    }

    #[test]
    fn quadratic_form_splits(g in grid(), a in coeffs(), pot in 0.0f64..5.0) {
        let op = assemble(&g, &Field::constant(&g, pot)).unwrap();
        let mut u = field_on(&g, &a);
        if g.geometry.is_dirichlet() {
            let last = g.len() - 1;
            u[last] = 0.0;
        }
        let form = inner(&g, &op.apply(&u).unwrap(), &u);
        let split = dirichlet_energy(&g, &u).unwrap() + pot * inner(&g, &u, &u);
        prop_assert!((form - split).abs() <= 1e-12 * split.abs().max(1.0) * 1e2);
    }

    #[test]
    fn maximum_principle(g in grid(), a in coeffs(), pot in 0.01f64..5.0) {
        let op = assemble(&g, &Field::constant(&g, pot)).unwrap();
        let rhs = field_on(&g, &a).map(|x| x.abs());
        let x = op.solve(&rhs).unwrap();
        prop_assert!(x.min() >= -1e-12);
    }

    #[test]
    fn gauge_bounds_and_symmetry(
        g in grid(), a in coeffs(), m1 in 0.2f64..3.0, q in 0.2f64..3.0, amp in 0.0f64..50.0
    ) {
        let n = g.dim();
        let p = Params::new(n, 2.5, 1.0, m1, q, 0.0).unwrap();
        let u = field_on(&g, &a).scaled(amp);
        let v = solve_gauge(&g, &p, &u).unwrap().v;
        prop_assert!(v.min() >= -1e-10 && v.max() <= 1.0 / q + 1e-10, "{} {} {}", v.min(), v.max(), 1.0 / q);
        prop_assert!(v.map(|x| 1.0 / q - x).min() >= -1e-12);
        let w = solve_gauge(&g, &p, &u.scaled(-1.0)).unwrap().v;
        prop_assert_eq!(v, w);
    }

    #[test]
    fn gauge_of_constants(n in 3usize..8, c in -20.0f64..20.0, m1 in 0.2f64..3.0, q in 0.2f64..3.0) {
        let g = build_grid(Geometry::sphere(n).unwrap(), 40, 1.0).unwrap();
        let p = Params::new(n, 2.5, 1.0, m1, q, 0.0).unwrap();
        let v = solve_gauge(&g, &p, &Field::constant(&g, c)).unwrap().v;
        let exact = q * c * c / (m1 * m1 + q * q * c * c);
        prop_assert!(v.iter().all(|x| (x - exact).abs() <= 1e-12 * (1.0 + exact)));
    }

    #[test]
    fn truncation_deltas_settle(a in coeffs(), n in prop_oneof![Just(3usize), Just(5), Just(7)]) {
        let g = build_grid(Geometry::sphere(n).unwrap(), 60, 1.0).unwrap();
        let p = Params::new(n, 2.5, 1.0, 1.0, 1.0, 0.0).unwrap();
        let u = field_on(&g, &a);
        let top = u.max_abs();
        let lambdas: Vec<f64> = (0..8).map(|k| 0.05 * 2f64.powi(k)).collect();
        let steps = truncation_sequence(&g, &p, &u, &lambdas).unwrap();
        for w in steps.windows(2) {
            if w[0].lambda > top {
                prop_assert!(w[1].h1_delta_to_final <= w[0].h1_delta_to_final + 1e-12);
            }
        }
    }

    #[test]
    fn gauge_continuity(n in 3usize..8, a in coeffs(), b in coeffs(), m1 in 0.2f64..3.0, q in 0.2f64..3.0) {
        let g = build_grid(Geometry::sphere(n).unwrap(), 60, 1.5).unwrap();
        let p = Params::new(n, 2.5, 1.0, m1, q, 0.0).unwrap();
        let check = continuity_check(&g, &p, &field_on(&g, &a), &field_on(&g, &b)).unwrap();
        prop_assert!(check.holds(1e-8), "{:?}", check);
    }

    #[test]
    fn energy_breakdown_adds_up(a in coeffs(), p in params(3)) {
        let g = build_grid(Geometry::sphere(3).unwrap(), 50, 1.0).unwrap();
        let e = energy(&g, &p, &field_on(&g, &a)).unwrap();
        for x in [e.dirichlet, e.mass, e.nonlinear, e.gauge_coupling, e.total] {
            prop_assert!(x.is_finite());
        }
        let sum = e.dirichlet + e.mass - e.nonlinear - e.gauge_coupling;
        prop_assert!((e.total - sum).abs() <= 1e-12 * (e.dirichlet + e.mass + e.nonlinear + e.gauge_coupling.abs()).max(1.0));
    }

    #[test]
    fn bubble_rescaling_is_exact(n in 3usize..9, mu in 1e-4f64..1.0, x in 0.0f64..50.0) {
        let spec = BubbleSpec::new(mu, n).unwrap();
        let lhs = mu.powf(0.5 * (n as f64 - 2.0)) * spec.value(mu * x);
        let rhs = limit_profile(n, x);
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs);
    }

    #[test]
    fn hcheck_stays_in_range(g in grid(), a in coeffs(), k in 0.1f64..10.0) {
        let h = hcheck_potential(&g, &field_on(&g, &a), k).unwrap();
        prop_assert!(h.min() >= 0.0 && h.max() <= k);
    }

    #[test]
    fn grids_are_deterministic(geo in geometry(), n in 8usize..200, gamma in 1.0f64..3.0) {
        let a = build_grid(geo.clone(), n, gamma).unwrap();
        let b = build_grid(geo, n, gamma).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn phase_ratio_within_bounds(
        n in prop_oneof![Just(3usize), Just(5), Just(6)], logmu in -3.0f64..0.0, q in 0.3f64..3.0
    ) {
        let p = Params::new(n, 2.5, 1.0, 1.0, q, 0.0).unwrap();
        let r = phase_ratio(&p, 10f64.powf(logmu), 400).unwrap();
        prop_assert!(r.ratio >= 0.0 && r.ratio <= 1.0 / q + 1e-12);
    }
}

#[test]
fn sphere_area_recurrence() {
    for k in 3..=8 {
        let lhs = sphere_area(k).unwrap();
        let rhs = 2.0 * std::f64::consts::PI * sphere_area(k - 2).unwrap() / (k as f64 - 1.0);
        assert!((lhs - rhs).abs() <= 1e-14 * lhs);
    }
}

#[test]
fn bubble_decreases_outward() {
    let g = build_grid(Geometry::sphere(5).unwrap(), 200, 2.0).unwrap();
    let b = bubble(&g, &BubbleSpec::new(0.05, 5).unwrap());
    assert!(b.windows(2).all(|w| w[1] < w[0]));
}
