//! Lattice geometry against closed forms for conformally flat metrics and flat
//! tori, convergence orders, and frame independence.

use std::f64::consts::{FRAC_PI_2, TAU};

use gbcurv::discrete::*;

/// `u = 0.2 cos(θ₀ + 2θ₁) + 0.15 sin(θ₂)` in three dimensions.
fn conformal_terms() -> Vec<TrigTerm> {
    vec![
        TrigTerm { amp: 0.2, freq: vec![1, 2, 0], phase: 0.0 },
        TrigTerm { amp: 0.15, freq: vec![0, 0, 1], phase: -FRAC_PI_2 },
    ]
}

struct Exact {
    u: f64,
    du: Vec<f64>,
    lap: f64,
}

fn exact_u(terms: &[TrigTerm], theta: &[f64]) -> Exact {
    let n = theta.len();
    let mut e = Exact { u: 0.0, du: vec![0.0; n], lap: 0.0 };
    for t in terms {
        let arg: f64 = t.freq.iter().zip(theta).map(|(&f, x)| f as f64 * x).sum::<f64>() + t.phase;
        let k2: f64 = t.freq.iter().map(|&f| (f * f) as f64).sum();
        e.u += t.amp * arg.cos();
        for a in 0..n {
            e.du[a] -= t.amp * t.freq[a] as f64 * arg.sin();
        }
        e.lap -= t.amp * k2 * arg.cos();
    }
    e
}

/// `scal(e^{2u}δ) = −e^{−2u}(2(n−1)Δu + (n−1)(n−2)|∇u|²)`.
fn exact_scal(e: &Exact, n: usize) -> f64 {
    let nf = n as f64;
    let grad2: f64 = e.du.iter().map(|v| v * v).sum();
    -(-2.0 * e.u).exp() * (2.0 * (nf - 1.0) * e.lap + (nf - 1.0) * (nf - 2.0) * grad2)
}

fn conformal(size: usize) -> MetricField {
    let grid = Grid::uniform(3, size).unwrap();
    let u = ScalarField::trig(&grid, &conformal_terms()).unwrap();
    MetricField::conformal(&grid, &u).unwrap()
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[test]
fn conformal_christoffel_symbols_converge_at_fourth_order() {
    let errors: Vec<f64> = [32, 64]
        .into_iter()
        .map(|size| {
            let gf = conformal(size);
            let grid = gf.grid();
            let mut worst = 0.0f64;
            for x in [[0, 0, 0], [3, 5, 7], [size / 2, 1, size - 1]] {
                let gamma = christoffel(&gf, &x).unwrap();
                let e = exact_u(&conformal_terms(), &grid.phases(grid.index(&x).unwrap()));
                for k in 0..3 {
                    for i in 0..3 {
                        for j in 0..3 {
                            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                            let want = d(k, i) * e.du[j] + d(k, j) * e.du[i] - d(i, j) * e.du[k];
                            worst = worst.max((gamma.get(k, i, j) - want).abs());
                        }
                    }
                }
            }
            worst
        })
        .collect();
    assert!(errors[1] < 1e-4, "{errors:?}");
    assert!(order(errors[0], errors[1]) > 3.5, "{errors:?}");
}

#[test]
fn conformal_scalar_curvature_pointwise_and_integrated() {
    let mut point_errors = vec![];
    let mut total_errors = vec![];
    for size in [32, 64] {
        let gf = conformal(size);
        let grid = gf.grid().clone();
        let h2 = Connection::new(&gf).gauss_bonnet_field(1).unwrap();
        let mut worst = 0.0f64;
        let mut exact_total = 0.0;
        for p in 0..grid.len() {
            let e = exact_u(&conformal_terms(), &grid.phases(p));
            let want = 0.5 * exact_scal(&e, 3);
            worst = worst.max((h2.at(p) - want).abs());
            exact_total += want * (3.0 * e.u).exp() * grid.cell_volume();
        }
        point_errors.push(worst);
        let total = total_gauss_bonnet(&gf, 1).unwrap();
        assert!(total > 0.0);
        total_errors.push((total - exact_total).abs() / exact_total.abs());
    }
    assert!(order(point_errors[0], point_errors[1]) > 3.5, "{point_errors:?}");
    assert!(order(total_errors[0], total_errors[1]) > 3.5, "{total_errors:?}");
    assert!(total_errors[1] < 1e-4, "{total_errors:?}");
}

#[test]
fn integration_of_simple_fields() {
    let grid = Grid::uniform(2, 16).unwrap();
    let flat = MetricField::flat(&grid).unwrap();
    let wave = ScalarField::trig(&grid, &[TrigTerm { amp: 1.0, freq: vec![1, 0], phase: -FRAC_PI_2 }]).unwrap();
    assert!(integrate(&flat, &wave).unwrap().abs() < 1e-13);
    let one = ScalarField::constant(&grid, 1.0);
    assert!((integrate(&flat, &one).unwrap() - TAU * TAU).abs() < 1e-12);

    let grid = Grid::uniform(3, 8).unwrap();
    let scaled = MetricField::constant(&grid, 4.0).unwrap();
    let want = 4f64.powf(1.5) * TAU.powi(3);
    assert!((integrate(&scaled, &ScalarField::constant(&grid, 1.0)).unwrap() - want).abs() < 1e-10 * want);
    assert_eq!(total_gauss_bonnet(&scaled, 0).unwrap(), integrate(&scaled, &ScalarField::constant(&grid, 1.0)).unwrap());
    assert!(total_gauss_bonnet(&scaled, 1).unwrap().abs() < 1e-12);
}

#[test]
fn flat_hessian_and_laplacian_of_a_plane_wave() {
    // f = cos(θ₀ + 2θ₁): Hess f = −f · [[1, 2], [2, 4]], ℓ₀ f = 5f.
    let mut hess_errors = vec![];
    let mut lap_errors = vec![];
    for size in [16, 32] {
        let grid = Grid::uniform(2, size).unwrap();
        let gf = MetricField::flat(&grid).unwrap();
        let f = ScalarField::trig(&grid, &[TrigTerm { amp: 1.0, freq: vec![1, 2], phase: 0.3 }]).unwrap();
        let l0 = Connection::new(&gf).ell_2k_field(&f, 0).unwrap();
        let mut hw = 0.0f64;
        let mut lw = 0.0f64;
        for x in [[0, 0], [1, 3], [size - 1, size / 2]] {
            let p = grid.index(&x).unwrap();
            let hess = hessian(&gf, &f, &x).unwrap();
            let want = [-1.0, -2.0, -2.0, -4.0].map(|c| c * f.at(p));
            hw = hess.iter().zip(want).fold(hw, |m, (a, b)| m.max((a - b).abs()));
            lw = lw.max((l0.at(p) - 5.0 * f.at(p)).abs());
            assert!((ell_2k(&gf, &f, 0, &x).unwrap() - l0.at(p)).abs() < 1e-12);
        }
        hess_errors.push(hw);
        lap_errors.push(lw);
    }
    assert!(order(hess_errors[0], hess_errors[1]) > 3.5, "{hess_errors:?}");
    assert!(order(lap_errors[0], lap_errors[1]) > 3.5, "{lap_errors:?}");
}

/// The lattice connection is built from the same difference operator that
/// differentiates `g`, so `∇g = 0` holds up to rounding.
#[test]
fn metric_is_parallel() {
    let size = 12;
    let grid = Grid::uniform(3, size).unwrap();
    let gf = MetricField::perturbed_flat(&grid, 3, 0.1).unwrap();
    let g = TensorField2::new(grid.clone(), gf.values().to_vec()).unwrap();
    for x in [[0, 0, 0], [2, 7, 5], [size - 1, 1, size / 3]] {
        assert!(divergence(&gf, &g, &x).unwrap().iter().all(|v| v.abs() < 1e-14));
    }
}

/// Swapping coordinate axes reorders the Cholesky frame; invariants must
/// follow the coordinates, not the frame.
#[test]
fn invariants_do_not_depend_on_the_frame() {
    let n = 4;
    let size = 8;
    let perm = [2, 0, 3, 1];
    let terms = random_component_terms(n, 9, 0.15);
    let permuted: Vec<ComponentTerm> = terms
        .iter()
        .map(|t| {
            let mut freq = vec![0; n];
            for a in 0..n {
                freq[perm[a]] = t.freq[a];
            }
            ComponentTerm { i: perm[t.i], j: perm[t.j], amp: t.amp, freq, phase: t.phase }
        })
        .collect();
    let grid = Grid::uniform(n, size).unwrap();
    let a = MetricField::trig(&grid, &terms).unwrap();
    let b = MetricField::trig(&grid, &permuted).unwrap();
    let (ca, cb) = (Connection::new(&a), Connection::new(&b));
    let to_b = |p: usize| {
        let x = grid.coords(p);
        let mut y = vec![0; n];
        for ax in 0..n {
            y[perm[ax]] = x[ax];
        }
        grid.index(&y).unwrap()
    };
    for k in 1..=2 {
        let (ha, hb) = (ca.gauss_bonnet_field(k).unwrap(), cb.gauss_bonnet_field(k).unwrap());
        let scale = ha.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for p in 0..grid.len() {
            assert!((ha.at(p) - hb.at(to_b(p))).abs() <= 1e-10 * scale, "k={k} p={p}");
        }
    }
    let (ta, tb) = (ca.einstein_lovelock_field(1).unwrap(), cb.einstein_lovelock_field(1).unwrap());
    for p in (0..grid.len()).step_by(37) {
        let (sa, sb) = (ta.at(p), tb.at(to_b(p)));
        for i in 0..n {
            for j in 0..n {
                assert!((sa[i * n + j] - sb[perm[i] * n + perm[j]]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn volume_gradient_is_half_the_trace() {
    let grid = Grid::uniform(3, 10).unwrap();
    let gf = MetricField::perturbed_flat(&grid, 4, 0.1).unwrap();
    let h = TensorField2::trig(&grid, &random_component_terms(3, 44, 1.0)).unwrap();
    let v = variational_check(&gf, &h, 0, &[1e-2, 5e-3, 2.5e-3]).unwrap();
    let mut terms = vec![];
    for p in 0..grid.len() {
        let (ginv, hp) = (gf.inverse_at(p), h.at(p));
        let tr: f64 = (0..9).map(|ij| ginv[ij] * hp[ij]).sum();
        terms.push(0.5 * tr * gf.sqrt_det(p) * grid.cell_volume());
    }
    let want = compensated_sum(terms);
    assert!((v.gradient - want).abs() <= 1e-12 * want.abs(), "{} vs {want}", v.gradient);
    assert!(v.extrapolated_defect < 1e-9, "{v:?}");
    // Without extrapolation the quotient error is O(ε²).
    let o = v.eps_order.unwrap();
    assert!((o - 2.0).abs() < 0.1, "{o}");
}

#[test]
fn pointwise_and_field_operators_agree() {
    let grid = Grid::uniform(3, 8).unwrap();
    let gf = MetricField::perturbed_flat(&grid, 5, 0.1).unwrap();
    let conn = Connection::new(&gf);
    let f = ScalarField::trig(&grid, &[TrigTerm { amp: 0.7, freq: vec![1, -1, 1], phase: 0.2 }]).unwrap();
    let l2 = conn.ell_2k_field(&f, 1).unwrap();
    let h2 = conn.gauss_bonnet_field(1).unwrap();
    for x in [[0, 0, 0], [1, 4, 6], [7, 7, 2]] {
        let p = grid.index(&x).unwrap();
        assert!((ell_2k(&gf, &f, 1, &x).unwrap() - l2.at(p)).abs() < 1e-12);
        let r = riemann_at(&gf, &x).unwrap();
        assert!((gbcurv::curvature::gauss_bonnet_even(&r, 1).unwrap() - h2.at(p)).abs() < 1e-12);
        assert_eq!(riemann_at(&gf, &x).unwrap().form(), conn.riemann(p).unwrap().form());
    }
    // ℓ₂ₖ needs 2k < n.
    assert!(ell_2k(&gf, &f, 2, &[0, 0, 0]).is_err());
    let other = Grid::uniform(3, 9).unwrap();
    assert!(integrate(&gf, &ScalarField::constant(&other, 1.0)).is_err());
}

#[test]
fn lattice_riemann_tensor_satisfies_bianchi_to_fourth_order() {
    let errors: Vec<f64> = [8, 16]
        .into_iter()
        .map(|size| {
            let grid = Grid::uniform(3, size).unwrap();
            let gf = MetricField::perturbed_flat(&grid, 6, 0.1).unwrap();
            [[0, 0, 0], [1, 2, 3]]
                .iter()
                .map(|x| riemann_at(&gf, x).unwrap().form().bianchi_defect().unwrap())
                .fold(0.0, f64::max)
        })
        .collect();
    // The lowered tensor is assembled from its antisymmetric part, so only
    // the cyclic identity carries discretization error.
    assert!(errors[1] <= errors[0], "{errors:?}");
    assert!(errors[1] < 1e-3, "{errors:?}");
}

#[test]
fn einstein_tensor_divergence_refines_at_fourth_order() {
    let terms = random_component_terms(3, 2, 0.1);
    let study = lovelock_divergence_study(3, 1, &terms, &[12, 24]).unwrap();
    assert!(study.fitted_order > 3.5, "{study:?}");
    assert_eq!(study.pairwise_orders.len(), 1);
}

#[test]
fn metric_fixtures_from_json() {
    let json = r#"{"n": 2, "shape": [5, 6], "h": [0.5, 0.25], "kind": "trig",
        "terms": [{"i": 0, "j": 1, "amp": 0.1, "freq": [1, 1], "phase": 0.0}]}"#;
    let gf = MetricField::from_json(json).unwrap();
    assert_eq!(gf.grid().shape(), &[5, 6]);
    assert_eq!(gf.grid().spacing(), &[0.5, 0.25]);
    assert!((gf.at(0)[1] - 0.1).abs() < 1e-15);

    let explicit = r#"{"n": 2, "shape": [5, 5], "kind": "explicit", "values": [[1, 0, 0, 1]]}"#;
    assert!(MetricField::from_json(explicit).is_err());
    let singular = format!(
        r#"{{"n": 2, "shape": [5, 5], "kind": "explicit", "values": {}}}"#,
        serde_json::to_string(&vec![vec![1.0, 1.0, 1.0, 1.0]; 25]).unwrap()
    );
    assert!(MetricField::from_json(&singular).is_err());
}
