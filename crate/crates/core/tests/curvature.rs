//! Curvature invariants against closed forms and direct-summation oracles.

mod common;

use common::*;
use gbcurv::curvature::*;
use gbcurv::double_form::{basis, DoubleForm};
use gbcurv::models::{
    constant_curvature, default_terms, hypersurface_model, product, random_bianchi, random_einstein,
    random_symmetric, supported_on_three_axes,
};
use gbcurv::rng::SeededRng;
use gbcurv::Scalar;
use proptest::prelude::*;

fn sphere(n: usize) -> CurvatureTensor<Q> {
    constant_curvature(n, &q(1)).unwrap()
}

/// `Ric(a, b) = Σ_i R(e_i, e_a; e_i, e_b)`.
fn ricci_oracle<S: Scalar>(r: &CurvatureTensor<S>) -> Vec<Vec<S>> {
    let n = r.n();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).fold(S::zero(), |acc, i| acc + r.form().eval_axes(&[i, a], &[i, b]).unwrap()))
                .collect()
        })
        .collect()
}

fn matrix_of<S: Scalar>(a: &DoubleForm<S>) -> Vec<Vec<S>> {
    let n = a.n();
    (0..n).map(|i| (0..n).map(|j| a.eval_axes(&[i], &[j]).unwrap()).collect()).collect()
}

/// `e_k` from power sums by Newton's identities.
fn newton_elementary(kappa: &[Q]) -> Vec<Q> {
    let n = kappa.len();
    let power: Vec<Q> = (0..=n)
        .map(|j| kappa.iter().fold(q(0), |acc, x| acc + gbcurv::scalar::powi(x, j)))
        .collect();
    let mut e = vec![q(1)];
    for k in 1..=n {
        let mut acc = q(0);
        for i in 1..=k {
            let term = e[k - i].clone() * power[i].clone();
            acc = if i % 2 == 1 { acc + term } else { acc - term };
        }
        e.push(acc / q(k as i64));
    }
    e
}

fn dyadic_kappa(n: usize, rng: &mut SeededRng) -> Vec<Q> {
    (0..n).map(|_| Q::from_ratio(rng.int_in(-24, 24), 8)).collect()
}

#[test]
fn thorpe_oracle_exhaustive_n4() {
    let n = 4;
    for seed in 0..3 {
        let r = random_bianchi::<Q>(n, seed, default_terms(n)).unwrap();
        for p in 1..=2 {
            let rp = r.form().pow(p);
            for i in basis(n, 2 * p) {
                for j in basis(n, 2 * p) {
                    let want = rp.get(i, j);
                    assert_eq!(thorpe_oracle(&r, p, &i.axes(), &j.axes()).unwrap(), want);
                    assert_eq!(thorpe_sum(&r, p, &i.axes(), &j.axes()).unwrap(), want * gbcurv::scalar::powi(&q(4), p));
                }
            }
        }
        // unordered and repeated arguments follow the alternating extension
        for u in tuples(n, 2) {
            for v in tuples(n, 2) {
                assert_eq!(thorpe_oracle(&r, 1, &u, &v).unwrap(), r.form().eval_axes(&u, &v).unwrap());
            }
        }
        let rp = r.form().pow(2);
        for (u, v) in [([1, 0, 2, 3], [0, 1, 2, 3]), ([3, 2, 1, 0], [2, 3, 0, 1]), ([0, 0, 1, 2], [0, 1, 2, 3])] {
            assert_eq!(thorpe_oracle(&r, 2, &u, &v).unwrap(), rp.eval_axes(&u, &v).unwrap());
        }
    }
    let r = sphere(4);
    assert!(thorpe_oracle(&r, 3, &[0; 6], &[0; 6]).is_err());
    assert!(thorpe_oracle(&r, 0, &[], &[]).is_err());
}

#[test]
fn constant_curvature_closed_forms() {
    for n in 2..=8 {
        for lambda in -2..=2 {
            let r = constant_curvature(n, &q(lambda)).unwrap();
            let rf = r.convert::<f64>();
            for k in 0..=n / 2 {
                let want = gbcurv::scalar::powi(&Q::from_ratio(lambda, 2), k) * q(factorial(n)) / q(factorial(n - 2 * k));
                assert_eq!(gauss_bonnet_even(&r, k).unwrap(), want, "n = {n}, λ = {lambda}, k = {k}");
                let got = gauss_bonnet_even(&rf, k).unwrap();
                assert!((got - want.to_f64()).abs() <= 1e-12 * want.to_f64().abs(), "{got}");
            }
        }
    }
}

#[test]
fn known_values() {
    let g5 = DoubleForm::<Q>::metric(5).unwrap();
    assert_eq!(einstein_lovelock(&sphere(5), 1).unwrap(), g5.scale(&q(6)));
    let r6 = sphere(6);
    assert_eq!(gauss_bonnet_even(&r6, 1).unwrap(), q(15));
    assert_eq!(gauss_bonnet_even(&r6, 2).unwrap(), q(90));
    // S² × S²: Euler characteristic 4 = h₄ vol / (8π²) with vol = (4π)²
    let s2 = sphere(2);
    let r = product(&s2, &s2).unwrap();
    assert_eq!(gauss_bonnet_even(&r, 2).unwrap(), q(2));
    assert_eq!(gauss_bonnet_even(&r, 1).unwrap(), q(2));
}

#[test]
fn h2_is_half_contracted_square() {
    for seed in 0..20 {
        let n = 3 + (seed as usize % 4);
        let r = random_bianchi::<Q>(n, seed, 4).unwrap();
        assert_eq!(gauss_bonnet_even(&r, 1).unwrap(), r.form().contract_iter(2).unwrap().value().unwrap() / q(2));
    }
}

#[test]
fn einstein_tensor_reduction() {
    let mut count = 0;
    for n in [4, 5, 6] {
        for seed in 0..34 {
            let r = random_bianchi::<f64>(n, 1000 * n as u64 + seed, default_terms(n)).unwrap();
            let t2 = matrix_of(&einstein_lovelock(&r, 1).unwrap());
            let ric = ricci_oracle(&r);
            let scal: f64 = (0..n).map(|a| ric[a][a]).sum();
            let scale = ric.iter().flatten().fold(scal.abs(), |m, x| m.max(x.abs()));
            for a in 0..n {
                for b in 0..n {
                    let want = if a == b { 0.5 * scal } else { 0.0 } - ric[a][b];
                    assert!((t2[a][b] - want).abs() <= 1e-12 * scale, "n = {n} seed = {seed}");
                }
            }
            count += 1;
        }
    }
    assert!(count >= 100);
}

#[test]
fn einstein_tensor_reduction_exact() {
    for n in [4, 5] {
        let r = random_bianchi::<Q>(n, 3, 6).unwrap();
        let g = DoubleForm::<Q>::metric(n).unwrap();
        let want = g.scale(&(r.scalar_curvature() / q(2))).try_sub(&r.ricci()).unwrap();
        assert_eq!(einstein_lovelock(&r, 1).unwrap(), want);
        assert_eq!(matrix_of(&r.ricci()), ricci_oracle(&r));
    }
}

#[test]
fn hypersurface_mean_curvatures() {
    let mut rng = SeededRng::new(42);
    for trial in 0..100 {
        let n = 2 + trial % 7;
        let kappa = dyadic_kappa(n, &mut rng);
        let e = newton_elementary(&kappa);
        assert_eq!(elementary_symmetric(&kappa), e);
        let kf: Vec<f64> = kappa.iter().map(Scalar::to_f64).collect();
        let b = ShapeOperatorData::from_kappa(&kf).unwrap();
        let scale = kf.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for k in 0..=n {
            let s = mean_curvature_s(&b, k, n).unwrap();
            // cancellation in e_k is bounded by the size of the monomials
            let tol = 1e-12 * (scale.powi(k as i32) * binom(n, k)).max(e[k].to_f64().abs());
            assert!((s - e[k].to_f64()).abs() <= tol, "n = {n} k = {k}: {s} vs {}", e[k]);
        }
        for p in 1..=n / 2 {
            let (s, h) = even_intrinsic_identity(&b, p, n).unwrap();
            assert!((s - h).abs() <= 1e-12 * s.abs().max(h.abs()).max(scale.powi(2 * p as i32)));
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    gbcurv::double_form::binom(n, k) as f64
}

#[test]
fn hypersurface_identities_exact() {
    let mut rng = SeededRng::new(7);
    for n in 2..=6 {
        let kappa = dyadic_kappa(n, &mut rng);
        let e = newton_elementary(&kappa);
        let b = ShapeOperatorData::from_kappa(&kappa).unwrap();
        for k in 0..=n {
            assert_eq!(mean_curvature_s(&b, k, n).unwrap(), e[k]);
        }
        for p in 1..=n / 2 {
            let (s, h) = even_intrinsic_identity(&b, p, n).unwrap();
            assert_eq!(s, h);
        }
    }
}

fn inner_11<S: Scalar>(a: &DoubleForm<S>, b: &DoubleForm<S>) -> S {
    let (ma, mb) = (matrix_of(a), matrix_of(b));
    ma.iter().flatten().zip(mb.iter().flatten()).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[test]
fn odd_curvature_pairing() {
    let mut count = 0;
    for (n, k) in [(5usize, 1usize), (6, 2)] {
        for seed in 0..50u64 {
            let r = random_bianchi::<f64>(n, seed, default_terms(n)).unwrap();
            let mut rng = SeededRng::new(seed ^ 0xb5);
            let b = ShapeOperatorData::new(random_symmetric::<f64>(n, &mut rng).unwrap()).unwrap();
            let h = gauss_bonnet_odd(&r, &b, k, n).unwrap();
            let pairing = inner_11(&einstein_lovelock(&r, k).unwrap(), b.b());
            assert!((h - pairing).abs() <= 1e-12 * h.abs().max(pairing.abs()), "{h} vs {pairing}");
            count += 1;
        }
    }
    assert!(count >= 100);
    let r = random_bianchi::<Q>(5, 1, 4).unwrap();
    let mut rng = SeededRng::new(2);
    let b = ShapeOperatorData::new(random_symmetric::<Q>(5, &mut rng).unwrap()).unwrap();
    assert_eq!(gauss_bonnet_odd(&r, &b, 1, 5).unwrap(), inner_11(&einstein_lovelock(&r, 1).unwrap(), b.b()));
    assert_eq!(gauss_bonnet_odd(&r, &b, 0, 5).unwrap(), (0..5).fold(q(0), |a, i| a + b.b().eval_axes(&[i], &[i]).unwrap()));
}

#[test]
fn minimality_defect_is_proportional_to_odd_curvature() {
    let mut rng = SeededRng::new(99);
    for n in 3..=7 {
        for lambda in [-1, 0, 2] {
            let kappa = dyadic_kappa(n, &mut rng);
            let (b, r) = hypersurface_model(&kappa, &q(lambda)).unwrap();
            for k in 0..=(n - 1) / 2 {
                let h = gauss_bonnet_odd(&r, &b, k, n).unwrap();
                let factor = gbcurv::scalar::powi(&q(2), k) * q(factorial(n - 2 * k - 1)) / q(factorial(k));
                assert_eq!(minimality_defect(&kappa, &q(lambda), k).unwrap(), factor * h);
            }
        }
    }
}

#[test]
fn product_with_three_dim_support_squares_to_zero() {
    let mut accepted = 0;
    for seed in 0..200 {
        let Ok(r) = supported_on_three_axes::<Q>(5, seed) else { continue };
        assert!(!r.form().is_zero());
        assert!(r.form().pow(2).is_zero());
        accepted += 1;
        if accepted == 100 {
            break;
        }
    }
    assert_eq!(accepted, 100);
}

#[test]
fn berger_positivity() {
    let mut einstein = 0;
    for seed in 0..1000 {
        let r = random_einstein::<f64>(4, seed).unwrap();
        let check = h4k_positivity_check(&r, 1).unwrap();
        einstein += check.is_1k_einstein as usize;
        assert!(check.holds(1e-10), "seed {seed}: h4 = {}", check.h4k);
        assert!(check.h4k >= -1e-10);
    }
    assert_eq!(einstein, 1000);
    let r = random_bianchi::<Q>(4, 5, 10).unwrap();
    assert!(!h4k_positivity_check(&r, 1).unwrap().is_1k_einstein);
}

#[test]
fn random_einstein_is_exactly_einstein_in_rational_mode() {
    for seed in 0..5 {
        let r = random_einstein::<Q>(5, seed).unwrap();
        let (lambda, res) = einstein_pq_defect(&r, 1, 1).unwrap();
        assert_eq!(res, 0.0);
        assert_eq!(lambda, r.scalar_curvature() / q(5));
        assert!(CurvatureTensor::new(r.into_form()).is_ok());
    }
}

#[test]
fn pq_einstein_examples() {
    for n in 4..=6 {
        let r = sphere(n);
        for qd in 1..=n / 2 {
            for p in 1..2 * qd {
                let (_, res) = einstein_pq_defect(&r, p, qd).unwrap();
                assert_eq!(res, 0.0);
            }
        }
    }
    // S² × S² is Einstein but a generic product is not
    let s2 = sphere(2);
    assert_eq!(einstein_pq_defect(&product(&s2, &s2).unwrap(), 1, 1).unwrap().1, 0.0);
    let mixed = product(&sphere(2), &constant_curvature(2, &q(2)).unwrap()).unwrap();
    assert!(einstein_pq_defect(&mixed, 1, 1).unwrap().1 > 0.0);
    // in three dimensions (1,1)-Einstein means constant curvature
    let r3 = random_bianchi::<Q>(3, 8, 6).unwrap();
    assert!(einstein_pq_defect(&r3, 1, 1).unwrap().1 > 0.0);
}

#[test]
fn weitzenbock_on_constant_curvature() {
    for n in 2..=6 {
        for p in 2..=n {
            let w = weitzenbock_form(&sphere(n), p).unwrap();
            let op = as_operator(&w).unwrap();
            let want = q((p * (n - p)) as i64);
            for (a, row) in op.iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    assert_eq!(*x, if a == b { want.clone() } else { q(0) }, "n = {n} p = {p}");
                }
            }
        }
    }
}

#[test]
fn sectional_curvature_on_rotated_planes() {
    let r = random_bianchi::<f64>(4, 3, 8).unwrap();
    let (c, s) = (0.6, 0.8);
    let u = vec![c, s, 0.0, 0.0];
    let v = vec![0.0, 0.0, -s, c];
    let k = sectional_2p(&r, 1, &[u.clone(), v.clone()]).unwrap();
    let mut direct = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    direct += r.form().eval_axes(&[a, b], &[cc, d]).unwrap() * u[a] * v[b] * u[cc] * v[d];
                }
            }
        }
    }
    assert!((k - direct).abs() < 1e-12 * direct.abs().max(1.0));
    let frame: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| (i == j) as u8 as f64).collect()).collect();
    let k4 = sectional_2p(&r, 2, &frame).unwrap();
    assert!((k4 - gauss_bonnet_even(&r, 2).unwrap() * 4.0 / 24.0).abs() < 1e-10);
}

#[test]
fn lagrangian_matches_weighted_sum() {
    let r = random_bianchi::<Q>(5, 4, 6).unwrap();
    let c = LovelockCoefficients(vec![q(3), Q::from_ratio(1, 2), q(-2)]);
    let want = q(3) + Q::from_ratio(1, 2) * gauss_bonnet_even(&r, 1).unwrap() - q(2) * gauss_bonnet_even(&r, 2).unwrap();
    assert_eq!(lovelock_lagrangian(&r, &c).unwrap(), want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_bianchi_tensors_validate(n in 2usize..=6, seed in any::<u64>(), terms in 1usize..8) {
        let r = random_bianchi::<Q>(n, seed, terms).unwrap();
        prop_assert_eq!(r.form().bianchi_defect_squared().unwrap(), q(0));
        prop_assert!(CurvatureTensor::new(r.form().clone()).is_ok());
        prop_assert_eq!(random_bianchi::<Q>(n, seed, terms).unwrap(), r);
    }

    #[test]
    fn float_and_exact_builds_agree(n in 3usize..=5, seed in any::<u64>()) {
        let rq = random_bianchi::<Q>(n, seed, default_terms(n)).unwrap();
        let rf = random_bianchi::<f64>(n, seed, default_terms(n)).unwrap();
        prop_assert_eq!(rq.convert::<f64>(), rf.clone());
        let hq = gauss_bonnet_even(&rq, 1).unwrap().to_f64();
        let hf = gauss_bonnet_even(&rf, 1).unwrap();
        prop_assert!(rel_close(hq, hf, 1e-12));
    }

    #[test]
    fn divergence_free_algebraic_trace(n in 4usize..=6, seed in any::<u64>()) {
        // c T₂ₖ = (n − 2k) h₂ₖ
        let r = random_bianchi::<Q>(n, seed, 5).unwrap();
        for k in 1..=n / 2 {
            let t = einstein_lovelock(&r, k).unwrap();
            let h = gauss_bonnet_even(&r, k).unwrap();
            prop_assert_eq!(t.contract().unwrap().value().unwrap(), q((n - 2 * k) as i64) * h);
        }
    }
}
