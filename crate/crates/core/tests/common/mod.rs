#![allow(dead_code)]

use gbcurv::double_form::{basis, DoubleForm, MultiIndex};
use gbcurv::rng::SeededRng;
use gbcurv::{Rational, Scalar};

pub type Q = Rational;

pub fn q(v: i64) -> Q {
    Q::from_i64(v)
}

/// Random form with small integer coefficients, identical in both scalar modes.
pub fn random_form<S: Scalar>(n: usize, p: usize, qd: usize, seed: u64) -> DoubleForm<S> {
    let mut rng = SeededRng::new(seed);
    let entries: Vec<_> = basis(n, p)
        .into_iter()
        .flat_map(|i| basis(n, qd).into_iter().map(move |j| (i, j)))
        .map(|(i, j)| (i, j, S::from_i64(rng.int_in(-5, 5))))
        .collect();
    DoubleForm::from_entries(n, p, qd, entries).unwrap()
}

/// Sign of the permutation taking `seq` to sorted order, 0 on repeats.
pub fn levi_civita(seq: &[usize]) -> i64 {
    let mut sign = 1;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            if seq[a] == seq[b] {
                return 0;
            }
            if seq[a] > seq[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// All ordered tuples of `len` axes out of `n` (with repeats).
pub fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// All permutations of `0..m` with their signs.
pub fn permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    tuples(m, m)
        .into_iter()
        .filter_map(|t| {
            let s = levi_civita(&t);
            (s != 0).then_some((t, s))
        })
        .collect()
}

pub fn factorial(m: usize) -> i64 {
    (1..=m as i64).product()
}

pub fn idx(a: &[usize], n: usize) -> MultiIndex {
    MultiIndex::new(a, n).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
