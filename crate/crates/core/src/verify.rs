//! Verification suites: algebraic identities of the double-form calculus and
//! lattice checks of the variational, divergence and Laplacian properties.
//! Each suite returns an [`InvariantReport`] whose defects carry their
//! tolerances; the suite passes iff every defect does.

use serde::{Deserialize, Serialize};

use crate::curvature::{
    einstein_lovelock, elementary_symmetric, even_intrinsic_identity, gauss_bonnet_even, gauss_bonnet_odd,
    h4k_positivity_check, mean_curvature_s, thorpe_oracle, ShapeOperatorData,
};
use crate::discrete::{
    integrate, lovelock_divergence_study, random_component_terms, variational_check, ComponentTerm, Connection,
    Grid, MetricField, MetricFieldSpec, MetricSource, ScalarField, TensorField2, TrigTerm,
};
use crate::double_form::{basis, DoubleForm};
use crate::error::{Error, Result};
use crate::models::{constant_curvature, default_terms, random_bianchi, random_einstein, random_symmetric, supported_on_three_axes};
use crate::report::{Defect, InvariantReport, ScalarMode};
use crate::rng::SeededRng;
use crate::scalar::{factorial, powi, Scalar};

/// Relative tolerance of float-mode algebraic identities.
pub const FLOAT_ALGEBRA_TOL: f64 = 1e-12;
/// Relative tolerance of the extrapolated variational defect.
pub const VARIATIONAL_TOL: f64 = 1e-4;
/// Tolerance of `|∫ℓ₂ₖ(f)μ| / ‖f‖₁` and of the relative self-adjointness defect.
pub const LAPLACIAN_TOL: f64 = 1e-8;
/// Minimum fitted convergence order for 4th-order stencils.
pub const MIN_ORDER: f64 = 3.5;
/// Largest admissible `max |div T₂ₖ|` on the finest grid.
pub const DIVERGENCE_TOL: f64 = 1e-5;
/// Lower bound for `h₄` of Einstein tensors in float mode.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Names accepted by [`Suite::from_name`].
pub const SUITE_NAMES: [&str; 4] = ["algebra", "variational", "laplacian", "lovelock-div"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Variational,
    Laplacian,
    LovelockDivergence,
}

impl Suite {
    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "variational" => Ok(Suite::Variational),
            "laplacian" => Ok(Suite::Laplacian),
            "lovelock-div" => Ok(Suite::LovelockDivergence),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite `{other}` (expected one of {})",
                SUITE_NAMES.join(", ")
            ))),
        }
    }
}

fn tolerance<S: Scalar>() -> f64 {
    if S::EXACT {
        0.0
    } else {
        FLOAT_ALGEBRA_TOL
    }
}

/// `|a − b|`, relative to `max(|a|, |b|)` in float mode.
fn scalar_defect<S: Scalar>(a: &S, b: &S) -> f64 {
    let d = (a.clone() - b.clone()).abs().to_f64();
    if d == 0.0 || S::EXACT {
        d
    } else {
        d / a.to_f64().abs().max(b.to_f64().abs())
    }
}

fn form_defect<S: Scalar>(a: &DoubleForm<S>, b: &DoubleForm<S>) -> Result<f64> {
    let d = a.try_sub(b)?.norm();
    Ok(if d == 0.0 || S::EXACT {
        d
    } else {
        d / a.norm().max(b.norm())
    })
}

struct Worst(f64);

impl Worst {
    fn add(&mut self, v: f64) {
        if v.is_nan() || v > self.0 {
            self.0 = v;
        }
    }
}

/// Parameters of the algebra suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraConfig {
    pub max_n: usize,
    pub seed: u64,
    /// Random samples per identity and dimension.
    pub samples: usize,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig {
            max_n: 5,
            seed: 1,
            samples: 8,
        }
    }
}

fn random_form<S: Scalar>(n: usize, p: usize, q: usize, rng: &mut SeededRng) -> Result<DoubleForm<S>> {
    let mut a = DoubleForm::<S>::zeros(n, p, q)?;
    for i in basis(n, p) {
        for j in basis(n, q) {
            a.set(i, j, S::from_ratio(rng.int_in(-16, 16), 8));
        }
    }
    Ok(a)
}

/// Runs every algebraic identity for dimensions `2..=max_n` in the scalar
/// type `S`. Exact mode demands zero defects.
pub fn algebra_suite<S: Scalar>(cfg: &AlgebraConfig) -> Result<InvariantReport> {
    if !(2..=8).contains(&cfg.max_n) {
        return Err(Error::InvalidArgument("algebra suite needs 2 <= max_n <= 8".into()));
    }
    let mode = if S::EXACT { ScalarMode::Exact } else { ScalarMode::Float };
    let mut report = InvariantReport::new("algebra", mode);
    report.environment.seed = Some(cfg.seed);
    let tol = tolerance::<S>();
    let mut rng = SeededRng::new(cfg.seed);
    let half = S::from_ratio(1, 2);

    for n in 2..=cfg.max_n {
        let g = DoubleForm::<S>::metric(n)?;

        let mut hodge = Worst(0.0);
        let mut metric_powers = Worst(0.0);
        for p in 0..=n {
            for q in 0..=n {
                let a = random_form::<S>(n, p, q, &mut rng)?;
                let sign = if (p * (n - p) + q * (n - q)) % 2 == 0 { 1 } else { -1 };
                hodge.add(form_defect(&a.hodge().hodge(), &a.scale(&S::from_i64(sign)))?);
            }
            let lhs = g.pow(p).scale(&(S::one() / factorial(p))).hodge();
            let rhs = g.pow(n - p).scale(&(S::one() / factorial(n - p)));
            metric_powers.add(form_defect(&lhs, &rhs)?);
        }
        report.defect(format!("hodge_involution/n={n}"), Defect::new(hodge.0, tol));
        report.defect(format!("hodge_metric_powers/n={n}"), Defect::new(metric_powers.0, tol));

        let mut commut = Worst(0.0);
        let mut assoc = Worst(0.0);
        let mut adjoint = Worst(0.0);
        for _ in 0..cfg.samples {
            let deg = |rng: &mut SeededRng| rng.int_in(0, 2.min(n as i64)) as usize;
            let (pa, qa, pb, qb) = (deg(&mut rng), deg(&mut rng), deg(&mut rng), deg(&mut rng));
            let a = random_form::<S>(n, pa, qa, &mut rng)?;
            let b = random_form::<S>(n, pb, qb, &mut rng)?;
            let c = random_form::<S>(n, 1, 1, &mut rng)?;
            let sign = if (pa * pb + qa * qb) % 2 == 0 { 1 } else { -1 };
            commut.add(form_defect(&a.wedge(&b)?, &b.wedge(&a)?.scale(&S::from_i64(sign)))?);
            assoc.add(form_defect(&a.wedge(&b)?.wedge(&c)?, &a.wedge(&b.wedge(&c)?)?)?);
            if pa < n && qa < n {
                let big = random_form::<S>(n, pa + 1, qa + 1, &mut rng)?;
                let lhs = g.wedge(&a)?.inner(&big)?;
                let rhs = a.inner(&big.contract()?)?;
                adjoint.add(scalar_defect(&lhs, &rhs));
            }
        }
        report.defect(format!("graded_commutativity/n={n}"), Defect::new(commut.0, tol));
        report.defect(format!("associativity/n={n}"), Defect::new(assoc.0, tol));
        report.defect(format!("contraction_adjoint/n={n}"), Defect::new(adjoint.0, tol));

        let mut closed = Worst(0.0);
        for lambda in -2i64..=2 {
            let r = constant_curvature(n, &S::from_i64(lambda))?;
            for k in 0..=n / 2 {
                let want = powi(&S::from_ratio(lambda, 2), k) * factorial::<S>(n) / factorial(n - 2 * k);
                closed.add(scalar_defect(&gauss_bonnet_even(&r, k)?, &want));
            }
        }
        report.defect(format!("constant_curvature_h2k/n={n}"), Defect::new(closed.0, tol));

        let mut einstein = Worst(0.0);
        let mut hyper = Worst(0.0);
        let mut odd = Worst(0.0);
        for s in 0..cfg.samples {
            let r = random_bianchi::<S>(n, cfg.seed.wrapping_mul(1000).wrapping_add(s as u64), default_terms(n))?;
            let want = g.scale(&(r.scalar_curvature() * half.clone())).try_sub(&r.ricci())?;
            einstein.add(form_defect(&einstein_lovelock(&r, 1)?, &want)?);

            let kappa: Vec<S> = (0..n).map(|_| S::from_ratio(rng.int_in(-24, 24), 8)).collect();
            let b = ShapeOperatorData::from_kappa(&kappa)?;
            let e = elementary_symmetric(&kappa);
            for (k, ek) in e.iter().enumerate() {
                hyper.add(scalar_defect(&mean_curvature_s(&b, k, n)?, ek));
            }
            for p in 1..=n / 2 {
                let (lhs, rhs) = even_intrinsic_identity(&b, p, n)?;
                hyper.add(scalar_defect(&lhs, &rhs));
            }

            let b = ShapeOperatorData::new(random_symmetric::<S>(n, &mut rng)?)?;
            for k in 0..=(n - 1) / 2 {
                let h = gauss_bonnet_odd(&r, &b, k, n)?;
                let t = einstein_lovelock(&r, k)?;
                odd.add(scalar_defect(&h, &t.inner(b.b())?));
            }
        }
        report.defect(format!("einstein_tensor/n={n}"), Defect::new(einstein.0, tol));
        report.defect(format!("hypersurface_mean_curvatures/n={n}"), Defect::new(hyper.0, tol));
        report.defect(format!("odd_curvature_pairing/n={n}"), Defect::new(odd.0, tol));

        if n >= 4 {
            let mut thorpe = Worst(0.0);
            let r = random_bianchi::<S>(n, cfg.seed, default_terms(n))?;
            for p in 1..=2 {
                let rp = r.form().pow(p);
                for i in basis(n, 2 * p) {
                    for j in basis(n, 2 * p) {
                        let v = thorpe_oracle(&r, p, &i.axes(), &j.axes())?;
                        thorpe.add(scalar_defect(&v, &rp.get(i, j)));
                    }
                }
            }
            report.defect(format!("thorpe_oracle/n={n}"), Defect::new(thorpe.0, tol));

            let mut vanishing = Worst(0.0);
            let mut accepted = 0;
            let mut seed = cfg.seed;
            while accepted < cfg.samples {
                if let Ok(r) = supported_on_three_axes::<S>(n, seed) {
                    vanishing.add(r.form().pow(2).norm());
                    accepted += 1;
                }
                seed = seed.wrapping_add(1);
            }
            report.defect(format!("three_axis_square/n={n}"), Defect::new(vanishing.0, 0.0));

            let mut lowest = f64::INFINITY;
            for s in 0..cfg.samples as u64 {
                let check = h4k_positivity_check(&random_einstein::<S>(n, cfg.seed.wrapping_add(s))?, 1)?;
                if check.is_1k_einstein {
                    lowest = lowest.min(check.h4k.to_f64());
                } else {
                    lowest = f64::NEG_INFINITY;
                }
            }
            report.defect(
                format!("einstein_h4_positivity/n={n}"),
                Defect::at_least(lowest, if S::EXACT { 0.0 } else { -POSITIVITY_TOL }),
            );
        }
    }
    Ok(report)
}

/// Parameters of the lattice suites. Unless `metric` is given, the metric is
/// `δ + P` with `P` from [`random_component_terms`]`(n, seed, amplitude)` on
/// a grid of period `2π` (or of the given `spacing`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub n: usize,
    pub k: Vec<usize>,
    pub grid: Vec<usize>,
    pub eps: Vec<f64>,
    pub seed: u64,
    pub amplitude: f64,
    /// Number of random variation directions or test functions.
    pub samples: usize,
    /// Refinement sizes for convergence studies.
    pub refinement: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Vec<f64>>,
    /// Metric fixture replacing the random perturbation; refinement studies
    /// need a `trig` source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricFieldSpec>,
}

/// Default metric perturbation amplitude.
pub const DEFAULT_AMPLITUDE: f64 = 0.1;

impl LatticeConfig {
    pub fn variational(k: usize) -> Self {
        let (n, size) = if k >= 2 { (5, 8) } else { (4, 12) };
        LatticeConfig {
            n,
            k: vec![k],
            grid: vec![size; n],
            eps: vec![1e-2, 5e-3, 2.5e-3],
            seed: 1,
            amplitude: DEFAULT_AMPLITUDE,
            samples: 3,
            refinement: vec![],
            spacing: None,
            metric: None,
        }
    }

    pub fn laplacian() -> Self {
        LatticeConfig {
            n: 3,
            k: vec![0, 1],
            grid: vec![64; 3],
            eps: vec![],
            seed: 1,
            amplitude: DEFAULT_AMPLITUDE,
            samples: 2,
            refinement: vec![16, 32],
            spacing: None,
            metric: None,
        }
    }

    pub fn lovelock_divergence(k: usize) -> Self {
        let (n, refinement) = if k >= 2 { (5, vec![8, 16]) } else { (4, vec![8, 16, 32]) };
        LatticeConfig {
            n,
            k: vec![k],
            grid: vec![*refinement.last().expect("nonempty"); n],
            eps: vec![],
            seed: 1,
            amplitude: DEFAULT_AMPLITUDE,
            samples: 1,
            refinement,
            spacing: None,
            metric: None,
        }
    }

    /// Uses the fixture's dimension and shape.
    pub fn with_metric(mut self, spec: MetricFieldSpec) -> Self {
        self.n = spec.n;
        self.grid = spec.shape.clone();
        self.spacing = spec.h.clone();
        self.metric = Some(spec);
        self
    }

    fn grid(&self) -> Result<Grid> {
        if let Some(spec) = &self.metric {
            return spec.grid();
        }
        if self.grid.len() != self.n {
            return Err(Error::ShapeMismatch(vec![self.n], vec![self.grid.len()]));
        }
        match &self.spacing {
            Some(h) => Grid::new(self.grid.clone(), h.clone()),
            None => Grid::periodic(self.grid.clone()),
        }
    }

    fn metric(&self, grid: &Grid) -> Result<MetricField> {
        match &self.metric {
            Some(spec) => spec.build(),
            None => MetricField::perturbed_flat(grid, self.seed, self.amplitude),
        }
    }

    fn terms(&self) -> Result<Vec<ComponentTerm>> {
        match &self.metric {
            None => Ok(random_component_terms(self.n, self.seed, self.amplitude)),
            Some(MetricFieldSpec { source: MetricSource::Trig { terms }, .. }) => Ok(terms.clone()),
            Some(_) => Err(Error::InvalidArgument("refinement studies need a trig metric".into())),
        }
    }

    fn report(&self, subject: &str) -> InvariantReport {
        let mut r = InvariantReport::new(subject, ScalarMode::Float);
        r.environment.seed = Some(self.seed);
        match &self.metric {
            Some(spec) => r.metric = Some(spec.clone()),
            None => r.result("amplitude", self.amplitude),
        }
        r
    }
}

fn direction_seed(seed: u64, d: usize) -> u64 {
    seed.wrapping_mul(7919).wrapping_add(1000 + d as u64)
}

/// `H′₂ₖ(h) = ½∫⟨T₂ₖ, h⟩` along `samples` random directions.
pub fn variational_suite(cfg: &LatticeConfig) -> Result<InvariantReport> {
    let grid = cfg.grid()?;
    let gf = cfg.metric(&grid)?;
    let mut report = cfg.report("variational");
    report.environment.grid = Some(cfg.grid.clone());
    report.environment.spacing = Some(grid.spacing().to_vec());
    report.environment.eps = Some(cfg.eps.clone());
    for &k in &cfg.k {
        for d in 0..cfg.samples {
            let h = TensorField2::trig(&grid, &random_component_terms(cfg.n, direction_seed(cfg.seed, d), 1.0))?;
            let v = variational_check(&gf, &h, k, &cfg.eps)?;
            let tag = format!("k={k}/direction={d}");
            report.result(format!("{tag}/gradient"), v.gradient);
            report.result(format!("{tag}/difference_quotients"), v.difference_quotients.clone());
            report.result(format!("{tag}/defects"), v.defects.clone());
            if let Some(o) = v.eps_order {
                report.result(format!("{tag}/eps_order"), o);
            }
            report.defect(format!("{tag}/extrapolated"), Defect::new(v.extrapolated_defect, VARIATIONAL_TOL));
        }
    }
    Ok(report)
}

/// Refinement study of `max |div T₂ₖ|` on the sizes in `refinement`.
pub fn lovelock_divergence_suite(cfg: &LatticeConfig) -> Result<InvariantReport> {
    let mut report = cfg.report("lovelock-div");
    report.environment.grid = cfg.refinement.last().map(|&s| vec![s; cfg.n]);
    let terms = cfg.terms()?;
    for &k in &cfg.k {
        let study = lovelock_divergence_study(cfg.n, k, &terms, &cfg.refinement)?;
        let tag = format!("k={k}");
        report.result(format!("{tag}/sizes"), study.sizes.iter().map(|&s| s as f64).collect::<Vec<_>>());
        report.result(format!("{tag}/max_divergence"), study.defects.clone());
        report.result(format!("{tag}/pairwise_orders"), study.pairwise_orders.clone());
        report.defect(format!("{tag}/fitted_order"), Defect::at_least(study.fitted_order, MIN_ORDER));
        let last = *study.defects.last().expect("nonempty refinement");
        report.defect(format!("{tag}/finest_divergence"), Defect::new(last, DIVERGENCE_TOL));
    }
    Ok(report)
}

fn test_function(grid: &Grid, n: usize, seed: u64) -> Result<ScalarField> {
    let mut rng = SeededRng::new(seed);
    let terms: Vec<TrigTerm> = (0..3)
        .map(|_| TrigTerm {
            amp: rng.range(0.5, 1.0) * rng.sign() as f64,
            freq: (0..n).map(|_| rng.int_in(-1, 1)).collect(),
            phase: rng.range(0.0, std::f64::consts::TAU),
        })
        .collect();
    ScalarField::trig(grid, &terms)
}

/// Integral, self-adjointness and flat-space checks of `ℓ₂ₖ`.
pub fn laplacian_suite(cfg: &LatticeConfig) -> Result<InvariantReport> {
    let grid = cfg.grid()?;
    let gf = cfg.metric(&grid)?;
    let conn = Connection::new(&gf);
    let mut report = cfg.report("laplacian");
    report.environment.grid = Some(cfg.grid.clone());
    report.environment.spacing = Some(grid.spacing().to_vec());
    let abs = |f: &ScalarField| ScalarField::from_fn(&grid, |p| f.at(p).abs());
    for &k in &cfg.k {
        let tag = format!("k={k}");
        let (lo, hi) = conn.lovelock_eigen_range(k)?;
        report.result(format!("{tag}/lovelock_eigen_range"), vec![lo, hi]);
        let fields: Vec<ScalarField> = (0..cfg.samples.max(2))
            .map(|s| test_function(&grid, cfg.n, direction_seed(cfg.seed, s)))
            .collect::<Result<_>>()?;
        let images: Vec<ScalarField> = fields.iter().map(|f| conn.ell_2k_field(f, k)).collect::<Result<_>>()?;
        let mut worst_integral = Worst(0.0);
        for (f, lf) in fields.iter().zip(&images) {
            worst_integral.add(integrate(&gf, lf)?.abs() / integrate(&gf, &abs(f))?);
        }
        report.defect(format!("{tag}/integral"), Defect::new(worst_integral.0, LAPLACIAN_TOL));
        let mut worst_adjoint = Worst(0.0);
        for a in 0..fields.len() {
            for b in a + 1..fields.len() {
                let x = ScalarField::from_fn(&grid, |p| fields[a].at(p) * images[b].at(p));
                let y = ScalarField::from_fn(&grid, |p| fields[b].at(p) * images[a].at(p));
                let defect = (integrate(&gf, &x)? - integrate(&gf, &y)?).abs();
                let scale = integrate(&gf, &abs(&x))? + integrate(&gf, &abs(&y))?;
                worst_adjoint.add(defect / scale);
            }
        }
        report.defect(format!("{tag}/selfadjoint"), Defect::new(worst_adjoint.0, LAPLACIAN_TOL));
        let constant = conn.ell_2k_field(&ScalarField::constant(&grid, 1.0), k)?;
        let harmonic = constant.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        report.defect(format!("{tag}/constants_harmonic"), Defect::new(harmonic, 0.0));
    }
    let (sizes, errors) = flat_laplacian_study(cfg.n.min(3), &cfg.refinement, cfg.seed)?;
    let spacings: Vec<f64> = sizes.iter().map(|&s| 1.0 / s as f64).collect();
    report.result("flat_laplacian/max_difference", errors.clone());
    let order = crate::discrete::fitted_order(&spacings, &errors)?;
    report.defect("flat_laplacian/order", Defect::at_least(order, MIN_ORDER));
    Ok(report)
}

/// Max difference between `ℓ₀` on the flat torus and the compact 4th-order
/// stencil `(−f₋₂ + 16f₋₁ − 30f₀ + 16f₁ − f₂)/(12h²)` (negated) per grid size.
pub fn flat_laplacian_study(n: usize, sizes: &[usize], seed: u64) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut errors = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let grid = Grid::uniform(n, s)?;
        let gf = MetricField::flat(&grid)?;
        let f = test_function(&grid, n, seed)?;
        let l0 = Connection::new(&gf).ell_2k_field(&f, 0)?;
        let mut worst = 0.0f64;
        for p in 0..grid.len() {
            let mut classical = 0.0;
            for a in 0..n {
                let v = |s: isize| f.at(grid.shift(p, a, s));
                let h = grid.spacing()[a];
                classical += (-v(-2) + 16.0 * v(-1) - 30.0 * v(0) + 16.0 * v(1) - v(2)) / (12.0 * h * h);
            }
            worst = worst.max((l0.at(p) + classical).abs());
        }
        errors.push(worst);
    }
    Ok((sizes.to_vec(), errors))
}
