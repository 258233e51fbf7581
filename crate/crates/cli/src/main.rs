//! `gbcurv`: Gauss–Bonnet curvatures and Einstein–Lovelock tensors of model
//! curvature tensors, hypersurface mean curvatures, and the verification
//! suites.
//!
//! Exit codes: 0 when every defect passes, 1 on a defect failure, 2 on a
//! usage, parse or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use gbcurv::curvature::{
    einstein_lovelock, gauss_bonnet_even, gauss_bonnet_odd, lovelock_lagrangian, mean_curvature_s,
    minimality_defect, sectional_2p, CurvatureTensor, LovelockCoefficients,
};
use gbcurv::discrete::MetricFieldSpec;
use gbcurv::double_form::DoubleForm;
use gbcurv::models::{hypersurface_model, ModelKind, ModelSpec};
use gbcurv::report::{emit, Defect, Format, InvariantReport, ScalarMode};
use gbcurv::scalar::{factorial, powi};
use gbcurv::verify::{
    algebra_suite, laplacian_suite, lovelock_divergence_suite, variational_suite, AlgebraConfig, LatticeConfig,
    FLOAT_ALGEBRA_TOL,
};
use gbcurv::{Rational, Scalar};

const EXIT_DEFECT: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "gbcurv", version, about = "Gauss–Bonnet curvature toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    ConstantCurvature,
    RandomBianchi,
    RandomEinstein,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Algebra,
    Variational,
    Laplacian,
    #[value(name = "lovelock-div")]
    LovelockDiv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gauss–Bonnet curvatures, Einstein–Lovelock tensors and sectional
    /// curvatures of a model curvature tensor.
    Invariants {
        /// ModelSpec JSON file.
        #[arg(long, value_name = "FILE", conflicts_with = "kind", required_unless_present = "kind")]
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, requires = "kind")]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Orders k (default: every k with 2k <= n).
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Lovelock coefficients c0,c2,c4,...
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Vec<f64>,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Mean curvatures, odd Gauss–Bonnet curvatures and (2k)-minimality of a
    /// hypersurface with principal curvatures kappa in a space form.
    Hypersurface {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        kappa: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        /// Orders k (default: every k with 2k+1 <= n).
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// MetricField JSON fixture for the lattice suites.
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Lattice shape; for lovelock-div, the refinement sizes.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        spacing: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest dimension of the algebra suite.
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Defects(Vec<String>),
}

impl From<gbcurv::Error> for Failure {
    fn from(e: gbcurv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &PathBuf) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(report: &InvariantReport, output: &Output) -> CliResult<()> {
    let format = match output.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Csv => Format::Csv,
    };
    let bytes = emit(report, format)?;
    match &output.out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Failure::Usage(format!("cannot write stdout: {e}")))
        }
    }
}

fn finish(report: &InvariantReport, output: &Output) -> CliResult<()> {
    write(report, output)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Defects(report.failures().into_iter().map(String::from).collect()))
    }
}

fn mode<S: Scalar>() -> ScalarMode {
    if S::EXACT {
        ScalarMode::Exact
    } else {
        ScalarMode::Float
    }
}

/// Records `v` as a float and, in exact mode, as a reduced fraction.
fn record<S: Scalar>(report: &mut InvariantReport, name: String, v: &S, show: fn(&S) -> Option<String>) {
    if let Some(s) = show(v) {
        report.result(format!("{name}/exact"), s.as_str());
    }
    report.result(name, v.to_f64());
}

fn matrix<S: Scalar>(a: &DoubleForm<S>) -> CliResult<Vec<Vec<f64>>> {
    let n = a.n();
    (0..n)
        .map(|i| (0..n).map(|j| Ok(a.eval_axes(&[i], &[j])?.to_f64())).collect())
        .collect()
}

fn orders(requested: &[usize], max: usize) -> CliResult<Vec<usize>> {
    if requested.is_empty() {
        return Ok((0..=max).collect());
    }
    if let Some(k) = requested.iter().find(|&&k| k > max) {
        return Err(Failure::Usage(format!("order k = {k} exceeds the maximum {max} for this dimension")));
    }
    Ok(requested.to_vec())
}

fn invariants<S: Scalar>(
    spec: &ModelSpec,
    ks: &[usize],
    coeffs: &[f64],
    show: fn(&S) -> Option<String>,
) -> CliResult<InvariantReport> {
    let model = spec.build::<S>()?;
    let r: &CurvatureTensor<S> = &model.curvature;
    let n = r.n();
    let mut report = InvariantReport::new("invariants", mode::<S>()).with_model(spec.clone());
    report.defect(
        "bianchi",
        Defect::new(r.form().bianchi_defect()?, if S::EXACT { 0.0 } else { FLOAT_ALGEBRA_TOL * r.form().norm().max(1.0) }),
    );
    let g = DoubleForm::<S>::metric(n)?;
    let n_s = S::from_i64(n as i64);
    for k in orders(ks, n / 2)? {
        record(&mut report, format!("h{}", 2 * k), &gauss_bonnet_even(r, k)?, show);
        if k == 0 {
            continue;
        }
        let t = einstein_lovelock(r, k)?;
        let fit = t.inner(&g)? / n_s.clone();
        let residual = t.try_sub(&g.scale(&fit))?.norm();
        report.result(format!("T{}/matrix", 2 * k), matrix(&t)?);
        report.result(format!("T{}/norm", 2 * k), t.norm());
        record(&mut report, format!("T{}/lambda_fit", 2 * k), &fit, show);
        report.result(format!("T{}/fit_residual", 2 * k), residual);
        let plane: Vec<Vec<S>> = (0..2 * k)
            .map(|a| (0..n).map(|b| if a == b { S::one() } else { S::zero() }).collect())
            .collect();
        record(&mut report, format!("sectional{}/coordinate_plane", 2 * k), &sectional_2p(r, k, &plane)?, show);
    }
    if !coeffs.is_empty() {
        let c = LovelockCoefficients(coeffs.iter().map(|&v| S::from_f64(v)).collect());
        record(&mut report, "lovelock_lagrangian".into(), &lovelock_lagrangian(r, &c)?, show);
    }
    Ok(report)
}

fn hypersurface<S: Scalar>(
    kappa: &[f64],
    lambda: f64,
    ks: &[usize],
    show: fn(&S) -> Option<String>,
) -> CliResult<InvariantReport> {
    let n = kappa.len();
    if n == 0 {
        return Err(Failure::Usage("kappa must not be empty".into()));
    }
    let kappa_s: Vec<S> = kappa.iter().map(|&v| S::from_f64(v)).collect();
    let lambda_s = S::from_f64(lambda);
    let (b, r) = hypersurface_model(&kappa_s, &lambda_s)?;
    let spec = ModelSpec::hypersurface(kappa.to_vec(), lambda);
    let mut report = InvariantReport::new("hypersurface", mode::<S>()).with_model(spec);
    for k in 0..=n {
        record(&mut report, format!("s{k}"), &mean_curvature_s(&b, k, n)?, show);
    }
    for k in orders(ks, (n - 1) / 2)? {
        let h = gauss_bonnet_odd(&r, &b, k, n)?;
        let defect = minimality_defect(&kappa_s, &lambda_s, k)?;
        record(&mut report, format!("h{}", 2 * k + 1), &h, show);
        record(&mut report, format!("minimality_defect/k={k}"), &defect, show);
        report.result(format!("minimal/k={k}"), defect.is_zero() || (!S::EXACT && defect.to_f64().abs() <= FLOAT_ALGEBRA_TOL));
        // The defect is 2ᵏ(n−2k−1)!/k! · h₂ₖ₊₁.
        let expected = powi(&S::from_i64(2), k) * factorial::<S>(n - 2 * k - 1) / factorial::<S>(k) * h;
        let diff = (defect.clone() - expected.clone()).abs().to_f64();
        let scale = defect.abs().to_f64().max(expected.abs().to_f64()).max(1.0);
        let tol = if S::EXACT { 0.0 } else { FLOAT_ALGEBRA_TOL * scale };
        report.defect(format!("minimality_vs_h{}", 2 * k + 1), Defect::new(diff, tol));
    }
    Ok(report)
}

fn rational_string(v: &Rational) -> Option<String> {
    Some(v.to_string())
}

fn no_string(_: &f64) -> Option<String> {
    None
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Invariants { model, kind, n, lambda, seed, k, coeffs, exact, output } => {
            let spec = match (model, kind) {
                (Some(path), _) => ModelSpec::from_json(&read(&path)?)?,
                (None, Some(kind)) => {
                    let n = n.ok_or_else(|| Failure::Usage("--kind needs --n".into()))?;
                    let mut spec = match kind {
                        KindArg::ConstantCurvature => ModelSpec::constant_curvature(n, lambda.unwrap_or(1.0)),
                        KindArg::RandomBianchi => ModelSpec::random_bianchi(n, seed.unwrap_or(1)),
                        KindArg::RandomEinstein => ModelSpec::random_einstein(n, seed.unwrap_or(1)),
                    };
                    if spec.kind != ModelKind::ConstantCurvature && lambda.is_some() {
                        return Err(Failure::Usage("--lambda only applies to constant-curvature".into()));
                    }
                    spec.seed = spec.seed.or(seed.filter(|_| spec.kind != ModelKind::ConstantCurvature));
                    spec
                }
                (None, None) => return Err(Failure::Usage("either --model or --kind is required".into())),
            };
            let report = if exact {
                invariants::<Rational>(&spec, &k, &coeffs, rational_string)?
            } else {
                invariants::<f64>(&spec, &k, &coeffs, no_string)?
            };
            finish(&report, &output)
        }
        Command::Hypersurface { kappa, lambda, k, exact, output } => {
            let report = if exact {
                hypersurface::<Rational>(&kappa, lambda, &k, rational_string)?
            } else {
                hypersurface::<f64>(&kappa, lambda, &k, no_string)?
            };
            finish(&report, &output)
        }
        Command::Verify { suite, model, k, grid, spacing, eps, seed, max_n, exact, output } => {
            if exact && suite != SuiteArg::Algebra {
                return Err(Failure::Usage("--exact only applies to the algebra suite".into()));
            }
            if suite == SuiteArg::Algebra {
                let mut cfg = AlgebraConfig::default();
                cfg.max_n = max_n.unwrap_or(cfg.max_n);
                cfg.seed = seed.unwrap_or(cfg.seed);
                let report = if exact { algebra_suite::<Rational>(&cfg)? } else { algebra_suite::<f64>(&cfg)? };
                return finish(&report, &output);
            }
            let order = k.first().copied().unwrap_or(1);
            let mut cfg = match suite {
                SuiteArg::Variational => LatticeConfig::variational(order),
                SuiteArg::Laplacian => LatticeConfig::laplacian(),
                _ => LatticeConfig::lovelock_divergence(order),
            };
            if let Some(path) = model {
                let fixture: MetricFieldSpec = serde_json::from_str(&read(&path)?)
                    .map_err(|e| Failure::Usage(format!("invalid metric fixture {}: {e}", path.display())))?;
                cfg = cfg.with_metric(fixture);
            }
            if !k.is_empty() {
                cfg.k = k;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !eps.is_empty() {
                cfg.eps = eps;
            }
            if suite == SuiteArg::LovelockDiv {
                if !grid.is_empty() {
                    cfg.refinement = grid;
                }
            } else if !grid.is_empty() {
                if cfg.metric.is_some() {
                    return Err(Failure::Usage("--grid conflicts with a metric fixture".into()));
                }
                cfg.n = grid.len();
                cfg.grid = grid;
            }
            if !spacing.is_empty() {
                cfg.spacing = Some(spacing);
            }
            let report = match suite {
                SuiteArg::Variational => variational_suite(&cfg)?,
                SuiteArg::Laplacian => laplacian_suite(&cfg)?,
                _ => lovelock_divergence_suite(&cfg)?,
            };
            finish(&report, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Defects(names)) => {
            eprintln!("defect check failed: {}", names.join(", "));
            ExitCode::from(EXIT_DEFECT)
        }
    }
}
