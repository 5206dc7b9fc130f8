//! `oklab`: runs check suites on toric instances and writes CSV reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use oklab_core::concave::{kolmogorov_distance, FilteredGradedAlgebra, ReferenceDistribution, TransformOptions};
use oklab_core::graded::{body_convergence, Monotonicity};
use oklab_core::report::{all_pass, Check};
use oklab_core::toric::{lattice_points, templates, MetrizedToricDivisor, ToricError};
use oklab_core::{Rational, Scalar};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "oklab", version, about = "Okounkov bodies and concave transforms on toric instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites on an instance file.
    Run(RunArgs),
    /// Write a template instance (or a boundary family directory).
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Okounkov,
    Transform,
    Volumes,
    Toric,
    Metrics,
    All,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Truncation level M (default depends on the dimension).
    #[arg(long)]
    truncation: Option<u32>,
    #[arg(long, default_value_t = 8)]
    fekete_depth: u32,
    #[arg(long, default_value_t = 64)]
    grid: u32,
    /// Tropical sample count for the height checks.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// p1_linear, p2_linear, p3_linear, random_pl, p1_function_field,
    /// p1_function_field_impure or boundary_family.
    template: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Dimension for random_pl.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Comma-separated rationals for boundary_family.
    #[arg(long, default_value = "-1/2,-1/4,1/4,1/2,1", allow_hyphen_values = true)]
    eps: String,
    /// Output file, or directory for boundary_family. Standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
enum Failure {
    Assertion(String),
    Parse(String),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

fn io<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Io)
}

fn computation(e: impl std::fmt::Display) -> Failure {
    Failure::Assertion(format!("computation failed: {e}"))
}

struct Settings {
    options: TransformOptions,
    samples: usize,
    seed: u64,
}

fn okounkov_suite(d: &MetrizedToricDivisor, alg: &FilteredGradedAlgebra, s: &Settings) -> Result<Vec<Check>> {
    let m = s.options.truncation;
    let growth = alg.semigroup().volume_growth(m)?;
    let mut checks = Vec::new();
    if let Some(e) = growth.extrapolation {
        checks.push(Check::relative("okounkov_volume", e.limit, d.geometric_volume(), 0.05));
    }
    let body = alg.okounkov_body(m)?;
    let gap = body.hausdorff_distance(d.polytope())?;
    checks.push(Check::close("okounkov_body_hausdorff", gap, 0.0, 1e-9));
    // Lattice counts against the semigroup's level sizes.
    let counts_match = (1..=m.min(8)).all(|k| alg.level(k).map_or(0, |l| l.len()) == lattice_points(d.polytope(), k).len());
    checks.push(Check::flag("lattice_counts", counts_match));
    Ok(checks)
}

fn transform_suite(alg: &FilteredGradedAlgebra, s: &Settings) -> Result<Vec<Check>> {
    let m = s.options.truncation;
    let slack = 3.0 / f64::from(m);
    let t = alg.concave_transform(&s.options)?;
    let slopes = alg.asymptotic_slopes(m)?;
    Ok(vec![
        Check::at_most("concavity", t.concavity_defect, 0.0, 1e-6 + slack),
        Check::close("sup_equals_mu_max", alg.transform_sup(m).unwrap_or(t.sup), slopes.mu_max.limit, slack),
        Check::at_least("inf_above_mu_min", t.inf, slopes.mu_min.limit, slack),
    ])
}

fn volume_suite(alg: &FilteredGradedAlgebra, s: &Settings, table: &mut String) -> Result<Vec<Check>> {
    let vol = alg.arithmetic_volume(&s.options)?;
    let chi = alg.chi_volumes(&s.options)?;
    for (q, e) in [("arithmetic_volume", &vol), ("chi_volume", &chi)] {
        writeln!(table, "{q},{},{},{}", e.degree_side.limit, e.degree_side.error, e.integral_side)?;
    }
    let mut checks = vec![
        Check::relative("arithmetic_volume", vol.degree_side.limit, vol.integral_side, 0.05),
        Check::at_most("chi_below_arithmetic", chi.degree_side.limit, vol.degree_side.limit, chi.degree_side.error + vol.degree_side.error + 1e-9),
        Check::relative("chi_volume_num", chi.degree_side.limit, chi.integral_side, 0.05),
    ];
    let m = s.options.truncation;
    let reference = ReferenceDistribution::roof(alg.provenance().ok_or_else(|| anyhow!("algebra without a roof"))?.roof.clone());
    let distances = (1..=m).map(|k| kolmogorov_distance(&alg.jumping_measure(k)?, &reference)).collect::<Result<Vec<_>, _>>()?;
    let tail = &distances[(m as usize * 2 / 3)..];
    let trend = tail.windows(2).all(|w| w[1] <= 1.1 * w[0] + 1e-12);
    checks.push(Check::flag("measure_trend", trend));
    if alg.dim() == 1 {
        checks.push(Check::at_most("measure_distance", distances[m as usize - 1], 0.0, 0.05));
    }
    Ok(checks)
}

fn toric_suite(d: &MetrizedToricDivisor, s: &Settings) -> Result<Vec<Check>> {
    let m = s.options.truncation;
    let hs = d.hilbert_samuel_check(m)?;
    let mut checks = vec![Check {
        name: "hilbert_samuel".into(),
        estimate: hs.degree_side.limit,
        reference: hs.integral_side,
        gap: hs.relative_gap,
        pass: hs.relative_gap <= 0.05,
    }];
    let e = d.essential_minimum_estimate(s.samples, s.seed)?;
    checks.push(Check::at_least("zhang_inequality", e.estimate, e.zhang_bound, 1e-9));
    let h = d.height_inequality_check(d, s.samples.min(2000), s.seed)?;
    checks.push(Check::at_most("height_inequality", h.violations as f64, 0.0, 0.0));
    // Duality at every place with a nonzero factor, on a few sections of level M.
    let mut residual = 0.0f64;
    let pts = lattice_points(d.polytope(), m);
    let step = (pts.len() / 5).max(1);
    let probes = d.tropical_samples(32, s.seed);
    for (i, f) in d.place_factors().iter().enumerate() {
        if *f == 0.0 {
            continue;
        }
        let us: Vec<Vec<f64>> = probes.iter().map(|x| x.coords[i].clone()).collect();
        for g in pts.iter().step_by(step) {
            residual = residual.max(d.supnorm_duality_check(i, m, g, &us)?.residual);
        }
    }
    checks.push(Check::close("supnorm_duality", residual, 0.0, 1e-9));
    let c = d.classical_volume_check(m)?;
    let bar = c.h0_volume.error + c.positive_volume.error + 1e-9;
    checks.push(Check::at_most("h0_below_positive", c.h0_volume.limit, c.positive_volume.limit, bar));
    Ok(checks)
}

fn metrics_suite(d: &MetrizedToricDivisor, s: &Settings) -> Result<Vec<Check>> {
    let boundary = d.default_boundary()?;
    let eps: Vec<Rational> = [1i64, 2, 4, 8].iter().map(|&j| Rational::ratio(1, j)).collect();
    let options = TransformOptions { grid: s.options.grid.min(32), ..s.options };
    let conv = d.boundary_family(&boundary, &eps)?.convergence(d, &options)?;
    let slack = 3.0 / f64::from(s.options.truncation);
    // Members come in decreasing ε: volume gaps and G gaps shrink toward zero.
    let vol_monotone = conv.volume_gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let g_monotone = conv.transform_gaps.windows(2).all(|w| w[1] <= w[0] + slack);
    let mut checks = vec![
        Check::flag("continuity_monotone", vol_monotone),
        Check::at_most("continuity_lipschitz", *conv.volume_gaps.last().unwrap(), conv.lipschitz / 8.0, 1e-12),
        Check::flag("transform_convergence", g_monotone),
    ];
    // Shrinking and growing dilates of the polytope about its centroid.
    let p = d.polytope();
    let c = p.vertex_centroid();
    let outer = (1..=8).map(|j| p.scale_about(&c, &Rational::ratio(j + 1, j))).collect::<Result<Vec<_>, _>>()?;
    let r = body_convergence(&outer, p, 4)?;
    let down = r.hausdorff.windows(2).all(|w| w[1] < w[0]) && r.symmetric_difference.windows(2).all(|w| w[1] < w[0]);
    checks.push(Check::flag("metrics_agree", down && r.monotonicity == Monotonicity::Decreasing));
    let inner = (1..=16).map(|j| p.scale_about(&c, &Rational::ratio(j, j + 1))).collect::<Result<Vec<_>, _>>()?;
    let r = body_convergence(&inner, p, 4)?;
    let covered = r.first_interior_index.iter().all(|(_, i)| i.is_some());
    checks.push(Check::flag("interior_cover", covered));
    Ok(checks)
}

fn summary_csv(checks: &[Check]) -> String {
    let mut out = String::from("name,estimate,reference,gap,pass\n");
    for c in checks {
        out.push_str(&format!("{},{},{},{},{}\n", c.name, c.estimate, c.reference, c.gap, c.pass));
    }
    out
}

fn measures_csv(alg: &FilteredGradedAlgebra, truncation: u32) -> Result<String> {
    let reference = ReferenceDistribution::roof(alg.provenance().ok_or_else(|| anyhow!("algebra without a roof"))?.roof.clone());
    let mut out = String::from("m,kolmogorov_distance,mean\n");
    for m in 1..=truncation {
        let mu = alg.jumping_measure(m)?;
        out.push_str(&format!("{m},{},{}\n", kolmogorov_distance(&mu, &reference)?, mu.mean()));
    }
    Ok(out)
}

fn load(path: &Path) -> Result<MetrizedToricDivisor, Failure> {
    let text = io(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
    MetrizedToricDivisor::from_text(&text).map_err(|e| match e {
        ToricError::Parse { line, message } => Failure::Parse(format!("{}:{line}: {message}", path.display())),
        other => Failure::Parse(format!("{}: {other}", path.display())),
    })
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let d = load(&args.instance)?;
    let mut options = TransformOptions::defaults(d.dim());
    if let Some(m) = args.truncation {
        options.truncation = m;
    }
    options.depth = args.fekete_depth;
    options.grid = args.grid;
    if options.truncation < 4 {
        return Err(Failure::Parse(format!("truncation must be at least 4, got {}", options.truncation)));
    }
    if options.grid < 8 {
        return Err(Failure::Parse(format!("grid must be at least 8, got {}", options.grid)));
    }
    let s = Settings { options, samples: args.samples, seed: args.seed };
    let alg = d.algebra(options.truncation).map_err(computation)?;
    let wants = |x: Suite| args.suite == Suite::All || args.suite == x;

    let mut volume_table = String::from("quantity,estimate,error_bar,reference_value\n");
    let tasks: Vec<Suite> = [Suite::Okounkov, Suite::Transform, Suite::Toric, Suite::Metrics].into_iter().filter(|&x| wants(x)).collect();
    // Suites run in parallel; results are collected in a fixed order.
    let results: Vec<Result<Vec<Check>>> = tasks
        .par_iter()
        .map(|&suite| match suite {
            Suite::Okounkov => okounkov_suite(&d, &alg, &s),
            Suite::Transform => transform_suite(&alg, &s),
            Suite::Toric => toric_suite(&d, &s),
            _ => metrics_suite(&d, &s),
        })
        .collect();
    let mut checks = Vec::new();
    for r in results {
        checks.extend(r.map_err(computation)?);
    }
    if wants(Suite::Volumes) {
        checks.extend(volume_suite(&alg, &s, &mut volume_table).map_err(computation)?);
    }

    let transform = alg.concave_transform(&options).map_err(computation)?;
    let measures = measures_csv(&alg, options.truncation).map_err(computation)?;
    io(fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display())))?;
    let mut files = vec![("summary.csv", summary_csv(&checks)), ("transform.csv", transform.to_csv()), ("measures.csv", measures)];
    if wants(Suite::Volumes) {
        files.push(("volumes.csv", volume_table));
    }
    for (name, body) in files {
        let path = args.out.join(name);
        io(fs::write(&path, body).with_context(|| format!("writing {}", path.display())))?;
    }
    for c in &checks {
        println!("{:<28} {:>5} estimate {:.6} reference {:.6} gap {:.3e}", c.name, if c.pass { "ok" } else { "FAIL" }, c.estimate, c.reference, c.gap);
    }
    if all_pass(&checks) {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Failure::Assertion(format!("failed checks: {}", failed.join(", "))))
    }
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    if args.template == "boundary_family" {
        let eps = args
            .eps
            .split(',')
            .map(|t| Rational::parse_token(t.trim()).ok_or_else(|| Failure::Parse(format!("bad epsilon {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let members = templates::boundary_family(&eps).map_err(computation)?;
        let dir = args.out.clone().ok_or_else(|| Failure::Parse("boundary_family needs --out <directory>".into()))?;
        io(fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display())))?;
        let mut index = String::from("index,epsilon,file\n");
        for (i, (e, d)) in eps.iter().zip(&members).enumerate() {
            let file = format!("member_{i:02}.txt");
            index.push_str(&format!("{i},{},{file}\n", e.to_token()));
            let body = format!("# epsilon {}\n{}", e.to_token(), d.to_text());
            io(fs::write(dir.join(&file), body).with_context(|| format!("writing {file}")))?;
        }
        return io(fs::write(dir.join("family.csv"), index).context("writing family.csv"));
    }
    let d = templates::by_name(&args.template, args.seed, args.dim).map_err(|e| Failure::Parse(e.to_string()))?;
    match &args.out {
        Some(path) => io(fs::write(path, d.to_text()).with_context(|| format!("writing {}", path.display()))),
        None => {
            print!("{}", d.to_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("OKLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(e) => eprintln!("error: {e:#}"),
                Failure::Assertion(m) | Failure::Parse(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
