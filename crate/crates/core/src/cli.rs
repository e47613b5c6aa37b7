//! Command-line front-end: `serrin-lab <command> --config run.cfg`.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 a
//! theorem check failed and `--strict` was given.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};

use crate::config::{Command, RunConfig};
use crate::fem::{assemble_with, solve, FemField};
use crate::geometry::{boundary_partition, interior_sphere_radius, normal_span, DomainSpec};
use crate::mesher::{refine, triangulate, TaggedMesh};
use crate::poincare::{self, estimate_with_history, eta_estimate, mu_estimate};
use crate::quantities::{self, compute_center, deficits, identity_residual, span_of, u_distance_bounds, DeficitReport};
use crate::stability::{self, make_family, run_sweep, verify_theorems, SweepOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "serrin-lab", version, about = "Mixed-boundary Serrin torsion laboratory")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Run configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory (overrides [output] dir).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, value_name = "K")]
    pub threads: Option<usize>,
    /// Write SVG plots (overrides [output] svg).
    #[arg(long, value_enum)]
    pub svg: Option<Toggle>,
    /// Exit with status 3 when a theorem check fails.
    #[arg(long)]
    pub strict: bool,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable descriptions of failed checks.
    pub failed_checks: Vec<String>,
    /// Some sweep member could not be computed.
    pub numerical_failure: bool,
    log: String,
}

impl Outcome {
    fn note(&mut self, line: impl AsRef<str>) {
        println!("{}", line.as_ref());
        self.log.push_str(line.as_ref());
        self.log.push('\n');
    }

    fn check(&mut self, ok: bool, what: String) {
        self.note(format!("{} {what}", if ok { "PASS" } else { "FAIL" }));
        if !ok {
            self.failed_checks.push(what);
        }
    }

    fn write(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        self.note(format!("wrote {}", path.display()));
        self.files.push(path);
        Ok(())
    }

    /// Exit status for this outcome.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.numerical_failure {
            2
        } else if strict && !self.failed_checks.is_empty() {
            3
        } else {
            0
        }
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    spec: DomainSpec,
    out: PathBuf,
    svg: bool,
}

fn base_mesh(run: &Run) -> Result<Arc<TaggedMesh>> {
    Ok(Arc::new(triangulate(&run.spec, run.cfg.mesh.h_target)?))
}

fn solve_on(run: &Run, mesh: Arc<TaggedMesh>) -> Result<FemField> {
    let system = assemble_with(mesh, run.cfg.mesh.degree, crate::DIM, run.cfg.mesh.curved)?;
    solve(&system)
}

fn report_csv(reports: &[&DeficitReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(quantities::CSV_COLUMNS)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8"))
}

fn cmd_solve(run: &Run, rigidity: bool, out: &mut Outcome) -> Result<()> {
    let cfg = run.cfg;
    let mut mesh = base_mesh(run)?;
    for _ in 0..cfg.mesh.refinements {
        mesh = Arc::new(refine(&mesh));
    }
    let u = solve_on(run, mesh.clone())?;
    let span = span_of(&u)?;
    let center = compute_center(&u, &span);
    let constants = stability::estimate_constants(&mesh, &run.spec, 1.0)?;
    let sphere = interior_sphere_radius(&run.spec);
    let r_i = (!sphere.degenerate).then_some(sphere.radius);
    let report = deficits(&u, &center, Some(constants.lambda), r_i, &cfg.domain.id)?;
    let bounds = u_distance_bounds(&u, &run.spec, sphere.radius)?;

    out.note(format!(
        "{}: h_max = {:.4e}, k = {}, R = {:.6}, m = {:.6}, z = ({:.3e}, {:.3e}), Lambda = {:.4}",
        cfg.domain.id, report.h_max, report.k, report.r, report.m, report.z.x, report.z.y, constants.lambda
    ));
    out.note(format!(
        "deficit_1 = {:.4e}, deficit_2 = {:.4e}, pseudodistance = {:.4e}, rho_gap = {:.4e}, identity residual = {:.4e}",
        report.deficit_1, report.deficit_2, report.pseudodistance, report.rho_gap, report.identity_residual
    ));
    out.write(&run.out, "solve.csv", &report_csv(&[&report])?)?;
    if cfg.output.export_field {
        out.write(&run.out, "mesh.txt", &mesh.export_text())?;
        out.write(&run.out, "field.txt", &u.export_text())?;
    }

    let c = report.c_bound.unwrap_or(f64::NAN);
    out.check(
        report.c_bound_satisfied,
        format!("pseudodistance {:.4e} <= C_bound {c:.4} * deficit_2 {:.4e}", report.pseudodistance, report.deficit_2),
    );
    out.check(report.m > 0.0, format!("min u_nu {:.4e} > 0", report.m));
    out.check(report.gamma1_term >= -1e-6, format!("gamma1_term {:.4e} >= -1e-6", report.gamma1_term));
    out.check(!bounds.flagged(), format!("pointwise bounds worst margin {:.4e} >= -5e-3", bounds.worst_margin()));
    if rigidity {
        for (name, v) in
            [("deficit_2", report.deficit_2), ("pseudodistance", report.pseudodistance), ("rho_gap", report.rho_gap)]
        {
            out.check(v <= 1e-2, format!("rigidity {name} {v:.4e} <= 1e-2"));
        }
    }
    Ok(())
}

const IDENTITY_COLUMNS: [&str; 7] = [
    "level",
    "h_max",
    "identity_lhs",
    "identity_rhs",
    "gamma1_term",
    "identity_residual",
    "identity_residual_exact_laplacian",
];

fn cmd_identity(run: &Run, out: &mut Outcome) -> Result<()> {
    let mut mesh = base_mesh(run)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(IDENTITY_COLUMNS)?;
    let mut residuals = Vec::new();
    for level in 0..=run.cfg.mesh.refinements {
        if level > 0 {
            mesh = Arc::new(refine(&mesh));
        }
        let u = solve_on(run, mesh.clone())?;
        let center = compute_center(&u, &span_of(&u)?);
        let id = identity_residual(&u, &center)?;
        out.note(format!(
            "level {level}: h_max = {:.4e}, lhs = {:.6e}, rhs = {:.6e}, gamma1 = {:.3e}, residual = {:.4e}",
            mesh.h_max, id.lhs, id.rhs, id.gamma1_term, id.residual
        ));
        w.write_record([
            level.to_string(),
            format!("{:.12e}", mesh.h_max),
            format!("{:.12e}", id.lhs),
            format!("{:.12e}", id.rhs),
            format!("{:.12e}", id.gamma1_term),
            format!("{:.12e}", id.residual),
            format!("{:.12e}", id.residual_exact_laplacian),
        ])?;
        out.check(id.gamma1_term >= -1e-6, format!("level {level} gamma1_term {:.4e} >= -1e-6", id.gamma1_term));
        residuals.push(id.residual);
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8");
    out.write(&run.out, "identity.csv", &csv)?;
    for (i, pair) in residuals.windows(2).enumerate() {
        out.check(
            pair[1] <= 1.2 * pair[0],
            format!("residual level {} {:.4e} <= 1.2 * level {i} {:.4e}", i + 1, pair[1], pair[0]),
        );
    }
    Ok(())
}

fn cmd_poincare(run: &Run, out: &mut Outcome) -> Result<()> {
    let mesh = base_mesh(run)?;
    let levels = run.cfg.mesh.refinements + 1;
    let span = normal_span(&boundary_partition(&run.spec));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(poincare::CSV_COLUMNS)?;
    for &alpha in &run.cfg.alphas {
        let mut estimates = vec![estimate_with_history(&mesh, levels, |m| mu_estimate(m, alpha))?];
        if span.k > 0 {
            estimates.push(estimate_with_history(&mesh, levels, |m| eta_estimate(m, &span, alpha))?);
        }
        for e in estimates {
            out.note(format!(
                "{} alpha = {alpha}: {:.6} (levels: {}), converged = {}",
                e.kind,
                e.value,
                e.history.iter().map(|(_, v)| format!("{v:.6}")).collect::<Vec<_>>().join(", "),
                e.converged()
            ));
            for rec in e.csv_records() {
                w.write_record(rec)?;
            }
        }
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8");
    out.write(&run.out, "poincare.csv", &csv)
}

fn cmd_sweep(run: &Run, out: &mut Outcome) -> Result<()> {
    let cfg = run.cfg;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::ConfigValue("sweep needs a [sweep] section".into()))?;
    let family = make_family(&cfg.domain.id, run.spec.clone(), sweep.mode, &sweep.epsilons)?;
    let options = SweepOptions {
        h_target: cfg.mesh.h_target,
        degree: cfg.mesh.degree,
        alpha: 1.0,
        reestimate_largest: sweep.reestimate_largest,
    };
    let result = run_sweep(&family, &options)?;
    out.note(format!("{}: k = {}, Lambda = {:.4}", family.name, result.constants.k, result.constants.lambda));
    if let Some(c) = &result.largest_constants {
        out.note(format!("Lambda on the largest member: {:.4}", c.lambda));
    }
    for f in &result.fits {
        out.note(format!(
            "fit {} vs {}: slope {:.4} (95% [{:.4}, {:.4}]), r2 = {:.5}",
            f.y_column, f.x_column, f.fit.slope, f.fit.ci_low, f.fit.ci_high, f.fit.r_squared
        ));
    }
    out.write(&run.out, "sweep.csv", &result.to_csv()?)?;
    if run.svg {
        if let Some(f) = result.fits.first() {
            out.write(&run.out, "sweep.svg", &stability::svg_loglog(&result, f))?;
        }
    }
    for fail in &result.failures {
        out.note(format!("member eps = {} failed: {}", fail.epsilon, fail.message));
        out.numerical_failure = true;
    }
    if result.rows.is_empty() {
        return Ok(());
    }
    let verdicts = verify_theorems(&result)?;
    out.write(&run.out, "verdicts.csv", &stability::verdicts_csv(&verdicts)?)?;
    for v in &verdicts {
        let at = v.epsilon.map_or(String::new(), |e| format!(" eps = {e}"));
        match v.status {
            stability::Status::Pass | stability::Status::Fail => out.check(
                v.status == stability::Status::Pass,
                format!("{}{at}: {:.4e} vs {:.4e} ({})", v.check.as_str(), v.lhs, v.rhs, v.note),
            ),
            s => out.note(format!("{} {}{at}: {}", s.to_string().to_uppercase(), v.check.as_str(), v.note)),
        }
    }
    Ok(())
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::from_file(&cli.config)?;
    if let Some(c) = cfg.command {
        if c != cli.command && !(c == Command::Solve && cli.command == Command::Rigidity) {
            return Err(Error::ConfigValue(format!("config is for '{c}', command line asks for '{}'", cli.command)));
        }
    }
    let spec = cfg.domain_spec()?;
    if cli.command != Command::Poincare {
        spec.cone.require_convex()?;
    }
    if cli.command == Command::Rigidity && !spec.radius.is_constant() {
        return Err(Error::ConfigValue("rigidity needs a constant radius".into()));
    }
    if cli.threads == Some(0) {
        return Err(Error::InvalidArgument("--threads must be positive".into()));
    }
    let out_dir = cli.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let svg = cli.svg.map_or(cfg.output.svg, |t| t == Toggle::On);
    let run = Run { cfg: &cfg, spec, out: out_dir.clone(), svg };

    let mut outcome = Outcome::default();
    let mut go = || -> Result<()> {
        match cli.command {
            Command::Solve => cmd_solve(&run, false, &mut outcome),
            Command::Rigidity => cmd_solve(&run, true, &mut outcome),
            Command::Identity => cmd_identity(&run, &mut outcome),
            Command::Poincare => cmd_poincare(&run, &mut outcome),
            Command::Sweep => cmd_sweep(&run, &mut outcome),
        }
    };
    match cli.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(go)?,
        None => go()?,
    }

    let mut log = String::new();
    let _ = writeln!(log, "command: {}", cli.command);
    let _ = writeln!(log, "config: {}", cli.config.display());
    log.push_str(&outcome.log);
    let _ = writeln!(log, "failed checks: {}", outcome.failed_checks.len());
    std::fs::write(out_dir.join("run.log"), log)?;
    Ok(outcome)
}

/// Parses `args` (program name first), runs, prints a one-line diagnostic on
/// error, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let code = outcome.exit_code(cli.strict);
            if code == 3 {
                eprintln!("error: {} theorem check(s) failed", outcome.failed_checks.len());
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
