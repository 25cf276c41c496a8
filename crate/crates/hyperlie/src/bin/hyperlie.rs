//! Verification and data-extraction CLI.
//!
//! Exit codes: 0 all checks pass, 1 at least one check fails (or a solver
//! error is recorded), 2 on configuration errors.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hyperlie::curvature;
use hyperlie::leaf::{self, LeafParams};
use hyperlie::nahm::{self, ExactKind};
use hyperlie::report::ReportDocument;
use hyperlie::su2::{phi, Triple};
use hyperlie::verify::{self, Status, VerifyConfig};

#[derive(Parser)]
#[command(name = "hyperlie", version, about = "su(2)^3 hyper-Lie Poisson verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named invariant suite and emit a report document
    Verify(VerifyArgs),
    /// Sample sectional curvatures over a leaf and emit CSV + summary JSON
    Curvature(CurvatureArgs),
    /// Integrate a closed-form initial condition and check the moduli isometry
    Nahm(NahmArgs),
    /// Rotate a configuration to the canonical leaf chart
    Canonicalize(CanonicalizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Poisson,
    Leaf,
    Curvature,
    Nahm,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Poisson => "poisson",
            Suite::Leaf => "leaf",
            Suite::Curvature => "curvature",
            Suite::Nahm => "nahm",
            Suite::All => "all",
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Finite-difference step (default: cbrt(machine eps) * scale)
    #[arg(long)]
    fd_step: Option<f64>,
    /// Integrator step
    #[arg(long, default_value_t = 5e-3)]
    step: f64,
    /// Trajectory truncation time
    #[arg(long = "T", default_value_t = 40.0)]
    t_total: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1e-6)]
    tol_jacobi: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol_casimir: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_sigma: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_def21: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol_metric_diag: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_metric_offdiag: f64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long)]
    q: f64,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0.2)]
    s_min: f64,
    #[arg(long, default_value_t = 2.0)]
    s_max: f64,
    #[arg(long, default_value_t = 9)]
    s_count: usize,
    /// Random 2-planes sampled per grid point
    #[arg(long, default_value_t = 100)]
    planes: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// CSV output path; with it set, the summary JSON goes to stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Regular,
    Nilpotent,
}

#[derive(Args)]
struct NahmArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    #[arg(long = "T", default_value_t = 40.0)]
    t_total: f64,
    #[arg(long, default_value_t = 5e-3)]
    step: f64,
    /// Trajectory CSV path; with it set, the isometry JSON goes to stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CanonicalizeArgs {
    /// Nine components: a1x a1y a1z a2x a2y a2z a3x a3y a3z
    #[arg(num_args = 9, allow_negative_numbers = true)]
    components: Vec<f64>,
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn init_threads() {
    if let Ok(v) = std::env::var("HYPERLIE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn write_or_print(out: &Option<std::path::PathBuf>, body: &str, then_stdout: &str) -> std::io::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, body)?;
            println!("{then_stdout}");
        }
        None => {
            print!("{body}");
            eprintln!("{then_stdout}");
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    if args.common.step <= 0.0 || args.common.t_total <= 0.0 {
        return config_error("step and T must be positive");
    }
    let cfg = VerifyConfig {
        seed: args.common.seed,
        fd_step: args.common.fd_step,
        step: args.common.step,
        t_total: args.common.t_total,
        tol_jacobi: args.tol_jacobi,
        tol_casimir: args.tol_casimir,
        tol_sigma: args.tol_sigma,
        tol_def21: args.tol_def21,
        tol_metric_diag: args.tol_metric_diag,
        tol_metric_offdiag: args.tol_metric_offdiag,
    };
    let checks = match verify::run_suite(args.suite.name(), &cfg) {
        Some(c) => c,
        None => return config_error("unknown suite"),
    };
    let mut err = std::io::stderr().lock();
    for c in &checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let _ = writeln!(
            err,
            "{tag} {:40} measured={:.3e} tol={:.3e}",
            c.name, c.measured, c.tolerance
        );
    }
    drop(err);
    let passed = verify::all_passed(&checks);
    let doc = ReportDocument::new(
        &format!("verify {}", args.suite.name()),
        serde_json::json!({ "suite": args.suite.name() }),
        &cfg,
        checks,
    );
    let body = doc.to_json();
    match &args.out {
        Some(path) => {
            if std::fs::write(path, &body).is_err() {
                return config_error("cannot write report file");
            }
        }
        None => println!("{body}"),
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_curvature(args: CurvatureArgs) -> ExitCode {
    if args.q < 0.0 || args.r < 0.0 {
        return config_error("q and r must be nonnegative");
    }
    if !(args.s_min > 0.0 && args.s_max >= args.s_min && args.s_count >= 1) {
        return config_error("need 0 < s-min <= s-max and s-count >= 1");
    }
    init_threads();
    let p = LeafParams { q: args.q, r: args.r };
    let grid: Vec<f64> = (0..args.s_count)
        .map(|i| {
            if args.s_count == 1 {
                args.s_min
            } else {
                // geometric spacing resolves the small-s divergence
                let f = i as f64 / (args.s_count - 1) as f64;
                args.s_min * (args.s_max / args.s_min).powf(f)
            }
        })
        .collect();
    use rayon::prelude::*;
    let per_s: Vec<_> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(i as u64));
            curvature::curvature_scan(&p, &[s], args.planes, &mut rng)
        })
        .collect();
    let mut rows = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for res in per_s {
        match res {
            Ok((mut r, summary)) => {
                lo = lo.min(summary.min);
                hi = hi.max(summary.max);
                rows.append(&mut r);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    let bound = if p.leaf_type(1e-12) == 1 {
        Some(12.0 / args.q.sqrt())
    } else {
        None
    };
    let summary = curvature::ScanSummary {
        min: lo,
        max: hi,
        bound,
        bound_respected: bound.map(|b| lo.abs().max(hi.abs()) <= b),
    };
    let mut csv = String::from("q,r,s,plane_id,kappa\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{:.17e}\n",
            row.q, row.r, row.s, row.plane_id, row.kappa
        ));
    }
    let json = serde_json::to_string_pretty(&summary).expect("summary");
    if write_or_print(&args.out, &csv, &json).is_err() {
        return config_error("cannot write output file");
    }
    ExitCode::SUCCESS
}

fn cmd_nahm(args: NahmArgs) -> ExitCode {
    if args.t0 <= 0.0 {
        return config_error("t0 must be positive (pole must sit right of the domain)");
    }
    if args.step <= 0.0 || args.t_total < 10.0 * args.step {
        return config_error("need step > 0 and T >= 10*step");
    }
    let kind = match args.kind {
        Kind::Regular => {
            if args.c <= 0.0 {
                return config_error("c must be positive for the regular family");
            }
            ExactKind::Regular { c: args.c, t0: args.t0 }
        }
        Kind::Nilpotent => ExactKind::Nilpotent { t0: args.t0 },
    };
    let sol = match nahm::exact_solution(kind, nalgebra::Matrix3::identity()) {
        Ok(s) => s,
        Err(e) => return config_error(&e.to_string()),
    };
    let tr = match nahm::integrate(&sol.at(0.0), args.t_total, args.step) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let rep = match nahm::isometry_check(&tr) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut csv = String::from("t,B1x,B1y,B1z,B2x,B2y,B2z,B3x,B3y,B3z\n");
    for (t, s) in tr.t.iter().zip(&tr.states) {
        csv.push_str(&format!(
            "{:.10},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            t, s.a1.x, s.a1.y, s.a1.z, s.a2.x, s.a2.y, s.a2.z, s.a3.x, s.a3.y, s.a3.z
        ));
    }
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "diag_errors": rep.diag_errors,
        "offdiag_max": rep.offdiag_max,
        "frame_table_error": rep.frame_table_error,
        "intertwine_ok": rep.intertwine_ok,
    }))
    .expect("isometry json");
    if write_or_print(&args.out, &csv, &json).is_err() {
        return config_error("cannot write output file");
    }
    ExitCode::SUCCESS
}

fn cmd_canonicalize(args: CanonicalizeArgs) -> ExitCode {
    if args.components.len() != 9 {
        return config_error("expected exactly 9 components");
    }
    let mut a = [0.0; 9];
    a.copy_from_slice(&args.components);
    let t = Triple::from_array(&a);
    let eps = hyperlie::su2::eps_phi(t.scale());
    if phi(&t).abs() <= eps {
        return config_error("configuration lies on the degenerate locus (phi ~ 0)");
    }
    match leaf::canonicalize_any(&t) {
        Ok((o, p, anti)) => {
            let o_rows: Vec<Vec<f64>> =
                (0..3).map(|i| (0..3).map(|j| o[(i, j)]).collect()).collect();
            let json = serde_json::to_string_pretty(&serde_json::json!({
                "O": o_rows,
                "q": p.q,
                "r": p.r,
                "type": p.leaf_type(1e-10),
                "anti_isomorphism": anti,
            }))
            .expect("canonicalize json");
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => config_error(&e.to_string()),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(a) => cmd_verify(a),
        Command::Curvature(a) => cmd_curvature(a),
        Command::Nahm(a) => cmd_nahm(a),
        Command::Canonicalize(a) => cmd_canonicalize(a),
    }
}
