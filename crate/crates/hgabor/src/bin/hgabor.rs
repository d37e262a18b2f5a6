//! Command-line front end: selftest | analyze | gram | bessel.
//!
//! Exit codes: 0 success, 1 usage/config error or failed selftest,
//! 2 hypothesis violated (classification suppressed), 3 resource guard.

use clap::{Parser, Subcommand};
use hgabor::config::{load_config, Config};
use hgabor::error::Error;
use hgabor::run::{run_analyze, run_bessel, run_gram, run_selftest, RunOutcome};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hgabor",
    about = "Gabor systems of operator fields on the dual of the Heisenberg group"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.json and CSV tables.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Random seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (1 gives bit-for-bit reproducible reports).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override resource guards.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the transform and oracle identity suites.
    Selftest,
    /// Weight table, orthogonality hypothesis and classification flags.
    Analyze,
    /// Brute-force Gram matrix, spectrum and weight-formula comparison.
    Gram,
    /// Bessel data B1, B2, the derived bound and empirical trials.
    Bessel,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(real_main(cli));
}

fn real_main(cli: Cli) -> i32 {
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return 1;
        }
    }
    let mut cfg = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        cfg.raw.insert("seed".into(), seed.to_string());
    }
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create output directory: {e}");
        return 1;
    }

    let outcome = match cli.command {
        Command::Selftest => run_selftest(&cfg, &cli.out),
        Command::Analyze => run_analyze(&cfg, &cli.out),
        Command::Gram => run_gram(&cfg, &cli.out),
        Command::Bessel => run_bessel(&cfg, &cli.out, cli.force),
    };
    match outcome {
        Ok(RunOutcome { report, exit_code }) => {
            print_summary(&report);
            exit_code
        }
        Err(Error::ResourceGuard(msg)) => {
            eprintln!("resource guard: {msg}");
            3
        }
        Err(Error::HypothesisViolated(msg)) => {
            eprintln!("hypothesis violated: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn print_summary(report: &hgabor::report::Report) {
    println!("command: {}", report.command);
    if let Some(st) = &report.selftest {
        for c in &st.checks {
            println!(
                "  {:<28} {}  residual {:.3e} (tol {:.1e})",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.residual,
                c.tolerance
            );
        }
        println!("selftest: {}", if st.all_pass { "PASS" } else { "FAIL" });
    }
    if let Some(a) = &report.analyze {
        println!(
            "  preset {}  a = {:.6}  b = {:.6}  ||G||^2 = {:.6e}",
            a.preset, a.effective_a, a.b, a.window_norm_sq
        );
        println!(
            "  orthogonality residual {:.3e} (tol {:.1e}) -> hypothesis {}",
            a.classification.orthogonality_residual,
            a.classification.orthogonality_tolerance,
            if a.classification.hypothesis_ok { "ok" } else { "VIOLATED" }
        );
        if let Some(f) = &a.classification.orthonormal {
            println!("  orthonormal: {} (residual {:.3e})", f.flag, f.residual);
        }
        if let Some(f) = &a.classification.parseval_sequence {
            println!("  parseval_sequence: {} (residual {:.3e})", f.flag, f.residual);
        }
        if let Some(f) = a.classification.frame_sequence {
            println!("  frame_sequence: {f}");
        }
        if let Some(f) = a.classification.riesz_sequence {
            println!("  riesz_sequence: {f}");
        }
        if let Some((lo, hi)) = a.classification.frame_bounds {
            println!("  frame bounds (A, B) = ({lo:.6}, {hi:.6})");
        }
    }
    if let Some(g) = &report.gram {
        println!(
            "  {} members, Hermitian residual {:.3e}, cross-family max {:.3e}",
            g.members, g.hermitian_residual, g.cross_family_max
        );
        println!(
            "  weight-formula mismatch {:.3e}, eigenvalues [{:.6e}, {:.6e}]",
            g.w_formula_worst_rel, g.eig_min, g.eig_max
        );
    }
    if let Some(b) = &report.bessel {
        println!(
            "  B1 = {:.6e}, B2 = {:.6e}, bound = {:.6e}",
            b.b1, b.b2, b.bound
        );
        println!(
            "  {} trials, ratio range [{:.3e}, {:.3e}], below bound: {}, \
             non-vacuity {:.1}%",
            b.trials,
            b.worst_ratio,
            b.best_ratio,
            b.all_below_bound,
            100.0 * b.nonvacuity_frac
        );
    }
    for w in &report.warnings {
        println!("  warning[{}]: {} ({:.3e})", w.code, w.message, w.value);
    }
}
