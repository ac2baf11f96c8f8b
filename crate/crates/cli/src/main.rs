use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uavjam::check::{run_check, CheckSizes};
use uavjam::runner::{require_converged, run_plan, run_simulate, run_snapshot, RunOverrides};
use uavjam::scenario::load_scenario;
use uavjam::Error;

/// Plan jammer trajectories and beams against an eavesdropper while nulling a client.
#[derive(Parser)]
#[command(name = "uavjam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one plan over the scenario horizon and fly it.
    Plan(Common),
    /// Receding-horizon simulation against moving targets.
    Simulate(Common),
    /// Beampattern of the optimal beam at the initial geometry.
    Snapshot(Common),
    /// Run the randomized invariant suite for the scenario.
    Check(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    replan_interval: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    total: Option<f64>,
    #[arg(long)]
    resolution: Option<usize>,
}

impl Common {
    fn overrides(&self) -> RunOverrides {
        RunOverrides {
            dt: self.dt,
            replan_interval: self.replan_interval,
            horizon: self.horizon,
            total: self.total,
            resolution: self.resolution,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "validation" => 2,
        "input" | "geometry" => 3,
        "solver" => 4,
        "io" => 5,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Plan(c) => {
            let scenario = load_scenario(&c.scenario)?;
            let out = run_plan(&scenario, &c.out, &c.overrides())?;
            report(&out.summary, &c.out);
            require_converged(&out.summary)
        }
        Command::Simulate(c) => {
            let scenario = load_scenario(&c.scenario)?;
            let out = run_simulate(&scenario, &c.out, &c.overrides())?;
            report(&out.summary, &c.out);
            require_converged(&out.summary)
        }
        Command::Snapshot(c) => {
            let scenario = load_scenario(&c.scenario)?;
            let snap = run_snapshot(&scenario, &c.out, &c.overrides())?;
            println!(
                "snapshot: {} samples, theta_c {:.4}, theta_e {:.4}, theta_g {:.4} -> {}",
                snap.angles.len(),
                snap.theta_c,
                snap.theta_e,
                snap.theta_g,
                c.out.display()
            );
            Ok(())
        }
        Command::Check(c) => {
            let scenario = load_scenario(&c.scenario)?;
            let outcomes = run_check(&scenario, &CheckSizes::default())?;
            let mut failed = 0;
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                failed += usize::from(!o.passed);
            }
            if failed > 0 {
                return Err(Error::InvalidInput(format!("{failed} invariant checks failed")));
            }
            Ok(())
        }
    }
}

fn report(summary: &uavjam::SummaryReport, out: &std::path::Path) {
    println!(
        "converged {} ({} plans, {} failed); final power {:.2} dBm; cost {:.6}; max |u| {:.4}; client null {}",
        summary.converged,
        summary.replans,
        summary.failed_replans,
        summary.final_power_dbm,
        summary.total_cost,
        summary.max_control,
        if summary.client_null_ok { "ok" } else { "VIOLATED" }
    );
    for (th, t) in &summary.first_crossing {
        println!("  first reaches {th} dBm at {t:.2} s");
    }
    println!("outputs in {}", out.display());
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
