use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skylink_cli::{parse_override, run_scenario, ScenarioSpec};

#[derive(Parser)]
#[command(name = "skylink", version, about = "UAV communication scenarios and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected path loss against altitude
    Fig3(Common),
    /// Sector antenna pattern cuts
    Fig5(Common),
    /// Propulsion power against speed
    Fig7(Common),
    /// Channel along a straight pass over a ground node
    Fig12(Common),
    /// Rate and its concave lower bounds
    Fig14(Common),
    /// Energy efficiency of circular flight against radius
    Fig16(Common),
    /// Cell association of a fixed UE at two altitudes
    Fig18(Common),
    /// Downlink sum-rate CDF by number of aerial UEs
    Fig19(Common),
    /// Joint trajectory and scheduling optimization
    Codesign(Common),
    /// Coverage altitude and UAV placement
    Placement(Common),
    /// Visiting order through waypoints
    Plan(Common),
}

#[derive(Args)]
struct Common {
    /// Preset file (path, name under $SKYLINK_DATA, or built-in name)
    #[arg(long, visible_aliases = ["airframe", "instance", "scenario"])]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for parallel sections; results do not depend on it
    #[arg(long)]
    threads: Option<usize>,
    /// Override a preset key
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, c) = match cli.command {
        Command::Fig3(c) => ("fig3", c),
        Command::Fig5(c) => ("fig5", c),
        Command::Fig7(c) => ("fig7", c),
        Command::Fig12(c) => ("fig12", c),
        Command::Fig14(c) => ("fig14", c),
        Command::Fig16(c) => ("fig16", c),
        Command::Fig18(c) => ("fig18", c),
        Command::Fig19(c) => ("fig19", c),
        Command::Codesign(c) => ("codesign", c),
        Command::Placement(c) => ("placement", c),
        Command::Plan(c) => ("plan", c),
    };
    if let Some(n) = c.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: usage: --threads must be a positive integer");
            return ExitCode::from(2);
        }
    }
    let spec = ScenarioSpec { command: name.to_string(), preset: c.preset, out: c.out, seed: c.seed, overrides: c.overrides };
    match run_scenario(&spec) {
        Ok(files) => {
            for f in files {
                println!("{}", spec.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
