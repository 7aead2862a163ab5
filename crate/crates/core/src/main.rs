use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sthdg::geometry::vtk::write_slabs;
use sthdg::geometry::{mesh_metrics, BoundaryTag, PulseDeformation, SlabBuilder, SpatialMesh};
use sthdg::harness::{convergence_study, format_table, run, run_suite, RunConfig, StudyConfig};
use sthdg::Result;

#[derive(Parser)]
#[command(name = "sthdg", version, about = "Space-time HDG solver for advection-diffusion on deforming domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and print the error report as JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Simultaneous space-time refinement study.
    Convergence {
        #[arg(long, default_value = "rotating-pulse")]
        problem: String,
        /// Comma-separated polynomial degrees.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        degrees: Vec<usize>,
        /// Comma-separated `cells/slabs` levels.
        #[arg(long, value_delimiter = ',', default_value = "64/8,256/16,1024/32")]
        levels: Vec<String>,
        /// Comma-separated diffusion coefficients.
        #[arg(long, value_delimiter = ',', default_value = "1e-2")]
        nu: Vec<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Directory for the CSV tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = sthdg::analysis::DEFAULT_SEED)]
        seed: u64,
    },
    /// Build the deforming mesh and report element quality, optionally writing VTK.
    Mesh {
        #[arg(long, num_args = 2, value_names = ["NX", "NY"], default_values_t = [8, 8])]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        deform: f64,
        #[arg(long, default_value_t = 8)]
        slabs: usize,
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
}

fn parse_level(s: &str) -> Result<(usize, usize)> {
    let bad = || sthdg::Error::config("levels", format!("expected cells/slabs, got `{s}`"));
    let (a, b) = s.split_once('/').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config } => {
            let report = run(&RunConfig::read(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Convergence { problem, degrees, levels, nu, alpha, out } => {
            let levels = levels.iter().map(|l| parse_level(l)).collect::<Result<Vec<_>>>()?;
            let tables = convergence_study(&StudyConfig { problem, degrees, levels, nus: nu, alpha, out })?;
            print!("{}", format_table(&tables));
        }
        Command::Verify { suite, seed } => {
            let outcomes = run_suite(&suite, seed)?;
            for o in &outcomes {
                println!("{o}");
            }
            return Ok(outcomes.iter().all(|o| o.passed));
        }
        Command::Mesh { grid, deform, slabs, vtk } => {
            let mesh = SpatialMesh::uniform_grid(grid[0], grid[1], [-0.5, -0.5], [0.5, 0.5], |_| BoundaryTag::Neumann);
            let d = PulseDeformation::new(deform);
            let builder = SlabBuilder::new(&mesh, &d)?;
            let dt = 1.0 / slabs as f64;
            let all =
                (0..slabs).map(|k| builder.build(k, k as f64 * dt, (k + 1) as f64 * dt)).collect::<Result<Vec<_>>>()?;
            let metrics: Vec<_> = all.iter().flat_map(mesh_metrics).collect();
            let worst = metrics.iter().map(|m| m.ratio).fold(0.0, f64::max);
            let min_det = metrics.iter().map(|m| m.min_det).fold(f64::INFINITY, f64::min);
            let max_det = metrics.iter().map(|m| m.max_det).fold(0.0, f64::max);
            println!("elements: {}", metrics.len());
            println!("max h/rho: {worst:.4}");
            println!("normalized Jacobian range: [{min_det:.4}, {max_det:.4}]");
            if let Some(path) = vtk {
                let mut out = BufWriter::new(fs::File::create(&path)?);
                write_slabs(&mut out, &all, None)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
