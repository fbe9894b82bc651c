use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pkm::config::Config;
use pkm::jacobian::build_jacobian;
use pkm::kinematics::{inverse_kinematics, within_stroke};
use pkm::output::fmt_sig;
use pkm::parasitic::solve_loop_closure;
use pkm::report::{run_comparison, Emitter, StiffnessSpace};
use pkm::{Error, Result, Variant};

#[derive(Parser)]
#[command(name = "pkm", version, about = "Kinetostatic sweeps for the Z3 and A3 machining heads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Machine for single-machine commands (z3 or a3).
    #[arg(long, global = true)]
    machine: Option<Variant>,
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and SVG files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Grid points per tilt axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Platform height in mm (default: home height).
    #[arg(long, global = true, allow_negative_numbers = true)]
    z: Option<f64>,
}

#[derive(Args)]
struct Tilt {
    /// Tilt about x in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    psi: f64,
    /// Tilt about y in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Compatible pose and actuator coordinates for one tilt.
    Ik(Tilt),
    /// Wrench Jacobian, projector and condition number for one tilt.
    Jacobian(Tilt),
    /// Parasitic x, y and gamma over the tilt grid.
    ParasiticMap,
    /// Condition number of the homogenized Jacobian over the tilt grid.
    ConditionMap,
    /// Reachable tilt set at the configured height offsets.
    Workspace,
    /// Diagonal stiffness measures over the tilt grid.
    StiffnessMap {
        /// rotational (tilt grid) or parasitic (x/y displacement).
        #[arg(long, default_value = "rotational")]
        space: StiffnessSpace,
    },
    /// All sweeps for both machines plus summary.txt.
    Compare,
}

fn load(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(v) = common.machine {
        cfg.variant = v;
    }
    if let Some(n) = common.grid {
        if n == 0 {
            return Err(Error::InvalidParams("--grid must be positive".into()));
        }
        cfg.grid_n = n;
    }
    if common.z.is_some() {
        cfg.z = common.z;
    }
    Ok(cfg)
}

fn print_matrix(name: &str, rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) {
    println!("{name}:");
    for r in 0..rows {
        let row: Vec<String> = (0..cols).map(|c| fmt_sig(at(r, c))).collect();
        println!("  {}", row.join(", "));
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load(&cli.common)?;
    let params = cfg.params(cfg.variant)?;
    let z = cfg.height()?;
    match cli.command {
        Command::Ik(t) => {
            let cp = solve_loop_closure(&params, t.psi.to_radians(), t.theta.to_radians(), z)?;
            let limbs = inverse_kinematics(&params, &cp.pose)?;
            println!("machine = {}", params.variant);
            println!("x_mm = {}", fmt_sig(cp.parasitic.x));
            println!("y_mm = {}", fmt_sig(cp.parasitic.y));
            println!("z_mm = {}", fmt_sig(cp.z));
            println!("gamma_rad = {}", fmt_sig(cp.parasitic.gamma));
            for l in &limbs {
                println!("q{}_mm = {}", l.index + 1, fmt_sig(l.actuated_length));
            }
            println!("within_stroke = {}", within_stroke(&params, &limbs));
        }
        Command::Jacobian(t) => {
            let cp = solve_loop_closure(&params, t.psi.to_radians(), t.theta.to_radians(), z)?;
            let set = build_jacobian(&params, &inverse_kinematics(&params, &cp.pose)?)?;
            println!("machine = {}", params.variant);
            println!("moment_convention = {}", set.moment_convention);
            print_matrix("G", 6, 6, |r, c| set.g[(r, c)]);
            print_matrix("P", 6, 6, |r, c| set.projector[(r, c)]);
            print_matrix("J_hom", 3, 3, |r, c| set.j_hom[(r, c)]);
            println!("kappa = {}", fmt_sig(set.kappa));
        }
        Command::Compare => {
            let report = run_comparison(&cfg, &cli.common.out)?;
            print!("{}", report.to_text());
        }
        single => {
            std::fs::create_dir_all(&cli.common.out)?;
            let spec = cfg.grid()?;
            let mut emit = Emitter::new(&cli.common.out, params.variant.short_name());
            match single {
                Command::ParasiticMap => {
                    emit.parasitic(&params, &spec, z)?;
                }
                Command::ConditionMap => {
                    emit.condition(&params, &spec, z)?;
                }
                Command::Workspace => {
                    for s in emit.workspace(&params, &spec, z, &cfg.workspace_dz, cfg.kappa_min_inv)? {
                        println!("z = {} mm: {} cells, area {} rad^2", fmt_sig(s.z), s.cell_count, fmt_sig(s.area));
                    }
                }
                Command::StiffnessMap { space } => {
                    emit.stiffness(&params, &spec, z, &[space])?;
                }
                _ => unreachable!(),
            }
            for f in &emit.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pkm: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
