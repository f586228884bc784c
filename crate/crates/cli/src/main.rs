use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lnlab::scene::{GderOrigin, Scene};
use lnlab::{catalog, parse_scene, render, run, Format, RunOptions};
use lnlab_core::forms::VVForm;
use lnlab_core::lifts::{cotangent_lift, linearize, tangent_lift, LinVVForm};
use lnlab_core::Limits;

#[derive(Parser)]
#[command(
    name = "lnlab",
    version,
    about = "Verify generalized derivations, Lie bialgebroids and PN structures"
)]
struct Cli {
    /// Bound on the total degree of any intermediate monomial.
    #[arg(long, global = true)]
    max_degree: Option<u32>,
    /// Seed for randomized checks, overriding the scene's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scene file.
    Check {
        scene: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Print the linear vector-valued form of a gder or endomorphism.
    Lift {
        scene: PathBuf,
        object: String,
        /// Lift an endomorphism to T*M instead of TM.
        #[arg(long)]
        cotangent: bool,
    },
    /// The built-in example catalog.
    Examples {
        #[command(subcommand)]
        action: ExampleAction,
    },
}

#[derive(Subcommand)]
enum ExampleAction {
    List,
    Show {
        name: String,
    },
    Run {
        name: String,
        #[arg(long, default_value = "text")]
        format: Format,
    },
}

const INPUT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut limits = Limits::default();
    if let Some(d) = cli.max_degree {
        limits.max_degree = d;
    }
    let opts = RunOptions {
        limits,
        seed: cli.seed,
        ..RunOptions::default()
    };
    match cli.command {
        Command::Check {
            scene,
            report,
            format,
        } => {
            let Some(s) = load(&scene, limits) else {
                return ExitCode::from(INPUT_ERROR);
            };
            execute(&s, &opts, format, report.as_deref())
        }
        Command::Lift {
            scene,
            object,
            cotangent,
        } => {
            let Some(s) = load(&scene, limits) else {
                return ExitCode::from(INPUT_ERROR);
            };
            lift(&s, &object, cotangent, limits)
        }
        Command::Examples { action } => match action {
            ExampleAction::List => {
                for n in catalog::names() {
                    println!("{n}");
                }
                ExitCode::SUCCESS
            }
            ExampleAction::Show { name } => match catalog::get(&name) {
                Some(src) => {
                    print!("{src}");
                    ExitCode::SUCCESS
                }
                None => unknown_example(&name),
            },
            ExampleAction::Run { name, format } => match catalog::get(&name) {
                Some(src) => match parse_scene(src, limits) {
                    Ok(s) => execute(&s, &opts, format, None),
                    Err(e) => {
                        eprintln!("error: {name}: {e}");
                        ExitCode::from(INPUT_ERROR)
                    }
                },
                None => unknown_example(&name),
            },
        },
    }
}

fn unknown_example(name: &str) -> ExitCode {
    eprintln!("error: unknown example `{name}`; try `lnlab examples list`");
    ExitCode::from(INPUT_ERROR)
}

fn load(path: &Path, limits: Limits) -> Option<Scene> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return None;
        }
    };
    match parse_scene(&text, limits) {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!(
                "error: {}:{}:{}: {}",
                path.display(),
                e.line,
                e.column,
                e.message
            );
            None
        }
    }
}

fn execute(scene: &Scene, opts: &RunOptions, format: Format, out: Option<&Path>) -> ExitCode {
    let report = run(scene, opts);
    let text = render(&report, format);
    print!("{text}");
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(INPUT_ERROR);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn lift(scene: &Scene, object: &str, cotangent: bool, limits: Limits) -> ExitCode {
    let built = lnlab_core::poly::with_limits(limits, || -> Result<LinVVForm, String> {
        if let Some(g) = scene.gders.get(object) {
            return linearize(&g.der).map_err(|e| e.to_string());
        }
        if let Some(r) = scene.endomorphisms.get(object) {
            let lifted = if cotangent {
                cotangent_lift(scene.chart.clone(), r)
            } else {
                tangent_lift(scene.chart.clone(), r)
            };
            return lifted.map_err(|e| e.to_string());
        }
        Err(format!(
            "`{object}` is neither a gder nor an endomorphism of the scene"
        ))
    });
    let k = match built {
        Ok(k) => k,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(INPUT_ERROR);
        }
    };
    if let Some(g) = scene.gders.get(object) {
        if let GderOrigin::Tangent(_) | GderOrigin::Cotangent(_) = g.origin {
            println!(
                "# lift of {object} ({})",
                if matches!(g.origin, GderOrigin::Tangent(_)) {
                    "D^{r,T}"
                } else {
                    "D^{r,T*}"
                }
            );
        } else {
            println!("# lift of {object}");
        }
    } else {
        println!(
            "# {} lift of {object}",
            if cotangent { "cotangent" } else { "tangent" }
        );
    }
    print_table(&k.form, k.total.chart().names());
    ExitCode::SUCCESS
}

fn print_table(form: &VVForm, names: &[String]) {
    println!("chart\t{}", names.join(" "));
    println!("value\tbasis\tcoefficient");
    for (b, comp) in form.comps().iter().enumerate() {
        for (idx, c) in comp.terms() {
            let basis: Vec<String> = idx.iter().map(|i| format!("d{}", names[*i])).collect();
            let basis = if basis.is_empty() {
                "1".to_string()
            } else {
                basis.join("^")
            };
            println!("d/d{}\t{basis}\t{}", names[b], c.render(names));
        }
    }
}
