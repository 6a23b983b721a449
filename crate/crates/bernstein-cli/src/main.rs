//! Command-line driver for the state constructions and reports.
//!
//! Exit codes: 0 on success, 1 on a verdict failure (e.g. `--expect-pass`
//! with a failing certificate), 2 on usage or input errors. All results go
//! to standard output; diagnostics go to standard error.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use bernstein_core::constructions::{
    general_bernstein, ghz, inhomogeneous_bernstein3, special_bernstein, TermPhaseVector,
};
use bernstein_core::io::{state_from_json, state_to_json};
use bernstein_core::mermin::{find_contradictions, relation_table};
use bernstein_core::phase_torus::{orbit_membership_with_tol, period_lattice, MEMBERSHIP_TOL};
use bernstein_core::qstate::{Axis, Sign, StateVector};
use bernstein_core::reductions::{fragility_report_with_tol, EIG_TOL, RESIDUAL_TOL};
use bernstein_core::stats::{
    bernstein_certificate_with_tol, kwise_independence_report_with_tol, IndependenceReport,
    INDEPENDENCE_TOL,
};

#[derive(Parser)]
#[command(name = "bernstein", version, about = "Builds N-particle Bernstein/GHZ states and reports their measurement statistics, separability, phase-orbit geometry, and Mermin relations")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for randomized constructions
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Probability-deviation tolerance
    #[arg(long, global = true)]
    prob_tol: Option<f64>,
    /// Eigenvalue-negativity tolerance
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    /// Decomposition-residual tolerance
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and emit it in the JSON state format
    Construct {
        #[command(subcommand)]
        family: Family,
    },
    /// Independence report plus the Bernstein certificate
    Stats {
        #[arg(long)]
        state: PathBuf,
        /// Per-particle axes, e.g. zzzz (default all z)
        #[arg(long)]
        axes: Option<String>,
        /// Largest subset size to check (default N)
        #[arg(long)]
        max_k: Option<usize>,
        /// Exit 1 unless the state passes the Bernstein certificate
        #[arg(long)]
        expect_pass: bool,
    },
    /// k-wise independence report
    Independence {
        #[arg(long)]
        state: PathBuf,
        /// Per-particle axes, e.g. zzzz
        #[arg(long)]
        axes: String,
        #[arg(long)]
        max_k: usize,
    },
    /// Per-particle trace-out separability analysis
    Fragility {
        #[arg(long)]
        state: PathBuf,
    },
    /// Orbit membership of a term-phase vector (angles in units of pi)
    Orbit {
        #[arg(long)]
        n: usize,
        /// 2^(N-1) phases in units of pi: comma list or JSON array
        #[arg(long)]
        phases: String,
        /// Membership residual tolerance (radians)
        #[arg(long, default_value_t = MEMBERSHIP_TOL)]
        membership_tol: f64,
    },
    /// Mermin relation table and contradiction sets
    Mermin {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Relative sign of the GHZ state the table is measured on
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        ghz_sign: i8,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Special Bernstein state B^N
    Bernstein {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bernstein state with per-term phases
    GeneralBernstein {
        #[arg(long)]
        n: usize,
        /// 2^(N-1) phases in units of pi: comma list or JSON array
        #[arg(long, conflicts_with = "random_phases")]
        phases: Option<String>,
        /// Draw the phases from the seeded generator instead
        #[arg(long)]
        random_phases: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// GHZ state in the z or x eigenbasis
    Ghz {
        #[arg(long)]
        n: usize,
        /// x or z
        #[arg(long, default_value = "z")]
        axis: String,
        /// Relative sign between the two branches
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        sign: i8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inhomogeneous three-particle family B_q
    Inhomogeneous {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Optional config file named by BERNSTEIN_CONFIG; flags override it.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    probability_tol: Option<f64>,
    eigenvalue_tol: Option<f64>,
    residual_tol: Option<f64>,
    output_format: Option<String>,
    seed: Option<u64>,
}

struct Config {
    format: OutputFormat,
    seed: u64,
    prob_tol: f64,
    eig_tol: f64,
    residual_tol: f64,
}

fn resolve_config(cli: &Cli) -> Result<Config, String> {
    let file = match std::env::var("BERNSTEIN_CONFIG") {
        Ok(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("config file {path}: {e}"))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| format!("config file {path}: {e}"))?
        }
        Err(_) => FileConfig::default(),
    };
    let format = cli.format.unwrap_or(match file.output_format.as_deref() {
        Some("table") => OutputFormat::Table,
        Some("json") | None => OutputFormat::Json,
        Some(other) => return Err(format!("config output_format {other:?} not recognized")),
    });
    let config = Config {
        format,
        seed: cli.seed.or(file.seed).unwrap_or(0),
        prob_tol: cli.prob_tol.or(file.probability_tol).unwrap_or(INDEPENDENCE_TOL),
        eig_tol: cli.eig_tol.or(file.eigenvalue_tol).unwrap_or(EIG_TOL),
        residual_tol: cli.residual_tol.or(file.residual_tol).unwrap_or(RESIDUAL_TOL),
    };
    for (name, value) in [
        ("prob-tol", config.prob_tol),
        ("eig-tol", config.eig_tol),
        ("residual-tol", config.residual_tol),
    ] {
        if value.is_nan() || value <= 0.0 {
            return Err(format!("--{name} must be positive, got {value}"));
        }
    }
    Ok(config)
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let config = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(cli, &config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: Cli, config: &Config) -> Result<i32, String> {
    match cli.command {
        Command::Construct { family } => construct(family, config),
        Command::Stats {
            state,
            axes,
            max_k,
            expect_pass,
        } => stats(&state, axes.as_deref(), max_k, expect_pass, config),
        Command::Independence { state, axes, max_k } => {
            independence(&state, &axes, max_k, config)
        }
        Command::Fragility { state } => fragility(&state, config),
        Command::Orbit {
            n,
            phases,
            membership_tol,
        } => orbit(n, &phases, membership_tol, config),
        Command::Mermin {
            n,
            max_size,
            ghz_sign,
        } => mermin(n, max_size, ghz_sign, config),
    }
}

fn construct(family: Family, config: &Config) -> Result<i32, String> {
    let (state, out) = match family {
        Family::Bernstein { n, out } => (special_bernstein(n).map_err(stringify)?, out),
        Family::GeneralBernstein {
            n,
            phases,
            random_phases,
            out,
        } => {
            if !(3..=16).contains(&n) {
                return Err(format!("--n {n} outside 3..=16"));
            }
            let term_count = 1usize << (n - 1);
            let t = if random_phases {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                TermPhaseVector::new(
                    (0..term_count)
                        .map(|_| rng.random_range(0.0..2.0 * PI))
                        .collect(),
                )
            } else {
                let list = phases
                    .as_deref()
                    .ok_or("general-bernstein needs --phases or --random-phases")?;
                TermPhaseVector::new(parse_phase_list(list)?)
            };
            (general_bernstein(n, &t).map_err(stringify)?, out)
        }
        Family::Ghz { n, axis, sign, out } => {
            let axis = match axis.as_str() {
                "x" | "X" => Axis::X,
                "z" | "Z" => Axis::Z,
                other => return Err(format!("--axis {other:?}: expected x or z")),
            };
            (ghz(n, axis, parse_sign(sign)?).map_err(stringify)?, out)
        }
        Family::Inhomogeneous { q, out } => {
            (inhomogeneous_bernstein3(q).map_err(stringify)?, out)
        }
    };
    let json = state_to_json(&state);
    match out {
        Some(path) => {
            std::fs::write(&path, json.as_bytes())
                .map_err(|e| format!("{}: {e}", path.display()))?;
        }
        None => match config.format {
            OutputFormat::Json => println!("{json}"),
            OutputFormat::Table => println!("{state}"),
        },
    }
    Ok(0)
}

fn stats(
    path: &Path,
    axes: Option<&str>,
    max_k: Option<usize>,
    expect_pass: bool,
    config: &Config,
) -> Result<i32, String> {
    let state = load_state(path)?;
    let n = state.n_particles();
    let axes = parse_axes(axes.unwrap_or(&"z".repeat(n)), n)?;
    let max_k = max_k.unwrap_or(n);
    let report = kwise_independence_report_with_tol(&state, &axes, max_k, config.prob_tol)
        .map_err(stringify)?;
    let certificate = if n >= 3 {
        Some(
            bernstein_certificate_with_tol(&state, config.prob_tol, config.prob_tol)
                .map_err(stringify)?,
        )
    } else {
        None
    };

    let mut body = report_json(&report, n);
    body["certificate"] = match &certificate {
        Some(c) => json!({
            "is_bernstein": c.is_bernstein,
            "reason": c.reason,
        }),
        None => serde_json::Value::Null,
    };
    match config.format {
        OutputFormat::Json => print_json(&body),
        OutputFormat::Table => {
            print_report_table(&report, n);
            match &certificate {
                Some(c) if c.is_bernstein => println!("certificate: pass"),
                Some(c) => println!("certificate: fail ({:?})", c.reason.unwrap()),
                None => println!("certificate: n/a (fewer than 3 particles)"),
            }
        }
    }
    if expect_pass && !certificate.map(|c| c.is_bernstein).unwrap_or(false) {
        return Ok(1);
    }
    Ok(0)
}

fn independence(path: &Path, axes: &str, max_k: usize, config: &Config) -> Result<i32, String> {
    let state = load_state(path)?;
    let n = state.n_particles();
    let axes = parse_axes(axes, n)?;
    let report = kwise_independence_report_with_tol(&state, &axes, max_k, config.prob_tol)
        .map_err(stringify)?;
    match config.format {
        OutputFormat::Json => print_json(&report_json(&report, n)),
        OutputFormat::Table => print_report_table(&report, n),
    }
    Ok(0)
}

fn fragility(path: &Path, config: &Config) -> Result<i32, String> {
    let state = load_state(path)?;
    let report = fragility_report_with_tol(&state, config.eig_tol, config.residual_tol)
        .map_err(stringify)?;
    match config.format {
        OutputFormat::Json => {
            print_json(&serde_json::to_value(&report).expect("report serializes"))
        }
        OutputFormat::Table => {
            println!("{:<8} {:<14} {:>14} {:>14}", "traced", "verdict", "residual", "worst ppt");
            for r in &report.per_particle {
                let worst = r
                    .splits
                    .iter()
                    .map(|s| s.min_eigenvalue)
                    .fold(f64::INFINITY, f64::min);
                println!(
                    "{:<8} {:<14} {:>14} {:>14.3e}",
                    r.traced,
                    format!("{:?}", r.verdict).to_lowercase(),
                    r.decomposition_residual
                        .map(|x| format!("{x:.3e}"))
                        .unwrap_or_else(|| "-".into()),
                    worst
                );
            }
        }
    }
    Ok(0)
}

fn orbit(n: usize, phases: &str, membership_tol: f64, config: &Config) -> Result<i32, String> {
    let t = TermPhaseVector::new(parse_phase_list(phases)?);
    let membership = orbit_membership_with_tol(n, &t, membership_tol).map_err(stringify)?;
    let lattice = period_lattice(n).map_err(stringify)?;
    let lattice_pi: Vec<Vec<f64>> = lattice
        .generators()
        .iter()
        .map(|g| {
            g.iter()
                .map(|r| *r.numer() as f64 / *r.denom() as f64)
                .collect()
        })
        .collect();
    match config.format {
        OutputFormat::Json => print_json(&json!({
            "membership": {
                "reachable": membership.reachable,
                "deltas_pi": membership
                    .deltas
                    .as_ref()
                    .map(|d| d.iter().map(|x| x / PI).collect::<Vec<_>>()),
                "constant_pi": membership.constant / PI,
                "max_residual_mod_2pi": membership.max_residual_mod_2pi,
            },
            "period_lattice_pi": lattice_pi,
        })),
        OutputFormat::Table => {
            println!("reachable: {}", membership.reachable);
            println!("max residual (mod 2pi): {:.3e}", membership.max_residual_mod_2pi);
            if let Some(d) = &membership.deltas {
                let rendered: Vec<String> = d.iter().map(|x| format!("{:+.6}", x / PI)).collect();
                println!("deltas (units of pi): [{}]", rendered.join(", "));
            }
            println!("period lattice (units of pi):");
            for g in &lattice_pi {
                let rendered: Vec<String> = g.iter().map(|x| format!("{x:+.3}")).collect();
                println!("  [{}]", rendered.join(", "));
            }
        }
    }
    Ok(0)
}

fn mermin(n: usize, max_size: usize, ghz_sign: i8, config: &Config) -> Result<i32, String> {
    let table = relation_table(n, parse_sign(ghz_sign)?).map_err(stringify)?;
    let contradictions = find_contradictions(n, max_size).map_err(stringify)?;
    match config.format {
        OutputFormat::Json => print_json(&json!({
            "relations": table.entries,
            "all_match": table.all_match,
            "contradictions": contradictions,
            "contradiction_count": contradictions.len(),
        })),
        OutputFormat::Table => {
            println!("{:<10} {:>10} {:>10}", "axes", "predicted", "measured");
            for e in &table.entries {
                println!("{:<10} {:>10} {:>10.1}", e.axes, e.predicted, e.measured);
            }
            println!("all_match: {}", table.all_match);
            println!("contradiction sets (size <= {max_size}): {}", contradictions.len());
            for set in &contradictions {
                println!("  {:?}", set.relation_indices);
            }
        }
    }
    Ok(0)
}

fn load_state(path: &Path) -> Result<StateVector, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let loaded = state_from_json(&text).map_err(stringify)?;
    if loaded.renormalized {
        eprintln!(
            "warning: {} was renormalized by more than 1e-9",
            path.display()
        );
    }
    Ok(loaded.state)
}

fn parse_axes(s: &str, n: usize) -> Result<Vec<Axis>, String> {
    let axes: Vec<Axis> = s
        .chars()
        .map(Axis::from_char)
        .collect::<Result<_, _>>()
        .map_err(stringify)?;
    if axes.len() != n {
        return Err(format!(
            "--axes {s:?} has {} entries, state has {n} particles",
            axes.len()
        ));
    }
    Ok(axes)
}

/// Comma list or JSON array of angles in units of pi.
fn parse_phase_list(s: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = if s.trim_start().starts_with('[') {
        serde_json::from_str(s).map_err(|e| format!("--phases: {e}"))?
    } else {
        s.split(',')
            .map(|part| part.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("--phases: {e}"))?
    };
    Ok(values.into_iter().map(|v| v * PI).collect())
}

fn parse_sign(sign: i8) -> Result<Sign, String> {
    match sign {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(format!("sign must be 1 or -1, got {other}")),
    }
}

fn report_json(report: &IndependenceReport, n: usize) -> serde_json::Value {
    json!({
        "max_checked": report.max_checked,
        "per_size": report
            .per_size
            .iter()
            .map(|v| {
                json!({
                    "size": v.size,
                    "independent": v.independent,
                    "worst_deviation": v.worst_deviation,
                    "witness": v.witness.as_ref().map(|w| w.render(n)),
                })
            })
            .collect::<Vec<_>>(),
        "n_wise": {
            "joint": report.n_wise_joint,
            "product": report.n_wise_product,
        },
    })
}

fn print_report_table(report: &IndependenceReport, n: usize) {
    println!("{:<6} {:<12} {:>16} {:<12}", "size", "independent", "worst dev", "witness");
    for v in &report.per_size {
        println!(
            "{:<6} {:<12} {:>16.3e} {:<12}",
            v.size,
            v.independent,
            v.worst_deviation,
            v.witness.as_ref().map(|w| w.render(n)).unwrap_or_else(|| "-".into())
        );
    }
    println!(
        "n-wise joint {:.6e} vs product of singles {:.6e}",
        report.n_wise_joint, report.n_wise_product
    );
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("value serializes"));
}

fn stringify<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}
