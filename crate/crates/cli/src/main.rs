use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spg2ssg::bounds::{bounds_report, check_alpha, sink_reach_lower_bound, worst_case_mc};
use spg2ssg::io::{parse, parse_unchecked, serialize, to_dot, IoError};
use spg2ssg::rational::{parse_exact, Exact};
use spg2ssg::reduction::{bar, reduce_game};
use spg2ssg::solvers::{
    oracle_values, separation_check, strategy_iteration, value_iteration, verify_transfer,
    ViOptions, DEFAULT_CAP,
};
use spg2ssg::{
    default_alpha, delta_min, max_denominator, reach_probability, AlphaSchedule, Game, Objective,
    Rational, VertexId,
};

#[derive(Parser)]
#[command(name = "spg2ssg", version, about = "Stochastic parity games to simple stochastic games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Oracle,
    Vi,
    Si,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file for structural problems.
    Validate { file: PathBuf },
    /// Write the gadget-reduced reachability game.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `default` or a path to an alpha file.
        #[arg(long, default_value = "default")]
        alpha: String,
        /// Add decimal hints next to the exact probabilities.
        #[arg(long)]
        approx: bool,
    },
    /// Compute game values.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "oracle")]
        method: MethodArg,
        /// Value iteration stopping tolerance.
        #[arg(long, default_value = "1e-12")]
        tol: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_iters: usize,
        /// Alpha schedule used when a parity game is reduced before solving.
        #[arg(long, default_value = "default")]
        alpha: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Print the quantities the reduction's correctness depends on.
    Bounds { file: PathBuf },
    /// Check that strategies optimal in the reduced game are optimal in the parity game.
    Verify {
        file: PathBuf,
        #[arg(long, default_value = "default")]
        alpha: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Check that distinct strategy-pair values are more than ε apart.
    Separation {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Build the worst-case chain and compare its reach probability with the bound.
    WorstCase {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the game as Graphviz DOT.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure mapped to an exit code.
enum Failure {
    Check(String),
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Game, Failure> {
    parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn rational(text: &str) -> Result<Rational, Failure> {
    parse_exact(text).map_err(|e| usage(format!("{text:?}: {e}")))
}

fn alpha_for(game: &Game, spec: &str) -> Result<AlphaSchedule, Failure> {
    if spec == "default" {
        let m = max_denominator(&game.arena);
        return Ok(default_alpha(game.arena.num_vertices(), &m));
    }
    let path = Path::new(spec);
    spg2ssg::io::parse_alpha(&read(path)?).map_err(|e| usage(format!("{spec}: {e}")))
}

fn print_values(game: &Game, values: &[Rational]) {
    for v in game.arena.vertex_ids() {
        println!("  {}: {}", game.arena.display_name(v), Exact(&values[v.0]));
    }
}

fn validate(file: &Path) -> Outcome {
    let text = read(file)?;
    let game = match parse_unchecked(&text) {
        Ok(g) => g,
        Err(IoError::Semantic(msgs)) => return Err(Failure::Check(msgs.join("\n"))),
        Err(e) => return Err(usage(e)),
    };
    let violations = game.validate();
    if violations.is_empty() {
        println!(
            "valid: {} vertices, {} edges",
            game.arena.num_vertices(),
            game.arena.num_edges()
        );
        Ok(())
    } else {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        Err(Failure::Check(format!("{} violation(s):\n{}", violations.len(), lines.join("\n"))))
    }
}

fn reduce_cmd(file: &Path, out: &Path, alpha: &str, approx: bool) -> Outcome {
    let game = load(file)?;
    let schedule = alpha_for(&game, alpha)?;
    let red = reduce_game(&game, &schedule).map_err(usage)?;
    write(out, &serialize(&red.ssg, approx))?;
    println!(
        "reduced game: {} vertices, {} edges, alpha {}",
        red.arena().num_vertices(),
        red.arena().num_edges(),
        schedule
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn solve(
    file: &Path,
    method: MethodArg,
    tol: &str,
    max_iters: usize,
    alpha: &str,
    cap: u128,
) -> Outcome {
    let game = load(file)?;
    if let MethodArg::Oracle = method {
        let r = oracle_values(&game, cap).map_err(usage)?;
        println!("method: oracle ({} strategy pairs)", r.num_pairs);
        println!("Eve strategy: {}", r.result.eve_strategy);
        println!("Adam strategy: {}", r.result.adam_strategy);
        println!("values:");
        print_values(&game, &r.sup_inf);
        return Ok(());
    }

    let (ssg, original) = match &game.objective {
        Objective::Reachability(_) => (game.clone(), None),
        Objective::Parity(_) => {
            let schedule = alpha_for(&game, alpha)?;
            if alpha == "default" && matches!(method, MethodArg::Vi) {
                eprintln!(
                    "warning: the default alpha schedule has tiny sink probabilities; \
                     floating-point value iteration converges slowly and cannot resolve the \
                     values to the separation the reduction needs"
                );
            }
            let red = reduce_game(&game, &schedule).map_err(usage)?;
            println!("solving the reduced game (alpha {schedule}); values shown at the original vertices");
            (red.ssg.clone(), Some(game.clone()))
        }
    };
    let result = match method {
        MethodArg::Si => strategy_iteration(&ssg).map_err(usage)?,
        MethodArg::Vi => {
            let tolerance = tol
                .parse::<f64>()
                .or_else(|_| rational(tol).map(|r| spg2ssg::rational::to_f64(&r)))
                .map_err(|_| usage(format!("bad tolerance {tol:?}")))?;
            let opts = ViOptions { tolerance, max_iters };
            match value_iteration(&ssg, opts) {
                Ok(r) => r,
                Err(spg2ssg::solvers::SolveError::DidNotConverge(partial)) => {
                    eprintln!("value iteration stopped after {} iterations", partial.iterations);
                    return Err(Failure::Check("value iteration did not converge".into()));
                }
                Err(e) => return Err(usage(e)),
            }
        }
        MethodArg::Oracle => unreachable!(),
    };
    let name = match method {
        MethodArg::Si => "si",
        _ => "vi",
    };
    println!("method: {name} ({} iterations)", result.iterations);
    if original.is_none() {
        println!("Eve strategy: {}", result.eve_strategy);
        println!("Adam strategy: {}", result.adam_strategy);
    }
    println!("values:");
    let shown = original.as_ref().unwrap_or(&ssg);
    for v in shown.arena.vertex_ids() {
        let w = if original.is_some() { bar(v) } else { v };
        let name = shown.arena.display_name(v);
        match result.values.exact() {
            Some(x) => println!("  {name}: {}", Exact(&x[w.0])),
            None => println!("  {name}: {:.12}", result.values.to_f64()[w.0]),
        }
    }
    Ok(())
}

fn bounds(file: &Path) -> Outcome {
    let game = load(file)?;
    let report = bounds_report(&game.arena).map_err(usage)?;
    println!("{report}");
    Ok(())
}

fn verify(file: &Path, alpha: &str, cap: u128) -> Outcome {
    let game = load(file)?;
    let schedule = alpha_for(&game, alpha)?;
    let p = game
        .objective
        .priorities()
        .ok_or_else(|| usage("verify takes a parity game"))?;
    if let (Ok(delta), Some(k)) = (delta_min(&game.arena), p.max_priority()) {
        let m = max_denominator(&game.arena);
        match check_alpha(&schedule, game.arena.num_vertices(), &m, &delta, k) {
            Ok(Ok(())) => println!("alpha {schedule} meets the sufficient conditions"),
            Ok(Err(v)) => println!("note: alpha {schedule} fails a sufficient condition: {v}"),
            Err(e) => println!("note: sufficient conditions not checked: {e}"),
        }
    }
    let r = verify_transfer(&game, &schedule, cap).map_err(usage)?;
    println!("parity values:");
    print_values(&game, &r.spg_value);
    println!(
        "reduced-game optimal strategies checked: {} Eve, {} Adam",
        r.eve_checked, r.adam_checked
    );
    if r.holds() {
        println!("transfer holds");
        return Ok(());
    }
    let mut msg = format!("transfer fails for {} strateg(ies):", r.failures.len());
    for f in &r.failures {
        msg.push_str(&format!("\n  {:?} {}", f.player, f.strategy));
        for v in game.arena.vertex_ids() {
            if f.spg_guarantee[v.0] != f.spg_value[v.0] {
                msg.push_str(&format!(
                    "\n    at {}: guarantees {} but the value is {}",
                    game.arena.display_name(v),
                    Exact(&f.spg_guarantee[v.0]),
                    Exact(&f.spg_value[v.0])
                ));
            }
        }
    }
    Err(Failure::Check(msg))
}

fn separation(file: &Path, cap: u128) -> Outcome {
    let game = load(file)?;
    let r = separation_check(&game, cap).map_err(usage)?;
    println!("epsilon = {}", Exact(&r.epsilon));
    match &r.min_gap {
        Some(g) => println!("smallest gap = {}", Exact(g)),
        None => println!("every vertex has a single strategy-pair value"),
    }
    if r.holds() {
        println!("separation holds over {} strategy pairs", r.pairs);
        return Ok(());
    }
    let lines: Vec<String> = r
        .violations
        .iter()
        .map(|(v, a, b)| format!("  {}: {} and {}", game.arena.display_name(*v), Exact(a), Exact(b)))
        .collect();
    Err(Failure::Check(format!("values closer than epsilon:\n{}", lines.join("\n"))))
}

fn worst_case(m: usize, s: &str, alpha: &str, out: Option<&Path>) -> Outcome {
    let (s, alpha) = (rational(s)?, rational(alpha)?);
    let (mc, lay) = worst_case_mc(m, &s, &alpha).map_err(usage)?;
    let target = [lay.good_sink()].into_iter().collect();
    let reach = reach_probability(&mc, &target).map_err(usage)?;
    let t = Rational::from_integer(1.into()) - &alpha - &s;
    let bound = sink_reach_lower_bound(m, &s, &t, &s, &alpha);
    println!("reach probability from v_1 = {}", Exact(&reach[lay.line(1)]));
    println!("closed-form bound = {}", Exact(&bound));
    if let Some(path) = out {
        let game = Game::reachability(mc.to_arena(), [VertexId(lay.good_sink())]);
        write(path, &serialize(&game, false))?;
        println!("wrote {}", path.display());
    }
    if reach[lay.line(1)] == bound {
        println!("equal");
        Ok(())
    } else {
        Err(Failure::Check("reach probability differs from the bound".into()))
    }
}

fn export_dot(file: &Path, out: Option<&Path>) -> Outcome {
    let game = load(file)?;
    let dot = to_dot(&game);
    match out {
        Some(path) => write(path, &dot),
        None => {
            print!("{dot}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Reduce { file, out, alpha, approx } => reduce_cmd(file, out, alpha, *approx),
        Command::Solve { file, method, tol, max_iters, alpha, cap } => {
            solve(file, *method, tol, *max_iters, alpha, *cap)
        }
        Command::Bounds { file } => bounds(file),
        Command::Verify { file, alpha, cap } => verify(file, alpha, *cap),
        Command::Separation { file, cap } => separation(file, *cap),
        Command::WorstCase { m, s, alpha, out } => worst_case(*m, s, alpha, out.as_deref()),
        Command::ExportDot { file, out } => export_dot(file, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
