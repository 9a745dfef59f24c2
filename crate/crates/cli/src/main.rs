use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use markov_monoid::monoid::{markov_monoid, Origin};
use markov_monoid::numerics::{
    estimate_limit, fast_sequence_report, format_sig, LimitOptions, Mode,
};
use markov_monoid::reduction::{build_reduction, counterexample_automaton, verify_reduction};
use markov_monoid::{AutomatonFile, Error, OmegaExpression, ProbabilisticAutomaton};

#[derive(Parser)]
#[command(
    name = "markov-monoid",
    version,
    about = "Value-1 analysis for probabilistic automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Markov Monoid algorithm. Exit code 0 means YES, 1 means NO.
    Analyze {
        file: PathBuf,
        /// Sample the witness's realization and print the trajectory.
        #[arg(long)]
        verify: bool,
        #[arg(short, long, default_value = "polynomial")]
        mode: Mode,
        #[arg(short = 'n', long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(3..))]
        n_max: u64,
    },
    /// Print every Markov Monoid element with its witness expression.
    Monoid { file: PathBuf },
    /// Sample acceptance probabilities along a realization of an ω-expression.
    Simulate {
        file: PathBuf,
        #[arg(short, long)]
        expression: String,
        #[arg(short, long, default_value = "polynomial")]
        mode: Mode,
        #[arg(short = 'n', long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(3..))]
        n_max: u64,
        /// Sample the matrix distance to the limit instead (polynomial mode only).
        #[arg(long)]
        distance: bool,
        /// Convergence tolerance for limit matrices.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Emit one JSON object per sample instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Build the reduction automaton; with a word, also sample its acceptance.
    Reduce {
        file: PathBuf,
        #[arg(short, long)]
        word: Option<String>,
        #[arg(short = 'n', long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Add a fresh initial state first if the initial state has incoming edges.
        #[arg(long)]
        isolate_initial: bool,
    },
    /// Write the counterexample automaton for parameter x.
    Example {
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        x: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    No,
}

fn load(path: &Path) -> Result<ProbabilisticAutomaton, Error> {
    let text = fs::read_to_string(path)?;
    ProbabilisticAutomaton::from_json(&text)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn analyze(file: &Path, verify: bool, mode: Mode, n_max: u64) -> Result<Status, Error> {
    let a = load(file)?;
    let mm = markov_monoid(&a);
    let Some(w) = mm.find_value1_witness(&a) else {
        println!("NO");
        return Ok(Status::No);
    };
    println!("YES");
    println!("witness: {}", w.witness);
    println!("matrix: {}", w.matrix);
    if verify {
        print!(
            "{}",
            estimate_limit(&a, &w.witness, mode, n_max)?.render_table()
        );
    }
    Ok(Status::Ok)
}

fn monoid(file: &Path) -> Result<Status, Error> {
    let a = load(file)?;
    let mm = markov_monoid(&a);
    print!("{}", mm.dump());
    println!("elements: {}", mm.len());
    println!("letters: {}", mm.count_by_origin(Origin::Letter));
    println!("products: {}", mm.count_by_origin(Origin::Product));
    println!(
        "stabilizations: {}",
        mm.count_by_origin(Origin::Stabilization)
    );
    Ok(Status::Ok)
}

fn simulate(
    file: &Path,
    expression: &str,
    mode: Mode,
    n_max: u64,
    distance: bool,
    tol: f64,
    json: bool,
) -> Result<Status, Error> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let a = load(file)?;
    let e = OmegaExpression::parse(expression, a.alphabet())?;
    let report = if distance {
        if mode != Mode::Polynomial {
            return Err(Error::Domain("--distance needs polynomial mode".into()));
        }
        fast_sequence_report(
            &a,
            &e,
            n_max,
            LimitOptions {
                tol,
                ..LimitOptions::default()
            },
        )?
    } else {
        estimate_limit(&a, &e, mode, n_max)?
    };
    if json {
        print!("{}", report.to_json_lines());
    } else {
        print!("{}", report.render_table());
    }
    Ok(Status::Ok)
}

fn reduce(
    file: &Path,
    word: Option<&str>,
    n_max: u64,
    output: Option<&Path>,
    isolate_initial: bool,
) -> Result<Status, Error> {
    let mut a = load(file)?;
    if isolate_initial {
        a = a.with_isolated_initial()?;
    }
    let b = build_reduction(&a)?;
    let text = b.to_file(&a).to_json();
    let Some(word) = word else {
        emit(&text, output)?;
        return Ok(Status::Ok);
    };
    let Some(output) = output else {
        return Err(Error::Precondition(
            "with --word the sampling report goes to stdout; pass --output for the automaton"
                .into(),
        ));
    };
    let w = a.alphabet().parse_word(word)?;
    let report = verify_reduction(&a, &w, n_max)?;
    emit(&text, Some(output))?;
    println!("Pr_A(w) = {}", format_sig(report.x));
    println!("states of B: {}", b.automaton.num_states());
    println!(" n  k  N  matrix  formula  discrepancy");
    for s in &report.samples {
        println!(
            "{} {} {} {} {} {}",
            s.n,
            s.k,
            s.rounds,
            format_sig(s.matrix_probability),
            format_sig(s.formula_probability),
            format_sig(s.discrepancy())
        );
    }
    println!(
        "extrapolated limit: {}",
        format_sig(report.convergence.extrapolated_limit)
    );
    Ok(Status::Ok)
}

fn example(x: f64, output: Option<&Path>) -> Result<Status, Error> {
    let a = counterexample_automaton(x)?;
    emit(&AutomatonFile::from_automaton(&a).to_json(), output)?;
    Ok(Status::Ok)
}

fn hint(err: &Error) -> Option<String> {
    let Error::NotIdempotent {
        expression,
        repair_exponent,
    } = err
    else {
        return None;
    };
    let base = match expression.as_ref() {
        OmegaExpression::Product(..) => format!("({expression})"),
        _ => expression.to_string(),
    };
    Some(format!("hint: try ({base}^{repair_exponent})^w"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze {
            file,
            verify,
            mode,
            n_max,
        } => analyze(file, *verify, *mode, *n_max),
        Command::Monoid { file } => monoid(file),
        Command::Simulate {
            file,
            expression,
            mode,
            n_max,
            distance,
            tol,
            json,
        } => simulate(file, expression, *mode, *n_max, *distance, *tol, *json),
        Command::Reduce {
            file,
            word,
            n_max,
            output,
            isolate_initial,
        } => reduce(
            file,
            word.as_deref(),
            *n_max,
            output.as_deref(),
            *isolate_initial,
        ),
        Command::Example { x, output } => example(*x, output.as_deref()),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::No) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            if let Some(h) = hint(&err) {
                eprintln!("{h}");
            }
            ExitCode::from(2)
        }
    }
}
