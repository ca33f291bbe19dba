use std::process::ExitCode;

use besseltrans::cli::pipeline::{prepare, run_solve};
use besseltrans::cli::report::{basis_csv, eigenvalues_csv, kernel_csv, solve_report_json};
use besseltrans::cli::verify::verify_suite;
use besseltrans::cli::ProblemConfig;
use besseltrans::Error;

const USAGE: &str = "\
besseltrans — eigenvalues of perturbed Bessel equations via transmutation-kernel approximation

USAGE:
    besseltrans solve  --config <path> [--out <csv>] [--report <json>]
    besseltrans verify
    besseltrans kernel --config <path> --resolution <n> --out <csv>
    besseltrans basis  --config <path> --out <csv>

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
The BESSELTRANS_THREADS environment variable caps scan concurrency.
";

struct Args {
    config: Option<String>,
    out: Option<String>,
    report: Option<String>,
    resolution: Option<usize>,
}

fn parse_flags(args: &[String]) -> Result<Args, String> {
    let mut parsed = Args { config: None, out: None, report: None, resolution: None };
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut take = |name: &str| -> Result<String, String> {
            it.next().cloned().ok_or_else(|| format!("{name} needs a value"))
        };
        match flag.as_str() {
            "--config" => parsed.config = Some(take("--config")?),
            "--out" => parsed.out = Some(take("--out")?),
            "--report" => parsed.report = Some(take("--report")?),
            "--resolution" => {
                let v = take("--resolution")?;
                parsed.resolution =
                    Some(v.parse().map_err(|_| format!("bad --resolution '{v}'"))?);
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(parsed)
}

fn load_config(args: &Args) -> Result<ProblemConfig, Error> {
    let path = args
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    ProblemConfig::load(path)
}

fn cmd_solve(args: Args) -> Result<(), Error> {
    let cfg = load_config(&args)?;
    let out = run_solve(&cfg)?;
    let csv = eigenvalues_csv(&out);
    let report = solve_report_json(&out)?;
    let csv_path = args.out.or_else(|| cfg.outputs.eigenvalues_csv.clone());
    let report_path = args.report.or_else(|| cfg.outputs.report_json.clone());
    match &csv_path {
        Some(p) => std::fs::write(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &report_path {
        std::fs::write(p, &report)?;
    }
    eprintln!(
        "solved: {} eigenvalues, N = {}, eps = {:.3e}{}",
        out.eigen.eigenvalues.len(),
        out.approx.n,
        out.approx.epsilon,
        if out.approx.conditioning_limited { " (conditioning-limited)" } else { "" }
    );
    Ok(())
}

fn cmd_verify() -> Result<bool, Error> {
    let report = verify_suite()?;
    print!("{}", report.render_table());
    Ok(report.all_pass())
}

/// Run the pipeline through the approximation step only.
fn prepared_output(cfg: &ProblemConfig) -> Result<besseltrans::cli::pipeline::SolveOutput, Error> {
    let (problem, basis, approx, timings) = prepare(cfg)?;
    let evaluator = besseltrans::solver::SolutionEvaluator::build(&problem, &basis, &approx)?;
    Ok(besseltrans::cli::pipeline::SolveOutput {
        problem,
        basis,
        approx,
        evaluator,
        eigen: besseltrans::solver::EigenResult { eigenvalues: Vec::new(), char_values: Vec::new() },
        timings,
    })
}

fn cmd_kernel(args: Args) -> Result<(), Error> {
    let cfg = load_config(&args)?;
    let resolution = args
        .resolution
        .ok_or_else(|| Error::Config("--resolution <n> is required".into()))?;
    if resolution < 2 {
        return Err(Error::Config("resolution must be at least 2".into()));
    }
    let out_path = args
        .out
        .clone()
        .ok_or_else(|| Error::Config("--out <csv> is required".into()))?;
    let output = prepared_output(&cfg)?;
    std::fs::write(&out_path, kernel_csv(&output, resolution)?)?;
    Ok(())
}

fn cmd_basis(args: Args) -> Result<(), Error> {
    let cfg = load_config(&args)?;
    let out_path = args
        .out
        .clone()
        .ok_or_else(|| Error::Config("--out <csv> is required".into()))?;
    let output = prepared_output(&cfg)?;
    std::fs::write(&out_path, basis_csv(&output, 501)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = argv.first().map(String::as_str) else {
        eprint!("{USAGE}");
        return ExitCode::from(1);
    };
    let rest = &argv[1..];
    let flags = match parse_flags(rest) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };
    let outcome: Result<bool, Error> = match command {
        "solve" => cmd_solve(flags).map(|_| true),
        "verify" => cmd_verify(),
        "kernel" => cmd_kernel(flags).map(|_| true),
        "basis" => cmd_basis(flags).map(|_| true),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => {
            eprintln!("error: unknown command '{other}'");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2), // verification failures
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
