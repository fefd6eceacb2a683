//! Command-line front end: single intervals, coverage/length sweeps,
//! bound-range tables and distinct-value counts, all as deterministic CSV.
//!
//! Exit codes: 0 success, 2 flag errors, 3 domain errors.

pub mod args;
pub mod output;
pub mod rng;

use clap::error::ErrorKind;
use clap::Parser;
use rayon::prelude::*;

use lattice_ci::datarand::{data_randomized_u_wilson, korn_interval, sequence_rank, TrialSequence};
use lattice_ci::evaluation::{
    coverage, distinct_value_count, expected_length_from_profile, length_profile, upper_bound_range,
};
use lattice_ci::intervals::{
    clopper_pearson, mid_p, split_sample_wilson, stevens, u_noise_wilson, wilson, BinomialSample,
    ConfidenceInterval, Method, MethodSpec, RandomizationDraw,
};

use args::{Cli, Command, DistinctArgs, IntervalArgs, RangeArgs, SweepArgs};
use output::{fmt_float, open_output, write_csv};

enum CliError {
    /// Bad or conflicting flags: exit code 2.
    Flag(String),
    /// Invalid values or configurations: exit code 3.
    Lib(lattice_ci::Error),
    /// I/O failure writing output: exit code 1.
    Io(std::io::Error),
}

impl From<lattice_ci::Error> for CliError {
    fn from(e: lattice_ci::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parse arguments, run, and report the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    init_thread_pool();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(CliError::Flag(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                lattice_ci::Error::Parse(_) => 2,
                _ => 3,
            }
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Sweeps fan out over a rayon pool; LATTICE_CI_THREADS overrides the
/// worker count. Results are assembled in grid order either way.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("LATTICE_CI_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid LATTICE_CI_THREADS={v:?}"),
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Interval(a) => run_interval(a),
        Command::Coverage(a) => run_sweep(a, Sweep::Coverage),
        Command::Length(a) => run_sweep(a, Sweep::Length),
        Command::Range(a) => run_range(a),
        Command::Distinct(a) => run_distinct(a),
    }
}

fn run_interval(a: IntervalArgs) -> Result<(), CliError> {
    let method = a.method.method();
    let spec = MethodSpec::new(method, a.alpha)?;

    if method.is_data_randomized() {
        if a.x.is_some() {
            return Err(CliError::Flag(format!(
                "--x cannot be used with data-randomized method {}; pass --sequence",
                method.name()
            )));
        }
        if a.seed.is_some() {
            return Err(CliError::Flag(format!(
                "--seed is not allowed for data-randomized method {}: the randomization comes from the trial order",
                method.name()
            )));
        }
        let text = a.sequence.as_deref().ok_or_else(|| {
            CliError::Flag(format!(
                "--sequence is required for data-randomized method {}",
                method.name()
            ))
        })?;
        let seq: TrialSequence = text
            .parse()
            .map_err(|e| CliError::Flag(format!("--sequence: {e}")))?;
        if let Some(n) = a.n {
            if n != seq.n() {
                return Err(CliError::Flag(format!(
                    "--n {n} disagrees with the sequence length {}",
                    seq.n()
                )));
            }
        }
        let interval = match method {
            Method::Korn => korn_interval(&seq, a.alpha)?,
            _ => data_randomized_u_wilson(&seq, a.alpha)?,
        };
        let u = sequence_rank(&seq).u();
        return emit_interval(
            &a,
            &spec,
            seq.n(),
            Some(seq.successes()),
            Some(seq.to_string()),
            None,
            "",
            Some(u),
            interval,
        );
    }

    if a.sequence.is_some() {
        return Err(CliError::Flag(format!(
            "--sequence is only for data-randomized methods; {} takes --x",
            method.name()
        )));
    }
    let n =
        a.n.ok_or_else(|| CliError::Flag("--n is required".into()))?;
    let x =
        a.x.ok_or_else(|| CliError::Flag(format!("--x is required for method {}", method.name())))?;
    let sample = BinomialSample::new(n, x)?;

    if method.is_externally_randomized() {
        let seed = a.seed.ok_or_else(|| {
            CliError::Flag(format!(
                "--seed is required for externally randomized method {}",
                method.name()
            ))
        })?;
        let draw = rng::draw_randomization(&spec, &sample, seed)?;
        let (interval, draw_value) = match draw {
            RandomizationDraw::HypergeometricZ(z) => {
                (split_sample_wilson(&sample, a.alpha, z)?, z as f64)
            }
            RandomizationDraw::UniformNoise(y) => (u_noise_wilson(&sample, a.alpha, y)?, y),
            RandomizationDraw::StevensNu(nu) => (stevens(&sample, a.alpha, nu, 1.0 - nu)?, nu),
            RandomizationDraw::RankU(_) => unreachable!("rank draws are data-randomized"),
        };
        return emit_interval(
            &a,
            &spec,
            n,
            Some(x),
            None,
            Some(seed),
            rng::RNG_ALGORITHM,
            Some(draw_value),
            interval,
        );
    }

    if a.seed.is_some() {
        return Err(CliError::Flag(format!(
            "--seed is not allowed for deterministic method {}",
            method.name()
        )));
    }
    let interval = match method {
        Method::Wilson => wilson(n, x as f64, a.alpha)?,
        Method::ClopperPearson => clopper_pearson(&sample, a.alpha)?,
        _ => mid_p(&sample, a.alpha)?,
    };
    emit_interval(&a, &spec, n, Some(x), None, None, "", None, interval)
}

#[allow(clippy::too_many_arguments)]
fn emit_interval(
    a: &IntervalArgs,
    spec: &MethodSpec,
    n: u64,
    x: Option<u64>,
    sequence: Option<String>,
    seed: Option<u64>,
    rng_name: &str,
    draw: Option<f64>,
    interval: ConfidenceInterval,
) -> Result<(), CliError> {
    let mut out = open_output(a.output.as_deref())?;
    let row = vec![
        spec.method().name().to_string(),
        n.to_string(),
        x.map(|v| v.to_string()).unwrap_or_default(),
        sequence.unwrap_or_default(),
        fmt_float(spec.alpha()),
        seed.map(|s| s.to_string()).unwrap_or_default(),
        rng_name.to_string(),
        draw.map(fmt_float).unwrap_or_default(),
        fmt_float(interval.lower()),
        fmt_float(interval.upper()),
    ];
    write_csv(
        &mut *out,
        &[
            "method", "n", "x", "sequence", "alpha", "seed", "rng", "draw", "lower", "upper",
        ],
        [row],
    )?;
    Ok(())
}

enum Sweep {
    Coverage,
    Length,
}

fn make_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Flag("--grid-points must be at least 1".into()));
    }
    if !(start.is_finite() && stop.is_finite() && start <= stop) {
        return Err(CliError::Flag(format!(
            "--grid-start {start} must not exceed --grid-stop {stop}"
        )));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
        return Err(CliError::Lib(lattice_ci::Error::Domain(format!(
            "grid [{start}, {stop}] outside [0, 1]"
        ))));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + i as f64 * step).collect())
}

fn run_sweep(a: SweepArgs, kind: Sweep) -> Result<(), CliError> {
    let spec = MethodSpec::new(a.method.method(), a.alpha)?;
    let grid = make_grid(a.grid_start, a.grid_stop, a.grid_points)?;

    let values: Result<Vec<f64>, lattice_ci::Error> = match kind {
        Sweep::Coverage => grid.par_iter().map(|&p| coverage(&spec, a.n, p)).collect(),
        Sweep::Length => {
            // conditional lengths are p-free; compute the profile once
            let profile = length_profile(&spec, a.n)?;
            grid.par_iter()
                .map(|&p| expected_length_from_profile(a.n, p, &profile))
                .collect()
        }
    };
    let values = values?;

    let header: [&str; 5] = match kind {
        Sweep::Coverage => ["method", "n", "alpha", "p", "coverage"],
        Sweep::Length => ["method", "n", "alpha", "p", "expected_length"],
    };
    let mut out = open_output(a.output.as_deref())?;
    write_csv(
        &mut *out,
        &header,
        grid.iter().zip(&values).map(|(&p, &v)| {
            vec![
                spec.method().name().to_string(),
                a.n.to_string(),
                fmt_float(spec.alpha()),
                fmt_float(p),
                fmt_float(v),
            ]
        }),
    )?;
    Ok(())
}

fn run_range(a: RangeArgs) -> Result<(), CliError> {
    let spec = MethodSpec::new(a.method.method(), a.alpha)?;
    let ranges: Result<Vec<_>, lattice_ci::Error> = (0..=a.n)
        .map(|x| upper_bound_range(&spec, a.n, x))
        .collect();
    let ranges = ranges?;
    let mut out = open_output(a.output.as_deref())?;
    write_csv(
        &mut *out,
        &[
            "method",
            "n",
            "alpha",
            "x",
            "min_upper",
            "max_upper",
            "range",
        ],
        ranges.iter().enumerate().map(|(x, r)| {
            vec![
                spec.method().name().to_string(),
                a.n.to_string(),
                fmt_float(spec.alpha()),
                x.to_string(),
                fmt_float(r.min_upper()),
                fmt_float(r.max_upper()),
                fmt_float(r.range()),
            ]
        }),
    )?;
    Ok(())
}

fn run_distinct(a: DistinctArgs) -> Result<(), CliError> {
    let counts = distinct_value_count(a.n)?;
    let mut out = open_output(a.output.as_deref())?;
    write_csv(
        &mut *out,
        &["n", "split_count", "korn_count"],
        [vec![
            a.n.to_string(),
            counts.split.to_string(),
            counts.korn.to_string(),
        ]],
    )?;
    Ok(())
}
