//! `nilbloch`: reproducible runs of the library computations, emitting CSV or JSON.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use nilbloch::chen::{self, ConnectionTriple, Poly2, PolyOneForm, Polyline};
use nilbloch::harper;
use nilbloch::heis::{ball_sorted, GroupElement};
use nilbloch::oscillators::{self, OscillatorSpec};
use nilbloch::reps::{fourier_inversion, GroupFunction};
use nilbloch::walks;

use output::{fmt_f64, Table};

/// Environment variable setting the worker-thread count for sweeps.
const THREADS_ENV: &str = "NILBLOCH_THREADS";

#[derive(Parser)]
#[command(name = "nilbloch", version, about = "Spectral computations on the discrete Heisenberg group")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to FILE (atomically) instead of standard output.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Potential {
    Harmonic,
    Quartic,
}

#[derive(Subcommand)]
enum Command {
    /// Harper bands for every reduced flux p/q with q ≤ QMAX.
    Butterfly {
        #[arg(long)]
        qmax: i64,
    },
    /// Harper bands at flux p/q.
    Bands {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
    },
    /// Lowest band midpoints at flux 1/q against −4 + (2n+1)θ.
    Wilkinson {
        #[arg(long)]
        q: i64,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
    },
    /// Largest and lowest band widths at flux 1/q.
    Bandwidths {
        #[arg(long, default_value_t = 3)]
        qmin: i64,
        #[arg(long, default_value_t = 13)]
        qmax: i64,
    },
    /// Return probabilities of the simple random walk.
    Walk {
        #[arg(long)]
        tmax: usize,
        #[arg(long, default_value_t = 256)]
        qstar: i64,
        #[arg(long, default_value_t = 12)]
        grid: usize,
        /// Also compute exact convolution values (t ≤ 40).
        #[arg(long)]
        exact: bool,
    },
    /// Spectral zeta value of an oscillator.
    Zeta {
        #[arg(long, value_enum)]
        potential: Potential,
        #[arg(long)]
        s: f64,
        /// Use the Green-function integral (s = 2 or 3) instead of the eigen-sum.
        #[arg(long)]
        integral: bool,
        /// Hermite truncation for the eigen-sum.
        #[arg(long)]
        n: Option<usize>,
        /// Number of eigenvalues summed directly.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Fourier inversion of a delta and of a function on the radius-2 ball.
    FourierDemo {
        #[arg(long, default_value_t = 8)]
        grid: usize,
    },
    /// Line, iterated and Lie integrals on sample paths and connections.
    ChenDemo,
    /// λ₀(4I − H) against the Kazhdan distance over random representations.
    Sunada {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] nilbloch::Error),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_convergence_failure() => 3,
            CliError::Lib(_) | CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn render(format: Format, table: Table, summary: impl Serialize) -> CliResult<String> {
    Ok(match format {
        Format::Csv => table.render(),
        Format::Json => output::json(&summary)?,
    })
}

fn band_table(rows: &[harper::ButterflyRow]) -> (Table, Vec<serde_json::Value>) {
    let mut t = Table::new(&["q", "p", "theta", "band_index", "e_min", "e_max"]);
    let mut js = Vec::new();
    for r in rows {
        for (i, &(lo, hi)) in r.bands.bands.iter().enumerate() {
            t.push(vec![r.q.to_string(), r.p.to_string(), fmt_f64(r.theta), i.to_string(), fmt_f64(lo), fmt_f64(hi)]);
            js.push(json!({"q": r.q, "p": r.p, "theta": r.theta, "band_index": i, "e_min": lo, "e_max": hi}));
        }
    }
    (t, js)
}

fn cmd_butterfly(format: Format, qmax: i64) -> CliResult<String> {
    let rows = harper::butterfly(qmax)?;
    let (t, js) = band_table(&rows);
    render(format, t, js)
}

fn cmd_bands(format: Format, p: i64, q: i64) -> CliResult<String> {
    let row = harper::ButterflyRow { p, q, theta: std::f64::consts::TAU * p as f64 / q.max(1) as f64, bands: harper::bands(p, q)? };
    let (t, js) = band_table(std::slice::from_ref(&row));
    render(format, t, json!({"rows": js, "touching": row.bands.touching}))
}

fn cmd_wilkinson(format: Format, q: i64, nmax: usize) -> CliResult<String> {
    let r = harper::wilkinson_check(q, nmax)?;
    let mut t = Table::new(&["n", "midpoint", "ratio", "deviation"]);
    for (n, (ratio, dev)) in r.ratios.iter().zip(&r.deviations).enumerate() {
        t.push(vec![n.to_string(), fmt_f64(ratio * r.theta - 4.0), fmt_f64(*ratio), fmt_f64(*dev)]);
    }
    render(format, t, &r)
}

fn cmd_bandwidths(format: Format, qmin: i64, qmax: i64) -> CliResult<String> {
    let r = harper::bandwidth_table(qmin, qmax)?;
    let mut t = Table::new(&["q", "max_width", "lowest_width"]);
    for ((q, w), (_, lw)) in r.rows.iter().zip(&r.lowest_band_rows) {
        t.push(vec![q.to_string(), fmt_f64(*w), fmt_f64(*lw)]);
    }
    render(format, t, &r)
}

fn cmd_walk(format: Format, tmax: usize, qstar: i64, grid: usize, exact: bool) -> CliResult<String> {
    if exact && tmax > walks::MAX_EXACT_TIME {
        return Err(CliError::Usage(format!("--exact needs --tmax <= {}", walks::MAX_EXACT_TIME)));
    }
    let fourier = walks::return_prob_fourier_series(tmax, qstar, grid)?;
    let exact_vals: Vec<Option<f64>> =
        (0..=tmax).map(|t| if exact { walks::return_prob_exact(t).map(Some) } else { Ok(None) }).collect::<Result<_, _>>()?;
    let mut t = Table::new(&["t", "p_exact", "p_fourier", "t2p"]);
    let mut rows = Vec::new();
    for (step, (pf, pe)) in fourier.iter().zip(&exact_vals).enumerate() {
        let t2p = (step * step) as f64 * pf;
        t.push(vec![step.to_string(), pe.map(fmt_f64).unwrap_or_default(), fmt_f64(*pf), fmt_f64(t2p)]);
        rows.push(json!({"t": step, "p_exact": pe, "p_fourier": pf, "t2p": t2p}));
    }
    let max_gap = exact_vals
        .iter()
        .zip(&fourier)
        .filter_map(|(e, f)| e.map(|e| (e - f).abs()))
        .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.max(g))));
    let (slope, constant) = if tmax >= 16 && tmax as i64 <= qstar {
        let fit = walks::exponent_estimate(tmax / 4, tmax, qstar, grid)?;
        let last = tmax - tmax % 2;
        (Some(fit.slope), Some((last * last) as f64 * fourier[last]))
    } else {
        (None, None)
    };
    let summary = json!({
        "qstar": qstar,
        "grid": grid,
        "rows": rows,
        "slope": slope,
        "constant": constant,
        "continuous_constant": walks::sinh_integral() / (4.0 * std::f64::consts::PI * std::f64::consts::PI),
        "tolerance": walks::fourier_tolerance(qstar, grid),
        "max_exact_gap": max_gap,
    });
    render(format, t, summary)
}

fn cmd_zeta(format: Format, potential: Potential, s: f64, integral: bool, n: Option<usize>, k: Option<usize>) -> CliResult<String> {
    let spec = match potential {
        Potential::Harmonic => OscillatorSpec::harmonic(),
        Potential::Quartic => OscillatorSpec::quartic(),
    };
    let (m, s_out, value, tail, method) = if integral {
        if s != 2.0 && s != 3.0 {
            return Err(CliError::Usage(format!("--integral supports s = 2 or 3, got {s}")));
        }
        let l = if spec.m == 1 { 40.0 } else { 10.0 };
        let r = oscillators::zeta_integral(spec.m, s as u32, l, 8)?;
        (r.m, s, r.zeta, r.tail, r.method)
    } else {
        let n = n.unwrap_or(if spec.m == 1 { 200 } else { 600 });
        let k = k.unwrap_or(n / 2);
        let r = oscillators::zeta(&spec, s, n, k)?;
        (r.m, r.s, r.zeta, r.tail, r.method)
    };
    let mut t = Table::new(&["M", "s", "zeta", "tail", "method"]);
    t.push(vec![m.to_string(), fmt_f64(s_out), fmt_f64(value), fmt_f64(tail), method.to_string()]);
    render(format, t, json!({"M": m, "s": s_out, "zeta": value, "tail": tail, "method": method}))
}

/// Deterministic test function on the radius-2 ball.
fn ball_function() -> CliResult<GroupFunction> {
    Ok(ball_sorted(2)?
        .into_iter()
        .map(|g| {
            let w = 1.0 / (1.0 + (g.n1 * g.n1 + g.n2 * g.n2) as f64 + g.n3.abs() as f64);
            (g, Complex64::new(w, 0.1 * g.n3 as f64))
        })
        .collect())
}

fn cmd_fourier_demo(format: Format, grid: usize) -> CliResult<String> {
    let delta: GroupFunction = [(GroupElement::W, Complex64::new(1.0, 0.0))].into_iter().collect();
    let f = ball_function()?;
    let mut t = Table::new(&["qstar", "grid", "delta_w_at_e", "ball2_error"]);
    let mut rows = Vec::new();
    for qstar in [2i64, 4, 8, 16, 32, 64] {
        let d = fourier_inversion(&delta, &GroupElement::IDENTITY, qstar, grid)?.norm();
        let mut err: f64 = 0.0;
        for (g, v) in &f {
            err = err.max((fourier_inversion(&f, g, qstar, grid)? - v).norm());
        }
        t.push(vec![qstar.to_string(), grid.to_string(), fmt_f64(d), fmt_f64(err)]);
        rows.push(json!({"qstar": qstar, "grid": grid, "delta_w_at_e": d, "ball2_error": err}));
    }
    render(format, t, rows)
}

fn cmd_chen_demo(format: Format) -> CliResult<String> {
    let square = Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])?;
    let right_up = Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])?;
    let up_right = Polyline::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]])?;
    let standard = ConnectionTriple::standard();
    let curved = ConnectionTriple::new(
        PolyOneForm::new(Poly2::from_terms(&[((0, 0), 1.0), ((1, 1), 0.5)]), Poly2::monomial(2, 0, -0.25))?,
        PolyOneForm::new(Poly2::monomial(0, 1, 0.75), Poly2::from_terms(&[((0, 0), 1.0), ((1, 0), 0.3)]))?,
        PolyOneForm::new(Poly2::monomial(0, 2, 0.2), Poly2::monomial(1, 0, -1.0))?,
    );
    let path = Polyline::new(vec![[0.0, 0.0], [0.7, -0.2], [1.1, 0.9], [0.3, 1.4]])?;

    let e1 = &curved.omega1;
    let e2 = &curved.omega2;
    let shuffle = chen::iterated_integral((e1, e2), &path) + chen::iterated_integral((e2, e1), &path)
        - chen::line_integral(e1, &path) * chen::line_integral(e2, &path);
    let series = chen::lie_integral_series(&curved, &path);
    let product = chen::lie_integral_product(&curved, &path, 1 << 14)?;
    let series_product_gap = (series - product).abs().max();
    let homotopy_gap = (chen::lie_integral_series(&standard, &right_up) - chen::lie_integral_series(&standard, &up_right)).abs().max();
    let mono = chen::monodromy(&standard, &square)?;
    let lift = chen::lie_integral_series(&ConnectionTriple::translation(), &square)[(0, 2)];

    let checks = [
        ("flatness_standard", chen::flatness_residual(&standard)),
        ("flatness_translation", chen::flatness_residual(&ConnectionTriple::translation())),
        ("shuffle_residual", shuffle.abs()),
        ("series_product_gap", series_product_gap),
        ("homotopy_gap", homotopy_gap),
        ("square_monodromy_central", mono.central),
        ("square_lift_central", lift),
    ];
    let mut t = Table::new(&["check", "value"]);
    for (name, v) in checks {
        t.push(vec![name.to_string(), fmt_f64(v)]);
    }
    let summary: serde_json::Map<String, serde_json::Value> =
        checks.iter().map(|(k, v)| (k.to_string(), json!(v))).chain([("square_monodromy".to_string(), json!(mono))]).collect();
    render(format, t, summary)
}

fn cmd_sunada(format: Format, samples: usize, seed: u64) -> CliResult<String> {
    let scan = harper::sunada_ratio_scan(samples, seed)?;
    let mut t = Table::new(&["p", "q", "x2", "x3", "lambda0", "delta_lower", "delta_upper", "ratio_lower", "ratio_upper"]);
    for s in &scan.samples {
        t.push(vec![
            s.point.p.to_string(),
            s.point.q.to_string(),
            fmt_f64(s.point.x2),
            fmt_f64(s.point.x3),
            fmt_f64(s.lambda0),
            fmt_f64(s.delta_lower),
            fmt_f64(s.delta_upper),
            fmt_f64(s.ratio_lower()),
            fmt_f64(s.ratio_upper()),
        ]);
    }
    render(format, t, &scan)
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Usage(format!("{THREADS_ENV} must be positive")));
        }
        // A pool may already exist when embedded; the sweep results do not depend on it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let f = cli.format;
    let text = match cli.command {
        Command::Butterfly { qmax } => cmd_butterfly(f, qmax)?,
        Command::Bands { p, q } => cmd_bands(f, p, q)?,
        Command::Wilkinson { q, nmax } => cmd_wilkinson(f, q, nmax)?,
        Command::Bandwidths { qmin, qmax } => cmd_bandwidths(f, qmin, qmax)?,
        Command::Walk { tmax, qstar, grid, exact } => cmd_walk(f, tmax, qstar, grid, exact)?,
        Command::Zeta { potential, s, integral, n, k } => cmd_zeta(f, potential, s, integral, n, k)?,
        Command::FourierDemo { grid } => cmd_fourier_demo(f, grid)?,
        Command::ChenDemo => cmd_chen_demo(f)?,
        Command::Sunada { samples, seed } => cmd_sunada(f, samples, seed)?,
    };
    match &cli.out {
        Some(path) => output::write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
