//! `dmaxcorr`: command-line front end. Every subcommand writes a TSV table
//! whose `#` header echoes the full configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dmaxcorr::analytic;
use dmaxcorr::fbm::{FbmPairSpec, PairGenerator};
use dmaxcorr::finance::leverage_curve;
use dmaxcorr::hurst::{auto_exponent, cross_exponent, default_windows};
use dmaxcorr::series::{load_series, mean_subtract_integrate};
use dmaxcorr::tsv::{comment_block, fmt_f64};
use dmaxcorr::xcorr::{collapse_transform, cross_correlation_fft_grid, cross_correlation_with};
use dmaxcorr::{Error, IngestSpec, LagGrid, Series, WindowSpec, XcorrOptions, XcorrResult};

const THREADS_VAR: &str = "DMAXCORR_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "dmaxcorr",
    version,
    about = "Detrending-moving-average cross-correlation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Ingest {
    /// Zero-based column to read.
    #[arg(long, default_value_t = 0)]
    column: usize,
    /// Field delimiter: a single character, or tab, comma, semicolon, space.
    #[arg(long, default_value = "tab", value_parser = parse_delimiter)]
    delimiter: char,
    /// Leading lines to skip before parsing.
    #[arg(long, default_value_t = 0)]
    skip_header: usize,
}

impl Ingest {
    fn spec(&self) -> IngestSpec {
        IngestSpec {
            column_index: self.column,
            delimiter: self.delimiter,
            skip_header: self.skip_header,
        }
    }

    fn echo(&self, cfg: &mut Config) {
        cfg.push("column", self.column);
        cfg.push("delimiter", format!("{:?}", self.delimiter));
        cfg.push("skip_header", self.skip_header);
    }
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Estimator {
    /// Window lengths n: lo:hi[:step], geom:min:max:ratio, or a comma list.
    #[arg(long)]
    windows: String,
    /// Window position in [0, 1]; 0 is the trailing window.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Cells averaging fewer positions are left out.
    #[arg(long, default_value_t = dmaxcorr::xcorr::DEFAULT_MIN_COUNT)]
    min_count: usize,
}

impl Estimator {
    fn windows(&self) -> Result<Vec<WindowSpec>, Error> {
        WindowSpec::parse_list(&self.windows, self.theta)
    }

    fn options(&self) -> XcorrOptions {
        XcorrOptions {
            min_count: self.min_count,
            ..XcorrOptions::default()
        }
    }

    fn echo(&self, cfg: &mut Config) {
        cfg.push("windows", &self.windows);
        cfg.push("theta", self.theta);
        cfg.push("min_count", self.min_count);
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-correlation C_xy(tau; n) of two series.
    Xcorr {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        ingest: Ingest,
        #[command(flatten)]
        est: Estimator,
        /// Lags in samples: lo:hi[:step] or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        lags: String,
        /// Integrate both inputs (mean removed) before estimating.
        #[arg(long)]
        integrate: bool,
        /// Evaluate through FFT correlation instead of direct sums.
        #[arg(long)]
        fft: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Scaling exponent from the zero-lag curve of one series, or of a pair.
    Hurst {
        #[arg(long)]
        input: PathBuf,
        /// Second series; fits the cross curve C_xy(0; n) instead.
        #[arg(long)]
        y: Option<PathBuf>,
        #[command(flatten)]
        ingest: Ingest,
        /// Window list as for xcorr; default geometric 16..N/50, ratio 1.3.
        #[arg(long)]
        windows: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = dmaxcorr::xcorr::DEFAULT_MIN_COUNT)]
        min_count: usize,
        #[arg(long)]
        integrate: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form asymptotic cross-correlation on a (tau_hat, theta) grid.
    Analytic {
        #[arg(long)]
        h1: f64,
        #[arg(long)]
        h2: f64,
        /// Window positions: lo:hi:step or a comma list.
        #[arg(long, default_value = "0")]
        theta: String,
        /// Scaled lags in [0, 1): lo:hi:step or a comma list.
        #[arg(long, default_value = "0")]
        tau_hat: String,
        #[arg(long, default_value_t = 1.0)]
        n: f64,
        /// Also evaluate the defining integral by quadrature.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Pair of fBm paths driven by shared noise.
    FbmGen {
        #[arg(long)]
        h1: f64,
        #[arg(long)]
        h2: f64,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Leverage function of a price series.
    Leverage {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        ingest: Ingest,
        /// Return horizon t' in samples.
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        /// Volatility window T in samples.
        #[arg(long)]
        vol_window: usize,
        /// Detrending window n.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        lags: String,
        #[arg(long, default_value_t = dmaxcorr::xcorr::DEFAULT_MIN_COUNT)]
        min_count: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Rescales an xcorr table by n^-(h1+h2).
    Collapse {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        h1: f64,
        #[arg(long)]
        h2: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Mean-subtracted cumulative profile of one column.
    GenomicPrep {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        ingest: Ingest,
        #[command(flatten)]
        out: Output,
    },
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    match s {
        "tab" | "\\t" => Ok('\t'),
        "comma" => Ok(','),
        "semicolon" => Ok(';'),
        "space" | "whitespace" => Ok(' '),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(format!("delimiter {s:?} is not a single character")),
            }
        }
    }
}

/// Floats from `lo:hi:step` (inclusive, rounding-tolerant) or `a,b,c`.
fn parse_float_grid(text: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number {s:?} in {text:?}"))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:step, got {text:?}"));
        }
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || lo > hi {
            return Err(format!("empty grid {text:?}"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(format!("grid {text:?} has too many points"));
        }
        Ok((0..count).map(|k| lo + k as f64 * step).collect())
    } else {
        text.split(',').map(num).collect()
    }
}

/// `key=value` lines echoed into the output header.
struct Config(Vec<(String, String)>);

impl Config {
    fn new(command: &str) -> Self {
        let mut c = Config(Vec::new());
        c.push("dmaxcorr", env!("CARGO_PKG_VERSION"));
        c.push("command", command);
        c
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn path(&mut self, key: &str, p: &Path) {
        self.push(key, p.display());
    }

    fn header(&self) -> String {
        self.0.iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "{k}={v}");
            s
        })
    }
}

enum Failure {
    User(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let line = format!("{}: {e}", e.module());
        match e {
            Error::Quadrature { .. } => Failure::Internal(line),
            _ => Failure::User(line),
        }
    }
}

fn user(msg: String) -> Failure {
    Failure::User(msg)
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| user(format!("output: cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Internal(format!("output: {e}")))
        }
    }
}

fn load(path: &Path, ingest: &Ingest, integrate: bool) -> Result<Series, Failure> {
    let s = load_series(path, &ingest.spec())?;
    Ok(if integrate {
        mean_subtract_integrate(&s)
    } else {
        s
    })
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Xcorr {
            x,
            y,
            ingest,
            est,
            lags,
            integrate,
            fft,
            out,
        } => {
            let mut cfg = Config::new("xcorr");
            cfg.path("x", &x);
            cfg.path("y", &y);
            ingest.echo(&mut cfg);
            est.echo(&mut cfg);
            cfg.push("lags", &lags);
            cfg.push("integrate", integrate);
            cfg.push("fft", fft);
            let sx = load(&x, &ingest, integrate)?;
            let sy = load(&y, &ingest, integrate)?;
            let windows = est.windows()?;
            let grid = LagGrid::parse(&lags)?;
            let r = if fft {
                cross_correlation_fft_grid(&sx, &sy, &windows, &grid, &est.options())?
            } else {
                cross_correlation_with(&sx, &sy, &windows, &grid, &est.options())?
            };
            emit(&out, &r.to_tsv(&cfg.header()))
        }
        Command::Hurst {
            input,
            y,
            ingest,
            windows,
            theta,
            min_count,
            integrate,
            out,
        } => {
            let mut cfg = Config::new("hurst");
            cfg.path("input", &input);
            if let Some(p) = &y {
                cfg.path("y", p);
            }
            ingest.echo(&mut cfg);
            let x = load(&input, &ingest, integrate)?;
            let ws = match &windows {
                Some(t) => WindowSpec::parse_list(t, theta)?,
                None => default_windows(x.len(), theta)?,
            };
            cfg.push(
                "windows",
                ws.iter()
                    .map(|w| w.n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            cfg.push("theta", theta);
            cfg.push("min_count", min_count);
            cfg.push("integrate", integrate);
            let opts = XcorrOptions {
                min_count,
                ..XcorrOptions::default()
            };
            let fit = match &y {
                Some(p) => cross_exponent(&x, &load(p, &ingest, integrate)?, &ws, &opts)?,
                None => auto_exponent(&x, &ws, &opts)?,
            };
            emit(&out, &fit.to_tsv(&cfg.header()))
        }
        Command::Analytic {
            h1,
            h2,
            theta,
            tau_hat,
            n,
            oracle,
            out,
        } => {
            let thetas = parse_float_grid(&theta).map_err(user)?;
            let taus = parse_float_grid(&tau_hat).map_err(user)?;
            let d = analytic::coefficient_d(h1, h2)?;
            let mut cfg = Config::new("analytic");
            cfg.push("h1", h1);
            cfg.push("h2", h2);
            cfg.push("theta", &theta);
            cfg.push("tau_hat", &tau_hat);
            cfg.push("n", n);
            cfg.push("oracle", oracle);
            cfg.push("coefficient_d", fmt_f64(d));
            let mut text = comment_block(&cfg.header());
            text.push_str("tau_hat\ttheta\tcase\tvalue\tbracket");
            text.push_str(if oracle {
                "\tquadrature\tabs_diff\n"
            } else {
                "\n"
            });
            let scale = n.powf(h1 + h2) * d;
            for &th in &thetas {
                for &t in &taus {
                    let (case, value) = analytic::asymptotic_xcorr(t, th, h1, h2, n)?;
                    let bracket = value / scale;
                    let _ = write!(
                        text,
                        "{}\t{}\t{}\t{}\t{}",
                        fmt_f64(t),
                        fmt_f64(th),
                        case.id(),
                        fmt_f64(value),
                        fmt_f64(bracket)
                    );
                    if oracle {
                        let q = analytic::master_integral_quadrature(t, th, h1, h2)?;
                        let _ = write!(text, "\t{}\t{}", fmt_f64(q), fmt_f64((q - bracket).abs()));
                    }
                    text.push('\n');
                }
            }
            emit(&out, &text)
        }
        Command::FbmGen {
            h1,
            h2,
            length,
            seed,
            out,
        } => {
            let spec = FbmPairSpec::new(h1, h2, length, seed);
            spec.validate()?;
            let gen = PairGenerator::new(h1, h2, length)?;
            let (x, y) = gen.generate(seed);
            let mut cfg = Config::new("fbm-gen");
            cfg.push("h1", h1);
            cfg.push("h2", h2);
            cfg.push("length", length);
            cfg.push("seed", seed);
            cfg.push("method", spec.method.tag());
            cfg.push("calibration", fmt_f64(gen.calibration()));
            let mut text = comment_block(&cfg.header());
            text.push_str("t\tx\ty\n");
            for (t, (a, b)) in x.values().iter().zip(y.values()).enumerate() {
                let _ = writeln!(text, "{t}\t{}\t{}", fmt_f64(*a), fmt_f64(*b));
            }
            emit(&out, &text)
        }
        Command::Leverage {
            input,
            ingest,
            horizon,
            vol_window,
            n,
            theta,
            lags,
            min_count,
            out,
        } => {
            let mut cfg = Config::new("leverage");
            cfg.path("input", &input);
            ingest.echo(&mut cfg);
            cfg.push("horizon", horizon);
            cfg.push("vol_window", vol_window);
            cfg.push("n", n);
            cfg.push("theta", theta);
            cfg.push("lags", &lags);
            cfg.push("min_count", min_count);
            let prices = load(&input, &ingest, false)?;
            let w = WindowSpec::new(n, theta)?;
            let grid = LagGrid::parse(&lags)?;
            let opts = XcorrOptions {
                min_count,
                ..XcorrOptions::default()
            };
            let curve = leverage_curve(&prices, horizon, vol_window, &w, &grid, &opts)?;
            emit(&out, &curve.to_tsv(&cfg.header()))
        }
        Command::Collapse { input, h1, h2, out } => {
            let mut cfg = Config::new("collapse");
            cfg.path("input", &input);
            cfg.push("h1", h1);
            cfg.push("h2", h2);
            let text = std::fs::read_to_string(&input).map_err(|source| Error::Io {
                path: input.clone(),
                source,
            })?;
            let r = XcorrResult::from_tsv(&text)?;
            emit(&out, &collapse_transform(&r, h1, h2).to_tsv(&cfg.header()))
        }
        Command::GenomicPrep { input, ingest, out } => {
            let mut cfg = Config::new("genomic-prep");
            cfg.path("input", &input);
            ingest.echo(&mut cfg);
            let profile = load(&input, &ingest, true)?;
            let mut text = comment_block(&cfg.header());
            text.push_str("t\tvalue\n");
            for (k, v) in profile.values().iter().enumerate() {
                let _ = writeln!(text, "{}\t{}", profile.origin_index + k as i64, fmt_f64(*v));
            }
            emit(&out, &text)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| user(format!("{THREADS_VAR}={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Internal(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|_| {
        std::panic::catch_unwind(|| run(cli.command))
            .unwrap_or_else(|_| Err(Failure::Internal("internal error".into())))
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("dmaxcorr: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("dmaxcorr: {msg}");
            ExitCode::from(2)
        }
    }
}
