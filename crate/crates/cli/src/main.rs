use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use zerocorr::closed_form::{
    connected_correlations, decay_bound, kappa, kappa_asymptote, kappa_series, KappaQuery, Subset,
};
use zerocorr::empirical::{pair_correlation_estimate, poisson_calibration};
use zerocorr::gaussian::DEFAULT_MC_SAMPLES;
use zerocorr::kac_rice::{
    correlation, normalized_correlation, pair_configuration, scaling_deviation, CorrelationQuery,
};
use zerocorr::kernels::{disk_grid, neardiag_deviation};
use zerocorr::numeric::fit_decay_exponent;
use zerocorr::{Error, KernelModel, Method};

mod grid;
mod table;

use grid::{parse_points, Grid};
use table::{Cell, Table};

#[derive(Parser, Debug)]
#[command(name = "zerocorr", version, about = "Correlations between zeros of Gaussian random holomorphic sections")]
#[command(after_help = "Worker threads default to all cores; set ZEROCORR_THREADS to cap them.")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write the table here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    /// Fubini-Study polynomials of degree N on CP^m
    Fs,
    /// Heisenberg-group kernel at level N
    HeisenbergLevel,
    /// Bargmann-Fock scaling limit
    HeisenbergLimit,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Exact,
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Placement {
    /// Points arranged about the origin
    Centered,
    /// First point at the origin
    Anchored,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct MethodOpts {
    /// Gaussian expectation method
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,

    /// Monte Carlo sample count
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES, value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MethodOpts {
    fn method(&self) -> Method {
        match self.method {
            MethodArg::Exact => Method::Exact,
            MethodArg::Mc => Method::MonteCarlo { samples: self.samples, seed: self.seed },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scaling-limit pair correlation κ_km over a grid of distances
    #[command(after_help = "Columns: r, kappa (closed form, series near 0), series (all known terms), \
asymptote (two-term large-r form).")]
    Kappa {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Distances, as a..b:n or a..b:n:log
        #[arg(long, default_value = "0..4:401")]
        r: Grid,
    },

    /// n-point correlation K_n and its normalization by the density
    #[command(after_help = "Columns: model, N, m, k, n, points, method, K, K_normalized, stderr, \
stderr_normalized. Standard errors are zero for exact evaluation.\n\
Without --points, n points are placed on a regular polygon of side r centred at the origin.")]
    Correlate {
        #[arg(long, value_enum, default_value_t = Model::HeisenbergLimit)]
        model: Model,
        /// Level (polynomial degree); required for fs and heisenberg-level
        #[arg(long = "N")]
        level: Option<u32>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Distance between neighbouring points
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Explicit points `z1,..,zm;w1,..,wm;...`, e.g. `0;0.5+0.2i`
        #[arg(long, conflicts_with_all = ["n", "r"])]
        points: Option<String>,
        #[command(flatten)]
        method: MethodOpts,
    },

    /// Convergence of Fubini-Study correlations to the scaling limit
    #[command(after_help = "Columns: N, deviation = |N^{-nk} K^N(z/sqrt N) - K^inf(z)|, \
fitted_exponent (least-squares decay exponent over all rows).")]
    Converge {
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Distance between neighbouring points in scaled units
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Placement::Centered)]
        placement: Placement,
        /// Levels, as a..b:n or a..b:n:log
        #[arg(long = "N", default_value = "64..4096:4:log")]
        levels: Grid,
        #[command(flatten)]
        method: MethodOpts,
    },

    /// Empirical pair correlation of roots of sampled SU(2) polynomials
    #[command(after_help = "Columns: bin_left, bin_right, count, normalizer, g_estimate, stderr, \
kappa_reference (κ_11 at the bin centre).")]
    Mc {
        /// Polynomial degree
        #[arg(long = "N", default_value_t = 500)]
        degree: usize,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Scaled radius of the anchor window
        #[arg(long, default_value_t = 3.0)]
        window: f64,
        /// Bin edges, as a..b:n
        #[arg(long, default_value = "0..3:16")]
        bins: Grid,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the estimator on Poisson points instead (expect g = 1)
        #[arg(long)]
        calibrate: bool,
    },

    /// Deviation of the scaled Szegő kernel from its Heisenberg limit
    #[command(after_help = "Columns: N, deviation (sup over pairs of a disk grid), N_times_deviation, \
fitted_exponent.")]
    KernelCheck {
        #[arg(long = "N", default_value = "100..1600:5:log")]
        levels: Grid,
        /// Radius of the scaled disk
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long, default_value_t = 4)]
        rings: usize,
        #[arg(long, default_value_t = 8)]
        spokes: usize,
    },

    /// Connected correlation of a point configuration in the scaling limit
    #[command(after_help = "Columns: n, m, k, connected, decay_bound. The decay bound is nan for more than three points.")]
    Connected {
        /// Points `z1,..,zm;w1,..,wm;...`
        #[arg(long)]
        points: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        method: MethodOpts,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn points_arg(s: &str) -> Vec<Vec<Complex64>> {
    parse_points(s).unwrap_or_else(|e| usage_error(format!("invalid --points: {e}")))
}

fn format_points(points: &[Vec<Complex64>]) -> String {
    let coord = |z: &Complex64| {
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("{}{:+}i", z.re, z.im)
        }
    };
    points
        .iter()
        .map(|p| p.iter().map(coord).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

/// n points on a regular polygon of side `side` about the origin, in the
/// first coordinate plane.
fn polygon(n: usize, side: f64, dim: usize) -> Vec<Vec<Complex64>> {
    match n {
        1 => return vec![vec![Complex64::new(0.0, 0.0); dim]],
        2 => return pair_configuration(side, dim),
        _ => {}
    }
    let radius = side / (2.0 * (PI / n as f64).sin());
    (0..n)
        .map(|i| {
            let mut p = vec![Complex64::new(0.0, 0.0); dim];
            p[0] = Complex64::from_polar(radius, PI + 2.0 * PI * i as f64 / n as f64);
            p
        })
        .collect()
}

fn anchored(points: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let base = points[0].clone();
    points.into_iter().map(|p| p.iter().zip(&base).map(|(a, b)| a - b).collect()).collect()
}

fn kernel_model(model: Model, level: Option<u32>, dim: usize) -> KernelModel {
    let need = || level.unwrap_or_else(|| usage_error("--N is required for this model"));
    match model {
        Model::Fs => KernelModel::FubiniStudy { level: need(), dim },
        Model::HeisenbergLevel => KernelModel::HeisenbergLevel { level: need(), dim },
        Model::HeisenbergLimit => KernelModel::HeisenbergLimit { dim },
    }
}

fn levels_arg(g: &Grid) -> Vec<u32> {
    g.levels().unwrap_or_else(|e| usage_error(format!("invalid --N: {e}")))
}

fn run(command: Command) -> Result<Table, Error> {
    match command {
        Command::Kappa { k, m, r } => {
            let mut t = Table::new(&["r", "kappa", "series", "asymptote"]);
            for r in r.values() {
                let q = KappaQuery::new(r, m, k);
                t.push(vec![r.into(), kappa(q)?.into(), kappa_series(q, usize::MAX)?.into(), kappa_asymptote(q)?.into()]);
            }
            Ok(t)
        }
        Command::Correlate { model, level, m, k, n, r, points, method } => {
            let pts = match points {
                Some(s) => points_arg(&s),
                None => polygon(n as usize, r, m),
            };
            let dim = pts[0].len();
            let model = kernel_model(model, level, dim);
            let q = CorrelationQuery::new(model, k, pts, method.method());
            let raw = correlation(&q)?;
            let norm = normalized_correlation(&q)?;
            let mut t = Table::new(&[
                "model",
                "N",
                "m",
                "k",
                "n",
                "points",
                "method",
                "K",
                "K_normalized",
                "stderr",
                "stderr_normalized",
            ]);
            let model_name = match model {
                KernelModel::FubiniStudy { .. } => "fs",
                KernelModel::HeisenbergLevel { .. } => "heisenberg-level",
                KernelModel::HeisenbergLimit { .. } => "heisenberg-limit",
            };
            let method_name = match method.method {
                MethodArg::Exact => "exact",
                MethodArg::Mc => "mc",
            };
            t.push(vec![
                model_name.into(),
                model.level().map_or(Cell::Text(String::new()), Cell::from),
                dim.into(),
                k.into(),
                q.n().into(),
                format_points(&q.points).into(),
                method_name.into(),
                raw.value.into(),
                norm.value.into(),
                raw.std_error.into(),
                norm.std_error.into(),
            ]);
            Ok(t)
        }
        Command::Converge { m, k, n, r, placement, levels, method } => {
            let mut pts = polygon(n as usize, r, m);
            if placement == Placement::Anchored {
                pts = anchored(pts);
            }
            let levels = levels_arg(&levels);
            let dev = levels
                .iter()
                .map(|&l| scaling_deviation(&pts, k, l, method.method()))
                .collect::<Result<Vec<f64>, Error>>()?;
            let x: Vec<f64> = levels.iter().map(|&l| f64::from(l)).collect();
            let slope = if x.len() > 1 { fit_decay_exponent(&x, &dev) } else { f64::NAN };
            let mut t = Table::new(&["N", "deviation", "fitted_exponent"]);
            for (l, d) in levels.iter().zip(&dev) {
                t.push(vec![(*l).into(), (*d).into(), slope.into()]);
            }
            Ok(t)
        }
        Command::Mc { degree, samples, window, bins, seed, calibrate } => {
            let edges = bins.values();
            if edges.len() < 2 {
                usage_error("--bins needs at least two edges");
            }
            let h = if calibrate {
                poisson_calibration(degree, samples, window, &edges, seed)?
            } else {
                pair_correlation_estimate(degree, samples, window, &edges, seed)?
            };
            let g = h.g_estimate();
            let se = h.stderr();
            let mut t = Table::new(&[
                "bin_left",
                "bin_right",
                "count",
                "normalizer",
                "g_estimate",
                "stderr",
                "kappa_reference",
            ]);
            for b in 0..h.bins() {
                let reference = kappa(KappaQuery::new(h.bin_center(b), 1, 1))?;
                t.push(vec![
                    h.bin_edges[b].into(),
                    h.bin_edges[b + 1].into(),
                    h.counts[b].into(),
                    h.normalizer[b].into(),
                    g[b].into(),
                    se[b].into(),
                    reference.into(),
                ]);
            }
            Ok(t)
        }
        Command::KernelCheck { levels, radius, rings, spokes } => {
            if !(radius > 0.0 && radius.is_finite()) || spokes == 0 {
                usage_error("--radius must be positive and --spokes at least 1");
            }
            let grid = disk_grid(radius, rings, spokes);
            let levels = levels_arg(&levels);
            let dev: Vec<f64> = levels.iter().map(|&l| neardiag_deviation(l, &grid)).collect();
            let x: Vec<f64> = levels.iter().map(|&l| f64::from(l)).collect();
            let slope = if x.len() > 1 { fit_decay_exponent(&x, &dev) } else { f64::NAN };
            let mut t = Table::new(&["N", "deviation", "N_times_deviation", "fitted_exponent"]);
            for (l, d) in levels.iter().zip(&dev) {
                t.push(vec![(*l).into(), (*d).into(), (f64::from(*l) * d).into(), slope.into()]);
            }
            Ok(t)
        }
        Command::Connected { points, k, method } => {
            let pts = points_arg(&points);
            let n = pts.len();
            let m = pts[0].len();
            if n > zerocorr::closed_form::MAX_CONNECTED_POINTS {
                return Err(Error::SizeLimitExceeded {
                    what: "points",
                    got: n,
                    limit: zerocorr::closed_form::MAX_CONNECTED_POINTS,
                });
            }
            let mut values: BTreeMap<Subset, f64> = BTreeMap::new();
            for mask in 1..(1 as Subset) << n {
                if mask.count_ones() < 2 {
                    continue;
                }
                let chosen: Vec<Vec<Complex64>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| pts[i].clone()).collect();
                let q = CorrelationQuery::new(KernelModel::HeisenbergLimit { dim: m }, k, chosen, method.method());
                values.insert(mask, normalized_correlation(&q)?.value);
            }
            let connected = if n == 1 { 1.0 } else { connected_correlations(&values, n)? };
            let bound = match decay_bound(&pts) {
                Ok(b) => b,
                Err(Error::SizeLimitExceeded { .. }) | Err(Error::InvalidInput(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            let mut t = Table::new(&["n", "m", "k", "connected", "decay_bound"]);
            t.push(vec![n.into(), m.into(), k.into(), connected.into(), bound.into()]);
            Ok(t)
        }
    }
}

fn configure_threads() {
    let Ok(v) = std::env::var("ZEROCORR_THREADS") else {
        return;
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => usage_error(format!("ZEROCORR_THREADS must be a positive integer, got '{v}'")),
    };
    // only fails if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let table = match run(cli.command) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("zerocorr: {}: {e}", e.kind());
            return ExitCode::from(1);
        }
    };
    let text = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("zerocorr: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
