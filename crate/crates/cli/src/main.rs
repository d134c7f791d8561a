//! `diffgeo`: batch front end for diffgeo-core.
//!
//! Every command reads and writes the jet-file JSON format. Errors are
//! reported as one JSON object on stderr, e.g.
//! `{"error":"domain","message":"..."}`, with exit code 1. `verify` exits
//! with 3 when a check misses its tolerance.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diffgeo_core::config::{DEFAULT_N, K_MAX};
use diffgeo_core::geometry::{factor_circle, factor_into_ball, geodesic_chain, ob_bounds};
use diffgeo_core::verify::{run_suite, Suite, VerifyConfig};
use diffgeo_core::{CircleDiffeo, Diffeo, Diffeomorphism, Error, Result};
use serde_json::json;

const EXIT_ERROR: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "diffgeo", version, about = "Diffeomorphism groups of the interval and the circle")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Grid intervals; the grid has N + 1 nodes.
    #[arg(long, global = true, default_value_t = DEFAULT_N)]
    n: usize,
    /// Jet order, and the default metric / coordinate order.
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,
    /// Replace every nonzero tolerance used by `verify`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (output directory for `factor`). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 16 || self.n % 2 != 0 {
            return Err(Error::Domain(format!("--n must be even and at least 16, got {}", self.n)));
        }
        if self.k == 0 || self.k > K_MAX {
            return Err(Error::Domain(format!("--k must lie in 1..={K_MAX}, got {}", self.k)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Domain(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a closed-form family member and write its jet file.
    Gen {
        /// identity, exp, exp_inverse, mobius (interval); rotation, cosine (circle).
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
    },
    /// Print a distance between two jet files.
    Metric {
        #[arg(long, value_enum)]
        kind: MetricKind,
        /// Metric order; defaults to --k.
        #[arg(long)]
        order: Option<usize>,
        a: PathBuf,
        b: PathBuf,
    },
    /// Write the coordinates Φ_j as JSON.
    Coords {
        #[arg(long)]
        order: Option<usize>,
        file: PathBuf,
    },
    /// Factor into elements of the d_j-ball of radius --eps.
    Factor {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        order: Option<usize>,
        file: PathBuf,
    },
    /// Chain from the identity to a circle diffeomorphism.
    Chain {
        /// Number of steps, or `auto`.
        #[arg(long, default_value = "auto")]
        steps: String,
        file: PathBuf,
    },
    /// Bounds on log f' and the higher derivatives over a family of files.
    Ob {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run verification suites and print `kind,k,max_residual`.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Highest order checked; defaults to --k.
        #[arg(long)]
        order: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MetricKind {
    Rho,
    Dk,
    Sigma1,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let line = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    cli.run.validate()?;
    configure_threads()?;
    let cfg = &cli.run;
    match cli.cmd {
        Command::Gen { family, a, t, c } => {
            let params = family_params(&family, a, t, c)?;
            let f = Diffeo::from_family(&family, &params, cfg.k, cfg.n)?;
            emit(cfg.out.as_deref(), &f.to_json_string()?)?;
        }
        Command::Metric { kind, order, a, b } => {
            let (f, g) = (Diffeo::load(&a)?, Diffeo::load(&b)?);
            let v = metric(kind, order.unwrap_or(cfg.k), &f, &g)?;
            emit(cfg.out.as_deref(), &format!("{}\n", sig12(v)))?;
        }
        Command::Coords { order, file } => {
            let j = order.unwrap_or(cfg.k);
            let c = match Diffeo::load(&file)? {
                Diffeo::Interval(f) => f.phi_coords(j)?,
                Diffeo::Circle(f) => f.phi_coords(j)?,
            };
            let doc = json!({
                "order": c.order,
                "n": c.head.n(),
                "head": c.head.values(),
                "initial_values": c.initial_values,
            });
            emit(cfg.out.as_deref(), &format!("{doc}\n"))?;
        }
        Command::Factor { eps, order, file } => {
            let dir = cfg
                .out
                .clone()
                .ok_or_else(|| Error::Domain("factor needs --out DIR".into()))?;
            factor(&Diffeo::load(&file)?, order.unwrap_or(cfg.k), eps, &dir)?;
        }
        Command::Chain { steps, file } => {
            let n = match steps.as_str() {
                "auto" => None,
                s => Some(
                    s.parse::<usize>()
                        .map_err(|_| Error::Domain(format!("--steps must be a count or auto, got {s}")))?,
                ),
            };
            let f = expect_circle(Diffeo::load(&file)?, "chain")?;
            let res = geodesic_chain(&f, n)?;
            match &cfg.out {
                Some(p) => {
                    write_file(p, &res.to_csv())?;
                    let summary = json!({
                        "n": res.n(),
                        "total_cost": res.total_cost,
                        "endpoint_error": res.endpoint_error,
                    });
                    println!("{summary}");
                }
                None => emit(None, &res.to_csv())?,
            }
        }
        Command::Ob { files } => {
            let family = files.iter().map(|p| Diffeo::load(p)).collect::<Result<Vec<_>>>()?;
            let report = match &family[0] {
                Diffeo::Interval(_) => {
                    let fs = family
                        .into_iter()
                        .map(|d| match d {
                            Diffeo::Interval(f) => Ok(f),
                            Diffeo::Circle(_) => Err(mixed()),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    ob_bounds(&fs, cfg.k)?
                }
                Diffeo::Circle(_) => {
                    let fs = family
                        .into_iter()
                        .map(|d| expect_circle(d, "ob").map_err(|_| mixed()))
                        .collect::<Result<Vec<_>>>()?;
                    ob_bounds(&fs, cfg.k)?
                }
            };
            emit(cfg.out.as_deref(), &report.to_csv())?;
        }
        Command::Verify { suite, order } => return verify(cfg, &suite, order.unwrap_or(cfg.k)),
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("DIFFGEO_THREADS") else {
        return Ok(());
    };
    let threads = v
        .parse::<usize>()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Error::Domain(format!("DIFFGEO_THREADS must be a positive integer, got {v}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))
}

fn family_params(family: &str, a: Option<f64>, t: Option<f64>, c: Option<f64>) -> Result<Vec<f64>> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::Domain(format!("family {family} needs --{flag}")))
    };
    Ok(match family {
        "identity" => vec![],
        "exp" | "exp_inverse" => vec![need(a, "a")?],
        "mobius" | "rotation" => vec![need(t, "t")?],
        "cosine" => vec![need(a, "a")?, c.unwrap_or(0.0), t.unwrap_or(0.0)],
        other => return Err(Error::Domain(format!("unknown family {other}"))),
    })
}

fn metric(kind: MetricKind, j: usize, f: &Diffeo, g: &Diffeo) -> Result<f64> {
    match (f, g) {
        (Diffeo::Interval(f), Diffeo::Interval(g)) => match kind {
            MetricKind::Rho => f.rho(g, j),
            MetricKind::Dk => f.dk(g, j),
            MetricKind::Sigma1 => Err(Error::Domain("sigma1 is defined on circle files only".into())),
        },
        (Diffeo::Circle(f), Diffeo::Circle(g)) => match kind {
            MetricKind::Rho => f.rho(g, j),
            MetricKind::Dk => f.dk(g, j),
            MetricKind::Sigma1 => f.sigma1(g),
        },
        _ => Err(Error::Shape(format!(
            "manifolds differ: {} and {}",
            f.manifold().name(),
            g.manifold().name()
        ))),
    }
}

fn factor(f: &Diffeo, j: usize, eps: f64, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Domain(format!("cannot create {}: {e}", dir.display())))?;
    let summary = match f {
        Diffeo::Interval(f) => {
            let res = factor_into_ball(f, j, eps)?;
            write_factors(dir, res.factors.iter().map(|g| g.to_json()))?;
            write_file(&dir.join("radii.csv"), &res.radii_csv())?;
            json!({
                "r": res.r(),
                "initial_r": res.initial_r,
                "doublings": res.doublings,
                "max_radius": res.max_radius(),
                "recomposition_error": res.recomposition_error,
            })
        }
        Diffeo::Circle(f) => {
            let res = factor_circle(f, j, eps)?;
            let st = &res.stabilizer;
            write_factors(dir, st.factors.iter().map(|g| g.to_json()))?;
            write_file(&dir.join("radii.csv"), &st.radii_csv())?;
            let rot = CircleDiffeo::rotation(res.rotation, f.order(), f.n());
            write_file(&dir.join("rotation.json"), &rot.to_json()?)?;
            json!({
                "r": st.r(),
                "initial_r": st.initial_r,
                "doublings": st.doublings,
                "max_radius": st.max_radius(),
                "rotation": res.rotation,
                "recomposition_error": res.recomposition_error,
            })
        }
    };
    println!("{summary}");
    Ok(())
}

/// `g_0001.json`, `g_0002.json`, ... in composition order.
fn write_factors(dir: &Path, factors: impl Iterator<Item = Result<String>>) -> Result<()> {
    for (i, g) in factors.enumerate() {
        write_file(&dir.join(format!("g_{:04}.json", i + 1)), &g?)?;
    }
    Ok(())
}

fn verify(cfg: &RunConfig, suite: &str, order: usize) -> Result<ExitCode> {
    let suites: Vec<Suite> = match suite {
        "all" => Suite::ALL.to_vec(),
        s => vec![s.parse()?],
    };
    let vc = VerifyConfig::new(order, cfg.n, cfg.seed);
    let mut csv = String::from("kind,k,max_residual\n");
    let mut passed = true;
    for s in suites {
        let mut report = run_suite(s, &vc)?;
        if let Some(tol) = cfg.tol {
            for c in report.checks.iter_mut().filter(|c| c.tolerance > 0.0) {
                c.tolerance = tol;
            }
        }
        passed &= report.passed();
        // skip the header line of each suite's CSV
        csv.extend(report.to_csv().lines().skip(1).map(|l| format!("{l}\n")));
        for c in report.checks.iter().filter(|c| !c.passed()) {
            eprintln!(
                "{}",
                json!({ "failed": c.kind, "suite": s.to_string(), "k": c.k, "max_residual": c.max_residual, "tolerance": c.tolerance })
            );
        }
    }
    emit(cfg.out.as_deref(), &csv)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}

fn expect_circle(d: Diffeo, cmd: &str) -> Result<CircleDiffeo> {
    match d {
        Diffeo::Circle(f) => Ok(f),
        Diffeo::Interval(_) => Err(Error::Domain(format!("{cmd} needs a circle file"))),
    }
}

fn mixed() -> Error {
    Error::Shape("family mixes interval and circle files".into())
}

fn emit(out: Option<&Path>, s: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, s),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(s.as_bytes())
                .map_err(|e| Error::Domain(format!("stdout: {e}")))
        }
    }
}

fn write_file(p: &Path, s: &str) -> Result<()> {
    fs::write(p, s).map_err(|e| Error::Domain(format!("cannot write {}: {e}", p.display())))
}

/// Twelve significant digits, positional for moderate exponents.
fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, v)
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formats() {
        assert_eq!(sig12(3.0), "3.00000000000");
        assert_eq!(sig12(2.0), "2.00000000000");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(0.125), "0.125000000000");
        assert_eq!(sig12(9.9999999999999), "10.0000000000");
        assert_eq!(sig12(1.5e-9), "1.50000000000e-9");
    }

    #[test]
    fn params_per_family() {
        assert_eq!(family_params("exp", Some(3.0), None, None).unwrap(), vec![3.0]);
        assert_eq!(family_params("cosine", Some(0.2), Some(0.1), None).unwrap(), vec![0.2, 0.0, 0.1]);
        assert!(family_params("mobius", Some(1.0), None, None).is_err());
        assert!(family_params("spline", None, None, None).is_err());
    }

    #[test]
    fn run_config_bounds() {
        let base = RunConfig { n: 16, k: 1, tol: None, seed: 0, out: None };
        assert!(base.validate().is_ok());
        assert!(RunConfig { n: 15, ..base.clone() }.validate().is_err());
        assert!(RunConfig { n: 8, ..base.clone() }.validate().is_err());
        assert!(RunConfig { k: 0, ..base.clone() }.validate().is_err());
        assert!(RunConfig { k: K_MAX + 1, ..base.clone() }.validate().is_err());
        assert!(RunConfig { tol: Some(-1.0), ..base }.validate().is_err());
    }
}
