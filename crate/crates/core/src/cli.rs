//! Command line front end: file I/O around the library pipelines.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extension::{extend_embedding, extend_embedding_local, ExtensionResult, Mode};
use crate::geometry::{PointCloud, SampledMap};
use crate::germs::{ambient_curve_equivalence, sphere_hausdorff, GermCurve};
use crate::json;
use crate::projection::{germ_whitney_reduce, whitney_reduce};
use crate::tame::{isotopy_eval, isotopy_invert, TameMap};
use crate::verify::{certify_extension, default_rho, hausdorff, lne_ratio, GridSpec, Thresholds};

#[derive(Debug, Clone, Parser)]
#[command(name = "lipembed", version, about = "Bi-Lipschitz embeddings and tame extensions of sampled sets")]
pub struct RunConfig {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Tolerance for interpolation and round-trip checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    /// Result file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Also write a CSV series for plotting.
    #[arg(long, global = true, value_name = "CSV")]
    pub emit_plot_data: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Project a cloud down to a target dimension.
    Embed(EmbedArgs),
    /// Extend a sampled embedding to a tame homeomorphism.
    Extend(ExtendArgs),
    /// Build a plane homeomorphism germ between two curve germs.
    GermEquiv(GermArgs),
    /// Evaluate a tame map (or its isotopy) on points.
    Apply(ApplyArgs),
    /// Independent checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub target_dim: usize,
    /// Germ reduction at the origin.
    #[arg(long, conflicts_with = "global")]
    pub local: bool,
    #[arg(long)]
    pub global: bool,
    /// Comma separated radius schedule for the germ case.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sa,
    Plain,
}

#[derive(Debug, Clone, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// JSON list: source point `i` goes to target point `pairing[i]`.
    #[arg(long)]
    pub pairing: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Sa)]
    pub mode: ModeArg,
    #[arg(long)]
    pub local: bool,
    /// Intrinsic dimension; taken from the source cloud when absent.
    #[arg(short, long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct GermArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub points: PathBuf,
    /// Isotopy time in `[0, 1]`.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub inverse: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    Lne,
    Hausdorff,
    Extension,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub what: What,
    /// Cloud for `lne`, first cloud for `hausdorff`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Second cloud for `hausdorff`.
    #[arg(long)]
    pub other: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub source: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub pairing: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
}

/// Runs one command and returns the process exit code. Diagnostics go to
/// stderr.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lipembed: {e}");
            e.exit_code()
        }
    }
}

struct Outcome {
    result: Value,
    plot: Option<String>,
}

pub fn execute(config: &RunConfig) -> Result<()> {
    let (name, outcome) = match &config.command {
        Command::Embed(a) => ("embed", embed(config, a)?),
        Command::Extend(a) => ("extend", extend(config, a)?),
        Command::GermEquiv(a) => ("germ-equiv", germ_equiv(a)?),
        Command::Apply(a) => ("apply", apply(a)?),
        Command::Verify(a) => ("verify", verify(config, a)?),
    };
    let doc = json!({
        "run": {
            "tool": "lipembed",
            "version": env!("CARGO_PKG_VERSION"),
            "command": name,
            "seed": config.seed,
            "tol": config.tol,
        },
        "result": outcome.result,
    });
    let text = json::to_string_pretty(&doc)?;
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(csv)) = (&config.emit_plot_data, outcome.plot) {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn embed(config: &RunConfig, a: &EmbedArgs) -> Result<Outcome> {
    let cloud: PointCloud = read_json(&a.input)?;
    let result = if a.local {
        germ_whitney_reduce(&cloud, a.target_dim, a.schedule.as_deref(), config.seed)?
    } else {
        whitney_reduce(&cloud, a.target_dim, config.seed)?
    };
    let mut csv = String::from("step,epsilon,resulting_dim\n");
    for (i, s) in result.steps.iter().enumerate() {
        let _ = writeln!(csv, "{i},{:e},{}", s.epsilon, s.resulting_dim);
    }
    Ok(Outcome {
        result: to_value(&result)?,
        plot: Some(csv),
    })
}

fn load_map(source: &Path, target: &Path, pairing: Option<&Path>) -> Result<SampledMap> {
    let x: PointCloud = read_json(source)?;
    let y: PointCloud = read_json(target)?;
    let p: Vec<usize> = match pairing {
        Some(path) => read_json(path)?,
        None => (0..x.len()).collect(),
    };
    SampledMap::new(x, y, p)
}

fn extend(config: &RunConfig, a: &ExtendArgs) -> Result<Outcome> {
    let f = load_map(&a.source, &a.target, a.pairing.as_deref())?;
    let k = a.k.unwrap_or(f.source.intrinsic_dim());
    let result = if a.local {
        extend_embedding_local(&f, k, a.schedule.as_deref(), config.seed)?
    } else {
        let mode = match a.mode {
            ModeArg::Sa => Mode::Semialgebraic,
            ModeArg::Plain => Mode::Plain,
        };
        extend_embedding(&f, k, mode, config.seed)?
    };
    let plot = motion_series(&result, &f)?;
    Ok(Outcome {
        result: to_value(&result)?,
        plot,
    })
}

/// `(t, sup_i |F_t(x_i) − x_i|)` over the samples the map was built on.
fn motion_series(result: &ExtensionResult, f: &SampledMap) -> Result<Option<String>> {
    if !result.isotopy_ready {
        return Ok(None);
    }
    let mut csv = String::from("t,sup_motion\n");
    for step in 0..=20 {
        let t = step as f64 / 20.0;
        let mut sup: f64 = 0.0;
        for &i in &result.indices {
            let p = f.source.point(i);
            let q = isotopy_eval(&result.map, t, p)?;
            sup = sup.max(crate::linalg::dist(p, &q));
        }
        let _ = writeln!(csv, "{t},{sup:e}");
    }
    Ok(Some(csv))
}

fn germ_equiv(a: &GermArgs) -> Result<Outcome> {
    let x: GermCurve = read_json(&a.x)?;
    let y: GermCurve = read_json(&a.y)?;
    let map = ambient_curve_equivalence(&x, &y)?;
    let mut csv = String::from("r,hausdorff_over_r\n");
    for j in 4..=12 {
        let r = 2f64.powi(-j);
        let h = sphere_hausdorff(&map, &x, &y, r)?;
        let _ = writeln!(csv, "{r:e},{:e}", h / r);
    }
    Ok(Outcome {
        result: json!({ "map": to_value(&map)? }),
        plot: Some(csv),
    })
}

/// A map file may hold the bare map or an extension result around it.
fn read_tame_map(path: &Path) -> Result<TameMap> {
    let v: Value = read_json(path)?;
    let candidates = [
        &v,
        &v["F"],
        &v["map"],
        &v["result"]["F"],
        &v["result"]["map"],
    ];
    let mut last = None;
    for c in candidates {
        if c.is_object() {
            match serde_json::from_value::<TameMap>(c.clone()) {
                Ok(m) => return Ok(m),
                Err(e) => last = Some(e),
            }
        }
    }
    Err(Error::Parse(format!(
        "{}: no tame map found{}",
        path.display(),
        last.map(|e| format!(" ({e})")).unwrap_or_default()
    )))
}

/// Points as a cloud document or a bare list.
fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let v: Value = read_json(path)?;
    if v.is_array() {
        return serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())));
    }
    let cloud: PointCloud =
        serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(cloud.to_vecs())
}

fn apply(a: &ApplyArgs) -> Result<Outcome> {
    let map = read_tame_map(&a.map)?;
    let points = read_points(&a.points)?;
    let out = points
        .iter()
        .map(|p| match (a.t, a.inverse) {
            (None, false) => map.eval(p),
            (None, true) => map.inverse().eval(p),
            (Some(t), false) => isotopy_eval(&map, t, p),
            (Some(t), true) => isotopy_invert(&map, t, p),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        result: json!({ "points": out }),
        plot: None,
    })
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::Parse(format!("missing --{flag}")))
}

fn verify(config: &RunConfig, a: &VerifyArgs) -> Result<Outcome> {
    let result = match a.what {
        What::Lne => {
            let cloud: PointCloud = read_json(required(&a.input, "input")?)?;
            let rho = a.rho.unwrap_or_else(|| default_rho(&cloud));
            json!({ "what": "lne", "rho": rho, "ratio": lne_ratio(&cloud, rho)? })
        }
        What::Hausdorff => {
            let p: PointCloud = read_json(required(&a.input, "input")?)?;
            let q: PointCloud = read_json(required(&a.other, "other")?)?;
            json!({ "what": "hausdorff", "distance": hausdorff(&p, &q)? })
        }
        What::Extension => {
            let map = read_tame_map(required(&a.map, "map")?)?;
            let f = load_map(
                required(&a.source, "source")?,
                required(&a.target, "target")?,
                a.pairing.as_deref(),
            )?;
            let grid = GridSpec {
                per_axis: a.grid,
                ..GridSpec::default()
            };
            let thresholds = Thresholds {
                interpolation: config.tol,
                round_trip: config.tol,
            };
            let report = certify_extension(&map, &f, grid, thresholds)?;
            json!({ "what": "extension", "report": to_value(&report)? })
        }
    };
    Ok(Outcome { result, plot: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse() {
        let c = RunConfig::try_parse_from([
            "lipembed", "--seed", "7", "embed", "--input", "a.json", "--target-dim", "3", "--local",
        ])
        .unwrap();
        assert_eq!(c.seed, 7);
        assert!(matches!(c.command, Command::Embed(EmbedArgs { local: true, target_dim: 3, .. })));
        assert!(RunConfig::try_parse_from(["lipembed", "embed", "--input", "a", "--target-dim", "3", "--local", "--global"]).is_err());
        let v = RunConfig::try_parse_from(["lipembed", "verify", "--what", "lne", "--input", "c.json", "--tol", "1e-6"]).unwrap();
        assert_eq!(v.tol, 1e-6);
    }
}
