//! Synthetic dataset generators for the benchmark distributions, plus
//! point-file ingestion for pre-embedded data.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::klein::{self, GaussianSpec, KleinPoint, EPS_BOUNDARY};

/// Declarative description of a synthetic point distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(flatten)]
    pub kind: DatasetKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetKind {
    /// `n` draws from a wrapped Gaussian at the origin.
    CenteredGaussian { n: usize, sigma: f64 },
    /// `n` points split over `d` wrapped Gaussians centered on a regular
    /// `d`-gon of radius `t`. Cluster counts are equal with the remainder
    /// assigned to the lowest cluster indices, unless `random_assignment`
    /// draws the cluster per point.
    BoundaryMixture {
        n: usize,
        sigma: f64,
        t: f64,
        d: usize,
        #[serde(default)]
        random_assignment: bool,
    },
    /// One draw per vertex Gaussian of a regular `d`-gon of radius `t`.
    PolygonOnePerVertex { d: usize, sigma: f64, t: f64 },
    /// Twenty points per cluster from `d` Gaussians on a `d`-gon of radius
    /// `t` (the radial-sweep protocol).
    TransitionSweep { d: usize, sigma: f64, t: f64 },
    /// UTF-8 CSV with an `x,y` header; `poincare` applies the
    /// Poincaré → Klein map on load.
    File {
        path: String,
        #[serde(default)]
        poincare: bool,
    },
}

/// Means of the `d`-cluster mixture: `μ_{d,k}(t) = t·e^{2πik/d}` for
/// `k = 1..d`.
pub fn mixture_means(d: usize, t: f64) -> Result<Vec<KleinPoint>> {
    if !(0.0 < t && t < 1.0 - EPS_BOUNDARY) {
        return Err(Error::InvalidSpec(format!("radial parameter t = {t}")));
    }
    (1..=d)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
            KleinPoint::new(t * th.cos(), t * th.sin())
        })
        .collect()
}

/// Generate the point set described by `spec`. Deterministic given the seed.
pub fn generate(spec: &DatasetSpec) -> Result<Vec<KleinPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match &spec.kind {
        DatasetKind::CenteredGaussian { n, sigma } => {
            require(*n >= 2, "n must be at least 2")?;
            let g = GaussianSpec::new(KleinPoint::ORIGIN, *sigma)?;
            (0..*n).map(|_| klein::sample_wrapped_gaussian(&g, &mut rng)).collect()
        }
        DatasetKind::BoundaryMixture { n, sigma, t, d, random_assignment } => {
            require(*n >= 2, "n must be at least 2")?;
            require(*d >= 1, "d must be at least 1")?;
            let means = mixture_means(*d, *t)?;
            let specs: Vec<GaussianSpec> = means
                .iter()
                .map(|m| GaussianSpec::new(*m, *sigma))
                .collect::<Result<_>>()?;
            let mut out = Vec::with_capacity(*n);
            if *random_assignment {
                for _ in 0..*n {
                    let k = rng.random_range(0..*d);
                    out.push(klein::sample_wrapped_gaussian(&specs[k], &mut rng)?);
                }
            } else {
                let base = n / d;
                let rem = n % d;
                for (k, g) in specs.iter().enumerate() {
                    let count = base + usize::from(k < rem);
                    for _ in 0..count {
                        out.push(klein::sample_wrapped_gaussian(g, &mut rng)?);
                    }
                }
            }
            Ok(out)
        }
        DatasetKind::PolygonOnePerVertex { d, sigma, t } => {
            require(*d >= 2, "polygon needs at least 2 vertices")?;
            let means = mixture_means(*d, *t)?;
            means
                .iter()
                .map(|m| {
                    let g = GaussianSpec::new(*m, *sigma)?;
                    klein::sample_wrapped_gaussian(&g, &mut rng)
                })
                .collect()
        }
        DatasetKind::TransitionSweep { d, sigma, t } => {
            require(*d >= 1, "d must be at least 1")?;
            let means = mixture_means(*d, *t)?;
            let mut out = Vec::with_capacity(20 * d);
            for m in &means {
                let g = GaussianSpec::new(*m, *sigma)?;
                for _ in 0..20 {
                    out.push(klein::sample_wrapped_gaussian(&g, &mut rng)?);
                }
            }
            Ok(out)
        }
        DatasetKind::File { path, poincare } => load_points_csv(path, *poincare),
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidSpec(msg.into()))
    }
}

/// Read a point file: UTF-8 CSV with header `x,y`, one point per row, all
/// rows strictly inside the unit disk. With `poincare`, coordinates are
/// interpreted in the Poincaré disk and mapped to Klein on load.
pub fn load_points_csv(path: &str, poincare: bool) -> Result<Vec<KleinPoint>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::PointFile(format!("{path}: {e}")))?;
    {
        let headers = reader.headers().map_err(|e| Error::PointFile(e.to_string()))?;
        if headers.len() < 2 || headers.get(0) != Some("x") || headers.get(1) != Some("y") {
            return Err(Error::PointFile(format!("{path}: expected header x,y")));
        }
    }
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::PointFile(format!("{path} row {row}: {e}")))?;
        let parse = |field: Option<&str>, name: &str| -> Result<f64> {
            field
                .ok_or_else(|| Error::PointFile(format!("{path} row {row}: missing {name}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::PointFile(format!("{path} row {row}: {name}: {e}")))
        };
        let x = parse(record.get(0), "x")?;
        let y = parse(record.get(1), "y")?;
        let p = if poincare {
            klein::poincare_to_klein(x, y)
                .map_err(|e| Error::PointFile(format!("{path} row {row}: {e}")))?
        } else {
            KleinPoint::new(x, y)
                .map_err(|e| Error::PointFile(format!("{path} row {row}: {e}")))?
        };
        out.push(p);
    }
    Ok(out)
}

/// Write points in the same CSV format `load_points_csv` reads.
pub fn write_points_csv(path: &str, points: &[KleinPoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::PointFile(format!("{path}: {e}")))?;
    writer
        .write_record(["x", "y"])
        .map_err(|e| Error::PointFile(e.to_string()))?;
    for p in points {
        writer
            .write_record([format!("{:.17e}", p.x()), format!("{:.17e}", p.y())])
            .map_err(|e| Error::PointFile(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::PointFile(e.to_string()))?;
    Ok(())
}
