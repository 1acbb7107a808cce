//! Text forms of corruption models, halfspace adversaries and seed lists.
//!
//! | spec                    | meaning                                              |
//! |-------------------------|------------------------------------------------------|
//! | `mirrored`              | outliers ~ `N(−μ, I)`                                |
//! | `point:c:v`             | every outlier at `v·e_c`                             |
//! | `decoys:count:mag:cov`  | `count` random k-sparse means (entries `±mag`), `cov·I` |
//! | `hypercube:r`           | outliers uniform on `μ + [−r, r]^d`                  |
//! | `pair:i:j:rho`          | `N(μ, I)` with coordinates `i`, `j` correlated       |
//!
//! Halfspace adversaries: `flip`, `random`, `shifted:m`.

use std::fmt;
use std::str::FromStr;

use listdec::{random_decoys, CorruptionModel, HalfspaceAdversary};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Mirrored,
    Point { coord: usize, value: f64 },
    Decoys { count: usize, magnitude: f64, cov_scale: f64 },
    Hypercube { radius: f64 },
    Pair { i: usize, j: usize, rho: f64 },
}

impl ModelSpec {
    /// The concrete model for a dataset of the given shape. Decoy means are
    /// drawn from `seed`.
    pub fn to_model(&self, d: usize, k: usize, seed: u64) -> Result<CorruptionModel, CliError> {
        Ok(match *self {
            ModelSpec::Mirrored => CorruptionModel::MirroredMean,
            ModelSpec::Point { coord, value } => {
                if coord >= d {
                    return Err(CliError::input(format!("point coordinate {coord} is not below d = {d}")));
                }
                let mut loc = vec![0.0; d];
                loc[coord] = value;
                CorruptionModel::PointMass(loc)
            }
            ModelSpec::Decoys { count, magnitude, cov_scale } => CorruptionModel::DecoyClusters {
                means: random_decoys(d, k, count, magnitude, seed),
                cov_scale,
            },
            ModelSpec::Hypercube { radius } => CorruptionModel::HypercubeNoise(radius),
            ModelSpec::Pair { i, j, rho } => CorruptionModel::PairCorrelation { i, j, rho },
        })
    }
}

fn field<T: FromStr>(spec: &str, part: Option<&str>, what: &str) -> Result<T, CliError> {
    part.and_then(|p| p.parse().ok())
        .ok_or_else(|| CliError::input(format!("model spec `{spec}`: bad or missing {what}")))
}

fn split(s: &str) -> (&str, Vec<&str>) {
    let mut parts = s.split(':');
    let head = parts.next().unwrap_or("");
    (head, parts.collect())
}

fn arity(spec: &str, args: &[&str], n: usize) -> Result<(), CliError> {
    if args.len() != n {
        return Err(CliError::input(format!("spec `{spec}` expects {n} fields, got {}", args.len())));
    }
    Ok(())
}

impl FromStr for ModelSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (head, args) = split(s);
        let get = |i: usize| args.get(i).copied();
        let spec = match head {
            "mirrored" => {
                arity(s, &args, 0)?;
                ModelSpec::Mirrored
            }
            "point" => {
                arity(s, &args, 2)?;
                ModelSpec::Point {
                    coord: field(s, get(0), "coordinate")?,
                    value: field(s, get(1), "value")?,
                }
            }
            "decoys" => {
                arity(s, &args, 3)?;
                ModelSpec::Decoys {
                    count: field(s, get(0), "count")?,
                    magnitude: field(s, get(1), "magnitude")?,
                    cov_scale: field(s, get(2), "covariance scale")?,
                }
            }
            "hypercube" => {
                arity(s, &args, 1)?;
                ModelSpec::Hypercube { radius: field(s, get(0), "radius")? }
            }
            "pair" => {
                arity(s, &args, 3)?;
                ModelSpec::Pair {
                    i: field(s, get(0), "first coordinate")?,
                    j: field(s, get(1), "second coordinate")?,
                    rho: field(s, get(2), "correlation")?,
                }
            }
            _ => return Err(CliError::input(format!("unknown model `{s}`"))),
        };
        spec.validate(s)?;
        Ok(spec)
    }
}

impl ModelSpec {
    fn validate(&self, s: &str) -> Result<(), CliError> {
        let ok = match *self {
            ModelSpec::Mirrored => true,
            ModelSpec::Point { value, .. } => value.is_finite(),
            ModelSpec::Decoys { count, magnitude, cov_scale } => {
                count > 0 && magnitude.is_finite() && cov_scale > 0.0 && cov_scale.is_finite()
            }
            ModelSpec::Hypercube { radius } => radius > 0.0 && radius.is_finite(),
            ModelSpec::Pair { i, j, rho } => i != j && rho.abs() < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::input(format!("model spec `{s}` is out of range")))
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Mirrored => write!(f, "mirrored"),
            ModelSpec::Point { coord, value } => write!(f, "point:{coord}:{value:?}"),
            ModelSpec::Decoys { count, magnitude, cov_scale } => {
                write!(f, "decoys:{count}:{magnitude:?}:{cov_scale:?}")
            }
            ModelSpec::Hypercube { radius } => write!(f, "hypercube:{radius:?}"),
            ModelSpec::Pair { i, j, rho } => write!(f, "pair:{i}:{j}:{rho:?}"),
        }
    }
}

/// Text form of a [`HalfspaceAdversary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarySpec(pub HalfspaceAdversary);

impl FromStr for AdversarySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (head, args) = split(s);
        let adv = match head {
            "flip" => {
                arity(s, &args, 0)?;
                HalfspaceAdversary::LabelFlip
            }
            "random" => {
                arity(s, &args, 0)?;
                HalfspaceAdversary::RandomLabels
            }
            "shifted" => {
                arity(s, &args, 1)?;
                let magnitude: f64 = field(s, args.first().copied(), "magnitude")?;
                if !magnitude.is_finite() {
                    return Err(CliError::input(format!("adversary `{s}` needs a finite shift")));
                }
                HalfspaceAdversary::ShiftedDecoy { magnitude }
            }
            _ => return Err(CliError::input(format!("unknown adversary `{s}`"))),
        };
        Ok(AdversarySpec(adv))
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            HalfspaceAdversary::LabelFlip => write!(f, "flip"),
            HalfspaceAdversary::RandomLabels => write!(f, "random"),
            HalfspaceAdversary::ShiftedDecoy { magnitude } => write!(f, "shifted:{magnitude:?}"),
        }
    }
}

/// Parses `a..b` (half-open) or a comma-separated list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::input(format!("bad seed list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    let seeds = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect::<Result<Vec<u64>, _>>()?;
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}
