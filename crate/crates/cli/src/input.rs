use std::fmt;

use mu_entropy::exp_integrals::PLConvexFunction;
use mu_entropy::polytope::{Polytope, PolytopeJson};
use mu_entropy::toric_metric::SymplecticPotential1D;
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, or parameters outside the domain.
    Schema(String),
    /// A computation failed on valid input.
    Numeric(String),
    /// `verify` found failing criteria.
    Verify(Vec<String>),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) | CliError::Numeric(m) => f.write_str(m),
            CliError::Verify(ids) => write!(f, "failed criteria: {}", ids.join(", ")),
        }
    }
}

impl From<mu_entropy::Error> for CliError {
    fn from(e: mu_entropy::Error) -> Self {
        if e.is_input_error() {
            CliError::Schema(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `arg` as inline JSON when it starts with `{`, otherwise reads it
/// as a file path.
pub fn load_json<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Schema(format!("{what}: cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{what}: {e}")))
}

pub fn polytope(arg: &str) -> CliResult<Polytope> {
    let j: PolytopeJson = load_json(arg, "polytope")?;
    Ok(j.build()?)
}

pub fn pl_function(arg: &str, dim: usize) -> CliResult<PLConvexFunction> {
    let raw: PLConvexFunction = load_json(arg, "q")?;
    let q = PLConvexFunction::new(raw.pieces)?;
    if q.dim() != dim {
        return Err(CliError::Schema(format!("q has dimension {}, polytope has dimension {dim}", q.dim())));
    }
    Ok(q)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbJson {
    a: Option<f64>,
    #[serde(default)]
    coefficients: Vec<f64>,
}

/// The Fubini-Study potential on `[0, a]`, optionally perturbed by a
/// Chebyshev series read from `perturb`.
pub fn potential(a: Option<f64>, perturb: Option<&str>) -> CliResult<SymplecticPotential1D> {
    let (pa, coeffs) = match perturb {
        Some(arg) => {
            let j: PerturbJson = load_json(arg, "perturbation")?;
            (j.a, j.coefficients)
        }
        None => (None, Vec::new()),
    };
    let a = match (a, pa) {
        (Some(x), Some(y)) if (x - y).abs() > 1e-15 * x.abs().max(1.0) => {
            return Err(CliError::Schema(format!("--a {x} disagrees with the perturbation file (a = {y})")))
        }
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => 1.0,
    };
    Ok(SymplecticPotential1D::new(a, coeffs)?)
}

pub fn f64_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Schema(format!("{what}: cannot parse {t:?}"))))
        .collect()
}

/// `name=lo:hi:step` with inclusive endpoints.
pub fn grid(arg: &str, name: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Schema(format!("--grid expects {name}=lo:hi:step, got {arg:?}"));
    let (key, range) = arg.split_once('=').ok_or_else(bad)?;
    if key.trim() != name {
        return Err(bad());
    }
    let parts = f64_list(&range.replace(':', ","), "--grid")?;
    let [lo, hi, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(CliError::Schema("--grid has too many points".into()));
    }
    Ok((0..=n).map(|k| lo + step * k as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = grid("tau=0:1:0.25", "tau").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(grid("lambda=0:1:0.25", "tau").is_err());
        assert!(grid("tau=1:0:0.25", "tau").is_err());
    }

    #[test]
    fn inline_polytope() {
        let p = polytope(r#"{"dim":1,"vertices":[[0],[2]]}"#).unwrap();
        assert_eq!(p.volume_f64(), 2.0);
    }
}
