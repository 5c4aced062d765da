//! Representations of the two-layer quiver with vertices `v_1…v_{j₀}` and
//! `w_1…w_{j₀}`, and `dim H_ij` arrows `v_i → w_j`, together with King's
//! θ-stability.
//!
//! A representation assigns spaces `V_i`, `W_j` and, for every arrow, a
//! matrix `V_i → W_j`. A submodule is a tuple of subspaces `(V'_i, W'_j)`
//! with every arrow mapping `V'_i` into `W'_j`.

mod rep;
mod stability;

pub use rep::{is_isomorphic, IsoResult, Representation, Submodule};
pub use stability::{
    hn_filtration, hn_filtration_descending, jh_filtration, s_equivalent, semistability_check, HnStep, JhFiltration,
    Outcome, SEquivalence, Strategy, DEFAULT_SUBSPACE_CAP,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, Scalar};
use crate::sheaf::{SheafClass, SheafError, StabilityParameter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("θ is undefined: Σσ_j d_j1 or Σσ_j d_j2 vanishes")]
    ZeroDenominator,
    #[error("slope is undefined for a module whose weighted dimensions both vanish")]
    UndefinedSlope,
    #[error("enumeration needs {count} candidates, above the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("representation is not semistable")]
    NotSemistable,
    #[error("this operation needs a strictly positive stability parameter")]
    NeedsPositive,
    #[error("exhaustive search needs a finite field")]
    NeedsFiniteField,
    #[error("expected dimension vector: {0}")]
    DimVector(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverSpec {
    pub j0: usize,
    /// `h[i][j] = dim H_ij`, the number of arrows `v_i → w_j`.
    pub h: Vec<Vec<usize>>,
}

impl QuiverSpec {
    pub fn new(h: Vec<Vec<usize>>) -> Result<Self, QuiverError> {
        let spec = QuiverSpec { j0: h.len(), h };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), QuiverError> {
        if self.j0 == 0 || self.h.len() != self.j0 || self.h.iter().any(|r| r.len() != self.j0) {
            return Err(QuiverError::Shape(format!("h must be a {0}×{0} matrix", self.j0)));
        }
        if self.h.iter().flatten().all(|&x| x == 0) {
            return Err(QuiverError::Shape("quiver has no arrows".into()));
        }
        Ok(())
    }
}

/// Dimensions `(dim V_i, dim W_i)`; the flat form interleaves them as
/// `(d_11, d_12, d_21, d_22, …)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimVector {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

impl DimVector {
    pub fn new(v: Vec<usize>, w: Vec<usize>) -> Self {
        assert_eq!(v.len(), w.len(), "one V and one W dimension per index");
        DimVector { v, w }
    }

    pub fn from_flat(flat: &[usize]) -> Result<Self, QuiverError> {
        if flat.len() % 2 != 0 {
            return Err(QuiverError::Shape("dimension vector needs an even length".into()));
        }
        Ok(DimVector {
            v: flat.iter().step_by(2).copied().collect(),
            w: flat.iter().skip(1).step_by(2).copied().collect(),
        })
    }

    pub fn flat(&self) -> Vec<usize> {
        self.v.iter().zip(&self.w).flat_map(|(&a, &b)| [a, b]).collect()
    }

    pub fn j0(&self) -> usize {
        self.v.len()
    }

    pub fn total(&self) -> usize {
        self.v.iter().sum::<usize>() + self.w.iter().sum::<usize>()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }

    pub fn minus(&self, other: &DimVector) -> DimVector {
        DimVector {
            v: self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect(),
            w: self.w.iter().zip(&other.w).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Serialize for DimVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.flat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DimVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let flat = Vec::<usize>::deserialize(d)?;
        DimVector::from_flat(&flat).map_err(serde::de::Error::custom)
    }
}

/// A slope in `[0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Finite(Scalar),
    Infinite,
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Slope::Finite(x) => write!(f, "{x}"),
            Slope::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn weighted(sigma: &[Scalar], dims: &[usize]) -> Scalar {
    sigma.iter().zip(dims).map(|(s, &d)| s * Scalar::int(d as i64)).sum()
}

fn check_len(sigma: &StabilityParameter, d: &DimVector) -> Result<(), QuiverError> {
    if sigma.len() != d.j0() {
        return Err(QuiverError::Shape(format!(
            "σ has {} entries, dimension vector {}",
            sigma.len(),
            d.j0()
        )));
    }
    Ok(sigma.validate()?)
}

/// `θ_σ = (θ_{11}, θ_{12}, …)` with `θ_{j1} = σ_j/Σσ_i d_{i1}` and
/// `θ_{j2} = −σ_j/Σσ_i d_{i2}`, interleaved like the flat dimension vector.
pub fn theta_vector(sigma: &StabilityParameter, d: &DimVector) -> Result<Vec<Scalar>, QuiverError> {
    check_len(sigma, d)?;
    let s1 = weighted(&sigma.0, &d.v);
    let s2 = weighted(&sigma.0, &d.w);
    if s1.is_zero() || s2.is_zero() {
        return Err(QuiverError::ZeroDenominator);
    }
    Ok(sigma.0.iter().flat_map(|s| [s / &s1, -(s / &s2)]).collect())
}

/// `θ(M') = Σ θ_{j1} dim V'_j + Σ θ_{j2} dim W'_j`.
pub fn theta_of(sub: &DimVector, theta: &[Scalar]) -> Scalar {
    sub.flat()
        .iter()
        .zip(theta)
        .map(|(&d, t)| t * Scalar::int(d as i64))
        .sum()
}

/// `μ = Σσ_j dim V'_j / Σσ_j dim W'_j ∈ [0, ∞]`.
pub fn slope_mu(sigma: &StabilityParameter, sub: &DimVector) -> Result<Slope, QuiverError> {
    check_len(sigma, sub)?;
    slope_raw(&sigma.0, sub)
}

pub(crate) fn slope_raw(sigma: &[Scalar], sub: &DimVector) -> Result<Slope, QuiverError> {
    let num = weighted(sigma, &sub.v);
    let den = weighted(sigma, &sub.w);
    match (num.is_zero(), den.is_zero()) {
        (true, true) => Err(QuiverError::UndefinedSlope),
        (false, true) => Ok(Slope::Infinite),
        _ => Ok(Slope::Finite(num / den)),
    }
}

/// Zero on every `V'_j`, and zero on `W'_i` wherever `σ_i ≠ 0`.
pub fn is_degenerate(sub: &DimVector, sigma: &StabilityParameter) -> bool {
    sub.v.iter().all(|&x| x == 0) && sub.w.iter().zip(&sigma.0).all(|(&w, s)| w == 0 || s.is_zero())
}

/// Exponents of the character `χ_θ`, i.e. `−θ_σ`.
pub fn character_of(sigma: &StabilityParameter, d: &DimVector) -> Result<Vec<Scalar>, QuiverError> {
    Ok(theta_vector(sigma, d)?.into_iter().map(|t| -t).collect())
}

/// `(P_1(n), P_1(m), …, P_{j₀}(n), P_{j₀}(m))` for the sheaf's per-bundle
/// Hilbert polynomials.
pub fn expected_dimvec(e: &SheafClass, n: i64, m: i64) -> Result<DimVector, QuiverError> {
    if m <= n {
        return Err(QuiverError::DimVector(format!("need m > n, got n = {n}, m = {m}")));
    }
    let as_dim = |x: Scalar, at: i64| -> Result<usize, QuiverError> {
        match x.to_i64() {
            Some(v) if v > 0 => Ok(v as usize),
            _ => Err(QuiverError::DimVector(format!(
                "P({at}) = {x} is not a positive integer; n and m may be too small"
            ))),
        }
    };
    let mut v = Vec::new();
    let mut w = Vec::new();
    for j in 0..e.j0() {
        let p = e.hilbert(j);
        v.push(as_dim(p.eval_int(n)?, n)?);
        w.push(as_dim(p.eval_int(m)?, m)?);
    }
    Ok(DimVector { v, w })
}
