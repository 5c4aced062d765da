//! Numerical sheaf surrogates and their multi-Gieseker stability.
//!
//! A [`SheafClass`] records, for each fixed line bundle `L_j`, the Hilbert
//! coefficients `α_i^{L_j}` with `P^{L_j}(m) = Σ_i α_i^{L_j} m^i / i!`.
//! Subsheaves cannot be enumerated from this data, so every verdict is
//! relative to an explicit [`FamilySpec`] of candidate subsheaves.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::ChernData;
use crate::exact::{inv_factorial, poly_compare, ExactError, Poly, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("parameter has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("stability parameter is zero")]
    ZeroParameter,
    #[error("stability parameter has a negative entry")]
    NegativeParameter,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("candidate {0:?} is not a proper subsheaf candidate")]
    NotProper(String),
    #[error("invalid sheaf class {0:?}: {1}")]
    InvalidClass(String, String),
    #[error("multiplicity is zero")]
    ZeroMultiplicity,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafClass {
    pub label: String,
    pub dim: usize,
    pub rank: Scalar,
    /// `alpha[j][i] = α_i^{L_j}`, `i = 0..=dim`.
    pub alpha: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chern: Option<ChernData>,
}

impl SheafClass {
    pub fn new(label: impl Into<String>, dim: usize, rank: Scalar, alpha: Vec<Vec<Scalar>>) -> Result<Self, SheafError> {
        let e = SheafClass {
            label: label.into(),
            dim,
            rank,
            alpha,
            chern: None,
        };
        e.validate()?;
        Ok(e)
    }

    /// Convenience constructor from integer data.
    pub fn from_ints(label: &str, dim: usize, rank: i64, alpha: &[&[i64]]) -> Result<Self, SheafError> {
        let alpha = alpha
            .iter()
            .map(|row| row.iter().map(|&x| Scalar::int(x)).collect())
            .collect();
        SheafClass::new(label, dim, Scalar::int(rank), alpha)
    }

    pub fn j0(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<(), SheafError> {
        let bad = |msg: String| Err(SheafError::InvalidClass(self.label.clone(), msg));
        if self.alpha.is_empty() {
            return bad("no line bundles".into());
        }
        for (j, row) in self.alpha.iter().enumerate() {
            if row.len() != self.dim + 1 {
                return bad(format!("row {} has {} entries, expected {}", j + 1, row.len(), self.dim + 1));
            }
            if !row[self.dim].is_positive() {
                return bad(format!("multiplicity for L_{} must be positive", j + 1));
            }
        }
        if !self.rank.is_positive() {
            return bad("rank must be positive".into());
        }
        Ok(())
    }

    /// Hilbert polynomial with respect to the single bundle `L_j` (0-based).
    pub fn hilbert(&self, j: usize) -> Poly {
        Poly::new(
            self.alpha[j]
                .iter()
                .enumerate()
                .map(|(i, a)| a * inv_factorial(i))
                .collect(),
        )
    }

    /// `μ̂^{L_j} = α_{d−1}^{L_j}/α_d^{L_j}`.
    pub fn mu_hat_single(&self, j: usize) -> Result<Scalar, SheafError> {
        if self.dim == 0 {
            return Err(SheafError::Precondition("slope needs dim ≥ 1".into()));
        }
        Ok(self.alpha[j][self.dim - 1].try_div(&self.alpha[j][self.dim])?)
    }
}

/// `σ = (σ_1, …, σ_{j₀})`, non-negative and not all zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StabilityParameter(pub Vec<Scalar>);

impl StabilityParameter {
    pub fn new(sigma: Vec<Scalar>) -> Result<Self, SheafError> {
        let s = StabilityParameter(sigma);
        s.validate()?;
        Ok(s)
    }

    pub fn from_ints(sigma: &[i64]) -> Result<Self, SheafError> {
        Self::new(sigma.iter().map(|&x| Scalar::int(x)).collect())
    }

    pub fn validate(&self) -> Result<(), SheafError> {
        if self.0.iter().any(Scalar::is_negative) {
            return Err(SheafError::NegativeParameter);
        }
        if self.0.iter().all(Scalar::is_zero) {
            return Err(SheafError::ZeroParameter);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(Scalar::is_positive)
    }

    pub fn is_rational(&self) -> bool {
        self.0.iter().all(Scalar::is_rational)
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        StabilityParameter(self.0.iter().map(|x| x * c).collect())
    }

    /// Rescaled so the entries sum to one.
    pub fn normalized(&self) -> Self {
        let total: Scalar = self.0.iter().cloned().sum();
        StabilityParameter(self.0.iter().map(|x| x / &total).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub candidates: Vec<SheafClass>,
    #[serde(default)]
    pub relation: Vec<(String, String)>,
}

fn check_sigma(e: &SheafClass, sigma: &StabilityParameter) -> Result<(), SheafError> {
    if sigma.len() != e.j0() {
        return Err(SheafError::LengthMismatch {
            expected: e.j0(),
            got: sigma.len(),
        });
    }
    sigma.validate()
}

/// `α_i^σ = Σ_j σ_j α_i^{L_j}`.
fn alpha_sigma(e: &SheafClass, sigma: &StabilityParameter, i: usize) -> Result<Scalar, SheafError> {
    let mut acc = Scalar::zero();
    for (s, row) in sigma.0.iter().zip(&e.alpha) {
        acc = acc.try_add(&s.try_mul(&row[i])?)?;
    }
    Ok(acc)
}

/// Multiplicity `r^σ = Σ_j σ_j α_d^{L_j}`.
pub fn multiplicity(e: &SheafClass, sigma: &StabilityParameter) -> Result<Scalar, SheafError> {
    check_sigma(e, sigma)?;
    alpha_sigma(e, sigma, e.dim)
}

/// `P^σ(m) = Σ_j σ_j P^{L_j}(m)`.
pub fn multi_hilbert(e: &SheafClass, sigma: &StabilityParameter) -> Result<Poly, SheafError> {
    check_sigma(e, sigma)?;
    let coeffs = (0..=e.dim)
        .map(|i| Ok(alpha_sigma(e, sigma, i)?.try_mul(&inv_factorial(i))?))
        .collect::<Result<Vec<_>, SheafError>>()?;
    Ok(Poly::new(coeffs))
}

/// `p^σ = P^σ / r^σ`.
pub fn reduced_hilbert(e: &SheafClass, sigma: &StabilityParameter) -> Result<Poly, SheafError> {
    let r = multiplicity(e, sigma)?;
    if r.is_zero() {
        return Err(SheafError::ZeroMultiplicity);
    }
    Ok(multi_hilbert(e, sigma)?.try_scale(&r.try_inv()?)?)
}

/// `μ̂^σ = α_{d−1}^σ / r^σ`.
pub fn mu_hat(e: &SheafClass, sigma: &StabilityParameter) -> Result<Scalar, SheafError> {
    if e.dim == 0 {
        return Err(SheafError::Precondition("slope needs dim ≥ 1".into()));
    }
    let r = multiplicity(e, sigma)?;
    Ok(alpha_sigma(e, sigma, e.dim - 1)?.try_div(&r)?)
}

/// Eventual comparison of `p_F^σ` against `p_E^σ`.
pub fn compare_pair(e: &SheafClass, f: &SheafClass, sigma: &StabilityParameter) -> Result<Ordering, SheafError> {
    if e.dim != f.dim {
        return Err(SheafError::DimensionMismatch(e.dim, f.dim));
    }
    if e.j0() != f.j0() {
        return Err(SheafError::LengthMismatch {
            expected: e.j0(),
            got: f.j0(),
        });
    }
    Ok(poly_compare(&reduced_hilbert(f, sigma)?, &reduced_hilbert(e, sigma)?)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// No candidate has `p_F ≥ p_E`. `vacuous` when the family was empty.
    Stable { vacuous: bool },
    StrictlySemistable { witnesses: Vec<String> },
    Unstable { witness: String },
}

impl Verdict {
    pub fn is_semistable(&self) -> bool {
        !matches!(self, Verdict::Unstable { .. })
    }
}

fn check_candidate(e: &SheafClass, f: &SheafClass) -> Result<(), SheafError> {
    if f.dim != e.dim {
        return Err(SheafError::DimensionMismatch(e.dim, f.dim));
    }
    if f.j0() != e.j0() {
        return Err(SheafError::LengthMismatch {
            expected: e.j0(),
            got: f.j0(),
        });
    }
    if f.rank > e.rank || (f.rank == e.rank && f.alpha == e.alpha) {
        return Err(SheafError::NotProper(f.label.clone()));
    }
    Ok(())
}

/// Stability of `E` at `σ` relative to the candidate family.
pub fn verdict(e: &SheafClass, family: &FamilySpec, sigma: &StabilityParameter) -> Result<Verdict, SheafError> {
    check_sigma(e, sigma)?;
    let mut equal = Vec::new();
    for f in &family.candidates {
        check_candidate(e, f)?;
        match compare_pair(e, f, sigma)? {
            Ordering::Greater => {
                return Ok(Verdict::Unstable {
                    witness: f.label.clone(),
                })
            }
            Ordering::Equal => equal.push(f.label.clone()),
            Ordering::Less => {}
        }
    }
    Ok(if equal.is_empty() {
        Verdict::Stable {
            vacuous: family.candidates.is_empty(),
        }
    } else {
        Verdict::StrictlySemistable { witnesses: equal }
    })
}

/// Per-candidate comparisons, in family order.
pub fn verdict_vector(e: &SheafClass, family: &FamilySpec, sigma: &StabilityParameter) -> Result<Vec<Ordering>, SheafError> {
    family.candidates.iter().map(|f| compare_pair(e, f, sigma)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Direction {
    fn holds(self, a: &Scalar, b: &Scalar) -> bool {
        match self {
            Direction::AtMost => a <= b,
            Direction::AtLeast => a >= b,
        }
    }
}

/// Given `μ̂^σ(E) ≤ μ` (or `≥`), a 0-based index `j` with `σ_j ≠ 0` and
/// `μ̂^{L_j}(E) ≤ μ` (or `≥`).
pub fn mu_hat_component_bound(
    e: &SheafClass,
    sigma: &StabilityParameter,
    mu: &Scalar,
    dir: Direction,
) -> Result<usize, SheafError> {
    let total = mu_hat(e, sigma)?;
    if !dir.holds(&total, mu) {
        return Err(SheafError::Precondition(format!(
            "μ̂^σ(E) = {total} does not satisfy the requested bound against {mu}"
        )));
    }
    for j in 0..e.j0() {
        if !sigma.0[j].is_zero() && dir.holds(&e.mu_hat_single(j)?, mu) {
            return Ok(j);
        }
    }
    Err(SheafError::Precondition("no component satisfies the bound".into()))
}

/// `C = r² + (r + d)/2 − 1`.
pub fn lps_constant(r: i64, d: usize) -> Result<Scalar, SheafError> {
    if r < 1 {
        return Err(SheafError::Precondition("rank must be positive".into()));
    }
    Ok(Scalar::int(r * r) + Scalar::frac(r + d as i64, 2) - Scalar::one())
}

fn positive_part(x: Scalar) -> Scalar {
    if x.is_negative() {
        Scalar::zero()
    } else {
        x
    }
}

/// `(r−1)/d!·[μ̂_max + C + n]₊^d + 1/d!·[μ̂ + C + n]₊^d`.
pub fn lps_bound(r: i64, d: usize, mu_max: &Scalar, mu: &Scalar, c: &Scalar, n: &Scalar) -> Result<Scalar, SheafError> {
    if r < 1 {
        return Err(SheafError::Precondition("rank must be positive".into()));
    }
    if !n.is_positive() {
        return Err(SheafError::Precondition("n must be positive".into()));
    }
    let first = positive_part(mu_max + c + n).pow(d as u32);
    let second = positive_part(mu + c + n).pow(d as u32);
    Ok((Scalar::int(r - 1) * first + second) * inv_factorial(d))
}

fn weighted_sections(h0: &[Scalar], sigma: &StabilityParameter) -> Result<Scalar, SheafError> {
    if h0.len() != sigma.len() {
        return Err(SheafError::LengthMismatch {
            expected: sigma.len(),
            got: h0.len(),
        });
    }
    if h0.iter().any(Scalar::is_negative) {
        return Err(SheafError::Precondition("section counts must be non-negative".into()));
    }
    let mut acc = Scalar::zero();
    for (s, h) in sigma.0.iter().zip(h0) {
        acc = acc.try_add(&s.try_mul(h)?)?;
    }
    Ok(acc)
}

/// Compares `Σ_j σ_j h⁰_j / r^σ_{E'}` with `p_E^σ(n)`.
pub fn section_stability_test(
    h0: &[Scalar],
    sub_multiplicity: &Scalar,
    e: &SheafClass,
    sigma: &StabilityParameter,
    n: &Scalar,
) -> Result<Ordering, SheafError> {
    if sub_multiplicity.is_zero() {
        return Err(SheafError::ZeroMultiplicity);
    }
    check_sigma(e, sigma)?;
    let lhs = weighted_sections(h0, sigma)?.try_div(sub_multiplicity)?;
    let rhs = reduced_hilbert(e, sigma)?.eval(n)?;
    Ok(lhs.try_cmp(&rhs)?)
}

/// Polynomial form: compares `(Σ_j σ_j h⁰_j)·P_E^σ` with `P_E^σ(n)·P_{E'}^σ`.
pub fn section_stability_poly(
    h0: &[Scalar],
    sub: &SheafClass,
    e: &SheafClass,
    sigma: &StabilityParameter,
    n: &Scalar,
) -> Result<Ordering, SheafError> {
    check_sigma(e, sigma)?;
    if multiplicity(sub, sigma)?.is_zero() {
        return Err(SheafError::ZeroMultiplicity);
    }
    let pe = multi_hilbert(e, sigma)?;
    let lhs = pe.try_scale(&weighted_sections(h0, sigma)?)?;
    let rhs = multi_hilbert(sub, sigma)?.try_scale(&pe.eval(n)?)?;
    Ok(poly_compare(&lhs, &rhs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> SheafClass {
        SheafClass::from_ints("E", 1, 2, &[&[1, 2], &[3, 4]]).unwrap()
    }

    fn sig(xs: &[i64]) -> StabilityParameter {
        StabilityParameter::from_ints(xs).unwrap()
    }

    #[test]
    fn multi_hilbert_example() {
        let p = multi_hilbert(&e1(), &sig(&[1, 1])).unwrap();
        assert_eq!(p, Poly::from_ints(&[4, 6]));
        let p3 = multi_hilbert(&e1(), &sig(&[3, 3])).unwrap();
        assert_eq!(p3, p.try_scale(&Scalar::int(3)).unwrap());
        let one = SheafClass::from_ints("E", 1, 1, &[&[1, 2]]).unwrap();
        assert_eq!(multi_hilbert(&one, &sig(&[1])).unwrap(), one.hilbert(0));
        assert!(matches!(
            multi_hilbert(&e1(), &sig(&[1])),
            Err(SheafError::LengthMismatch { .. })
        ));
        assert!(StabilityParameter::from_ints(&[0, 0]).is_err());
    }

    #[test]
    fn reduced_and_slope() {
        let p = reduced_hilbert(&e1(), &sig(&[1, 1])).unwrap();
        assert_eq!(p.coeffs(), &[Scalar::frac(2, 3), Scalar::one()]);
        assert_eq!(mu_hat(&e1(), &sig(&[1, 1])).unwrap(), Scalar::frac(2, 3));
        let prop = SheafClass::from_ints("E", 1, 1, &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(
            reduced_hilbert(&prop, &sig(&[1, 5])).unwrap(),
            reduced_hilbert(&prop, &sig(&[2, 1])).unwrap()
        );
    }

    #[test]
    fn compare_examples() {
        let e = e1();
        assert_eq!(compare_pair(&e, &e, &sig(&[1, 1])).unwrap(), Ordering::Equal);
        let f = SheafClass::from_ints("F", 1, 1, &[&[0, 1], &[0, 1]]).unwrap();
        assert_eq!(compare_pair(&e, &f, &sig(&[1, 1])).unwrap(), Ordering::Less);
        let f2 = SheafClass::from_ints("F", 1, 1, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(compare_pair(&e, &f2, &sig(&[1, 0])).unwrap(), Ordering::Greater);
    }

    #[test]
    fn verdict_examples() {
        let e = e1();
        let mut fam = FamilySpec {
            candidates: vec![e.clone()],
            relation: vec![],
        };
        assert!(matches!(verdict(&e, &fam, &sig(&[1, 1])), Err(SheafError::NotProper(_))));
        fam.candidates = vec![SheafClass::from_ints("F", 1, 1, &[&[0, 1], &[0, 1]]).unwrap()];
        assert_eq!(verdict(&e, &fam, &sig(&[1, 1])).unwrap(), Verdict::Stable { vacuous: false });
        // Halving every α row of E gives a rank-1 class with identical reduced polynomial.
        let half = SheafClass::new(
            "H",
            1,
            Scalar::one(),
            e.alpha.iter().map(|r| r.iter().map(|x| x / Scalar::int(2)).collect()).collect(),
        )
        .unwrap();
        fam.candidates.push(half);
        assert_eq!(
            verdict(&e, &fam, &sig(&[1, 1])).unwrap(),
            Verdict::StrictlySemistable {
                witnesses: vec!["H".into()]
            }
        );
        let empty = FamilySpec::default();
        assert_eq!(verdict(&e, &empty, &sig(&[1, 1])).unwrap(), Verdict::Stable { vacuous: true });
    }

    #[test]
    fn component_bound_examples() {
        let e = SheafClass::from_ints("E", 1, 1, &[&[0, 1], &[2, 1]]).unwrap();
        let s = sig(&[1, 1]);
        assert_eq!(mu_hat_component_bound(&e, &s, &Scalar::one(), Direction::AtMost).unwrap(), 0);
        assert_eq!(mu_hat_component_bound(&e, &s, &Scalar::one(), Direction::AtLeast).unwrap(), 1);
        assert!(mu_hat_component_bound(&e, &s, &Scalar::zero(), Direction::AtMost).is_err());
    }

    #[test]
    fn lps_examples() {
        assert_eq!(lps_constant(2, 3).unwrap(), Scalar::frac(11, 2));
        assert!(lps_constant(0, 3).is_err());
        let b = lps_bound(1, 1, &Scalar::int(100), &Scalar::zero(), &Scalar::frac(1, 2), &Scalar::int(2)).unwrap();
        assert_eq!(b, Scalar::frac(5, 2));
        let neg = lps_bound(2, 2, &Scalar::int(-50), &Scalar::int(-50), &Scalar::one(), &Scalar::one()).unwrap();
        assert_eq!(neg, Scalar::zero());
    }

    #[test]
    fn section_test_examples() {
        let e = e1();
        let s = sig(&[1, 1]);
        let n = Scalar::int(10);
        let h0: Vec<Scalar> = (0..2).map(|j| e.hilbert(j).eval(&n).unwrap()).collect();
        let r = multiplicity(&e, &s).unwrap();
        assert_eq!(section_stability_test(&h0, &r, &e, &s, &n).unwrap(), Ordering::Equal);
        let half: Vec<Scalar> = h0.iter().map(|h| h / Scalar::int(2)).collect();
        assert_eq!(section_stability_test(&half, &r, &e, &s, &n).unwrap(), Ordering::Less);
        assert_eq!(section_stability_poly(&h0, &e, &e, &s, &n).unwrap(), Ordering::Equal);
        // h⁰ = (25, 45) against p_E(10) = 32/3 with r_{E'} = 3: 70/3 > 32/3.
        let h = vec![Scalar::int(25), Scalar::int(45)];
        assert_eq!(
            section_stability_test(&h, &Scalar::int(3), &e, &s, &n).unwrap(),
            Ordering::Greater
        );
        assert!(section_stability_test(&h, &Scalar::zero(), &e, &s, &n).is_err());
    }
}
