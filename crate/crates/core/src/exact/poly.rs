use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, FieldKind, Scalar};

/// Univariate polynomial in `m` with exact coefficients; `coeffs[i]` is the
/// coefficient of `m^i`. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·m^deg`.
    pub fn monomial(c: Scalar, deg: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); deg];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// Field spanned by the coefficients.
    pub fn field(&self) -> Result<FieldKind, ExactError> {
        self.coeffs
            .iter()
            .try_fold(FieldKind::Rational, |k, c| k.join(c.field()))
    }

    pub fn try_add(&self, rhs: &Poly) -> Result<Poly, ExactError> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeff(i).try_add(&rhs.coeff(i)))
            .collect::<Result<_, _>>()?;
        Ok(Poly::new(coeffs))
    }

    pub fn try_sub(&self, rhs: &Poly) -> Result<Poly, ExactError> {
        self.try_add(&-rhs)
    }

    pub fn try_mul(&self, rhs: &Poly) -> Result<Poly, ExactError> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Poly::zero());
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].try_add(&a.try_mul(b)?)?;
            }
        }
        Ok(Poly::new(out))
    }

    pub fn try_scale(&self, c: &Scalar) -> Result<Poly, ExactError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<_, _>>()?;
        Ok(Poly::new(coeffs))
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, m: &Scalar) -> Result<Scalar, ExactError> {
        self.coeffs
            .iter()
            .rev()
            .try_fold(Scalar::zero(), |acc, c| acc.try_mul(m)?.try_add(c))
    }

    pub fn eval_int(&self, m: i64) -> Result<Scalar, ExactError> {
        self.eval(&Scalar::int(m))
    }

    /// `m ↦ p(t·m)`.
    pub fn rescale_argument(&self, t: &Scalar) -> Result<Poly, ExactError> {
        let mut power = Scalar::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.try_mul(&power)?);
            power = power.try_mul(t)?;
        }
        Ok(Poly::new(coeffs))
    }
}

/// Eventual ordering of `p(m)` and `q(m)` as `m → ∞`: lexicographic on the
/// coefficients from the top degree down. `Equal` exactly when the two
/// coefficient sequences coincide.
pub fn poly_compare(p: &Poly, q: &Poly) -> Result<Ordering, ExactError> {
    p.field()?.join(q.field()?)?;
    let diff = p.try_sub(q)?;
    Ok(diff.leading().map_or(Ordering::Equal, Scalar::signum))
}

/// Smallest non-negative integer `m₀` such that `sign p(m) = sign lead(p)`
/// for every integer `m ≥ m₀`.
///
/// Every real root lies below both the Cauchy bound `1 + max |c_i/c_d|` and
/// the Fujiwara bound `2·max |c_{d−i}/c_d|^{1/i}` (with `c_0` halved); the
/// smaller one is scanned downward for the last integer where the sign
/// disagrees.
pub fn eventual_sign_threshold(p: &Poly) -> Result<u64, ExactError> {
    let lead = p.leading().ok_or(ExactError::ZeroPolynomial)?;
    p.field()?;
    let d = p.coeffs.len() - 1;
    let lead_abs = lead.abs();
    let mut cauchy = BigInt::zero();
    let mut fujiwara = BigInt::zero();
    for (k, c) in p.coeffs[..d].iter().enumerate() {
        let mut r = c.abs().try_div(&lead_abs)?;
        cauchy = cauchy.max(r.ceil());
        if k == 0 {
            r = r.try_div(&Scalar::int(2))?;
        }
        fujiwara = fujiwara.max(root_ceil(&r.ceil(), (d - k) as u32));
    }
    let bound = (cauchy + BigInt::one()).min(fujiwara * 2 + BigInt::one());
    let bound: u64 = bound.try_into().map_err(|_| ExactError::BoundTooLarge)?;
    let want = lead.signum();
    for m in (0..bound).rev() {
        if p.eval(&Scalar::int(m as i64))?.signum() != want {
            return Ok(m + 1);
        }
    }
    Ok(0)
}

/// `⌈n^{1/k}⌉` for `n ≥ 0`.
fn root_ceil(n: &BigInt, k: u32) -> BigInt {
    let r = n.nth_root(k);
    if r.pow(k) < *n {
        r + 1
    } else {
        r
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})·m")?,
                _ => write!(f, "({c})·m^{i}")?,
            }
        }
        Ok(())
    }
}

/// `1/k!` as an exact scalar.
pub fn inv_factorial(k: usize) -> Scalar {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    Scalar::one() / Scalar::from_bigint(f)
}

pub fn factorial(k: usize) -> Scalar {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    Scalar::from_bigint(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[&str]) -> Poly {
        Poly::new(cs.iter().map(|c| c.parse().unwrap()).collect())
    }

    #[test]
    fn compare_examples() {
        let m2 = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(poly_compare(&m2, &m2).unwrap(), Ordering::Equal);
        let a = Poly::from_ints(&[0, 4, 1]);
        let b = Poly::from_ints(&[0, 5, 1]);
        assert_eq!(poly_compare(&a, &b).unwrap(), Ordering::Less);
        let cubic = p(&["0", "1", "0", "1/6"]);
        let quad = Poly::from_ints(&[0, 0, 100]);
        assert_eq!(poly_compare(&cubic, &quad).unwrap(), Ordering::Greater);
        // Evaluation at m = 10^4 agrees with the eventual ordering.
        let m = Scalar::int(10_000);
        assert!(cubic.eval(&m).unwrap() > quad.eval(&m).unwrap());
    }

    #[test]
    fn compare_rejects_mixed_fields() {
        let a = p(&["√2"]);
        let b = p(&["√3"]);
        assert!(matches!(poly_compare(&a, &b), Err(ExactError::MixedFields(..))));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(eventual_sign_threshold(&Poly::from_ints(&[-5, 1])).unwrap(), 6);
        assert_eq!(eventual_sign_threshold(&Poly::from_ints(&[0, 0, 1])).unwrap(), 1);
        assert_eq!(eventual_sign_threshold(&Poly::from_ints(&[7])).unwrap(), 0);
        assert!(matches!(
            eventual_sign_threshold(&Poly::zero()),
            Err(ExactError::ZeroPolynomial)
        ));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::from_ints(&[1, 0, 1]).eval_int(2).unwrap(), Scalar::int(5));
        assert_eq!(Poly::zero().eval_int(17).unwrap(), Scalar::zero());
        let cube = p(&["0", "0", "0", "1/6"]);
        assert_eq!(cube.eval_int(3).unwrap(), Scalar::frac(9, 2));
    }

    #[test]
    fn trims_trailing_zeros() {
        let q = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(q.degree(), Some(1));
        assert!(Poly::from_ints(&[0, 0]).is_zero());
    }
}
