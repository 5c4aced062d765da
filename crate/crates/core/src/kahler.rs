//! Writing a real ample class `ω` as a positive combination of rational
//! ample classes that also reproduces `ω²`, and Hilbert polynomials taken
//! with respect to `ω`.

use num::{BigInt, BigRational, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{ConeError, DivisorClass, IntersectionTensor, SymForm};
use crate::exact::{factorial, inv_factorial, ExactError, FieldKind, Poly, Scalar};
use crate::field::ExactField;
use crate::linalg::{self, combinations, Mat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KahlerError {
    #[error("τ and θ must be positive")]
    NonPositive,
    #[error("ω is not in the open cone spanned by the candidates; supply more candidates")]
    OmegaOutsideCone,
    #[error("ω² is not in the open cone spanned by the candidate squares")]
    SquareOutsideCone,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("decomposition failed verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Split {
    pub lambda: Scalar,
    pub sigma: Scalar,
    pub sigma_prime: Scalar,
}

/// Positive `σ, σ'` and rational `λ > 0` with `σ + σ'λ = τ` and
/// `σ + σ'λ² = θ`; `λ ≠ 1` unless `τ = θ`.
///
/// For `θ > τ` the choice is `λ = ⌈2θ/τ⌉`, for `θ < τ` it is
/// `λ = 1/⌈2τ/θ⌉`, and for `θ = τ` the split is `λ = 1`, `σ = σ' = τ/2`.
pub fn split_pair(tau: &Scalar, theta: &Scalar) -> Result<Split, KahlerError> {
    if !tau.is_positive() || !theta.is_positive() {
        return Err(KahlerError::NonPositive);
    }
    tau.field().join(theta.field())?;
    let one = Scalar::one();
    let lambda = match theta.try_cmp(tau)? {
        std::cmp::Ordering::Equal => {
            let half = tau / Scalar::int(2);
            return Ok(Split {
                lambda: one,
                sigma: half.clone(),
                sigma_prime: half,
            });
        }
        std::cmp::Ordering::Greater => Scalar::from_bigint((Scalar::int(2) * theta / tau).ceil()),
        std::cmp::Ordering::Less => one.clone() / Scalar::from_bigint((Scalar::int(2) * tau / theta).ceil()),
    };
    let sigma_prime = (theta - tau) / (&lambda * &lambda - &lambda);
    let sigma = (tau * &lambda - theta) / (&lambda - &one);
    Ok(Split {
        lambda,
        sigma,
        sigma_prime,
    })
}

/// The split for a prescribed rational `λ > 0`, `λ ≠ 1`; fails unless both
/// weights come out positive (which needs `λ` on the same side of `1` as
/// `θ/τ`, and beyond it).
pub fn split_pair_with(tau: &Scalar, theta: &Scalar, lambda: &Scalar) -> Result<Split, KahlerError> {
    if !tau.is_positive() || !theta.is_positive() {
        return Err(KahlerError::NonPositive);
    }
    if !lambda.is_rational() || !lambda.is_positive() || lambda == &Scalar::one() {
        return Err(KahlerError::Invalid("λ must be a positive rational other than 1".into()));
    }
    let one = Scalar::one();
    let sigma_prime = (theta - tau) / (lambda * lambda - lambda);
    let sigma = (tau * lambda - theta) / (lambda - &one);
    if !sigma.is_positive() || !sigma_prime.is_positive() {
        return Err(KahlerError::Invalid(format!("λ = {lambda} gives non-positive weights")));
    }
    Ok(Split {
        lambda: lambda.clone(),
        sigma,
        sigma_prime,
    })
}

/// Checks `σ + σ'λ = τ`, `σ + σ'λ² = θ` and positivity.
pub fn verify_split(tau: &Scalar, theta: &Scalar, s: &Split) -> bool {
    &s.sigma + &s.sigma_prime * &s.lambda == *tau
        && &s.sigma + &s.sigma_prime * &s.lambda * &s.lambda == *theta
        && s.sigma.is_positive()
        && s.sigma_prime.is_positive()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaDecomposition {
    pub classes: Vec<DivisorClass>,
    pub weights: Vec<Scalar>,
    /// `Σ σ_j L_j = ω` re-verified.
    pub linear_identity: bool,
    /// `Σ σ_j L_j² = ω²` re-verified against every monomial of degree `n − 2`.
    pub square_identity: bool,
    /// Rank of `σ ↦ (Σσ_j L_j, Σσ_j L_j²)` at the output.
    pub rank: usize,
    pub rank_target: usize,
    pub warnings: Vec<String>,
}

impl OmegaDecomposition {
    pub fn j0(&self) -> usize {
        self.classes.len()
    }

    pub fn rank_maximal(&self) -> bool {
        self.rank == self.rank_target
    }
}

/// Multisets of size `k` over `0..rho`.
fn monomials(rho: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, rho: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..rho {
            cur.push(i);
            go(i, rho, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, rho, k, &mut Vec::new(), &mut out);
    out
}

fn unit(rho: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); rho];
    v[i] = Scalar::one();
    v
}

/// `x² · m` for every monomial `m` of degree `n − 2`.
fn square_pairings(t: &IntersectionTensor, x: &[Scalar]) -> Result<Vec<Scalar>, KahlerError> {
    let sq = t.form().contract(x)?.contract(x)?;
    monomials(t.rho(), t.n() - 2)
        .iter()
        .map(|m| {
            let units: Vec<Vec<Scalar>> = m.iter().map(|&i| unit(t.rho(), i)).collect();
            let refs: Vec<&[Scalar]> = units.iter().map(Vec::as_slice).collect();
            Ok(sq.eval(&refs)?)
        })
        .collect()
}

fn field_of<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> Result<FieldKind, ExactError> {
    xs.into_iter().try_fold(FieldKind::Rational, |k, x| k.join(x.field()))
}

/// A non-negative solution of `Σ_j x_j cols[j] = target`, found among
/// basic solutions supported on linearly independent column subsets.
fn nonneg_solution(cols: &[Vec<Scalar>], target: &[Scalar]) -> Result<Option<Vec<Scalar>>, ExactError> {
    let dim = target.len();
    let kind = field_of(cols.iter().flatten().chain(target))?;
    let f = ExactField(kind);
    let full = Mat::from_cols(dim, cols);
    let r = linalg::rank(&f, &full);
    for subset in combinations(cols.len(), r) {
        let sub: Vec<Vec<Scalar>> = subset.iter().map(|&j| cols[j].clone()).collect();
        let m = Mat::from_cols(dim, &sub);
        if linalg::rank(&f, &m) < r {
            continue;
        }
        let Some(x) = linalg::solve(&f, &m, target) else { continue };
        if x.iter().any(Scalar::is_negative) {
            continue;
        }
        let mut out = vec![Scalar::zero(); cols.len()];
        for (&j, v) in subset.iter().zip(x) {
            out[j] = v;
        }
        return Ok(Some(out));
    }
    Ok(None)
}

const MAX_HALVINGS: u32 = 40;

/// A strictly positive solution of `Σ_j x_j cols[j] = target`: for each `j`
/// find `t > 0` with `target − t·cols[j]` non-negatively representable, then
/// average the resulting representations.
fn positive_solution(cols: &[Vec<Scalar>], target: &[Scalar]) -> Result<Option<Vec<Scalar>>, ExactError> {
    let k = cols.len();
    let mut acc = vec![Scalar::zero(); k];
    for j in 0..k {
        let mut t = Scalar::one();
        let mut found = None;
        for _ in 0..MAX_HALVINGS {
            let shifted: Vec<Scalar> = target.iter().zip(&cols[j]).map(|(a, c)| a - &t * c).collect();
            if let Some(mut x) = nonneg_solution(cols, &shifted)? {
                x[j] = &x[j] + &t;
                found = Some(x);
                break;
            }
            t = t / Scalar::int(2);
        }
        let Some(x) = found else { return Ok(None) };
        for (a, v) in acc.iter_mut().zip(x) {
            *a = &*a + v;
        }
    }
    let kk = Scalar::int(k as i64);
    Ok(Some(acc.into_iter().map(|a| a / &kk).collect()))
}

/// Moves `a` along the kernel of the column matrix so that no entry equals
/// the matching entry of `b`, keeping every entry positive.
fn separate(cols: &[Vec<Scalar>], a: &[Scalar], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let dim = cols.first()?.len();
    let kind = field_of(cols.iter().flatten()).ok()?;
    let f = ExactField(kind);
    let kernel = linalg::null_space(&f, &Mat::from_cols(dim, cols));
    if kernel.is_empty() {
        return None;
    }
    // Directions Σ_k m^k·kernel_k: for each coordinate that some kernel
    // vector moves, at most kernel.len() − 1 values of m miss it.
    for m in 1..=(kernel.len() * a.len() + 1) as i64 {
        let m = Scalar::int(m);
        let mut dir = vec![Scalar::zero(); a.len()];
        let mut coef = Scalar::one();
        for v in &kernel {
            for (d, x) in dir.iter_mut().zip(v) {
                *d = &*d + &coef * x;
            }
            coef = &coef * &m;
        }
        if a.iter().zip(b).zip(&dir).any(|((x, y), d)| x == y && d.is_zero()) {
            continue;
        }
        let mut eps = Scalar::one();
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<Scalar> = a.iter().zip(&dir).map(|(x, d)| x + &eps * d).collect();
            if cand.iter().all(Scalar::is_positive) && cand.iter().zip(b).all(|(x, y)| x != y) {
                return Some(cand);
            }
            eps = eps / Scalar::int(2);
        }
    }
    None
}

/// Rational ample classes `L_j` and positive weights `σ_j` with
/// `Σσ_j L_j = ω` and `Σσ_j L_j² = ω²`.
///
/// Each candidate `C_j` receives a positive weight `τ_j` in a representation
/// of `ω` and `θ_j` in a representation of `ω²` by the squares `C_j²`; the
/// pair `(C_j, λ_j C_j)` with the weights from [`split_pair`] then carries
/// `τ_j` linearly and `θ_j` quadratically.
pub fn decompose_omega(
    t: &IntersectionTensor,
    omega: &[Scalar],
    candidates: &[DivisorClass],
) -> Result<OmegaDecomposition, KahlerError> {
    let rho = t.rho();
    if omega.len() != rho || candidates.iter().any(|c| c.len() != rho) {
        return Err(KahlerError::Invalid(format!("classes must have {rho} coordinates")));
    }
    if candidates.iter().flatten().any(|x| !x.is_rational()) {
        return Err(KahlerError::Invalid("candidate classes must be rational".into()));
    }
    let omega_sq = square_pairings(t, omega)?;
    let rank_target = rho + omega_sq.len();
    let mut warnings = Vec::new();

    if let Some(c) = candidates.iter().find(|c| c.as_slice() == omega) {
        return finish(t, omega, &omega_sq, vec![c.clone()], vec![Scalar::one()], rank_target, warnings);
    }
    if candidates.len() < rho + 1 {
        return Err(KahlerError::Invalid(format!("need at least {} candidates", rho + 1)));
    }
    let kind = field_of(candidates.iter().flatten())?;
    if linalg::rank(&ExactField(kind), &Mat::from_rows(rho, candidates.to_vec())) < rho {
        return Err(KahlerError::Invalid("candidates do not span N¹".into()));
    }

    let tau = positive_solution(candidates, omega)?.ok_or(KahlerError::OmegaOutsideCone)?;
    let squares: Vec<Vec<Scalar>> = candidates
        .iter()
        .map(|c| square_pairings(t, c))
        .collect::<Result<_, _>>()?;
    let theta = positive_solution(&squares, &omega_sq)?.ok_or(KahlerError::SquareOutsideCone)?;

    let (tau, theta) = if tau.iter().zip(&theta).any(|(a, b)| a == b) {
        if let Some(moved) = separate(candidates, &tau, &theta) {
            (moved, theta)
        } else if let Some(moved) = separate(&squares, &theta, &tau) {
            (tau, moved)
        } else {
            warnings.push("some τ_j = θ_j could not be separated; λ_j = 1 used".into());
            (tau, theta)
        }
    } else {
        (tau, theta)
    };

    let mut classes = Vec::new();
    let mut weights = Vec::new();
    let mut scaled = Vec::new();
    let mut scaled_weights = Vec::new();
    for ((c, a), b) in candidates.iter().zip(&tau).zip(&theta) {
        let s = split_pair(a, b)?;
        classes.push(c.clone());
        weights.push(s.sigma);
        scaled.push(c.iter().map(|x| x * &s.lambda).collect());
        scaled_weights.push(s.sigma_prime);
    }
    classes.extend(scaled);
    weights.extend(scaled_weights);
    finish(t, omega, &omega_sq, classes, weights, rank_target, warnings)
}

fn finish(
    t: &IntersectionTensor,
    omega: &[Scalar],
    omega_sq: &[Scalar],
    classes: Vec<DivisorClass>,
    weights: Vec<Scalar>,
    rank_target: usize,
    mut warnings: Vec<String>,
) -> Result<OmegaDecomposition, KahlerError> {
    let rho = t.rho();
    let mut lin = vec![Scalar::zero(); rho];
    let mut sq = vec![Scalar::zero(); omega_sq.len()];
    let mut columns = Vec::new();
    for (c, w) in classes.iter().zip(&weights) {
        if !w.is_positive() {
            return Err(KahlerError::Verification("non-positive weight".into()));
        }
        let s = square_pairings(t, c)?;
        for (l, x) in lin.iter_mut().zip(c) {
            *l = &*l + w * x;
        }
        for (q, x) in sq.iter_mut().zip(&s) {
            *q = &*q + w * x;
        }
        let mut col = c.clone();
        col.extend(s);
        columns.push(col);
    }
    let linear_identity = lin == omega;
    let square_identity = sq == omega_sq;
    if !linear_identity || !square_identity {
        return Err(KahlerError::Verification("identities do not hold".into()));
    }
    let rank = linalg::rank(&ExactField(FieldKind::Rational), &Mat::from_cols(rank_target, &columns));
    if rank < rank_target {
        warnings.push(format!("rank {rank} below {rank_target}: openness certificate unavailable"));
    }
    Ok(OmegaDecomposition {
        classes,
        weights,
        linear_identity,
        square_identity,
        rank,
        rank_target,
        warnings,
    })
}

/// Intersection data of `ch(E)·Todd(X)`: `terms[k]` is a symmetric form of
/// degree `k` with `terms[k](ω, …, ω) = ∫ (ch·Td)_{n−k} ω^k` for
/// `k = 0..n−1`; the top term is `rank·ω^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChTdPairing {
    pub rank: Scalar,
    pub terms: Vec<SymForm>,
}

/// `P^ω(m) = ∫ ch(E) e^{mω} Td(X) = Σ_k (terms[k](ω^k)) m^k/k!`.
pub fn hilbert_poly_omega(t: &IntersectionTensor, data: &ChTdPairing, omega: &[Scalar]) -> Result<Poly, KahlerError> {
    let n = t.n();
    if data.terms.len() != n {
        return Err(KahlerError::Invalid(format!(
            "pairing data needs {n} terms of degrees 0..{}, got {}",
            n - 1,
            data.terms.len()
        )));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for (k, form) in data.terms.iter().enumerate() {
        if form.degree() != k || form.rho() != t.rho() {
            return Err(KahlerError::Invalid(format!("term {k} must be a degree-{k} form on N¹")));
        }
        coeffs.push(form.eval_power(omega)? * inv_factorial(k));
    }
    coeffs.push(&data.rank * t.volume(omega)? * inv_factorial(n));
    Ok(Poly::new(coeffs))
}

/// Coefficients `α_k` (`P = Σ α_k m^k/k!`) of [`hilbert_poly_omega`].
pub fn hilbert_alpha(t: &IntersectionTensor, data: &ChTdPairing, l: &[Scalar]) -> Result<Vec<Scalar>, KahlerError> {
    let p = hilbert_poly_omega(t, data, l)?;
    Ok((0..=t.n()).map(|k| p.coeff(k) * factorial(k)).collect())
}

/// Short rational approximation from below, used for reporting only.
pub fn approx_decimal(x: &Scalar, digits: u32) -> String {
    let scaled = x.scaled_floor(digits);
    let ten = BigInt::from(10).pow(digits);
    let q = BigRational::new(scaled, ten);
    let sign = if q.is_negative() { "-" } else { "" };
    let a = q.abs();
    let int = a.to_integer();
    let frac = ((a - BigRational::from_integer(int.clone())) * BigRational::from_integer(BigInt::from(10).pow(digits)))
        .to_integer();
    format!("{sign}{int}.{frac:0>width$}", width = digits as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::example;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn split_examples() {
        let sp = split_pair(&s("1"), &s("1")).unwrap();
        assert_eq!((sp.lambda, sp.sigma, sp.sigma_prime), (s("1"), s("1/2"), s("1/2")));
        let sp = split_pair(&s("1"), &s("2")).unwrap();
        assert_eq!((sp.lambda, sp.sigma, sp.sigma_prime), (s("4"), s("2/3"), s("1/12")));
        let sp = split_pair(&s("2"), &s("1")).unwrap();
        assert_eq!((sp.lambda, sp.sigma, sp.sigma_prime), (s("1/4"), s("2/3"), s("16/3")));
        assert!(split_pair(&s("0"), &s("1")).is_err());
        let sp = split_pair_with(&s("1"), &s("2"), &s("3")).unwrap();
        assert!(verify_split(&s("1"), &s("2"), &sp));
        assert!(split_pair_with(&s("1"), &s("2"), &s("3/2")).is_err());
        let sp = split_pair(&s("√2"), &s("1")).unwrap();
        assert_eq!(&sp.sigma + &sp.sigma_prime * &sp.lambda, s("√2"));
    }

    #[test]
    fn trivial_decomposition() {
        let t = example("P1xP1").unwrap().tensor;
        let c = vec![s("1"), s("2")];
        let d = decompose_omega(&t, &c, &[c.clone(), vec![s("1"), s("1")]]).unwrap();
        assert_eq!(d.weights, vec![s("1")]);
    }

    #[test]
    fn p1p1_sqrt2() {
        let t = example("P1xP1").unwrap().tensor;
        let omega = vec![s("1"), s("√2")];
        let cands: Vec<Vec<Scalar>> = [[1, 1], [1, 2], [2, 1], [1, 3]]
            .iter()
            .map(|c| c.iter().map(|&x| Scalar::int(x)).collect())
            .collect();
        let d = decompose_omega(&t, &omega, &cands).unwrap();
        assert!(d.linear_identity && d.square_identity);
        assert!(d.weights.iter().all(Scalar::is_positive));
        assert!(d.classes.iter().flatten().all(Scalar::is_rational));
        assert!(d.rank_maximal());
    }

    #[test]
    fn proportional_candidates_rejected() {
        let t = example("P1xP1").unwrap().tensor;
        let cands = vec![vec![s("1"), s("1")], vec![s("2"), s("2")], vec![s("3"), s("3")]];
        assert!(decompose_omega(&t, &[s("1"), s("√2")], &cands).is_err());
    }

    #[test]
    fn p2_structure_sheaf() {
        let t = example("P2").unwrap().tensor;
        let data = ChTdPairing {
            rank: s("1"),
            terms: vec![SymForm::constant(1, s("1")), {
                let mut f = SymForm::zero(1, 1);
                f.set(&[0], s("3/2"));
                f
            }],
        };
        let p = hilbert_poly_omega(&t, &data, &[s("1")]).unwrap();
        assert_eq!(p, Poly::new(vec![s("1"), s("3/2"), s("1/2")]));
        let p2 = hilbert_poly_omega(&t, &data, &[s("2")]).unwrap();
        assert_eq!(p2, p.rescale_argument(&s("2")).unwrap());
        let short = ChTdPairing {
            rank: s("1"),
            terms: vec![SymForm::constant(1, s("1"))],
        };
        assert!(hilbert_poly_omega(&t, &short, &[s("1")]).is_err());
    }

    #[test]
    fn decimal_report() {
        assert_eq!(approx_decimal(&s("√2"), 4), "1.4142");
        assert_eq!(approx_decimal(&s("-1/4"), 2), "-0.25");
    }
}
