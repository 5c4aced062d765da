//! Intersection forms on `N¹(X)`, the Hodge signature, the positive cones
//! `K⁺_L(X)` and `C⁺(X)`, discriminants and path certificates for the
//! convexity of `C⁺(X)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, FieldKind, Scalar};
use crate::field::ExactField;
use crate::linalg::{self, Mat};

/// Coordinates of a divisor class in the chosen basis of `N¹(X)`.
pub type DivisorClass = Vec<Scalar>;

/// A curve class, stored as its pairing values against the basis divisors.
pub type CurveClass = Vec<Scalar>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("expected {expected} classes, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("class has {got} coordinates, Picard rank is {rho}")]
    Length { rho: usize, got: usize },
    #[error("index {0} out of range in intersection entry")]
    BadIndex(usize),
    #[error("L^(n-2)·(-) is not invertible for this class: hard Lefschetz fails")]
    Singular,
    #[error("rank must be positive")]
    NonpositiveRank,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Symmetric multilinear form of a given degree on a rank-`rho` lattice.
/// Values are keyed by sorted index multisets; missing keys are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct SymForm {
    degree: usize,
    rho: usize,
    entries: BTreeMap<Vec<usize>, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    idx: Vec<usize>,
    val: Scalar,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    degree: usize,
    rho: usize,
    entries: Vec<Entry>,
}

fn entries_out(form: &SymForm) -> Vec<Entry> {
    form.entries
        .iter()
        .map(|(k, v)| Entry {
            idx: k.iter().map(|i| i + 1).collect(),
            val: v.clone(),
        })
        .collect()
}

fn entries_in(degree: usize, rho: usize, entries: Vec<Entry>) -> Result<SymForm, String> {
    let mut form = SymForm::zero(degree, rho);
    for e in entries {
        if e.idx.len() != degree {
            return Err(format!("entry {:?} should have {degree} indices", e.idx));
        }
        if e.idx.iter().any(|&i| i == 0 || i > rho) {
            return Err(format!("entry {:?} has an index outside 1..={rho}", e.idx));
        }
        let idx: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
        form.set(&idx, e.val);
    }
    Ok(form)
}

impl From<SymForm> for FormRepr {
    fn from(f: SymForm) -> Self {
        FormRepr {
            degree: f.degree,
            rho: f.rho,
            entries: entries_out(&f),
        }
    }
}

impl TryFrom<FormRepr> for SymForm {
    type Error = String;
    fn try_from(r: FormRepr) -> Result<Self, String> {
        entries_in(r.degree, r.rho, r.entries)
    }
}

impl SymForm {
    pub fn zero(degree: usize, rho: usize) -> Self {
        SymForm {
            degree,
            rho,
            entries: BTreeMap::new(),
        }
    }

    /// Degree-0 form with the given value.
    pub fn constant(rho: usize, value: Scalar) -> Self {
        let mut f = SymForm::zero(0, rho);
        f.set(&[], value);
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    /// Sets the value at a multiset of 0-based indices (order irrelevant).
    pub fn set(&mut self, idx: &[usize], value: Scalar) {
        assert_eq!(idx.len(), self.degree, "index arity");
        let mut key = idx.to_vec();
        key.sort_unstable();
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn get(&self, idx: &[usize]) -> Scalar {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.entries.iter()
    }

    fn check_class(&self, v: &[Scalar]) -> Result<(), ConeError> {
        if v.len() != self.rho {
            return Err(ConeError::Length {
                rho: self.rho,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Inserts `v` into one slot, giving a form of one degree less.
    pub fn contract(&self, v: &[Scalar]) -> Result<SymForm, ConeError> {
        self.check_class(v)?;
        if self.degree == 0 {
            return Err(ConeError::Arity {
                expected: 0,
                got: 1,
            });
        }
        let mut out = SymForm::zero(self.degree - 1, self.rho);
        let mut acc: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        // T'(rest) = Σ_j T(j, rest) v_j: each stored multiset contributes to
        // the sub-multisets obtained by deleting one distinct index.
        for (key, val) in &self.entries {
            let mut seen = None;
            for (pos, &j) in key.iter().enumerate() {
                if seen == Some(j) || v[j].is_zero() {
                    seen = Some(j);
                    continue;
                }
                seen = Some(j);
                let mut rest = key.clone();
                rest.remove(pos);
                let term = val.try_mul(&v[j])?;
                let slot = acc.entry(rest).or_insert_with(Scalar::zero);
                *slot = slot.try_add(&term)?;
            }
        }
        for (k, val) in acc {
            out.set(&k, val);
        }
        Ok(out)
    }

    /// Full multilinear evaluation on `degree` classes.
    pub fn eval(&self, classes: &[&[Scalar]]) -> Result<Scalar, ConeError> {
        if classes.len() != self.degree {
            return Err(ConeError::Arity {
                expected: self.degree,
                got: classes.len(),
            });
        }
        let mut form = self.clone();
        for c in classes {
            form = form.contract(c)?;
        }
        Ok(form.get(&[]))
    }

    /// Evaluation with the same class in every slot.
    pub fn eval_power(&self, v: &[Scalar]) -> Result<Scalar, ConeError> {
        let classes: Vec<&[Scalar]> = (0..self.degree).map(|_| v).collect();
        self.eval(&classes)
    }

    pub fn scaled(&self, c: &Scalar) -> Result<SymForm, ConeError> {
        let mut out = SymForm::zero(self.degree, self.rho);
        for (k, v) in &self.entries {
            out.set(k, v.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn plus(&self, other: &SymForm) -> Result<SymForm, ConeError> {
        assert_eq!((self.degree, self.rho), (other.degree, other.rho));
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let cur = out.get(k);
            out.set(k, cur.try_add(v)?);
        }
        Ok(out)
    }

    /// The matrix `A_ij = T(e_i, e_j)` of a degree-2 form.
    pub fn to_matrix(&self) -> Vec<Vec<Scalar>> {
        assert_eq!(self.degree, 2, "matrix of a non-quadratic form");
        (0..self.rho)
            .map(|i| (0..self.rho).map(|j| self.get(&[i, j])).collect())
            .collect()
    }

    /// The linear functional `e_i ↦ T(e_i)` of a degree-1 form.
    pub fn to_vector(&self) -> Vec<Scalar> {
        assert_eq!(self.degree, 1, "vector of a non-linear form");
        (0..self.rho).map(|i| self.get(&[i])).collect()
    }

    /// Degree-`n − k` form obtained by contracting with `v` `k` times.
    pub fn contract_power(&self, v: &[Scalar], k: usize) -> Result<SymForm, ConeError> {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.contract(v)?;
        }
        Ok(f)
    }
}

/// Top intersection form on `N¹(X)` of an `n`-dimensional variety.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr", into = "TensorRepr")]
pub struct IntersectionTensor {
    form: SymForm,
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    n: usize,
    rho: usize,
    entries: Vec<Entry>,
}

impl From<IntersectionTensor> for TensorRepr {
    fn from(t: IntersectionTensor) -> Self {
        TensorRepr {
            n: t.form.degree,
            rho: t.form.rho,
            entries: entries_out(&t.form),
        }
    }
}

impl TryFrom<TensorRepr> for IntersectionTensor {
    type Error = String;
    fn try_from(r: TensorRepr) -> Result<Self, String> {
        if r.n < 2 {
            return Err("ambient dimension n must be at least 2".into());
        }
        if r.rho == 0 {
            return Err("Picard rank must be at least 1".into());
        }
        Ok(IntersectionTensor {
            form: entries_in(r.n, r.rho, r.entries)?,
        })
    }
}

impl IntersectionTensor {
    pub fn new(n: usize, rho: usize) -> Self {
        assert!(n >= 2 && rho >= 1);
        IntersectionTensor {
            form: SymForm::zero(n, rho),
        }
    }

    /// Builds a tensor from `(1-based indices, value)` pairs.
    pub fn from_entries(n: usize, rho: usize, entries: &[(&[usize], i64)]) -> Self {
        let mut t = IntersectionTensor::new(n, rho);
        for (idx, v) in entries {
            let idx: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            t.form.set(&idx, Scalar::int(*v));
        }
        t
    }

    pub fn n(&self) -> usize {
        self.form.degree
    }

    pub fn rho(&self) -> usize {
        self.form.rho
    }

    pub fn form(&self) -> &SymForm {
        &self.form
    }

    pub fn eval(&self, classes: &[&[Scalar]]) -> Result<Scalar, ConeError> {
        self.form.eval(classes)
    }

    /// `L^n`.
    pub fn volume(&self, l: &[Scalar]) -> Result<Scalar, ConeError> {
        self.form.eval_power(l)
    }

    /// The quadratic form `α ↦ α²·L^{n−2}` as a symmetric matrix.
    pub fn q_form_matrix(&self, l: &[Scalar]) -> Result<Vec<Vec<Scalar>>, ConeError> {
        Ok(self.form.contract_power(l, self.n() - 2)?.to_matrix())
    }

    /// `(β·β', L^{n−2})`.
    pub fn q_pair(&self, l: &[Scalar], a: &[Scalar], b: &[Scalar]) -> Result<Scalar, ConeError> {
        let q = self.form.contract_power(l, self.n() - 2)?;
        q.eval(&[a, b])
    }

    /// The curve class `D₁⋯D_{n−1}` as pairing values.
    pub fn curve(&self, classes: &[&[Scalar]]) -> Result<CurveClass, ConeError> {
        if classes.len() != self.n() - 1 {
            return Err(ConeError::Arity {
                expected: self.n() - 1,
                got: classes.len(),
            });
        }
        let mut f = self.form.clone();
        for c in classes {
            f = f.contract(c)?;
        }
        Ok(f.to_vector())
    }

    /// `L^{n−2}·β` as a curve class.
    pub fn lefschetz_image(&self, l: &[Scalar], beta: &[Scalar]) -> Result<CurveClass, ConeError> {
        let mut classes: Vec<&[Scalar]> = (0..self.n() - 2).map(|_| l).collect();
        classes.push(beta);
        self.curve(&classes)
    }
}

/// Pairing of a curve class with a divisor class.
pub fn pair(gamma: &[Scalar], d: &[Scalar]) -> Scalar {
    gamma.iter().zip(d).map(|(a, b)| a * b).sum()
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix.
pub fn signature(matrix: &[Vec<Scalar>]) -> (usize, usize, usize) {
    linalg::symmetric_inertia(matrix)
}

/// Whether `q_L` has the signature `(1, ρ−1, 0)` predicted for ample `L`.
pub fn hodge_holds(t: &IntersectionTensor, l: &[Scalar]) -> Result<bool, ConeError> {
    let sig = signature(&t.q_form_matrix(l)?);
    Ok(sig == (1, t.rho() - 1, 0))
}

/// `β ∈ K⁺_L(X)`: `β²L^{n−2} > 0` and `βL^{n−1} > 0`.
pub fn kplus_contains(t: &IntersectionTensor, l: &[Scalar], beta: &[Scalar]) -> Result<bool, ConeError> {
    let sq = t.q_pair(l, beta, beta)?;
    let lin = t.q_pair(l, beta, l)?;
    Ok(sq.is_positive() && lin.is_positive())
}

fn field_of(vals: impl IntoIterator<Item = Scalar>) -> Result<FieldKind, ConeError> {
    let mut k = FieldKind::Rational;
    for v in vals {
        k = k.join(v.field())?;
    }
    Ok(k)
}

/// The unique `β` with `L^{n−2}·β = γ`.
pub fn lefschetz_solve(t: &IntersectionTensor, l: &[Scalar], gamma: &[Scalar]) -> Result<DivisorClass, ConeError> {
    if gamma.len() != t.rho() {
        return Err(ConeError::Length {
            rho: t.rho(),
            got: gamma.len(),
        });
    }
    let a = t.q_form_matrix(l)?;
    let kind = field_of(a.iter().flatten().chain(gamma).cloned())?;
    let f = ExactField(kind);
    let m = Mat::from_rows(t.rho(), a);
    let inv = linalg::inverse(&f, &m).ok_or(ConeError::Singular)?;
    Ok(linalg::mat_vec(&f, &inv, gamma))
}

/// A class `β ∈ K⁺_L(X)` with `L^{n−2}·β = γ`, certifying `γ ∈ C⁺(X)`.
pub fn cplus_witness(
    t: &IntersectionTensor,
    gamma: &[Scalar],
    l: &[Scalar],
) -> Result<Option<DivisorClass>, ConeError> {
    let beta = lefschetz_solve(t, l, gamma)?;
    Ok(kplus_contains(t, l, &beta)?.then_some(beta))
}

/// Numerical Chern data of a sheaf: rank, `c₁` coordinates and the
/// pairings of `c₂` against monomials of degree `n − 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernData {
    pub rank: Scalar,
    pub c1: DivisorClass,
    pub c2pair: SymForm,
}

impl ChernData {
    pub fn c2_dot(&self, l: &[Scalar]) -> Result<Scalar, ConeError> {
        Ok(self.c2pair.eval_power(l)?)
    }

    fn check(&self) -> Result<(), ConeError> {
        if self.rank.is_positive() {
            Ok(())
        } else {
            Err(ConeError::NonpositiveRank)
        }
    }
}

/// `Δ(F)·L^{n−2}` with `Δ = (1/r)(c₂ − (r−1)/(2r)·c₁²)`.
pub fn discriminant_pair(f: &ChernData, t: &IntersectionTensor, l: &[Scalar]) -> Result<Scalar, ConeError> {
    f.check()?;
    let r = &f.rank;
    let c1sq = t.q_pair(l, &f.c1, &f.c1)?;
    let c2 = f.c2_dot(l)?;
    let coef = (r - Scalar::one()) / (Scalar::int(2) * r);
    Ok((c2 - coef * c1sq) / r)
}

/// `ξ_{G',G} = c₁(G')/r' − c₁(G)/r`.
pub fn xi(g_sub: &ChernData, g: &ChernData) -> Result<DivisorClass, ConeError> {
    g_sub.check()?;
    g.check()?;
    Ok(g_sub
        .c1
        .iter()
        .zip(&g.c1)
        .map(|(a, b)| a / &g_sub.rank - b / &g.rank)
        .collect())
}

/// `Δ(F)L^{n−2} + r²(r−1)²β < 0`.
pub fn bogomolov_unstable(
    f: &ChernData,
    t: &IntersectionTensor,
    l: &[Scalar],
    beta_const: &Scalar,
) -> Result<bool, ConeError> {
    let delta = discriminant_pair(f, t, l)?;
    let r = &f.rank;
    let rm1 = r - Scalar::one();
    let extra = r * r * &rm1 * &rm1 * beta_const;
    Ok((delta + extra).is_negative())
}

/// `(2r·c₂ − (r−1)c₁²)·L^{n−2}`.
pub fn discriminant_std(f: &ChernData, t: &IntersectionTensor, l: &[Scalar]) -> Result<Scalar, ConeError> {
    f.check()?;
    let r = &f.rank;
    let c1sq = t.q_pair(l, &f.c1, &f.c1)?;
    let c2 = f.c2_dot(l)?;
    Ok(Scalar::int(2) * r * c2 - (r - Scalar::one()) * c1sq)
}

/// Chern data of an extension `0 → A → E → B → 0`: `c(E) = c(A)c(B)`.
pub fn extension_chern(a: &ChernData, b: &ChernData, t: &IntersectionTensor) -> Result<ChernData, ConeError> {
    let cross = t.form().contract(&a.c1)?.contract(&b.c1)?;
    Ok(ChernData {
        rank: &a.rank + &b.rank,
        c1: a.c1.iter().zip(&b.c1).map(|(x, y)| x + y).collect(),
        c2pair: a.c2pair.plus(&b.c2pair)?.plus(&cross)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub equal: bool,
}

/// Evaluates both sides of
/// `Δ_std(E)/r − Δ_std(A)/p − Δ_std(B)/q = −(pq/r)·ξ_{A,B}²` (all paired with
/// `L^{n−2}`) for the extension `E` of `B` by `A`.
pub fn extension_discriminant_identity(
    a: &ChernData,
    b: &ChernData,
    t: &IntersectionTensor,
    l: &[Scalar],
) -> Result<IdentityReport, ConeError> {
    let e = extension_chern(a, b, t)?;
    let (p, q, r) = (&a.rank, &b.rank, &e.rank);
    let lhs = discriminant_std(&e, t, l)? / r - discriminant_std(a, t, l)? / p - discriminant_std(b, t, l)? / q;
    let x = xi(a, b)?;
    let rhs = -(p * q / r) * t.q_pair(l, &x, &x)?;
    let equal = lhs == rhs;
    Ok(IdentityReport { lhs, rhs, equal })
}

/// `(γ∞·L₁)(γ₀·L₂) − (γ∞·L₂)(γ₀·L₁) ≠ 0`.
pub fn crossterm_nondegenerate(g0: &[Scalar], ginf: &[Scalar], l1: &[Scalar], l2: &[Scalar]) -> bool {
    let d = pair(ginf, l1) * pair(g0, l2) - pair(ginf, l2) * pair(g0, l1);
    !d.is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathPoint {
    /// Position on the segment: `γ_u = (1−u)γ₀ + uγ∞`, i.e. `t = u/(1−u)`.
    pub u: Scalar,
    pub s: Option<Scalar>,
    pub beta: Option<DivisorClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCertificate {
    pub points: Vec<PathPoint>,
    pub complete: bool,
}

/// Dyadic parameters in search order: `0, 1, 1/2, 1/4, 3/4, 1/8, …` down to
/// denominators `2^resolution`.
pub fn dyadic_schedule(resolution: u32) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(), Scalar::one()];
    for k in 1..=resolution {
        let den = 1i64 << k;
        out.extend((1..den).step_by(2).map(|num| Scalar::frac(num, den)));
    }
    out
}

fn lerp(a: &[Scalar], b: &[Scalar], s: &Scalar) -> Vec<Scalar> {
    let one_minus = Scalar::one() - s;
    a.iter().zip(b).map(|(x, y)| &one_minus * x + s * y).collect()
}

/// For each of `t_samples` evenly spaced `u ∈ [0, 1]` (the projective
/// parameter of `γ_t = γ₀ + tγ∞`), searches `s` such that `γ_u` lies in
/// `L(s)^{n−2}·K⁺_{L(s)}` with `L(s) = (1−s)L₂ + sL₁`.
pub fn cplus_path_certificate(
    t: &IntersectionTensor,
    g0: &[Scalar],
    ginf: &[Scalar],
    l1: &[Scalar],
    l2: &[Scalar],
    t_samples: usize,
    s_resolution: u32,
) -> Result<PathCertificate, ConeError> {
    if cplus_witness(t, g0, l2)?.is_none() {
        return Err(ConeError::Precondition("γ₀ is not in L₂^(n-2)·K⁺(L₂)".into()));
    }
    if cplus_witness(t, ginf, l1)?.is_none() {
        return Err(ConeError::Precondition("γ∞ is not in L₁^(n-2)·K⁺(L₁)".into()));
    }
    if t_samples < 2 {
        return Err(ConeError::Precondition("need at least two t samples".into()));
    }
    let schedule = dyadic_schedule(s_resolution);
    let mut points = Vec::with_capacity(t_samples);
    for k in 0..t_samples {
        let u = Scalar::frac(k as i64, (t_samples - 1) as i64);
        let gamma = lerp(g0, ginf, &u);
        let mut found = None;
        for s in &schedule {
            let l = lerp(l2, l1, s);
            match cplus_witness(t, &gamma, &l) {
                Ok(Some(beta)) => {
                    found = Some((s.clone(), beta));
                    break;
                }
                Ok(None) | Err(ConeError::Singular) => {}
                Err(e) => return Err(e),
            }
        }
        let (s, beta) = found.map_or((None, None), |(s, b)| (Some(s), Some(b)));
        points.push(PathPoint { u, s, beta });
    }
    let complete = points.iter().all(|p| p.s.is_some());
    Ok(PathCertificate { points, complete })
}

/// A bundled example variety: its intersection tensor and a few classes
/// known to be ample.
#[derive(Clone, Debug)]
pub struct Example {
    pub name: &'static str,
    pub tensor: IntersectionTensor,
    pub amples: Vec<DivisorClass>,
}

fn classes(rows: &[&[i64]]) -> Vec<DivisorClass> {
    rows.iter()
        .map(|r| r.iter().map(|&x| Scalar::int(x)).collect())
        .collect()
}

pub const EXAMPLE_NAMES: [&str; 6] = ["P2", "P1xP1", "Bl1P2", "P3", "P1xP1xP1", "P1xP2"];

/// Looks up a bundled example by name (see [`EXAMPLE_NAMES`]).
pub fn example(name: &str) -> Option<Example> {
    let (name, tensor, amples) = match name {
        "P2" => (
            "P2",
            IntersectionTensor::from_entries(2, 1, &[(&[1, 1], 1)]),
            classes(&[&[1], &[2], &[3], &[5], &[7]]),
        ),
        "P1xP1" => (
            "P1xP1",
            IntersectionTensor::from_entries(2, 2, &[(&[1, 2], 1)]),
            classes(&[&[1, 1], &[1, 2], &[2, 1], &[1, 3], &[5, 2]]),
        ),
        // basis H, E
        "Bl1P2" => (
            "Bl1P2",
            IntersectionTensor::from_entries(2, 2, &[(&[1, 1], 1), (&[2, 2], -1)]),
            classes(&[&[2, -1], &[3, -1], &[3, -2], &[5, -1], &[4, -3]]),
        ),
        "P3" => (
            "P3",
            IntersectionTensor::from_entries(3, 1, &[(&[1, 1, 1], 1)]),
            classes(&[&[1], &[2], &[3], &[4], &[6]]),
        ),
        "P1xP1xP1" => (
            "P1xP1xP1",
            IntersectionTensor::from_entries(3, 3, &[(&[1, 2, 3], 1)]),
            classes(&[&[1, 1, 1], &[1, 2, 3], &[2, 1, 1], &[3, 1, 2], &[1, 1, 4]]),
        ),
        // D₁ from the P¹ factor, D₂ the hyperplane of P²
        "P1xP2" => (
            "P1xP2",
            IntersectionTensor::from_entries(3, 2, &[(&[1, 2, 2], 1)]),
            classes(&[&[1, 1], &[1, 2], &[2, 1], &[3, 1], &[1, 4]]),
        ),
        _ => return None,
    };
    Some(Example { name, tensor, amples })
}
