//! Independent reference implementations used by the integration tests.
//!
//! Everything here works on plain vectors of residues or on `BigRational`
//! and never calls into the library's linear algebra, so agreement with the
//! library is evidence rather than tautology.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;

use stabkit::field::GaloisField;
use stabkit::linalg::{Mat, Subspace};
use stabkit::quiver::{DimVector, QuiverSpec, Representation, Submodule};
use stabkit::sheaf::{SheafClass, StabilityParameter};
use stabkit::Scalar;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_rat(x: &Scalar) -> BigRational {
    x.as_rational().expect("rational scalar").clone()
}

pub fn to_scalars(xs: &[BigRational]) -> Vec<Scalar> {
    xs.iter().cloned().map(Scalar::rational).collect()
}

pub fn ints(xs: &[i64]) -> Vec<Scalar> {
    xs.iter().map(|&x| Scalar::int(x)).collect()
}

pub fn sigma_of(xs: &[BigRational]) -> StabilityParameter {
    StabilityParameter(to_scalars(xs))
}

// ---------------------------------------------------------------------------
// Vector spaces over F_q as explicit sets of vectors.

pub type Vector = Vec<u32>;
pub type Space = BTreeSet<Vector>;

pub fn zero_space(n: usize) -> Space {
    BTreeSet::from([vec![0; n]])
}

pub fn all_vectors(n: usize, q: u32) -> Vec<Vector> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vector| {
                (0..q).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

/// Every `F_q`-linear combination of `gens`.
pub fn span(gens: &[Vector], n: usize, q: u32) -> Space {
    let mut s = zero_space(n);
    for g in gens {
        let mut next = Space::new();
        for x in &s {
            for c in 0..q {
                next.insert(x.iter().zip(g).map(|(a, b)| (a + c * b) % q).collect());
            }
        }
        s = next;
    }
    s
}

pub fn subspaces(n: usize, q: u32) -> Vec<Space> {
    let vectors = all_vectors(n, q);
    let mut found: BTreeSet<Space> = BTreeSet::from([zero_space(n)]);
    let mut frontier = vec![zero_space(n)];
    while let Some(s) = frontier.pop() {
        for v in &vectors {
            if s.contains(v) {
                continue;
            }
            let mut gens: Vec<Vector> = s.iter().cloned().collect();
            gens.push(v.clone());
            let t = span(&gens, n, q);
            if found.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    found.into_iter().collect()
}

pub fn dim_of(s: &Space, q: u32) -> usize {
    let mut size = s.len();
    let mut d = 0;
    while size > 1 {
        size /= q as usize;
        d += 1;
    }
    d
}

/// `m·v` for `m` given by its rows.
pub fn apply(m: &[Vec<u32>], v: &[u32], q: u32) -> Vector {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<u32>() % q)
        .collect()
}

// ---------------------------------------------------------------------------
// Two-layer quiver representations.

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BSub {
    pub v: Vec<Space>,
    pub w: Vec<Space>,
    pub dv: Vec<usize>,
    pub dw: Vec<usize>,
}

impl BSub {
    pub fn new(v: Vec<Space>, w: Vec<Space>, q: u32) -> Self {
        let dv = v.iter().map(|s| dim_of(s, q)).collect();
        let dw = w.iter().map(|s| dim_of(s, q)).collect();
        BSub { v, w, dv, dw }
    }

    pub fn is_zero(&self) -> bool {
        self.dv.iter().chain(&self.dw).all(|&d| d == 0)
    }

    /// `V' ⊆ V''` and `W'' ⊆ W'`.
    pub fn subordinate_to(&self, other: &BSub) -> bool {
        self.dv.iter().zip(&other.dv).all(|(a, b)| a <= b)
            && self.dw.iter().zip(&other.dw).all(|(a, b)| a >= b)
            && self.v.iter().zip(&other.v).all(|(a, b)| a.is_subset(b))
            && other.w.iter().zip(&self.w).all(|(a, b)| a.is_subset(b))
    }

    pub fn contains(&self, other: &BSub) -> bool {
        self.v.iter().zip(&other.v).all(|(a, b)| b.is_subset(a)) && self.w.iter().zip(&other.w).all(|(a, b)| b.is_subset(a))
    }
}

#[derive(Clone, Debug)]
pub struct Brute {
    pub q: u32,
    pub h: Vec<Vec<usize>>,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    /// `maps[i][j][k]`: rows of the `k`-th arrow `V_i → W_j`.
    pub maps: Vec<Vec<Vec<Vec<Vec<u32>>>>>,
}

impl Brute {
    pub fn j0(&self) -> usize {
        self.v.len()
    }

    fn entry_count(h: &[Vec<usize>], v: &[usize], w: &[usize]) -> usize {
        let mut n = 0;
        for i in 0..v.len() {
            for j in 0..w.len() {
                n += h[i][j] * v[i] * w[j];
            }
        }
        n
    }

    fn from_entries(q: u32, h: &[Vec<usize>], v: &[usize], w: &[usize], mut next: impl FnMut() -> u32) -> Self {
        let j0 = v.len();
        let maps = (0..j0)
            .map(|i| {
                (0..j0)
                    .map(|j| {
                        (0..h[i][j])
                            .map(|_| (0..w[j]).map(|_| (0..v[i]).map(|_| next()).collect()).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Brute {
            q,
            h: h.to_vec(),
            v: v.to_vec(),
            w: w.to_vec(),
            maps,
        }
    }

    pub fn random<R: Rng>(rng: &mut R, q: u32, h: &[Vec<usize>], v: &[usize], w: &[usize]) -> Self {
        Self::from_entries(q, h, v, w, || rng.gen_range(0..q))
    }

    /// Every choice of matrices for the given quiver and dimensions.
    pub fn all(q: u32, h: &[Vec<usize>], v: &[usize], w: &[usize]) -> Vec<Self> {
        let n = Self::entry_count(h, v, w);
        let total = (q as u64).pow(n as u32);
        (0..total)
            .map(|mut code| {
                Self::from_entries(q, h, v, w, || {
                    let d = (code % q as u64) as u32;
                    code /= q as u64;
                    d
                })
            })
            .collect()
    }

    pub fn field(&self) -> GaloisField {
        GaloisField::new(self.q).unwrap()
    }

    pub fn to_rep(&self) -> Representation<GaloisField> {
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .map(|arrows| arrows.iter().map(|m| Mat::from_rows(self.v[i], m.clone())).collect())
                    .collect()
            })
            .collect();
        Representation::new(
            self.field(),
            QuiverSpec::new(self.h.clone()).unwrap(),
            DimVector::new(self.v.clone(), self.w.clone()),
            maps,
        )
        .unwrap()
    }

    pub fn from_rep(rep: &Representation<GaloisField>) -> Self {
        Brute {
            q: rep.field.order(),
            h: rep.spec.h.clone(),
            v: rep.dims.v.clone(),
            w: rep.dims.w.clone(),
            maps: rep
                .maps
                .iter()
                .map(|row| row.iter().map(|arrows| arrows.iter().map(|m| m.to_rows()).collect()).collect())
                .collect(),
        }
    }

    /// `W'_j = Σ_{i,k} φ_{ijk}(V'_i)`.
    pub fn image(&self, vs: &[Space]) -> Vec<Space> {
        (0..self.j0())
            .map(|j| {
                let mut gens = Vec::new();
                for (i, vi) in vs.iter().enumerate() {
                    for m in &self.maps[i][j] {
                        gens.extend(vi.iter().map(|x| apply(m, x, self.q)));
                    }
                }
                span(&gens, self.w[j], self.q)
            })
            .collect()
    }

    /// `V'_i = {x : φ_{ijk}(x) ∈ W'_j for all j, k}`.
    pub fn preimage(&self, ws: &[Space]) -> Vec<Space> {
        (0..self.j0())
            .map(|i| {
                all_vectors(self.v[i], self.q)
                    .into_iter()
                    .filter(|x| (0..self.j0()).all(|j| self.maps[i][j].iter().all(|m| ws[j].contains(&apply(m, x, self.q)))))
                    .collect()
            })
            .collect()
    }

    pub fn closure(&self, seeds: &[Space]) -> BSub {
        let w = self.image(seeds);
        let v = self.preimage(&w);
        BSub::new(v, w, self.q)
    }

    pub fn whole(&self) -> BSub {
        BSub::new(
            self.v.iter().map(|&n| all_vectors(n, self.q).into_iter().collect()).collect(),
            self.w.iter().map(|&n| all_vectors(n, self.q).into_iter().collect()).collect(),
            self.q,
        )
    }

    pub fn is_submodule(&self, s: &BSub) -> bool {
        self.image(&s.v).iter().zip(&s.w).all(|(img, w)| img.is_subset(w))
    }

    /// Every submodule, by enumerating V-tuples and the W-tuples above
    /// their images.
    pub fn submodules(&self) -> Vec<BSub> {
        let vlists: Vec<Vec<Space>> = self.v.iter().map(|&n| subspaces(n, self.q)).collect();
        let wlists: Vec<Vec<Space>> = self.w.iter().map(|&n| subspaces(n, self.q)).collect();
        let mut out = Vec::new();
        for vs in product(&vlists) {
            let img = self.image(&vs);
            let options: Vec<Vec<Space>> = wlists
                .iter()
                .zip(&img)
                .map(|(l, i)| l.iter().filter(|s| i.is_subset(s)).cloned().collect())
                .collect();
            for ws in product(&options) {
                out.push(BSub::new(vs.clone(), ws, self.q));
            }
        }
        out
    }

    /// No nonzero vector of any `V_i` is killed by every arrow.
    pub fn is_generated(&self) -> bool {
        (0..self.j0()).all(|i| {
            all_vectors(self.v[i], self.q).into_iter().all(|x| {
                x.iter().all(|&c| c == 0)
                    || (0..self.j0()).any(|j| self.maps[i][j].iter().any(|m| apply(m, &x, self.q).iter().any(|&c| c != 0)))
            })
        })
    }

    pub fn from_library(&self, sub: &Submodule<u32>) -> BSub {
        let v = sub.v.iter().zip(&self.v).map(|(s, &n)| span(s.basis(), n, self.q)).collect();
        let w = sub.w.iter().zip(&self.w).map(|(s, &n)| span(s.basis(), n, self.q)).collect();
        BSub::new(v, w, self.q)
    }

    pub fn to_library(&self, spaces: &[Space], dims: &[usize]) -> Vec<Subspace<u32>> {
        let f = self.field();
        spaces
            .iter()
            .zip(dims)
            .map(|(s, &n)| Subspace::span(&f, n, &s.iter().cloned().collect::<Vec<_>>()))
            .collect()
    }
}

/// Tight by definition: no other submodule it is subordinate to.
pub fn tight_flags(subs: &[BSub]) -> Vec<bool> {
    subs.iter()
        .map(|a| !subs.iter().any(|b| b != a && a.subordinate_to(b)))
        .collect()
}

pub fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        out = out
            .into_iter()
            .flat_map(|p: Vec<T>| {
                l.iter().map(move |x| {
                    let mut p = p.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------------------
// Slopes and King's θ with rational arithmetic.

pub fn weighted(sigma: &[BigRational], d: &[usize]) -> BigRational {
    sigma.iter().zip(d).map(|(s, &x)| s * rat(x as i64)).sum()
}

/// A slope in `[0, ∞]`; the derived order puts every finite value below
/// infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mu {
    Finite(BigRational),
    Infinite,
}

pub fn mu(sigma: &[BigRational], dv: &[usize], dw: &[usize]) -> Option<Mu> {
    let num = weighted(sigma, dv);
    let den = weighted(sigma, dw);
    match (num.is_zero(), den.is_zero()) {
        (true, true) => None,
        (false, true) => Some(Mu::Infinite),
        _ => Some(Mu::Finite(num / den)),
    }
}

pub fn theta(sigma: &[BigRational], whole: (&[usize], &[usize]), dv: &[usize], dw: &[usize]) -> BigRational {
    weighted(sigma, dv) / weighted(sigma, whole.0) - weighted(sigma, dw) / weighted(sigma, whole.1)
}

/// Semistability in slope form by full enumeration.
pub fn brute_mu_semistable(b: &Brute, subs: &[BSub], sigma: &[BigRational]) -> bool {
    let Some(m) = mu(sigma, &b.v, &b.w) else { return true };
    subs.iter().all(|s| mu(sigma, &s.dv, &s.dw).map_or(true, |x| x <= m))
}

// ---------------------------------------------------------------------------
// Reduced multi-Hilbert comparison, coefficient by coefficient.

/// `Σ_j σ_j α_i^{L_j}`.
fn alpha_at(e: &SheafClass, sigma: &[BigRational], i: usize) -> BigRational {
    e.alpha.iter().zip(sigma).map(|(row, s)| to_rat(&row[i]) * s).sum()
}

/// Order of `p_F^σ` against `p_E^σ` for large arguments: compare the
/// normalized coefficients from the top degree down.
pub fn reduced_compare(e: &SheafClass, f: &SheafClass, sigma: &[BigRational]) -> Ordering {
    let d = e.dim;
    let re = alpha_at(e, sigma, d);
    let rf = alpha_at(f, sigma, d);
    for i in (0..d).rev() {
        let a = alpha_at(f, sigma, i) / &rf;
        let b = alpha_at(e, sigma, i) / &re;
        match a.cmp(&b) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

// ---------------------------------------------------------------------------
// Numbers a + b√2 and the intersection theory of the bundled examples.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl Q2 {
    pub fn zero() -> Self {
        Q2 {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }

    pub fn int(n: i64) -> Self {
        Q2::from(rat(n))
    }

    pub fn from_scalar(x: &Scalar) -> Self {
        match x.field().radicand() {
            None => Q2::from(x.rational_part().clone()),
            Some(2) => Q2 {
                a: x.rational_part().clone(),
                b: x.irrational_part().clone(),
            },
            Some(d) => panic!("unexpected radicand {d}"),
        }
    }

    pub fn add(&self, o: &Q2) -> Q2 {
        Q2 {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    pub fn sub(&self, o: &Q2) -> Q2 {
        Q2 {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    pub fn mul(&self, o: &Q2) -> Q2 {
        Q2 {
            a: &self.a * &o.a + rat(2) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Q2 {
        Q2 {
            a: &self.a * c,
            b: &self.b * c,
        }
    }

    pub fn signum(&self) -> Ordering {
        // sign of a + b√2 without leaving Q
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sa == sb || sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2 = rat(2) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }
}

impl From<BigRational> for Q2 {
    fn from(a: BigRational) -> Self {
        Q2 {
            a,
            b: BigRational::zero(),
        }
    }
}

pub fn q2_vec(xs: &[Scalar]) -> Vec<Q2> {
    xs.iter().map(Q2::from_scalar).collect()
}

/// `x^n` on the named example, written out as a polynomial.
pub fn volume(name: &str, x: &[Q2]) -> Q2 {
    match name {
        "P2" => x[0].mul(&x[0]),
        "P1xP1" => x[0].mul(&x[1]).scale(&rat(2)),
        "Bl1P2" => x[0].mul(&x[0]).sub(&x[1].mul(&x[1])),
        "P3" => x[0].mul(&x[0]).mul(&x[0]),
        "P1xP1xP1" => x[0].mul(&x[1]).mul(&x[2]).scale(&rat(6)),
        "P1xP2" => x[0].mul(&x[1]).mul(&x[1]).scale(&rat(3)),
        other => panic!("no volume polynomial for {other}"),
    }
}

pub fn dimension(name: &str) -> usize {
    match name {
        "P2" | "P1xP1" | "Bl1P2" => 2,
        _ => 3,
    }
}

/// Mixed intersection number by polarization:
/// `n!·T(x_1, …, x_n) = Σ_S (−1)^{n−|S|} vol(Σ_{i∈S} x_i)`.
pub fn mixed(name: &str, classes: &[&[Q2]]) -> Q2 {
    let n = classes.len();
    assert_eq!(n, dimension(name));
    let rho = classes[0].len();
    let mut acc = Q2::zero();
    for mask in 1u32..(1 << n) {
        let mut s = vec![Q2::zero(); rho];
        for (i, c) in classes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = s.iter().zip(c.iter()).map(|(a, b)| a.add(b)).collect();
            }
        }
        let v = volume(name, &s);
        acc = if (n - mask.count_ones() as usize) % 2 == 0 { acc.add(&v) } else { acc.sub(&v) };
    }
    let fact: i64 = (1..=n as i64).product();
    acc.scale(&(BigRational::one() / rat(fact)))
}

pub fn unit(rho: usize, k: usize) -> Vec<Q2> {
    (0..rho).map(|i| if i == k { Q2::int(1) } else { Q2::zero() }).collect()
}

/// `(a·b·L^{n−2})`.
pub fn q_pair(name: &str, l: &[Q2], a: &[Q2], b: &[Q2]) -> Q2 {
    let mut classes: Vec<&[Q2]> = vec![a, b];
    for _ in 2..dimension(name) {
        classes.push(l);
    }
    mixed(name, &classes)
}

/// Curve class `L^{n−2}·β` as its pairings with the basis divisors.
pub fn lefschetz(name: &str, l: &[Q2], beta: &[Q2]) -> Vec<Q2> {
    (0..l.len()).map(|k| q_pair(name, l, beta, &unit(l.len(), k))).collect()
}

/// Inertia of a symmetric rational matrix by Descartes' rule applied to its
/// characteristic polynomial (exact because every root is real).
pub fn inertia_by_charpoly(a: &[Vec<BigRational>]) -> (usize, usize, usize) {
    let n = a.len();
    // Faddeev–LeVerrier: coefficients c[0..=n] of det(xI − A), c[n] = 1.
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        let am: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| &a[i][l] * &m[l][j]).sum()).collect())
            .collect();
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / rat(k as i64);
        m = am;
    }
    let zero = c.iter().take_while(|x| x.is_zero()).count();
    let changes = |coeffs: &[BigRational]| {
        let signs: Vec<bool> = coeffs.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let pos = changes(&c);
    let flipped: Vec<BigRational> = c
        .iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 1 { -x.clone() } else { x.clone() })
        .collect();
    let neg = changes(&flipped);
    (pos, neg, zero)
}

/// A random ample class on a bundled example: a positive combination of
/// two of its listed ample classes.
pub fn random_ample<R: Rng>(rng: &mut R, amples: &[Vec<Scalar>]) -> Vec<Scalar> {
    let p = &amples[rng.gen_range(0..amples.len())];
    let q = &amples[rng.gen_range(0..amples.len())];
    let (a, b) = (Scalar::int(rng.gen_range(1..=3)), Scalar::int(rng.gen_range(0..=3)));
    p.iter().zip(q).map(|(x, y)| &a * x + &b * y).collect()
}
