//! Coefficient fields for linear algebra: the exact ordered fields of
//! [`crate::exact`] and small finite fields `F_q`.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{FieldKind, Scalar};

pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_int(&self, n: i64) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    /// Number of elements, `None` for infinite fields.
    fn size(&self) -> Option<u64>;

    /// All elements in a fixed order (zero first); `None` for infinite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// Uniform element for finite fields; a small integer for infinite ones.
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn parse_elem(&self, s: &str) -> Result<Self::Elem, String>;
    fn format_elem(&self, e: &Self::Elem) -> String;
    fn name(&self) -> String;
}

/// One of the exact ordered fields, used as a coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactField(pub FieldKind);

impl Field for ExactField {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        Scalar::zero()
    }
    fn one(&self) -> Scalar {
        Scalar::one()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }
    fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a - b
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        -a
    }
    fn inv(&self, a: &Scalar) -> Option<Scalar> {
        a.try_inv().ok()
    }
    fn from_int(&self, n: i64) -> Scalar {
        Scalar::int(n)
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn size(&self) -> Option<u64> {
        None
    }
    fn elements(&self) -> Option<Vec<Scalar>> {
        None
    }
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        let x = Scalar::int(rng.gen_range(-3..=3));
        match self.0 {
            FieldKind::QuadExt(d) if rng.gen_bool(0.25) => {
                let r = Scalar::sqrt_of(d).expect("valid radicand");
                x + r * Scalar::int(rng.gen_range(-2..=2))
            }
            _ => x,
        }
    }
    fn parse_elem(&self, s: &str) -> Result<Scalar, String> {
        Scalar::parse_in(s, self.0).map_err(|e| e.to_string())
    }
    fn format_elem(&self, e: &Scalar) -> String {
        e.to_string()
    }
    fn name(&self) -> String {
        match self.0 {
            FieldKind::Rational => "Q".into(),
            FieldKind::QuadExt(d) => format!("Q(√{d})"),
        }
    }
}

/// Finite field `F_q`, `q = p^k ≤ 256`, with elements encoded as integers
/// `Σ c_i p^i` for the residue class of `Σ c_i x^i` modulo a fixed monic
/// irreducible polynomial of degree `k` (the lexicographically smallest).
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    tables: Arc<GfTables>,
}

struct GfTables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.q)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for GaloisField {}

pub const MAX_FIELD_ORDER: u32 = 256;

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

// Polynomials over F_p as little-endian coefficient vectors.
fn poly_mod(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let top = *r.last().unwrap();
        if top != 0 {
            let f = top * lead_inv % p;
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - f * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    (1..p).find(|&x| a * x % p == 1).expect("nonzero residue")
}

fn digits(mut x: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        // every monic polynomial of degree d
        for body in 0..p.pow(d as u32) {
            let mut g = digits(body, p, d as u32);
            g.push(1);
            if poly_mod(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl GaloisField {
    pub fn new(q: u32) -> Result<Self, String> {
        let (p, k) = prime_power(q).ok_or_else(|| format!("{q} is not a prime power"))?;
        if q > MAX_FIELD_ORDER {
            return Err(format!("field order {q} exceeds {MAX_FIELD_ORDER}"));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(k))
                .map(|body| {
                    let mut f = digits(body, p, k);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..q {
            let da = digits(a, p, k);
            for b in 0..q {
                let db = digits(b, p, k);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum, p);
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut red = poly_mod(&prod, &modulus, p);
                red.resize(k as usize, 0);
                mul[(a * q + b) as usize] = undigits(&red, p);
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap())
            .collect();
        let inv = (0..q)
            .map(|a| (0..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap_or(0))
            .collect();
        Ok(GaloisField {
            p,
            k,
            q,
            tables: Arc::new(GfTables { add, mul, neg, inv }),
        })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }
}

impl Field for GaloisField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.tables.add[(a * self.q + b) as usize]
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.tables.mul[(a * self.q + b) as usize]
    }
    fn neg(&self, a: &u32) -> u32 {
        self.tables.neg[*a as usize]
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        (*a != 0).then(|| self.tables.inv[*a as usize])
    }
    fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn size(&self) -> Option<u64> {
        Some(self.q as u64)
    }
    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.q).collect())
    }
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.q)
    }
    fn parse_elem(&self, s: &str) -> Result<u32, String> {
        let n: i64 = s.trim().parse().map_err(|_| format!("bad F{} element {s:?}", self.q))?;
        if self.k == 1 {
            Ok(self.from_int(n))
        } else if (0..self.q as i64).contains(&n) {
            Ok(n as u32)
        } else {
            Err(format!("F{} element code {n} out of range", self.q))
        }
    }
    fn format_elem(&self, e: &u32) -> String {
        e.to_string()
    }
    fn name(&self) -> String {
        format!("F{}", self.q)
    }
}

/// Field descriptor as it appears in JSON: `"F2"`, `"Q"` or `{"quad": 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(FieldName),
    Quad { quad: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldName {
    Rational,
    Finite(u32),
}

impl Serialize for FieldName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FieldName::Rational => s.serialize_str("Q"),
            FieldName::Finite(q) => s.serialize_str(&format!("F{q}")),
        }
    }
}

impl<'de> Deserialize<'de> for FieldName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "Q" {
            return Ok(FieldName::Rational);
        }
        s.strip_prefix('F')
            .and_then(|q| q.parse().ok())
            .map(FieldName::Finite)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown field {s:?}")))
    }
}

impl FieldSpec {
    pub fn finite(q: u32) -> Self {
        FieldSpec::Named(FieldName::Finite(q))
    }

    pub fn rational() -> Self {
        FieldSpec::Named(FieldName::Rational)
    }

    pub fn exact_kind(&self) -> Option<FieldKind> {
        match *self {
            FieldSpec::Named(FieldName::Rational) => Some(FieldKind::Rational),
            FieldSpec::Quad { quad } => Some(FieldKind::QuadExt(quad)),
            FieldSpec::Named(FieldName::Finite(_)) => None,
        }
    }
}
