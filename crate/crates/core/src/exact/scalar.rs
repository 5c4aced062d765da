//! Exact scalars: rationals and elements of a real quadratic field `Q(√d)`.
//!
//! A [`Scalar`] carries its field descriptor. Rational values (irrational part
//! zero) combine freely with any field; two values from different quadratic
//! fields cannot be combined and the checked operations report this.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExactError;

/// The ordered field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Rational,
    /// `Q(√d)` for a square-free integer `d > 1`.
    QuadExt(u64),
}

impl FieldKind {
    pub fn quad(d: u64) -> Result<Self, ExactError> {
        if d < 2 || !is_square_free(d) {
            return Err(ExactError::BadRadicand(d));
        }
        Ok(FieldKind::QuadExt(d))
    }

    /// Smallest field containing both, if any.
    pub fn join(self, other: FieldKind) -> Result<FieldKind, ExactError> {
        match (self, other) {
            (FieldKind::Rational, k) | (k, FieldKind::Rational) => Ok(k),
            (FieldKind::QuadExt(a), FieldKind::QuadExt(b)) if a == b => Ok(self),
            _ => Err(ExactError::MixedFields(self, other)),
        }
    }

    pub fn radicand(self) -> Option<u64> {
        match self {
            FieldKind::Rational => None,
            FieldKind::QuadExt(d) => Some(d),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::QuadExt(d) => write!(f, "Q(√{d})"),
        }
    }
}

pub(crate) fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// `re + irr·√d` with `d` taken from `field`. `irr` is zero whenever the
/// field is rational.
#[derive(Clone, Debug)]
pub struct Scalar {
    re: BigRational,
    irr: BigRational,
    field: FieldKind,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::rational(BigRational::one())
    }

    pub fn rational(q: BigRational) -> Self {
        Scalar {
            re: q,
            irr: BigRational::zero(),
            field: FieldKind::Rational,
        }
    }

    pub fn int(n: i64) -> Self {
        Scalar::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::rational(BigRational::from_integer(n))
    }

    /// `num/den`; panics when `den == 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        Scalar::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `re + irr·√d`.
    pub fn quad(re: BigRational, irr: BigRational, d: u64) -> Result<Self, ExactError> {
        let field = FieldKind::quad(d)?;
        Ok(Scalar { re, irr, field })
    }

    /// `√d` as an element of `Q(√d)`.
    pub fn sqrt_of(d: u64) -> Result<Self, ExactError> {
        Scalar::quad(BigRational::zero(), BigRational::one(), d)
    }

    /// Re-tag a value into a (compatible) larger field.
    pub fn in_field(mut self, field: FieldKind) -> Result<Self, ExactError> {
        self.field = self.field.join(field)?;
        Ok(self)
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.re
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irr
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.re)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.irr.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    fn radicand(&self) -> BigInt {
        BigInt::from(self.field.radicand().unwrap_or(0))
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> Ordering {
        let sa = self.re.signum();
        let sb = self.irr.signum();
        if sb.is_zero() {
            return self.re.cmp(&BigRational::zero());
        }
        if sa.is_zero() || sa == sb {
            return sb.cmp(&BigRational::zero());
        }
        // Opposite signs: compare a² with b²d.
        let a2 = &self.re * &self.re;
        let b2d = &self.irr * &self.irr * BigRational::from_integer(self.radicand());
        match a2.cmp(&b2d) {
            Ordering::Greater => self.re.cmp(&BigRational::zero()),
            Ordering::Less => self.irr.cmp(&BigRational::zero()),
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        let field = self.field.join(rhs.field)?;
        Ok(Scalar {
            re: &self.re + &rhs.re,
            irr: &self.irr + &rhs.irr,
            field,
        })
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        let field = self.field.join(rhs.field)?;
        Ok(Scalar {
            re: &self.re - &rhs.re,
            irr: &self.irr - &rhs.irr,
            field,
        })
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        let field = self.field.join(rhs.field)?;
        let d = BigRational::from_integer(BigInt::from(field.radicand().unwrap_or(0)));
        Ok(Scalar {
            re: &self.re * &rhs.re + &self.irr * &rhs.irr * d,
            irr: &self.re * &rhs.irr + &self.irr * &rhs.re,
            field,
        })
    }

    pub fn try_inv(&self) -> Result<Scalar, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.irr.is_zero() {
            return Ok(Scalar {
                re: self.re.recip(),
                irr: BigRational::zero(),
                field: self.field,
            });
        }
        // 1/(a + b√d) = (a − b√d)/(a² − b²d); the norm is nonzero since √d ∉ Q.
        let d = BigRational::from_integer(self.radicand());
        let norm = &self.re * &self.re - &self.irr * &self.irr * d;
        Ok(Scalar {
            re: &self.re / &norm,
            irr: -&self.irr / &norm,
            field: self.field,
        })
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        self.field.join(rhs.field)?;
        self.try_mul(&rhs.try_inv()?)
    }

    pub fn try_cmp(&self, rhs: &Scalar) -> Result<Ordering, ExactError> {
        Ok(self.try_sub(rhs)?.signum())
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one().in_field(self.field).expect("same field");
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Largest integer `n` with `n ≤ self`.
    pub fn floor(&self) -> BigInt {
        if self.irr.is_zero() {
            return self.re.floor().to_integer();
        }
        // b√d = sign(b)·√(b²d); approximate with an integer square root, then
        // correct by exact comparison.
        let b2d = &self.irr * &self.irr * BigRational::from_integer(self.radicand());
        let (num, den) = (b2d.numer().clone(), b2d.denom().clone());
        let root = (&num * &den).sqrt();
        let mut approx = BigRational::new(root, den);
        if self.irr.is_negative() {
            approx = -approx;
        }
        let mut n = (&self.re + approx).floor().to_integer();
        loop {
            let cand = Scalar::from_bigint(n.clone());
            if cand.try_cmp(self).expect("same field") == Ordering::Greater {
                n -= 1;
                continue;
            }
            let next = Scalar::from_bigint(&n + 1);
            if next.try_cmp(self).expect("same field") != Ordering::Greater {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Smallest integer `n` with `n ≥ self`.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Rational lower bound within `2^-bits` of the value.
    pub fn lower_approx(&self, bits: u32) -> BigRational {
        let scale = BigInt::one() << bits;
        let scaled = self * &Scalar::from_bigint(scale.clone());
        BigRational::new(scaled.floor(), scale)
    }

    /// Integer approximation of `10^digits · self` rounded toward −∞; used by
    /// decimal renderings in diagnostics.
    pub fn scaled_floor(&self, digits: u32) -> BigInt {
        let scale = num::pow(BigInt::from(10), digits as usize);
        (self * &Scalar::from_bigint(scale)).floor()
    }

    pub fn to_i64(&self) -> Option<i64> {
        let q = self.as_rational()?;
        if q.is_integer() {
            q.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Parse with a required field context: the literal must be compatible
    /// with `field` and the result is tagged with it.
    pub fn parse_in(s: &str, field: FieldKind) -> Result<Scalar, ExactError> {
        s.parse::<Scalar>()?.in_field(field)
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let bad = || ExactError::Parse(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Scalar {
    type Err = ExactError;

    /// Accepts `"3/4"`, `"-2"`, `"3/4+5/2√2"`, `"1-√2"`, `"√3"`, and the
    /// ASCII spelling `sqrt(2)` for `√2`.
    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(raw.to_string());
        let s: String = raw
            .replace("sqrt", "√")
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')' && *c != '*')
            .collect();
        let Some(root_pos) = s.find('√') else {
            return Ok(Scalar::rational(parse_rational(&s)?));
        };
        let radicand: u64 = s[root_pos + '√'.len_utf8()..].parse().map_err(|_| bad())?;
        let head = &s[..root_pos];
        // Split the rational part from the coefficient at the last sign that
        // is not leading and not inside an exponent-free fraction.
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .last();
        let (re_str, coeff_str) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("", head),
        };
        let re = if re_str.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(re_str)?
        };
        let coeff_body = coeff_str.trim_start_matches('+');
        let irr = match coeff_body {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other)?,
        };
        Scalar::quad(re, irr, radicand)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.field.radicand().filter(|_| !self.irr.is_zero()) else {
            return write!(f, "{}", self.re);
        };
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&self.re.to_string());
        }
        let one = BigRational::one();
        if self.irr == one {
            if !out.is_empty() {
                out.push('+');
            }
        } else if self.irr == -one.clone() {
            out.push('-');
        } else {
            if self.irr.is_positive() && !out.is_empty() {
                out.push('+');
            }
            out.push_str(&self.irr.to_string());
        }
        write!(f, "{out}√{d}")
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Scalar::int(n)),
        }
    }
}

impl Serialize for FieldKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            FieldKind::Rational => serializer.serialize_str("Q"),
            FieldKind::QuadExt(d) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("quad", d)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for FieldKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Quad { quad: u64 },
        }
        match Raw::deserialize(deserializer)? {
            Raw::Name(s) if s == "Q" => Ok(FieldKind::Rational),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("unknown field {s:?}"))),
            Raw::Quad { quad } => FieldKind::quad(quad).map_err(serde::de::Error::custom),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.re != other.re || self.irr != other.irr {
            return false;
        }
        self.irr.is_zero() || self.field == other.field
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.re.hash(state);
        self.irr.hash(state);
        if !self.irr.is_zero() {
            self.field.hash(state);
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on compatible values. Panics when both operands are
/// irrational elements of different quadratic fields; use
/// [`Scalar::try_cmp`] where that can happen.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparison across incompatible fields")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -&self.re,
            irr: -&self.irr,
            field: self.field,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::rational(q)
    }
}

/// Square-free decomposition of a positive rational: `q = s²·k` with `k` a
/// square-free positive integer. Returns `(s, k)`.
pub fn square_free_split(q: &BigRational) -> Option<(BigRational, u64)> {
    if !q.is_positive() {
        return None;
    }
    // q = n/m = n·m / m², so factor n·m.
    let prod = q.numer() * q.denom();
    let mut rest = prod.to_u64()?;
    let mut square = 1u64;
    let mut kernel = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            kernel *= p;
        }
        p += 1;
    }
    kernel *= rest;
    let s = BigRational::new(BigInt::from(square), q.denom().clone());
    Some((s, kernel))
}

/// Exact square root of a non-negative rational, as an element of `Q` or of
/// the matching `Q(√k)`.
pub fn sqrt_rational(q: &BigRational) -> Option<Scalar> {
    if q.is_zero() {
        return Some(Scalar::zero());
    }
    let (s, k) = square_free_split(q)?;
    if k == 1 {
        Some(Scalar::rational(s))
    } else {
        Scalar::quad(BigRational::zero(), s, k).ok()
    }
}

impl Scalar {
    /// Gcd-normalised integer vector proportional to `v` (all entries rational).
    pub fn clear_denominators(v: &[Scalar]) -> Option<Vec<BigInt>> {
        let mut lcm = BigInt::one();
        for x in v {
            let q = x.as_rational()?;
            lcm = lcm.lcm(q.denom());
        }
        let ints: Vec<BigInt> = v
            .iter()
            .map(|x| (x.as_rational().unwrap() * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Some(ints);
        }
        Some(ints.into_iter().map(|x| x / &g).collect())
    }
}
