//! Exact feasibility of mixed strict/non-strict linear systems by
//! Fourier–Motzkin elimination, with back-substitution producing witness
//! points.

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    /// `> 0`
    Gt,
    /// `≥ 0`
    Ge,
    /// `= 0`
    Eq,
}

/// The constraint `coeffs · x + constant  rel  0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, constant: BigRational, rel: Rel) -> Self {
        Constraint {
            coeffs,
            constant,
            rel,
        }
    }

    pub fn from_ints(coeffs: &[i64], constant: i64, rel: Rel) -> Self {
        Constraint {
            coeffs: coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            constant: BigRational::from_integer(constant.into()),
            rel,
        }
    }

    pub fn holds_at(&self, x: &[BigRational]) -> bool {
        let v: BigRational = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .fold(self.constant.clone(), |acc, t| acc + t);
        match self.rel {
            Rel::Gt => v.is_positive(),
            Rel::Ge => !v.is_negative(),
            Rel::Eq => v.is_zero(),
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn constant_ok(&self) -> bool {
        match self.rel {
            Rel::Gt => self.constant.is_positive(),
            Rel::Ge => !self.constant.is_negative(),
            Rel::Eq => self.constant.is_zero(),
        }
    }

    /// Scale by a positive factor so the first nonzero coefficient is ±1.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c = &*c / &lead;
            }
            self.constant = &self.constant / &lead;
        }
        self
    }
}

/// How to pick a value for a variable inside its feasible interval.
enum Pick<'a, R: Rng + ?Sized> {
    Midpoint,
    Random(&'a mut R),
}

type Bound = Option<(BigRational, bool)>;

impl<R: Rng + ?Sized> Pick<'_, R> {
    fn choose(&mut self, lo: Bound, hi: Bound) -> BigRational {
        let one = BigRational::one();
        match self {
            Pick::Midpoint => match (lo, hi) {
                (Some((l, _)), Some((h, _))) => (l + h) / BigRational::from_integer(2.into()),
                (Some((l, _)), None) => l + one,
                (None, Some((h, _))) => h - one,
                (None, None) => BigRational::zero(),
            },
            Pick::Random(rng) => {
                let num: i64 = rng.gen_range(1..64);
                let t = BigRational::new(BigInt::from(num), BigInt::from(64));
                match (lo, hi) {
                    (Some((l, _)), Some((h, _))) => {
                        if l == h {
                            l
                        } else {
                            &l + (h - &l) * t
                        }
                    }
                    (Some((l, _)), None) => l + t * BigRational::from_integer(4.into()),
                    (None, Some((h, _))) => h - t * BigRational::from_integer(4.into()),
                    (None, None) => (t - BigRational::new(1.into(), 2.into())) * BigRational::from_integer(4.into()),
                }
            }
        }
    }
}

/// A point satisfying every constraint, or `None` when the system is
/// infeasible. Deterministic: each variable is placed at the midpoint of its
/// interval during back-substitution.
pub fn feasible_point(n: usize, constraints: &[Constraint]) -> Option<Vec<BigRational>> {
    let mut pick: Pick<'_, rand::rngs::mock::StepRng> = Pick::Midpoint;
    solve(n, constraints, &mut pick)
}

/// A pseudo-random point of the feasible set (relative interior when the
/// set has nonempty interior in its affine hull).
pub fn random_point<R: Rng + ?Sized>(
    n: usize,
    constraints: &[Constraint],
    rng: &mut R,
) -> Option<Vec<BigRational>> {
    let mut pick = Pick::Random(rng);
    solve(n, constraints, &mut pick)
}

pub fn is_feasible(n: usize, constraints: &[Constraint]) -> bool {
    feasible_point(n, constraints).is_some()
}

fn solve<R: Rng + ?Sized>(
    n: usize,
    constraints: &[Constraint],
    pick: &mut Pick<'_, R>,
) -> Option<Vec<BigRational>> {
    for c in constraints {
        assert_eq!(c.coeffs.len(), n, "constraint arity mismatch");
    }
    let active: Vec<usize> = (0..n).collect();
    let mut x = vec![BigRational::zero(); n];
    recurse(constraints.to_vec(), &active, &mut x, pick)?;
    debug_assert!(constraints.iter().all(|c| c.holds_at(&x)));
    Some(x)
}

fn recurse<R: Rng + ?Sized>(
    cons: Vec<Constraint>,
    active: &[usize],
    x: &mut [BigRational],
    pick: &mut Pick<'_, R>,
) -> Option<()> {
    let mut cons = simplify(cons)?;

    // Equalities: solve for one variable and substitute.
    if let Some(pos) = cons.iter().position(|c| c.rel == Rel::Eq) {
        let eq = cons.swap_remove(pos);
        let v = *active.iter().find(|&&v| !eq.coeffs[v].is_zero())?;
        let a = eq.coeffs[v].clone();
        let substituted: Vec<Constraint> = cons
            .into_iter()
            .map(|c| {
                let f = &c.coeffs[v] / &a;
                if f.is_zero() {
                    return c;
                }
                let coeffs = c
                    .coeffs
                    .iter()
                    .zip(&eq.coeffs)
                    .map(|(ci, ei)| ci - &f * ei)
                    .collect();
                Constraint::new(coeffs, &c.constant - &f * &eq.constant, c.rel)
            })
            .collect();
        let rest: Vec<usize> = active.iter().copied().filter(|&u| u != v).collect();
        recurse(substituted, &rest, x, pick)?;
        let others: BigRational = rest
            .iter()
            .map(|&u| &eq.coeffs[u] * &x[u])
            .fold(eq.constant.clone(), |acc, t| acc + t);
        x[v] = -others / a;
        return Some(());
    }

    if active.is_empty() {
        return Some(());
    }

    // Eliminate the variable with the fewest generated pairs.
    let cost = |v: usize| {
        let p = cons.iter().filter(|c| c.coeffs[v].is_positive()).count();
        let m = cons.iter().filter(|c| c.coeffs[v].is_negative()).count();
        p * m
    };
    let v = *active.iter().min_by_key(|&&v| (cost(v), v)).unwrap();
    let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for c in &cons {
        if c.coeffs[v].is_positive() {
            lower.push(c.clone());
        } else if c.coeffs[v].is_negative() {
            upper.push(c.clone());
        } else {
            rest.push(c.clone());
        }
    }
    for l in &lower {
        for u in &upper {
            let (a, b) = (l.coeffs[v].clone(), -u.coeffs[v].clone());
            let coeffs = l
                .coeffs
                .iter()
                .zip(&u.coeffs)
                .map(|(lc, uc)| lc * &b + uc * &a)
                .collect();
            let constant = &l.constant * &b + &u.constant * &a;
            let rel = if l.rel == Rel::Gt || u.rel == Rel::Gt {
                Rel::Gt
            } else {
                Rel::Ge
            };
            rest.push(Constraint::new(coeffs, constant, rel));
        }
    }
    let remaining: Vec<usize> = active.iter().copied().filter(|&u| u != v).collect();
    recurse(rest, &remaining, x, pick)?;

    // Interval for v given the others.
    let residual = |c: &Constraint| -> BigRational {
        remaining
            .iter()
            .map(|&u| &c.coeffs[u] * &x[u])
            .fold(c.constant.clone(), |acc, t| acc + t)
    };
    let mut lo: Bound = None;
    for c in &lower {
        let b = -residual(c) / &c.coeffs[v];
        let strict = c.rel == Rel::Gt;
        lo = Some(match lo {
            Some((cur, s)) if cur > b || (cur == b && s) => (cur, s),
            Some((cur, s)) if cur == b => (cur, s || strict),
            _ => (b, strict),
        });
    }
    let mut hi: Bound = None;
    for c in &upper {
        let b = -residual(c) / &c.coeffs[v];
        let strict = c.rel == Rel::Gt;
        hi = Some(match hi {
            Some((cur, s)) if cur < b || (cur == b && s) => (cur, s),
            Some((cur, s)) if cur == b => (cur, s || strict),
            _ => (b, strict),
        });
    }
    x[v] = pick.choose(lo, hi);
    Some(())
}

/// Drops variable-free constraints (failing if one is violated), normalizes,
/// removes duplicates and keeps only the tightest of parallel inequalities.
fn simplify(cons: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut out: Vec<Constraint> = Vec::with_capacity(cons.len());
    for c in cons {
        if c.is_trivial() {
            if !c.constant_ok() {
                return None;
            }
            continue;
        }
        let c = c.normalized();
        if c.rel == Rel::Eq {
            if !out.contains(&c) {
                out.push(c);
            }
            continue;
        }
        match out
            .iter_mut()
            .find(|o| o.rel != Rel::Eq && o.coeffs == c.coeffs)
        {
            // a·x + b₁ ≥ 0 is implied by a·x + b₂ ≥ 0 when b₂ ≤ b₁.
            Some(o) => {
                if c.constant < o.constant || (c.constant == o.constant && c.rel == Rel::Gt) {
                    *o = c;
                }
            }
            None => out.push(c),
        }
    }
    Some(out)
}
