//! Walls `W_{i,F}` in the space of stability parameters and the chambers
//! they cut out of the simplex `Σσ_j = 1`.

use std::collections::HashMap;
use std::fmt;

use num::{BigRational, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, Scalar};
use crate::feasibility::{self, Constraint, Rel};
use crate::sheaf::{FamilySpec, SheafClass, StabilityParameter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChamberError {
    #[error("walls need sheaves of dimension at least 1")]
    ZeroDimensional,
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("sign vector is not realised by any parameter")]
    Infeasible,
    #[error("wall normal does not fit in 64-bit integers")]
    Overflow,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallOrigin {
    /// Coefficient index `i` of the Hilbert polynomial.
    pub index: usize,
    pub sub: String,
    pub sheaf: String,
}

/// The hyperplane `Σ_j normal_j σ_j = 0`, normalized to coprime integers
/// with first nonzero entry positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub normal: Vec<i64>,
    pub origins: Vec<WallOrigin>,
}

impl Wall {
    pub fn eval(&self, sigma: &[Scalar]) -> Result<Scalar, ExactError> {
        let mut acc = Scalar::zero();
        for (n, s) in self.normal.iter().zip(sigma) {
            acc = acc.try_add(&Scalar::int(*n).try_mul(s)?)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(x: &Scalar) -> Sign {
        match x.signum() {
            std::cmp::Ordering::Less => Sign::Neg,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Pos,
        }
    }

    fn rel(self) -> (i64, Rel) {
        match self {
            Sign::Neg => (-1, Rel::Gt),
            Sign::Zero => (1, Rel::Eq),
            Sign::Pos => (1, Rel::Gt),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "-",
            Sign::Zero => "0",
            Sign::Pos => "+",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "-" => Ok(Sign::Neg),
            "0" => Ok(Sign::Zero),
            "+" => Ok(Sign::Pos),
            other => Err(serde::de::Error::custom(format!("bad sign {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `σ_j ≥ 0`.
    FullOrthant,
    /// `σ_j > 0`.
    PositiveOrthant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chamber {
    pub signs: Vec<Sign>,
    pub sample: Vec<Scalar>,
    pub full_dim: bool,
}

/// Integer normal for the comparison of `i`-th coefficients of `F` and `E`,
/// or `None` when the form vanishes identically.
fn wall_normal(e: &SheafClass, f: &SheafClass, i: usize) -> Result<Option<Vec<i64>>, ChamberError> {
    let form: Vec<Scalar> = (0..e.j0())
        .map(|j| {
            let a = f.alpha[j][i].try_div(&f.rank)?;
            let b = e.alpha[j][i].try_div(&e.rank)?;
            a.try_sub(&b)
        })
        .collect::<Result<_, _>>()?;
    if form.iter().all(Scalar::is_zero) {
        return Ok(None);
    }
    let ints = Scalar::clear_denominators(&form)
        .ok_or_else(|| ChamberError::Inconsistent("wall forms need rational Hilbert data".into()))?;
    let mut out: Vec<i64> = ints
        .iter()
        .map(|x| x.to_i64().ok_or(ChamberError::Overflow))
        .collect::<Result<_, _>>()?;
    if out.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in &mut out {
            *x = -*x;
        }
    }
    Ok(Some(out))
}

/// Walls from every candidate and every index `i ∈ 1..d−1`, deduplicated
/// and with identically-vanishing and sign-definite forms discarded.
pub fn compute_walls(e: &SheafClass, family: &FamilySpec) -> Result<Vec<Wall>, ChamberError> {
    if e.dim == 0 {
        return Err(ChamberError::ZeroDimensional);
    }
    let mut walls: Vec<Wall> = Vec::new();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    for f in &family.candidates {
        if f.dim != e.dim || f.j0() != e.j0() {
            return Err(ChamberError::Inconsistent(format!(
                "candidate {:?} does not match the shape of {:?}",
                f.label, e.label
            )));
        }
        for i in 1..e.dim {
            let Some(normal) = wall_normal(e, f, i)? else { continue };
            // Strictly one-signed forms never vanish on the closed orthant
            // minus the origin.
            if normal.iter().all(|&x| x > 0) || normal.iter().all(|&x| x < 0) {
                continue;
            }
            let origin = WallOrigin {
                index: i,
                sub: f.label.clone(),
                sheaf: e.label.clone(),
            };
            match index.get(&normal) {
                Some(&k) => walls[k].origins.push(origin),
                None => {
                    index.insert(normal.clone(), walls.len());
                    walls.push(Wall {
                        normal,
                        origins: vec![origin],
                    });
                }
            }
        }
    }
    Ok(walls)
}

/// Checks the conditions under which the wall signs determine every
/// comparison: `α_d^{L_j} = rank·deg_j` with the same `deg_j` for `E` and
/// all candidates, and `α_0^{L_j}` independent of `j`. Returns one message
/// per violated condition.
pub fn surrogate_warnings(e: &SheafClass, family: &FamilySpec) -> Vec<String> {
    let mut out = Vec::new();
    let d = e.dim;
    let degs: Vec<Scalar> = e.alpha.iter().map(|row| &row[d] / &e.rank).collect();
    for x in std::iter::once(e).chain(&family.candidates) {
        if x.j0() != e.j0() || x.dim != d {
            out.push(format!("{}: shape differs from {}", x.label, e.label));
            continue;
        }
        if x.alpha.iter().zip(&degs).any(|(row, deg)| row[d] != &x.rank * deg) {
            out.push(format!(
                "{}: leading coefficients are not rank times the degrees of {}",
                x.label, e.label
            ));
        }
        if x.alpha.iter().any(|row| row[0] != x.alpha[0][0]) {
            out.push(format!("{}: constant terms depend on the line bundle", x.label));
        }
    }
    out
}

/// Exact sign of every wall form at `σ`.
pub fn locate(sigma: &StabilityParameter, walls: &[Wall]) -> Result<Vec<Sign>, ChamberError> {
    walls
        .iter()
        .map(|w| {
            if w.normal.len() != sigma.len() {
                return Err(ChamberError::Inconsistent("parameter length differs from walls".into()));
            }
            Ok(Sign::of(&w.eval(&sigma.0)?))
        })
        .collect()
}

fn region_constraints(j0: usize, region: Region) -> Vec<Constraint> {
    let mut cons: Vec<Constraint> = (0..j0)
        .map(|j| {
            let mut c = vec![0; j0];
            c[j] = 1;
            let rel = match region {
                Region::FullOrthant => Rel::Ge,
                Region::PositiveOrthant => Rel::Gt,
            };
            Constraint::from_ints(&c, 0, rel)
        })
        .collect();
    cons.push(Constraint::from_ints(&vec![1; j0], -1, Rel::Eq));
    cons
}

fn sign_constraint(w: &Wall, s: Sign) -> Constraint {
    let (factor, rel) = s.rel();
    let coeffs: Vec<i64> = w.normal.iter().map(|x| factor * x).collect();
    Constraint::from_ints(&coeffs, 0, rel)
}

fn constraints_for(signs: &[Sign], walls: &[Wall], j0: usize, region: Region) -> Vec<Constraint> {
    let mut cons = region_constraints(j0, region);
    cons.extend(walls.iter().zip(signs).map(|(w, &s)| sign_constraint(w, s)));
    cons
}

fn to_scalars(x: Vec<BigRational>) -> Vec<Scalar> {
    x.into_iter().map(Scalar::rational).collect()
}

/// All sign vectors realised on the simplex within `region`, each with an
/// exact sample point. Built wall by wall, extending only feasible prefixes.
pub fn enumerate_chambers(walls: &[Wall], j0: usize, region: Region) -> Vec<Chamber> {
    let mut prefixes: Vec<Vec<Sign>> = vec![Vec::new()];
    for (k, _) in walls.iter().enumerate() {
        let mut next = Vec::new();
        for p in &prefixes {
            for s in [Sign::Neg, Sign::Zero, Sign::Pos] {
                let mut cand = p.clone();
                cand.push(s);
                if feasibility::is_feasible(j0, &constraints_for(&cand, &walls[..=k], j0, region)) {
                    next.push(cand);
                }
            }
        }
        prefixes = next;
    }
    prefixes
        .into_iter()
        .filter_map(|signs| {
            let point = feasibility::feasible_point(j0, &constraints_for(&signs, walls, j0, region))?;
            let full_dim = !signs.contains(&Sign::Zero);
            Some(Chamber {
                signs,
                sample: to_scalars(point),
                full_dim,
            })
        })
        .collect()
}

/// A rational point of the simplex (closed orthant) with the given signs.
pub fn rational_representative(signs: &[Sign], walls: &[Wall]) -> Result<StabilityParameter, ChamberError> {
    let j0 = walls
        .first()
        .map(|w| w.normal.len())
        .ok_or_else(|| ChamberError::Inconsistent("no walls; any parameter works".into()))?;
    rational_representative_in(signs, walls, j0, Region::FullOrthant)
}

pub fn rational_representative_in(
    signs: &[Sign],
    walls: &[Wall],
    j0: usize,
    region: Region,
) -> Result<StabilityParameter, ChamberError> {
    if signs.len() != walls.len() {
        return Err(ChamberError::Inconsistent("one sign per wall expected".into()));
    }
    let point = feasibility::feasible_point(j0, &constraints_for(signs, walls, j0, region))
        .ok_or(ChamberError::Infeasible)?;
    Ok(StabilityParameter(to_scalars(point)))
}

/// Pseudo-random rational points with the given sign vector.
pub fn sample_points<R: Rng + ?Sized>(
    signs: &[Sign],
    walls: &[Wall],
    j0: usize,
    region: Region,
    count: usize,
    rng: &mut R,
) -> Result<Vec<StabilityParameter>, ChamberError> {
    let cons = constraints_for(signs, walls, j0, region);
    (0..count)
        .map(|_| {
            feasibility::random_point(j0, &cons, rng)
                .map(|p| StabilityParameter(to_scalars(p)))
                .ok_or(ChamberError::Infeasible)
        })
        .collect()
}
