//! Sample-level traces of how the semistable set of a fixed collection of
//! representations changes as σ moves.
//!
//! Module semistability stands in for GIT semistability of the
//! corresponding points; nothing here describes quotients.

use std::collections::BTreeSet;

use num::{Integer, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::chamber::{Wall, WallOrigin};
use crate::exact::{sqrt_rational, Scalar};
use crate::field::Field;
use crate::quiver::{character_of, semistability_check, theta_of, DimVector, QuiverError, Representation, Strategy};
use crate::sheaf::StabilityParameter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VgitError {
    #[error("path points must be strictly positive")]
    NonPositive,
    #[error("path points must be rational")]
    NotRational,
    #[error("no samples given")]
    NoSamples,
    #[error("samples disagree on {0}")]
    Mismatch(&'static str),
    #[error("walls are hyperplanes only when the V and W dimensions are proportional")]
    NonlinearWalls,
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

pub struct Sample<F: Field> {
    pub label: String,
    pub rep: Representation<F>,
}

/// Points are `σ(s) = (1 − s)·start + s·end` for `s = k/steps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: Vec<Scalar>,
    pub end: Vec<Scalar>,
    pub steps: usize,
}

impl Segment {
    pub fn at(&self, s: &Scalar) -> Vec<Scalar> {
        let one = Scalar::one();
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| (&one - s) * a + s * b)
            .collect()
    }

    fn validate(&self) -> Result<(), VgitError> {
        if self.start.len() != self.end.len() {
            return Err(VgitError::Mismatch("path endpoint length"));
        }
        if self.start.iter().chain(&self.end).any(|x| !x.is_rational()) {
            return Err(VgitError::NotRational);
        }
        if self.start.iter().chain(&self.end).any(|x| !x.is_positive()) {
            return Err(VgitError::NonPositive);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanEvent {
    /// Closed `s`-interval on which the semistable set is constant.
    pub from: Scalar,
    pub to: Scalar,
    pub semistable: Vec<String>,
    /// Interior recheck at three points agreed with the endpoint verdicts.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flip {
    pub s_minus: Scalar,
    pub s_plus: Scalar,
    /// Exact parameter of the wall crossing when a single candidate root
    /// lies in `[s_minus, s_plus]`.
    pub s_zero: Option<Scalar>,
    pub sigma_minus: Vec<Scalar>,
    pub sigma_zero: Option<Vec<Scalar>>,
    pub sigma_plus: Vec<Scalar>,
    pub gained: Vec<String>,
    pub lost: Vec<String>,
    pub semistable_at_zero: Option<Vec<String>>,
    /// `ss(σ⁻) ∪ ss(σ⁺) ⊆ ss(σ⁰)`.
    pub inclusion: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanTrace {
    pub path: Segment,
    pub resolution: Scalar,
    pub step_verdicts: Vec<Vec<String>>,
    pub events: Vec<ScanEvent>,
    pub flips: Vec<Flip>,
    /// Searches that were inconclusive (seeded strategy) were counted as
    /// semistable.
    pub inconclusive: usize,
}

/// Bisection stops once the bracket is at most this long in `s`.
pub fn resolution() -> Scalar {
    Scalar::frac(1, 1 << 20)
}

type Labels = BTreeSet<String>;

struct Scanner<'a, F: Field> {
    samples: &'a [Sample<F>],
    path: &'a Segment,
    strategy: Strategy,
    inconclusive: usize,
}

impl<F: Field> Scanner<'_, F> {
    fn semistable_at(&mut self, sigma: &[Scalar]) -> Result<Labels, VgitError> {
        let sigma = StabilityParameter(sigma.to_vec());
        let mut out = Labels::new();
        for sample in self.samples {
            let verdict = semistability_check(&sample.rep, &sigma, self.strategy)?.is_semistable();
            if verdict.is_none() {
                self.inconclusive += 1;
            }
            if verdict.unwrap_or(true) {
                out.insert(sample.label.clone());
            }
        }
        Ok(out)
    }

    fn at(&mut self, s: &Scalar) -> Result<Labels, VgitError> {
        let sigma = self.path.at(s);
        self.semistable_at(&sigma)
    }
}

fn labels(set: &Labels) -> Vec<String> {
    set.iter().cloned().collect()
}

/// Every dimension vector strictly between `0` and `d`.
pub fn sub_dimension_vectors(d: &DimVector) -> Vec<DimVector> {
    let flat = d.flat();
    let mut cur = vec![0usize; flat.len()];
    let mut out = Vec::new();
    loop {
        if cur.iter().any(|&x| x > 0) && cur != flat {
            out.push(DimVector::from_flat(&cur).expect("even length"));
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                return out;
            }
            if cur[i] < flat[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Coefficients `(c0, c1)` of `s ↦ σ(s)·x`.
fn linear_along(path: &Segment, x: &[usize]) -> (Scalar, Scalar) {
    let dot = |p: &[Scalar]| -> Scalar { p.iter().zip(x).map(|(a, &k)| a * Scalar::int(k as i64)).sum() };
    let c0 = dot(&path.start);
    (c0.clone(), dot(&path.end) - c0)
}

/// Roots in `[lo, hi]` of `θ_{σ(s)}(d') · (σ(s)·v)(σ(s)·w)`, a polynomial of
/// degree at most two in `s`.
fn wall_roots(path: &Segment, d: &DimVector, sub: &DimVector, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
    let (a0, a1) = linear_along(path, &sub.v);
    let (b0, b1) = linear_along(path, &d.w);
    let (c0, c1) = linear_along(path, &sub.w);
    let (e0, e1) = linear_along(path, &d.v);
    let q0 = &a0 * &b0 - &c0 * &e0;
    let q1 = &a0 * &b1 + &a1 * &b0 - &c0 * &e1 - &c1 * &e0;
    let q2 = &a1 * &b1 - &c1 * &e1;
    let mut roots = Vec::new();
    if q2.is_zero() {
        if !q1.is_zero() {
            roots.push(-(&q0 / &q1));
        }
    } else {
        let disc = &q1 * &q1 - Scalar::int(4) * &q2 * &q0;
        if let Some(r) = disc.as_rational().filter(|r| !r.is_negative()).and_then(sqrt_rational) {
            let two_a = Scalar::int(2) * &q2;
            roots.push((-&q1 + &r) / &two_a);
            roots.push((-&q1 - &r) / &two_a);
        }
    }
    roots.retain(|r| r >= lo && r <= hi);
    roots
}

fn interval_verified<F: Field>(
    sc: &mut Scanner<'_, F>,
    from: &Scalar,
    to: &Scalar,
    expect: &Labels,
) -> Result<bool, VgitError> {
    if from == to {
        return Ok(true);
    }
    for k in 1..=3 {
        let s = from + (to - from) * Scalar::frac(k, 4);
        if sc.at(&s)? != *expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Semistable sets of `samples` along `path`, with every change point
/// bracketed to [`resolution`] by bisection and, where possible, located
/// exactly as a root of some `θ_{σ(s)}(d') = 0`.
pub fn sigma_scan<F: Field>(samples: &[Sample<F>], path: &Segment, strategy: Strategy) -> Result<ScanTrace, VgitError> {
    let first = samples.first().ok_or(VgitError::NoSamples)?;
    if samples.iter().any(|s| s.rep.dims != first.rep.dims) {
        return Err(VgitError::Mismatch("dimension vector"));
    }
    if samples.iter().any(|s| s.rep.spec != first.rep.spec) {
        return Err(VgitError::Mismatch("quiver"));
    }
    if samples.iter().any(|s| s.rep.field.name() != first.rep.field.name()) {
        return Err(VgitError::Mismatch("field"));
    }
    path.validate()?;
    if path.start.len() != first.rep.j0() {
        return Err(VgitError::Mismatch("σ length"));
    }
    let d = first.rep.dims.clone();
    let subs = sub_dimension_vectors(&d);
    let steps = if path.start == path.end { 0 } else { path.steps.max(1) };
    let mut sc = Scanner {
        samples,
        path,
        strategy,
        inconclusive: 0,
    };
    let grid: Vec<Scalar> = (0..=steps)
        .map(|k| if steps == 0 { Scalar::zero() } else { Scalar::frac(k as i64, steps as i64) })
        .collect();
    let mut sets = Vec::with_capacity(grid.len());
    for s in &grid {
        sets.push(sc.at(s)?);
    }

    let res = resolution();
    // (lo, hi, set at lo, set at hi)
    let mut brackets: Vec<(Scalar, Scalar, Labels, Labels)> = Vec::new();
    for k in 0..steps {
        if sets[k] == sets[k + 1] {
            continue;
        }
        // Several changes may fall between two grid points; after each
        // bracket the search restarts from its upper end.
        let mut left = grid[k].clone();
        let mut left_set = sets[k].clone();
        while left_set != sets[k + 1] {
            let (mut lo, mut hi) = (left.clone(), grid[k + 1].clone());
            let mut hi_set = sets[k + 1].clone();
            while &hi - &lo > res {
                let mid = (&lo + &hi) / Scalar::int(2);
                let m = sc.at(&mid)?;
                if m == left_set {
                    lo = mid;
                } else {
                    hi = mid;
                    hi_set = m;
                }
            }
            brackets.push((lo, hi.clone(), left_set, hi_set.clone()));
            left = hi;
            left_set = hi_set;
        }
    }

    let mut flips: Vec<Flip> = Vec::new();
    let mut events: Vec<ScanEvent> = Vec::new();
    let mut cursor = grid[0].clone();
    let mut cursor_set = sets[0].clone();
    for (lo, hi, lo_set, hi_set) in brackets {
        let mut roots: Vec<Scalar> = subs.iter().flat_map(|sub| wall_roots(path, &d, sub, &lo, &hi)).collect();
        roots.sort();
        roots.dedup();
        let s_zero = if roots.len() == 1 { roots.pop() } else { None };
        let verified = interval_verified(&mut sc, &cursor, &lo, &cursor_set)?;
        events.push(ScanEvent {
            from: cursor.clone(),
            to: lo.clone(),
            semistable: labels(&cursor_set),
            verified,
        });

        // Merge with the previous flip when both brackets share the wall.
        if let (Some(prev), Some(z)) = (flips.last_mut(), &s_zero) {
            if prev.s_zero.as_ref() == Some(z) {
                let minus_set = sc.at(&prev.s_minus)?;
                prev.s_plus = hi.clone();
                prev.sigma_plus = path.at(&hi);
                prev.gained = labels(&hi_set.difference(&minus_set).cloned().collect());
                prev.lost = labels(&minus_set.difference(&hi_set).cloned().collect());
                let zero_set: Labels = prev.semistable_at_zero.iter().flatten().cloned().collect();
                prev.inclusion = Some(minus_set.union(&hi_set).all(|x| zero_set.contains(x)));
                events.pop();
                cursor = hi;
                cursor_set = hi_set;
                continue;
            }
        }

        let (sigma_zero, zero_set) = match &s_zero {
            Some(z) => {
                let sz = path.at(z);
                let set = sc.semistable_at(&sz)?;
                (Some(sz), Some(set))
            }
            None => (None, None),
        };
        let inclusion = zero_set
            .as_ref()
            .map(|z| lo_set.union(&hi_set).all(|x| z.contains(x)));
        flips.push(Flip {
            s_minus: lo.clone(),
            s_plus: hi.clone(),
            s_zero,
            sigma_minus: path.at(&lo),
            sigma_zero,
            sigma_plus: path.at(&hi),
            gained: labels(&hi_set.difference(&lo_set).cloned().collect()),
            lost: labels(&lo_set.difference(&hi_set).cloned().collect()),
            semistable_at_zero: zero_set.as_ref().map(labels),
            inclusion,
        });
        cursor = hi;
        cursor_set = hi_set;
    }
    let end = grid.last().expect("nonempty grid").clone();
    let verified = interval_verified(&mut sc, &cursor, &end, &cursor_set)?;
    events.push(ScanEvent {
        from: cursor,
        to: end,
        semistable: labels(&cursor_set),
        verified,
    });
    flips.retain(|f| !(f.gained.is_empty() && f.lost.is_empty()));
    for f in &flips {
        if let (Some(z), Some(set)) = (&f.s_zero, &f.semistable_at_zero) {
            events.push(ScanEvent {
                from: z.clone(),
                to: z.clone(),
                semistable: set.clone(),
                verified: true,
            });
        }
    }
    events.sort_by(|a, b| a.from.cmp(&b.from));

    Ok(ScanTrace {
        path: path.clone(),
        resolution: res,
        step_verdicts: sets.iter().map(labels).collect(),
        events,
        flips,
        inconclusive: sc.inconclusive,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridCell {
    /// Barycentric position `(a, b, c)/divisions`.
    pub position: [usize; 3],
    pub sigma: Vec<Scalar>,
    pub semistable: Vec<String>,
}

/// Semistable sets at the points of the regular grid with `divisions`
/// subdivisions on the triangle spanned by three positive σ.
pub fn sigma_grid<F: Field>(
    samples: &[Sample<F>],
    vertices: &[Vec<Scalar>; 3],
    divisions: usize,
    strategy: Strategy,
) -> Result<Vec<GridCell>, VgitError> {
    if samples.is_empty() {
        return Err(VgitError::NoSamples);
    }
    if vertices.iter().flatten().any(|x| !x.is_positive()) {
        return Err(VgitError::NonPositive);
    }
    let dummy = Segment {
        start: vertices[0].clone(),
        end: vertices[0].clone(),
        steps: 0,
    };
    let mut sc = Scanner {
        samples,
        path: &dummy,
        strategy,
        inconclusive: 0,
    };
    let n = divisions.max(1);
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            let c = n - a - b;
            let sigma: Vec<Scalar> = (0..vertices[0].len())
                .map(|i| {
                    (Scalar::int(a as i64) * &vertices[0][i]
                        + Scalar::int(b as i64) * &vertices[1][i]
                        + Scalar::int(c as i64) * &vertices[2][i])
                        / Scalar::int(n as i64)
                })
                .collect();
            let set = sc.semistable_at(&sigma)?;
            out.push(GridCell {
                position: [a, b, c],
                sigma,
                semistable: labels(&set),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterStep {
    pub sigma: Vec<Scalar>,
    pub exponents: Vec<Scalar>,
    /// `Σ θ·d = 0`.
    pub balanced: bool,
}

/// Character exponents `−θ_σ` at each point of the segment.
pub fn character_path(path: &Segment, d: &DimVector) -> Result<Vec<CharacterStep>, VgitError> {
    path.validate()?;
    let steps = path.steps.max(1);
    (0..=steps)
        .map(|k| {
            let sigma = path.at(&Scalar::frac(k as i64, steps as i64));
            let exponents = character_of(&StabilityParameter(sigma.clone()), d)?;
            let balanced = theta_of(d, &exponents).is_zero();
            Ok(CharacterStep {
                sigma,
                exponents,
                balanced,
            })
        })
        .collect()
}

/// Hyperplanes `θ_σ(d') = 0` for the given sub-dimension vectors, available
/// when `dim W` is proportional to `dim V` so that each is linear in σ.
pub fn candidate_walls(d: &DimVector, candidates: &[DimVector]) -> Result<Vec<Wall>, VgitError> {
    let sv: usize = d.v.iter().sum();
    let sw: usize = d.w.iter().sum();
    let proportional = d.v.iter().zip(&d.w).all(|(&v, &w)| v * sw == w * sv);
    if !proportional || sv == 0 {
        return Err(VgitError::NonlinearWalls);
    }
    let mut walls: Vec<Wall> = Vec::new();
    for (k, sub) in candidates.iter().enumerate() {
        let raw: Vec<i64> = sub
            .v
            .iter()
            .zip(&sub.w)
            .map(|(&v, &w)| (sw * v) as i64 - (sv * w) as i64)
            .collect();
        let g = raw.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            continue;
        }
        let sign = if raw.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) { -1 } else { 1 };
        let normal: Vec<i64> = raw.iter().map(|x| sign * x / g).collect();
        let origin = WallOrigin {
            index: k,
            sub: format!("{:?}", sub.flat()),
            sheaf: "quiver".into(),
        };
        match walls.iter_mut().find(|w| w.normal == normal) {
            Some(w) => w.origins.push(origin),
            None => walls.push(Wall {
                normal,
                origins: vec![origin],
            }),
        }
    }
    Ok(walls)
}

/// Parameter `s` where the segment meets a wall, if it crosses it.
pub fn wall_crossing(path: &Segment, wall: &Wall) -> Option<Scalar> {
    let a = wall.eval(&path.start).ok()?;
    let b = wall.eval(&path.end).ok()?;
    if a == b {
        return None;
    }
    let s = &a / (&a - &b);
    (s >= Scalar::zero() && s <= Scalar::one()).then_some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;
    use crate::linalg::Mat;
    use crate::quiver::QuiverSpec;

    fn kronecker(phi: [[u32; 2]; 2]) -> Representation<GaloisField> {
        let f = GaloisField::new(2).unwrap();
        let spec = QuiverSpec::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
        let dims = DimVector::new(vec![1, 1], vec![1, 1]);
        let maps = (0..2)
            .map(|i| (0..2).map(|j| vec![Mat::from_rows(1, vec![vec![phi[i][j]]])]).collect())
            .collect();
        Representation::new(f, spec, dims, maps).unwrap()
    }

    fn seg(a: [i64; 2], b: [i64; 2], steps: usize) -> Segment {
        Segment {
            start: a.iter().map(|&x| Scalar::int(x)).collect(),
            end: b.iter().map(|&x| Scalar::int(x)).collect(),
            steps,
        }
    }

    #[test]
    fn one_flip_at_midpoint() {
        let samples = vec![
            Sample {
                label: "B".into(),
                rep: kronecker([[0, 1], [1, 1]]),
            },
            Sample {
                label: "C".into(),
                rep: kronecker([[1, 1], [1, 0]]),
            },
        ];
        for steps in [2, 3, 8] {
            let t = sigma_scan(&samples, &seg([1, 2], [2, 1], steps), Strategy::default()).unwrap();
            assert_eq!(t.flips.len(), 1, "steps = {steps}");
            let f = &t.flips[0];
            assert_eq!(f.s_zero, Some(Scalar::frac(1, 2)));
            let z = f.s_zero.clone().unwrap();
            assert!(&z - &f.s_minus <= resolution() && &f.s_plus - &z <= resolution());
            assert_eq!(f.inclusion, Some(true));
            assert_eq!(f.gained.len() + f.lost.len(), 2);
            assert!(t.events.iter().all(|e| e.verified));
        }
    }

    #[test]
    fn constant_sample_and_zero_length() {
        let samples = vec![Sample {
            label: "A".into(),
            rep: kronecker([[1, 1], [1, 1]]),
        }];
        let t = sigma_scan(&samples, &seg([1, 2], [2, 1], 4), Strategy::default()).unwrap();
        assert!(t.flips.is_empty());
        let t = sigma_scan(&samples, &seg([1, 1], [1, 1], 4), Strategy::default()).unwrap();
        assert_eq!(t.events.len(), 1);
        assert!(sigma_scan(&samples, &seg([0, 1], [1, 1], 4), Strategy::default()).is_err());
    }

    #[test]
    fn character_steps() {
        let d = DimVector::new(vec![2], vec![3]);
        assert!(character_path(&seg([1, 1], [2, 1], 2), &d).is_err());
        let d2 = DimVector::new(vec![2, 1], vec![3, 1]);
        let steps = character_path(&seg([1, 1], [2, 1], 2), &d2).unwrap();
        assert_eq!(steps.len(), 3);
        assert!(steps.iter().all(|s| s.balanced));
        // σ = (3/2, 1): Σσd_1 = 4, Σσd_2 = 11/2.
        assert_eq!(steps[1].exponents[0], Scalar::frac(-3, 8));
        assert_eq!(steps[1].exponents[1], Scalar::frac(3, 11));
        let scaled = character_path(&seg([2, 2], [4, 2], 2), &d2).unwrap();
        assert_eq!(
            steps.iter().map(|s| &s.exponents).collect::<Vec<_>>(),
            scaled.iter().map(|s| &s.exponents).collect::<Vec<_>>()
        );
    }

    #[test]
    fn kronecker_walls() {
        let d = DimVector::new(vec![1, 1], vec![1, 1]);
        let walls = candidate_walls(&d, &sub_dimension_vectors(&d)).unwrap();
        assert!(walls.iter().any(|w| w.normal == vec![1, -1]));
        let w = walls.iter().find(|w| w.normal == vec![1, -1]).unwrap();
        assert_eq!(wall_crossing(&seg([1, 2], [2, 1], 1), w), Some(Scalar::frac(1, 2)));
        assert!(candidate_walls(&DimVector::new(vec![1, 1], vec![1, 2]), &[]).is_err());
    }
}
