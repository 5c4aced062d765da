use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rep::{is_isomorphic, Representation, Submodule};
use super::{is_degenerate, slope_raw, theta_of, theta_vector, QuiverError, Slope};
use crate::exact::Scalar;
use crate::field::Field;
use crate::linalg::{self, Subspace};
use crate::sheaf::StabilityParameter;

pub const DEFAULT_SUBSPACE_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Every tuple of subspaces of the `V_i`; finite fields only.
    Exhaustive { cap: u128 },
    /// Structured candidates plus `trials` seeded random tuples.
    Seeded { seed: u64, trials: usize },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Exhaustive {
            cap: DEFAULT_SUBSPACE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<E> {
    Stable,
    /// Proper non-degenerate tight submodules with `θ = 0`.
    Semistable { destabilizers: Vec<Submodule<E>> },
    Unstable { witness: Submodule<E>, theta: Scalar },
    NoDestabilizerFound { trials: usize },
}

impl<E> Outcome<E> {
    /// `None` when the search was inconclusive.
    pub fn is_semistable(&self) -> Option<bool> {
        match self {
            Outcome::Stable | Outcome::Semistable { .. } => Some(true),
            Outcome::Unstable { .. } => Some(false),
            Outcome::NoDestabilizerFound { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Stable => "stable",
            Outcome::Semistable { .. } => "semistable",
            Outcome::Unstable { .. } => "unstable",
            Outcome::NoDestabilizerFound { .. } => "no_destabilizer_found",
        }
    }
}

/// Calls `visit` on every candidate tuple of V-subspaces for the strategy.
fn for_each_vtuple<F: Field>(
    rep: &Representation<F>,
    strategy: Strategy,
    mut visit: impl FnMut(&[Subspace<F::Elem>]),
) -> Result<usize, QuiverError> {
    match strategy {
        Strategy::Exhaustive { cap } => {
            let q = rep.field.size().ok_or(QuiverError::NeedsFiniteField)?;
            let count = rep
                .dims
                .v
                .iter()
                .fold(1u128, |acc, &n| acc.saturating_mul(linalg::subspace_count(q, n)));
            if count > cap {
                return Err(QuiverError::CapExceeded { count, cap });
            }
            let lists: Vec<Vec<Subspace<F::Elem>>> =
                rep.dims.v.iter().map(|&n| linalg::all_subspaces(&rep.field, n)).collect();
            let mut counter = vec![0usize; lists.len()];
            let mut tuple: Vec<Subspace<F::Elem>> = lists.iter().map(|l| l[0].clone()).collect();
            loop {
                visit(&tuple);
                // odometer with per-digit bases
                let mut k = 0;
                loop {
                    if k == lists.len() {
                        return Ok(count as usize);
                    }
                    counter[k] += 1;
                    if counter[k] < lists[k].len() {
                        tuple[k] = lists[k][counter[k]].clone();
                        break;
                    }
                    counter[k] = 0;
                    tuple[k] = lists[k][0].clone();
                    k += 1;
                }
            }
        }
        Strategy::Seeded { seed, trials } => {
            let cands = seeded_candidates(rep, seed, trials);
            for c in &cands {
                visit(c);
            }
            Ok(cands.len())
        }
    }
}

/// Coordinate lines, whole spaces, kernels of arrows and their pairwise
/// intersections (each placed at a single vertex), the joint kernels, and
/// `trials` random tuples drawn from per-candidate derived seeds.
fn seeded_candidates<F: Field>(rep: &Representation<F>, seed: u64, trials: usize) -> Vec<Vec<Subspace<F::Elem>>> {
    let f = &rep.field;
    let j0 = rep.j0();
    let dims = &rep.dims.v;
    let zero_tuple: Vec<Subspace<F::Elem>> = dims.iter().map(|&n| Subspace::zero(n)).collect();
    let at = |i: usize, s: Subspace<F::Elem>| {
        let mut t = zero_tuple.clone();
        t[i] = s;
        t
    };
    let mut out = Vec::new();
    for i in 0..j0 {
        for k in 0..dims[i] {
            let mut e = vec![f.zero(); dims[i]];
            e[k] = f.one();
            out.push(at(i, Subspace::span(f, dims[i], &[e])));
        }
        out.push(at(i, Subspace::full(f, dims[i])));
        let kernels: Vec<Subspace<F::Elem>> = (0..j0)
            .flat_map(|j| rep.maps[i][j].iter())
            .map(|m| Subspace::span(f, dims[i], &linalg::null_space(f, m)))
            .collect();
        for (a, ka) in kernels.iter().enumerate() {
            out.push(at(i, ka.clone()));
            for kb in &kernels[a + 1..] {
                out.push(at(i, ka.intersect(f, kb)));
            }
        }
    }
    let zero_w: Vec<Subspace<F::Elem>> = rep.dims.w.iter().map(|&n| Subspace::zero(n)).collect();
    out.push(rep.preimage_of(&zero_w));
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((t as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let tuple = dims
            .iter()
            .map(|&n| {
                let k = rng.gen_range(0..=n);
                let vecs: Vec<Vec<F::Elem>> = (0..k).map(|_| (0..n).map(|_| f.random_elem(&mut rng)).collect()).collect();
                Subspace::span(f, n, &vecs)
            })
            .collect();
        out.push(tuple);
    }
    out
}

/// King θ_σ-semistability of `rep`.
///
/// For a fixed V-part the largest `θ` is attained at the smallest W-part
/// (the image), because every `θ_{j2} ≤ 0`; the exhaustive mode therefore
/// ranges over V-tuples only and reports tight submodules.
pub fn semistability_check<F: Field>(
    rep: &Representation<F>,
    sigma: &StabilityParameter,
    strategy: Strategy,
) -> Result<Outcome<F::Elem>, QuiverError> {
    let theta = theta_vector(sigma, &rep.dims)?;
    let whole = rep.whole();
    let mut best: Option<(Scalar, usize, Vec<Subspace<F::Elem>>)> = None;
    let mut zeros: Vec<Vec<Subspace<F::Elem>>> = Vec::new();
    let n = for_each_vtuple(rep, strategy, |vs| {
        let w = rep.image_of(vs);
        let sub = Submodule { v: vs.to_vec(), w };
        let dims = sub.dims();
        let th = theta_of(&dims, &theta);
        if th.is_zero() {
            zeros.push(vs.to_vec());
        }
        let better = match &best {
            None => true,
            Some((b, d, _)) => th > *b || (th == *b && dims.total() > *d),
        };
        if better {
            best = Some((th, dims.total(), vs.to_vec()));
        }
    })?;
    if let Some((th, _, vs)) = best {
        if th.is_positive() {
            let witness = rep.tight_closure(&vs)?;
            let theta_w = theta_of(&witness.dims(), &theta);
            return Ok(Outcome::Unstable {
                witness,
                theta: theta_w,
            });
        }
    }
    if matches!(strategy, Strategy::Seeded { .. }) {
        return Ok(Outcome::NoDestabilizerFound { trials: n });
    }
    let mut seen = HashSet::new();
    let mut destabilizers = Vec::new();
    for vs in zeros {
        let closure = rep.tight_closure(&vs)?;
        if closure == whole || is_degenerate(&closure.dims(), sigma) {
            continue;
        }
        if seen.insert(closure.clone()) {
            destabilizers.push(closure);
        }
    }
    Ok(if destabilizers.is_empty() {
        Outcome::Stable
    } else {
        Outcome::Semistable { destabilizers }
    })
}

fn require_positive(sigma: &StabilityParameter, rep_j0: usize) -> Result<(), QuiverError> {
    if sigma.len() != rep_j0 {
        return Err(QuiverError::Shape("σ length differs from j₀".into()));
    }
    sigma.validate()?;
    if !sigma.is_positive() {
        return Err(QuiverError::NeedsPositive);
    }
    Ok(())
}

/// Semistability in slope form: every proper nonzero submodule has
/// `μ ≤ μ(M)`. Agrees with θ-semistability for positive `σ` and also covers
/// modules whose W-part vanishes.
pub fn is_mu_semistable<F: Field>(
    rep: &Representation<F>,
    sigma: &StabilityParameter,
    strategy: Strategy,
) -> Result<Option<bool>, QuiverError> {
    require_positive(sigma, rep.j0())?;
    let whole = rep.whole();
    if whole.dims().is_zero() {
        return Ok(Some(true));
    }
    let mu = slope_raw(&sigma.0, &rep.dims)?;
    let mut ok = true;
    for_each_vtuple(rep, strategy, |vs| {
        if !ok || vs.iter().all(Subspace::is_zero) {
            return;
        }
        let sub = Submodule {
            v: vs.to_vec(),
            w: rep.image_of(vs),
        };
        if sub == whole {
            return;
        }
        if let Ok(s) = slope_raw(&sigma.0, &sub.dims()) {
            if s > mu {
                ok = false;
            }
        }
    })?;
    Ok(match (ok, strategy) {
        (false, _) => Some(false),
        (true, Strategy::Exhaustive { .. }) => Some(true),
        (true, Strategy::Seeded { .. }) => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnStep<E> {
    pub sub: Submodule<E>,
    /// Slope of this step's factor `M_k / M_{k−1}`.
    pub slope: Slope,
}

fn factor_slope(sigma: &[Scalar], outer: &Submodule<impl Clone + PartialEq>, inner: &Submodule<impl Clone + PartialEq>) -> Result<Slope, QuiverError> {
    slope_raw(sigma, &outer.dims().minus(&inner.dims()))
}

/// Harder–Narasimhan filtration `0 ⊂ M_1 ⊂ … ⊂ M_l = M`, built from below:
/// each `M_k` is the supermodule of `M_{k−1}` whose quotient has the largest
/// slope, then the largest dimension. Requires `σ > 0`.
pub fn hn_filtration<F: Field>(
    rep: &Representation<F>,
    sigma: &StabilityParameter,
    strategy: Strategy,
) -> Result<Vec<HnStep<F::Elem>>, QuiverError> {
    require_positive(sigma, rep.j0())?;
    let f = &rep.field;
    let whole = rep.whole();
    let mut current = rep.zero_submodule();
    let mut steps = Vec::new();
    while current != whole {
        let mut best: Option<(Slope, usize, Submodule<F::Elem>)> = None;
        let mut consider = |cand: Submodule<F::Elem>| {
            if cand == current {
                return;
            }
            let Ok(slope) = factor_slope(&sigma.0, &cand, &current) else { return };
            let dim = cand.dims().total();
            let better = match &best {
                None => true,
                Some((s, d, _)) => slope > *s || (slope == *s && dim > *d),
            };
            if better {
                best = Some((slope, dim, cand));
            }
        };
        let mut seen = HashSet::new();
        for_each_vtuple(rep, strategy, |vs| {
            let v: Vec<Subspace<F::Elem>> = vs.iter().zip(&current.v).map(|(a, b)| a.sum(f, b)).collect();
            if !seen.insert(v.clone()) {
                return;
            }
            let w: Vec<Subspace<F::Elem>> = rep.image_of(&v).iter().zip(&current.w).map(|(a, b)| a.sum(f, b)).collect();
            consider(Submodule { v, w });
        })?;
        consider(Submodule {
            v: current.v.clone(),
            w: whole.w.clone(),
        });
        let (slope, _, next) = best.expect("a proper submodule has a strict supermodule");
        steps.push(HnStep {
            sub: next.clone(),
            slope,
        });
        current = next;
    }
    Ok(steps)
}

/// The same filtration built from above: each step removes the quotient of
/// smallest slope and largest dimension. Used to cross-check
/// [`hn_filtration`].
pub fn hn_filtration_descending<F: Field>(
    rep: &Representation<F>,
    sigma: &StabilityParameter,
    strategy: Strategy,
) -> Result<Vec<HnStep<F::Elem>>, QuiverError> {
    require_positive(sigma, rep.j0())?;
    let f = &rep.field;
    let zero = rep.zero_submodule();
    let mut current = rep.whole();
    let mut chain: Vec<(Submodule<F::Elem>, Slope)> = Vec::new();
    while current != zero {
        let mut best: Option<(Slope, usize, Submodule<F::Elem>)> = None;
        let mut seen = HashSet::new();
        for_each_vtuple(rep, strategy, |vs| {
            let v: Vec<Subspace<F::Elem>> = vs.iter().zip(&current.v).map(|(a, b)| a.intersect(f, b)).collect();
            if !seen.insert(v.clone()) {
                return;
            }
            let w = rep.image_of(&v);
            let cand = Submodule { v, w };
            if cand == current {
                return;
            }
            let Ok(slope) = factor_slope(&sigma.0, &current, &cand) else { return };
            let dim = cand.dims().total();
            let better = match &best {
                None => true,
                Some((s, d, _)) => slope < *s || (slope == *s && dim < *d),
            };
            if better {
                best = Some((slope, dim, cand));
            }
        })?;
        let (slope, _, next) = best.expect("a nonzero module has a proper submodule");
        chain.push((current.clone(), slope));
        current = next;
    }
    chain.reverse();
    Ok(chain.into_iter().map(|(sub, slope)| HnStep { sub, slope }).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct JhFiltration<F: Field> {
    /// `G_1 ⊂ … ⊂ G_k = M`.
    pub subs: Vec<Submodule<F::Elem>>,
    /// `G_t / G_{t−1}`.
    pub factors: Vec<Representation<F>>,
}

/// Jordan–Hölder filtration of a semistable representation over a finite
/// field: each step is a smallest strict supermodule whose quotient by the
/// previous step has slope `μ(M)`. Requires `σ > 0`.
pub fn jh_filtration<F: Field>(
    rep: &Representation<F>,
    sigma: &StabilityParameter,
    cap: u128,
) -> Result<JhFiltration<F>, QuiverError> {
    require_positive(sigma, rep.j0())?;
    let strategy = Strategy::Exhaustive { cap };
    if is_mu_semistable(rep, sigma, strategy)? != Some(true) {
        return Err(QuiverError::NotSemistable);
    }
    let f = &rep.field;
    let q = f.size().ok_or(QuiverError::NeedsFiniteField)?;
    let w_count = rep
        .dims
        .w
        .iter()
        .fold(1u128, |acc, &n| acc.saturating_mul(linalg::subspace_count(q, n)));
    if w_count > cap {
        return Err(QuiverError::CapExceeded { count: w_count, cap });
    }
    let w_lists: Vec<Vec<Subspace<F::Elem>>> = rep.dims.w.iter().map(|&n| linalg::all_subspaces(f, n)).collect();
    let whole = rep.whole();
    let mu = slope_raw(&sigma.0, &rep.dims)?;
    let mut current = rep.zero_submodule();
    let mut subs = Vec::new();
    let mut factors = Vec::new();
    while current != whole {
        let mut best: Option<(usize, Submodule<F::Elem>)> = None;
        let mut seen = HashSet::new();
        for_each_vtuple(rep, strategy, |vs| {
            if !vs.iter().zip(&current.v).all(|(a, b)| a.contains_subspace(f, b)) || !seen.insert(vs.to_vec()) {
                return;
            }
            let floor: Vec<Subspace<F::Elem>> = rep.image_of(vs).iter().zip(&current.w).map(|(a, b)| a.sum(f, b)).collect();
            let options: Vec<Vec<&Subspace<F::Elem>>> = w_lists
                .iter()
                .zip(&floor)
                .map(|(l, fl)| l.iter().filter(|s| s.contains_subspace(f, fl)).collect())
                .collect();
            let mut counter = vec![0usize; options.len()];
            loop {
                let cand = Submodule {
                    v: vs.to_vec(),
                    w: options.iter().zip(&counter).map(|(o, &k)| o[k].clone()).collect(),
                };
                if cand != current {
                    let dim = cand.dims().total();
                    if best.as_ref().map_or(true, |(d, _)| dim < *d)
                        && factor_slope(&sigma.0, &cand, &current).is_ok_and(|s| s == mu)
                    {
                        best = Some((dim, cand));
                    }
                }
                let mut k = 0;
                loop {
                    if k == options.len() {
                        return;
                    }
                    counter[k] += 1;
                    if counter[k] < options[k].len() {
                        break;
                    }
                    counter[k] = 0;
                    k += 1;
                }
            }
        })?;
        let (_, next) = best.expect("the whole module always qualifies");
        factors.push(rep.subquotient(&next, &current));
        subs.push(next.clone());
        current = next;
    }
    Ok(JhFiltration { subs, factors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SEquivalence {
    pub equivalent: bool,
    pub heuristic: bool,
}

/// Whether the graded objects of the Jordan–Hölder filtrations agree as
/// multisets of isomorphism classes.
pub fn s_equivalent<F: Field>(
    a: &Representation<F>,
    b: &Representation<F>,
    sigma: &StabilityParameter,
    cap: u128,
    seed: u64,
) -> Result<SEquivalence, QuiverError> {
    let ga = jh_filtration(a, sigma, cap)?.factors;
    let gb = jh_filtration(b, sigma, cap)?.factors;
    if ga.len() != gb.len() {
        return Ok(SEquivalence {
            equivalent: false,
            heuristic: false,
        });
    }
    let mut used = vec![false; gb.len()];
    let mut heuristic = false;
    for x in &ga {
        let mut matched = false;
        for (k, y) in gb.iter().enumerate() {
            if used[k] {
                continue;
            }
            let res = is_isomorphic(x, y, cap, seed);
            heuristic |= res.heuristic;
            if res.isomorphic {
                used[k] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(SEquivalence {
                equivalent: false,
                heuristic,
            });
        }
    }
    Ok(SEquivalence {
        equivalent: true,
        heuristic: false,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{DimVector, QuiverSpec};
    use super::*;
    use crate::field::GaloisField;
    use crate::linalg::Mat;

    fn f2() -> GaloisField {
        GaloisField::new(2).unwrap()
    }

    fn one_arrow(v: usize, w: usize, rows: Vec<Vec<u32>>) -> Representation<GaloisField> {
        let spec = QuiverSpec::new(vec![vec![1]]).unwrap();
        Representation::new(f2(), spec, DimVector::new(vec![v], vec![w]), vec![vec![vec![Mat::from_rows(v, rows)]]]).unwrap()
    }

    fn sig1() -> StabilityParameter {
        StabilityParameter::from_ints(&[1]).unwrap()
    }

    #[test]
    fn kronecker_unstable() {
        let rep = one_arrow(2, 1, vec![vec![1, 0]]);
        match semistability_check(&rep, &sig1(), Strategy::default()).unwrap() {
            Outcome::Unstable { witness, theta } => {
                assert_eq!(witness.dims().flat(), vec![1, 0]);
                assert_eq!(theta, Scalar::frac(1, 2));
            }
            other => panic!("expected unstable, got {other:?}"),
        }
    }

    #[test]
    fn line_is_stable() {
        let rep = one_arrow(1, 1, vec![vec![1]]);
        assert_eq!(semistability_check(&rep, &sig1(), Strategy::default()).unwrap(), Outcome::Stable);
    }

    #[test]
    fn direct_sum_is_not_stable() {
        let rep = one_arrow(2, 2, vec![vec![1, 0], vec![0, 1]]);
        let out = semistability_check(&rep, &sig1(), Strategy::default()).unwrap();
        assert!(matches!(out, Outcome::Semistable { .. }));
    }

    #[test]
    fn seeded_finds_kronecker_witness() {
        let rep = one_arrow(2, 1, vec![vec![1, 0]]);
        let out = semistability_check(&rep, &sig1(), Strategy::Seeded { seed: 3, trials: 4 }).unwrap();
        assert!(matches!(out, Outcome::Unstable { .. }));
        let stable = one_arrow(1, 1, vec![vec![1]]);
        let out = semistability_check(&stable, &sig1(), Strategy::Seeded { seed: 3, trials: 4 }).unwrap();
        assert!(matches!(out, Outcome::NoDestabilizerFound { .. }));
    }

    #[test]
    fn kronecker_hn() {
        let rep = one_arrow(2, 1, vec![vec![1, 0]]);
        let hn = hn_filtration(&rep, &sig1(), Strategy::default()).unwrap();
        let dims: Vec<Vec<usize>> = hn.iter().map(|s| s.sub.dims().flat()).collect();
        assert_eq!(dims, vec![vec![1, 0], vec![2, 1]]);
        assert_eq!(hn[0].slope, Slope::Infinite);
        assert_eq!(hn[1].slope, Slope::Finite(Scalar::one()));
        let down = hn_filtration_descending(&rep, &sig1(), Strategy::default()).unwrap();
        assert_eq!(down, hn);
        let stable = one_arrow(1, 1, vec![vec![1]]);
        assert_eq!(hn_filtration(&stable, &sig1(), Strategy::default()).unwrap().len(), 1);
    }

    #[test]
    fn jh_and_s_equivalence() {
        let sum = one_arrow(2, 2, vec![vec![1, 0], vec![0, 1]]);
        let jh = jh_filtration(&sum, &sig1(), DEFAULT_SUBSPACE_CAP).unwrap();
        assert_eq!(jh.factors.len(), 2);
        for g in &jh.factors {
            assert_eq!(g.dims.flat(), vec![1, 1]);
        }
        let swapped = one_arrow(2, 2, vec![vec![0, 1], vec![1, 0]]);
        let eq = s_equivalent(&sum, &swapped, &sig1(), DEFAULT_SUBSPACE_CAP, 0).unwrap();
        assert!(eq.equivalent);
        let unstable = one_arrow(2, 1, vec![vec![1, 0]]);
        assert_eq!(
            jh_filtration(&unstable, &sig1(), DEFAULT_SUBSPACE_CAP).unwrap_err(),
            QuiverError::NotSemistable
        );
    }

    #[test]
    fn cap_is_enforced() {
        let rep = one_arrow(2, 1, vec![vec![1, 0]]);
        let err = semistability_check(&rep, &sig1(), Strategy::Exhaustive { cap: 2 }).unwrap_err();
        assert!(matches!(err, QuiverError::CapExceeded { .. }));
    }
}
