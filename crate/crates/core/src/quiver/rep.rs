use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DimVector, QuiverError, QuiverSpec};
use crate::field::Field;
use crate::linalg::{self, Mat, Subspace};

/// A point of `Rep(Q, d)`: `maps[i][j][k]` is the `k`-th arrow `V_i → W_j`,
/// a `dim W_j × dim V_i` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<F: Field> {
    pub field: F,
    pub spec: QuiverSpec,
    pub dims: DimVector,
    pub maps: Vec<Vec<Vec<Mat<F::Elem>>>>,
}

/// Subspaces `V'_i ⊆ V_i` and `W'_j ⊆ W_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Submodule<E> {
    pub v: Vec<Subspace<E>>,
    pub w: Vec<Subspace<E>>,
}

impl<E: Clone + PartialEq> Submodule<E> {
    pub fn dims(&self) -> DimVector {
        DimVector {
            v: self.v.iter().map(Subspace::dim).collect(),
            w: self.w.iter().map(Subspace::dim).collect(),
        }
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, other: &Submodule<E>) -> bool {
        self.v.iter().zip(&other.v).all(|(a, b)| a.contains_subspace(f, b))
            && self.w.iter().zip(&other.w).all(|(a, b)| a.contains_subspace(f, b))
    }
}

impl<F: Field> Representation<F> {
    pub fn new(field: F, spec: QuiverSpec, dims: DimVector, maps: Vec<Vec<Vec<Mat<F::Elem>>>>) -> Result<Self, QuiverError> {
        let rep = Representation {
            field,
            spec,
            dims,
            maps,
        };
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<(), QuiverError> {
        self.spec.validate()?;
        let j0 = self.spec.j0;
        if self.dims.j0() != j0 {
            return Err(QuiverError::Shape(format!("dimension vector must have {} pairs", j0)));
        }
        if self.maps.len() != j0 || self.maps.iter().any(|r| r.len() != j0) {
            return Err(QuiverError::Shape(format!("maps must be indexed {j0}×{j0}")));
        }
        for i in 0..j0 {
            for j in 0..j0 {
                let arrows = &self.maps[i][j];
                if arrows.len() != self.spec.h[i][j] {
                    return Err(QuiverError::Shape(format!(
                        "expected {} arrows v{} → w{}, got {}",
                        self.spec.h[i][j],
                        i + 1,
                        j + 1,
                        arrows.len()
                    )));
                }
                for m in arrows {
                    if m.rows() != self.dims.w[j] || m.cols() != self.dims.v[i] {
                        return Err(QuiverError::Shape(format!(
                            "arrow v{} → w{} must be {}×{}, got {}×{}",
                            i + 1,
                            j + 1,
                            self.dims.w[j],
                            self.dims.v[i],
                            m.rows(),
                            m.cols()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn j0(&self) -> usize {
        self.spec.j0
    }

    /// Representation with all-zero maps.
    pub fn zero_maps(field: F, spec: QuiverSpec, dims: DimVector) -> Self {
        let j0 = spec.j0;
        let maps = (0..j0)
            .map(|i| {
                (0..j0)
                    .map(|j| {
                        (0..spec.h[i][j])
                            .map(|_| Mat::zeros(&field, dims.w[j], dims.v[i]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Representation {
            field,
            spec,
            dims,
            maps,
        }
    }

    /// Uniformly random maps (finite fields) or small random entries.
    pub fn random<R: Rng + ?Sized>(field: F, spec: QuiverSpec, dims: DimVector, rng: &mut R) -> Self {
        let mut rep = Self::zero_maps(field, spec, dims);
        for row in rep.maps.iter_mut() {
            for arrows in row.iter_mut() {
                for m in arrows.iter_mut() {
                    for a in 0..m.rows() {
                        for b in 0..m.cols() {
                            m.set(a, b, rep.field.random_elem(rng));
                        }
                    }
                }
            }
        }
        rep
    }

    pub fn whole(&self) -> Submodule<F::Elem> {
        Submodule {
            v: self.dims.v.iter().map(|&n| Subspace::full(&self.field, n)).collect(),
            w: self.dims.w.iter().map(|&n| Subspace::full(&self.field, n)).collect(),
        }
    }

    pub fn zero_submodule(&self) -> Submodule<F::Elem> {
        Submodule {
            v: self.dims.v.iter().map(|&n| Subspace::zero(n)).collect(),
            w: self.dims.w.iter().map(|&n| Subspace::zero(n)).collect(),
        }
    }

    fn arrows_from(&self, i: usize) -> impl Iterator<Item = (usize, &Mat<F::Elem>)> {
        (0..self.j0()).flat_map(move |j| self.maps[i][j].iter().map(move |m| (j, m)))
    }

    /// Every arrow maps `V'_i` into `W'_j`.
    pub fn is_submodule(&self, sub: &Submodule<F::Elem>) -> bool {
        let f = &self.field;
        (0..self.j0()).all(|i| {
            self.arrows_from(i).all(|(j, m)| {
                sub.v[i]
                    .basis()
                    .iter()
                    .all(|b| sub.w[j].contains(f, &linalg::mat_vec(f, m, b)))
            })
        })
    }

    /// `W'_j = Σ_i Σ_k φ_ij^{(k)}(V'_i)`: the smallest W-part over `vs`.
    pub fn image_of(&self, vs: &[Subspace<F::Elem>]) -> Vec<Subspace<F::Elem>> {
        let f = &self.field;
        (0..self.j0())
            .map(|j| {
                let mut vectors = Vec::new();
                for (i, sub) in vs.iter().enumerate() {
                    for m in &self.maps[i][j] {
                        vectors.extend(sub.basis().iter().map(|b| linalg::mat_vec(f, m, b)));
                    }
                }
                Subspace::span(f, self.dims.w[j], &vectors)
            })
            .collect()
    }

    /// `V'_i = {v : φ_ij^{(k)} v ∈ W'_j for all j, k}`.
    pub fn preimage_of(&self, ws: &[Subspace<F::Elem>]) -> Vec<Subspace<F::Elem>> {
        let f = &self.field;
        (0..self.j0())
            .map(|i| {
                self.arrows_from(i).fold(Subspace::full(f, self.dims.v[i]), |acc, (j, m)| {
                    acc.intersect(f, &Subspace::preimage(f, m, &ws[j]))
                })
            })
            .collect()
    }

    /// The tight submodule generated by V-seeds: `W'` is the image of the
    /// seeds, `V'` the full preimage of `W'`.
    pub fn tight_closure(&self, seeds: &[Subspace<F::Elem>]) -> Result<Submodule<F::Elem>, QuiverError> {
        if seeds.len() != self.j0() || seeds.iter().zip(&self.dims.v).any(|(s, &n)| s.ambient() != n) {
            return Err(QuiverError::Shape("one seed subspace of V_i per vertex".into()));
        }
        let w = self.image_of(seeds);
        let v = self.preimage_of(&w);
        Ok(Submodule { v, w })
    }

    /// Every nonzero vector of every `V_i` is moved by some arrow.
    pub fn is_generated_type(&self) -> bool {
        let zero: Vec<Subspace<F::Elem>> = self.dims.w.iter().map(|&n| Subspace::zero(n)).collect();
        self.preimage_of(&zero).iter().all(Subspace::is_zero)
    }

    /// The representation on a submodule, in the echelon bases of its parts.
    pub fn restrict(&self, sub: &Submodule<F::Elem>) -> Representation<F> {
        let f = &self.field;
        let dims = sub.dims();
        let maps = (0..self.j0())
            .map(|i| {
                (0..self.j0())
                    .map(|j| {
                        self.maps[i][j]
                            .iter()
                            .map(|m| {
                                let cols: Vec<Vec<F::Elem>> = sub.v[i]
                                    .basis()
                                    .iter()
                                    .map(|b| coordinates(f, &sub.w[j], &linalg::mat_vec(f, m, b)))
                                    .collect();
                                Mat::from_cols(dims.w[j], &cols)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Representation {
            field: f.clone(),
            spec: self.spec.clone(),
            dims,
            maps,
        }
    }

    /// Expresses a submodule of `self` contained in `outer` as a submodule
    /// of `self.restrict(outer)`.
    pub fn relative(&self, outer: &Submodule<F::Elem>, inner: &Submodule<F::Elem>) -> Submodule<F::Elem> {
        let f = &self.field;
        let conv = |o: &Subspace<F::Elem>, s: &Subspace<F::Elem>| {
            let vecs: Vec<Vec<F::Elem>> = s.basis().iter().map(|b| coordinates(f, o, b)).collect();
            Subspace::span(f, o.dim(), &vecs)
        };
        Submodule {
            v: outer.v.iter().zip(&inner.v).map(|(o, s)| conv(o, s)).collect(),
            w: outer.w.iter().zip(&inner.w).map(|(o, s)| conv(o, s)).collect(),
        }
    }

    /// The quotient representation `M / sub`, using the non-pivot
    /// coordinates of each echelon basis as a complement.
    pub fn quotient(&self, sub: &Submodule<F::Elem>) -> Representation<F> {
        let f = &self.field;
        let comp_v: Vec<Vec<usize>> = sub.v.iter().map(|s| non_pivots(f, s)).collect();
        let comp_w: Vec<Vec<usize>> = sub.w.iter().map(|s| non_pivots(f, s)).collect();
        let dims = DimVector {
            v: comp_v.iter().map(Vec::len).collect(),
            w: comp_w.iter().map(Vec::len).collect(),
        };
        let maps = (0..self.j0())
            .map(|i| {
                (0..self.j0())
                    .map(|j| {
                        self.maps[i][j]
                            .iter()
                            .map(|m| {
                                let cols: Vec<Vec<F::Elem>> = comp_v[i]
                                    .iter()
                                    .map(|&c| {
                                        let image = m.col(c);
                                        let reduced = reduce(f, &sub.w[j], &image);
                                        comp_w[j].iter().map(|&r| reduced[r].clone()).collect()
                                    })
                                    .collect();
                                Mat::from_cols(dims.w[j], &cols)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Representation {
            field: f.clone(),
            spec: self.spec.clone(),
            dims,
            maps,
        }
    }

    /// `outer / inner` for submodules `inner ⊆ outer`.
    pub fn subquotient(&self, outer: &Submodule<F::Elem>, inner: &Submodule<F::Elem>) -> Representation<F> {
        let restricted = self.restrict(outer);
        let rel = self.relative(outer, inner);
        restricted.quotient(&rel)
    }
}

fn pivot_of<E>(row: &[E], is_zero: impl Fn(&E) -> bool) -> usize {
    row.iter().position(|x| !is_zero(x)).expect("echelon rows are nonzero")
}

fn non_pivots<F: Field>(f: &F, s: &Subspace<F::Elem>) -> Vec<usize> {
    let pivots: Vec<usize> = s.basis().iter().map(|r| pivot_of(r, |x| f.is_zero(x))).collect();
    (0..s.ambient()).filter(|c| !pivots.contains(c)).collect()
}

/// Coordinates of `v ∈ sub` in the echelon basis of `sub` (its values at
/// the pivot columns).
fn coordinates<F: Field>(f: &F, sub: &Subspace<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    sub.basis()
        .iter()
        .map(|row| v[pivot_of(row, |x| f.is_zero(x))].clone())
        .collect()
}

/// `v` minus its component along `sub`, zero at every pivot column.
fn reduce<F: Field>(f: &F, sub: &Subspace<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = v.to_vec();
    for row in sub.basis() {
        let p = pivot_of(row, |x| f.is_zero(x));
        let c = out[p].clone();
        if f.is_zero(&c) {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o = f.sub(o, &f.mul(&c, r));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct IsoResult {
    pub isomorphic: bool,
    /// `true` when non-isomorphism was concluded from a random sample of
    /// intertwiners rather than an exhaustive search.
    pub heuristic: bool,
}

/// Number of random intertwiner combinations tried when the space of
/// intertwiners cannot be searched exhaustively.
pub const RANDOM_INTERTWINER_TRIALS: usize = 32;

/// Isomorphism test: solves the linear system for intertwiners
/// `(X_i : V_i → V'_i, Y_j : W_j → W'_j)` with `φ'·X_i = Y_j·φ` and looks for
/// an invertible member of the solution space.
pub fn is_isomorphic<F: Field>(a: &Representation<F>, b: &Representation<F>, combo_cap: u128, seed: u64) -> IsoResult {
    let certain = |isomorphic| IsoResult {
        isomorphic,
        heuristic: false,
    };
    if a.spec != b.spec || a.dims != b.dims {
        return certain(false);
    }
    let f = &a.field;
    let j0 = a.j0();
    let (dv, dw) = (&a.dims.v, &a.dims.w);
    let mut offsets_v = Vec::new();
    let mut offsets_w = Vec::new();
    let mut n = 0;
    for &d in dv {
        offsets_v.push(n);
        n += d * d;
    }
    for &d in dw {
        offsets_w.push(n);
        n += d * d;
    }
    if n == 0 {
        return certain(true);
    }
    let mut rows = Vec::new();
    for i in 0..j0 {
        for j in 0..j0 {
            for (ma, mb) in a.maps[i][j].iter().zip(&b.maps[i][j]) {
                for r in 0..dw[j] {
                    for c in 0..dv[i] {
                        let mut row = vec![f.zero(); n];
                        // (B·X_i)[r][c] = Σ_t B[r][t]·X_i[t][c]
                        for t in 0..dv[i] {
                            let idx = offsets_v[i] + t * dv[i] + c;
                            row[idx] = f.add(&row[idx], mb.get(r, t));
                        }
                        // −(Y_j·A)[r][c] = −Σ_t Y_j[r][t]·A[t][c]
                        for t in 0..dw[j] {
                            let idx = offsets_w[j] + r * dw[j] + t;
                            row[idx] = f.sub(&row[idx], ma.get(t, c));
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..n)
            .map(|k| {
                let mut v = vec![f.zero(); n];
                v[k] = f.one();
                v
            })
            .collect()
    } else {
        linalg::null_space(f, &Mat::from_rows(n, rows))
    };
    if basis.is_empty() {
        return certain(false);
    }
    let invertible = |coeffs: &[F::Elem]| -> bool {
        let mut x = vec![f.zero(); n];
        for (c, v) in coeffs.iter().zip(&basis) {
            if f.is_zero(c) {
                continue;
            }
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi = f.add(xi, &f.mul(c, vi));
            }
        }
        let block_ok = |off: usize, d: usize| {
            let m = Mat::from_rows(d, (0..d).map(|r| x[off + r * d..off + (r + 1) * d].to_vec()).collect());
            !f.is_zero(&linalg::det(f, &m))
        };
        dv.iter().zip(&offsets_v).all(|(&d, &o)| block_ok(o, d)) && dw.iter().zip(&offsets_w).all(|(&d, &o)| block_ok(o, d))
    };
    if let Some(elems) = f.elements() {
        let total = (elems.len() as u128).checked_pow(basis.len() as u32);
        if total.is_some_and(|t| t <= combo_cap) {
            let mut counter = vec![0usize; basis.len()];
            loop {
                let coeffs: Vec<F::Elem> = counter.iter().map(|&k| elems[k].clone()).collect();
                if invertible(&coeffs) {
                    return certain(true);
                }
                if !linalg::advance(&mut counter, elems.len()) {
                    return certain(false);
                }
            }
        }
    }
    for trial in 0..RANDOM_INTERTWINER_TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let coeffs: Vec<F::Elem> = basis.iter().map(|_| f.random_elem(&mut rng)).collect();
        if invertible(&coeffs) {
            return certain(true);
        }
    }
    IsoResult {
        isomorphic: false,
        heuristic: true,
    }
}
