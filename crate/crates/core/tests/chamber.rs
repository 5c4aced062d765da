mod common;

use std::collections::BTreeSet;

use num::{BigRational, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use stabkit::chamber::{
    compute_walls, enumerate_chambers, locate, rational_representative, rational_representative_in, sample_points,
    ChamberError, Region, Sign, Wall,
};
use stabkit::sheaf::{FamilySpec, SheafClass, StabilityParameter};
use stabkit::Scalar;

fn one_wall_data() -> (SheafClass, FamilySpec) {
    let e = SheafClass::from_ints("E", 2, 2, &[&[0, 2, 2], &[0, 4, 2]]).unwrap();
    let f = SheafClass::from_ints("F", 2, 1, &[&[0, 2, 1], &[0, 1, 1]]).unwrap();
    (
        e,
        FamilySpec {
            candidates: vec![f],
            relation: Vec::new(),
        },
    )
}

fn wall(normal: &[i64]) -> Wall {
    Wall {
        normal: normal.to_vec(),
        origins: Vec::new(),
    }
}

#[test]
fn single_wall_from_surrogates() {
    let (e, fam) = one_wall_data();
    let walls = compute_walls(&e, &fam).unwrap();
    assert_eq!(walls.len(), 1);
    // (2/1 − 2/2, 1/1 − 4/2)
    assert_eq!(walls[0].normal, vec![1, -1]);
    assert_eq!(walls[0].origins[0].sub, "F");
    assert_eq!(walls[0].origins[0].index, 1);
}

#[test]
fn walls_vanish_for_proportional_or_linear_data() {
    let (e, _) = one_wall_data();
    let scaled = SheafClass::from_ints("S", 2, 1, &[&[0, 1, 1], &[0, 2, 1]]).unwrap();
    let fam = FamilySpec {
        candidates: vec![scaled],
        relation: Vec::new(),
    };
    assert!(compute_walls(&e, &fam).unwrap().is_empty());

    let curve = SheafClass::from_ints("C", 1, 2, &[&[1, 2], &[5, 2]]).unwrap();
    let sub = SheafClass::from_ints("D", 1, 1, &[&[7, 1], &[0, 1]]).unwrap();
    let fam = FamilySpec {
        candidates: vec![sub],
        relation: Vec::new(),
    };
    assert!(compute_walls(&curve, &fam).unwrap().is_empty());
}

#[test]
fn chambers_of_one_wall() {
    assert_eq!(enumerate_chambers(&[], 2, Region::PositiveOrthant).len(), 1);

    let walls = [wall(&[1, -1])];
    for region in [Region::PositiveOrthant, Region::FullOrthant] {
        let chambers = enumerate_chambers(&walls, 2, region);
        let signs: BTreeSet<Sign> = chambers.iter().map(|c| c.signs[0]).collect();
        assert_eq!(signs, BTreeSet::from([Sign::Neg, Sign::Zero, Sign::Pos]));
        assert_eq!(chambers.iter().filter(|c| c.full_dim).count(), 2);
        for c in &chambers {
            let s = StabilityParameter(c.sample.clone());
            assert_eq!(locate(&s, &walls).unwrap(), c.signs);
        }
    }
}

#[test]
fn locating_quadratic_parameters() {
    let walls = [wall(&[1, -1])];
    let at = |s: &[&str]| StabilityParameter(s.iter().map(|x| x.parse().unwrap()).collect());
    assert_eq!(locate(&at(&["1", "2"]), &walls).unwrap(), vec![Sign::Neg]);
    assert_eq!(locate(&at(&["3", "3"]), &walls).unwrap(), vec![Sign::Zero]);
    let irrational = at(&["1+√2", "2"]);
    let signs = locate(&irrational, &walls).unwrap();
    assert_eq!(signs, vec![Sign::Pos]);

    let rep = rational_representative(&signs, &walls).unwrap();
    assert!(rep.is_rational());
    assert!(rep.0[0] > rep.0[1]);
    assert_eq!(locate(&rep, &walls).unwrap(), signs);
}

#[test]
fn representatives_for_special_sign_vectors() {
    let walls = [wall(&[1, -1, 0]), wall(&[0, 1, -1])];
    let rep = rational_representative(&[Sign::Zero, Sign::Zero], &walls).unwrap();
    let third = Scalar::frac(1, 3);
    assert_eq!(rep.0, vec![third.clone(), third.clone(), third]);

    let twin = [wall(&[1, -1]), wall(&[1, -1])];
    assert!(matches!(
        rational_representative(&[Sign::Pos, Sign::Neg], &twin),
        Err(ChamberError::Infeasible)
    ));
    assert!(rational_representative_in(&[Sign::Pos], &[wall(&[1, 0])], 2, Region::FullOrthant).is_ok());
    assert!(rational_representative_in(&[Sign::Zero], &[wall(&[1, 0])], 2, Region::PositiveOrthant).is_err());
}

#[test]
fn sampled_points_keep_their_signs() {
    let walls = [wall(&[2, -1, 0]), wall(&[1, 1, -3])];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for c in enumerate_chambers(&walls, 3, Region::PositiveOrthant) {
        let pts = sample_points(&c.signs, &walls, 3, Region::PositiveOrthant, 5, &mut rng).unwrap();
        for p in pts {
            assert!(p.is_positive());
            assert_eq!(p.0.iter().cloned().sum::<Scalar>(), Scalar::one());
            assert_eq!(locate(&p, &walls).unwrap(), c.signs);
        }
    }
}

// ---------------------------------------------------------------------------
// Face enumeration of a line arrangement on the closed 2-simplex.

type Point = [BigRational; 3];

fn dot(n: &[i64], p: &Point) -> BigRational {
    n.iter().zip(p).map(|(&a, x)| rat(a) * x).sum()
}

fn sign_of(x: &BigRational) -> Sign {
    if x.is_zero() {
        Sign::Zero
    } else if x.is_positive() {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// Where two lines `a·σ = 0`, `b·σ = 0` meet the plane `Σσ = 1`.
fn meet(a: &[i64], b: &[i64]) -> Option<Point> {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let total: i64 = c.iter().sum();
    if total == 0 {
        return None;
    }
    let p = c.map(|x| frac(x, total));
    p.iter().all(|x| !x.is_negative()).then_some(p)
}

fn midpoint(a: &Point, b: &Point) -> Point {
    [0, 1, 2].map(|k| (&a[k] + &b[k]) / rat(2))
}

fn arrangement_faces(normals: &[Vec<i64>]) -> BTreeSet<Vec<Sign>> {
    let mut lines: Vec<Vec<i64>> = normals.to_vec();
    lines.extend([vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    let mut vertices: Vec<Point> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = meet(&lines[i], &lines[j]) {
                if !vertices.contains(&p) {
                    vertices.push(p);
                }
            }
        }
    }
    let mut probes = vertices.clone();
    for line in &lines {
        let mut on: Vec<&Point> = vertices.iter().filter(|p| dot(line, p).is_zero()).collect();
        on.sort();
        for pair in on.windows(2) {
            probes.push(midpoint(pair[0], pair[1]));
        }
    }
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            for c in b + 1..vertices.len() {
                probes.push([0, 1, 2].map(|k| (&vertices[a][k] + &vertices[b][k] + &vertices[c][k]) / rat(3)));
            }
        }
    }
    probes
        .iter()
        .map(|p| normals.iter().map(|n| sign_of(&dot(n, p))).collect())
        .collect()
}

fn normal3() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 3).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn chambers_match_face_enumeration(normals in prop::collection::vec(normal3(), 1..=3)) {
        let walls: Vec<Wall> = normals.iter().map(|n| wall(n)).collect();
        let chambers = enumerate_chambers(&walls, 3, Region::FullOrthant);
        let got: BTreeSet<Vec<Sign>> = chambers.iter().map(|c| c.signs.clone()).collect();
        prop_assert_eq!(got.len(), chambers.len());
        prop_assert_eq!(&got, &arrangement_faces(&normals));
        for c in &chambers {
            let s = StabilityParameter(c.sample.clone());
            prop_assert_eq!(&locate(&s, &walls).unwrap(), &c.signs);
            prop_assert_eq!(c.full_dim, !c.signs.contains(&Sign::Zero));
        }
    }
}
