//! Stored counterexamples and curated instances. Each one replays with a
//! fixed verdict.

use crate::group::{FgAbGroup, Subgroup};
use crate::lattice::vector;
use crate::prering::{RingKind, RingPresentation};
use crate::relation::BiRelation;

fn m(a: &FgAbGroup, rows: &[&[i64]]) -> BiRelation {
    BiRelation::from_i64_matrix(a, rows).expect("curated matrices are homomorphisms")
}

fn sub(a: &FgAbGroup, gens: &[&[i64]]) -> Subgroup {
    Subgroup::generated(a, &gens.iter().map(|g| vector(g)).collect::<Vec<_>>()).expect("curated elements fit")
}

fn pre(a: &FgAbGroup, gens: Vec<BiRelation>) -> RingPresentation {
    RingPresentation::pre_ring(a, gens).expect("curated generators are endogenies")
}

/// Right distributivity fails as an equality of value sets.
#[derive(Clone, Debug)]
pub struct RightDistributivityCase {
    pub ambient: FgAbGroup,
    pub delta: BiRelation,
    pub phi: BiRelation,
    pub psi: BiRelation,
    pub point: Vec<crate::lattice::Int>,
}

/// On `Z + Z/2`, `δ` sends everything onto the torsion and `φ = ψ = 1`. At
/// `0`, `(φδ + ψδ)[0]` is the torsion subgroup while `(φ + ψ)δ[0] = 0`.
pub fn right_distributivity_counterexample() -> RightDistributivityCase {
    let a = FgAbGroup::new(1, &[2]).expect("valid");
    let delta = BiRelation::constant_to_subgroup(&a, &Subgroup::torsion(&a)).expect("finite");
    RightDistributivityCase {
        phi: BiRelation::identity(&a),
        psi: BiRelation::identity(&a),
        delta,
        point: vector(&[0, 0]),
        ambient: a,
    }
}

/// Halving on `Z` (domain `2Z`) composed with `1 + 1`: `ψ(φ + γ)` is the
/// identity on `Z` while `ψφ + ψγ` is the identity on `2Z`.
#[derive(Clone, Debug)]
pub struct NearRingDistributivityCase {
    pub ambient: FgAbGroup,
    pub psi: BiRelation,
    pub phi: BiRelation,
    pub gamma: BiRelation,
}

pub fn halving() -> BiRelation {
    let z = FgAbGroup::free(1);
    BiRelation::from_graph(&z, &[(vector(&[2]), vector(&[1]))]).expect("fits")
}

pub fn near_ring_distributivity_counterexample() -> NearRingDistributivityCase {
    let z = FgAbGroup::free(1);
    NearRingDistributivityCase {
        psi: halving(),
        phi: BiRelation::identity(&z),
        gamma: BiRelation::identity(&z),
        ambient: z,
    }
}

/// A quasi-endomorphism of `Z + Z/2` with domain `<(2, 1)>` sending `(2, 1)`
/// to `(1, 0)`, and the projection onto the free coordinate. The projection
/// sends `(2, 1)` to `(2, 0)`, outside the domain of the first.
pub fn flat_failure() -> (BiRelation, BiRelation) {
    let a = FgAbGroup::new(1, &[2]).expect("valid");
    let h = BiRelation::from_graph(&a, &[(vector(&[2, 1]), vector(&[1, 0]))]).expect("fits");
    (h, m(&a, &[&[1, 0], &[0, 0]]))
}

#[derive(Clone, Debug)]
pub struct ProjectionCase {
    pub name: &'static str,
    pub gamma: RingPresentation,
    pub delta: RingPresentation,
    pub word_bound: usize,
    /// Number of lines the decomposition is expected to find.
    pub lines: usize,
}

fn block_permutation_case(torsion: &[i64]) -> (FgAbGroup, BiRelation, BiRelation, BiRelation) {
    let a = FgAbGroup::new(4, torsion).expect("valid");
    let n = a.cover_dim();
    let embed = |rows: [[i64; 4]; 4]| {
        let mut full = vec![vec![0i64; n]; n];
        for i in 0..4 {
            full[i][..4].copy_from_slice(&rows[i]);
        }
        let refs: Vec<&[i64]> = full.iter().map(|r| r.as_slice()).collect();
        m(&a, &refs)
    };
    let p1 = embed([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]);
    let swap = embed([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
    let rot = embed([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]);
    (a, p1, swap, rot)
}

/// At least ten curated rings, each decomposing completely.
pub fn projection_cases() -> Vec<ProjectionCase> {
    let mut out = Vec::new();
    let z = FgAbGroup::free(1);
    let z2 = FgAbGroup::free(2);
    let z3 = FgAbGroup::free(3);

    out.push(ProjectionCase {
        name: "Z: identity ring, doubling",
        gamma: pre(&z, vec![]),
        delta: pre(&z, vec![BiRelation::scalar(&z, 2)]),
        word_bound: 2,
        lines: 1,
    });
    let e11 = m(&z2, &[&[1, 0], &[0, 0]]);
    let e22 = m(&z2, &[&[0, 0], &[0, 1]]);
    let swap = m(&z2, &[&[0, 1], &[1, 0]]);
    out.push(ProjectionCase {
        name: "Z^2: coordinate idempotents and swap",
        gamma: pre(&z2, vec![e11.clone(), e22.clone(), swap.clone()]),
        delta: pre(&z2, vec![BiRelation::scalar(&z2, 5)]),
        word_bound: 2,
        lines: 2,
    });
    out.push(ProjectionCase {
        name: "Z^2: one idempotent and swap",
        gamma: pre(&z2, vec![e11.clone(), swap]),
        delta: pre(&z2, vec![BiRelation::scalar(&z2, 3)]),
        word_bound: 2,
        lines: 2,
    });
    out.push(ProjectionCase {
        name: "Z^2: oblique idempotent",
        gamma: pre(&z2, vec![m(&z2, &[&[1, 1], &[0, 0]]), m(&z2, &[&[0, -1], &[0, 1]])]),
        delta: pre(&z2, vec![BiRelation::scalar(&z2, -2)]),
        word_bound: 2,
        lines: 2,
    });
    out.push(ProjectionCase {
        name: "Z^3: diagonal idempotents",
        gamma: pre(
            &z3,
            vec![
                m(&z3, &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]),
                m(&z3, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]),
                m(&z3, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]),
            ],
        ),
        delta: pre(&z3, vec![m(&z3, &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]])]),
        word_bound: 2,
        lines: 3,
    });
    let (z4, p1, bswap, rot) = block_permutation_case(&[]);
    out.push(ProjectionCase {
        name: "Z^4: block idempotent and block swap",
        gamma: pre(&z4, vec![p1.clone(), bswap]),
        delta: pre(&z4, vec![rot.clone()]),
        word_bound: 2,
        lines: 2,
    });
    let p2 = BiRelation::identity(&z4).sub_rel(&p1).expect("same ambient");
    out.push(ProjectionCase {
        name: "Z^4: two block idempotents",
        gamma: pre(&z4, vec![p1, p2]),
        delta: pre(&z4, vec![rot]),
        word_bound: 2,
        lines: 2,
    });

    let zt = FgAbGroup::new(1, &[3]).expect("valid");
    out.push(ProjectionCase {
        name: "Z + Z/3: identity ring, doubling",
        gamma: pre(&zt, vec![]),
        delta: pre(&zt, vec![BiRelation::scalar(&zt, 2)]),
        word_bound: 2,
        lines: 1,
    });
    let a = FgAbGroup::new(2, &[2]).expect("valid");
    let t = BiRelation::constant_to_subgroup(&a, &Subgroup::torsion(&a)).expect("finite");
    let f11 = m(&a, &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]).add(&t).expect("same ambient");
    let f22 = m(&a, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
    out.push(ProjectionCase {
        name: "Z^2 + Z/2: idempotent with torsion ambiguity",
        gamma: pre(&a, vec![f11, f22]),
        delta: pre(&a, vec![BiRelation::scalar(&a, 2)]),
        word_bound: 2,
        lines: 2,
    });
    let b = FgAbGroup::new(2, &[4]).expect("valid");
    out.push(ProjectionCase {
        name: "Z^2 + Z/4: idempotents killing the torsion",
        gamma: pre(&b, vec![m(&b, &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]), m(&b, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]])]),
        delta: pre(&b, vec![BiRelation::scalar(&b, 3)]),
        word_bound: 2,
        lines: 2,
    });
    let (z4t, q1, qswap, qrot) = block_permutation_case(&[2]);
    let tq = BiRelation::constant_to_subgroup(&z4t, &Subgroup::torsion(&z4t)).expect("finite");
    out.push(ProjectionCase {
        name: "Z^4 + Z/2: block case with torsion ambiguity",
        gamma: pre(&z4t, vec![q1.add(&tq).expect("same ambient"), qswap]),
        delta: pre(&z4t, vec![qrot]),
        word_bound: 2,
        lines: 2,
    });
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldExpectation {
    Order(usize),
    NotMinimal,
}

#[derive(Clone, Debug)]
pub struct FieldCase {
    pub name: &'static str,
    pub ambient: FgAbGroup,
    pub generators: Vec<BiRelation>,
    pub expected: FieldExpectation,
}

pub fn field_cases() -> Vec<FieldCase> {
    let f4 = FgAbGroup::new(0, &[2, 2]).expect("valid");
    let f25 = FgAbGroup::new(0, &[5, 5]).expect("valid");
    let f8 = FgAbGroup::new(0, &[2, 2, 2]).expect("valid");
    let f9 = FgAbGroup::new(0, &[3, 3]).expect("valid");
    let z4 = FgAbGroup::new(0, &[4]).expect("valid");
    vec![
        FieldCase {
            name: "(Z/2)^2 with an element of order 3",
            generators: vec![m(&f4, &[&[0, 1], &[1, 1]])],
            ambient: f4.clone(),
            expected: FieldExpectation::Order(4),
        },
        FieldCase {
            // companion matrix of x^2 - x + 2, primitive over F5
            name: "(Z/5)^2 with a primitive companion matrix",
            generators: vec![m(&f25, &[&[0, 3], &[1, 1]])],
            ambient: f25,
            expected: FieldExpectation::Order(25),
        },
        FieldCase {
            // companion matrix of x^3 + x + 1 over F2
            name: "(Z/2)^3 with a companion matrix",
            generators: vec![m(&f8, &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 0]])],
            ambient: f8,
            expected: FieldExpectation::Order(8),
        },
        FieldCase {
            // companion matrix of x^2 + 1 over F3
            name: "(Z/3)^2 with a square root of -1",
            generators: vec![m(&f9, &[&[0, 2], &[1, 0]])],
            ambient: f9,
            expected: FieldExpectation::Order(9),
        },
        FieldCase {
            name: "Z/4 with multiplication by 3",
            generators: vec![BiRelation::scalar(&z4, 3)],
            ambient: z4,
            expected: FieldExpectation::NotMinimal,
        },
        FieldCase {
            name: "(Z/2)^2 with the identity",
            generators: vec![BiRelation::identity(&f4)],
            ambient: f4,
            expected: FieldExpectation::NotMinimal,
        },
    ]
}

#[derive(Clone, Debug)]
pub struct QuotientCase {
    pub name: &'static str,
    pub ring: RingPresentation,
    pub subgroup: Subgroup,
    pub accepted: bool,
}

pub fn quotient_cases() -> Vec<QuotientCase> {
    let a = FgAbGroup::new(1, &[4]).expect("valid");
    let half = sub(&a, &[&[0, 2]]);
    let to_half = BiRelation::constant_to_subgroup(&a, &half).expect("finite");
    let to_all = BiRelation::constant_to_subgroup(&a, &sub(&a, &[&[0, 1]])).expect("finite");
    let v = FgAbGroup::new(0, &[2, 2]).expect("valid");
    let line = sub(&v, &[&[1, 0]]);
    let z = FgAbGroup::free(1);
    let near = |amb: &FgAbGroup, gens| RingPresentation::new(amb, gens, RingKind::NearRing, true).expect("classified");
    let zt = FgAbGroup::new(1, &[2]).expect("valid");
    let partial = BiRelation::from_graph(&zt, &[(vector(&[2, 0]), vector(&[1, 1]))]).expect("fits");
    vec![
        QuotientCase {
            name: "Z + Z/4 mod <(0,2)>: tripling and a constant inside",
            ring: near(&a, vec![BiRelation::scalar(&a, 3), to_half]),
            subgroup: half.clone(),
            accepted: true,
        },
        QuotientCase {
            name: "Z + Z/4 mod <(0,2)>: constant onto the whole torsion",
            ring: near(&a, vec![to_all]),
            subgroup: half,
            accepted: false,
        },
        QuotientCase {
            name: "(Z/2)^2 mod a coordinate line: swap",
            ring: near(&v, vec![m(&v, &[&[0, 1], &[1, 0]])]),
            subgroup: line.clone(),
            accepted: false,
        },
        QuotientCase {
            name: "(Z/2)^2 mod a coordinate line: triangular map",
            ring: near(&v, vec![m(&v, &[&[1, 1], &[0, 1]])]),
            subgroup: line,
            accepted: true,
        },
        QuotientCase {
            name: "Z mod 0: halving",
            ring: near(&z, vec![halving()]),
            subgroup: Subgroup::zero(&z),
            accepted: true,
        },
        QuotientCase {
            name: "Z + Z/2 mod torsion: partial map onto a torsion coset",
            ring: near(&zt, vec![partial]),
            subgroup: Subgroup::torsion(&zt),
            accepted: true,
        },
    ]
}

/// Commutative rings acting by monomorphisms, with a word bound for their
/// slices.
pub fn ore_rings() -> Vec<(&'static str, RingPresentation, usize)> {
    let z = FgAbGroup::free(1);
    let z2 = FgAbGroup::free(2);
    vec![
        ("Z: integers", pre(&z, vec![]), 4),
        ("Z: doubling with identity", pre(&z, vec![BiRelation::scalar(&z, 2)]), 3),
        ("Z^2: Gaussian integers", pre(&z2, vec![m(&z2, &[&[0, -1], &[1, 0]])]), 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn there_are_at_least_ten_projection_cases() {
        assert!(projection_cases().len() >= 10);
    }
}
