//! Finitely generated pre-rings and near-rings of bi-relations.
//!
//! A ring is given by generators; its elements are explored through
//! enumeration slices ordered by weight. Every generator and the identity
//! weighs one, each negation adds one, and a sum or product weighs the total
//! of its operands. The zero relation weighs nothing.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{quotient, torsion_and_finite_lattice, FgAbGroup, QuotientPresentation, Subgroup};
use crate::invariance::{invariance_violation, is_invariant, offending_pair, InvarianceMode};
use crate::lattice::Lattice;
use crate::relation::{BiRelation, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RingKind {
    /// Endogenies closed under sum, negation and composition.
    PreRing,
    /// Quasi-endomorphisms closed under sum and composition; only total
    /// elements are negated.
    NearRing,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    ambient: FgAbGroup,
    generators: Vec<BiRelation>,
    kind: RingKind,
    identity_included: bool,
}

impl RingPresentation {
    pub fn new(
        ambient: &FgAbGroup,
        generators: Vec<BiRelation>,
        kind: RingKind,
        identity_included: bool,
    ) -> Result<RingPresentation> {
        for (i, g) in generators.iter().enumerate() {
            if g.ambient() != ambient {
                return Err(Error::AmbientMismatch);
            }
            let ok = match kind {
                RingKind::PreRing => g.kind() == Kind::Endogeny,
                RingKind::NearRing => g.kind() != Kind::Neither,
            };
            if !ok {
                return Err(Error::Classification(format!("generator {i} is {} in a {kind:?}", g.kind())));
            }
        }
        Ok(RingPresentation { ambient: ambient.clone(), generators, kind, identity_included })
    }

    pub fn pre_ring(ambient: &FgAbGroup, generators: Vec<BiRelation>) -> Result<RingPresentation> {
        Self::new(ambient, generators, RingKind::PreRing, true)
    }

    pub fn near_ring(ambient: &FgAbGroup, generators: Vec<BiRelation>) -> Result<RingPresentation> {
        Self::new(ambient, generators, RingKind::NearRing, true)
    }

    pub fn ambient(&self) -> &FgAbGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[BiRelation] {
        &self.generators
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn identity_included(&self) -> bool {
        self.identity_included
    }

    /// The weight-one elements: the identity (when included), then the generators.
    pub fn leaves(&self) -> Vec<BiRelation> {
        let mut out = Vec::with_capacity(self.generators.len() + 1);
        if self.identity_included {
            out.push(BiRelation::identity(&self.ambient));
        }
        out.extend(self.generators.iter().cloned());
        out
    }

    fn may_negate(&self, x: &BiRelation) -> bool {
        self.kind == RingKind::PreRing || x.is_total()
    }
}

#[derive(Clone, Debug)]
pub struct EnumerationSlice {
    pub ring: RingPresentation,
    pub word_bound: usize,
    /// Distinct graphs in enumeration order; the zero relation comes first.
    pub elements: Vec<BiRelation>,
    /// Weight at which each element first appeared.
    pub weights: Vec<usize>,
    /// Partition of element indices under equivalence, each class listed
    /// from its first element.
    pub equivalence_classes: Vec<Vec<usize>>,
}

impl EnumerationSlice {
    pub fn representatives(&self) -> Vec<&BiRelation> {
        self.equivalence_classes.iter().map(|c| &self.elements[c[0]]).collect()
    }

    pub fn index_of(&self, rel: &BiRelation) -> Option<usize> {
        self.elements.iter().position(|e| e == rel)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Invariant of the equivalence class: the rational span of the graph on the
/// free coordinates, which is the graph of the induced linear map.
pub(crate) fn equivalence_key(rel: &BiRelation) -> Lattice {
    let a = rel.ambient();
    let (n, r) = (a.cover_dim(), a.free_rank());
    let cols: Vec<usize> = (0..r).chain(n..n + r).collect();
    rel.graph_lattice().project(&cols).saturation()
}

pub fn enumerate_slice(ring: &RingPresentation, word_bound: usize, caps: &Caps) -> Result<EnumerationSlice> {
    if word_bound > caps.word_bound {
        return Err(Error::EnumerationTooLarge { what: "word bound", cap: caps.word_bound as u64 });
    }
    let mut elements = vec![BiRelation::zero(&ring.ambient)];
    let mut weights = vec![0];
    let mut seen: HashSet<BiRelation> = elements.iter().cloned().collect();
    let mut levels: Vec<Vec<usize>> = vec![vec![0]];

    let mut push = |rel: BiRelation, w: usize, elements: &mut Vec<BiRelation>, level: &mut Vec<usize>| -> Result<()> {
        if seen.contains(&rel) {
            return Ok(());
        }
        if elements.len() as u64 >= caps.slice_elements {
            return Err(Error::EnumerationTooLarge { what: "slice elements", cap: caps.slice_elements });
        }
        seen.insert(rel.clone());
        level.push(elements.len());
        elements.push(rel);
        weights.push(w);
        Ok(())
    };

    for w in 1..=word_bound {
        let mut level = Vec::new();
        if w == 1 {
            for leaf in ring.leaves() {
                push(leaf, w, &mut elements, &mut level)?;
            }
        }
        for &i in &levels[w - 1] {
            if w >= 2 && ring.may_negate(&elements[i]) {
                let neg = elements[i].neg();
                push(neg, w, &mut elements, &mut level)?;
            }
        }
        for left in 1..w {
            let right = w - left;
            if left > right {
                break;
            }
            for (pi, &i) in levels[left].iter().enumerate() {
                let start = if left == right { pi } else { 0 };
                for &j in &levels[right][start..] {
                    let sum = elements[i].add(&elements[j])?;
                    push(sum, w, &mut elements, &mut level)?;
                }
            }
        }
        for left in 1..w {
            let right = w - left;
            for &i in &levels[left] {
                for &j in &levels[right] {
                    let prod = elements[i].compose(&elements[j])?;
                    push(prod, w, &mut elements, &mut level)?;
                }
            }
        }
        levels.push(level);
    }

    let mut class_of: HashMap<Lattice, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        let key = equivalence_key(e);
        match class_of.get(&key) {
            Some(&c) => classes[c].push(i),
            None => {
                class_of.insert(key, classes.len());
                classes.push(vec![i]);
            }
        }
    }
    Ok(EnumerationSlice { ring: ring.clone(), word_bound, elements, weights, equivalence_classes: classes })
}

/// Number of pairwise inequivalent elements in the slice.
pub fn inequivalence_probe(slice: &EnumerationSlice) -> usize {
    slice.equivalence_classes.len()
}

/// The least subgroup containing every generator's katakernel and closed
/// under every generator; this is the sum of the katakernels of all ring
/// elements.
pub fn global_katakernel(ring: &RingPresentation, caps: &Caps) -> Result<Subgroup> {
    let a = &ring.ambient;
    if a.torsion_order() > caps.torsion_order.into() {
        return Err(Error::EnumerationTooLarge { what: "torsion order", cap: caps.torsion_order });
    }
    let mut current = Subgroup::zero(a);
    for g in &ring.generators {
        current = current.sum(g.kat())?;
    }
    loop {
        let mut next = current.clone();
        for g in &ring.generators {
            next = next.sum(&g.apply(&current)?)?;
        }
        if next == current {
            return Ok(current);
        }
        current = next;
    }
}

/// `Kat(Γ) + Kat(Δ)`
pub fn bikatakernel(gamma: &RingPresentation, delta: &RingPresentation, caps: &Caps) -> Result<Subgroup> {
    global_katakernel(gamma, caps)?.sum(&global_katakernel(delta, caps)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalDomain {
    pub domain: Subgroup,
    /// True when the domain is known to be that of the whole ring, not just
    /// of the slice.
    pub exact: bool,
    /// Domain after each weight level, starting with weight zero.
    pub chain: Vec<Subgroup>,
}

/// Intersection of the domains of every slice element. The result is exact
/// when every generator is total, or when the ambient is finite and the
/// chain was constant over the last level.
pub fn global_domain(ring: &RingPresentation, word_bound: usize, caps: &Caps) -> Result<GlobalDomain> {
    if ring.kind != RingKind::NearRing {
        return Err(Error::Precondition("global domains are computed for near-rings".into()));
    }
    let slice = enumerate_slice(ring, word_bound, caps)?;
    let mut chain = vec![Subgroup::whole(&ring.ambient)];
    for w in 1..=word_bound {
        let mut d = chain[w - 1].clone();
        for (e, &ew) in slice.elements.iter().zip(&slice.weights) {
            if ew == w {
                d = d.intersect(e.dom())?;
            }
        }
        chain.push(d);
    }
    let domain = chain.last().expect("nonempty").clone();
    let all_total = ring.generators.iter().all(BiRelation::is_total);
    let stable = word_bound >= 2 && chain[word_bound] == chain[word_bound - 1];
    let exact = all_total || (ring.ambient.is_finite() && stable);
    Ok(GlobalDomain { domain, exact, chain })
}

/// The sum of all finite weakly invariant subgroups, found by filtering the
/// subgroups of the torsion.
pub fn max_finite_weakly_invariant(ring: &RingPresentation, caps: &Caps) -> Result<Subgroup> {
    let (_, subgroups) = torsion_and_finite_lattice(&ring.ambient, caps)?;
    let mut total = Subgroup::zero(&ring.ambient);
    for s in &subgroups {
        if !s.is_subgroup_of(&total) && is_invariant(s, &ring.generators, InvarianceMode::Weak)? {
            total = total.sum(s)?;
        }
    }
    if !is_invariant(&total, &ring.generators, InvarianceMode::Weak)? {
        return Err(Error::Precondition("sum of weakly invariant subgroups is not weakly invariant".into()));
    }
    Ok(total)
}

/// The ring acting on `A / A_0`, with the projection used.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    pub ring: RingPresentation,
    pub projection: QuotientPresentation,
}

impl QuotientRing {
    /// Pushes a relation on `A` through the projection on both coordinates.
    pub fn push(&self, rel: &BiRelation) -> BiRelation {
        push_relation(&self.projection, rel)
    }
}

fn push_relation(q: &QuotientPresentation, rel: &BiRelation) -> BiRelation {
    let n = q.source.cover_dim();
    let pairs: Vec<_> =
        rel.graph_lattice().basis().iter().map(|row| (q.project(&row[..n]), q.project(&row[n..]))).collect();
    BiRelation::from_graph(&q.quotient, &pairs).expect("projected pairs have quotient length")
}

/// Requires `φ[A_0 ∩ Dom φ] ⊆ A_0` for every generator.
pub fn quotient_action(ring: &RingPresentation, a0: &Subgroup) -> Result<QuotientRing> {
    if a0.ambient() != &ring.ambient {
        return Err(Error::AmbientMismatch);
    }
    if !a0.is_finite() {
        return Err(Error::Precondition("the quotient subgroup must be finite".into()));
    }
    for (i, g) in ring.generators.iter().enumerate() {
        if invariance_violation(a0, g, InvarianceMode::Invariant)?.is_some() {
            let (_, b) = offending_pair(g, a0, |b| !a0.contains(b)).expect("violation has a witness");
            return Err(Error::NotInvariant { generator: i, witness: b });
        }
    }
    let projection = quotient(&ring.ambient, a0)?;
    let generators = ring.generators.iter().map(|g| push_relation(&projection, g)).collect();
    let pushed = RingPresentation::new(&projection.quotient, generators, ring.kind, ring.identity_included)?;
    Ok(QuotientRing { ring: pushed, projection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vector;

    fn sub(a: &FgAbGroup, gens: &[&[i64]]) -> Subgroup {
        Subgroup::generated(a, &gens.iter().map(|g| vector(g)).collect::<Vec<_>>()).unwrap()
    }

    fn halving() -> BiRelation {
        BiRelation::from_graph(&FgAbGroup::free(1), &[(vector(&[2]), vector(&[1]))]).unwrap()
    }

    fn scalars(slice: &EnumerationSlice) -> Vec<i64> {
        let z = FgAbGroup::free(1);
        let mut out: Vec<i64> = (-64..=64).filter(|&k| slice.elements.contains(&BiRelation::scalar(&z, k))).collect();
        out.sort();
        out
    }

    #[test]
    fn slice_examples() {
        let z = FgAbGroup::free(1);
        let caps = Caps::default();
        let r = RingPresentation::new(&z, vec![BiRelation::scalar(&z, 2)], RingKind::PreRing, false).unwrap();
        let s = enumerate_slice(&r, 3, &caps).unwrap();
        assert_eq!(scalars(&s), vec![-4, -2, 0, 2, 4, 6, 8]);
        assert_eq!(s.len(), 7);

        let with_one = RingPresentation::pre_ring(&z, vec![BiRelation::scalar(&z, 2)]).unwrap();
        let s = enumerate_slice(&with_one, 3, &caps).unwrap();
        for k in [0, 1, 2, 3, 4, -2] {
            assert!(scalars(&s).contains(&k));
        }

        let ones = RingPresentation::pre_ring(&z, vec![]).unwrap();
        assert_eq!(scalars(&enumerate_slice(&ones, 2, &caps).unwrap()), vec![-1, 0, 1, 2]);
        assert_eq!(scalars(&enumerate_slice(&ones, 3, &caps).unwrap()), vec![-2, -1, 0, 1, 2, 3]);
        let s = enumerate_slice(&ones, 1, &caps).unwrap();
        assert_eq!(s.elements, vec![BiRelation::zero(&z), BiRelation::identity(&z)]);

        assert!(enumerate_slice(&ones, 9, &caps).is_err());
        let tight = Caps { slice_elements: 3, ..caps };
        assert!(matches!(enumerate_slice(&ones, 2, &tight), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn equivalence_partition_matches_relation() {
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let gens = vec![
            BiRelation::scalar(&a, 2),
            BiRelation::constant_to_subgroup(&a, &t).unwrap(),
        ];
        let r = RingPresentation::pre_ring(&a, gens).unwrap();
        let s = enumerate_slice(&r, 3, &Caps::default()).unwrap();
        for (ci, class) in s.equivalence_classes.iter().enumerate() {
            for &i in class {
                assert!(s.elements[i].equivalent(&s.elements[class[0]]).unwrap());
            }
            for other in &s.equivalence_classes[ci + 1..] {
                assert!(!s.elements[other[0]].equivalent(&s.elements[class[0]]).unwrap());
            }
        }
        let bigger = enumerate_slice(&r, 4, &Caps::default()).unwrap();
        assert!(inequivalence_probe(&bigger) >= inequivalence_probe(&s));
    }

    #[test]
    fn probe_examples() {
        let z = FgAbGroup::free(1);
        let r = RingPresentation::new(&z, vec![BiRelation::scalar(&z, 2)], RingKind::PreRing, false).unwrap();
        assert!(inequivalence_probe(&enumerate_slice(&r, 4, &Caps::default()).unwrap()) >= 7);
        let zero = RingPresentation::new(&z, vec![], RingKind::PreRing, false).unwrap();
        assert_eq!(inequivalence_probe(&enumerate_slice(&zero, 3, &Caps::default()).unwrap()), 1);
    }

    #[test]
    fn katakernel_examples() {
        let caps = Caps::default();
        let z = FgAbGroup::free(1);
        let r = RingPresentation::pre_ring(&z, vec![BiRelation::scalar(&z, 2)]).unwrap();
        assert!(global_katakernel(&r, &caps).unwrap().is_zero());

        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let r = RingPresentation::pre_ring(
            &a,
            vec![BiRelation::constant_to_subgroup(&a, &t).unwrap(), BiRelation::scalar(&a, 2)],
        )
        .unwrap();
        assert_eq!(global_katakernel(&r, &caps).unwrap(), t);
    }

    #[test]
    fn katakernel_closes_under_generators() {
        // The constant katakernel is carried by the matrix to (0, 2).
        let a = FgAbGroup::new(0, &[2, 4]).unwrap();
        let c = BiRelation::constant_to_subgroup(&a, &sub(&a, &[&[1, 0]])).unwrap();
        let m = BiRelation::from_i64_matrix(&a, &[&[0, 1], &[2, 0]]).unwrap();
        let r = RingPresentation::pre_ring(&a, vec![c, m]).unwrap();
        let k = global_katakernel(&r, &Caps::default()).unwrap();
        assert_eq!(k, sub(&a, &[&[1, 0], &[0, 2]]));
    }

    #[test]
    fn domain_examples() {
        let caps = Caps::default();
        let z = FgAbGroup::free(1);
        let r = RingPresentation::near_ring(&z, vec![halving()]).unwrap();
        let d = global_domain(&r, 3, &caps).unwrap();
        assert_eq!(d.domain, sub(&z, &[&[8]]));
        assert!(!d.exact);

        let total = RingPresentation::near_ring(&z, vec![BiRelation::scalar(&z, 3)]).unwrap();
        let d = global_domain(&total, 3, &caps).unwrap();
        assert_eq!(d.domain, Subgroup::whole(&z));
        assert!(d.exact);

        // A partial identity on a finite group keeps its domain.
        let f = FgAbGroup::new(0, &[2, 2]).unwrap();
        let h = BiRelation::from_graph(&f, &[(vector(&[1, 0]), vector(&[1, 0]))]).unwrap();
        let fr = RingPresentation::near_ring(&f, vec![h]).unwrap();
        let d = global_domain(&fr, 4, &caps).unwrap();
        assert!(d.exact);
        assert_eq!(d.domain, sub(&f, &[&[1, 0]]));
        assert!(global_domain(&RingPresentation::pre_ring(&z, vec![]).unwrap(), 2, &caps).is_err());
    }

    #[test]
    fn weakly_invariant_examples() {
        let caps = Caps::default();
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let r = RingPresentation::pre_ring(&a, vec![BiRelation::scalar(&a, 2)]).unwrap();
        assert_eq!(max_finite_weakly_invariant(&r, &caps).unwrap(), t);

        let z2 = FgAbGroup::free(2);
        let r = RingPresentation::pre_ring(&z2, vec![BiRelation::scalar(&z2, 3)]).unwrap();
        assert!(max_finite_weakly_invariant(&r, &caps).unwrap().is_zero());

        let b = FgAbGroup::new(1, &[2, 4]).unwrap();
        let tb = Subgroup::torsion(&b);
        let leak = BiRelation::from_i64_matrix(&b, &[&[1, 0, 0], &[0, 0, 0], &[0, 2, 1]]).unwrap();
        let r = RingPresentation::pre_ring(&b, vec![BiRelation::constant_to_subgroup(&b, &tb).unwrap(), leak]).unwrap();
        assert_eq!(max_finite_weakly_invariant(&r, &caps).unwrap(), tb);
    }

    #[test]
    fn quotient_action_examples() {
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        let r = RingPresentation::pre_ring(&a, vec![c.add(&BiRelation::scalar(&a, 3)).unwrap()]).unwrap();
        let k = global_katakernel(&r, &Caps::default()).unwrap();
        let q = quotient_action(&r, &k).unwrap();
        assert_eq!(q.ring.ambient(), &FgAbGroup::free(1));
        assert!(q.ring.generators()[0].kat().is_zero());
        assert_eq!(q.ring.generators()[0], BiRelation::scalar(&FgAbGroup::free(1), 3));

        assert!(matches!(quotient_action(&r, &Subgroup::zero(&a)), Err(Error::NotInvariant { .. })));
        let honest = RingPresentation::pre_ring(&a, vec![BiRelation::scalar(&a, 3)]).unwrap();
        let same = quotient_action(&honest, &Subgroup::zero(&a)).unwrap();
        assert_eq!(same.ring.ambient(), &a);
        assert_eq!(same.ring.generators(), honest.generators());

        let b = FgAbGroup::new(1, &[4]).unwrap();
        let a0 = sub(&b, &[&[0, 2]]);
        let good = BiRelation::scalar(&b, 2);
        let shift = BiRelation::from_i64_matrix(&b, &[&[1, 0], &[0, 3]]).unwrap();
        assert!(quotient_action(&RingPresentation::pre_ring(&b, vec![good.clone(), shift]).unwrap(), &a0).is_ok());
        let c = BiRelation::constant_to_subgroup(&b, &sub(&b, &[&[0, 1]])).unwrap();
        let r = RingPresentation::pre_ring(&b, vec![good, c]).unwrap();
        match quotient_action(&r, &a0) {
            Err(Error::NotInvariant { generator, witness }) => {
                assert_eq!(generator, 1);
                assert_eq!(witness, vector(&[0, 1]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
