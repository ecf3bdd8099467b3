//! Commutation and invariance predicates, each returning a checkable witness
//! when it fails.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::lattice::{Int, Lattice, Vector};
use crate::relation::{BiRelation, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommutationKind {
    Sharp,
    Flat,
}

/// The part of flat commutation that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatClause {
    /// The first relation moves the common domain outside the second's domain.
    FirstPreservesDomain,
    /// The second relation moves the common domain outside the first's domain.
    SecondPreservesDomain,
    /// The commutator leaves the sum of katakernels.
    Commutator,
}

impl fmt::Display for FlatClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlatClause::FirstPreservesDomain => "first relation does not preserve the second domain",
            FlatClause::SecondPreservesDomain => "second relation does not preserve the first domain",
            FlatClause::Commutator => "commutator leaves the sum of katakernels",
        })
    }
}

/// `(a, b)`: a point and one of its values under the relation being tested.
pub type WitnessPair = (Vector, Vector);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationVerdict {
    pub holds: bool,
    pub checked_kind: CommutationKind,
    pub witness: Option<WitnessPair>,
    pub failed_clause: Option<FlatClause>,
}

impl CommutationVerdict {
    fn pass(kind: CommutationKind) -> Self {
        CommutationVerdict { holds: true, checked_kind: kind, witness: None, failed_clause: None }
    }

    fn fail(kind: CommutationKind, witness: WitnessPair, clause: Option<FlatClause>) -> Self {
        CommutationVerdict { holds: false, checked_kind: kind, witness: Some(witness), failed_clause: clause }
    }
}

/// A pair `(a, b)` of `rel` with `a ∈ source` and `bad(b)`, chosen to be
/// small and torsion-heavy. Only basis rows of the restricted graph are
/// searched, which suffices whenever `bad` describes leaving a subgroup.
pub(crate) fn offending_pair(
    rel: &BiRelation,
    source: &Subgroup,
    bad: impl Fn(&[Int]) -> bool,
) -> Option<WitnessPair> {
    let a = rel.ambient();
    let n = a.cover_dim();
    let box_lattice =
        source.cover_lattice().embed(2 * n, 0).sum(&Lattice::full(n).embed(2 * n, n));
    let restricted = rel.graph_lattice().intersect(&box_lattice);
    restricted
        .basis()
        .iter()
        .filter(|row| bad(&row[n..]))
        .map(|row| (a.reduce(&row[..n]), a.reduce(&row[n..])))
        .min_by(|x, y| pair_key(a.free_rank(), x).cmp(&pair_key(a.free_rank(), y)).then_with(|| x.cmp(y)))
}

fn pair_key(free: usize, (a, b): &WitnessPair) -> (bool, Int) {
    let has_free = a[..free].iter().chain(&b[..free]).any(|x| !x.is_zero());
    (has_free, a.iter().chain(b).map(|x| x.abs()).sum())
}

fn require_endogeny(phi: &BiRelation) -> Result<()> {
    if phi.kind() == Kind::Endogeny {
        Ok(())
    } else {
        Err(Error::Classification(format!("sharp commutation needs endogenies, got {}", phi.kind())))
    }
}

/// `(φψ − ψφ)[A] ⊆ kat φ + kat ψ`
pub fn sharp_commutes(phi: &BiRelation, psi: &BiRelation) -> Result<CommutationVerdict> {
    require_endogeny(phi)?;
    require_endogeny(psi)?;
    let comm = phi.compose(psi)?.sub_rel(&psi.compose(phi)?)?;
    let target = phi.kat().sum(psi.kat())?;
    if comm.im().is_subgroup_of(&target) {
        return Ok(CommutationVerdict::pass(CommutationKind::Sharp));
    }
    let w = offending_pair(&comm, &Subgroup::whole(phi.ambient()), |b| !target.contains(b))
        .expect("image escapes the target");
    Ok(CommutationVerdict::fail(CommutationKind::Sharp, w, None))
}

/// Mutual domain preservation on the common domain, then the commutator
/// condition there.
pub fn flat_commutes(delta: &BiRelation, gamma: &BiRelation) -> Result<CommutationVerdict> {
    delta.require_classified("flat commutation")?;
    gamma.require_classified("flat commutation")?;
    let common = delta.dom().intersect(gamma.dom())?;
    for (rel, other, clause) in [
        (delta, gamma, FlatClause::FirstPreservesDomain),
        (gamma, delta, FlatClause::SecondPreservesDomain),
    ] {
        if !rel.apply(&common)?.is_subgroup_of(other.dom()) {
            let w = offending_pair(rel, &common, |b| !other.dom().contains(b)).expect("image escapes the domain");
            return Ok(CommutationVerdict::fail(CommutationKind::Flat, w, Some(clause)));
        }
    }
    let comm = delta.compose(gamma)?.sub_rel(&gamma.compose(delta)?)?;
    let target = delta.kat().sum(gamma.kat())?;
    if comm.apply(&common)?.is_subgroup_of(&target) {
        return Ok(CommutationVerdict::pass(CommutationKind::Flat));
    }
    let w = offending_pair(&comm, &common, |b| !target.contains(b)).expect("image escapes the target");
    Ok(CommutationVerdict::fail(CommutationKind::Flat, w, Some(FlatClause::Commutator)))
}

pub fn commutes(phi: &BiRelation, psi: &BiRelation, kind: CommutationKind) -> Result<CommutationVerdict> {
    match kind {
        CommutationKind::Sharp => sharp_commutes(phi, psi),
        CommutationKind::Flat => flat_commutes(phi, psi),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InvarianceMode {
    /// `γ[B] ⊆ B`
    Invariant,
    /// `γ[B] ⊆ B + kat γ`
    Weak,
    /// `γ[B] ∩ B` has finite index in `γ[B]`
    Almost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorVerdict {
    pub generator: usize,
    pub holds: bool,
    pub witness: Option<WitnessPair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub mode: InvarianceMode,
    pub holds: bool,
    pub per_generator: Vec<GeneratorVerdict>,
}

impl InvarianceReport {
    pub fn first_failure(&self) -> Option<&GeneratorVerdict> {
        self.per_generator.iter().find(|v| !v.holds)
    }
}

/// Checks one generator; `None` means it passes.
pub(crate) fn invariance_violation(
    b: &Subgroup,
    gamma: &BiRelation,
    mode: InvarianceMode,
) -> Result<Option<WitnessPair>> {
    if b.ambient() != gamma.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let image = gamma.apply(b)?;
    let witness = match mode {
        InvarianceMode::Invariant => {
            (!image.is_subgroup_of(b)).then(|| offending_pair(gamma, b, |v| !b.contains(v)))
        }
        InvarianceMode::Weak => {
            let target = b.sum(gamma.kat())?;
            (!image.is_subgroup_of(&target)).then(|| offending_pair(gamma, b, |v| !target.contains(v)))
        }
        InvarianceMode::Almost => {
            let common = image.intersect(b)?;
            (common.rank() != image.rank()).then(|| {
                let sat = common.cover_lattice().saturation();
                offending_pair(gamma, b, |v| !sat.contains(v))
            })
        }
    };
    Ok(witness.map(|w| w.expect("a failing containment has a basis witness")))
}

pub fn invariance(b: &Subgroup, gens: &[BiRelation], mode: InvarianceMode) -> Result<InvarianceReport> {
    let mut per_generator = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let witness = invariance_violation(b, g, mode)?;
        per_generator.push(GeneratorVerdict { generator: i, holds: witness.is_none(), witness });
    }
    let holds = per_generator.iter().all(|v| v.holds);
    Ok(InvarianceReport { mode, holds, per_generator })
}

pub fn is_invariant(b: &Subgroup, gens: &[BiRelation], mode: InvarianceMode) -> Result<bool> {
    for g in gens {
        if invariance_violation(b, g, mode)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `φ` commutes in the given sense with every generator.
pub fn commutant_membership(phi: &BiRelation, gens: &[BiRelation], kind: CommutationKind) -> Result<bool> {
    for g in gens {
        if !commutes(phi, g, kind)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every element of `xs` commutes with every element of `ys`.
pub fn sets_commute(xs: &[BiRelation], ys: &[BiRelation], kind: CommutationKind) -> Result<bool> {
    for x in xs {
        if !commutant_membership(x, ys, kind)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FgAbGroup;
    use crate::lattice::vector;

    fn sub(a: &FgAbGroup, gens: &[&[i64]]) -> Subgroup {
        Subgroup::generated(a, &gens.iter().map(|g| vector(g)).collect::<Vec<_>>()).unwrap()
    }

    fn halving() -> BiRelation {
        BiRelation::from_graph(&FgAbGroup::free(1), &[(vector(&[2]), vector(&[1]))]).unwrap()
    }

    /// Re-checks a failing containment at its witness.
    fn reproduces(rel: &BiRelation, source: &Subgroup, target: &Subgroup, (a, b): &WitnessPair) -> bool {
        source.contains(a) && rel.contains_pair(a, b) && !target.contains(b)
    }

    #[test]
    fn sharp_examples() {
        let z2 = FgAbGroup::free(2);
        let p = BiRelation::from_i64_matrix(&z2, &[&[2, 1], &[0, 3]]).unwrap();
        let q = BiRelation::from_i64_matrix(&z2, &[&[4, 1], &[0, 5]]).unwrap();
        assert!(sharp_commutes(&p, &q).unwrap().holds);

        let u = BiRelation::from_i64_matrix(&z2, &[&[1, 1], &[0, 1]]).unwrap();
        let l = BiRelation::from_i64_matrix(&z2, &[&[1, 0], &[1, 1]]).unwrap();
        let v = sharp_commutes(&u, &l).unwrap();
        assert!(!v.holds);
        let comm = u.compose(&l).unwrap().sub_rel(&l.compose(&u).unwrap()).unwrap();
        assert!(reproduces(&comm, &Subgroup::whole(&z2), &Subgroup::zero(&z2), v.witness.as_ref().unwrap()));

        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        let g = BiRelation::from_i64_matrix(&a, &[&[3, 0], &[1, 1]]).unwrap();
        assert!(sharp_commutes(&c, &g).unwrap().holds);
        assert!(sharp_commutes(&halving(), &halving()).is_err());
    }

    #[test]
    fn flat_examples() {
        let z = FgAbGroup::free(1);
        let d = BiRelation::scalar(&z, 2);
        assert!(flat_commutes(&halving(), &d).unwrap().holds);

        let z2 = FgAbGroup::free(2);
        let u = BiRelation::from_i64_matrix(&z2, &[&[1, 1], &[0, 1]]).unwrap();
        let l = BiRelation::from_i64_matrix(&z2, &[&[1, 0], &[1, 1]]).unwrap();
        assert_eq!(flat_commutes(&u, &l).unwrap().holds, sharp_commutes(&u, &l).unwrap().holds);

        // Halving whose domain twists the torsion coordinate, against the
        // projection that forgets the torsion.
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let h = BiRelation::from_graph(&a, &[(vector(&[2, 1]), vector(&[1, 0]))]).unwrap();
        assert_eq!(h.kind(), Kind::QuasiEndo);
        let leak = BiRelation::from_i64_matrix(&a, &[&[1, 0], &[0, 0]]).unwrap();
        let v = flat_commutes(&h, &leak).unwrap();
        assert!(!v.holds);
        assert_eq!(v.failed_clause, Some(FlatClause::SecondPreservesDomain));
        let common = h.dom().intersect(leak.dom()).unwrap();
        assert!(reproduces(&leak, &common, h.dom(), v.witness.as_ref().unwrap()));
    }

    #[test]
    fn invariance_examples() {
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let g = BiRelation::constant_to_subgroup(&a, &t).unwrap().add(&BiRelation::scalar(&a, 3)).unwrap();
        assert!(invariance(g.kat(), std::slice::from_ref(&g), InvarianceMode::Weak).unwrap().holds);

        let zero = Subgroup::zero(&a);
        let inv = invariance(&zero, std::slice::from_ref(&g), InvarianceMode::Invariant).unwrap();
        assert!(!inv.holds);
        assert!(reproduces(&g, &zero, &zero, inv.per_generator[0].witness.as_ref().unwrap()));
        assert!(invariance(&zero, std::slice::from_ref(&g), InvarianceMode::Weak).unwrap().holds);

        let z = FgAbGroup::free(1);
        let six = sub(&z, &[&[6]]);
        let h = [halving()];
        assert!(invariance(&six, &h, InvarianceMode::Almost).unwrap().holds);
        assert!(!invariance(&six, &h, InvarianceMode::Invariant).unwrap().holds);

        let z2 = FgAbGroup::free(2);
        let line = sub(&z2, &[&[1, 0]]);
        let swap = [BiRelation::from_i64_matrix(&z2, &[&[0, 1], &[1, 0]]).unwrap()];
        let r = invariance(&line, &swap, InvarianceMode::Almost).unwrap();
        assert!(!r.holds);
        assert_eq!(r.per_generator[0].witness, Some((vector(&[1, 0]), vector(&[0, 1]))));
    }

    #[test]
    fn commutant_examples() {
        let z2 = FgAbGroup::free(2);
        let gens = [
            BiRelation::from_i64_matrix(&z2, &[&[1, 1], &[0, 1]]).unwrap(),
            BiRelation::from_i64_matrix(&z2, &[&[0, 1], &[1, 0]]).unwrap(),
        ];
        for kind in [CommutationKind::Sharp, CommutationKind::Flat] {
            assert!(commutant_membership(&BiRelation::identity(&z2), &gens, kind).unwrap());
            assert!(commutant_membership(&BiRelation::scalar(&z2, 2), &gens, kind).unwrap());
        }
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        let good = [BiRelation::from_i64_matrix(&a, &[&[3, 0], &[1, 1]]).unwrap()];
        assert!(commutant_membership(&c, &good, CommutationKind::Sharp).unwrap());
        assert!(invariance(&t, &good, InvarianceMode::Weak).unwrap().holds);
    }
}
