//! Images of ring elements, lines among them, and rings localized to a line.

use std::collections::{HashMap, HashSet};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::invariance::{sets_commute, CommutationKind};
use crate::lattice::Lattice;
use crate::prering::{enumerate_slice, EnumerationSlice, RingKind, RingPresentation};
use crate::relation::BiRelation;

#[derive(Clone, Debug)]
pub struct GammaImage {
    pub element: BiRelation,
    pub image: Subgroup,
    pub rank: usize,
}

/// One entry per new image among the equivalence-class representatives.
pub fn gamma_images_in(slice: &EnumerationSlice) -> Vec<GammaImage> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rep in slice.representatives() {
        let image = rep.im().clone();
        if seen.insert(image.clone()) {
            let rank = image.rank();
            out.push(GammaImage { element: rep.clone(), image, rank });
        }
    }
    out
}

pub fn gamma_images(ring: &RingPresentation, word_bound: usize, caps: &Caps) -> Result<Vec<GammaImage>> {
    Ok(gamma_images_in(&enumerate_slice(ring, word_bound, caps)?))
}

/// A line together with the evidence for it. Minimality is only known
/// relative to the slice that was searched.
#[derive(Clone, Debug)]
pub struct LineCertificate {
    pub line: Subgroup,
    pub witness: BiRelation,
    pub slice_bound: usize,
    /// Number of infinite images compared against the line.
    pub contained_images_checked: usize,
}

/// Commensurability class key: the saturation of the cover lattice.
pub(crate) fn commensurability_key(b: &Subgroup) -> Lattice {
    b.cover_lattice().saturation()
}

/// Infinite images of minimal rank, one per commensurability class, each
/// with the first slice element producing it.
pub fn find_lines_in(slice: &EnumerationSlice) -> Vec<LineCertificate> {
    let images = gamma_images_in(slice);
    let infinite: Vec<&GammaImage> = images.iter().filter(|g| g.rank > 0).collect();
    let Some(min_rank) = infinite.iter().map(|g| g.rank).min() else {
        return Vec::new();
    };
    let mut classes: HashMap<Lattice, ()> = HashMap::new();
    let mut out = Vec::new();
    for g in infinite.iter().filter(|g| g.rank == min_rank) {
        if classes.insert(commensurability_key(&g.image), ()).is_some() {
            continue;
        }
        let checked = infinite.iter().filter(|h| h.image.is_subgroup_of(&g.image)).count();
        out.push(LineCertificate {
            line: g.image.clone(),
            witness: g.element.clone(),
            slice_bound: slice.word_bound,
            contained_images_checked: checked,
        });
    }
    debug_assert!(out.iter().all(|c| c.line.rank() == min_rank));
    out
}

pub fn find_lines(ring: &RingPresentation, word_bound: usize, caps: &Caps) -> Result<Vec<LineCertificate>> {
    Ok(find_lines_in(&enumerate_slice(ring, word_bound, caps)?))
}

/// The two rings carried by a line, presented on the line itself.
#[derive(Clone, Debug)]
pub struct LocalizedRings {
    pub line: Subgroup,
    pub gamma: RingPresentation,
    pub delta: RingPresentation,
    /// Whether the produced generators sharply commute.
    pub sharply_commute: bool,
}

/// Restricts `Δ` to the line and collects the slice elements of `Γ` whose
/// image lies in the line.
pub fn localize_to_line(
    gamma: &RingPresentation,
    delta: &RingPresentation,
    cert: &LineCertificate,
    word_bound: usize,
    caps: &Caps,
) -> Result<LocalizedRings> {
    if gamma.kind() != RingKind::PreRing || delta.kind() != RingKind::PreRing {
        return Err(Error::Precondition("localization works with pre-rings".into()));
    }
    let line = &cert.line;
    let delta_gens = delta
        .generators()
        .iter()
        .map(|d| d.restrict_corestrict(line))
        .collect::<Result<Vec<_>>>()?;
    let slice = enumerate_slice(gamma, word_bound, caps)?;
    let mut seen = HashSet::new();
    let mut gamma_gens = Vec::new();
    for e in &slice.elements {
        if e.im().is_subgroup_of(line) {
            let local = e.restrict_unchecked(line);
            if local != BiRelation::zero(local.ambient()) && seen.insert(local.clone()) {
                gamma_gens.push(local);
            }
        }
    }
    if gamma_gens.is_empty() {
        return Err(Error::Precondition("no slice element has its image inside the line".into()));
    }
    let on_line = line.presentation().group().clone();
    let sharply_commute = sets_commute(&gamma_gens, &delta_gens, CommutationKind::Sharp)?;
    Ok(LocalizedRings {
        line: line.clone(),
        gamma: RingPresentation::new(&on_line, gamma_gens, RingKind::PreRing, false)?,
        delta: RingPresentation::new(&on_line, delta_gens, RingKind::PreRing, delta.identity_included())?,
        sharply_commute,
    })
}

/// Slice elements `t, t'` with `x' t = y' t'` nonzero; the first such pair
/// in slice order of `t`, then of `t'`.
pub fn ore_witness(
    x: &BiRelation,
    y: &BiRelation,
    slice: &EnumerationSlice,
) -> Result<Option<(BiRelation, BiRelation)>> {
    let zero = BiRelation::zero(x.ambient());
    let mut right: HashMap<BiRelation, usize> = HashMap::new();
    for (j, t) in slice.elements.iter().enumerate() {
        right.entry(y.compose(t)?).or_insert(j);
    }
    for t in &slice.elements {
        let v = x.compose(t)?;
        if v == zero {
            continue;
        }
        if let Some(&j) = right.get(&v) {
            return Ok(Some((t.clone(), slice.elements[j].clone())));
        }
    }
    Ok(None)
}
