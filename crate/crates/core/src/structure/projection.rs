//! Quasi-projections onto lines and the resulting almost-direct decomposition.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{FgAbGroup, Index, Subgroup};
use crate::invariance::flat_commutes;
use crate::prering::{bikatakernel, enumerate_slice, RingPresentation};
use crate::relation::{escape_witness, show, BiRelation, Kind};

fn not_projection(clause: &str, witness: Option<Vec<crate::lattice::Int>>) -> Error {
    match witness {
        Some(w) => Error::NotAProjection(format!("{clause} (witness {})", show(&w))),
        None => Error::NotAProjection(clause.to_string()),
    }
}

/// `γ ∩ (L x L)`, still as a relation on the ambient.
fn restrict_graph(gamma: &BiRelation, line: &Subgroup) -> Result<BiRelation> {
    gamma.meet(&BiRelation::product_relation(line, line)?)
}

/// `|L : γ_L[L] + L0|`, the defect of surjectivity of `γ` on the line.
pub fn surjectivity_defect(gamma: &BiRelation, line: &Subgroup, line0: &Subgroup) -> Result<Index> {
    let on_line = restrict_graph(gamma, line)?;
    Ok(line.index_of(&on_line.apply(line)?.sum(line0)?))
}

/// Builds `π = (γ_L + 0 x L0)^{-1} γ`, which sends each `a` to the points of
/// `L` whose `γ_L`-image meets `γ[a]`, up to `L0`.
///
/// The image condition is checked up to the katakernel of `γ`, so a
/// witness whose values only leave `L` by torsion is accepted.
pub fn quasi_projection(gamma: &BiRelation, line: &Subgroup, line0: &Subgroup) -> Result<BiRelation> {
    let a = gamma.ambient();
    if line.ambient() != a || line0.ambient() != a {
        return Err(Error::AmbientMismatch);
    }
    if gamma.kind() != Kind::Endogeny {
        return Err(Error::Classification(format!("the witness is {}, not an endogeny", gamma.kind())));
    }
    if !line0.is_finite() || !line0.is_subgroup_of(line) {
        return Err(not_projection("the finite part must be a finite subgroup of the line", None));
    }
    let target = line.sum(gamma.kat())?;
    if let Some(w) = escape_witness(gamma.im(), &target) {
        return Err(not_projection("image is not inside the line", Some(w)));
    }
    let on_line = restrict_graph(gamma, line)?;
    let reached = on_line.apply(line)?.sum(line0)?;
    if let Some(w) = escape_witness(line, &reached) {
        return Err(not_projection("not surjective on the line up to the finite part", Some(w)));
    }
    let back = on_line.preimage(line0)?;
    if &back != line0 {
        let w = escape_witness(&back, line0);
        return Err(not_projection("preimage of the finite part is larger than the finite part", w));
    }
    let padded = on_line.join(&BiRelation::product_relation(&Subgroup::zero(a), line0)?)?;
    let pi = padded.converse().compose(gamma)?;
    check_projection(&pi, line)?;
    Ok(pi)
}

/// The defining properties of a quasi-projection onto `line`.
fn check_projection(pi: &BiRelation, line: &Subgroup) -> Result<()> {
    if pi.kind() != Kind::Endogeny {
        return Err(not_projection("result is not an endogeny", None));
    }
    if !pi.is_total() {
        return Err(not_projection("result is not total", None));
    }
    if let Some(w) = escape_witness(pi.im(), line) {
        return Err(not_projection("result has values outside the line", Some(w)));
    }
    if let Some(w) = fixes_line_violation(pi, line)? {
        return Err(not_projection("result does not fix the line", Some(w)));
    }
    if !pi.compose(pi)?.equivalent(pi)? {
        return Err(not_projection("result is not idempotent up to equivalence", None));
    }
    Ok(())
}

/// A point `l` of the line with `π[l] ≠ l + kat π`.
fn fixes_line_violation(pi: &BiRelation, line: &Subgroup) -> Result<Option<Vec<crate::lattice::Int>>> {
    for l in line.basis() {
        if !pi.contains_pair(l, l) {
            return Ok(Some(l.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub projections: Vec<BiRelation>,
    pub lines: Vec<Subgroup>,
    /// The torsion part of each line.
    pub line_torsion: Vec<Subgroup>,
    /// Image of `1 - Σ πᵢ`.
    pub residual: Subgroup,
    /// `Σ Lᵢ0 + H`.
    pub bikatakernel_bound: Subgroup,
    pub bikatakernel: Subgroup,
    /// Set when no line with a quasi-projection was found; holds the
    /// residual image at that point.
    pub blocking_residual: Option<Subgroup>,
    pub sum_has_finite_index: bool,
    pub lines_almost_independent: bool,
    pub projections_idempotent: bool,
    /// `im πᵢ ∩ im(1 - πᵢ) ⊆ kat πᵢ + Lᵢ0` for every `i`.
    pub projections_separate: bool,
    pub bikatakernel_contained: bool,
    /// Flat commutation of each projection with each generator of `Δ`.
    pub flat_with_delta: Vec<Vec<bool>>,
}

impl DecompositionReport {
    pub fn is_complete(&self) -> bool {
        self.blocking_residual.is_none()
    }

    /// Whether the decomposition finished and every checked property holds.
    pub fn holds(&self) -> bool {
        self.is_complete()
            && self.sum_has_finite_index
            && self.lines_almost_independent
            && self.projections_idempotent
            && self.projections_separate
            && self.bikatakernel_contained
    }
}

fn residual_of(a: &FgAbGroup, projections: &[BiRelation]) -> Result<BiRelation> {
    let mut rho = BiRelation::identity(a);
    for p in projections {
        rho = rho.sub_rel(p)?;
    }
    Ok(rho)
}

/// Repeatedly picks a line inside the current residual image, projects onto
/// it and removes the projection from the residual.
pub fn decompose_lines(
    gamma: &RingPresentation,
    delta: &RingPresentation,
    word_bound: usize,
    caps: &Caps,
) -> Result<DecompositionReport> {
    let a = gamma.ambient().clone();
    if delta.ambient() != &a {
        return Err(Error::AmbientMismatch);
    }
    let slice = enumerate_slice(gamma, word_bound, caps)?;
    let torsion = Subgroup::torsion(&a);
    let mut projections = Vec::new();
    let mut lines = Vec::new();
    let mut line_torsion = Vec::new();
    let mut blocking = None;
    let max_steps = a.free_rank() + 1;
    for _ in 0..max_steps {
        let rho = residual_of(&a, &projections)?;
        let room = rho.im().clone();
        if room.rank() == 0 {
            break;
        }
        match next_projection(&slice.elements, &rho, &room, &torsion)? {
            Some((line, line0, pi)) => {
                projections.push(pi.compose(&rho)?);
                lines.push(line);
                line_torsion.push(line0);
            }
            None => {
                blocking = Some(room);
                break;
            }
        }
    }
    let rho = residual_of(&a, &projections)?;
    let residual = rho.im().clone();
    if blocking.is_none() && residual.rank() > 0 {
        blocking = Some(residual.clone());
    }

    let mut bound = residual.clone();
    for l0 in &line_torsion {
        bound = bound.sum(l0)?;
    }
    let mut total = residual.clone();
    for l in &lines {
        total = total.sum(l)?;
    }
    let mut independent = true;
    for i in 0..lines.len() {
        let mut others = Subgroup::zero(&a);
        for (j, l) in lines.iter().enumerate() {
            if j != i {
                others = others.sum(l)?;
            }
        }
        independent &= lines[i].intersect(&others)?.is_finite();
    }
    let mut idempotent = true;
    let mut separate = true;
    let identity = BiRelation::identity(&a);
    for (pi, l0) in projections.iter().zip(&line_torsion) {
        idempotent &= pi.compose(pi)?.equivalent(pi)?;
        let rest = identity.sub_rel(pi)?;
        let meet = pi.im().intersect(rest.im())?;
        separate &= meet.is_subgroup_of(&pi.kat().sum(l0)?);
    }
    let kat = bikatakernel(gamma, delta, caps)?;
    let flat_with_delta = projections
        .iter()
        .map(|pi| {
            delta
                .generators()
                .iter()
                .map(|d| flat_commutes(d, pi).map(|v| v.holds))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionReport {
        sum_has_finite_index: total.index().is_finite(),
        lines_almost_independent: independent,
        projections_idempotent: idempotent,
        projections_separate: separate,
        bikatakernel_contained: kat.is_subgroup_of(&bound),
        bikatakernel: kat,
        bikatakernel_bound: bound,
        projections,
        lines,
        line_torsion,
        residual,
        blocking_residual: blocking,
        flat_with_delta,
    })
}

/// Finds a line of minimal rank inside `room` with a quasi-projection, trying
/// the witnesses with the smallest surjectivity defect first.
fn next_projection(
    elements: &[BiRelation],
    rho: &BiRelation,
    room: &Subgroup,
    torsion: &Subgroup,
) -> Result<Option<(Subgroup, Subgroup, BiRelation)>> {
    let mut witnesses: Vec<BiRelation> = Vec::new();
    for x in elements {
        for w in [x.clone(), x.compose(rho)?] {
            if w.kind() == Kind::Endogeny && !witnesses.contains(&w) {
                witnesses.push(w);
            }
        }
    }
    let mut lines: Vec<Subgroup> = Vec::new();
    for w in &witnesses {
        let im = w.im();
        if im.rank() > 0 && im.is_subgroup_of(room) && !lines.contains(im) {
            lines.push(im.clone());
        }
    }
    let Some(min_rank) = lines.iter().map(Subgroup::rank).min() else {
        return Ok(None);
    };
    lines.retain(|l| l.rank() == min_rank);

    let mut attempts: Vec<(Index, usize, usize)> = Vec::new();
    for (li, line) in lines.iter().enumerate() {
        let line0 = line.intersect(torsion)?;
        for (wi, w) in witnesses.iter().enumerate() {
            if w.im().is_subgroup_of(&line.sum(w.kat())?) {
                if let d @ Index::Finite(_) = surjectivity_defect(w, line, &line0)? {
                    attempts.push((d, li, wi));
                }
            }
        }
    }
    attempts.sort_by(|x, y| index_key(&x.0).cmp(&index_key(&y.0)).then((x.1, x.2).cmp(&(y.1, y.2))));
    for (_, li, wi) in attempts {
        let line0 = lines[li].intersect(torsion)?;
        if let Ok(pi) = quasi_projection(&witnesses[wi], &lines[li], &line0) {
            return Ok(Some((lines[li].clone(), line0, pi)));
        }
    }
    Ok(None)
}

fn index_key(i: &Index) -> Option<crate::lattice::Int> {
    match i {
        Index::Finite(n) => Some(n.clone()),
        Index::Infinite => None,
    }
}
