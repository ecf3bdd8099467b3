//! The suite table and the body of every suite.

use std::collections::HashSet;

use rand::Rng;
use serde_json::{json, Map, Value};

use super::corpus::{self, FieldExpectation};
use super::json as enc;
use super::random::{self, TrialRng};
use super::{Expectation, Suite, Trial};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{finite_perturbation_rank_check, FgAbGroup, Subgroup};
use crate::invariance::{
    commutant_membership, flat_commutes, is_invariant, sets_commute, CommutationKind, InvarianceMode,
};
use crate::lattice::{vector, Vector};
use crate::prering::{bikatakernel, enumerate_slice, global_domain, global_katakernel, quotient_action};
use crate::prering::{RingKind, RingPresentation};
use crate::relation::{BiRelation, Coset, Kind};
use crate::structure::{
    decompose_lines, find_lines, is_prime_power, localize_to_line, ore_witness, quasi_projection, zilber_field,
    FieldFailure, FieldOutcome,
};

pub(crate) static SUITES: &[Suite] = &[
    Suite {
        name: "L1-distributivity",
        default_trials: 300,
        expectation: Expectation::Pass,
        random: Some(distributivity_trial),
        fixed: Some(distributivity_fixed),
    },
    Suite {
        name: "L1-right-distributivity-equality",
        default_trials: 20,
        expectation: Expectation::Fail,
        random: Some(right_equality_trial),
        fixed: Some(right_equality_fixed),
    },
    Suite { name: "L2-ring", default_trials: 200, expectation: Expectation::Pass, random: Some(ring_trial), fixed: None },
    Suite {
        name: "L3-csharp",
        default_trials: 200,
        expectation: Expectation::Pass,
        random: Some(csharp_trial),
        fixed: None,
    },
    Suite {
        name: "L4-propagation",
        default_trials: 200,
        expectation: Expectation::Pass,
        random: Some(propagation_trial),
        fixed: None,
    },
    Suite {
        name: "L5/6-restriction-kat",
        default_trials: 100,
        expectation: Expectation::Pass,
        random: Some(restriction_kat_trial),
        fixed: None,
    },
    Suite { name: "L7-rank", default_trials: 500, expectation: Expectation::Pass, random: Some(rank_trial), fixed: None },
    Suite {
        name: "Q6-nearring",
        default_trials: 200,
        expectation: Expectation::Pass,
        random: Some(near_ring_trial),
        fixed: Some(near_ring_fixed),
    },
    Suite {
        name: "L13-cflat",
        default_trials: 200,
        expectation: Expectation::Pass,
        random: Some(cflat_trial),
        fixed: Some(cflat_fixed),
    },
    Suite {
        name: "L14/15-global",
        default_trials: 100,
        expectation: Expectation::Pass,
        random: Some(global_trial),
        fixed: None,
    },
    Suite {
        name: "L19-quotient",
        default_trials: 100,
        expectation: Expectation::Pass,
        random: Some(quotient_trial),
        fixed: Some(quotient_fixed),
    },
    Suite {
        name: "L10-projection",
        default_trials: 0,
        expectation: Expectation::Pass,
        random: None,
        fixed: Some(projection_fixed),
    },
    Suite { name: "Z11-field", default_trials: 0, expectation: Expectation::Pass, random: None, fixed: Some(field_fixed) },
    Suite {
        name: "S9-perturbation",
        default_trials: 200,
        expectation: Expectation::Pass,
        random: Some(perturbation_trial),
        fixed: None,
    },
    Suite { name: "A3-ore", default_trials: 0, expectation: Expectation::Pass, random: None, fixed: Some(ore_fixed) },
];

fn instance(a: &FgAbGroup, named: &[(&str, &BiRelation)]) -> Value {
    let mut m = Map::new();
    m.insert("group".into(), enc::group(a));
    for (k, r) in named {
        m.insert((*k).into(), enc::relation(r));
    }
    Value::Object(m)
}

fn with_subgroup(mut v: Value, key: &str, b: &Subgroup) -> Value {
    v[key] = enc::subgroup(b);
    v
}

fn coset(c: &Option<Coset>) -> Value {
    match c {
        Some(c) => json!({ "rep": enc::vector(&c.rep), "subgroup": enc::subgroup(&c.subgroup) }),
        None => Value::Null,
    }
}

fn subgroups(pairs: &[(&str, &Subgroup)]) -> Value {
    Value::Object(pairs.iter().map(|(k, b)| ((*k).to_string(), enc::subgroup(b))).collect())
}

/// `x ⊆ y + extra` for two cosets.
fn coset_within(x: &Coset, y: &Coset, extra: &Subgroup) -> Result<bool> {
    let room = y.subgroup.sum(extra)?;
    let diff: Vector = x.rep.iter().zip(&y.rep).map(|(p, q)| p - q).collect();
    Ok(x.subgroup.is_subgroup_of(&room) && room.contains(&diff))
}

fn whole_graph_on(d: &Subgroup) -> Result<BiRelation> {
    BiRelation::product_relation(d, &Subgroup::whole(d.ambient()))
}

/// Sum of the katakernels of all compositions of generators of length at
/// most `max_len`.
fn monomial_katakernel(a: &FgAbGroup, gens: &[BiRelation], max_len: usize) -> Result<Subgroup> {
    let mut seen: HashSet<BiRelation> = HashSet::new();
    let mut level: Vec<BiRelation> = gens.iter().filter(|g| seen.insert((*g).clone())).cloned().collect();
    let mut total = Subgroup::zero(a);
    for len in 1..=max_len {
        for w in &level {
            total = total.sum(w.kat())?;
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for g in gens {
            for w in &level {
                let c = g.compose(w)?;
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        level = next;
    }
    Ok(total)
}

fn distributivity_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 3, 144);
    let (d, f, p) = (random::endogeny(rng, &a), random::endogeny(rng, &a), random::endogeny(rng, &a));
    let inst = || instance(&a, &[("delta", &d), ("phi", &f), ("psi", &p)]);
    let left = d.compose(&f.add(&p)?)?;
    let right = d.compose(&f)?.add(&d.compose(&p)?)?;
    t.check("left distributivity holds as an equality", left == right, inst, || {
        json!({ "lhs": enc::relation(&left), "rhs": enc::relation(&right) })
    });
    let sum = f.add(&p)?;
    let kat_sum = f.kat().sum(p.kat())?;
    t.check("kat of a sum is the sum of kats", sum.kat() == &kat_sum, inst, || {
        subgroups(&[("kat", sum.kat()), ("expected", &kat_sum)])
    });
    let comp = f.compose(&p)?;
    let kat_comp = f.apply(p.kat())?;
    t.check("kat of a composite is the image of the inner kat", comp.kat() == &kat_comp, inst, || {
        subgroups(&[("kat", comp.kat()), ("expected", &kat_comp)])
    });
    let split = f.compose(&d)?.add(&p.compose(&d)?)?;
    let joined = sum.compose(&d)?;
    let slack = f.apply(d.kat())?;
    for _ in 0..20 {
        let x = random::element(rng, &a, 4);
        let (l, r) = (split.eval(&x), joined.eval(&x));
        let ok = match (&l, &r) {
            (Some(l), Some(r)) => coset_within(l, r, &slack)?,
            _ => false,
        };
        t.check("right distributivity holds up to the image of kat delta", ok, inst, || {
            json!({ "point": enc::vector(&x), "lhs": coset(&l), "rhs": coset(&r) })
        });
    }
    Ok(())
}

fn distributivity_fixed(_caps: &Caps, t: &mut Trial) -> Result<()> {
    let c = corpus::right_distributivity_counterexample();
    let split = c.phi.compose(&c.delta)?.add(&c.psi.compose(&c.delta)?)?;
    let joined = c.phi.add(&c.psi)?.compose(&c.delta)?;
    let (l, r) = (split.eval(&c.point), joined.eval(&c.point));
    let slack = c.phi.apply(c.delta.kat())?;
    let (Some(lc), Some(rc)) = (&l, &r) else {
        return Err(Error::Precondition("stored point left the domain".into()));
    };
    let inst = || instance(&c.ambient, &[("delta", &c.delta), ("phi", &c.phi), ("psi", &c.psi)]);
    let wit = || json!({ "lhs": coset(&l), "rhs": coset(&r) });
    t.check("stored instance satisfies the containment", coset_within(lc, rc, &slack)?, inst, wit);
    t.check("stored instance breaks equality", lc != rc, inst, wit);
    Ok(())
}

fn right_equality_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 2, 36);
    let (d, f, p) = (random::endogeny(rng, &a), random::endogeny(rng, &a), random::endogeny(rng, &a));
    let split = f.compose(&d)?.add(&p.compose(&d)?)?;
    let joined = f.add(&p)?.compose(&d)?;
    for _ in 0..3 {
        let x = random::element(rng, &a, 3);
        let (l, r) = (split.eval(&x), joined.eval(&x));
        t.check(
            "right distributivity holds as an equality",
            l == r,
            || instance(&a, &[("delta", &d), ("phi", &f), ("psi", &p)]),
            || json!({ "point": enc::vector(&x), "lhs": coset(&l), "rhs": coset(&r) }),
        );
    }
    Ok(())
}

fn right_equality_fixed(_caps: &Caps, t: &mut Trial) -> Result<()> {
    let c = corpus::right_distributivity_counterexample();
    let split = c.phi.compose(&c.delta)?.add(&c.psi.compose(&c.delta)?)?;
    let joined = c.phi.add(&c.psi)?.compose(&c.delta)?;
    let (l, r) = (split.eval(&c.point), joined.eval(&c.point));
    t.check(
        "right distributivity holds as an equality",
        l == r,
        || instance(&c.ambient, &[("delta", &c.delta), ("phi", &c.phi), ("psi", &c.psi)]),
        || json!({ "point": enc::vector(&c.point), "lhs": coset(&l), "rhs": coset(&r) }),
    );
    Ok(())
}

fn ring_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 3, 144);
    let (f, p, d) = (random::endogeny(rng, &a), random::endogeny(rng, &a), random::endogeny(rng, &a));
    let f2 = f.add(&random::finite_perturbation(rng, &a))?;
    let p2 = p.add(&random::finite_perturbation(rng, &a))?;
    let inst = || instance(&a, &[("phi", &f), ("phi_perturbed", &f2), ("psi", &p), ("psi_perturbed", &p2)]);
    let pairs = [
        ("equivalence survives a finite perturbation", f.clone(), f2.clone()),
        ("equivalence is compatible with sums", f.add(&p)?, f2.add(&p2)?),
        ("equivalence is compatible with composition", f.compose(&p)?, f2.compose(&p2)?),
        ("equivalence is compatible with composition", p.compose(&f)?, p2.compose(&f2)?),
        ("equivalence is compatible with negation", f.neg(), f2.neg()),
        ("right distributivity holds up to equivalence", f.add(&p)?.compose(&d)?, f.compose(&d)?.add(&p.compose(&d)?)?),
    ];
    for (claim, x, y) in &pairs {
        t.check(claim, x.equivalent(y)?, inst, || json!({ "lhs": enc::relation(x), "rhs": enc::relation(y) }));
    }
    let h = if rng.gen_bool(0.5) { random::homomorphism(rng, &a) } else { random::finite_perturbation(rng, &a) };
    let shifted = f.add(&h)?;
    t.check(
        "adding h preserves the class exactly when h has finite image",
        f.equivalent(&shifted)? == h.im().is_finite(),
        || instance(&a, &[("phi", &f), ("h", &h)]),
        || Value::Null,
    );
    Ok(())
}

fn csharp_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 3, 144);
    let g = random::endogeny(rng, &a);
    let gens = vec![g.clone()];
    let pool = random::commuting_pool(&a, &g);
    let (f, p) = (random::pool_element(rng, &pool), random::pool_element(rng, &pool));
    let member = |x: &BiRelation| commutant_membership(x, &gens, CommutationKind::Sharp);
    if !member(&f)? || !member(&p)? {
        return Ok(());
    }
    let inst = || instance(&a, &[("gamma", &g), ("phi", &f), ("psi", &p)]);
    for (claim, x) in [
        ("sharp commutant is closed under sums", f.add(&p)?),
        ("sharp commutant is closed under negation", f.neg()),
        ("sharp commutant is closed under composition", f.compose(&p)?),
        ("sharp commutant is closed under composition", p.compose(&f)?),
    ] {
        t.check(claim, member(&x)?, inst, || enc::relation(&x));
    }
    Ok(())
}

fn propagation_subgroup(rng: &mut TrialRng, a: &FgAbGroup, pool: &[BiRelation]) -> Subgroup {
    match rng.gen_range(0..3) {
        0 => random::pool_element(rng, pool).im().clone(),
        1 => random::pool_element(rng, pool).ker().clone(),
        _ => random::subgroup(rng, a, 2),
    }
}

fn propagation_trial(rng: &mut TrialRng, caps: &Caps, t: &mut Trial) -> Result<()> {
    let index = t.index.unwrap_or(0);
    let a = random::group(rng, 3, 144);
    let g = random::endogeny(rng, &a);
    let gens = vec![g.clone()];
    let pool = random::commuting_pool(&a, &g);
    let d = random::pool_element(rng, &pool);
    let b = propagation_subgroup(rng, &a, &pool);
    if commutant_membership(&d, &gens, CommutationKind::Sharp)? {
        let image = d.apply(&b)?;
        for mode in [InvarianceMode::Weak, InvarianceMode::Almost] {
            if is_invariant(&b, &gens, mode)? {
                t.check(
                    &format!("{mode:?} invariance passes to the image under a commuting relation"),
                    is_invariant(&image, &gens, mode)?,
                    || with_subgroup(instance(&a, &[("gamma", &g), ("delta", &d)]), "subgroup", &b),
                    || enc::subgroup(&image),
                );
            }
        }
    }
    if index < 50 && is_invariant(&b, &gens, InvarianceMode::Weak)? {
        let slice = enumerate_slice(&RingPresentation::pre_ring(&a, gens.clone())?, 4, caps)?;
        for e in &slice.elements {
            t.check(
                "weak invariance under generators extends to the generated ring",
                is_invariant(&b, std::slice::from_ref(e), InvarianceMode::Weak)?,
                || with_subgroup(instance(&a, &[("gamma", &g)]), "subgroup", &b),
                || enc::relation(e),
            );
        }
    }
    Ok(())
}

fn restriction_kat_trial(rng: &mut TrialRng, caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 3, 144);
    let phi = random::relation(rng, &a);
    let b = match rng.gen_range(0..3) {
        0 => random::subgroup(rng, &a, 2),
        1 => random::homomorphism(rng, &a).im().clone(),
        _ => random::homomorphism(rng, &a).ker().clone(),
    };
    let mode = if phi.is_total() { InvarianceMode::Weak } else { InvarianceMode::Almost };
    let legal = is_invariant(&b, std::slice::from_ref(&phi), mode)?;
    let restricted = match phi.restrict_corestrict(&b) {
        Ok(r) => Some(r),
        Err(Error::IllegalRestriction { .. }) => None,
        Err(e) => return Err(e),
    };
    let inst = || with_subgroup(instance(&a, &[("phi", &phi)]), "subgroup", &b);
    t.check("restriction is legal exactly under the invariance precondition", restricted.is_some() == legal, inst, || {
        json!({ "legal": legal, "accepted": restricted.is_some() })
    });
    if let Some(r) = &restricted {
        let ok = if phi.kind() == Kind::Endogeny { r.kind() == Kind::Endogeny } else { r.kind() != Kind::Neither };
        t.check("restriction keeps the kind", ok, inst, || enc::relation(r));
    }

    let small = random::group(rng, 2, 64);
    let count = rng.gen_range(1..=3);
    let gens: Vec<BiRelation> = (0..count).map(|_| random::endogeny(rng, &small)).collect();
    let ring = RingPresentation::pre_ring(&small, gens.clone())?;
    let kat = global_katakernel(&ring, caps)?;
    let oracle = monomial_katakernel(&small, &gens, 6)?;
    let named: Vec<(String, &BiRelation)> = gens.iter().enumerate().map(|(i, g)| (format!("gamma{i}"), g)).collect();
    let named: Vec<(&str, &BiRelation)> = named.iter().map(|(k, g)| (k.as_str(), *g)).collect();
    let inst = || instance(&small, &named);
    t.check("global katakernel matches the monomial sum", kat == oracle, inst, || {
        subgroups(&[("computed", &kat), ("monomials", &oracle)])
    });

    let g = gens[0].clone();
    let pool = random::commuting_pool(&small, &g);
    let gamma = RingPresentation::pre_ring(&small, vec![g.clone()])?;
    let mut delta_gens = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let d = random::pool_element(rng, &pool);
        if d.kind() == Kind::Endogeny && commutant_membership(&d, gamma.generators(), CommutationKind::Sharp)? {
            delta_gens.push(d);
        }
    }
    if delta_gens.is_empty() {
        return Ok(());
    }
    let delta = RingPresentation::pre_ring(&small, delta_gens.clone())?;
    let mut named = vec![("gamma", &g)];
    named.extend(delta_gens.iter().map(|d| ("delta", d)));
    let inst = || instance(&small, &named);
    let kg = global_katakernel(&gamma, caps)?;
    t.check(
        "kat of a ring is invariant under it",
        is_invariant(&kg, gamma.generators(), InvarianceMode::Invariant)?,
        inst,
        || enc::subgroup(&kg),
    );
    t.check(
        "kat of a ring is weakly invariant under a commuting ring",
        is_invariant(&kg, &delta_gens, InvarianceMode::Weak)?,
        inst,
        || enc::subgroup(&kg),
    );
    let bk = bikatakernel(&gamma, &delta, caps)?;
    let both: Vec<BiRelation> = gamma.generators().iter().chain(&delta_gens).cloned().collect();
    t.check("bikatakernel is invariant under both rings", is_invariant(&bk, &both, InvarianceMode::Invariant)?, inst, || {
        enc::subgroup(&bk)
    });
    let torsion_side = bk.sum(&Subgroup::torsion(&small))?;
    for a0 in [bk.clone(), torsion_side] {
        if !is_invariant(&a0, &delta_gens, InvarianceMode::Weak)? {
            continue;
        }
        let pre = g.preimage(&a0)?;
        t.check(
            "preimage of a weakly invariant subgroup over the bikatakernel stays weakly invariant",
            is_invariant(&pre, &delta_gens, InvarianceMode::Weak)?,
            || with_subgroup(inst(), "subgroup", &a0),
            || enc::subgroup(&pre),
        );
    }
    Ok(())
}

fn rank_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 4, 144);
    let phi = random::relation(rng, &a);
    let inst = || instance(&a, &[("phi", &phi)]);
    let (im, ker, dom) = (phi.im().rank(), phi.ker().rank(), phi.dom().rank());
    t.check("rank of the domain splits into image and kernel", dom == im + ker, inst, || {
        json!({ "dom": dom, "im": im, "ker": ker })
    });
    let b = random::subgroup(rng, &a, 3);
    let image = phi.apply(&b)?;
    let kernel_part = phi.ker().intersect(&b)?;
    t.check(
        "rank of a subgroup splits into image and kernel part",
        b.rank() == image.rank() + kernel_part.rank(),
        || with_subgroup(inst(), "subgroup", &b),
        || json!({ "b": b.rank(), "image": image.rank(), "kernel": kernel_part.rank() }),
    );
    Ok(())
}

fn near_ring_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 3, 144);
    let (f, p, g) = (random::relation(rng, &a), random::relation(rng, &a), random::relation(rng, &a));
    let inst = || instance(&a, &[("phi", &f), ("psi", &p), ("gamma", &g)]);
    let rel_pair = |x: &BiRelation, y: &BiRelation| json!({ "lhs": enc::relation(x), "rhs": enc::relation(y) });
    let sum = f.add(&p)?;
    let comp = f.compose(&p)?;
    let expected = [
        ("domain of a sum", sum.dom().clone(), f.dom().intersect(p.dom())?),
        ("kat of a sum", sum.kat().clone(), f.kat().sum(p.kat())?),
        ("domain of a composite", comp.dom().clone(), p.preimage(f.dom())?),
        ("kat of a composite", comp.kat().clone(), f.apply(p.kat())?),
    ];
    for (claim, got, want) in &expected {
        t.check(claim, got == want, inst, || subgroups(&[("computed", got), ("expected", want)]));
    }
    t.check("classes are closed under sums", sum.kind() != Kind::Neither, inst, || enc::relation(&sum));
    t.check("classes are closed under composition", comp.kind() != Kind::Neither, inst, || enc::relation(&comp));
    let (l, r) = (f.compose(&p)?.compose(&g)?, f.compose(&p.compose(&g)?)?);
    t.check("composition is associative", l == r, inst, || rel_pair(&l, &r));
    let (l, r) = (f.add(&p)?.add(&g)?, f.add(&p.add(&g)?)?);
    t.check("addition is associative", l == r, inst, || rel_pair(&l, &r));
    let (l, r) = (f.add(&p)?, p.add(&f)?);
    t.check("addition is commutative", l == r, inst, || rel_pair(&l, &r));
    let id = BiRelation::identity(&a);
    for (l, claim) in [
        (id.compose(&f)?, "identity is a left unit"),
        (f.compose(&id)?, "identity is a right unit"),
        (f.add(&BiRelation::zero(&a))?, "zero is an additive unit"),
    ] {
        t.check(claim, l == f, inst, || rel_pair(&l, &f));
    }
    conditional_distributivity(t, &a, &p, &f, &g)
}

/// When `kat φ ⊆ Dom ψ`, `ψ(φ + γ)` and `ψφ + ψγ` have the same katakernel
/// and agree on their common domain.
fn conditional_distributivity(
    t: &mut Trial,
    a: &FgAbGroup,
    psi: &BiRelation,
    phi: &BiRelation,
    gamma: &BiRelation,
) -> Result<()> {
    if !(phi.kat().is_subgroup_of(psi.dom()) || gamma.kat().is_subgroup_of(psi.dom())) {
        return Ok(());
    }
    let inst = || instance(a, &[("psi", psi), ("phi", phi), ("gamma", gamma)]);
    let joined = psi.compose(&phi.add(gamma)?)?;
    let split = psi.compose(phi)?.add(&psi.compose(gamma)?)?;
    t.check("conditional distributivity keeps the katakernel", joined.kat() == split.kat(), inst, || {
        subgroups(&[("lhs", joined.kat()), ("rhs", split.kat())])
    });
    let common = whole_graph_on(&joined.dom().intersect(split.dom())?)?;
    let (l, r) = (joined.meet(&common)?, split.meet(&common)?);
    t.check("conditional distributivity holds on the common domain", l == r, inst, || {
        json!({ "lhs": enc::relation(&l), "rhs": enc::relation(&r) })
    });
    Ok(())
}

fn near_ring_fixed(_caps: &Caps, t: &mut Trial) -> Result<()> {
    let c = corpus::near_ring_distributivity_counterexample();
    conditional_distributivity(t, &c.ambient, &c.psi, &c.phi, &c.gamma)?;
    let joined = c.psi.compose(&c.phi.add(&c.gamma)?)?;
    let split = c.psi.compose(&c.phi)?.add(&c.psi.compose(&c.gamma)?)?;
    t.check(
        "stored instance has different domains",
        joined.dom() != split.dom(),
        || instance(&c.ambient, &[("psi", &c.psi), ("phi", &c.phi), ("gamma", &c.gamma)]),
        || subgroups(&[("lhs", joined.dom()), ("rhs", split.dom())]),
    );
    Ok(())
}

fn cflat_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 3, 144);
    let g = random::relation(rng, &a);
    let gens = vec![g.clone()];
    let pool = random::commuting_pool(&a, &g);
    let (f, p) = (random::pool_element(rng, &pool), random::pool_element(rng, &pool));
    let member = |x: &BiRelation| commutant_membership(x, &gens, CommutationKind::Flat);
    let inst = || instance(&a, &[("gamma", &g), ("phi", &f), ("psi", &p)]);
    let f_in = member(&f)?;
    if f_in {
        let room = f.kat().sum(g.kat())?;
        let (x, y) = (g.apply(f.kat())?, f.apply(g.kat())?);
        t.check("each moves the other's kat into the sum of kats", x.is_subgroup_of(&room) && y.is_subgroup_of(&room), inst, || {
            subgroups(&[("gamma_of_kat", &x), ("phi_of_kat", &y), ("kats", &room)])
        });
    }
    if !f_in || !member(&p)? {
        return Ok(());
    }
    let mut closed = vec![
        ("flat commutant is closed under sums", f.add(&p)?),
        ("flat commutant is closed under composition", f.compose(&p)?),
        ("flat commutant is closed under composition", p.compose(&f)?),
    ];
    if f.is_total() {
        closed.push(("flat commutant is closed under negation", f.neg()));
    }
    for (claim, x) in closed {
        t.check(claim, member(&x)?, inst, || enc::relation(&x));
    }
    Ok(())
}

fn cflat_fixed(_caps: &Caps, t: &mut Trial) -> Result<()> {
    let (h, e) = corpus::flat_failure();
    let v = flat_commutes(&h, &e)?;
    t.check(
        "stored pair fails flat commutation",
        !v.holds,
        || instance(h.ambient(), &[("delta", &h), ("gamma", &e)]),
        || Value::Null,
    );
    Ok(())
}

fn global_trial(rng: &mut TrialRng, caps: &Caps, t: &mut Trial) -> Result<()> {
    let finite = rng.gen_bool(0.5);
    let a = random::group(rng, if finite { 0 } else { 2 }, 72);
    let count = rng.gen_range(1..=2);
    let gens: Vec<BiRelation> = (0..count)
        .map(|_| if finite { random::partial(rng, &a) } else { random::endogeny(rng, &a) })
        .collect();
    let ring = RingPresentation::near_ring(&a, gens.clone())?;
    let gd = global_domain(&ring, 3, caps)?;
    if gd.exact {
        let slice = enumerate_slice(&ring, 3, caps)?;
        let named: Vec<(&str, &BiRelation)> = gens.iter().map(|g| ("generator", g)).collect();
        for e in &slice.elements {
            let moved = e.apply(&gd.domain)?;
            let room = gd.domain.sum(e.kat())?;
            t.check(
                "elements map the global domain into itself up to kat",
                moved.is_subgroup_of(&room),
                || with_subgroup(instance(&a, &named), "domain", &gd.domain),
                || json!({ "element": enc::relation(e), "image": enc::subgroup(&moved) }),
            );
        }
    }

    let b = random::group(rng, 2, 72);
    let g = random::relation(rng, &b);
    let gamma = RingPresentation::near_ring(&b, vec![g.clone()])?;
    let pool = random::commuting_pool(&b, &g);
    let mut delta_gens = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let d = random::pool_element(rng, &pool);
        if commutant_membership(&d, gamma.generators(), CommutationKind::Flat)? {
            delta_gens.push(d);
        }
    }
    if delta_gens.is_empty() {
        return Ok(());
    }
    let delta = RingPresentation::near_ring(&b, delta_gens.clone())?;
    let mut named = vec![("gamma", &g)];
    named.extend(delta_gens.iter().map(|d| ("delta", d)));
    let inst = || instance(&b, &named);
    let bk = bikatakernel(&gamma, &delta, caps)?;
    let both: Vec<BiRelation> = gamma.generators().iter().chain(&delta_gens).cloned().collect();
    t.check("bikatakernel of flat rings is invariant", is_invariant(&bk, &both, InvarianceMode::Invariant)?, inst, || {
        enc::subgroup(&bk)
    });
    for d in &delta_gens {
        let pre = d.preimage(&bk)?;
        t.check(
            "preimage of the bikatakernel is invariant",
            is_invariant(&pre, gamma.generators(), InvarianceMode::Invariant)?,
            inst,
            || json!({ "delta": enc::relation(d), "preimage": enc::subgroup(&pre) }),
        );
    }
    Ok(())
}

fn torsion_group(rng: &mut TrialRng) -> FgAbGroup {
    loop {
        let a = random::group(rng, 2, 72);
        if !a.torsion_factors().is_empty() {
            return a;
        }
    }
}

/// Equivalence of slice elements before and after the projection, and the
/// behaviour of the projection on sums and composites.
fn quotient_consistency(t: &mut Trial, ring: &RingPresentation, b: &Subgroup, caps: &Caps) -> Result<()> {
    let q = quotient_action(ring, b)?;
    let slice = enumerate_slice(ring, 2, caps)?;
    let elems: Vec<&BiRelation> = slice.elements.iter().take(10).collect();
    let named: Vec<(&str, &BiRelation)> = ring.generators().iter().map(|g| ("generator", g)).collect();
    let inst = || with_subgroup(instance(ring.ambient(), &named), "subgroup", b);
    let total = ring.generators().iter().all(BiRelation::is_total);
    for x in &elems {
        for y in &elems {
            let (px, py) = (q.push(x), q.push(y));
            let pair = || json!({ "x": enc::relation(x), "y": enc::relation(y) });
            t.check("equivalence is preserved and reflected by the quotient", x.equivalent(y)? == px.equivalent(&py)?, inst, pair);
            let (s, c) = (q.push(&x.add(y)?), q.push(&x.compose(y)?));
            let (s2, c2) = (px.add(&py)?, px.compose(&py)?);
            t.check("the quotient respects sums up to equivalence", s.equivalent(&s2)?, inst, pair);
            t.check("the quotient respects composition up to equivalence", c.equivalent(&c2)?, inst, pair);
            if total {
                t.check("the quotient respects sums of total elements", s == s2, inst, pair);
                t.check("the quotient respects composition of total elements", c == c2, inst, pair);
            }
        }
    }
    Ok(())
}

fn quotient_trial(rng: &mut TrialRng, caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = torsion_group(rng);
    let count = rng.gen_range(1..=2);
    let gens: Vec<BiRelation> = (0..count)
        .map(|_| if a.is_finite() && rng.gen_bool(0.5) { random::partial(rng, &a) } else { random::relation(rng, &a) })
        .collect();
    let ring = RingPresentation::near_ring(&a, gens.clone())?;
    let b = random::finite_subgroup(rng, &a);
    let invariant = is_invariant(&b, &gens, InvarianceMode::Invariant)?;
    let accepted = match quotient_action(&ring, &b) {
        Ok(_) => true,
        Err(Error::NotInvariant { .. }) => false,
        Err(e) => return Err(e),
    };
    let named: Vec<(&str, &BiRelation)> = gens.iter().map(|g| ("generator", g)).collect();
    t.check(
        "the quotient is accepted exactly for invariant subgroups",
        accepted == invariant,
        || with_subgroup(instance(&a, &named), "subgroup", &b),
        || json!({ "invariant": invariant, "accepted": accepted }),
    );
    if accepted {
        quotient_consistency(t, &ring, &b, caps)?;
    }
    Ok(())
}

fn quotient_fixed(caps: &Caps, t: &mut Trial) -> Result<()> {
    for case in corpus::quotient_cases() {
        let accepted = match quotient_action(&case.ring, &case.subgroup) {
            Ok(_) => true,
            Err(Error::NotInvariant { .. }) => false,
            Err(e) => return Err(e),
        };
        t.check(
            "curated quotient is accepted as recorded",
            accepted == case.accepted,
            || json!({ "case": case.name }),
            || json!({ "accepted": accepted }),
        );
        if accepted {
            quotient_consistency(t, &case.ring, &case.subgroup, caps)?;
        }
    }
    Ok(())
}

fn projection_fixed(caps: &Caps, t: &mut Trial) -> Result<()> {
    let z2 = FgAbGroup::free(2);
    let e11 = BiRelation::from_i64_matrix(&z2, &[&[1, 0], &[0, 0]])?;
    let axis = Subgroup::generated(&z2, &[vector(&[1, 0])])?;
    let pi = quasi_projection(&e11, &axis, &Subgroup::zero(&z2))?;
    t.check("a coordinate projection is its own quasi-projection", pi == e11, || json!({ "case": "e11" }), || {
        enc::relation(&pi)
    });
    let z = FgAbGroup::free(1);
    let doubling = BiRelation::scalar(&z, 2);
    let refused = matches!(
        quasi_projection(&doubling, &Subgroup::whole(&z), &Subgroup::zero(&z)),
        Err(Error::NotAProjection(_))
    );
    t.check("doubling is refused as a projection witness", refused, || json!({ "case": "doubling" }), || Value::Null);

    for case in corpus::projection_cases() {
        let name = case.name;
        let inst = || json!({ "case": name });
        let report = decompose_lines(&case.gamma, &case.delta, case.word_bound, caps)?;
        let flags = json!({
            "complete": report.is_complete(),
            "finite_index": report.sum_has_finite_index,
            "almost_independent": report.lines_almost_independent,
            "idempotent": report.projections_idempotent,
            "separate": report.projections_separate,
            "bikatakernel_contained": report.bikatakernel_contained,
            "lines": report.lines.len(),
        });
        t.check("decomposition finishes with every property", report.holds(), inst, || flags.clone());
        t.check("decomposition finds the recorded number of lines", report.lines.len() == case.lines, inst, || {
            flags.clone()
        });
        let commuting = sets_commute(case.gamma.generators(), case.delta.generators(), CommutationKind::Sharp)?;
        if commuting {
            t.check(
                "projections flat-commute with the commuting ring",
                report.flat_with_delta.iter().flatten().all(|&b| b),
                inst,
                || json!(report.flat_with_delta),
            );
        }
        let id = BiRelation::identity(case.gamma.ambient());
        for ((pi, line), line0) in report.projections.iter().zip(&report.lines).zip(&report.line_torsion) {
            let wit = || json!({ "projection": enc::relation(pi), "line": enc::subgroup(line) });
            t.check("each projection is total", pi.is_total(), inst, wit);
            t.check("each projection lands in its line", pi.im().is_subgroup_of(line), inst, wit);
            t.check("each projection fixes its line", line.basis().iter().all(|l| pi.contains_pair(l, l)), inst, wit);
            let drift = pi.sub_rel(&id)?.apply(line)?;
            t.check("a projection moves its line only inside the torsion part", drift.is_subgroup_of(line0), inst, wit);
            let defect = pi.compose(pi)?.sub_rel(pi)?;
            t.check("a projection is idempotent up to the torsion part", defect.im().is_subgroup_of(line0), inst, wit);
        }
        let certs = find_lines(&case.gamma, case.word_bound, caps)?;
        let slice = enumerate_slice(&case.gamma, case.word_bound.min(2), caps)?;
        for cert in &certs {
            let line = &cert.line;
            if commuting {
                t.check(
                    "lines are weakly invariant under the commuting ring",
                    is_invariant(line, case.delta.generators(), InvarianceMode::Weak)?,
                    inst,
                    || enc::subgroup(line),
                );
                // The slice may hold no element acting nontrivially on a line.
                match localize_to_line(&case.gamma, &case.delta, cert, case.word_bound, caps) {
                    Ok(local) => {
                        t.check("localized rings still commute", local.sharply_commute, inst, || enc::subgroup(line))
                    }
                    Err(Error::Precondition(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            for e in &slice.elements {
                let collapses = e.apply(line)?.rank() == 0;
                let injective = e.ker().intersect(line)?.rank() == 0;
                t.check("ring elements either kill a line or are injective on it", collapses || injective, inst, || {
                    json!({ "element": enc::relation(e), "line": enc::subgroup(line) })
                });
            }
        }
        let ranks: HashSet<usize> = certs.iter().map(|c| c.line.rank()).collect();
        t.check("all lines have the same rank", ranks.len() <= 1, inst, || json!(ranks.into_iter().collect::<Vec<_>>()));
    }
    Ok(())
}

fn field_fixed(caps: &Caps, t: &mut Trial) -> Result<()> {
    for case in corpus::field_cases() {
        let name = case.name;
        let inst = || json!({ "case": name });
        let outcome = zilber_field(&case.ambient, &case.generators, caps)?;
        match (case.expected, &outcome) {
            (FieldExpectation::Order(n), FieldOutcome::Field(table)) => {
                t.check("reconstructed field has the expected order", table.order == n, inst, || json!(table.order));
                t.check("field axioms hold", table.satisfies_field_axioms(), inst, || Value::Null);
                t.check("field action intertwines the module", table.intertwines(), inst, || Value::Null);
                t.check("field order is a prime power", is_prime_power(table.order), inst, || json!(table.order));
            }
            (FieldExpectation::NotMinimal, FieldOutcome::Failure(FieldFailure::NotMinimal { .. })) => {
                t.check("non-minimal module is reported", true, inst, || Value::Null);
            }
            (_, other) => {
                t.check("field reconstruction gives the recorded outcome", false, inst, || json!(format!("{other:?}")));
            }
        }
    }
    Ok(())
}

fn perturbation_trial(rng: &mut TrialRng, _caps: &Caps, t: &mut Trial) -> Result<()> {
    let a = random::group(rng, 4, 144);
    let (b1, b2) = (random::subgroup(rng, &a, 3), random::subgroup(rng, &a, 3));
    let c = random::finite_subgroup(rng, &a);
    t.check(
        "a finite perturbation does not change the rank of an intersection",
        finite_perturbation_rank_check(&b1, &b2, &c)?,
        || json!({ "group": enc::group(&a), "b1": enc::subgroup(&b1), "b2": enc::subgroup(&b2), "c": enc::subgroup(&c) }),
        || Value::Null,
    );
    Ok(())
}

fn ore_fixed(caps: &Caps, t: &mut Trial) -> Result<()> {
    let f4 = FgAbGroup::new(0, &[2, 2])?;
    let g = BiRelation::from_i64_matrix(&f4, &[&[0, 1], &[1, 1]])?;
    let mut rings = corpus::ore_rings();
    rings.push(("F4", RingPresentation::new(&f4, vec![g], RingKind::PreRing, true)?, 2));
    for (name, ring, bound) in rings {
        let slice = enumerate_slice(&ring, bound, caps)?;
        let zero = BiRelation::zero(ring.ambient());
        let nonzero: Vec<&BiRelation> = slice.elements.iter().filter(|e| **e != zero).take(12).collect();
        for x in &nonzero {
            for y in &nonzero {
                let found = ore_witness(x, y, &slice)?;
                let ok = match &found {
                    Some((s, s2)) => {
                        let v = x.compose(s)?;
                        v != zero && v == y.compose(s2)?
                    }
                    None => false,
                };
                t.check(
                    "nonzero elements have a common nonzero right multiple",
                    ok,
                    || json!({ "case": name }),
                    || json!({ "x": enc::relation(x), "y": enc::relation(y) }),
                );
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: HashSet<&str> = SUITES.iter().map(|s| s.name).collect();
        assert_eq!(names.len(), SUITES.len());
    }

    #[test]
    fn monomial_oracle_on_a_constant() {
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let c = BiRelation::constant_to_subgroup(&a, &Subgroup::torsion(&a)).unwrap();
        assert_eq!(monomial_katakernel(&a, &[c], 3).unwrap(), Subgroup::torsion(&a));
    }
}
