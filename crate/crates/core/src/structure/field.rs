//! Field reconstruction for a minimal finite module of an abelian group of
//! automorphisms, and almost-centralizers.

use std::collections::HashMap;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{torsion_and_finite_lattice, FgAbGroup, Subgroup};
use crate::invariance::{is_invariant, InvarianceMode};
use crate::lattice::Vector;
use crate::relation::{BiRelation, Kind};

/// A finite field realised as a ring of endomorphisms of `A`.
#[derive(Clone, Debug)]
pub struct FieldTable {
    pub order: usize,
    pub elements: Vec<BiRelation>,
    pub zero: usize,
    pub one: usize,
    pub add_table: Vec<Vec<usize>>,
    pub mul_table: Vec<Vec<usize>>,
    /// The fixed nonzero point `a0`; element `k` corresponds to `k[a0]`.
    pub base_point: Vector,
    pub module_iso: Vec<Vector>,
    pub generators: Vec<BiRelation>,
    /// Position of each generator among `elements`.
    pub generator_indices: Vec<usize>,
}

impl FieldTable {
    /// Checks every field axiom on the tables.
    pub fn satisfies_field_axioms(&self) -> bool {
        let n = self.order;
        let (add, mul) = (&self.add_table, &self.mul_table);
        let all = 0..n;
        for x in all.clone() {
            if add[x][self.zero] != x || mul[x][self.one] != x || mul[self.one][x] != x {
                return false;
            }
            if !(0..n).any(|y| add[x][y] == self.zero) {
                return false;
            }
            if x != self.zero && !(0..n).any(|y| mul[x][y] == self.one) {
                return false;
            }
            for y in 0..n {
                if add[x][y] != add[y][x] || mul[x][y] != mul[y][x] {
                    return false;
                }
                for z in 0..n {
                    if add[add[x][y]][z] != add[x][add[y][z]]
                        || mul[mul[x][y]][z] != mul[x][mul[y][z]]
                        || mul[x][add[y][z]] != add[mul[x][y]][mul[x][z]]
                    {
                        return false;
                    }
                }
            }
        }
        self.zero != self.one && is_prime_power(n)
    }

    /// Whether `k ↦ k[a0]` carries multiplication by each generator to the
    /// generator's action on `A`.
    pub fn intertwines(&self) -> bool {
        self.generators.iter().zip(&self.generator_indices).all(|(g, &gi)| {
            (0..self.order).all(|k| match g.eval(&self.module_iso[k]) {
                Some(v) => v.rep == self.module_iso[self.mul_table[gi][k]],
                None => false,
            })
        })
    }
}

pub fn is_prime_power(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|p| n.is_multiple_of(*p)).expect("n >= 2");
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Which hypothesis of the reconstruction failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldFailure {
    /// A nontrivial proper subgroup invariant under every generator.
    NotMinimal { subgroup: Vec<Vector> },
    ZeroDivisor { element: usize },
    Noncommutative { left: usize, right: usize },
    /// `k ↦ k[a0]` is not a bijection onto `A`.
    NotCyclicModule,
}

#[derive(Clone, Debug)]
pub enum FieldOutcome {
    Field(FieldTable),
    Failure(FieldFailure),
}

impl FieldOutcome {
    pub fn field(&self) -> Option<&FieldTable> {
        match self {
            FieldOutcome::Field(t) => Some(t),
            FieldOutcome::Failure(_) => None,
        }
    }
}

fn is_automorphism(g: &BiRelation) -> bool {
    g.kind() == Kind::Endogeny
        && g.is_total()
        && g.kat().is_zero()
        && g.ker().is_zero()
        && g.im() == &Subgroup::whole(g.ambient())
}

/// Closure of `seeds` under addition and composition.
fn ring_closure(seeds: Vec<BiRelation>, caps: &Caps) -> Result<Vec<BiRelation>> {
    let mut elements: Vec<BiRelation> = Vec::new();
    let mut index: HashMap<BiRelation, usize> = HashMap::new();
    for s in seeds {
        if !index.contains_key(&s) {
            index.insert(s.clone(), elements.len());
            elements.push(s);
        }
    }
    let mut done = 0;
    while done < elements.len() {
        let frontier = elements.len();
        for i in 0..frontier {
            for j in 0..frontier {
                if i < done && j < done {
                    continue;
                }
                for v in [elements[i].add(&elements[j])?, elements[i].compose(&elements[j])?] {
                    if !index.contains_key(&v) {
                        if elements.len() as u64 >= caps.slice_elements {
                            return Err(Error::EnumerationTooLarge { what: "ring closure", cap: caps.slice_elements });
                        }
                        index.insert(v.clone(), elements.len());
                        elements.push(v);
                    }
                }
            }
        }
        done = frontier;
    }
    Ok(elements)
}

/// Builds the ring generated by an abelian group of automorphisms of a
/// finite group and checks that it is a field acting simply transitively on
/// the nonzero points.
pub fn zilber_field(a: &FgAbGroup, generators: &[BiRelation], caps: &Caps) -> Result<FieldOutcome> {
    if !a.is_finite() {
        return Err(Error::Precondition("the module must be finite".into()));
    }
    if a.order().is_some_and(|o| o < 2.into()) {
        return Err(Error::Precondition("the module must be nontrivial".into()));
    }
    for (i, g) in generators.iter().enumerate() {
        if g.ambient() != a {
            return Err(Error::AmbientMismatch);
        }
        if !is_automorphism(g) {
            return Err(Error::Precondition(format!("generator {i} is not an automorphism")));
        }
    }
    for (i, g) in generators.iter().enumerate() {
        for (j, h) in generators.iter().enumerate().skip(i + 1) {
            if g.compose(h)? != h.compose(g)? {
                return Err(Error::Precondition(format!("generators {i} and {j} do not commute")));
            }
        }
    }

    let (_, lattice) = torsion_and_finite_lattice(a, caps)?;
    let whole = Subgroup::whole(a);
    for s in &lattice {
        if !s.is_zero() && s != &whole && is_invariant(s, generators, InvarianceMode::Invariant)? {
            return Ok(FieldOutcome::Failure(FieldFailure::NotMinimal { subgroup: s.generators() }));
        }
    }

    let mut seeds = vec![BiRelation::zero(a), BiRelation::identity(a)];
    seeds.extend(generators.iter().cloned());
    let elements = ring_closure(seeds, caps)?;
    let position: HashMap<&BiRelation, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let lookup = |r: &BiRelation| position[r];
    let n = elements.len();
    let mut add_table = vec![vec![0; n]; n];
    let mut mul_table = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            add_table[i][j] = lookup(&elements[i].add(&elements[j])?);
            mul_table[i][j] = lookup(&elements[i].compose(&elements[j])?);
        }
    }
    let (zero, one) = (0, 1);
    for i in 0..n {
        for j in 0..i {
            if mul_table[i][j] != mul_table[j][i] {
                return Ok(FieldOutcome::Failure(FieldFailure::Noncommutative { left: j, right: i }));
            }
        }
    }
    for i in 1..n {
        if !mul_table[i].contains(&one) {
            return Ok(FieldOutcome::Failure(FieldFailure::ZeroDivisor { element: i }));
        }
    }

    let base_point = a.torsion_elements(caps)?.into_iter().find(|v| !a.is_zero_element(v)).expect("nontrivial");
    let module_iso: Vec<Vector> = elements
        .iter()
        .map(|k| a.reduce(&k.eval(&base_point).expect("total").rep))
        .collect();
    let mut distinct = module_iso.clone();
    distinct.sort();
    distinct.dedup();
    if a.order() != Some(n.into()) || distinct.len() != n {
        return Ok(FieldOutcome::Failure(FieldFailure::NotCyclicModule));
    }
    let generator_indices = generators.iter().map(lookup).collect();
    Ok(FieldOutcome::Field(FieldTable {
        order: n,
        elements,
        zero,
        one,
        add_table,
        mul_table,
        base_point,
        module_iso,
        generators: generators.to_vec(),
        generator_indices,
    }))
}

/// Indices of the generators whose fixed points have full rank.
pub fn almost_centralizer_in_g(generators: &[BiRelation], a: &FgAbGroup) -> Result<Vec<usize>> {
    let identity = BiRelation::identity(a);
    let mut out = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        if g.ambient() != a {
            return Err(Error::AmbientMismatch);
        }
        if g.kind() != Kind::Endogeny {
            return Err(Error::Classification(format!("generator {i} is {}", g.kind())));
        }
        if g.sub_rel(&identity)?.ker().rank() == a.free_rank() {
            out.push(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: &FgAbGroup, rows: &[&[i64]]) -> BiRelation {
        BiRelation::from_i64_matrix(a, rows).unwrap()
    }

    #[test]
    fn field_of_order_four() {
        let a = FgAbGroup::new(0, &[2, 2]).unwrap();
        let g = m(&a, &[&[0, 1], &[1, 1]]);
        let t = zilber_field(&a, &[g], &Caps::default()).unwrap();
        let t = t.field().expect("field");
        assert_eq!(t.order, 4);
        assert!(t.satisfies_field_axioms());
        assert!(t.intertwines());
    }

    #[test]
    fn field_of_order_twenty_five() {
        // x^2 - x + 2 is primitive over F5
        let a = FgAbGroup::new(0, &[5, 5]).unwrap();
        let g = m(&a, &[&[0, 3], &[1, 1]]);
        let t = zilber_field(&a, &[g], &Caps::default()).unwrap();
        let t = t.field().expect("field");
        assert_eq!(t.order, 25);
        assert!(t.satisfies_field_axioms());
        assert!(t.intertwines());
    }

    #[test]
    fn z4_is_not_minimal() {
        let a = FgAbGroup::new(0, &[4]).unwrap();
        let out = zilber_field(&a, &[BiRelation::scalar(&a, 3)], &Caps::default()).unwrap();
        match out {
            FieldOutcome::Failure(FieldFailure::NotMinimal { subgroup }) => {
                assert_eq!(Subgroup::generated(&a, &subgroup).unwrap().order(), Some(2.into()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_automorphisms_are_rejected() {
        let a = FgAbGroup::new(0, &[2, 2]).unwrap();
        let e = m(&a, &[&[1, 0], &[0, 0]]);
        assert!(matches!(zilber_field(&a, &[e], &Caps::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn almost_centralizer_examples() {
        let z2 = FgAbGroup::free(2);
        let gens = vec![BiRelation::identity(&z2), m(&z2, &[&[1, 1], &[0, 1]]), BiRelation::scalar(&z2, -1)];
        assert_eq!(almost_centralizer_in_g(&gens, &z2).unwrap(), vec![0]);
    }

    #[test]
    fn prime_powers() {
        let pp: Vec<usize> = (1..30).filter(|&n| is_prime_power(n)).collect();
        assert_eq!(pp, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]);
    }
}
