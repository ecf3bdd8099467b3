//! Finitely generated abelian groups in invariant-factor form and their
//! subgroups.
//!
//! A group `Z^r + Z/d_1 + ... + Z/d_k` is handled through its presentation
//! cover `Z^(r+k)`: an element is any integer vector of length `r+k`, and the
//! relation lattice is spanned by `d_i e_(r+i)`. A subgroup is stored as the
//! full preimage lattice in the cover, which always contains the relation
//! lattice. Canonical HNF of that lattice makes subgroup equality structural.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{int, is_zero_vector, smith_form, vec_mat, zero_vector, Int, Lattice, Matrix, Vector};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<Int>,
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FgAbGroup {
    pub fn new(free_rank: usize, torsion: &[i64]) -> Result<Self> {
        Self::from_factors(free_rank, torsion.iter().map(|&d| int(d)).collect())
    }

    pub fn from_factors(free_rank: usize, torsion: Vec<Int>) -> Result<Self> {
        if let Some(d) = torsion.iter().find(|d| **d < int(2)) {
            return Err(Error::InvalidGroup(format!("torsion factor {d} is below 2")));
        }
        for w in torsion.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::InvalidGroup(format!("{} does not divide {}", w[0], w[1])));
            }
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_factors(&self) -> &[Int] {
        &self.torsion
    }

    pub fn cover_dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().fold(Int::one(), |acc, d| acc * d)
    }

    pub fn order(&self) -> Option<Int> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn relation_lattice(&self) -> Lattice {
        let n = self.cover_dim();
        let gens = self
            .torsion
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut v = zero_vector(n);
                v[self.free_rank + i] = d.clone();
                v
            })
            .collect();
        Lattice::new(n, gens)
    }

    pub fn check_element(&self, v: &[Int]) -> Result<()> {
        if v.len() == self.cover_dim() {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.cover_dim(), got: v.len() })
        }
    }

    /// Reduces torsion coordinates into `[0, d_i)`.
    pub fn reduce(&self, v: &[Int]) -> Vector {
        v.iter()
            .enumerate()
            .map(|(i, x)| if i < self.free_rank { x.clone() } else { x.mod_floor(&self.torsion[i - self.free_rank]) })
            .collect()
    }

    pub fn is_zero_element(&self, v: &[Int]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    /// Every element of the torsion subgroup, in lexicographic order of the
    /// reduced coordinates.
    pub fn torsion_elements(&self, caps: &Caps) -> Result<Vec<Vector>> {
        let order = self.torsion_order();
        if order > Int::from(caps.torsion_order) {
            return Err(Error::EnumerationTooLarge { what: "torsion order", cap: caps.torsion_order });
        }
        let mut out = vec![zero_vector(self.cover_dim())];
        for (i, d) in self.torsion.iter().enumerate() {
            let d = d.to_i64().expect("capped");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for v in &out {
                for x in 0..d {
                    let mut w = v.clone();
                    w[self.free_rank + i] = int(x);
                    next.push(w);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// `|A : B|` or the lack of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Index {
    Finite(Int),
    Infinite,
}

impl Index {
    pub fn is_finite(&self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "INFINITE"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subgroup {
    ambient: FgAbGroup,
    lattice: Lattice,
}

impl Subgroup {
    /// Wraps a cover lattice, adding the relation lattice.
    pub fn from_cover_lattice(ambient: &FgAbGroup, lattice: &Lattice) -> Subgroup {
        debug_assert_eq!(lattice.dim(), ambient.cover_dim());
        Subgroup { ambient: ambient.clone(), lattice: lattice.sum(&ambient.relation_lattice()) }
    }

    pub fn generated(ambient: &FgAbGroup, gens: &[Vector]) -> Result<Subgroup> {
        for g in gens {
            ambient.check_element(g)?;
        }
        let mut all = gens.to_vec();
        all.extend(ambient.relation_lattice().basis().iter().cloned());
        Ok(Subgroup { ambient: ambient.clone(), lattice: Lattice::new(ambient.cover_dim(), all) })
    }

    pub fn zero(ambient: &FgAbGroup) -> Subgroup {
        Subgroup { ambient: ambient.clone(), lattice: ambient.relation_lattice() }
    }

    pub fn whole(ambient: &FgAbGroup) -> Subgroup {
        Subgroup { ambient: ambient.clone(), lattice: Lattice::full(ambient.cover_dim()) }
    }

    /// The torsion subgroup `T(A)`.
    pub fn torsion(ambient: &FgAbGroup) -> Subgroup {
        let n = ambient.cover_dim();
        let gens = (ambient.free_rank..n).map(|i| crate::lattice::unit_vector(n, i)).collect();
        Subgroup { ambient: ambient.clone(), lattice: Lattice::new(n, gens) }
    }

    pub fn ambient(&self) -> &FgAbGroup {
        &self.ambient
    }

    pub fn cover_lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Canonical basis of the cover lattice.
    pub fn basis(&self) -> &[Vector] {
        self.lattice.basis()
    }

    /// Reduced generators that are nonzero in the group.
    pub fn generators(&self) -> Vec<Vector> {
        self.lattice
            .basis()
            .iter()
            .map(|v| self.ambient.reduce(v))
            .filter(|v| !is_zero_vector(v))
            .collect()
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        v.len() == self.ambient.cover_dim() && self.lattice.contains(v)
    }

    fn same_ambient(&self, other: &Subgroup) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.ambient == other.ambient && self.lattice.is_subset_of(&other.lattice)
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        Ok(Subgroup { ambient: self.ambient.clone(), lattice: self.lattice.sum(&other.lattice) })
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        Ok(Subgroup { ambient: self.ambient.clone(), lattice: self.lattice.intersect(&other.lattice) })
    }

    /// Free rank of the subgroup; zero exactly when it is finite.
    pub fn rank(&self) -> usize {
        self.lattice.rank() - self.ambient.torsion.len()
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.lattice == self.ambient.relation_lattice()
    }

    pub fn index(&self) -> Index {
        if self.lattice.rank() == self.ambient.cover_dim() {
            Index::Finite(self.lattice.index_in(&Lattice::full(self.ambient.cover_dim())).expect("full rank"))
        } else {
            Index::Infinite
        }
    }

    /// `|self : sub|` when `sub` is a subgroup of `self` of the same rank.
    pub fn index_of(&self, sub: &Subgroup) -> Index {
        match sub.lattice.index_in(&self.lattice) {
            Some(n) if sub.ambient == self.ambient => Index::Finite(n),
            _ => Index::Infinite,
        }
    }

    pub fn order(&self) -> Option<Int> {
        if self.is_finite() {
            self.ambient.relation_lattice().index_in(&self.lattice)
        } else {
            None
        }
    }

    /// The subgroup as an abstract group, with coordinate maps.
    pub fn presentation(&self) -> Presentation {
        Presentation::of_pair(&self.lattice, &self.ambient.relation_lattice())
    }

    /// Elements of a finite subgroup, reduced, in enumeration order of the
    /// ambient torsion.
    pub fn elements(&self, caps: &Caps) -> Result<Vec<Vector>> {
        if !self.is_finite() {
            return Err(Error::Precondition("cannot list the elements of an infinite subgroup".into()));
        }
        Ok(self.ambient.torsion_elements(caps)?.into_iter().filter(|v| self.contains(v)).collect())
    }
}

pub fn canonicalize(gens: &[Vector], ambient: &FgAbGroup) -> Result<Subgroup> {
    Subgroup::generated(ambient, gens)
}

pub fn subgroup_sum(b1: &Subgroup, b2: &Subgroup) -> Result<Subgroup> {
    b1.sum(b2)
}

pub fn subgroup_intersect(b1: &Subgroup, b2: &Subgroup) -> Result<Subgroup> {
    b1.intersect(b2)
}

pub fn rank_and_index(b: &Subgroup) -> (usize, Index) {
    (b.rank(), b.index())
}

/// Invariant-factor presentation of a lattice quotient `outer / inner`, with
/// maps between cover coordinates and coordinates of the presented group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    group: FgAbGroup,
    outer: Lattice,
    /// `rank(outer) x cover_dim(group)`, applied to coordinates in the outer basis.
    to_group: Matrix,
    /// `cover_dim(group) x dim(outer)`: each row is a representative in the
    /// outer cover of a generator of the group.
    from_group: Matrix,
}

impl Presentation {
    pub fn of_pair(outer: &Lattice, inner: &Lattice) -> Presentation {
        let m = outer.rank();
        let coords: Vec<Vector> =
            inner.basis().iter().map(|v| outer.coordinates(v).expect("inner lies in outer")).collect();
        let sf = smith_form(&coords, m);
        let s = sf.diagonal.len();
        let mut positions: Vec<usize> = (s..m).collect();
        let free_rank = positions.len();
        let mut torsion = Vec::new();
        for (i, d) in sf.diagonal.iter().enumerate() {
            if *d > Int::one() {
                positions.push(i);
                torsion.push(d.clone());
            }
        }
        let group = FgAbGroup::from_factors(free_rank, torsion).expect("smith diagonal is a divisor chain");
        let to_group = (0..m).map(|i| positions.iter().map(|&p| sf.v[i][p].clone()).collect()).collect();
        let from_group = positions.iter().map(|&p| vec_mat(&sf.v_inv[p], outer.basis(), outer.dim())).collect();
        Presentation { group, outer: outer.clone(), to_group, from_group }
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    /// Coordinates in the presented group of a cover vector of the outer lattice.
    pub fn project(&self, v: &[Int]) -> Option<Vector> {
        let coords = self.outer.coordinates(v)?;
        Some(self.group.reduce(&vec_mat(&coords, &self.to_group, self.group.cover_dim())))
    }

    /// A cover representative of a group element.
    pub fn lift(&self, g: &[Int]) -> Vector {
        vec_mat(g, &self.from_group, self.outer.dim())
    }
}

#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub source: FgAbGroup,
    pub kernel: Subgroup,
    pub quotient: FgAbGroup,
    /// `cover_dim(quotient) x cover_dim(source)`; `projection_data * a` gives
    /// the image of `a` before torsion reduction.
    pub projection_data: Matrix,
    presentation: Presentation,
}

impl QuotientPresentation {
    pub fn project(&self, v: &[Int]) -> Vector {
        self.presentation.project(v).expect("every cover vector lies in the full lattice")
    }

    pub fn lift(&self, g: &[Int]) -> Vector {
        self.presentation.lift(g)
    }

    /// Image of a subgroup of the source.
    pub fn project_subgroup(&self, b: &Subgroup) -> Subgroup {
        let gens: Vec<Vector> = b.basis().iter().map(|v| self.project(v)).collect();
        Subgroup::generated(&self.quotient, &gens).expect("projected vectors have quotient length")
    }

    /// Full preimage of a subgroup of the quotient.
    pub fn preimage_subgroup(&self, b: &Subgroup) -> Subgroup {
        let mut gens: Vec<Vector> = b.basis().iter().map(|g| self.lift(g)).collect();
        gens.extend(self.kernel.basis().iter().cloned());
        Subgroup::generated(&self.source, &gens).expect("lifts have source length")
    }
}

pub fn quotient(a: &FgAbGroup, b: &Subgroup) -> Result<QuotientPresentation> {
    if b.ambient() != a {
        return Err(Error::AmbientMismatch);
    }
    let n = a.cover_dim();
    let presentation = Presentation::of_pair(&Lattice::full(n), b.cover_lattice());
    let g = presentation.group.cover_dim();
    let projection_data = (0..g).map(|c| (0..n).map(|i| presentation.to_group[i][c].clone()).collect()).collect();
    Ok(QuotientPresentation {
        source: a.clone(),
        kernel: b.clone(),
        quotient: presentation.group.clone(),
        projection_data,
        presentation,
    })
}

/// The torsion subgroup together with every one of its subgroups, each listed
/// once, in breadth-first order from the zero subgroup.
pub fn torsion_and_finite_lattice(a: &FgAbGroup, caps: &Caps) -> Result<(Subgroup, Vec<Subgroup>)> {
    let t = Subgroup::torsion(a);
    let elements = a.torsion_elements(caps)?;
    let mut cyclic: Vec<Subgroup> = Vec::new();
    let mut seen_cyclic = HashSet::new();
    for e in &elements {
        let c = Subgroup::generated(a, std::slice::from_ref(e))?;
        if seen_cyclic.insert(c.clone()) {
            cyclic.push(c);
        }
    }
    let mut all = vec![Subgroup::zero(a)];
    let mut index: HashMap<Subgroup, usize> = HashMap::new();
    index.insert(all[0].clone(), 0);
    let mut i = 0;
    while i < all.len() {
        let s = all[i].clone();
        for c in &cyclic {
            if c.is_subgroup_of(&s) {
                continue;
            }
            let next = s.sum(c)?;
            if !index.contains_key(&next) {
                if all.len() as u64 >= caps.subgroup_count {
                    return Err(Error::EnumerationTooLarge { what: "subgroup count", cap: caps.subgroup_count });
                }
                index.insert(next.clone(), all.len());
                all.push(next);
            }
        }
        i += 1;
    }
    Ok((t, all))
}

#[derive(Clone, Debug)]
pub struct ProductPresentation {
    pub product: FgAbGroup,
    /// `cover_dim(product) x cover_dim(left)`
    pub embed_left: Matrix,
    pub embed_right: Matrix,
    /// `cover_dim(left) x cover_dim(product)`
    pub project_left: Matrix,
    pub project_right: Matrix,
    left: FgAbGroup,
    right: FgAbGroup,
}

fn mat_vec(m: &[Vector], v: &[Int]) -> Vector {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

impl ProductPresentation {
    pub fn embed_left(&self, a: &[Int]) -> Vector {
        self.product.reduce(&mat_vec(&self.embed_left, a))
    }
    pub fn embed_right(&self, b: &[Int]) -> Vector {
        self.product.reduce(&mat_vec(&self.embed_right, b))
    }
    pub fn project_left(&self, p: &[Int]) -> Vector {
        self.left.reduce(&mat_vec(&self.project_left, p))
    }
    pub fn project_right(&self, p: &[Int]) -> Vector {
        self.right.reduce(&mat_vec(&self.project_right, p))
    }
}

/// `A x B` in invariant-factor form with its embeddings and projections.
pub fn product_and_projections(a: &FgAbGroup, b: &FgAbGroup) -> ProductPresentation {
    let (na, nb) = (a.cover_dim(), b.cover_dim());
    let n = na + nb;
    let relations = a.relation_lattice().embed(n, 0).sum(&b.relation_lattice().embed(n, na));
    let pres = Presentation::of_pair(&Lattice::full(n), &relations);
    let g = pres.group.cover_dim();
    let column = |i: usize| -> Vector { (0..g).map(|c| pres.to_group[i][c].clone()).collect() };
    let transpose = |cols: Vec<Vector>, rows: usize| -> Matrix {
        (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
    };
    let embed_left = transpose((0..na).map(column).collect(), g);
    let embed_right = transpose((na..n).map(column).collect(), g);
    let project_left = (0..na).map(|i| (0..g).map(|c| pres.from_group[c][i].clone()).collect()).collect();
    let project_right = (na..n).map(|i| (0..g).map(|c| pres.from_group[c][i].clone()).collect()).collect();
    ProductPresentation {
        product: pres.group.clone(),
        embed_left,
        embed_right,
        project_left,
        project_right,
        left: a.clone(),
        right: b.clone(),
    }
}

/// Whether `rank((B1+C) ∩ (B2+C)) = rank(B1 ∩ B2)` for a finite `C`.
pub fn finite_perturbation_rank_check(b1: &Subgroup, b2: &Subgroup, c: &Subgroup) -> Result<bool> {
    if !c.is_finite() {
        return Err(Error::Precondition("the perturbing subgroup must be finite".into()));
    }
    let left = b1.sum(c)?.intersect(&b2.sum(c)?)?;
    Ok(left.rank() == b1.intersect(b2)?.rank())
}
