//! Bi-relations on a finitely generated abelian group: subgroups of `A x A`,
//! read as multivalued partial maps from the first coordinate to the second.
//!
//! A graph is stored as a lattice in `Z^(2n)` (two copies of the cover of
//! `A`) that contains the relation lattice of both factors. Everything else
//! (domain, image, katakernel, kernel) is derived from the graph on demand
//! and cached.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FgAbGroup, Index, Subgroup};
use crate::lattice::{left_kernel, solve_left, unit_vector, vec_mat, zero_vector, Int, Lattice, Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Kind {
    Endogeny,
    QuasiEndo,
    Neither,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Endogeny => "ENDOGENY",
            Kind::QuasiEndo => "QUASI_ENDO",
            Kind::Neither => "NEITHER",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationClass {
    pub kind: Kind,
    pub kat: Subgroup,
    pub dom: Subgroup,
    pub im: Subgroup,
    pub ker: Subgroup,
    pub dom_index: Index,
}

/// A coset `rep + subgroup`; the value set of a relation at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Coset {
    pub rep: Vector,
    pub subgroup: Subgroup,
}

pub struct BiRelation {
    ambient: FgAbGroup,
    graph: Lattice,
    class: OnceLock<RelationClass>,
}

impl Clone for BiRelation {
    fn clone(&self) -> Self {
        BiRelation { ambient: self.ambient.clone(), graph: self.graph.clone(), class: self.class.clone() }
    }
}

impl PartialEq for BiRelation {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.graph == other.graph
    }
}

impl Eq for BiRelation {}

impl Hash for BiRelation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.graph.hash(state);
    }
}

impl fmt::Debug for BiRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiRelation on {} {{", self.ambient)?;
        for (i, (a, b)) in self.generator_pairs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " ({} -> {})", show(a), show(b))?;
        }
        write!(f, " }}")
    }
}

pub(crate) fn show(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn negate(v: &[Int]) -> Vector {
    v.iter().map(|x| -x).collect()
}

/// Picks the most readable element: torsion-only vectors first, then the
/// smallest coordinate sum, then lexicographic order.
pub(crate) fn pick_witness(ambient: &FgAbGroup, candidates: impl IntoIterator<Item = Vector>) -> Option<Vector> {
    candidates
        .into_iter()
        .map(|v| ambient.reduce(&v))
        .min_by(|a, b| witness_key(ambient, a).cmp(&witness_key(ambient, b)).then_with(|| a.cmp(b)))
}

fn witness_key(ambient: &FgAbGroup, v: &[Int]) -> (bool, Int) {
    let has_free = v[..ambient.free_rank()].iter().any(|x| !x.is_zero());
    (has_free, v.iter().map(|x| x.abs()).sum())
}

/// An element of `big` outside `small`, when there is one.
pub(crate) fn escape_witness(big: &Subgroup, small: &Subgroup) -> Option<Vector> {
    pick_witness(big.ambient(), big.basis().iter().filter(|v| !small.contains(v)).cloned())
}

/// An element of `big` none of whose nonzero multiples lies in `small`, when
/// `big ∩ small` has infinite index in `big`.
pub(crate) fn rank_witness(big: &Subgroup, small: &Subgroup) -> Option<Vector> {
    let common = big.intersect(small).expect("same ambient");
    if common.rank() == big.rank() {
        return None;
    }
    let sat = common.cover_lattice().saturation();
    pick_witness(big.ambient(), big.basis().iter().filter(|v| !sat.contains(v)).cloned())
}

impl BiRelation {
    fn wrap(ambient: &FgAbGroup, graph: Lattice) -> BiRelation {
        BiRelation { ambient: ambient.clone(), graph, class: OnceLock::new() }
    }

    fn square_relations(ambient: &FgAbGroup) -> Lattice {
        let n = ambient.cover_dim();
        let r = ambient.relation_lattice();
        r.embed(2 * n, 0).sum(&r.embed(2 * n, n))
    }

    /// Product `B1 x B2` as a lattice in the doubled cover.
    fn product_lattice(b1: &Subgroup, b2: &Subgroup) -> Lattice {
        let n = b1.ambient().cover_dim();
        b1.cover_lattice().embed(2 * n, 0).sum(&b2.cover_lattice().embed(2 * n, n))
    }

    /// The subgroup of `A x A` generated by the given pairs.
    pub fn from_graph(ambient: &FgAbGroup, pairs: &[(Vector, Vector)]) -> Result<BiRelation> {
        let n = ambient.cover_dim();
        let mut gens = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            ambient.check_element(a)?;
            ambient.check_element(b)?;
            gens.push(a.iter().chain(b).cloned().collect::<Vector>());
        }
        let graph = Lattice::new(2 * n, gens).sum(&Self::square_relations(ambient));
        Ok(Self::wrap(ambient, graph))
    }

    /// Graph of `a -> M a`, with `M` acting on column vectors.
    pub fn from_matrix(ambient: &FgAbGroup, m: &[Vector]) -> Result<BiRelation> {
        let n = ambient.cover_dim();
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidHomomorphism(format!("expected a {n}x{n} matrix")));
        }
        let r = ambient.free_rank();
        let torsion = ambient.torsion_factors();
        for j in r..n {
            let dj = &torsion[j - r];
            for i in 0..n {
                let entry = &m[i][j] * dj;
                let ok = if i < r { entry.is_zero() } else { entry.is_multiple_of(&torsion[i - r]) };
                if !ok {
                    return Err(Error::InvalidHomomorphism(format!(
                        "column {j} does not respect the order {dj} of its generator (row {i})"
                    )));
                }
            }
        }
        let pairs: Vec<(Vector, Vector)> =
            (0..n).map(|j| (unit_vector(n, j), (0..n).map(|i| m[i][j].clone()).collect())).collect();
        Self::from_graph(ambient, &pairs)
    }

    pub fn from_i64_matrix(ambient: &FgAbGroup, m: &[&[i64]]) -> Result<BiRelation> {
        let m: Matrix = m.iter().map(|row| row.iter().map(|&x| Int::from(x)).collect()).collect();
        Self::from_matrix(ambient, &m)
    }

    pub fn identity(ambient: &FgAbGroup) -> BiRelation {
        let n = ambient.cover_dim();
        let pairs: Vec<_> = (0..n).map(|j| (unit_vector(n, j), unit_vector(n, j))).collect();
        Self::from_graph(ambient, &pairs).expect("unit vectors have the right length")
    }

    pub fn scalar(ambient: &FgAbGroup, k: i64) -> BiRelation {
        let n = ambient.cover_dim();
        let pairs: Vec<_> = (0..n)
            .map(|j| {
                let mut b = zero_vector(n);
                b[j] = Int::from(k);
                (unit_vector(n, j), b)
            })
            .collect();
        Self::from_graph(ambient, &pairs).expect("unit vectors have the right length")
    }

    pub fn zero(ambient: &FgAbGroup) -> BiRelation {
        Self::scalar(ambient, 0)
    }

    /// The relation `a -> B` for every `a`; requires `B` finite.
    pub fn constant_to_subgroup(ambient: &FgAbGroup, b: &Subgroup) -> Result<BiRelation> {
        if b.ambient() != ambient {
            return Err(Error::AmbientMismatch);
        }
        if !b.is_finite() {
            return Err(Error::Precondition("the constant value must be a finite subgroup".into()));
        }
        Ok(Self::wrap(ambient, Self::product_lattice(&Subgroup::whole(ambient), b)))
    }

    /// The relation with graph `B1 x B2`.
    pub fn product_relation(b1: &Subgroup, b2: &Subgroup) -> Result<BiRelation> {
        if b1.ambient() != b2.ambient() {
            return Err(Error::AmbientMismatch);
        }
        Ok(Self::wrap(b1.ambient(), Self::product_lattice(b1, b2)))
    }

    pub fn ambient(&self) -> &FgAbGroup {
        &self.ambient
    }

    pub fn graph_lattice(&self) -> &Lattice {
        &self.graph
    }

    /// Reduced generating pairs of the graph, omitting pairs that vanish in `A x A`.
    pub fn generator_pairs(&self) -> Vec<(Vector, Vector)> {
        let n = self.ambient.cover_dim();
        self.graph
            .basis()
            .iter()
            .map(|row| (self.ambient.reduce(&row[..n]), self.ambient.reduce(&row[n..])))
            .filter(|(a, b)| !(self.ambient.is_zero_element(a) && self.ambient.is_zero_element(b)))
            .collect()
    }

    pub fn contains_pair(&self, a: &[Int], b: &[Int]) -> bool {
        let n = self.ambient.cover_dim();
        if a.len() != n || b.len() != n {
            return false;
        }
        let v: Vector = a.iter().chain(b).cloned().collect();
        self.graph.contains(&v)
    }

    fn same_ambient(&self, other: &BiRelation) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    fn first(&self) -> Vec<usize> {
        (0..self.ambient.cover_dim()).collect()
    }

    fn second(&self) -> Vec<usize> {
        let n = self.ambient.cover_dim();
        (n..2 * n).collect()
    }

    fn sub(&self, lattice: Lattice) -> Subgroup {
        Subgroup::from_cover_lattice(&self.ambient, &lattice)
    }

    pub fn classify(&self) -> &RelationClass {
        self.class.get_or_init(|| {
            let dom = self.sub(self.graph.project(&self.first()));
            let im = self.sub(self.graph.project(&self.second()));
            let kat = self.apply_unchecked(&Subgroup::zero(&self.ambient));
            let ker = self.preimage_unchecked(&kat);
            let dom_index = dom.index();
            let kind = if !kat.is_finite() || !dom_index.is_finite() {
                Kind::Neither
            } else if dom.index() == Index::Finite(Int::from(1)) {
                Kind::Endogeny
            } else {
                Kind::QuasiEndo
            };
            RelationClass { kind, kat, dom, im, ker, dom_index }
        })
    }

    pub fn kind(&self) -> Kind {
        self.classify().kind
    }

    pub fn kat(&self) -> &Subgroup {
        &self.classify().kat
    }

    pub fn dom(&self) -> &Subgroup {
        &self.classify().dom
    }

    pub fn im(&self) -> &Subgroup {
        &self.classify().im
    }

    pub fn ker(&self) -> &Subgroup {
        &self.classify().ker
    }

    pub fn dom_index(&self) -> Index {
        self.classify().dom_index.clone()
    }

    pub fn is_endogeny(&self) -> bool {
        self.kind() == Kind::Endogeny
    }

    pub fn is_total(&self) -> bool {
        self.dom().index() == Index::Finite(Int::from(1))
    }

    pub(crate) fn require_classified(&self, what: &str) -> Result<()> {
        if self.kind() == Kind::Neither {
            Err(Error::Classification(format!("{what}: {self:?}")))
        } else {
            Ok(())
        }
    }

    pub fn neg(&self) -> BiRelation {
        let n = self.ambient.cover_dim();
        let gens = self
            .graph
            .basis()
            .iter()
            .map(|row| row[..n].iter().cloned().chain(row[n..].iter().map(|x| -x)).collect())
            .collect();
        Self::wrap(&self.ambient, Lattice::new(2 * n, gens))
    }

    /// The relation read backwards: `(b, a)` for every `(a, b)`.
    pub fn converse(&self) -> BiRelation {
        let n = self.ambient.cover_dim();
        let cols: Vec<usize> = (n..2 * n).chain(0..n).collect();
        Self::wrap(&self.ambient, self.graph.project(&cols))
    }

    /// Intersection of graphs.
    pub fn meet(&self, other: &BiRelation) -> Result<BiRelation> {
        self.same_ambient(other)?;
        Ok(Self::wrap(&self.ambient, self.graph.intersect(&other.graph)))
    }

    /// Subgroup generated by both graphs.
    pub fn join(&self, other: &BiRelation) -> Result<BiRelation> {
        self.same_ambient(other)?;
        Ok(Self::wrap(&self.ambient, self.graph.sum(&other.graph)))
    }

    /// `{(a, b1 + b2) : (a, b1) ∈ self, (a, b2) ∈ other}`
    pub fn add(&self, other: &BiRelation) -> Result<BiRelation> {
        self.same_ambient(other)?;
        let n = self.ambient.cover_dim();
        let (p, q) = (self.graph.basis(), other.graph.basis());
        let mut stacked: Vec<Vector> = p.iter().map(|r| r[..n].to_vec()).collect();
        stacked.extend(q.iter().map(|r| negate(&r[..n])));
        let gens = left_kernel(n, &stacked)
            .iter()
            .map(|x| {
                let (x, y) = x.split_at(p.len());
                let head = vec_mat(x, p, 2 * n);
                let tail = vec_mat(y, q, 2 * n);
                head[..n].iter().cloned().chain((n..2 * n).map(|i| &head[i] + &tail[i])).collect()
            })
            .collect();
        Ok(Self::wrap(&self.ambient, Lattice::new(2 * n, gens).sum(&Self::square_relations(&self.ambient))))
    }

    pub fn sub_rel(&self, other: &BiRelation) -> Result<BiRelation> {
        self.add(&other.neg())
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &BiRelation) -> Result<BiRelation> {
        self.same_ambient(other)?;
        let n = self.ambient.cover_dim();
        let (outer, inner) = (self.graph.basis(), other.graph.basis());
        let mut stacked: Vec<Vector> = inner.iter().map(|r| r[n..].to_vec()).collect();
        stacked.extend(outer.iter().map(|r| negate(&r[..n])));
        let gens = left_kernel(n, &stacked)
            .iter()
            .map(|x| {
                let (x, y) = x.split_at(inner.len());
                let a = vec_mat(x, inner, 2 * n);
                let b = vec_mat(y, outer, 2 * n);
                a[..n].iter().cloned().chain(b[n..].iter().cloned()).collect()
            })
            .collect();
        Ok(Self::wrap(&self.ambient, Lattice::new(2 * n, gens).sum(&Self::square_relations(&self.ambient))))
    }

    fn apply_unchecked(&self, b: &Subgroup) -> Subgroup {
        let restricted = Self::product_lattice(b, &Subgroup::whole(&self.ambient));
        self.sub(self.graph.intersect(&restricted).project(&self.second()))
    }

    fn preimage_unchecked(&self, b: &Subgroup) -> Subgroup {
        let restricted = Self::product_lattice(&Subgroup::whole(&self.ambient), b);
        self.sub(self.graph.intersect(&restricted).project(&self.first()))
    }

    /// The set of values on `B`.
    pub fn apply(&self, b: &Subgroup) -> Result<Subgroup> {
        if b.ambient() != &self.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(self.apply_unchecked(b))
    }

    /// `{a : self[a] ⊆ B + kat}`, which for points of the domain is the set
    /// of `a` having some value in `B + kat`.
    pub fn preimage(&self, b: &Subgroup) -> Result<Subgroup> {
        if b.ambient() != &self.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(self.preimage_unchecked(&b.sum(self.kat())?))
    }

    /// Whether the difference has finite image.
    pub fn equivalent(&self, other: &BiRelation) -> Result<bool> {
        self.same_ambient(other)?;
        self.require_classified("equivalence needs classified relations")?;
        other.require_classified("equivalence needs classified relations")?;
        Ok(self.sub_rel(other)?.im().is_finite())
    }

    /// The value set at a point of the domain.
    pub(crate) fn eval(&self, a: &[Int]) -> Option<Coset> {
        let n = self.ambient.cover_dim();
        let rows: Vec<Vector> = self.graph.basis().iter().map(|r| r[..n].to_vec()).collect();
        let x = solve_left(n, &rows, a)?;
        let pair = vec_mat(&x, self.graph.basis(), 2 * n);
        Some(Coset { rep: self.ambient.reduce(&pair[n..]), subgroup: self.kat().clone() })
    }

    /// Checks the legality condition for restricting to `B`: weak invariance
    /// for endogenies, almost invariance for quasi-endomorphisms.
    pub(crate) fn restriction_violation(&self, b: &Subgroup) -> Result<Option<(String, Vector)>> {
        self.require_classified("restriction needs a classified relation")?;
        let image = self.apply(b)?;
        if self.is_total() {
            let target = b.sum(self.kat())?;
            Ok(escape_witness(&image, &target).map(|w| ("subgroup is not weakly invariant".to_string(), w)))
        } else {
            Ok(rank_witness(&image, b).map(|w| ("subgroup is not almost invariant".to_string(), w)))
        }
    }

    /// `self ∩ (B x B)`, presented as a relation on `B` itself. The
    /// coordinates of the new ambient are those of `B.presentation()`.
    pub fn restrict_corestrict(&self, b: &Subgroup) -> Result<BiRelation> {
        if b.ambient() != &self.ambient {
            return Err(Error::AmbientMismatch);
        }
        if let Some((reason, witness)) = self.restriction_violation(b)? {
            return Err(Error::IllegalRestriction { reason, witness });
        }
        Ok(self.restrict_unchecked(b))
    }

    pub(crate) fn restrict_unchecked(&self, b: &Subgroup) -> BiRelation {
        let n = self.ambient.cover_dim();
        let pres = b.presentation();
        let target = pres.group().clone();
        let graph = self.graph.intersect(&Self::product_lattice(b, b));
        let pairs: Vec<(Vector, Vector)> = graph
            .basis()
            .iter()
            .map(|row| {
                (
                    pres.project(&row[..n]).expect("row lies in B"),
                    pres.project(&row[n..]).expect("row lies in B"),
                )
            })
            .collect();
        Self::from_graph(&target, &pairs).expect("projected coordinates match the presented group")
    }

    /// Carries a relation on `B` (in the coordinates of `B.presentation()`)
    /// back to the ambient of `B`.
    pub fn extend_from(b: &Subgroup, on_b: &BiRelation) -> Result<BiRelation> {
        let pres = b.presentation();
        if on_b.ambient() != pres.group() {
            return Err(Error::AmbientMismatch);
        }
        let pairs: Vec<(Vector, Vector)> =
            on_b.generator_pairs().iter().map(|(x, y)| (pres.lift(x), pres.lift(y))).collect();
        Self::from_graph(b.ambient(), &pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vector;

    fn zz(r: usize, t: &[i64]) -> FgAbGroup {
        FgAbGroup::new(r, t).unwrap()
    }

    fn sub(a: &FgAbGroup, gens: &[&[i64]]) -> Subgroup {
        Subgroup::generated(a, &gens.iter().map(|g| vector(g)).collect::<Vec<_>>()).unwrap()
    }

    fn halving() -> BiRelation {
        BiRelation::from_graph(&FgAbGroup::free(1), &[(vector(&[2]), vector(&[1]))]).unwrap()
    }

    fn scalar(k: i64) -> BiRelation {
        BiRelation::scalar(&FgAbGroup::free(1), k)
    }

    /// Values of a relation on `Z` at `a`, found by scanning a window.
    fn values_on_z(phi: &BiRelation, a: i64, window: i64) -> Vec<i64> {
        (-window..=window).filter(|&b| phi.contains_pair(&vector(&[a]), &vector(&[b]))).collect()
    }

    #[test]
    fn classification_examples() {
        let a = zz(1, &[2]);
        let id = BiRelation::identity(&a);
        assert_eq!(id.kind(), Kind::Endogeny);
        assert!(id.kat().is_zero() && id.ker().is_zero());
        assert_eq!(id.im(), &Subgroup::whole(&a));

        let h = halving();
        assert_eq!(h.kind(), Kind::QuasiEndo);
        assert_eq!(h.dom_index(), Index::Finite(Int::from(2)));
        assert!(h.kat().is_zero());

        let z = FgAbGroup::free(1);
        let vertical = BiRelation::product_relation(&Subgroup::zero(&z), &Subgroup::whole(&z)).unwrap();
        assert_eq!(vertical.kind(), Kind::Neither);
    }

    #[test]
    fn matrix_constructor() {
        let z = FgAbGroup::free(1);
        let d = BiRelation::from_i64_matrix(&z, &[&[2]]).unwrap();
        assert!(d.ker().is_zero());
        assert_eq!(d.im(), &sub(&z, &[&[2]]));

        let v4 = zz(0, &[2, 2]);
        let m = BiRelation::from_i64_matrix(&v4, &[&[0, 1], &[1, 1]]).unwrap();
        let cube = m.compose(&m).unwrap().compose(&m).unwrap();
        assert_eq!(cube, BiRelation::identity(&v4));
        assert_ne!(m, BiRelation::identity(&v4));

        assert!(matches!(
            BiRelation::from_i64_matrix(&zz(1, &[2]), &[&[1, 1], &[0, 1]]),
            Err(Error::InvalidHomomorphism(_))
        ));
        assert!(BiRelation::from_i64_matrix(&zz(0, &[2, 4]), &[&[1, 0], &[1, 1]]).is_err());
        assert!(BiRelation::from_i64_matrix(&zz(0, &[2, 4]), &[&[1, 0], &[2, 1]]).is_ok());
    }

    #[test]
    fn constant_relations() {
        let a = zz(1, &[2]);
        let zero = BiRelation::constant_to_subgroup(&a, &Subgroup::zero(&a)).unwrap();
        assert_eq!(zero, BiRelation::zero(&a));
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        assert_eq!(c.kat(), &t);
        assert_eq!(c.im(), &t);
        assert_eq!(c.ker(), &Subgroup::whole(&a));
        assert!(c.equivalent(&BiRelation::zero(&a)).unwrap());

        let b = zz(0, &[2, 4]);
        let full = BiRelation::constant_to_subgroup(&b, &Subgroup::whole(&b)).unwrap();
        assert_eq!(full.kat().order(), Some(Int::from(8)));
        assert!(BiRelation::constant_to_subgroup(&a, &Subgroup::whole(&a)).is_err());
    }

    #[test]
    fn sums() {
        assert_eq!(scalar(2).add(&scalar(3)).unwrap(), scalar(5));
        let a = zz(1, &[2]);
        let phi = BiRelation::from_graph(
            &a,
            &[(vector(&[1, 0]), vector(&[3, 0])), (vector(&[0, 0]), vector(&[0, 1])), (vector(&[0, 1]), vector(&[0, 0]))],
        )
        .unwrap();
        let expected = BiRelation::constant_to_subgroup(&a, phi.kat()).unwrap();
        assert_eq!(phi.add(&phi.neg()).unwrap(), expected);

        let s = halving().add(&scalar(3)).unwrap();
        assert_eq!(s.dom(), &sub(&FgAbGroup::free(1), &[&[2]]));
        for n in -8..=8 {
            assert_eq!(values_on_z(&s, 2 * n, 200), vec![7 * n]);
            assert!(values_on_z(&s, 2 * n + 1, 200).is_empty());
        }
    }

    #[test]
    fn compositions() {
        let a = zz(1, &[2]);
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        let d = BiRelation::scalar(&a, 2);
        assert_eq!(c.compose(&d).unwrap().kat(), &t);
        let phi = c.add(&d).unwrap();
        assert_eq!(BiRelation::identity(&a).compose(&phi).unwrap(), phi);
        assert_eq!(phi.compose(&BiRelation::identity(&a)).unwrap(), phi);

        let hc = halving().compose(&scalar(3)).unwrap();
        assert_eq!(hc.dom(), &sub(&FgAbGroup::free(1), &[&[2]]));
        for n in -8..=8 {
            assert_eq!(values_on_z(&hc, 2 * n, 200), vec![3 * n]);
        }
    }

    #[test]
    fn apply_and_preimage() {
        let z = FgAbGroup::free(1);
        assert_eq!(scalar(2).apply(&sub(&z, &[&[3]])).unwrap(), sub(&z, &[&[6]]));
        assert_eq!(scalar(2).preimage(&sub(&z, &[&[6]])).unwrap(), sub(&z, &[&[3]]));
        assert_eq!(halving().preimage(&sub(&z, &[&[6]])).unwrap(), sub(&z, &[&[12]]));
        for n in -48i64..=48 {
            let inside = values_on_z(&halving(), n, 60).iter().any(|b| b % 6 == 0);
            assert_eq!(inside, n % 12 == 0);
        }
        let a = zz(1, &[2]);
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        assert_eq!(c.apply(&sub(&a, &[&[5, 0]])).unwrap(), t);
        assert_eq!(c.apply(&Subgroup::zero(&a)).unwrap(), *c.kat());
        assert_eq!(c.preimage(c.kat()).unwrap(), *c.ker());
    }

    #[test]
    fn equivalence() {
        let a = zz(1, &[2]);
        let t = sub(&a, &[&[0, 1]]);
        let c = BiRelation::constant_to_subgroup(&a, &t).unwrap();
        assert!(c.equivalent(&BiRelation::zero(&a)).unwrap());
        assert!(c.equivalent(&c).unwrap());
        assert!(!scalar(2).equivalent(&scalar(3)).unwrap());
        let z = FgAbGroup::free(1);
        let vertical = BiRelation::product_relation(&Subgroup::zero(&z), &Subgroup::whole(&z)).unwrap();
        assert!(matches!(vertical.equivalent(&scalar(1)), Err(Error::Classification(_))));
    }

    #[test]
    fn restrictions() {
        let a = zz(1, &[2]);
        let b = sub(&a, &[&[3, 0]]);
        let id_b = BiRelation::identity(&a).restrict_corestrict(&b).unwrap();
        assert_eq!(id_b, BiRelation::identity(id_b.ambient()));

        let z = FgAbGroup::free(1);
        let three = sub(&z, &[&[3]]);
        let d = scalar(2).restrict_corestrict(&three).unwrap();
        assert_eq!(d.ambient(), &z);
        assert_eq!(d, scalar(2));

        let six = sub(&z, &[&[6]]);
        let h = halving().restrict_corestrict(&six).unwrap();
        assert_eq!(h.kind(), Kind::QuasiEndo);
        let back = BiRelation::extend_from(&six, &h).unwrap();
        assert_eq!(back.dom(), &sub(&z, &[&[12]]));
        assert!(back.contains_pair(&vector(&[12]), &vector(&[6])));
        assert!(back.contains_pair(&vector(&[-24]), &vector(&[-12])));

        let odd = sub(&zz(1, &[2]), &[&[1, 1]]);
        let swap_free = BiRelation::from_graph(&a, &[(vector(&[1, 0]), vector(&[1, 0])), (vector(&[0, 1]), vector(&[0, 0]))]).unwrap();
        assert!(swap_free.restrict_corestrict(&odd).is_err());
    }

    #[test]
    fn point_values() {
        let h = halving();
        let v = h.eval(&vector(&[6])).unwrap();
        assert_eq!(v.rep, vector(&[3]));
        assert!(h.eval(&vector(&[3])).is_none());
    }

    #[test]
    fn witnesses_prefer_torsion() {
        let a = zz(1, &[4]);
        let w = pick_witness(&a, vec![vector(&[1, 0]), vector(&[0, 3]), vector(&[0, 6])]).unwrap();
        assert_eq!(w, vector(&[0, 2]));
    }
}
