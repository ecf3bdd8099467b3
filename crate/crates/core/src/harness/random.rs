//! Seeded random instances.
//!
//! Trial `i` of a run with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s + i * 0x9E3779B97F4A7C15)` (wrapping), so any
//! single trial can be replayed on its own.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{FgAbGroup, Subgroup};
use crate::lattice::{int, unit_vector, zero_vector, Int, Matrix, Vector};
use crate::relation::BiRelation;

pub type TrialRng = ChaCha8Rng;

const TORSION_CHOICES: [i64; 5] = [2, 3, 4, 6, 12];

pub fn trial_rng(seed: u64, trial: usize) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Invariant factors of the product of the given cyclic orders.
pub fn invariant_factors(orders: &[i64]) -> Vec<i64> {
    match orders {
        [] => vec![],
        [a] => vec![*a],
        [a, b] => {
            let (g, l) = (a.gcd(b), a.lcm(b));
            if g > 1 {
                vec![g, l]
            } else {
                vec![l]
            }
        }
        _ => panic!("at most two torsion factors are drawn"),
    }
}

/// Free rank in `0..=max_free`, at most two torsion factors from
/// `{2, 3, 4, 6, 12}` with total order at most `max_torsion`.
pub fn group(rng: &mut TrialRng, max_free: usize, max_torsion: i64) -> FgAbGroup {
    loop {
        let r = rng.gen_range(0..=max_free);
        let k = rng.gen_range(0..=2);
        let orders: Vec<i64> = (0..k).map(|_| *TORSION_CHOICES.choose(rng).expect("nonempty")).collect();
        if orders.iter().product::<i64>() > max_torsion || r + orders.len() == 0 {
            continue;
        }
        return FgAbGroup::new(r, &invariant_factors(&orders)).expect("invariant factors divide");
    }
}

/// A nontrivial group with positive free rank.
pub fn infinite_group(rng: &mut TrialRng, max_free: usize, max_torsion: i64) -> FgAbGroup {
    loop {
        let a = group(rng, max_free, max_torsion);
        if a.free_rank() > 0 {
            return a;
        }
    }
}

pub fn element(rng: &mut TrialRng, a: &FgAbGroup, bound: i64) -> Vector {
    let v: Vector = (0..a.cover_dim()).map(|_| int(rng.gen_range(-bound..=bound))).collect();
    a.reduce(&v)
}

pub fn torsion_element(rng: &mut TrialRng, a: &FgAbGroup) -> Vector {
    let mut v = zero_vector(a.cover_dim());
    for (i, d) in a.torsion_factors().iter().enumerate() {
        let d: i64 = d.try_into().expect("small factor");
        v[a.free_rank() + i] = int(rng.gen_range(0..d));
    }
    v
}

/// Subgroup generated by one to `max_gens` random elements.
pub fn subgroup(rng: &mut TrialRng, a: &FgAbGroup, max_gens: usize) -> Subgroup {
    let n = rng.gen_range(1..=max_gens);
    let gens: Vec<Vector> = (0..n).map(|_| element(rng, a, 3)).collect();
    Subgroup::generated(a, &gens).expect("elements fit")
}

pub fn finite_subgroup(rng: &mut TrialRng, a: &FgAbGroup) -> Subgroup {
    let n = rng.gen_range(0..=2);
    let gens: Vec<Vector> = (0..n).map(|_| torsion_element(rng, a)).collect();
    Subgroup::generated(a, &gens).expect("elements fit")
}

/// A random matrix made compatible with the torsion of `a`: torsion columns
/// vanish on free rows and are scaled so that each column respects the order
/// of its generator.
pub fn matrix(rng: &mut TrialRng, a: &FgAbGroup, bound: i64) -> Matrix {
    let n = a.cover_dim();
    let r = a.free_rank();
    let t = a.torsion_factors();
    let mut m: Matrix = (0..n).map(|_| (0..n).map(|_| int(rng.gen_range(-bound..=bound))).collect()).collect();
    for j in r..n {
        for i in 0..n {
            if i < r {
                m[i][j] = int(0);
            } else {
                let di = &t[i - r];
                let dj = &t[j - r];
                let step: Int = di / di.gcd(dj);
                m[i][j] = &m[i][j] * &step;
            }
        }
    }
    m
}

pub fn homomorphism(rng: &mut TrialRng, a: &FgAbGroup) -> BiRelation {
    BiRelation::from_matrix(a, &matrix(rng, a, 3)).expect("compatible matrix")
}

/// A homomorphism plus, half of the time, a constant with finite values.
pub fn endogeny(rng: &mut TrialRng, a: &FgAbGroup) -> BiRelation {
    let h = homomorphism(rng, a);
    if a.torsion_factors().is_empty() || rng.gen_bool(0.5) {
        return h;
    }
    let c = BiRelation::constant_to_subgroup(a, &finite_subgroup(rng, a)).expect("finite");
    h.add(&c).expect("same ambient")
}

/// `{(N a, M a)}` for a random compatible `M` and an `N` that scales the free
/// coordinates (possibly after a shear), so the domain has finite index.
pub fn quasi(rng: &mut TrialRng, a: &FgAbGroup) -> BiRelation {
    let n = a.cover_dim();
    let r = a.free_rank();
    let m = matrix(rng, a, 3);
    let mut scale: Matrix = (0..n).map(|i| unit_vector(n, i)).collect();
    for (i, row) in scale.iter_mut().enumerate().take(r) {
        row[i] = int(rng.gen_range(1..=3));
    }
    if r >= 2 && rng.gen_bool(0.5) {
        let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
        if i != j {
            scale[i][j] = int(rng.gen_range(-1..=1));
        }
    }
    let pairs: Vec<(Vector, Vector)> = (0..n)
        .map(|j| {
            let col = |mat: &Matrix| a.reduce(&(0..n).map(|i| mat[i][j].clone()).collect::<Vector>());
            (col(&scale), col(&m))
        })
        .collect();
    let q = BiRelation::from_graph(a, &pairs).expect("fits");
    if a.torsion_factors().is_empty() || rng.gen_bool(0.5) {
        return q;
    }
    let c = BiRelation::constant_to_subgroup(a, &finite_subgroup(rng, a)).expect("finite");
    q.add(&c).expect("same ambient")
}

/// A homomorphism restricted to a random subgroup. On a finite group this is
/// always a quasi-endomorphism.
pub fn partial(rng: &mut TrialRng, a: &FgAbGroup) -> BiRelation {
    let m = matrix(rng, a, 3);
    let n = a.cover_dim();
    let s = subgroup(rng, a, 2);
    let pairs: Vec<(Vector, Vector)> = s
        .generators()
        .into_iter()
        .map(|x| {
            let y: Vector = (0..n).map(|i| (0..n).map(|j| &m[i][j] * &x[j]).sum()).collect();
            let y = a.reduce(&y);
            (x, y)
        })
        .collect();
    BiRelation::from_graph(a, &pairs).expect("fits")
}

/// Finite-image perturbation: a constant onto a finite subgroup plus a
/// homomorphism into the torsion.
pub fn finite_perturbation(rng: &mut TrialRng, a: &FgAbGroup) -> BiRelation {
    let mut m = matrix(rng, a, 3);
    for row in m.iter_mut().take(a.free_rank()) {
        row.iter_mut().for_each(|x| *x = int(0));
    }
    let h = BiRelation::from_matrix(a, &m).expect("compatible matrix");
    let c = BiRelation::constant_to_subgroup(a, &finite_subgroup(rng, a)).expect("finite");
    h.add(&c).expect("same ambient")
}

/// An endogeny or a quasi-endomorphism, evenly.
pub fn relation(rng: &mut TrialRng, a: &FgAbGroup) -> BiRelation {
    if rng.gen_bool(0.5) {
        endogeny(rng, a)
    } else {
        quasi(rng, a)
    }
}

/// Relations that commute with `g` up to katakernels: small polynomials in
/// `g` and constants onto the whole torsion subgroup.
pub fn commuting_pool(a: &FgAbGroup, g: &BiRelation) -> Vec<BiRelation> {
    let mut pool = vec![BiRelation::zero(a), BiRelation::identity(a), g.clone()];
    for k in [-2, -1, 2, 3] {
        pool.push(BiRelation::scalar(a, k));
        pool.push(g.add(&BiRelation::scalar(a, k)).expect("same ambient"));
    }
    pool.push(g.compose(g).expect("same ambient"));
    if !a.torsion_factors().is_empty() {
        pool.push(BiRelation::constant_to_subgroup(a, &Subgroup::torsion(a)).expect("finite"));
    }
    pool
}

/// A random element of `pool`, possibly summed or composed with a second.
pub fn pool_element(rng: &mut TrialRng, pool: &[BiRelation]) -> BiRelation {
    let x = pool.choose(rng).expect("nonempty").clone();
    let y = pool.choose(rng).expect("nonempty");
    match rng.gen_range(0..3) {
        0 => x,
        1 => x.add(y).expect("same ambient"),
        _ => x.compose(y).expect("same ambient"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Kind;

    #[test]
    fn replayable() {
        let mut a = trial_rng(7, 3);
        let mut b = trial_rng(7, 3);
        let ga = group(&mut a, 3, 144);
        assert_eq!(ga, group(&mut b, 3, 144));
        assert_eq!(endogeny(&mut a, &ga), endogeny(&mut b, &ga));
    }

    #[test]
    fn draws_have_the_intended_kinds() {
        for t in 0..40 {
            let mut rng = trial_rng(1, t);
            let a = group(&mut rng, 3, 144);
            assert_eq!(endogeny(&mut rng, &a).kind(), Kind::Endogeny);
            assert_ne!(quasi(&mut rng, &a).kind(), Kind::Neither);
        }
    }

    #[test]
    fn factors() {
        assert_eq!(invariant_factors(&[4, 6]), vec![2, 12]);
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[12, 4]), vec![4, 12]);
    }
}
