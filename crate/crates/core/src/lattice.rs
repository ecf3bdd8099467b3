//! Integer lattices in `Z^n` kept in Hermite normal form, plus the Smith
//! normal form machinery used to present quotients `L/M` in invariant-factor
//! form.
//!
//! Vectors are rows. A lattice is stored by its echelon basis: pivots strictly
//! increase left to right, every pivot is positive, entries below a pivot are
//! zero and entries above a pivot lie in `[0, pivot)`. That basis is unique,
//! so derived `Eq`/`Hash` compare lattices exactly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Vector = Vec<Int>;
pub type Matrix = Vec<Vec<Int>>;

pub fn int(x: i64) -> Int {
    Int::from(x)
}

pub fn vector(xs: &[i64]) -> Vector {
    xs.iter().map(|&x| Int::from(x)).collect()
}

pub fn zero_vector(n: usize) -> Vector {
    vec![Int::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Int::one();
    v
}

pub fn is_zero_vector(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n).map(|i| unit_vector(n, i)).collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Int], m: &[Vector], cols: usize) -> Vector {
    debug_assert_eq!(v.len(), m.len());
    let mut out = zero_vector(cols);
    for (coef, row) in v.iter().zip(m) {
        if coef.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += coef * x;
        }
    }
    out
}

/// `v += coef * w`
fn axpy(v: &mut [Int], coef: &Int, w: &[Int]) {
    if coef.is_zero() {
        return;
    }
    for (a, b) in v.iter_mut().zip(w) {
        *a += coef * b;
    }
}

/// Quotient rounded towards the nearest integer, used during elimination to
/// keep remainders small.
fn round_div(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_mod_floor(b);
    let twice: Int = &r * 2;
    if twice.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Row-style Hermite normal form. When `transform` is given it receives the
/// same row operations, so that `transform * input = output` holds for the
/// full (unpruned) row list.
fn echelonize(dim: usize, rows: &mut Vec<Vector>, mut transform: Option<&mut Vec<Vector>>) -> usize {
    let m = rows.len();
    let mut pivot_row = 0;
    for col in 0..dim {
        if pivot_row == m {
            break;
        }
        loop {
            let best = (pivot_row..m)
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            if let Some(t) = transform.as_deref_mut() {
                t.swap(pivot_row, best);
            }
            let mut done = true;
            for i in pivot_row + 1..m {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = round_div(&rows[i][col], &rows[pivot_row][col]);
                let (head, tail) = rows.split_at_mut(i);
                axpy(&mut tail[0], &-&q, &head[pivot_row]);
                if let Some(t) = transform.as_deref_mut() {
                    let (th, tt) = t.split_at_mut(i);
                    axpy(&mut tt[0], &-&q, &th[pivot_row]);
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m && !rows[pivot_row][col].is_zero() {
            if rows[pivot_row][col].is_negative() {
                for x in rows[pivot_row].iter_mut() {
                    *x = -&*x;
                }
                if let Some(t) = transform.as_deref_mut() {
                    for x in t[pivot_row].iter_mut() {
                        *x = -&*x;
                    }
                }
            }
            let pivot = rows[pivot_row][col].clone();
            for i in 0..pivot_row {
                let q = rows[i][col].div_floor(&pivot);
                if q.is_zero() {
                    continue;
                }
                let (head, tail) = rows.split_at_mut(pivot_row);
                axpy(&mut head[i], &-&q, &tail[0]);
                if let Some(t) = transform.as_deref_mut() {
                    let (th, tt) = t.split_at_mut(pivot_row);
                    axpy(&mut th[i], &-&q, &tt[0]);
                }
            }
            pivot_row += 1;
        }
    }
    pivot_row
}

/// Left kernel of `rows` (as an `m x dim` matrix): a basis of all integer
/// `x` with `x * rows = 0`.
pub fn left_kernel(dim: usize, rows: &[Vector]) -> Vec<Vector> {
    let m = rows.len();
    let mut work = rows.to_vec();
    let mut t = identity_matrix(m);
    let rank = echelonize(dim, &mut work, Some(&mut t));
    let kernel: Vec<Vector> = t.split_off(rank);
    // Reduce the kernel basis so later products stay small.
    Lattice::new(m, kernel).rows
}

/// Some integer `x` with `x * rows = target`, if one exists.
pub fn solve_left(dim: usize, rows: &[Vector], target: &[Int]) -> Option<Vector> {
    let m = rows.len();
    let mut work = rows.to_vec();
    let mut t = identity_matrix(m);
    let rank = echelonize(dim, &mut work, Some(&mut t));
    work.truncate(rank);
    let coords = Lattice { dim, rows: work }.coordinates(target)?;
    Some(vec_mat(&coords, &t[..rank], m))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    rows: Vec<Vector>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(dim={}, [", self.dim)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", r.iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        write!(f, "])")
    }
}

impl Lattice {
    pub fn new(dim: usize, gens: Vec<Vector>) -> Self {
        let mut rows: Vec<Vector> = gens.into_iter().filter(|g| !is_zero_vector(g)).collect();
        debug_assert!(rows.iter().all(|r| r.len() == dim));
        let rank = echelonize(dim, &mut rows, None);
        rows.truncate(rank);
        Lattice { dim, rows }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice { dim, rows: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Lattice { dim, rows: identity_matrix(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect()
    }

    /// Coefficients of `v` in the echelon basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vector> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        let mut col = 0;
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if rest[col..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rest[p].div_mod_floor(&row[p]);
            if !r.is_zero() {
                return None;
            }
            axpy(&mut rest, &-&q, row);
            coords.push(q);
            col = p + 1;
        }
        if is_zero_vector(&rest) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut gens = self.rows.clone();
        gens.extend(other.rows.iter().cloned());
        Lattice::new(self.dim, gens)
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        if self.rows.is_empty() || other.rows.is_empty() {
            return Lattice::zero(self.dim);
        }
        let mut stacked = self.rows.clone();
        stacked.extend(other.rows.iter().map(|r| r.iter().map(|x| -x).collect::<Vector>()));
        let kernel = left_kernel(self.dim, &stacked);
        let k = self.rows.len();
        let gens = kernel.iter().map(|x| vec_mat(&x[..k], &self.rows, self.dim)).collect();
        Lattice::new(self.dim, gens)
    }

    /// Image under `v -> v * matrix` where `matrix` is `dim x cols`.
    pub fn map(&self, matrix: &[Vector], cols: usize) -> Lattice {
        let gens = self.rows.iter().map(|r| vec_mat(r, matrix, cols)).collect();
        Lattice::new(cols, gens)
    }

    /// Keeps the listed coordinates, in the listed order.
    pub fn project(&self, cols: &[usize]) -> Lattice {
        let gens = self.rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        Lattice::new(cols.len(), gens)
    }

    /// Places the lattice into `Z^total` starting at coordinate `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> Lattice {
        let gens = self
            .rows
            .iter()
            .map(|r| {
                let mut v = zero_vector(total);
                v[offset..offset + self.dim].clone_from_slice(r);
                v
            })
            .collect();
        Lattice::new(total, gens)
    }

    /// `|sup : self|` for `self` a sublattice of `sup` of the same rank.
    pub fn index_in(&self, sup: &Lattice) -> Option<Int> {
        if self.rank() != sup.rank() || !self.is_subset_of(sup) {
            return None;
        }
        let prod = |l: &Lattice| {
            l.rows
                .iter()
                .map(|r| r.iter().find(|x| !x.is_zero()).cloned().expect("nonzero row"))
                .fold(Int::one(), |acc, p| acc * p)
        };
        Some(prod(self) / prod(sup))
    }

    /// The lattice of integer points in the rational span.
    pub fn saturation(&self) -> Lattice {
        // Complement the left kernel twice: x with x.w = 0 for all w in the
        // orthogonal complement.
        let transposed: Vec<Vector> =
            (0..self.dim).map(|c| self.rows.iter().map(|r| r[c].clone()).collect()).collect();
        let orth = left_kernel(self.rows.len(), &transposed);
        if orth.is_empty() {
            return Lattice::full(self.dim);
        }
        let orth_t: Vec<Vector> =
            (0..self.dim).map(|c| orth.iter().map(|r| r[c].clone()).collect()).collect();
        Lattice::new(self.dim, left_kernel(orth.len(), &orth_t))
    }
}

/// Smith normal form `U * m * V = D` of an `rows x cols` matrix, keeping the
/// column transform `V` and its inverse.
pub struct SmithForm {
    pub diagonal: Vec<Int>,
    pub v: Matrix,
    pub v_inv: Matrix,
}

pub fn smith_form(input: &[Vector], cols: usize) -> SmithForm {
    let mut a: Vec<Vector> = input.to_vec();
    let rows = a.len();
    let mut v = identity_matrix(cols);
    let mut v_inv = identity_matrix(cols);

    // Column op: col_j += q * col_i
    fn col_add(a: &mut [Vector], v: &mut [Vector], v_inv: &mut [Vector], j: usize, i: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for row in a.iter_mut() {
            let t = &row[i] * q;
            row[j] += t;
        }
        for row in v.iter_mut() {
            let t = &row[i] * q;
            row[j] += t;
        }
        // V' = V E with E = I + q e_i e_j^T, so V'^{-1} = (I - q e_i e_j^T) V^{-1}
        let rj = v_inv[j].clone();
        axpy(&mut v_inv[i], &-q, &rj);
    }
    fn col_swap(a: &mut [Vector], v: &mut [Vector], v_inv: &mut [Vector], i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    }

    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        col_swap(&mut a, &mut v, &mut v_inv, t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = round_div(&a[i][t], &a[t][t]);
                let (head, tail) = a.split_at_mut(i);
                axpy(&mut tail[0], &-&q, &head[t]);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = round_div(&a[t][j], &a[t][t]);
                col_add(&mut a, &mut v, &mut v_inv, j, t, &-q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the trailing block by the pivot
                let mut bad_row = None;
                'outer: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !a[i][j].is_multiple_of(&a[t][t]) {
                            bad_row = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad_row {
                    None => break,
                    Some(i) => {
                        let ri = a[i].clone();
                        axpy(&mut a[t], &Int::one(), &ri);
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of row/column t onto the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                if !a[i][t].is_zero() && best.is_none_or(|(bi, bj)| a[i][t].abs() < a[bi][bj].abs()) {
                    best = Some((i, t));
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && best.is_none_or(|(bi, bj)| a[t][j].abs() < a[bi][bj].abs()) {
                    best = Some((t, j));
                }
            }
            if let Some((bi, bj)) = best {
                a.swap(t, bi);
                col_swap(&mut a, &mut v, &mut v_inv, t, bj);
            }
        }
        if a[t][t].is_negative() {
            for row in a.iter_mut() {
                row[t] = -&row[t];
            }
            for row in v.iter_mut() {
                row[t] = -&row[t];
            }
            for x in v_inv[t].iter_mut() {
                *x = -&*x;
            }
        }
        diagonal.push(a[t][t].clone());
        t += 1;
    }
    SmithForm { diagonal, v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(dim: usize, gens: &[&[i64]]) -> Lattice {
        Lattice::new(dim, gens.iter().map(|g| vector(g)).collect())
    }

    #[test]
    fn hnf_is_canonical() {
        let a = lat(2, &[&[2, 4], &[6, 8]]);
        let b = lat(2, &[&[2, 0], &[0, 4]]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[vector(&[2, 0]), vector(&[0, 4])]);
    }

    #[test]
    fn intersection_of_cyclic_lattices() {
        let a = lat(1, &[&[2]]);
        let b = lat(1, &[&[3]]);
        assert_eq!(a.intersect(&b), lat(1, &[&[6]]));
        assert_eq!(a.sum(&b), Lattice::full(1));
    }

    #[test]
    fn kernel_and_saturation() {
        let k = left_kernel(2, &[vector(&[1, 2]), vector(&[2, 4])]);
        assert_eq!(k, vec![vector(&[2, -1])]);
        let s = lat(2, &[&[2, 4]]).saturation();
        assert_eq!(s, lat(2, &[&[1, 2]]));
    }

    #[test]
    fn smith_of_diagonal_pair() {
        let sf = smith_form(&[vector(&[2, 0]), vector(&[0, 3])], 2);
        assert_eq!(sf.diagonal, vec![int(1), int(6)]);
        let prod: Vec<Vector> = (0..2).map(|i| vec_mat(&sf.v[i], &sf.v_inv, 2)).collect();
        assert_eq!(prod, identity_matrix(2));
    }
}
