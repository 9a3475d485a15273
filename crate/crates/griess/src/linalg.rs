//! Exact linear algebra over the rationals.
//!
//! Elimination clears each pivot row to integers and runs fraction-free
//! (Bareiss-style) updates, normalizing back to rationals only when the
//! reduced echelon form is assembled.  Everything is deterministic: pivots
//! are chosen by column order, never by magnitude.

use crate::error::{Error, Result};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Vector = Vec<Rat>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major dense storage.
    pub entries: Vec<Rat>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        Matrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vector {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !x[j].is_zero() {
                        s += self[(i, j)].clone() * x[j].clone();
                    }
                }
                s
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut m = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other[(k, j)].is_zero() {
                        continue;
                    }
                    let add = self[(i, k)].clone() * other[(k, j)].clone();
                    m[(i, j)] += add;
                }
            }
        }
        m
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }
}

/// Reduced row echelon form with pivot bookkeeping.
#[derive(Clone, Debug)]
pub struct Rref {
    pub mat: Matrix,
    pub pivots: Vec<usize>,
}

/// Fraction-free forward elimination on an integer copy, then rational
/// back-substitution to reduced echelon form.
pub fn rref(m: &Matrix) -> Rref {
    // Clear each row to integers.
    let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut lcm = BigInt::one();
        for j in 0..m.cols {
            let d = m[(i, j)].denom();
            lcm = num_integer::lcm(lcm, d.clone());
        }
        let row: Vec<BigInt> = (0..m.cols)
            .map(|j| {
                let v = &m[(i, j)];
                v.numer() * (&lcm / v.denom())
            })
            .collect();
        int_rows.push(row);
    }
    // Classical Bareiss forward elimination: rows below the pivot update as
    // (a*p - b*q)/prev, with the division exact by Sylvester's identity.
    let rows = m.rows;
    let cols = m.cols;
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !int_rows[i][c].is_zero()) else {
            continue;
        };
        int_rows.swap(r, p);
        let pivot = int_rows[r][c].clone();
        for i in (r + 1)..rows {
            let head = int_rows[i][c].clone();
            for j in (c + 1)..cols {
                let v = &int_rows[i][j] * &pivot - &head * &int_rows[r][j];
                int_rows[i][j] = &v / &prev;
            }
            int_rows[i][c] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Rational back-substitution to reduced echelon form.
    let rank = pivots.len();
    let mut mat = Matrix::zero(rank, cols);
    for ri in 0..rank {
        let c = pivots[ri];
        let pivot = int_rows[ri][c].clone();
        for j in 0..cols {
            mat[(ri, j)] = Rat::new(int_rows[ri][j].clone(), pivot.clone());
        }
    }
    for ri in (0..rank).rev() {
        for above in 0..ri {
            let c = pivots[ri];
            if mat[(above, c)].is_zero() {
                continue;
            }
            let f = mat[(above, c)].clone();
            for j in 0..cols {
                let sub = f.clone() * mat[(ri, j)].clone();
                mat[(above, j)] -= sub;
            }
        }
    }
    Rref { mat, pivots }
}

/// A subspace of `k^n` stored as a reduced-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    /// Basis rows in reduced echelon form.
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zero(0, ambient),
            pivots: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn from_vectors(ambient: usize, vectors: &[Vector]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let r = rref(&Matrix::from_rows(vectors.to_vec()));
        Subspace {
            ambient,
            basis: r.mat,
            pivots: r.pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// Residual of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, v: &[Rat]) -> Vector {
        assert_eq!(v.len(), self.ambient);
        let mut r = v.to_vec();
        for (bi, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for j in 0..self.ambient {
                let sub = c.clone() * self.basis[(bi, j)].clone();
                r[j] -= sub;
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of `v` in this basis; None if not a member.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vector> {
        let mut r = v.to_vec();
        let mut coords = vec![Rat::zero(); self.dim()];
        for (bi, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            coords[bi] = c.clone();
            for j in 0..self.ambient {
                let sub = c.clone() * self.basis[(bi, j)].clone();
                r[j] -= sub;
            }
        }
        if r.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }
}

/// Rank and kernel of `M` as a linear map `k^cols -> k^rows`.
pub fn rref_kernel(m: &Matrix) -> (usize, Subspace) {
    let r = rref(m);
    let rank = r.pivots.len();
    let free: Vec<usize> = (0..m.cols).filter(|c| !r.pivots.contains(c)).collect();
    let mut basis_rows: Vec<Vector> = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rat::zero(); m.cols];
        v[f] = Rat::one();
        for (ri, &p) in r.pivots.iter().enumerate() {
            v[p] = -r.mat[(ri, f)].clone();
        }
        basis_rows.push(v);
    }
    (rank, Subspace::from_vectors(m.cols, &basis_rows))
}

/// Particular solution of `M x = b`, if consistent.
pub fn solve(m: &Matrix, b: &[Rat]) -> Option<Vector> {
    assert_eq!(b.len(), m.rows);
    // rref of [M | b]
    let mut aug = Matrix::zero(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = b[i].clone();
    }
    let r = rref(&aug);
    if r.pivots.contains(&m.cols) {
        return None; // inconsistent
    }
    let mut x = vec![Rat::zero(); m.cols];
    for (ri, &p) in r.pivots.iter().enumerate() {
        x[p] = r.mat[(ri, m.cols)].clone();
    }
    Some(x)
}

/// Solutions of `M x = b` for many right-hand sides through one
/// elimination; None if any system is inconsistent.
pub fn solve_many(m: &Matrix, targets: &[Vector]) -> Option<Vec<Vector>> {
    let k = targets.len();
    let mut aug = Matrix::zero(m.rows, m.cols + k);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        for (t, b) in targets.iter().enumerate() {
            aug[(i, m.cols + t)] = b[i].clone();
        }
    }
    let r = rref(&aug);
    if r.pivots.iter().any(|&p| p >= m.cols) {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    for t in 0..k {
        let mut x = vec![Rat::zero(); m.cols];
        for (ri, &p) in r.pivots.iter().enumerate() {
            x[p] = r.mat[(ri, m.cols + t)].clone();
        }
        out.push(x);
    }
    Some(out)
}

/// Incrementally built echelon span for cheap membership tests.
#[derive(Clone, Debug, Default)]
pub struct IncrementalSpan {
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl IncrementalSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; if a nonzero residual remains it
    /// is inserted and `true` is returned.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x -= c.clone() * y.clone();
            }
        }
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].clone().recip();
        for x in r.iter_mut() {
            *x *= inv.clone();
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut probe = self.clone();
        !probe.insert(v)
    }
}

/// `{ x : M x in target }`.
pub fn solve_preimage(m: &Matrix, target: &Subspace) -> Result<Subspace> {
    if target.ambient != m.rows {
        return Err(Error::AmbientMismatch(target.ambient, m.rows));
    }
    // Residual map: x -> reduce(Mx, target); its kernel is the preimage.
    let mut res = Matrix::zero(m.rows, m.cols);
    for j in 0..m.cols {
        let col: Vector = (0..m.rows).map(|i| m[(i, j)].clone()).collect();
        let red = target.reduce(&col);
        for i in 0..m.rows {
            res[(i, j)] = red[i].clone();
        }
    }
    let (_, ker) = rref_kernel(&res);
    Ok(ker)
}

pub enum SubspaceOp {
    Intersect,
    Sum,
    QuotientBasis,
}

/// Exact subspace arithmetic; `QuotientBasis` returns representatives in `a`
/// spanning `a / (a âˆ© b)`.
pub fn subspace_combine(a: &Subspace, b: &Subspace, op: SubspaceOp) -> Result<Subspace> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch(a.ambient, b.ambient));
    }
    match op {
        SubspaceOp::Sum => {
            let stacked = a.basis.vstack(&b.basis);
            let r = rref(&stacked);
            Ok(Subspace {
                ambient: a.ambient,
                basis: r.mat,
                pivots: r.pivots,
            })
        }
        SubspaceOp::Intersect => {
            // x = u A with residual(u A, b) = 0; rows of R are residuals of
            // a's basis vectors, valid u form the kernel of R^T acting on u.
            if a.dim() == 0 || b.dim() == 0 {
                return Ok(Subspace::zero(a.ambient));
            }
            let mut rt = Matrix::zero(a.ambient, a.dim());
            for bi in 0..a.dim() {
                let red = b.reduce(a.basis.row(bi));
                for j in 0..a.ambient {
                    rt[(j, bi)] = red[j].clone();
                }
            }
            let (_, ker) = rref_kernel(&rt);
            let mut vecs = Vec::new();
            for ki in 0..ker.dim() {
                let u = ker.basis.row(ki);
                let mut v = vec![Rat::zero(); a.ambient];
                for (bi, coef) in u.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    for j in 0..a.ambient {
                        let add = coef.clone() * a.basis[(bi, j)].clone();
                        v[j] += add;
                    }
                }
                vecs.push(v);
            }
            Ok(Subspace::from_vectors(a.ambient, &vecs))
        }
        SubspaceOp::QuotientBasis => {
            let mut reps: Vec<Vector> = Vec::new();
            let mut span = b.clone();
            for bi in 0..a.dim() {
                let v = a.basis.row(bi).to_vec();
                if !span.contains(&v) {
                    reps.push(v.clone());
                    let stacked = span.basis.vstack(&Matrix::from_rows(vec![v]));
                    let r = rref(&stacked);
                    span = Subspace {
                        ambient: a.ambient,
                        basis: r.mat,
                        pivots: r.pivots,
                    };
                }
            }
            // representatives, not echelonized against each other
            Ok(Subspace {
                ambient: a.ambient,
                pivots: vec![],
                basis: if reps.is_empty() {
                    Matrix::zero(0, a.ambient)
                } else {
                    Matrix::from_rows(reps)
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn rref_kernel_examples() {
        let (rank, ker) = rref_kernel(&Matrix::identity(3));
        assert_eq!((rank, ker.dim()), (3, 0));
        let (rank, ker) = rref_kernel(&Matrix::zero(2, 5));
        assert_eq!((rank, ker.dim()), (0, 5));
        let m = Matrix::from_rows(vec![v(&[1, 2]), v(&[2, 4])]);
        let (rank, ker) = rref_kernel(&m);
        assert_eq!((rank, ker.dim()), (1, 1));
        assert!(ker.contains(&[rat(-2), rat(1)]));
    }

    #[test]
    fn rank_nullity_random() {
        let m = Matrix::from_rows(vec![
            vec![ratio(1, 2), rat(3), rat(0), rat(-1)],
            vec![rat(1), rat(6), rat(0), rat(-2)],
            vec![rat(0), rat(0), ratio(2, 3), rat(5)],
        ]);
        let (rank, ker) = rref_kernel(&m);
        assert_eq!(rank + ker.dim(), 4);
        for ki in 0..ker.dim() {
            let prod = m.mul_vec(ker.basis.row(ki));
            assert!(prod.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_preimage() {
        let m = Matrix::from_rows(vec![v(&[1, 1]), v(&[1, -1])]);
        let x = solve(&m, &v(&[3, 1])).unwrap();
        assert_eq!(x, v(&[2, 1]));
        assert!(solve(&Matrix::from_rows(vec![v(&[1, 1]), v(&[2, 2])]), &v(&[1, 3])).is_none());

        // identity, target full -> full; target zero -> kernel
        let id = Matrix::identity(3);
        let full = solve_preimage(&id, &Subspace::full(3)).unwrap();
        assert_eq!(full.dim(), 3);
        let zero = solve_preimage(&id, &Subspace::zero(3)).unwrap();
        assert_eq!(zero.dim(), 0);

        // preimage of the image is everything
        let m = Matrix::from_rows(vec![
            v(&[1, 2, 0, 1]),
            v(&[0, 1, 1, 0]),
            v(&[1, 3, 1, 1]),
            v(&[2, 4, 0, 2]),
            v(&[0, 0, 0, 0]),
            v(&[1, 0, -2, 1]),
        ]);
        let cols: Vec<Vector> = (0..4)
            .map(|j| (0..6).map(|i| m[(i, j)].clone()).collect())
            .collect();
        let image = Subspace::from_vectors(6, &cols);
        let pre = solve_preimage(&m, &image).unwrap();
        assert_eq!(pre.dim(), 4);
    }

    #[test]
    fn combine_dimension_formula() {
        let a = Subspace::from_vectors(4, &[v(&[1, 0, 1, 0]), v(&[0, 1, 0, 1])]);
        let b = Subspace::from_vectors(4, &[v(&[1, 1, 1, 1]), v(&[1, 0, 0, 0])]);
        let sum = subspace_combine(&a, &b, SubspaceOp::Sum).unwrap();
        let int = subspace_combine(&a, &b, SubspaceOp::Intersect).unwrap();
        assert_eq!(sum.dim() + int.dim(), a.dim() + b.dim());
        let same = subspace_combine(&a, &a, SubspaceOp::Intersect).unwrap();
        assert_eq!(same.dim(), a.dim());
        let zsum = subspace_combine(&a, &Subspace::zero(4), SubspaceOp::Sum).unwrap();
        assert_eq!(zsum.dim(), a.dim());
        // intersection members lie in both
        for i in 0..int.dim() {
            assert!(a.contains(int.basis.row(i)));
            assert!(b.contains(int.basis.row(i)));
        }
        let q = subspace_combine(&a, &b, SubspaceOp::QuotientBasis).unwrap();
        assert_eq!(q.basis.rows, a.dim() - int.dim());
        assert!(subspace_combine(&a, &Subspace::zero(3), SubspaceOp::Sum).is_err());
    }

    #[test]
    fn coordinates_round_trip() {
        let a = Subspace::from_vectors(3, &[v(&[1, 2, 3]), v(&[0, 1, 1])]);
        let x = vec![rat(2), rat(5), ratio(7, 1)];
        let c = a.coordinates(&x).unwrap();
        let mut back = vec![Rat::zero(); 3];
        for (bi, coef) in c.iter().enumerate() {
            for j in 0..3 {
                let add = coef.clone() * a.basis[(bi, j)].clone();
                back[j] += add;
            }
        }
        assert_eq!(back, x);
        assert!(a.coordinates(&v(&[1, 0, 0])).is_none());
    }
}
