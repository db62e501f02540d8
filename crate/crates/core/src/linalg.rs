//! Dense exact linear algebra over the rationals.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::{fmt_rational, rat, Rational};

/// Row-major dense rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_with_order(&(0..self.cols).collect::<Vec<_>>())
    }

    /// RREF where pivots are searched in the given column order.
    pub fn rref_with_order(&mut self, order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = Rational::one() / self[(r, c)].clone();
            for j in 0..self.cols {
                if !self[(r, j)].is_zero() {
                    self[(r, j)] = &self[(r, j)] * &inv;
                }
            }
            let pivot_row: Vec<(usize, Rational)> = (0..self.cols)
                .filter(|&j| !self[(r, j)].is_zero())
                .map(|j| (j, self[(r, j)].clone()))
                .collect();
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for (j, v) in &pivot_row {
                    self[(i, *j)] = &self[(i, *j)] - &f * v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : A x = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Solve `A x = b`: a particular solution and a null-space basis, or
    /// `None` when inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<AffineSpace> {
        self.solve_with_order(b, &(0..self.cols).collect::<Vec<_>>())
    }

    /// As [`Matrix::solve`], with pivots chosen in `order`; the free
    /// columns are then the ones pivoting could not reach.
    pub fn solve_with_order(&self, b: &[Rational], order: &[usize]) -> Option<AffineSpace> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref_with_order(order);
        let rank = pivots.len();
        if (rank..self.rows).any(|i| !aug[(i, self.cols)].is_zero()) {
            return None;
        }
        let mut particular = vec![Rational::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            particular[p] = aug[(r, self.cols)].clone();
        }
        let free: Vec<usize> = order.iter().copied().filter(|c| !pivots.contains(c)).collect();
        let directions = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -aug[(r, f)].clone();
                }
                v
            })
            .collect();
        Some(AffineSpace { particular, directions, free_columns: free })
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// `particular + span(directions)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub particular: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
    /// Columns left free by the elimination, one per direction.
    pub free_columns: Vec<usize>,
}

impl AffineSpace {
    pub fn is_unique(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Rank of a set of vectors.
pub fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

/// Whether two finite sets of vectors span the same subspace.
pub fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    let ra = rank_of(a);
    let rb = rank_of(b);
    if ra != rb {
        return false;
    }
    let both: Vec<Vec<Rational>> = a.iter().chain(b).cloned().collect();
    rank_of(&both) == ra
}

/// Exact 2×2 matrix acting on row vectors from the right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mat2(#[serde(serialize_with = "ser_mat2")] pub [[Rational; 2]; 2]);

fn ser_mat2<S: serde::Serializer>(m: &[[Rational; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for row in m {
        seq.serialize_element(&[fmt_rational(&row[0]), fmt_rational(&row[1])])?;
    }
    seq.end()
}

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(rat(a), rat(b), rat(c), rat(d))
    }

    pub fn identity() -> Self {
        Mat2::from_ints(1, 0, 0, 1)
    }

    /// The swap `[[0,1],[1,0]]`.
    pub fn swap() -> Self {
        Mat2::from_ints(0, 1, 1, 0)
    }

    pub fn det(&self) -> Rational {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> Rational {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(
            &m[1][1] / &d,
            -&m[0][1] / &d,
            -&m[1][0] / &d,
            &m[0][0] / &d,
        ))
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Rational; 2]) -> [Rational; 2] {
        let m = &self.0;
        [
            &v[0] * &m[0][0] + &v[1] * &m[1][0],
            &v[0] * &m[0][1] + &v[1] * &m[1][1],
        ]
    }

    pub fn pow(&self, n: u32) -> Mat2 {
        (0..n).fold(Mat2::identity(), |acc, _| &acc * self)
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            &a[0][0] * &b[0][0] + &a[0][1] * &b[1][0],
            &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1],
            &a[1][0] * &b[0][0] + &a[1][1] * &b[1][0],
            &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1],
        )
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            fmt_rational(&m[0][0]),
            fmt_rational(&m[0][1]),
            fmt_rational(&m[1][0]),
            fmt_rational(&m[1][1])
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ker = a.null_space();
        assert_eq!(ker.len(), 1);
        assert!(a.mul_vec(&ker[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let s = a.solve(&[rat(3), rat(1)]).unwrap();
        assert!(s.is_unique());
        assert_eq!(s.particular, vec![rat(2), rat(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(b.solve(&[rat(1), rat(3)]).is_none());
        let s = b.solve(&[rat(1), rat(2)]).unwrap();
        assert_eq!(s.directions.len(), 1);
    }

    #[test]
    fn spans() {
        let a = vec![vec![rat(1), rat(0)], vec![rat(1), rat(1)]];
        let b = vec![vec![rat(0), rat(2)], vec![rat(3), rat(0)]];
        assert!(same_span(&a, &b));
        assert!(!same_span(&a[..1], &b[..1]));
    }

    #[test]
    fn mat2_inverse() {
        let r = Mat2::new(rat(2), frac(1, 3), rat(-1), rat(5));
        assert!((&r * &r.inverse().unwrap()).is_identity());
        let v = [rat(1), rat(2)];
        assert_eq!(r.apply_row(&v), [rat(0), frac(31, 3)]);
    }
}
