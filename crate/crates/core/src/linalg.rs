//! Exact dense linear algebra over rational and complex-rational scalars.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::rational::{self, ComplexRational, Rational};

/// Field operations plus the conjugation needed for weighted inner products.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    fn from_rational(value: Rational) -> Self;
    fn real_part(&self) -> Rational;
    fn to_f64(&self) -> f64 {
        rational::to_f64(&self.real_part())
    }
}

impl Scalar for Rational {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rational(value: Rational) -> Self {
        value
    }
    fn real_part(&self) -> Rational {
        self.clone()
    }
}

impl Scalar for ComplexRational {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn from_rational(value: Rational) -> Self {
        Complex::new(value, Rational::zero())
    }
    fn real_part(&self) -> Rational {
        self.re.clone()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).conj());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * factor.clone()).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = S::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).clone() - factor.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![S::zero(); self.cols];
                v[free] = S::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, free).clone();
                }
                v
            })
            .collect()
    }

    /// Linearly independent columns spanning the column space.
    pub fn column_basis(&self) -> Vec<Vec<S>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }
}

/// Weighted inner product `Σ u_i conj(v_i) w_i`.
pub fn inner<S: Scalar>(u: &[S], v: &[S], weights: &[Rational]) -> S {
    debug_assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .zip(weights)
        .filter(|((a, b), _)| !a.is_zero() && !b.is_zero())
        .fold(S::zero(), |acc, ((a, b), w)| acc + a.clone() * b.conj() * S::from_rational(w.clone()))
}

/// Rank of a family of vectors of common length `dim`.
pub fn rank_of<S: Scalar>(dim: usize, vectors: &[Vec<S>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank().min(dim)
}

/// Orthogonal projection onto the span of a family of vectors, for a
/// diagonal weighted inner product.
#[derive(Clone, Debug)]
pub struct Projector<S> {
    weights: Vec<Rational>,
    basis: Vec<Vec<S>>,
    norms: Vec<S>,
}

impl<S: Scalar> Projector<S> {
    /// Weighted Gram–Schmidt; dependent vectors are dropped.
    pub fn new(weights: Vec<Rational>, vectors: &[Vec<S>]) -> Self {
        let mut proj = Projector { weights, basis: Vec::new(), norms: Vec::new() };
        for v in vectors {
            proj.push(v.clone());
        }
        proj
    }

    /// Adds a vector to the spanning family; returns whether the span grew.
    pub fn push(&mut self, v: Vec<S>) -> bool {
        let r = self.residual(&v);
        if r.iter().all(Zero::is_zero) {
            return false;
        }
        let n = inner(&r, &r, &self.weights);
        self.basis.push(r);
        self.norms.push(n);
        true
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn orthogonal_basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn project(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); v.len()];
        for (q, n) in self.basis.iter().zip(&self.norms) {
            let c = inner(v, q, &self.weights) / n.clone();
            if c.is_zero() {
                continue;
            }
            for (o, qi) in out.iter_mut().zip(q) {
                if !qi.is_zero() {
                    *o = o.clone() + c.clone() * qi.clone();
                }
            }
        }
        out
    }

    /// `v - P v`.
    pub fn residual(&self, v: &[S]) -> Vec<S> {
        let p = self.project(v);
        v.iter().zip(p).map(|(a, b)| a.clone() - b).collect()
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.residual(v).iter().all(Zero::is_zero)
    }

    /// `⟨P v, v⟩`, computed as `Σ |⟨v, q⟩|² / ⟨q, q⟩`.
    pub fn quadratic_form(&self, v: &[S]) -> S {
        self.basis.iter().zip(&self.norms).fold(S::zero(), |acc, (q, n)| {
            let c = inner(v, q, &self.weights);
            acc + c.clone() * c.conj() / n.clone()
        })
    }

    /// Dense matrix of the projection in the coordinate basis.
    pub fn matrix(&self) -> Matrix<S> {
        let d = self.dim();
        let columns: Vec<Vec<S>> = (0..d)
            .map(|j| {
                let mut e = vec![S::zero(); d];
                e[j] = S::one();
                self.project(&e)
            })
            .collect();
        Matrix::from_columns(d, &columns)
    }
}

/// Weighted adjoint `W_dom⁻¹ A* W_cod` of a map between weighted coordinate spaces.
pub fn weighted_adjoint<S: Scalar>(a: &Matrix<S>, dom_weights: &[Rational], cod_weights: &[Rational]) -> Matrix<S> {
    assert_eq!(a.cols(), dom_weights.len());
    assert_eq!(a.rows(), cod_weights.len());
    let mut t = a.conj_transpose();
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            if t.get(i, j).is_zero() {
                continue;
            }
            let w = S::from_rational(cod_weights[j].clone() / dom_weights[i].clone());
            let v = t.get(i, j).clone() * w;
            t.set(i, j, v);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn projector_matches_formula() {
        let w = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
        let v = vec![vec![int(1), int(1), int(0)]];
        let p = Projector::new(w.clone(), &v);
        let pm = p.matrix();
        assert_eq!(pm.mul(&pm), pm);
        // ⟨P e0, e0⟩ = |⟨e0, v⟩|² / ⟨v, v⟩ = (1/2)² / (3/4)
        assert_eq!(p.quadratic_form(&[int(1), int(0), int(0)]), rat(1, 3));
        let adj = weighted_adjoint(&pm, &w, &w);
        assert_eq!(adj, pm);
    }

    #[test]
    fn dependent_vectors_are_dropped() {
        let w = vec![int(1); 3];
        let p = Projector::new(w, &[vec![int(1), int(2), int(0)], vec![int(2), int(4), int(0)]]);
        assert_eq!(p.rank(), 1);
        assert!(p.contains(&[int(-1), int(-2), int(0)]));
        assert!(!p.contains(&[int(1), int(0), int(0)]));
    }

    #[test]
    fn complex_inner_product_conjugates() {
        let i = Complex::new(int(0), int(1));
        let one = ComplexRational::one();
        let w = vec![int(1)];
        assert_eq!(inner(&[i.clone()], &[one.clone()], &w), i.clone());
        assert_eq!(inner(&[one], &[i.clone()], &w), -i);
    }
}
