//! Dense exact linear algebra over ℚ and 𝔽_p, used for field-coefficient
//! homology and for the subspace calculus behind the spectral sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A field we can run exact Gaussian elimination over.
pub trait PageField: Clone + std::fmt::Debug {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, x: &BigInt) -> Self::Elem;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }
}

/// The rationals, with arbitrary-precision entries.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl PageField for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_bigint(&self, x: &BigInt) -> BigRational {
        BigRational::from_integer(x.clone())
    }
}

/// The prime field 𝔽_p.
#[derive(Debug, Clone, Copy)]
pub struct ModP {
    p: u64,
}

impl ModP {
    pub fn new(p: u64) -> ModP {
        assert!(p >= 2);
        ModP { p }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
}

impl PageField for ModP {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0);
        let mut e = self.p - 2;
        let mut base = *a % self.p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
    fn from_bigint(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = ((x % &m) + &m) % &m;
        let (_, digits) = r.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
}

/// Dense matrix over a [`PageField`].
#[derive(Debug, Clone)]
pub struct FMat<F: PageField> {
    pub field: F,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F::Elem>,
}

impl<F: PageField> FMat<F> {
    pub fn zero(field: &F, rows: usize, cols: usize) -> FMat<F> {
        FMat { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> FMat<F> {
        let mut m = FMat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_int_matrix(field: &F, m: &crate::homology::SparseIntMatrix) -> FMat<F> {
        let mut out = FMat::zero(field, m.rows, m.cols);
        for (&(i, j), v) in m.iter() {
            out.set(i, j, field.from_bigint(v));
        }
        out
    }

    pub fn from_columns(field: &F, rows: usize, cols: &[Vec<F::Elem>]) -> FMat<F> {
        let mut out = FMat::zero(field, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                out.set(i, j, v.clone());
            }
        }
        out
    }

    pub fn at(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    if !f.is_zero(self.at(i, j)) && !f.is_zero(&v[j]) {
                        acc = f.add(&acc, &f.mul(self.at(i, j), &v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Row-reduces in place; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(sel) = (row..self.rows).find(|&i| !f.is_zero(self.at(i, col))) else {
                continue;
            };
            for j in 0..self.cols {
                let a = self.at(row, j).clone();
                let b = self.at(sel, j).clone();
                self.set(row, j, b);
                self.set(sel, j, a);
            }
            let inv = f.inv(self.at(row, col));
            for j in 0..self.cols {
                let v = f.mul(self.at(row, j), &inv);
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i != row && !f.is_zero(self.at(i, col)) {
                    let c = self.at(i, col).clone();
                    for j in 0..self.cols {
                        let v = f.sub(self.at(i, j), &f.mul(&c, self.at(row, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Basis of the (right) kernel, as columns.
    pub fn kernel(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let mut red = self.clone();
        let pivots = red.row_reduce();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(red.at(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Solves self·x = b, if consistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows);
        let f = &self.field;
        let mut aug = FMat::zero(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.row_reduce();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }
}

/// A subspace of kⁿ, stored as an independent spanning set of columns.
#[derive(Debug, Clone)]
pub struct Subspace<F: PageField> {
    field: F,
    ambient: usize,
    basis: Vec<Vec<F::Elem>>,
}

impl<F: PageField> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Subspace<F> {
        Subspace { field: field.clone(), ambient, basis: Vec::new() }
    }

    pub fn from_span(field: &F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Subspace<F> {
        let mut s = Subspace::zero(field, ambient);
        for v in vectors {
            s.insert(v.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }

    /// Adds a vector if independent of the current basis; returns whether
    /// the dimension grew.
    pub fn insert(&mut self, v: Vec<F::Elem>) -> bool {
        assert_eq!(v.len(), self.ambient);
        if self.contains(&v) {
            return false;
        }
        self.basis.push(v);
        true
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        if self.basis.is_empty() {
            return v.iter().all(|x| self.field.is_zero(x));
        }
        let m = FMat::from_columns(&self.field, self.ambient, &self.basis);
        m.solve(v).is_some()
    }

    /// Coordinates of v in the stored basis, when v lies in the subspace.
    pub fn coords(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        if self.basis.is_empty() {
            return v.iter().all(|x| self.field.is_zero(x)).then(Vec::new);
        }
        let m = FMat::from_columns(&self.field, self.ambient, &self.basis);
        m.solve(v)
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v.clone());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modp_inverse() {
        let f = ModP::new(7);
        for a in 1..7u64 {
            assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }
    }

    #[test]
    fn rational_rank_and_kernel() {
        let f = Rationals;
        let m = crate::homology::SparseIntMatrix::from_dense(&[
            vec![1, 2, 3],
            vec![2, 4, 6],
            vec![1, 0, 1],
        ]);
        let fm = FMat::from_int_matrix(&f, &m);
        assert_eq!(fm.rank(), 2);
        let k = fm.kernel();
        assert_eq!(k.len(), 1);
        let img = fm.mul_vec(&k[0]);
        assert!(img.iter().all(|x| f.is_zero(x)));
    }

    #[test]
    fn subspace_ops() {
        let f = ModP::new(3);
        let mut s = Subspace::zero(&f, 3);
        assert!(s.insert(vec![1, 0, 0]));
        assert!(s.insert(vec![1, 1, 0]));
        assert!(!s.insert(vec![2, 1, 0]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[0, 2, 0]));
        assert!(!s.contains(&[0, 0, 1]));
    }
}
