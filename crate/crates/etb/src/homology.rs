//! Exact integral chain-complex homology: sparse Smith normal form with
//! optional unimodular transforms, homology groups with torsion, chain maps
//! and induced maps on homology, and integer-lattice solving.
//!
//! The sparse SNF picks pivots Markowitz-style (smallest entries first, ties
//! broken by least fill-in); a dense textbook SNF lives alongside as an
//! independent oracle.

use crate::field::{FMat, ModP, PageField, Rationals};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

// ---------------------------------------------------------------------------
// Sparse integer matrices
// ---------------------------------------------------------------------------

/// Sparse integer matrix; only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl SparseIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn set<T: Into<BigInt>>(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.rows && j < self.cols);
        let v = v.into();
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_to<T: Into<BigInt>>(&mut self, i: usize, j: usize, v: T) {
        let cur = self.get(i, j) + v.into();
        self.set(i, j, cur);
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &BigInt)> {
        self.entries.iter()
    }

    pub fn mul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = SparseIntMatrix::zero(self.rows, other.cols);
        let mut rows_of: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
        for (&(i, j), v) in &other.entries {
            rows_of.entry(i).or_default().push((j, v));
        }
        for (&(i, k), a) in &self.entries {
            if let Some(row) = rows_of.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, a * b);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Column j as a dense vector.
    pub fn col(&self, j: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(i, jj), v) in &self.entries {
            if jj == j {
                out[i] = v.clone();
            }
        }
        out
    }

    pub fn mul_dense_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(i, j), a) in &self.entries {
            if !v[j].is_zero() {
                out[i] += a * &v[j];
            }
        }
        out
    }

    pub fn from_dense(d: &[Vec<i64>]) -> SparseIntMatrix {
        let rows = d.len();
        let cols = d.first().map_or(0, |r| r.len());
        let mut m = SparseIntMatrix::zero(rows, cols);
        for (i, row) in d.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// Sparse triplet text: one `row col value` per line.
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        for (&(i, j), v) in &self.entries {
            s.push_str(&format!("{i} {j} {v}\n"));
        }
        s
    }
}

/// Dense integer matrix used for SNF transforms and lattice bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl DenseIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        DenseIntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        let mut acc = vec![BigInt::zero(); self.rows];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (i, slot) in acc.iter_mut().enumerate() {
                let a = self.at(i, j);
                if !a.is_zero() {
                    *slot += a * vj;
                }
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Which unimodular transforms to carry through the reduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct SnfFlags {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
    pub v_inv: bool,
}

impl SnfFlags {
    pub fn none() -> Self {
        SnfFlags::default()
    }
    pub fn all() -> Self {
        SnfFlags { u: true, u_inv: true, v: true, v_inv: true }
    }
}

/// U·M·V = diag(d₁, …, d_r) with d₁ | d₂ | … and dᵢ > 0.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero invariant factors, divisibility-chained.
    pub diag: Vec<BigInt>,
    pub u: Option<DenseIntMatrix>,
    pub u_inv: Option<DenseIntMatrix>,
    pub v: Option<DenseIntMatrix>,
    pub v_inv: Option<DenseIntMatrix>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Invariant factors > 1 (the torsion a cokernel would carry).
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    fn empty() -> SnfResult {
        SnfResult {
            rows: 0,
            cols: 0,
            diag: Vec::new(),
            u: None,
            u_inv: None,
            v: None,
            v_inv: None,
        }
    }
}

struct SnfCalc {
    rows: usize,
    row_data: Vec<BTreeMap<usize, BigInt>>,
    col_index: Vec<BTreeSet<usize>>,
    u: Option<DenseIntMatrix>,
    u_inv: Option<DenseIntMatrix>,
    v: Option<DenseIntMatrix>,
    v_inv: Option<DenseIntMatrix>,
}

impl SnfCalc {
    fn new(m: &SparseIntMatrix, flags: SnfFlags) -> Self {
        let mut row_data = vec![BTreeMap::new(); m.rows];
        let mut col_index = vec![BTreeSet::new(); m.cols];
        for (&(i, j), v) in m.iter() {
            row_data[i].insert(j, v.clone());
            col_index[j].insert(i);
        }
        SnfCalc {
            rows: m.rows,
            row_data,
            col_index,
            u: flags.u.then(|| DenseIntMatrix::identity(m.rows)),
            u_inv: flags.u_inv.then(|| DenseIntMatrix::identity(m.rows)),
            v: flags.v.then(|| DenseIntMatrix::identity(m.cols)),
            v_inv: flags.v_inv.then(|| DenseIntMatrix::identity(m.cols)),
        }
    }

    fn get(&self, i: usize, j: usize) -> BigInt {
        self.row_data[i].get(&j).cloned().unwrap_or_else(BigInt::zero)
    }

    fn set(&mut self, i: usize, j: usize, v: BigInt) {
        if v.is_zero() {
            self.row_data[i].remove(&j);
            self.col_index[j].remove(&i);
        } else {
            self.row_data[i].insert(j, v);
            self.col_index[j].insert(i);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let cols: BTreeSet<usize> = self.row_data[a]
            .keys()
            .chain(self.row_data[b].keys())
            .copied()
            .collect();
        self.row_data.swap(a, b);
        for &j in &cols {
            if self.row_data[a].contains_key(&j) {
                self.col_index[j].insert(a);
            } else {
                self.col_index[j].remove(&a);
            }
            if self.row_data[b].contains_key(&j) {
                self.col_index[j].insert(b);
            } else {
                self.col_index[j].remove(&b);
            }
        }
        // M' = E·M: U' = E·U, (U')⁻¹ = U⁻¹·E⁻¹
        if let Some(u) = &mut self.u {
            for j in 0..u.cols {
                u.data.swap(a * u.cols + j, b * u.cols + j);
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for i in 0..ui.rows {
                ui.data.swap(i * ui.cols + a, i * ui.cols + b);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let rows: Vec<usize> = self.col_index[a].union(&self.col_index[b]).copied().collect();
        for i in rows {
            let va = self.row_data[i].remove(&a);
            let vb = self.row_data[i].remove(&b);
            self.col_index[a].remove(&i);
            self.col_index[b].remove(&i);
            if let Some(v) = vb {
                self.row_data[i].insert(a, v);
                self.col_index[a].insert(i);
            }
            if let Some(v) = va {
                self.row_data[i].insert(b, v);
                self.col_index[b].insert(i);
            }
        }
        if let Some(v) = &mut self.v {
            for i in 0..v.rows {
                v.data.swap(i * v.cols + a, i * v.cols + b);
            }
        }
        if let Some(vi) = &mut self.v_inv {
            for j in 0..vi.cols {
                vi.data.swap(a * vi.cols + j, b * vi.cols + j);
            }
        }
    }

    /// row_i ← row_i + c·row_k; on U⁻¹ this is col_k ← col_k − c·col_i.
    fn add_row(&mut self, i: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let krow: Vec<(usize, BigInt)> =
            self.row_data[k].iter().map(|(&j, v)| (j, v.clone())).collect();
        for (j, v) in krow {
            let cur = self.get(i, j) + c * &v;
            self.set(i, j, cur);
        }
        if let Some(u) = &mut self.u {
            for j in 0..u.cols {
                let add = c * u.at(k, j);
                if !add.is_zero() {
                    let cur = u.at(i, j) + add;
                    u.set(i, j, cur);
                }
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for r in 0..ui.rows {
                let sub = c * ui.at(r, i);
                if !sub.is_zero() {
                    let cur = ui.at(r, k) - sub;
                    ui.set(r, k, cur);
                }
            }
        }
    }

    /// col_j ← col_j + c·col_k; on V⁻¹ this is row_k ← row_k − c·row_j.
    fn add_col(&mut self, j: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let kcol: Vec<(usize, BigInt)> = self.col_index[k]
            .iter()
            .map(|&i| (i, self.row_data[i][&k].clone()))
            .collect();
        for (i, v) in kcol {
            let cur = self.get(i, j) + c * &v;
            self.set(i, j, cur);
        }
        if let Some(v) = &mut self.v {
            for i in 0..v.rows {
                let add = c * v.at(i, k);
                if !add.is_zero() {
                    let cur = v.at(i, j) + add;
                    v.set(i, j, cur);
                }
            }
        }
        if let Some(vi) = &mut self.v_inv {
            for c2 in 0..vi.cols {
                let sub = c * vi.at(j, c2);
                if !sub.is_zero() {
                    let cur = vi.at(k, c2) - sub;
                    vi.set(k, c2, cur);
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        let cols: Vec<usize> = self.row_data[i].keys().copied().collect();
        for j in cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
        if let Some(u) = &mut self.u {
            for j in 0..u.cols {
                let v = -u.at(i, j).clone();
                u.set(i, j, v);
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for r in 0..ui.rows {
                let v = -ui.at(r, i).clone();
                ui.set(r, i, v);
            }
        }
    }

    /// Pivot choice: smallest |value| wins; ties among unit entries are
    /// broken by least Markowitz fill-in.
    fn choose_pivot(&self, t: usize) -> Option<(usize, usize)> {
        use num_bigint::BigUint;
        let mut min_mag: Option<&BigUint> = None;
        let mut first: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for (&j, v) in &self.row_data[i] {
                if j < t {
                    continue;
                }
                let m = v.magnitude();
                if min_mag.is_none_or(|cur| m < cur) {
                    min_mag = Some(m);
                    first = Some((i, j));
                }
            }
        }
        let min_mag = min_mag?.clone();
        if !min_mag.is_one() {
            return first;
        }
        let mut best: Option<(usize, (usize, usize))> = None;
        for i in t..self.rows {
            let row_count = self.row_data[i].iter().filter(|(&c, _)| c >= t).count();
            for (&j, v) in &self.row_data[i] {
                if j < t || *v.magnitude() != min_mag {
                    continue;
                }
                let cost =
                    (row_count - 1) * (self.col_index[j].iter().filter(|&&r| r >= t).count() - 1);
                if best.is_none_or(|(c, _)| cost < c) {
                    best = Some((cost, (i, j)));
                    if cost == 0 {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(_, ij)| ij)
    }

    fn process(&mut self) -> usize {
        let mut t = 0;
        'outer: loop {
            let Some((pi, pj)) = self.choose_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            // reduce the full column, then the full row; remainders stay in
            // place and a dirty pass restarts the pivot search on the
            // smallest of them
            let mut clean = true;
            let col_rows: Vec<usize> =
                self.col_index[t].iter().filter(|&&i| i > t).copied().collect();
            for i in col_rows {
                let pivot = self.get(t, t);
                let val = self.get(i, t);
                if val.is_zero() {
                    continue;
                }
                let q = &val / &pivot;
                self.add_row(i, t, &(-q));
                if !self.get(i, t).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'outer;
            }
            let row_cols: Vec<usize> =
                self.row_data[t].keys().filter(|&&j| j > t).copied().collect();
            for j in row_cols {
                let pivot = self.get(t, t);
                let val = self.get(t, j);
                if val.is_zero() {
                    continue;
                }
                let q = &val / &pivot;
                self.add_col(j, t, &(-q));
                if !self.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'outer;
            }
            // force the pivot down to the gcd of the whole submatrix by
            // pulling in a row with a non-divisible entry; this is what
            // stops coefficient swell
            let pivot = self.get(t, t);
            if !pivot.abs().is_one() {
                let offender = (t + 1..self.rows).find(|&i| {
                    self.row_data[i]
                        .iter()
                        .any(|(&j, v)| j > t && !(v % &pivot).is_zero())
                });
                if let Some(i) = offender {
                    self.add_row(t, i, &BigInt::one());
                    continue 'outer;
                }
            }
            if self.get(t, t).is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Enforce d₁ | d₂ | … on the diagonal after elimination.
    fn fix_divisibility(&mut self, rank: usize) {
        loop {
            let mut changed = false;
            for i in 0..rank.saturating_sub(1) {
                let a = self.get(i, i);
                let b = self.get(i + 1, i + 1);
                if (&b % &a).is_zero() {
                    continue;
                }
                changed = true;
                // diag(a,b) -> diag(gcd, lcm) by unimodular ops
                self.add_row(i, i + 1, &BigInt::one());
                let g = a.gcd(&b);
                let ext = a.extended_gcd(&b);
                let (s, t) = (ext.x, ext.y);
                self.generalized_col_op(i, i + 1, &s, &t, &(-(&b / &g)), &(&a / &g));
                let below = self.get(i + 1, i);
                let q = &below / &self.get(i, i);
                self.add_row(i + 1, i, &(-q));
                let right = self.get(i, i + 1);
                if !right.is_zero() {
                    let q = &right / &self.get(i, i);
                    self.add_col(i + 1, i, &(-q));
                }
                if self.get(i, i).is_negative() {
                    self.negate_row(i);
                }
                if self.get(i + 1, i + 1).is_negative() {
                    self.negate_row(i + 1);
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// (col_a, col_b) ← (s·col_a + t·col_b, u·col_a + w·col_b), s·w − t·u = ±1.
    fn generalized_col_op(
        &mut self,
        a: usize,
        b: usize,
        s: &BigInt,
        t: &BigInt,
        u: &BigInt,
        w: &BigInt,
    ) {
        let rows: Vec<usize> = self.col_index[a].union(&self.col_index[b]).copied().collect();
        for i in rows {
            let va = self.get(i, a);
            let vb = self.get(i, b);
            self.set(i, a, s * &va + t * &vb);
            self.set(i, b, u * &va + w * &vb);
        }
        if let Some(v) = &mut self.v {
            for i in 0..v.rows {
                let va = v.at(i, a).clone();
                let vb = v.at(i, b).clone();
                v.set(i, a, s * &va + t * &vb);
                v.set(i, b, u * &va + w * &vb);
            }
        }
        if let Some(vi) = &mut self.v_inv {
            // V ← V·E gives V⁻¹ ← E⁻¹·V⁻¹, E⁻¹ = det⁻¹·[[w, -t], [-u, s]]
            let det = s * w - t * u;
            debug_assert!(det.abs().is_one());
            for c in 0..vi.cols {
                let ra = vi.at(a, c).clone();
                let rb = vi.at(b, c).clone();
                let na = (w * &ra - t * &rb) * &det;
                let nb = (-u * &ra + s * &rb) * &det;
                vi.set(a, c, na);
                vi.set(b, c, nb);
            }
        }
    }
}

/// Sparse Smith normal form.
pub fn snf(m: &SparseIntMatrix, flags: SnfFlags) -> SnfResult {
    let mut calc = SnfCalc::new(m, flags);
    let rank = calc.process();
    calc.fix_divisibility(rank);
    let diag = (0..rank).map(|i| calc.get(i, i)).collect();
    SnfResult {
        rows: m.rows,
        cols: m.cols,
        diag,
        u: calc.u,
        u_inv: calc.u_inv,
        v: calc.v,
        v_inv: calc.v_inv,
    }
}

/// Dense textbook SNF, kept independent of the sparse path: repeatedly move
/// the smallest nonzero entry of the working submatrix to the pivot, reduce
/// its row and column, restart when a division leaves a remainder, and pull
/// non-divisible rows into the pivot row before advancing.
pub fn dense_snf_oracle(dense: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = dense.len();
    let cols = dense.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigInt>> = dense
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            if !m[i][t].is_zero() {
                let q = &m[i][t] / &m[t][t];
                for j in t..cols {
                    let s = &m[t][j] * &q;
                    m[i][j] -= s;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        for j in t + 1..cols {
            if !m[t][j].is_zero() {
                let q = &m[t][j] / &m[t][t];
                for i in t..rows {
                    let s = &m[i][t] * &q;
                    m[i][j] -= s;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        let mut offender = None;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            for j in t..cols {
                let v = m[i][j].clone();
                m[t][j] += v;
            }
            continue;
        }
        t += 1;
    }
    (0..t).map(|i| m[i][i].abs()).collect()
}

// ---------------------------------------------------------------------------
// Lattice solving
// ---------------------------------------------------------------------------

/// Basis of { x : M·x = 0 } as columns.
pub fn kernel_basis(m: &SparseIntMatrix) -> DenseIntMatrix {
    let res = snf(m, SnfFlags { v: true, ..SnfFlags::none() });
    let r = res.rank();
    let v = res.v.unwrap();
    let mut out = DenseIntMatrix::zero(m.cols, m.cols - r);
    for j in r..m.cols {
        for i in 0..m.cols {
            out.set(i, j - r, v.at(i, j).clone());
        }
    }
    out
}

/// One solution of M·x = b over ℤ, if any.
pub fn solve(m: &SparseIntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows);
    let res = snf(m, SnfFlags { u: true, v: true, ..SnfFlags::none() });
    let r = res.rank();
    let u = res.u.as_ref().unwrap();
    let v = res.v.as_ref().unwrap();
    let ub = u.mul_vec(b);
    let mut y = vec![BigInt::zero(); m.cols];
    for (i, item) in ub.iter().enumerate() {
        if i < r {
            let (q, rem) = item.div_rem(&res.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !item.is_zero() {
            return None;
        }
    }
    Some(v.mul_vec(&y))
}

/// Whether b lies in the column span of M.
pub fn in_column_span(m: &SparseIntMatrix, b: &[BigInt]) -> bool {
    solve(m, b).is_some()
}

/// Columns of `a` followed by the columns of `b`.
pub fn hconcat(a: &SparseIntMatrix, b: &SparseIntMatrix) -> SparseIntMatrix {
    assert_eq!(a.rows, b.rows);
    let mut out = SparseIntMatrix::zero(a.rows, a.cols + b.cols);
    for (&(i, j), v) in a.iter() {
        out.set(i, j, v.clone());
    }
    for (&(i, j), v) in b.iter() {
        out.set(i, a.cols + j, v.clone());
    }
    out
}

// ---------------------------------------------------------------------------
// Abelian group invariants and homology groups
// ---------------------------------------------------------------------------

/// Invariants of a finitely generated abelian group: free rank plus the
/// torsion invariant factors, each dividing the next.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AbelianInvariants {
    pub betti: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

pub(crate) fn serialize_bigints<S: serde::Serializer>(
    v: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match i64::try_from(x) {
            Ok(n) => seq.serialize_element(&n)?,
            Err(_) => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

impl AbelianInvariants {
    pub fn free(betti: usize) -> Self {
        AbelianInvariants { betti, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Invariants of the group presented by `gens` generators and the columns
/// of `rels` as relations.
pub fn presented_group(gens: usize, rels: &SparseIntMatrix) -> AbelianInvariants {
    assert_eq!(rels.rows, gens);
    let res = snf(rels, SnfFlags::none());
    AbelianInvariants { betti: gens - res.rank(), torsion: res.torsion() }
}

/// Homology group in one degree.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct HomologyGroup {
    pub degree: usize,
    pub betti: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn invariants(&self) -> AbelianInvariants {
        AbelianInvariants { betti: self.betti, torsion: self.torsion.clone() }
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{} = {}", self.degree, self.invariants())
    }
}

// ---------------------------------------------------------------------------
// Chain complexes
// ---------------------------------------------------------------------------

/// Coefficient systems for homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    Rationals,
    PrimeField(u32),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Rationals => write!(f, "Q"),
            Coefficients::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// A nonnegatively graded chain complex of free ℤ-modules.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    /// boundaries[d] maps degree d into degree d−1; boundaries[0] is 0×ranks[0].
    boundaries: Vec<SparseIntMatrix>,
}

impl ChainComplex {
    pub fn new(ranks: Vec<usize>, boundaries: Vec<SparseIntMatrix>) -> ChainComplex {
        assert_eq!(ranks.len(), boundaries.len());
        for d in 0..ranks.len() {
            assert_eq!(boundaries[d].cols, ranks[d]);
            let expect_rows = if d == 0 { 0 } else { ranks[d - 1] };
            assert_eq!(boundaries[d].rows, expect_rows);
        }
        let c = ChainComplex { ranks, boundaries };
        assert!(c.validate_square_zero(), "boundary squared is nonzero");
        c
    }

    pub fn with_zero_boundaries(ranks: Vec<usize>) -> ChainComplex {
        let boundaries = (0..ranks.len())
            .map(|d| SparseIntMatrix::zero(if d == 0 { 0 } else { ranks[d - 1] }, ranks[d]))
            .collect();
        ChainComplex { ranks, boundaries }
    }

    pub fn validate_square_zero(&self) -> bool {
        for d in 1..self.boundaries.len() {
            if !self.boundaries[d - 1].mul(&self.boundaries[d]).is_zero() {
                return false;
            }
        }
        true
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    pub fn rank(&self, d: usize) -> usize {
        self.ranks.get(d).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn boundary(&self, d: usize) -> Option<&SparseIntMatrix> {
        self.boundaries.get(d)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(d, &r)| if d % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// Integral homology in every degree: Betti numbers plus the torsion of
    /// coker(∂_{d+1}) restricted to the cycle lattice.
    pub fn homology_integral(&self) -> Vec<HomologyGroup> {
        use rayon::prelude::*;
        let top = self.ranks.len();
        let snfs: Vec<SnfResult> = (0..=top)
            .into_par_iter()
            .map(|d| {
                if d < top {
                    snf(&self.boundaries[d], SnfFlags::none())
                } else {
                    SnfResult::empty()
                }
            })
            .collect();
        (0..top)
            .map(|d| HomologyGroup {
                degree: d,
                betti: self.ranks[d] - snfs[d].rank() - snfs[d + 1].rank(),
                torsion: snfs[d + 1].torsion(),
            })
            .collect()
    }

    /// Homology over the given coefficients: dimensions for fields, the full
    /// groups over ℤ.
    pub fn homology(&self, coefficients: Coefficients) -> Vec<HomologyGroup> {
        match coefficients {
            Coefficients::Integers => self.homology_integral(),
            Coefficients::Rationals => self.field_homology_dims(&Rationals),
            Coefficients::PrimeField(p) => self.field_homology_dims(&ModP::new(p as u64)),
        }
    }

    fn field_homology_dims<F: PageField>(&self, field: &F) -> Vec<HomologyGroup> {
        let top = self.ranks.len();
        let ranks: Vec<usize> = (0..=top)
            .map(|d| {
                if d < top {
                    FMat::from_int_matrix(field, &self.boundaries[d]).rank()
                } else {
                    0
                }
            })
            .collect();
        let out: Vec<HomologyGroup> = (0..top)
            .map(|d| HomologyGroup {
                degree: d,
                betti: self.ranks[d] - ranks[d] - ranks[d + 1],
                torsion: Vec::new(),
            })
            .collect();
        let chi: i64 = out
            .iter()
            .map(|g| if g.degree % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) })
            .sum();
        assert_eq!(chi, self.euler_characteristic(), "field homology violates Euler");
        out
    }

    /// Cycle/boundary data in one degree, supporting class coordinates and
    /// explicit generators.
    pub fn homology_basis(&self, d: usize) -> HomologyBasis {
        let top = self.ranks.len();
        if d >= top {
            return HomologyBasis {
                ambient_rank: 0,
                kernel: DenseIntMatrix::zero(0, 0),
                v_inv_boundary: DenseIntMatrix::zero(0, 0),
                boundary_rank: 0,
                u: DenseIntMatrix::zero(0, 0),
                u_inv: DenseIntMatrix::zero(0, 0),
                orders: Vec::new(),
            };
        }
        let bd = if d == 0 {
            SparseIntMatrix::zero(0, self.ranks[0])
        } else {
            self.boundaries[d].clone()
        };
        let snf_d = snf(&bd, SnfFlags { v: true, v_inv: true, ..SnfFlags::none() });
        let rank_d = snf_d.rank();
        let kernel_dim = self.ranks[d] - rank_d;
        let v = snf_d.v.unwrap();
        let v_inv = snf_d.v_inv.unwrap();
        let mut kernel = DenseIntMatrix::zero(self.ranks[d], kernel_dim);
        for j in 0..kernel_dim {
            for i in 0..self.ranks[d] {
                kernel.set(i, j, v.at(i, rank_d + j).clone());
            }
        }
        // boundaries arriving from degree d+1, in kernel coordinates
        let up_cols = if d + 1 < top { self.ranks[d + 1] } else { 0 };
        let mut b_in_k = SparseIntMatrix::zero(kernel_dim, up_cols);
        for j in 0..up_cols {
            let img = self.boundaries[d + 1].col(j);
            let y = v_inv.mul_vec(&img);
            debug_assert!(y[..rank_d].iter().all(Zero::is_zero));
            for i in 0..kernel_dim {
                if !y[rank_d + i].is_zero() {
                    b_in_k.set(i, j, y[rank_d + i].clone());
                }
            }
        }
        let snf_b = snf(&b_in_k, SnfFlags { u: true, u_inv: true, ..SnfFlags::none() });
        let rank_b = snf_b.rank();
        let mut orders = vec![BigInt::zero(); kernel_dim];
        for i in 0..rank_b {
            orders[i] = snf_b.diag[i].clone();
        }
        HomologyBasis {
            ambient_rank: self.ranks[d],
            kernel,
            v_inv_boundary: v_inv,
            boundary_rank: rank_d,
            u: snf_b.u.unwrap(),
            u_inv: snf_b.u_inv.unwrap(),
            orders,
        }
    }
}

/// An explicit basis of one homology group: cycle representatives together
/// with coordinates for arbitrary cycles.  Coordinate i has order
/// `orders[i]` (0 = infinite, 1 = trivial).
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    ambient_rank: usize,
    kernel: DenseIntMatrix,
    v_inv_boundary: DenseIntMatrix,
    boundary_rank: usize,
    u: DenseIntMatrix,
    u_inv: DenseIntMatrix,
    orders: Vec<BigInt>,
}

impl HomologyBasis {
    pub fn coordinate_count(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn invariants(&self) -> AbelianInvariants {
        AbelianInvariants {
            betti: self.orders.iter().filter(|o| o.is_zero()).count(),
            torsion: self
                .orders
                .iter()
                .filter(|o| !o.is_zero() && !o.is_one())
                .cloned()
                .collect(),
        }
    }

    /// A cycle representing coordinate i.
    pub fn generator(&self, i: usize) -> Vec<BigInt> {
        self.kernel.mul_vec(&self.u_inv.col(i))
    }

    /// Class coordinates of a cycle, normalised modulo the coordinate
    /// orders.  Panics if the chain is not a cycle in this degree.
    pub fn class_coords(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(cycle.len(), self.ambient_rank);
        let y = self.v_inv_boundary.mul_vec(cycle);
        assert!(
            y[..self.boundary_rank].iter().all(Zero::is_zero),
            "chain is not a cycle"
        );
        let c: Vec<BigInt> = y[self.boundary_rank..].to_vec();
        let raw = self.u.mul_vec(&c);
        raw.iter()
            .zip(&self.orders)
            .map(|(x, o)| if o.is_zero() { x.clone() } else { x.mod_floor(o) })
            .collect()
    }

    pub fn same_class(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.class_coords(a) == self.class_coords(b)
    }
}

// ---------------------------------------------------------------------------
// Chain maps
// ---------------------------------------------------------------------------

/// A degreewise map of chain complexes; commutation with the boundaries is
/// checked on construction.
#[derive(Debug, Clone)]
pub struct ChainMap {
    maps: Vec<SparseIntMatrix>,
}

impl ChainMap {
    pub fn new(src: &ChainComplex, dst: &ChainComplex, maps: Vec<SparseIntMatrix>) -> ChainMap {
        for (d, f) in maps.iter().enumerate() {
            assert_eq!(f.cols, src.rank(d));
            assert_eq!(f.rows, dst.rank(d));
            if d >= 1 {
                let lhs = maps[d - 1].mul(src.boundary(d).unwrap());
                let rhs = dst.boundary(d).unwrap().mul(f);
                assert_eq!(lhs, rhs, "chain map does not commute in degree {d}");
            }
        }
        ChainMap { maps }
    }

    pub fn map(&self, d: usize) -> &SparseIntMatrix {
        &self.maps[d]
    }

    pub fn apply(&self, d: usize, chain: &[BigInt]) -> Vec<BigInt> {
        self.maps[d].mul_dense_vec(chain)
    }

    /// `outer ∘ self`, degree by degree.
    pub fn compose(&self, outer: &ChainMap) -> ChainMap {
        let maps = self
            .maps
            .iter()
            .zip(&outer.maps)
            .map(|(f, g)| g.mul(f))
            .collect();
        ChainMap { maps }
    }

    /// Matrix of the induced map on degree-d homology: entry [i] holds the
    /// coordinates, in `dst_basis`, of the image of generator i of `src_basis`.
    pub fn induced(
        &self,
        d: usize,
        src_basis: &HomologyBasis,
        dst_basis: &HomologyBasis,
    ) -> Vec<Vec<BigInt>> {
        (0..src_basis.coordinate_count())
            .map(|i| dst_basis.class_coords(&self.apply(d, &src_basis.generator(i))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn snf_identity() {
        let res = snf(&SparseIntMatrix::identity(3), SnfFlags::none());
        assert_eq!(res.diag, vec![big(1), big(1), big(1)]);
    }

    #[test]
    fn snf_textbook_example() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let res = snf(&m, SnfFlags::none());
        assert_eq!(res.diag, vec![big(2), big(4)]);
        assert_eq!(dense_snf_oracle(&[vec![2, 4], vec![6, 8]]), vec![big(2), big(4)]);
    }

    #[test]
    fn snf_zero_matrix() {
        assert!(snf(&SparseIntMatrix::zero(3, 4), SnfFlags::none()).diag.is_empty());
    }

    #[test]
    fn snf_transforms_reconstruct() {
        let dense = vec![vec![3, 1, -4], vec![2, -3, 1], vec![-4, 2, 2]];
        let m = SparseIntMatrix::from_dense(&dense);
        let res = snf(&m, SnfFlags::all());
        let (u, v) = (res.u.clone().unwrap(), res.v.clone().unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = BigInt::zero();
                for k in 0..3 {
                    for l in 0..3 {
                        acc += u.at(i, k) * m.get(k, l) * v.at(l, j);
                    }
                }
                let expect = if i == j && i < res.diag.len() {
                    res.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(acc, expect, "UMV mismatch at ({i},{j})");
            }
        }
        // u·u_inv = id and v·v_inv = id
        let ui = res.u_inv.unwrap();
        let vi = res.v_inv.unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc_u = BigInt::zero();
                let mut acc_v = BigInt::zero();
                for k in 0..3 {
                    acc_u += u.at(i, k) * ui.at(k, j);
                    acc_v += v.at(i, k) * vi.at(k, j);
                }
                let expect = if i == j { big(1) } else { big(0) };
                assert_eq!(acc_u, expect);
                assert_eq!(acc_v, expect);
            }
        }
    }

    #[test]
    fn snf_matches_oracle_on_random_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=8);
            let cols = rng.gen_range(1..=8);
            let dense: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let a = snf(&SparseIntMatrix::from_dense(&dense), SnfFlags::none()).diag;
            let b = dense_snf_oracle(&dense);
            assert_eq!(a, b, "matrix {dense:?}");
        }
    }

    #[test]
    fn snf_invariant_under_permutation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dense: Vec<Vec<i64>> = (0..6)
            .map(|_| (0..5).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let base = snf(&SparseIntMatrix::from_dense(&dense), SnfFlags::none()).diag;
        let mut permuted = dense.clone();
        permuted.swap(0, 4);
        permuted.swap(2, 3);
        for row in permuted.iter_mut() {
            row.swap(1, 3);
        }
        let p = snf(&SparseIntMatrix::from_dense(&permuted), SnfFlags::none()).diag;
        assert_eq!(base, p);
    }

    #[test]
    fn snf_determinant_product() {
        let dense = vec![vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 4]];
        let res = snf(&SparseIntMatrix::from_dense(&dense), SnfFlags::none());
        let prod: BigInt = res.diag.iter().product();
        assert_eq!(prod, big(25));
    }

    #[test]
    fn kernel_and_solve() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 4, 6], vec![1, 2, 3]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols, 2);
        for j in 0..k.cols {
            let img = m.mul_dense_vec(&k.col(j));
            assert!(img.iter().all(Zero::is_zero));
        }
        let x = solve(&m, &[big(6), big(3)]).unwrap();
        assert_eq!(m.mul_dense_vec(&x), vec![big(6), big(3)]);
        assert!(solve(&m, &[big(1), big(1)]).is_none());
    }

    fn circle_complex() -> ChainComplex {
        let mut d1 = SparseIntMatrix::zero(3, 3);
        let edges = [(0usize, 1usize), (0, 2), (1, 2)];
        for (e, &(a, b)) in edges.iter().enumerate() {
            d1.set(a, e, -1);
            d1.set(b, e, 1);
        }
        ChainComplex::new(vec![3, 3], vec![SparseIntMatrix::zero(0, 3), d1])
    }

    #[test]
    fn homology_of_circle_and_disc() {
        let h = circle_complex().homology_integral();
        assert_eq!((h[0].betti, h[1].betti), (1, 1));
        assert!(h[0].torsion.is_empty() && h[1].torsion.is_empty());

        // fill the triangle: boundary of [0,1,2] = (1,2) − (0,2) + (0,1)
        let mut d2 = SparseIntMatrix::zero(3, 1);
        d2.set(0, 0, 1);
        d2.set(1, 0, -1);
        d2.set(2, 0, 1);
        let mut d1 = SparseIntMatrix::zero(3, 3);
        let edges = [(0usize, 1usize), (0, 2), (1, 2)];
        for (e, &(a, b)) in edges.iter().enumerate() {
            d1.set(a, e, -1);
            d1.set(b, e, 1);
        }
        let disc = ChainComplex::new(vec![3, 3, 1], vec![SparseIntMatrix::zero(0, 3), d1, d2]);
        let h = disc.homology_integral();
        assert_eq!((h[0].betti, h[1].betti, h[2].betti), (1, 0, 0));
    }

    #[test]
    fn zero_boundaries_give_free_homology() {
        let c = ChainComplex::with_zero_boundaries(vec![2, 5, 3]);
        let h = c.homology_integral();
        assert_eq!(h.iter().map(|g| g.betti).collect::<Vec<_>>(), vec![2, 5, 3]);
    }

    #[test]
    fn projective_plane_torsion() {
        // minimal 6-vertex triangulation of the real projective plane
        let faces: [[usize; 3]; 10] = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 1, 5],
            [0, 3, 4],
            [0, 4, 5],
            [1, 2, 4],
            [1, 3, 4],
            [1, 3, 5],
            [2, 3, 5],
            [2, 4, 5],
        ];
        let mut edge_set = BTreeSet::new();
        for f in &faces {
            for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
                edge_set.insert((a.min(b), a.max(b)));
            }
        }
        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        assert_eq!(edges.len(), 15);
        let eidx =
            |a: usize, b: usize| edges.iter().position(|&e| e == (a.min(b), a.max(b))).unwrap();
        let mut d1 = SparseIntMatrix::zero(6, 15);
        for (e, &(a, b)) in edges.iter().enumerate() {
            d1.set(a, e, -1);
            d1.set(b, e, 1);
        }
        let mut d2 = SparseIntMatrix::zero(15, 10);
        for (fi, f) in faces.iter().enumerate() {
            let mut v = *f;
            v.sort();
            d2.set(eidx(v[1], v[2]), fi, 1);
            d2.set(eidx(v[0], v[2]), fi, -1);
            d2.set(eidx(v[0], v[1]), fi, 1);
        }
        let c = ChainComplex::new(vec![6, 15, 10], vec![SparseIntMatrix::zero(0, 6), d1, d2]);
        let h = c.homology_integral();
        assert_eq!(h[0].betti, 1);
        assert_eq!(h[1].betti, 0);
        assert_eq!(h[1].torsion, vec![big(2)]);
        assert_eq!(h[2].betti, 0);
        assert!(h[2].torsion.is_empty());
        // universal coefficients over F_2 and Q
        let h2 = c.homology(Coefficients::PrimeField(2));
        assert_eq!(h2.iter().map(|g| g.betti).collect::<Vec<_>>(), vec![1, 1, 1]);
        let hq = c.homology(Coefficients::Rationals);
        assert_eq!(hq.iter().map(|g| g.betti).collect::<Vec<_>>(), vec![1, 0, 0]);
    }

    #[test]
    fn homology_basis_and_induced_identity() {
        let circle = circle_complex();
        let basis = circle.homology_basis(1);
        assert_eq!(basis.invariants(), AbelianInvariants::free(1));
        let ident = ChainMap::new(
            &circle,
            &circle,
            vec![SparseIntMatrix::identity(3), SparseIntMatrix::identity(3)],
        );
        let m = ident.induced(1, &basis, &basis);
        assert_eq!(m[0][0].abs(), big(1));
    }

    #[test]
    fn induced_degree_two_map_on_circle() {
        // hexagon -> triangle, winding twice
        let hexagon = {
            let mut d1 = SparseIntMatrix::zero(6, 6);
            for e in 0..6 {
                d1.set(e, e, -1);
                d1.set((e + 1) % 6, e, 1);
            }
            ChainComplex::new(vec![6, 6], vec![SparseIntMatrix::zero(0, 6), d1])
        };
        let triangle = circle_complex();
        let vmap = [0usize, 1, 2, 0, 1, 2];
        let edges = [(0usize, 1usize), (0, 2), (1, 2)];
        let mut f1 = SparseIntMatrix::zero(3, 6);
        for e in 0..6 {
            let (a, b) = (vmap[e], vmap[(e + 1) % 6]);
            let idx = edges.iter().position(|&x| x == (a.min(b), a.max(b))).unwrap();
            f1.set(idx, e, if a < b { 1 } else { -1 });
        }
        let mut f0 = SparseIntMatrix::zero(3, 6);
        for v in 0..6 {
            f0.set(vmap[v], v, 1);
        }
        let f = ChainMap::new(&hexagon, &triangle, vec![f0, f1]);
        let src = hexagon.homology_basis(1);
        let dst = triangle.homology_basis(1);
        let m = f.induced(1, &src, &dst);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0][0].abs(), big(2));
    }

    #[test]
    fn induced_map_respects_composition() {
        let circle = circle_complex();
        let basis = circle.homology_basis(1);
        // rotation by one vertex: 0->1->2->0
        let vmap = [1usize, 2, 0];
        let edges = [(0usize, 1usize), (0, 2), (1, 2)];
        let mut f1 = SparseIntMatrix::zero(3, 3);
        for (e, &(a, b)) in edges.iter().enumerate() {
            let (ia, ib) = (vmap[a], vmap[b]);
            let idx = edges.iter().position(|&x| x == (ia.min(ib), ia.max(ib))).unwrap();
            f1.set(idx, e, if ia < ib { 1 } else { -1 });
        }
        let mut f0 = SparseIntMatrix::zero(3, 3);
        for v in 0..3 {
            f0.set(vmap[v], v, 1);
        }
        let rot = ChainMap::new(&circle, &circle, vec![f0, f1]);
        let rot2 = rot.compose(&rot);
        let a = rot.induced(1, &basis, &basis);
        let b = rot2.induced(1, &basis, &basis);
        // induced(rot)^2 = induced(rot^2); everything is 1x1 here
        let prod = &a[0][0] * &a[0][0];
        assert_eq!(prod, b[0][0]);
    }

    #[test]
    fn presented_group_examples() {
        let mut rels = SparseIntMatrix::zero(3, 2);
        rels.set(0, 0, 2);
        rels.set(1, 1, 1);
        let g = presented_group(3, &rels);
        assert_eq!(g.betti, 1);
        assert_eq!(g.torsion, vec![big(2)]);
    }
}
