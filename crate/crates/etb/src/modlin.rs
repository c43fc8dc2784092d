//! Linear algebra over a [`FiniteRing`] for free modules Aⁿ: unimodular
//! vectors, canonical lines, splittings, full flags, general position, and
//! elements of the poset ℰ(V) of partial flags with split graded quotients.
//!
//! Submodules are kept in a canonical span form — reduced row echelon over
//! fields, Howell form over ℤ/m — so that equality of submodules is equality
//! of encodings.  Over ℤ/m the free-direct-summand tests reduce, prime by
//! prime, to full column rank of the reduction mod p; a constructive basis
//! completion (per prime power, glued by CRT) backs the quotient maps.

use crate::ring::{egcd, Elt, FiniteRing};
use crate::{Budget, Error, Result};
use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet};

pub type Vector = Vec<Elt>;

// ---------------------------------------------------------------------------
// Dense matrices of element codes
// ---------------------------------------------------------------------------

/// Row-major matrix over a finite ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elt>,
}

impl RMat {
    pub fn zero(rows: usize, cols: usize) -> RMat {
        RMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> RMat {
        let mut m = RMat::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> RMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        RMat { rows: r, cols: c, data }
    }

    pub fn at(&self, i: usize, j: usize) -> Elt {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Matrix product over the ring.
pub fn mat_mul(ring: &FiniteRing, a: &RMat, b: &RMat) -> RMat {
    assert_eq!(a.cols, b.rows);
    let mut out = RMat::zero(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.at(i, k);
            if aik == 0 {
                continue;
            }
            for j in 0..b.cols {
                let cur = out.at(i, j);
                out.set(i, j, ring.add(cur, ring.mul(aik, b.at(k, j))));
            }
        }
    }
    out
}

/// Row vector times matrix.
pub fn vec_mat(ring: &FiniteRing, v: &[Elt], m: &RMat) -> Vector {
    assert_eq!(v.len(), m.rows);
    let mut out = vec![0; m.cols];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..m.cols {
            out[j] = ring.add(out[j], ring.mul(vi, m.at(i, j)));
        }
    }
    out
}

/// Matrix times column vector, viewing `v` as a column.
pub fn mat_vec(ring: &FiniteRing, m: &RMat, v: &[Elt]) -> Vector {
    assert_eq!(v.len(), m.cols);
    let mut out = vec![0; m.rows];
    for i in 0..m.rows {
        let mut acc = 0;
        for (j, &vj) in v.iter().enumerate() {
            acc = ring.add(acc, ring.mul(m.at(i, j), vj));
        }
        out[i] = acc;
    }
    out
}

// ---------------------------------------------------------------------------
// Canonical span forms: RREF over fields, Howell over ℤ/m
// ---------------------------------------------------------------------------

/// Reduced row echelon form over a field; returns the nonzero rows.
fn rref(ring: &FiniteRing, rows: &[Vector]) -> Vec<Vector> {
    let mut m: Vec<Vector> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(sel) = (pivot_row..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(pivot_row, sel);
        let inv = ring.inv(m[pivot_row][col]).expect("field nonzero");
        for x in m[pivot_row].iter_mut() {
            *x = ring.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != pivot_row && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..cols {
                    let sub = ring.mul(f, m[pivot_row][j]);
                    m[i][j] = ring.sub(m[i][j], sub);
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

fn leading_col(row: &[Elt]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

/// Howell normal form over ℤ/m.  Canonical for the row span: echelon with
/// pivots dividing m, entries above a pivot reduced mod the pivot, and the
/// span closed under the annihilator rows (m/d)·r.
fn howell(ring: &FiniteRing, rows: &[Vector]) -> Vec<Vector> {
    let m = ring.order() as i128;
    let cols = rows.first().map_or(0, |r| r.len());
    let norm = |x: i128| -> Elt { (x.rem_euclid(m)) as Elt };
    // pivot column -> row
    let mut pivots: BTreeMap<usize, Vector> = BTreeMap::new();

    let mut queue: Vec<Vector> = rows.to_vec();
    while let Some(mut row) = queue.pop() {
        loop {
            let Some(col) = leading_col(&row) else {
                break;
            };
            match pivots.get(&col) {
                None => {
                    pivots.insert(col, row);
                    break;
                }
                Some(p) => {
                    let a = p[col] as i128;
                    let b = row[col] as i128;
                    let (g, s, t) = egcd(a, b);
                    // [[s, t], [-b/g, a/g]] has determinant 1
                    let p_old = p.clone();
                    let mut new_p = vec![0; cols];
                    let mut new_r = vec![0; cols];
                    for j in 0..cols {
                        let (pj, rj) = (p_old[j] as i128, row[j] as i128);
                        new_p[j] = norm(s * pj + t * rj);
                        new_r[j] = norm((a / g) * rj - (b / g) * pj);
                    }
                    debug_assert_eq!(new_r[col], 0);
                    pivots.insert(col, new_p);
                    row = new_r;
                }
            }
        }
        if queue.is_empty() {
            // saturate: every pivot row contributes its annihilator multiple
            let mut extra = Vec::new();
            for p in pivots.values() {
                let col = leading_col(p).unwrap();
                let d = num_integer::gcd(p[col] as i128, m);
                let mult = m / d;
                let ann: Vector = p.iter().map(|&x| norm(x as i128 * mult)).collect();
                if ann.iter().any(|&x| x != 0) && !in_span_howell(ring, &pivots, &ann) {
                    extra.push(ann);
                }
            }
            queue = extra;
        }
    }

    // normalise pivots to divisors of m by unit scaling
    let cols_of: Vec<usize> = pivots.keys().copied().collect();
    for &col in &cols_of {
        let row = pivots.get_mut(&col).unwrap();
        let a = row[col];
        let d = num_integer::gcd(a as i128, m) as Elt;
        if a != d {
            let u = unit_scaling_to(ring, a, d);
            for x in row.iter_mut() {
                *x = ring.mul(u, *x);
            }
        }
    }
    // reduce entries above each pivot modulo that pivot
    for (k, &col) in cols_of.iter().enumerate() {
        let lower = pivots[&col].clone();
        let d = lower[col] as i128;
        for &above in &cols_of[..k] {
            let row = pivots.get_mut(&above).unwrap();
            let q = (row[col] as i128).div_euclid(d);
            if q != 0 {
                for j in 0..cols {
                    row[j] = norm(row[j] as i128 - q * lower[j] as i128);
                }
            }
        }
    }
    pivots.into_values().collect()
}

/// A unit u with u·a ≡ gcd(a,m) mod m.  Scans the units; rings here are tiny.
fn unit_scaling_to(ring: &FiniteRing, a: Elt, d: Elt) -> Elt {
    for u in 1..ring.order() {
        if ring.is_unit(u) && ring.mul(u, a) == d {
            return u;
        }
    }
    unreachable!("gcd is always attained by a unit multiple over Z/m")
}

fn in_span_howell(ring: &FiniteRing, pivots: &BTreeMap<usize, Vector>, v: &[Elt]) -> bool {
    let m = ring.order() as i128;
    let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for (&col, row) in pivots {
        let x = v[col].rem_euclid(m);
        if x == 0 {
            continue;
        }
        let d = row[col] as i128;
        if x % num_integer::gcd(d, m) != 0 {
            return false;
        }
        // solve c*d ≡ x mod m
        let (g, s, _) = egcd(d, m);
        let c = (x / g) * s;
        for j in 0..v.len() {
            v[j] = (v[j] - c * row[j] as i128).rem_euclid(m);
        }
    }
    v.iter().all(|&x| x.rem_euclid(m) == 0)
}

/// Canonical form of the row span: RREF over fields, Howell over ℤ/m.
pub fn span_canonical(ring: &FiniteRing, rows: &[Vector]) -> Vec<Vector> {
    if ring.is_field() {
        rref(ring, rows)
    } else {
        howell(ring, rows)
    }
}

/// Membership of a vector in a canonical span form.
pub fn span_contains(ring: &FiniteRing, canon: &[Vector], v: &[Elt]) -> bool {
    if ring.is_field() {
        let mut v = v.to_vec();
        for row in canon {
            let col = leading_col(row).unwrap();
            if v[col] != 0 {
                let f = v[col];
                for j in 0..v.len() {
                    v[j] = ring.sub(v[j], ring.mul(f, row[j]));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    } else {
        let pivots: BTreeMap<usize, Vector> = canon
            .iter()
            .map(|r| (leading_col(r).unwrap(), r.clone()))
            .collect();
        in_span_howell(ring, &pivots, v)
    }
}

// ---------------------------------------------------------------------------
// Rank / completion / inversion
// ---------------------------------------------------------------------------

/// Rank over a field.
pub fn field_rank(ring: &FiniteRing, rows: &[Vector]) -> usize {
    assert!(ring.is_field());
    rref(ring, rows).len()
}

fn reduce_rows_mod_p(ring: &FiniteRing, rows: &[Vector], p: u32) -> (FiniteRing, Vec<Vector>) {
    let fp = FiniteRing::prime_field(p).expect("factor prime");
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&x| (ring.lift(x) as u32) % p).collect())
        .collect();
    (fp, rows)
}

/// Whether the k ≤ n rows span a free rank-k direct summand with free
/// quotient, i.e. extend to an invertible n×n matrix.
pub fn completes_to_basis(ring: &FiniteRing, rows: &[Vector]) -> bool {
    let k = rows.len();
    if k == 0 {
        return true;
    }
    if k > rows[0].len() {
        return false;
    }
    if ring.is_field() {
        field_rank(ring, rows) == k
    } else {
        ring.factors().iter().all(|&(p, _)| {
            let (fp, rp) = reduce_rows_mod_p(ring, rows, p);
            field_rank(&fp, &rp) == k
        })
    }
}

/// v spans a free rank-1 direct summand with free quotient.
pub fn is_unimodular(ring: &FiniteRing, v: &[Elt]) -> bool {
    completes_to_basis(ring, std::slice::from_ref(&v.to_vec()))
}

/// Pivot columns of the RREF over a field.
fn rref_pivot_cols(ring: &FiniteRing, rows: &[Vector]) -> Vec<usize> {
    rref(ring, rows)
        .iter()
        .map(|r| leading_col(r).unwrap())
        .collect()
}

fn crt_pair(a: i128, m1: i128, b: i128, m2: i128) -> i128 {
    // m1, m2 coprime
    let (_, s, _) = egcd(m1, m2);
    let diff = (b - a).rem_euclid(m2);
    (a + m1 * ((s * diff).rem_euclid(m2))).rem_euclid(m1 * m2)
}

/// Completes k independent rows to a basis of Aⁿ; returns the n−k new rows.
/// Over a field the completion uses standard basis vectors; over ℤ/m the
/// per-prime-power completions are glued with CRT.
pub fn complete_to_basis(ring: &FiniteRing, rows: &[Vector]) -> Result<Vec<Vector>> {
    let k = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    if !completes_to_basis(ring, rows) {
        return Err(Error::InvalidArgument(
            "rows do not span a free direct summand with free quotient".into(),
        ));
    }
    if k == n {
        return Ok(Vec::new());
    }
    if ring.is_field() {
        let pivots: BTreeSet<usize> = rref_pivot_cols(ring, rows).into_iter().collect();
        let mut out = Vec::with_capacity(n - k);
        for j in 0..n {
            if !pivots.contains(&j) {
                let mut e = vec![0; n];
                e[j] = 1;
                out.push(e);
            }
        }
        Ok(out)
    } else {
        // per prime power: completion rows are standard basis vectors chosen
        // against the reduction mod p; CRT them across factors
        let mut acc: Vec<Vec<i128>> = vec![vec![0; n]; n - k];
        let mut modulus: i128 = 1;
        for &(p, e) in ring.factors() {
            let pe = (p as i128).pow(e);
            let (fp, rp) = reduce_rows_mod_p(ring, rows, p);
            let pivots: BTreeSet<usize> = rref_pivot_cols(&fp, &rp).into_iter().collect();
            let local: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
            debug_assert_eq!(local.len(), n - k);
            for (s, &j) in local.iter().enumerate() {
                for t in 0..n {
                    let loc = if t == j { 1 } else { 0 };
                    acc[s][t] = crt_pair(acc[s][t], modulus, loc, pe);
                }
            }
            modulus *= pe;
        }
        Ok(acc
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as Elt).collect())
            .collect())
    }
}

/// Inverse of a square matrix, if the matrix is invertible.
pub fn invert(ring: &FiniteRing, m: &RMat) -> Option<RMat> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if ring.is_field() {
        gauss_jordan_inverse(ring, m)
    } else {
        // invert modulo each prime power, CRT the entries
        let mut acc: Vec<i128> = vec![0; n * n];
        let mut modulus: i128 = 1;
        for &(p, e) in ring.factors() {
            let pe = (p as u64).pow(e) as u32;
            let local_ring = FiniteRing::integers_mod(pe).ok()?;
            let mut lm = RMat::zero(n, n);
            for i in 0..n * n {
                lm.data[i] = (ring.lift(m.data[i]) as u32) % pe;
            }
            let inv = local_pp_inverse(&local_ring, &lm, p)?;
            for i in 0..n * n {
                acc[i] = crt_pair(acc[i], modulus, inv.data[i] as i128, pe as i128);
            }
            modulus *= pe as i128;
        }
        let mut out = RMat::zero(n, n);
        for i in 0..n * n {
            out.data[i] = acc[i] as Elt;
        }
        Some(out)
    }
}

fn gauss_jordan_inverse(ring: &FiniteRing, m: &RMat) -> Option<RMat> {
    let n = m.rows;
    let mut a = m.clone();
    let mut b = RMat::identity(n);
    for col in 0..n {
        let sel = (col..n).find(|&i| a.at(i, col) != 0)?;
        for j in 0..n {
            let (x, y) = (a.at(col, j), a.at(sel, j));
            a.set(col, j, y);
            a.set(sel, j, x);
            let (x, y) = (b.at(col, j), b.at(sel, j));
            b.set(col, j, y);
            b.set(sel, j, x);
        }
        let inv = ring.inv(a.at(col, col)).ok()?;
        for j in 0..n {
            a.set(col, j, ring.mul(a.at(col, j), inv));
            b.set(col, j, ring.mul(b.at(col, j), inv));
        }
        for i in 0..n {
            if i != col && a.at(i, col) != 0 {
                let f = a.at(i, col);
                for j in 0..n {
                    let s = ring.sub(a.at(i, j), ring.mul(f, a.at(col, j)));
                    a.set(i, j, s);
                    let s = ring.sub(b.at(i, j), ring.mul(f, b.at(col, j)));
                    b.set(i, j, s);
                }
            }
        }
    }
    Some(b)
}

/// Gauss–Jordan over ℤ/p^e.  A pivot works iff it is a unit mod p; for an
/// invertible matrix such a pivot always exists in the remaining rows.
fn local_pp_inverse(ring: &FiniteRing, m: &RMat, p: u32) -> Option<RMat> {
    let n = m.rows;
    let mut a = m.clone();
    let mut b = RMat::identity(n);
    for col in 0..n {
        let sel = (col..n).find(|&i| a.at(i, col) % p != 0)?;
        for j in 0..n {
            let (x, y) = (a.at(col, j), a.at(sel, j));
            a.set(col, j, y);
            a.set(sel, j, x);
            let (x, y) = (b.at(col, j), b.at(sel, j));
            b.set(col, j, y);
            b.set(sel, j, x);
        }
        let inv = ring.inv(a.at(col, col)).ok()?;
        for j in 0..n {
            a.set(col, j, ring.mul(a.at(col, j), inv));
            b.set(col, j, ring.mul(b.at(col, j), inv));
        }
        for i in 0..n {
            if i != col && a.at(i, col) != 0 {
                let f = a.at(i, col);
                for j in 0..n {
                    let s = ring.sub(a.at(i, j), ring.mul(f, a.at(col, j)));
                    a.set(i, j, s);
                    let s = ring.sub(b.at(i, j), ring.mul(f, b.at(col, j)));
                    b.set(i, j, s);
                }
            }
        }
    }
    Some(b)
}

/// Whether an n×n matrix over the ring is invertible.
pub fn is_invertible(ring: &FiniteRing, m: &RMat) -> bool {
    m.rows == m.cols && completes_to_basis(ring, &m.row_vecs())
}

// ---------------------------------------------------------------------------
// Submodules, lines, splittings, flags
// ---------------------------------------------------------------------------

/// A free direct summand W ⊆ Aⁿ with free quotient, in canonical span form.
/// Equality, ordering and hashing use only the canonical form.
#[derive(Debug, Clone)]
pub struct Submodule {
    ambient: usize,
    rank: usize,
    basis: Vec<Vector>,
    canon: Vec<Vector>,
}

impl PartialEq for Submodule {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.canon == other.canon
    }
}
impl Eq for Submodule {}
impl PartialOrd for Submodule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Submodule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient, &self.canon).cmp(&(other.ambient, &other.canon))
    }
}
impl std::hash::Hash for Submodule {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.canon.hash(state);
    }
}

impl Submodule {
    /// Builds the submodule spanned by `basis`, which must be a basis of a
    /// free direct summand with free quotient.
    pub fn from_basis(ring: &FiniteRing, basis: Vec<Vector>) -> Result<Submodule> {
        if !completes_to_basis(ring, &basis) {
            return Err(Error::InvalidArgument(
                "rows are not a basis of a free direct summand".into(),
            ));
        }
        let ambient = basis.first().map_or(0, |r| r.len());
        let canon = span_canonical(ring, &basis);
        Ok(Submodule { ambient, rank: basis.len(), basis, canon })
    }

    /// The full module Aⁿ.
    pub fn full(n: usize) -> Submodule {
        let id: Vec<Vector> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        Submodule { ambient: n, rank: n, basis: id.clone(), canon: id }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// A (non-canonical) free basis.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Canonical span form (RREF / Howell rows).
    pub fn canon(&self) -> &[Vector] {
        &self.canon
    }

    pub fn contains_vector(&self, ring: &FiniteRing, v: &[Elt]) -> bool {
        span_contains(ring, &self.canon, v)
    }

    pub fn contains(&self, ring: &FiniteRing, other: &Submodule) -> bool {
        other.basis.iter().all(|r| self.contains_vector(ring, r))
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.ambient
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.canon)
    }
}

/// Canonical span form of a union of submodules (not necessarily free).
pub fn joint_span(ring: &FiniteRing, parts: &[&Submodule]) -> Vec<Vector> {
    let rows: Vec<Vector> = parts
        .iter()
        .flat_map(|s| s.basis.iter().cloned())
        .collect();
    span_canonical(ring, &rows)
}

/// A line: free rank-1 direct summand with free quotient.  The stored
/// generator is the lexicographically least unit multiple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    gen: Vector,
}

impl Line {
    pub fn new(ring: &FiniteRing, v: &[Elt]) -> Result<Line> {
        if !is_unimodular(ring, v) {
            return Err(Error::InvalidArgument(format!(
                "vector {v:?} is not unimodular over {ring}"
            )));
        }
        let gen = ring
            .units()
            .iter()
            .map(|&u| v.iter().map(|&x| ring.mul(u, x)).collect::<Vector>())
            .min()
            .unwrap();
        Ok(Line { gen })
    }

    pub fn generator(&self) -> &[Elt] {
        &self.gen
    }

    pub fn ambient(&self) -> usize {
        self.gen.len()
    }

    pub fn to_submodule(&self, ring: &FiniteRing) -> Submodule {
        Submodule::from_basis(ring, vec![self.gen.clone()]).expect("line is unimodular")
    }

    /// Standard basis line Aeᵢ.
    pub fn standard(ring: &FiniteRing, n: usize, i: usize) -> Line {
        let mut e = vec![0; n];
        e[i] = 1;
        Line::new(ring, &e).unwrap()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.gen)
    }
}

/// Enumerates ℒ(Aⁿ): every unimodular vector contributes its canonical line.
pub fn enumerate_lines(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<Vec<Line>> {
    assert!(n >= 1);
    let total = (ring.order() as u64)
        .checked_pow(n as u32)
        .ok_or(Error::BudgetExceeded { what: "line enumeration", limit: budget.max_candidates })?;
    budget.charge_candidates("line enumeration", total)?;
    let mut out = BTreeSet::new();
    let mut v = vec![0 as Elt; n];
    for code in 0..total {
        let mut c = code;
        for slot in v.iter_mut() {
            *slot = (c % ring.order() as u64) as Elt;
            c /= ring.order() as u64;
        }
        if is_unimodular(ring, &v) {
            out.insert(Line::new(ring, &v)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// An unordered splitting of Aⁿ into n lines.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Splitting {
    lines: Vec<Line>, // sorted, distinct
}

impl Splitting {
    pub fn new(ring: &FiniteRing, mut lines: Vec<Line>) -> Result<Splitting> {
        lines.sort();
        let n = lines.first().map_or(0, |l| l.ambient());
        if lines.len() != n || lines.iter().dedup().count() != n {
            return Err(Error::InvalidArgument(
                "a splitting needs n distinct lines".into(),
            ));
        }
        let rows: Vec<Vector> = lines.iter().map(|l| l.gen.clone()).collect();
        if !is_invertible(ring, &RMat::from_rows(&rows)) {
            return Err(Error::InvalidArgument(
                "lines do not sum to the whole module".into(),
            ));
        }
        Ok(Splitting { lines })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn rank(&self) -> usize {
        self.lines.len()
    }

    /// The standard splitting {Ae₁, …, Aeₙ}.
    pub fn standard(ring: &FiniteRing, n: usize) -> Splitting {
        Splitting::new(ring, (0..n).map(|i| Line::standard(ring, n, i)).collect()).unwrap()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.lines.iter().map(Line::to_json).collect::<Vec<_>>())
    }
}

/// Whether a set of distinct lines is in general position (spans a free
/// direct summand with free cokernel).  |q| must be between 1 and n.
pub fn in_general_position(ring: &FiniteRing, q: &[Line]) -> Result<bool> {
    let n = q.first().map_or(0, |l| l.ambient());
    if q.is_empty() || q.len() > n {
        return Err(Error::InvalidArgument(format!(
            "general position needs 1..=n lines, got {}",
            q.len()
        )));
    }
    if q.iter().duplicates().next().is_some() {
        return Err(Error::InvalidArgument("lines must be distinct".into()));
    }
    let rows: Vec<Vector> = q.iter().map(|l| l.gen.clone()).collect();
    Ok(completes_to_basis(ring, &rows))
}

/// All subsets of `lines` of the given size that are in general position,
/// as sorted index vectors into `lines`.
pub fn general_position_subsets(
    ring: &FiniteRing,
    lines: &[Line],
    size: usize,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Vec<Vector>)> = vec![(Vec::new(), Vec::new())];
    let mut seen: u64 = 0;
    while let Some((idx, rows)) = stack.pop() {
        if idx.len() == size {
            out.push(idx);
            continue;
        }
        let start = idx.last().map_or(0, |&i| i + 1);
        for j in start..lines.len() {
            seen += 1;
            budget.charge_candidates("general position scan", seen)?;
            let mut rows2 = rows.clone();
            rows2.push(lines[j].gen.clone());
            if completes_to_basis(ring, &rows2) {
                let mut idx2 = idx.clone();
                idx2.push(j);
                stack.push((idx2, rows2));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Enumerates SPL(Aⁿ).
pub fn enumerate_splittings(
    ring: &FiniteRing,
    n: usize,
    budget: &Budget,
) -> Result<Vec<Splitting>> {
    let lines = enumerate_lines(ring, n, budget)?;
    let sets = general_position_subsets(ring, &lines, n, budget)?;
    let mut out: Vec<Splitting> = sets
        .into_iter()
        .map(|ix| Splitting {
            lines: ix.into_iter().map(|i| lines[i].clone()).collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// A full flag 0 = F₀ ⊂ F₁ ⊂ … ⊂ Fₙ = Aⁿ with free rank-1 graded quotients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flag {
    steps: Vec<Submodule>, // ranks 1..=n
}

impl Flag {
    pub fn new(ring: &FiniteRing, steps: Vec<Submodule>) -> Result<Flag> {
        let n = steps.last().map_or(0, |s| s.ambient());
        if steps.len() != n {
            return Err(Error::InvalidArgument("full flag needs n steps".into()));
        }
        for (i, s) in steps.iter().enumerate() {
            if s.rank() != i + 1 {
                return Err(Error::InvalidArgument("flag step has wrong rank".into()));
            }
            if i + 1 < steps.len() && !steps[i + 1].contains(ring, s) {
                return Err(Error::InvalidArgument("flag steps not nested".into()));
            }
        }
        Ok(Flag { steps })
    }

    pub fn steps(&self) -> &[Submodule] {
        &self.steps
    }

    pub fn rank(&self) -> usize {
        self.steps.len()
    }

    /// First step, a line.
    pub fn first_line(&self, ring: &FiniteRing) -> Line {
        Line::new(ring, &self.steps[0].basis()[0]).expect("flag step is a summand")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.steps.iter().map(Submodule::to_json).collect::<Vec<_>>())
    }
}

/// The quotient map Aⁿ → Aⁿ⁻ᵏ with kernel W, together with a section.
/// Deterministic for a given W (canonical completion of the basis).
#[derive(Debug, Clone)]
pub struct QuotientMap {
    /// n×(n−k): right-multiply a row vector to get quotient coordinates.
    proj: RMat,
    /// (n−k)×n: rows lift the standard basis of the quotient.
    section: RMat,
}

impl QuotientMap {
    pub fn new(ring: &FiniteRing, w: &Submodule) -> Result<QuotientMap> {
        let n = w.ambient();
        let k = w.rank();
        let completion = complete_to_basis(ring, w.basis())?;
        let mut rows = w.basis().to_vec();
        rows.extend(completion.iter().cloned());
        let t = RMat::from_rows(&rows);
        let tinv = invert(ring, &t).ok_or_else(|| {
            Error::InvalidArgument("completion did not produce an invertible matrix".into())
        })?;
        // quotient coordinates are the last n−k coordinates of x·T⁻¹
        let mut proj = RMat::zero(n, n - k);
        for i in 0..n {
            for j in 0..(n - k) {
                proj.set(i, j, tinv.at(i, k + j));
            }
        }
        Ok(QuotientMap { proj, section: RMat::from_rows(&completion) })
    }

    pub fn quotient_rank(&self) -> usize {
        self.proj.cols
    }

    /// Image of a vector in quotient coordinates.
    pub fn push_vector(&self, ring: &FiniteRing, v: &[Elt]) -> Vector {
        vec_mat(ring, v, &self.proj)
    }

    /// A lift of a quotient vector.
    pub fn lift_vector(&self, ring: &FiniteRing, z: &[Elt]) -> Vector {
        vec_mat(ring, z, &self.section)
    }

    /// Pushforward of a line not contained in W; errors when the image is
    /// zero or fails to be unimodular in the quotient.
    pub fn push_line(&self, ring: &FiniteRing, l: &Line) -> Result<Line> {
        let img = self.push_vector(ring, l.generator());
        if img.iter().all(|&x| x == 0) {
            return Err(Error::InvalidArgument("line contained in the submodule".into()));
        }
        if !is_unimodular(ring, &img) {
            return Err(Error::InvalidArgument(
                "line image is not a direct summand of the quotient".into(),
            ));
        }
        Line::new(ring, &img)
    }

    /// Pushforward of a submodule containing W: image of U/W in quotient
    /// coordinates.  `extra` must extend W's basis to one of U.
    pub fn push_submodule(&self, ring: &FiniteRing, extra: &[Vector]) -> Result<Submodule> {
        let rows: Vec<Vector> = extra.iter().map(|r| self.push_vector(ring, r)).collect();
        Submodule::from_basis(ring, rows)
    }

    /// Preimage in Aⁿ of a submodule of the quotient, given the kernel W.
    pub fn pull_submodule(
        &self,
        ring: &FiniteRing,
        w: &Submodule,
        sub: &Submodule,
    ) -> Result<Submodule> {
        let mut rows: Vec<Vector> = w.basis().to_vec();
        for r in sub.basis() {
            rows.push(self.lift_vector(ring, r));
        }
        Submodule::from_basis(ring, rows)
    }
}

/// Pushforward of a line along the canonical quotient map with kernel `w`.
pub fn quotient_pushforward(ring: &FiniteRing, l: &Line, w: &Submodule) -> Result<Line> {
    QuotientMap::new(ring, w)?.push_line(ring, l)
}

/// Enumerates FL(Aⁿ) recursively: a line together with a full flag of the
/// quotient.
pub fn enumerate_flags(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<Vec<Flag>> {
    let mut out = enumerate_flags_rec(ring, n, budget)?;
    out.sort();
    Ok(out)
}

fn enumerate_flags_rec(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<Vec<Flag>> {
    if n == 1 {
        return Ok(vec![Flag { steps: vec![Submodule::full(1)] }]);
    }
    let lines = enumerate_lines(ring, n, budget)?;
    let mut out = Vec::new();
    for line in &lines {
        let w = line.to_submodule(ring);
        let qm = QuotientMap::new(ring, &w)?;
        for qflag in enumerate_flags_rec(ring, n - 1, budget)? {
            let mut steps = vec![w.clone()];
            for qstep in &qflag.steps[..qflag.steps.len() - 1] {
                steps.push(qm.pull_submodule(ring, &w, qstep)?);
            }
            steps.push(Submodule::full(n));
            budget.charge_simplices("flag enumeration", out.len() as u64 + 1)?;
            out.push(Flag { steps });
        }
    }
    Ok(out)
}

/// The set [α]: full flags obtained by ordering the lines of a splitting.
/// Its size divides n! and equals n! exactly when all orderings differ.
pub fn flags_of_splitting(ring: &FiniteRing, alpha: &Splitting) -> Vec<Flag> {
    let n = alpha.rank();
    let mut out = BTreeSet::new();
    for perm in alpha.lines.iter().permutations(n) {
        let mut rows: Vec<Vector> = Vec::with_capacity(n);
        let mut steps = Vec::with_capacity(n);
        for line in perm {
            rows.push(line.gen.clone());
            steps.push(Submodule::from_basis(ring, rows.clone()).expect("splitting lines split"));
        }
        out.insert(Flag { steps });
    }
    out.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Elements of ℰ(V): partial flags with split graded quotients
// ---------------------------------------------------------------------------

/// An element (F, S) of ℰ(V): a partial flag 0 = F₀ ⊂ F₁ ⊂ … ⊂ F_r = V with
/// nonzero free graded quotients, and for each step a splitting of
/// F_h/F_{h−1}.  The splitting of step h is stored as the set of submodules
/// M with F_{h−1} ⊂ M ⊆ F_h whose images are the lines of the splitting, so
/// the whole element has a canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EPoint {
    flag: Vec<Submodule>,
    splittings: Vec<BTreeSet<Submodule>>,
}

impl EPoint {
    pub fn new(flag: Vec<Submodule>, splittings: Vec<BTreeSet<Submodule>>) -> EPoint {
        assert_eq!(flag.len(), splittings.len());
        EPoint { flag, splittings }
    }

    /// The maximal element attached to a splitting: trivial flag 0 ⊂ V.
    pub fn from_splitting(ring: &FiniteRing, alpha: &Splitting) -> EPoint {
        let n = alpha.rank();
        let members: BTreeSet<Submodule> =
            alpha.lines().iter().map(|l| l.to_submodule(ring)).collect();
        EPoint { flag: vec![Submodule::full(n)], splittings: vec![members] }
    }

    /// The minimal element attached to a full flag: each graded quotient has
    /// rank 1 and exactly one splitting.
    pub fn from_flag(flag: &Flag) -> EPoint {
        let splittings = flag
            .steps
            .iter()
            .map(|s| {
                let mut set = BTreeSet::new();
                set.insert(s.clone());
                set
            })
            .collect();
        EPoint { flag: flag.steps.clone(), splittings }
    }

    pub fn flag(&self) -> &[Submodule] {
        &self.flag
    }

    pub fn splittings(&self) -> &[BTreeSet<Submodule>] {
        &self.splittings
    }

    /// Number of steps r of the partial flag.
    pub fn step_count(&self) -> usize {
        self.flag.len()
    }

    pub fn ambient(&self) -> usize {
        self.flag.last().map_or(0, |s| s.ambient())
    }

    /// Rank of the smallest nonzero flag step.
    pub fn first_step_rank(&self) -> usize {
        self.flag[0].rank()
    }

    pub fn is_splitting(&self) -> bool {
        self.flag.len() == 1
    }

    pub fn is_flag(&self) -> bool {
        self.flag.len() == self.ambient()
    }

    /// As a splitting, when the flag is trivial.
    pub fn to_splitting(&self, ring: &FiniteRing) -> Option<Splitting> {
        if !self.is_splitting() {
            return None;
        }
        let lines: Vec<Line> = self.splittings[0]
            .iter()
            .map(|m| Line::new(ring, &m.basis()[0]).expect("member is a line"))
            .collect();
        Splitting::new(ring, lines).ok()
    }

    /// As a full flag, when every graded quotient has rank 1.
    pub fn to_flag(&self, ring: &FiniteRing) -> Option<Flag> {
        if !self.is_flag() {
            return None;
        }
        Flag::new(ring, self.flag.clone()).ok()
    }

    /// The partial order of ℰ(V): `self` ≤ `other` iff the flag of `self`
    /// refines the flag of `other` and the splitting data are compatible
    /// (each splitting set of `other` partitions into subsets mapping onto
    /// the splitting sets of the refining steps).
    pub fn leq(&self, ring: &FiniteRing, other: &EPoint) -> bool {
        if self == other {
            return true;
        }
        // every step of other's flag must appear among self's steps
        let my_steps: BTreeMap<&Submodule, usize> =
            self.flag.iter().enumerate().map(|(i, s)| (s, i + 1)).collect();
        let mut block_end = Vec::with_capacity(other.flag.len()); // position in self of F'_i
        for step in &other.flag {
            match my_steps.get(step) {
                Some(&pos) => block_end.push(pos),
                None => return false,
            }
        }
        // blocks must be increasing (they are, since ranks increase)
        for h in 1..=self.flag.len() {
            // containing block i: least i with block_end[i] >= h
            let i = block_end.iter().position(|&e| e >= h).expect("last block ends at r");
            let t_i = &other.splittings[i];
            let f_h = &self.flag[h - 1];
            let u_h: Vec<&Submodule> = t_i.iter().filter(|m| f_h.contains(ring, m)).collect();
            let prev_rank = if h >= 2 { self.flag[h - 2].rank() } else { 0 };
            if u_h.len() != f_h.rank() - (if i > 0 { other.flag[i - 1].rank() } else { 0 }) {
                return false;
            }
            // the members below F_h must span it together with the block base
            let mut span_parts: Vec<&Submodule> = u_h.clone();
            if i > 0 {
                span_parts.push(&other.flag[i - 1]);
            }
            if joint_span(ring, &span_parts) != f_h.canon().to_vec() {
                return false;
            }
            // members new at step h must map onto the splitting of step h
            let f_prev = if h >= 2 { Some(&self.flag[h - 2]) } else { None };
            let new_members: Vec<&&Submodule> = u_h
                .iter()
                .filter(|m| match f_prev {
                    Some(fp) => !fp.contains(ring, m),
                    None => true,
                })
                .collect();
            if new_members.len() != f_h.rank() - prev_rank {
                return false;
            }
            let mut images = BTreeSet::new();
            for m in &new_members {
                let mut rows: Vec<Vector> = match f_prev {
                    Some(fp) => fp.basis().to_vec(),
                    None => Vec::new(),
                };
                rows.extend(m.basis().iter().cloned());
                let canon = span_canonical(ring, &rows);
                images.insert(canon);
            }
            let expect: BTreeSet<Vec<Vector>> = self.splittings[h - 1]
                .iter()
                .map(|m| m.canon().to_vec())
                .collect();
            if images != expect {
                return false;
            }
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "flag": self.flag.iter().map(Submodule::to_json).collect::<Vec<_>>(),
            "splittings": self
                .splittings
                .iter()
                .map(|s| s.iter().map(Submodule::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Enumerates ℰ(Aⁿ): for each general-position set q the pair
/// (W(q), q) is a first step, extended by an element of ℰ(Aⁿ/W(q)).
pub fn enumerate_e_points(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<Vec<EPoint>> {
    let mut out = enumerate_e_rec(ring, n, budget)?;
    out.sort();
    budget.charge_simplices("E(V) enumeration", out.len() as u64)?;
    Ok(out)
}

fn enumerate_e_rec(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<Vec<EPoint>> {
    let lines = enumerate_lines(ring, n, budget)?;
    let mut out = Vec::new();
    for k in 1..=n {
        for set in general_position_subsets(ring, &lines, k, budget)? {
            let members: Vec<Submodule> =
                set.iter().map(|&i| lines[i].to_submodule(ring)).collect();
            let basis: Vec<Vector> = set.iter().map(|&i| lines[i].generator().to_vec()).collect();
            let w = Submodule::from_basis(ring, basis)?;
            let first_split: BTreeSet<Submodule> = members.into_iter().collect();
            if k == n {
                out.push(EPoint {
                    flag: vec![Submodule::full(n)],
                    splittings: vec![first_split],
                });
                continue;
            }
            let qm = QuotientMap::new(ring, &w)?;
            for tail in enumerate_e_rec(ring, n - k, budget)? {
                let mut flag = vec![w.clone()];
                for (idx, qstep) in tail.flag.iter().enumerate() {
                    if idx + 1 == tail.flag.len() {
                        flag.push(Submodule::full(n));
                    } else {
                        flag.push(qm.pull_submodule(ring, &w, qstep)?);
                    }
                }
                let mut splittings = vec![first_split.clone()];
                for qset in &tail.splittings {
                    let pulled: BTreeSet<Submodule> = qset
                        .iter()
                        .map(|m| qm.pull_submodule(ring, &w, m))
                        .collect::<Result<_>>()?;
                    splittings.push(pulled);
                }
                out.push(EPoint { flag, splittings });
            }
        }
    }
    Ok(out)
}
