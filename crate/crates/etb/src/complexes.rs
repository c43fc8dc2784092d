//! Simplicial complexes, finite posets and nerves, the buildings 𝔽𝕃(V),
//! 𝕊ℙ𝕃(V) and 𝔼𝕋(V) = B(ℰ(V)), and the polyhedral cell decomposition of
//! 𝔼𝕋(V) with oriented cellular boundaries.

use crate::homology::{ChainComplex, SparseIntMatrix};
use crate::modlin::{
    enumerate_e_points, enumerate_flags, enumerate_splittings, flags_of_splitting, EPoint, Flag,
    QuotientMap, Splitting, Submodule,
};
use crate::ring::FiniteRing;
use crate::{Budget, Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------------
// Simplicial complexes
// ---------------------------------------------------------------------------

/// A finite simplicial complex with labelled vertices.  Simplices are stored
/// compressed: the generator list spans the complex by downward closure, and
/// closures are expanded on demand.
#[derive(Debug, Clone)]
pub struct SimplicialComplex<L: Ord + Clone> {
    labels: Vec<L>,
    index: BTreeMap<L, u32>,
    generators: Vec<Vec<u32>>,
}

impl<L: Ord + Clone> SimplicialComplex<L> {
    /// Builds a complex from vertex labels and generating simplices
    /// (vertex-id tuples; they need not be maximal or sorted).
    pub fn from_generators(labels: Vec<L>, generators: Vec<Vec<u32>>) -> SimplicialComplex<L> {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        let mut gens: BTreeSet<Vec<u32>> = BTreeSet::new();
        for mut g in generators {
            g.sort_unstable();
            g.dedup();
            assert!(g.iter().all(|&v| (v as usize) < labels.len()));
            if !g.is_empty() {
                gens.insert(g);
            }
        }
        // drop generators contained in others
        let all: Vec<Vec<u32>> = gens.into_iter().collect();
        let maximal: Vec<Vec<u32>> = all
            .iter()
            .filter(|g| {
                !all.iter().any(|h| {
                    h.len() > g.len() && g.iter().all(|v| h.binary_search(v).is_ok())
                })
            })
            .cloned()
            .collect();
        SimplicialComplex { labels, index, generators: maximal }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn vertex_id(&self, label: &L) -> Option<u32> {
        self.index.get(label).copied()
    }

    /// Maximal simplices.
    pub fn facets(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.generators.iter().map(|g| g.len() - 1).max().unwrap_or(0)
    }

    /// Whether a sorted vertex set is a simplex.
    pub fn is_simplex(&self, s: &[u32]) -> bool {
        !s.is_empty()
            && self
                .generators
                .iter()
                .any(|g| s.iter().all(|v| g.binary_search(v).is_ok()))
    }

    /// All simplices of one dimension, sorted.
    pub fn simplices_of_dim(&self, d: usize) -> Vec<Vec<u32>> {
        use itertools::Itertools;
        let mut out = BTreeSet::new();
        for g in &self.generators {
            if g.len() >= d + 1 {
                for c in g.iter().copied().combinations(d + 1) {
                    out.insert(c);
                }
            }
        }
        out.into_iter().collect()
    }

    /// All simplices grouped by dimension.
    pub fn all_simplices(&self, budget: &Budget) -> Result<Vec<Vec<Vec<u32>>>> {
        self.all_simplices_through(budget, usize::MAX)
    }

    /// Simplices grouped by dimension, up to `max_dim`.
    pub fn all_simplices_through(
        &self,
        budget: &Budget,
        max_dim: usize,
    ) -> Result<Vec<Vec<Vec<u32>>>> {
        let mut out = Vec::new();
        let mut total = 0u64;
        for d in 0..=self.dimension().min(max_dim) {
            let s = self.simplices_of_dim(d);
            total += s.len() as u64;
            budget.charge_simplices("simplex closure", total)?;
            out.push(s);
        }
        Ok(out)
    }

    pub fn simplex_count(&self, budget: &Budget) -> Result<usize> {
        Ok(self.all_simplices(budget)?.iter().map(|s| s.len()).sum())
    }

    pub fn euler_characteristic(&self, budget: &Budget) -> Result<i64> {
        let mut chi = 0i64;
        for (d, s) in self.all_simplices(budget)?.iter().enumerate() {
            chi += if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) };
        }
        Ok(chi)
    }

    /// The complex of oriented simplicial chains, with the boundary signs
    /// taken from the global vertex order.
    pub fn chain_complex(&self, budget: &Budget) -> Result<ChainComplex> {
        self.chain_complex_through(budget, usize::MAX)
    }

    /// The chain complex truncated above `max_dim`.
    pub fn chain_complex_through(&self, budget: &Budget, max_dim: usize) -> Result<ChainComplex> {
        let by_dim = self.all_simplices_through(budget, max_dim)?;
        let mut ranks = Vec::with_capacity(by_dim.len());
        let mut boundaries = Vec::with_capacity(by_dim.len());
        for (d, simplices) in by_dim.iter().enumerate() {
            ranks.push(simplices.len());
            if d == 0 {
                boundaries.push(SparseIntMatrix::zero(0, simplices.len()));
                continue;
            }
            let lower: BTreeMap<&[u32], usize> = by_dim[d - 1]
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_slice(), i))
                .collect();
            let mut m = SparseIntMatrix::zero(by_dim[d - 1].len(), simplices.len());
            for (j, s) in simplices.iter().enumerate() {
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    let row = lower[face.as_slice()];
                    m.add_to(row, j, if i % 2 == 0 { 1 } else { -1 });
                }
            }
            boundaries.push(m);
        }
        Ok(ChainComplex::new(ranks, boundaries))
    }

    /// Barycentric subdivision: the nerve of the poset of simplices.
    pub fn barycentric_subdivision(&self, budget: &Budget) -> Result<SimplicialComplex<Vec<u32>>> {
        use itertools::Itertools;
        let all = self.all_simplices(budget)?;
        let verts: Vec<Vec<u32>> = all.iter().flatten().cloned().collect();
        let vid: BTreeMap<&[u32], u32> = verts
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i as u32))
            .collect();
        let mut gens = Vec::new();
        let mut count = 0u64;
        for facet in &self.generators {
            for perm in facet.iter().copied().permutations(facet.len()) {
                count += 1;
                budget.charge_simplices("barycentric subdivision", count)?;
                let mut chain = Vec::with_capacity(facet.len());
                let mut prefix: Vec<u32> = Vec::new();
                for v in perm {
                    prefix.push(v);
                    let mut key = prefix.clone();
                    key.sort_unstable();
                    chain.push(vid[key.as_slice()]);
                }
                gens.push(chain);
            }
        }
        Ok(SimplicialComplex::from_generators(verts, gens))
    }
}

// ---------------------------------------------------------------------------
// Posets and nerves
// ---------------------------------------------------------------------------

/// A finite poset with labelled elements and a cached order matrix.
#[derive(Debug, Clone)]
pub struct Poset<L: Ord + Clone> {
    labels: Vec<L>,
    leq: Vec<Vec<bool>>,
}

impl<L: Ord + Clone> Poset<L> {
    /// Builds a poset from labels and a comparison callback.
    pub fn from_relation(labels: Vec<L>, rel: impl Fn(&L, &L) -> bool) -> Poset<L> {
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = rel(&labels[i], &labels[j]);
            }
        }
        Poset { labels, leq }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn position(&self, label: &L) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// Exhaustive reflexivity/antisymmetry/transitivity check.
    pub fn validate(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            if !self.leq[i][i] {
                return false;
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return false;
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| !self.lt(j, i)))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| !self.lt(i, j)))
            .collect()
    }

    /// Cover relations i ⋖ j.
    fn covers(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) && !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)) {
                    out[i].push(j);
                }
            }
        }
        out
    }

    /// The order complex: simplices are the nonempty chains.  Generators are
    /// the maximal chains (Hasse paths from minimal to maximal elements).
    pub fn nerve(&self, budget: &Budget) -> Result<SimplicialComplex<L>> {
        let covers = self.covers();
        let mut gens: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = self.minimal_elements().iter().map(|&i| vec![i]).collect();
        let mut seen = 0u64;
        while let Some(chain) = stack.pop() {
            seen += 1;
            budget.charge_simplices("nerve chains", seen)?;
            let last = *chain.last().unwrap();
            if covers[last].is_empty() {
                gens.push(chain.iter().map(|&i| i as u32).collect());
            } else {
                for &next in &covers[last] {
                    let mut c = chain.clone();
                    c.push(next);
                    stack.push(c);
                }
            }
        }
        Ok(SimplicialComplex::from_generators(self.labels.clone(), gens))
    }

    /// The induced subposet L(S) = { x : x ≤ s for every s ∈ S }.
    pub fn lower_set(&self, s: &[usize]) -> Poset<L> {
        assert!(!s.is_empty());
        let keep: Vec<usize> = (0..self.len())
            .filter(|&x| s.iter().all(|&t| self.leq[x][t]))
            .collect();
        self.restrict(&keep)
    }

    /// The induced subposet U(S) = { x : s ≤ x for every s ∈ S }.
    pub fn upper_set(&self, s: &[usize]) -> Poset<L> {
        assert!(!s.is_empty());
        let keep: Vec<usize> = (0..self.len())
            .filter(|&x| s.iter().all(|&t| self.leq[t][x]))
            .collect();
        self.restrict(&keep)
    }

    pub fn restrict(&self, keep: &[usize]) -> Poset<L> {
        let labels: Vec<L> = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let leq = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.leq[i][j]).collect())
            .collect();
        Poset { labels, leq }
    }
}

// ---------------------------------------------------------------------------
// The three buildings
// ---------------------------------------------------------------------------

/// 𝔽𝕃(Aⁿ): vertices are the full flags, and the simplices are the subsets
/// of [α] for splittings α.
pub fn build_fl(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<SimplicialComplex<Flag>> {
    let flags = enumerate_flags(ring, n, budget)?;
    let index: BTreeMap<&Flag, u32> = flags
        .iter()
        .enumerate()
        .map(|(i, f)| (f, i as u32))
        .collect();
    let mut gens = Vec::new();
    for alpha in enumerate_splittings(ring, n, budget)? {
        let cell: Vec<u32> = flags_of_splitting(ring, &alpha)
            .iter()
            .map(|f| index[f])
            .collect();
        gens.push(cell);
    }
    Ok(SimplicialComplex::from_generators(flags, gens))
}

/// 𝕊ℙ𝕃(Aⁿ): vertices are the splittings; a set of splittings is a simplex
/// iff it has a common lower bound in ℰ(Aⁿ).  Every lower bound dominates a
/// full flag, so the generators are the sets U(f) ∩ SPL over full flags f.
pub fn build_spl(
    ring: &FiniteRing,
    n: usize,
    budget: &Budget,
) -> Result<SimplicialComplex<Splitting>> {
    let splittings = enumerate_splittings(ring, n, budget)?;
    let split_points: Vec<EPoint> = splittings
        .iter()
        .map(|a| EPoint::from_splitting(ring, a))
        .collect();
    let mut gens = Vec::new();
    for flag in enumerate_flags(ring, n, budget)? {
        let fp = EPoint::from_flag(&flag);
        let above: Vec<u32> = split_points
            .iter()
            .enumerate()
            .filter(|(_, s)| fp.leq(ring, s))
            .map(|(i, _)| i as u32)
            .collect();
        gens.push(above);
    }
    Ok(SimplicialComplex::from_generators(splittings, gens))
}

/// The poset ℰ(Aⁿ) with its order relation cached.
pub fn build_e_poset(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<Poset<EPoint>> {
    let points = enumerate_e_points(ring, n, budget)?;
    Ok(Poset::from_relation(points, |a, b| a.leq(ring, b)))
}

/// 𝔼𝕋(Aⁿ) = nerve of ℰ(Aⁿ).
pub fn build_et(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<SimplicialComplex<EPoint>> {
    build_e_poset(ring, n, budget)?.nerve(budget)
}

/// The order-preserving injection ℰ(W) × ℰ(V/W) → ℰ(V) attached to a free
/// direct summand W: flag steps of the first factor land inside W, flag
/// steps of the second pull back along the quotient map.
pub struct ProductEmbedding {
    w: Submodule,
    qm: QuotientMap,
    basis_rows: Vec<Vec<u32>>,
}

impl ProductEmbedding {
    pub fn new(ring: &FiniteRing, w: &Submodule) -> Result<ProductEmbedding> {
        if w.rank() == 0 || w.rank() == w.ambient() {
            return Err(Error::InvalidArgument(
                "product embedding needs a proper nonzero summand".into(),
            ));
        }
        Ok(ProductEmbedding {
            w: w.clone(),
            qm: QuotientMap::new(ring, w)?,
            basis_rows: w.basis().to_vec(),
        })
    }

    fn map_sub_into_w(&self, ring: &FiniteRing, sub: &Submodule) -> Result<Submodule> {
        // coordinates of W are its basis rows
        let rows: Vec<Vec<u32>> = sub
            .basis()
            .iter()
            .map(|r| {
                let mut out = vec![0u32; self.w.ambient()];
                for (c, &coef) in r.iter().enumerate() {
                    for (j, item) in out.iter_mut().enumerate() {
                        *item = ring.add(*item, ring.mul(coef, self.basis_rows[c][j]));
                    }
                }
                out
            })
            .collect();
        Submodule::from_basis(ring, rows)
    }

    /// Image of a pair (a, b) ∈ ℰ(A^k) × ℰ(A^{n−k}).
    pub fn embed(&self, ring: &FiniteRing, a: &EPoint, b: &EPoint) -> Result<EPoint> {
        assert_eq!(a.ambient(), self.w.rank());
        assert_eq!(b.ambient(), self.w.ambient() - self.w.rank());
        let n = self.w.ambient();
        let mut flag = Vec::new();
        let mut splits = Vec::new();
        for (step, members) in a.flag().iter().zip(a.splittings()) {
            if step.is_full() {
                flag.push(self.w.clone());
            } else {
                flag.push(self.map_sub_into_w(ring, step)?);
            }
            let mapped: BTreeSet<Submodule> = members
                .iter()
                .map(|m| self.map_sub_into_w(ring, m))
                .collect::<Result<_>>()?;
            splits.push(mapped);
        }
        for (step, members) in b.flag().iter().zip(b.splittings()) {
            if step.is_full() {
                flag.push(Submodule::full(n));
            } else {
                flag.push(self.qm.pull_submodule(ring, &self.w, step)?);
            }
            let mapped: BTreeSet<Submodule> = members
                .iter()
                .map(|m| self.qm.pull_submodule(ring, &self.w, m))
                .collect::<Result<_>>()?;
            splits.push(mapped);
        }
        Ok(EPoint::new(flag, splits))
    }
}

// ---------------------------------------------------------------------------
// Polyhedral cell structure of the enriched Tits building
// ---------------------------------------------------------------------------

/// The CW structure on 𝔼𝕋(Aⁿ): one cell e(p) = BL(p) per p ∈ ℰ(Aⁿ), of
/// dimension n − r(p), with oriented cellular boundary coefficients computed
/// from relative fundamental classes in the nerve.
pub struct CellStructure {
    pub poset: Poset<EPoint>,
    /// Cell dimension d(p) per element.
    pub dims: Vec<usize>,
    /// Cellular boundary: per cell, the (lower-cell, coefficient) pairs.
    pub boundary: Vec<Vec<(usize, BigInt)>>,
    /// Filtration level t(p) = rank of the first flag step − 1.
    pub levels: Vec<usize>,
}

/// Chains of the poset with a prescribed top element and length, listed as
/// ascending id tuples (ids follow a linear extension).
fn chains_with_top(poset: &Poset<EPoint>, top: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![top]];
    while let Some(chain) = stack.pop() {
        if chain.len() == len {
            let mut c = chain.clone();
            c.reverse();
            out.push(c);
            continue;
        }
        let head = chain[chain.len() - 1];
        for i in 0..poset.len() {
            if poset.lt(i, head) {
                let mut c = chain.clone();
                c.push(i);
                stack.push(c);
            }
        }
    }
    out.sort();
    out
}

impl CellStructure {
    /// Builds the cell structure and checks ∂∘∂ = 0.
    pub fn build(ring: &FiniteRing, n: usize, budget: &Budget) -> Result<CellStructure> {
        let raw = build_e_poset(ring, n, budget)?;
        // reorder along a linear extension: more flag steps first, so that a
        // chain's poset order matches ascending ids
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by_key(|&i| {
            (
                std::cmp::Reverse(raw.labels()[i].step_count()),
                raw.labels()[i].clone(),
            )
        });
        let poset = raw.restrict(&order);
        let dims: Vec<usize> = poset
            .labels()
            .iter()
            .map(|p| n - p.step_count())
            .collect();
        let levels: Vec<usize> = poset
            .labels()
            .iter()
            .map(|p| p.first_step_rank() - 1)
            .collect();
        // relative fundamental class of each cell, as coefficients on the
        // chains with top p
        let mut fundamental: Vec<BTreeMap<Vec<usize>, BigInt>> = Vec::with_capacity(poset.len());
        for p in 0..poset.len() {
            let d = dims[p];
            let top_chains = chains_with_top(&poset, p, d + 1);
            if d == 0 {
                let mut z = BTreeMap::new();
                z.insert(vec![p], BigInt::from(1));
                fundamental.push(z);
                continue;
            }
            let faces = chains_with_top(&poset, p, d);
            let face_index: BTreeMap<&[usize], usize> = faces
                .iter()
                .enumerate()
                .map(|(i, c)| (c.as_slice(), i))
                .collect();
            // relative cycle condition: faces still containing p must cancel
            let mut m = SparseIntMatrix::zero(faces.len(), top_chains.len());
            for (j, chain) in top_chains.iter().enumerate() {
                for i in 0..d {
                    let mut face = chain.clone();
                    face.remove(i);
                    let row = face_index[face.as_slice()];
                    m.add_to(row, j, if i % 2 == 0 { 1 } else { -1 });
                }
            }
            let kernel = crate::homology::kernel_basis(&m);
            assert_eq!(kernel.cols, 1, "cell fundamental class is not unique");
            let mut z: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
            for (j, chain) in top_chains.iter().enumerate() {
                let c = kernel.at(j, 0).clone();
                if !c.is_zero() {
                    z.insert(chain.clone(), c);
                }
            }
            // orient deterministically: least chain gets a positive sign
            if let Some((_, c)) = z.iter().next() {
                if c.is_negative() {
                    for v in z.values_mut() {
                        *v = -v.clone();
                    }
                }
            }
            assert!(
                z.values().all(|c| c.abs() == BigInt::from(1)),
                "fundamental class is not a ±1 chain"
            );
            fundamental.push(z);
        }
        // cellular boundary coefficients by matching ∂z_p against z_{p'}
        let mut boundary: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(poset.len());
        for p in 0..poset.len() {
            let d = dims[p];
            if d == 0 {
                boundary.push(Vec::new());
                continue;
            }
            let mut dz: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
            for (chain, c) in &fundamental[p] {
                for i in 0..chain.len() {
                    let mut face = chain.clone();
                    face.remove(i);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    let entry = dz.entry(face).or_default();
                    *entry += c * sign;
                    if entry.is_zero() {
                        // keep the map free of zeros
                        let key: Vec<usize> = {
                            let mut f = chain.clone();
                            f.remove(i);
                            f
                        };
                        dz.remove(&key);
                    }
                }
            }
            let mut coeffs = Vec::new();
            for q in 0..poset.len() {
                if dims[q] + 1 != d || !poset.lt(q, p) {
                    continue;
                }
                // all chains with top q carry z_q with a common ratio
                let mut ratio: Option<BigInt> = None;
                for (chain, zc) in &fundamental[q] {
                    let have = dz.get(chain).cloned().unwrap_or_else(BigInt::zero);
                    let r = &have / zc;
                    assert_eq!(&r * zc, have, "boundary is not a multiple of the cell class");
                    match &ratio {
                        None => ratio = Some(r),
                        Some(x) => assert_eq!(*x, r, "inconsistent cellular coefficient"),
                    }
                }
                let ratio = ratio.expect("lower cell has a fundamental class");
                if !ratio.is_zero() {
                    coeffs.push((q, ratio));
                }
            }
            boundary.push(coeffs);
        }
        let cs = CellStructure { poset, dims, boundary, levels };
        assert!(
            cs.chain_complex().validate_square_zero(),
            "cellular boundary squared is nonzero"
        );
        Ok(cs)
    }

    pub fn cell_count(&self) -> usize {
        self.poset.len()
    }

    pub fn top_dimension(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    /// Cells of one dimension, as poset indices in a fixed order.
    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.poset.len()).filter(|&i| self.dims[i] == d).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|&d| if d % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// The complex of cellular chains.
    pub fn chain_complex(&self) -> ChainComplex {
        let top = self.top_dimension();
        let cells: Vec<Vec<usize>> = (0..=top).map(|d| self.cells_of_dim(d)).collect();
        let pos: Vec<BTreeMap<usize, usize>> = cells
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, &p)| (p, i)).collect())
            .collect();
        let mut ranks = Vec::new();
        let mut boundaries = Vec::new();
        for d in 0..=top {
            ranks.push(cells[d].len());
            if d == 0 {
                boundaries.push(SparseIntMatrix::zero(0, cells[0].len()));
                continue;
            }
            let mut m = SparseIntMatrix::zero(cells[d - 1].len(), cells[d].len());
            for (j, &p) in cells[d].iter().enumerate() {
                for (q, c) in &self.boundary[p] {
                    m.set(pos[d - 1][q], j, c.clone());
                }
            }
            boundaries.push(m);
        }
        ChainComplex::new(ranks, boundaries)
    }

    /// The boundary sphere ∂e(p) = BL′(p) as a simplicial complex.
    pub fn cell_boundary_complex(
        &self,
        p: usize,
        budget: &Budget,
    ) -> Result<SimplicialComplex<EPoint>> {
        let strictly_below: Vec<usize> = (0..self.poset.len())
            .filter(|&q| self.poset.lt(q, p))
            .collect();
        self.poset.restrict(&strictly_below).nerve(budget)
    }
}

/// Convenience wrapper matching the cell structure's role as input to the
/// homology machinery.
pub fn cellular_chain_complex(cs: &CellStructure) -> ChainComplex {
    cs.chain_complex()
}

/// Outcome of the boundary-sphere check for one cell.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CellCheck {
    pub cell: usize,
    pub dim: usize,
    pub boundary_is_sphere: bool,
}

/// Per-cell verification that ∂e(p) has the integral homology of S^{d(p)−1}
/// and that d(p) = n − r(p).  Cells are checked in parallel; the report
/// order is deterministic.
pub fn verify_polyhedral(cs: &CellStructure, budget: &Budget) -> Result<Vec<CellCheck>> {
    use rayon::prelude::*;
    let n = cs.poset.labels().first().map_or(0, |p| p.ambient());
    let checks: Vec<Result<CellCheck>> = (0..cs.cell_count())
        .into_par_iter()
        .map(|p| {
            let d = cs.dims[p];
            if d != n - cs.poset.labels()[p].step_count() {
                return Ok(CellCheck { cell: p, dim: d, boundary_is_sphere: false });
            }
            let bc = cs.cell_boundary_complex(p, budget)?;
            let ok = if d == 0 {
                bc.vertex_count() == 0
            } else {
                let h = bc.chain_complex(budget)?.homology_integral();
                let mut expect_ok = h.iter().all(|g| g.torsion.is_empty());
                for (deg, g) in h.iter().enumerate() {
                    let want = if d == 1 {
                        usize::from(deg == 0) * 2
                    } else {
                        usize::from(deg == 0 || deg == d - 1)
                    };
                    expect_ok &= g.betti == want;
                }
                expect_ok
            };
            Ok(CellCheck { cell: p, dim: d, boundary_is_sphere: ok })
        })
        .collect();
    checks.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::Coefficients;

    fn ring(d: &str) -> FiniteRing {
        FiniteRing::parse(d).unwrap()
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn fl_f2_2_is_a_circle() {
        let c = build_fl(&ring("fq:2"), 2, &b()).unwrap();
        assert_eq!(c.vertex_count(), 3);
        assert_eq!(c.simplices_of_dim(1).len(), 3);
        let h = c.chain_complex(&b()).unwrap().homology_integral();
        assert_eq!((h[0].betti, h[1].betti), (1, 1));
    }

    #[test]
    fn fl_f3_2_is_k4() {
        let c = build_fl(&ring("fq:3"), 2, &b()).unwrap();
        assert_eq!(c.vertex_count(), 4);
        assert_eq!(c.simplices_of_dim(1).len(), 6);
        let h = c.chain_complex(&b()).unwrap().homology_integral();
        assert_eq!((h[0].betti, h[1].betti), (1, 3));
    }

    #[test]
    fn fl_facets_are_exactly_the_splittings() {
        for (desc, n) in [("fq:2", 2usize), ("fq:3", 2), ("fq:2", 3)] {
            let r = ring(desc);
            let fl = build_fl(&r, n, &b()).unwrap();
            let spl = enumerate_splittings(&r, n, &b()).unwrap();
            assert_eq!(fl.facets().len(), spl.len(), "{desc} rank {n}");
        }
    }

    #[test]
    fn fl_f2_3_dimension() {
        let c = build_fl(&ring("fq:2"), 3, &b()).unwrap();
        assert_eq!(c.vertex_count(), 21);
        assert_eq!(c.dimension(), 5); // 3! - 1
    }

    #[test]
    fn spl_examples() {
        let c = build_spl(&ring("fq:2"), 2, &b()).unwrap();
        assert_eq!(c.vertex_count(), 3);
        assert_eq!(c.simplices_of_dim(1).len(), 3);
        let c = build_spl(&ring("fq:3"), 2, &b()).unwrap();
        assert_eq!(c.vertex_count(), 6);
        assert_eq!(c.simplices_of_dim(1).len(), 12);
        let c = build_spl(&ring("fq:2"), 1, &b()).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.dimension(), 0);
    }

    #[test]
    fn nerve_of_total_order_and_antichain() {
        let chain = Poset::from_relation(vec![0u32, 1, 2], |a, b| a <= b);
        let n = chain.nerve(&b()).unwrap();
        assert_eq!(n.dimension(), 2);
        assert_eq!(n.simplices_of_dim(2).len(), 1);
        let anti = Poset::from_relation(vec![0u32, 1, 2], |a, bb| a == bb);
        let n = anti.nerve(&b()).unwrap();
        assert_eq!(n.dimension(), 0);
        assert_eq!(n.vertex_count(), 3);
    }

    #[test]
    fn et_f2_2_is_a_hexagon() {
        let r = ring("fq:2");
        let poset = build_e_poset(&r, 2, &b()).unwrap();
        assert!(poset.validate());
        let nerve = poset.nerve(&b()).unwrap();
        assert_eq!(nerve.vertex_count(), 6);
        assert_eq!(nerve.simplices_of_dim(1).len(), 6);
        let h = nerve.chain_complex(&b()).unwrap().homology_integral();
        assert_eq!((h[0].betti, h[1].betti), (1, 1));
    }

    #[test]
    fn lower_set_of_single_splitting_is_a_cone() {
        let r = ring("fq:2");
        let poset = build_e_poset(&r, 2, &b()).unwrap();
        let max = poset.maximal_elements();
        let l = poset.lower_set(&[max[0]]);
        assert_eq!(l.len(), 3); // splitting and its 2 flags
        let h = l.nerve(&b()).unwrap().chain_complex(&b()).unwrap().homology_integral();
        assert_eq!(h[0].betti, 1);
        assert!(h.iter().skip(1).all(|g| g.is_trivial()));
    }

    #[test]
    fn m_shape_example() {
        // V = A^3, s = {Ae1, Ae2, Ae3}, t = {Ae1, A(e1+e2), Ae3}
        for desc in ["fq:2", "fq:3"] {
            let r = ring(desc);
            let poset = build_e_poset(&r, 3, &b()).unwrap();
            let mk = |vectors: [[u32; 3]; 3]| {
                let lines = vectors
                    .iter()
                    .map(|v| crate::modlin::Line::new(&r, v).unwrap())
                    .collect();
                EPoint::from_splitting(&r, &Splitting::new(&r, lines).unwrap())
            };
            let s = mk([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
            let t = mk([[1, 0, 0], [1, 1, 0], [0, 0, 1]]);
            let si = poset.position(&s).unwrap();
            let ti = poset.position(&t).unwrap();
            let l = poset.lower_set(&[si, ti]);
            assert_eq!(l.minimal_elements().len(), 3, "{desc}");
            assert_eq!(l.maximal_elements().len(), 2, "{desc}");
            let nerve = l.nerve(&b()).unwrap();
            assert_eq!(nerve.vertex_count(), 5, "{desc}");
            assert_eq!(nerve.simplices_of_dim(1).len(), 4, "{desc}");
            let h = nerve.chain_complex(&b()).unwrap().homology_integral();
            assert_eq!(h[0].betti, 1);
            assert!(h.iter().skip(1).all(|g| g.is_trivial()));
        }
    }

    #[test]
    fn lower_set_of_everything_with_minimum() {
        let chain = Poset::from_relation(vec![0u32, 1, 2], |a, b| a <= b);
        let l = chain.lower_set(&[0, 1, 2]);
        assert_eq!(l.len(), 1);
        assert_eq!(l.labels()[0], 0);
    }

    #[test]
    fn barycentric_subdivision_counts() {
        // one edge -> path with 3 vertices
        let edge = SimplicialComplex::from_generators(vec![0u32, 1], vec![vec![0, 1]]);
        let sd = edge.barycentric_subdivision(&b()).unwrap();
        assert_eq!(sd.vertex_count(), 3);
        assert_eq!(sd.simplices_of_dim(1).len(), 2);
        // triangle boundary -> hexagon
        let tri = SimplicialComplex::from_generators(
            vec![0u32, 1, 2],
            vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        );
        let sd = tri.barycentric_subdivision(&b()).unwrap();
        assert_eq!(sd.vertex_count(), 6);
        assert_eq!(sd.simplices_of_dim(1).len(), 6);
        // full 2-simplex -> 7 vertices, 12 edges, 6 triangles
        let full = SimplicialComplex::from_generators(vec![0u32, 1, 2], vec![vec![0, 1, 2]]);
        let sd = full.barycentric_subdivision(&b()).unwrap();
        assert_eq!(sd.vertex_count(), 7);
        assert_eq!(sd.simplices_of_dim(1).len(), 12);
        assert_eq!(sd.simplices_of_dim(2).len(), 6);
        // Euler characteristic preserved
        assert_eq!(
            full.euler_characteristic(&b()).unwrap(),
            sd.euler_characteristic(&b()).unwrap()
        );
    }

    #[test]
    fn cells_f2_2() {
        let cs = CellStructure::build(&ring("fq:2"), 2, &b()).unwrap();
        assert_eq!(cs.cells_of_dim(0).len(), 3);
        assert_eq!(cs.cells_of_dim(1).len(), 3);
        let h = cs.chain_complex().homology_integral();
        assert_eq!((h[0].betti, h[1].betti), (1, 1));
    }

    #[test]
    fn cells_f2_3_counts_and_euler() {
        let cs = CellStructure::build(&ring("fq:2"), 3, &b()).unwrap();
        assert_eq!(cs.cells_of_dim(0).len(), 21);
        assert_eq!(cs.cells_of_dim(1).len(), 42);
        assert_eq!(cs.cells_of_dim(2).len(), 28);
        assert_eq!(cs.euler_characteristic(), 7);
        // matches the nerve's Euler characteristic
        let nerve = cs.poset.nerve(&b()).unwrap();
        assert_eq!(nerve.euler_characteristic(&b()).unwrap(), 7);
    }

    #[test]
    fn cellular_matches_simplicial_f2_3() {
        let cs = CellStructure::build(&ring("fq:2"), 3, &b()).unwrap();
        let cell_h = cs.chain_complex().homology_integral();
        let simp_h = cs
            .poset
            .nerve(&b())
            .unwrap()
            .chain_complex(&b())
            .unwrap()
            .homology_integral();
        for d in 0..cell_h.len().max(simp_h.len()) {
            let ch = cell_h.get(d);
            let sh = simp_h.get(d);
            let cb = ch.map_or(0, |g| g.betti);
            let sb = sh.map_or(0, |g| g.betti);
            assert_eq!(cb, sb, "betti in degree {d}");
            let ct = ch.map(|g| g.torsion.clone()).unwrap_or_default();
            let st = sh.map(|g| g.torsion.clone()).unwrap_or_default();
            assert_eq!(ct, st, "torsion in degree {d}");
        }
    }

    #[test]
    fn splitting_cells_have_circle_boundaries_in_rank_3() {
        let cs = CellStructure::build(&ring("fq:2"), 3, &b()).unwrap();
        for p in cs.cells_of_dim(2).into_iter().take(4) {
            let bc = cs.cell_boundary_complex(p, &b()).unwrap();
            let h = bc.chain_complex(&b()).unwrap().homology_integral();
            assert_eq!(h[0].betti, 1);
            assert_eq!(h[1].betti, 1);
            assert!(h[0].torsion.is_empty() && h[1].torsion.is_empty());
        }
    }

    #[test]
    fn product_embedding_into_f2_3() {
        let r = ring("fq:2");
        let w = crate::modlin::Line::standard(&r, 3, 0).to_submodule(&r);
        let emb = ProductEmbedding::new(&r, &w).unwrap();
        let e1 = enumerate_e_points(&r, 1, &b()).unwrap();
        let e2 = enumerate_e_points(&r, 2, &b()).unwrap();
        let poset = build_e_poset(&r, 3, &b()).unwrap();
        let mut images = Vec::new();
        for a in &e1 {
            for bb in &e2 {
                let img = emb.embed(&r, a, bb).unwrap();
                assert!(poset.position(&img).is_some(), "image must lie in E(V)");
                images.push((a.clone(), bb.clone(), img));
            }
        }
        assert_eq!(images.len(), 6);
        // injective
        let distinct: BTreeSet<&EPoint> = images.iter().map(|(_, _, i)| i).collect();
        assert_eq!(distinct.len(), 6);
        // order preserving in the second factor (first factor is a point)
        for (_, b1, i1) in &images {
            for (_, b2, i2) in &images {
                let lhs = b1.leq(&r, b2);
                let rhs = i1.leq(&r, i2);
                assert_eq!(lhs, rhs);
            }
        }
        // image = elements whose partial flag contains W
        let expect: usize = poset
            .labels()
            .iter()
            .filter(|p| p.flag().iter().any(|s| s == &w))
            .count();
        assert_eq!(expect, 6);
    }
}
