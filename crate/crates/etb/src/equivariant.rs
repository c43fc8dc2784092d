//! Finite matrix groups GLₙ(A), their elementary and diagonal subgroups,
//! actions on the buildings through simplicial automorphisms, orbit tools,
//! coinvariants H₀(G, −), and the two homology probes: triviality of the
//! elementary action on stable classes, and the rational stabilisation
//! report.

use crate::complexes::{build_fl, ProductEmbedding, SimplicialComplex};
use crate::homology::{
    presented_group, AbelianInvariants, ChainMap, HomologyBasis, SnfFlags, SparseIntMatrix,
};
use crate::modlin::{enumerate_e_points, mat_vec, EPoint, Flag, Line, RMat, Splitting, Submodule};
use crate::ring::{Elt, FiniteRing};
use crate::{Budget, Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

// ---------------------------------------------------------------------------
// Generators and group enumeration
// ---------------------------------------------------------------------------

/// Elementary matrices I + a·E_{ij}, i ≠ j, a ≠ 0.
pub fn elementary_generators(ring: &FiniteRing, n: usize) -> Vec<RMat> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for a in 1..ring.order() {
                let mut m = RMat::identity(n);
                m.set(i, j, a);
                out.push(m);
            }
        }
    }
    out
}

/// Diagonal matrices with one non-identity unit entry.
pub fn diagonal_generators(ring: &FiniteRing, n: usize) -> Vec<RMat> {
    let mut out = Vec::new();
    for i in 0..n {
        for u in ring.units() {
            if u == 1 {
                continue;
            }
            let mut m = RMat::identity(n);
            m.set(i, i, u);
            out.push(m);
        }
    }
    out
}

/// Adjacent transposition matrices.
pub fn permutation_generators(ring: &FiniteRing, n: usize) -> Vec<RMat> {
    let _ = ring;
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut m = RMat::identity(n);
        m.set(i, i, 0);
        m.set(i + 1, i + 1, 0);
        m.set(i, i + 1, 1);
        m.set(i + 1, i, 1);
        out.push(m);
    }
    out
}

/// A generating set of GLₙ over a finite commutative ring: elementary,
/// diagonal and permutation matrices.
pub fn gl_generators(ring: &FiniteRing, n: usize) -> Vec<RMat> {
    let mut out = elementary_generators(ring, n);
    out.extend(diagonal_generators(ring, n));
    out.extend(permutation_generators(ring, n));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupFlavor {
    FullGl,
    Elementary,
    DiagonalTorus,
}

/// Duplicate-free enumeration by closure of generators.
pub fn enumerate_group(
    ring: &FiniteRing,
    n: usize,
    flavor: GroupFlavor,
    budget: &Budget,
) -> Result<Vec<RMat>> {
    let gens = match flavor {
        GroupFlavor::FullGl => gl_generators(ring, n),
        GroupFlavor::Elementary => elementary_generators(ring, n),
        GroupFlavor::DiagonalTorus => diagonal_generators(ring, n),
    };
    let mut seen: BTreeSet<Vec<Elt>> = BTreeSet::new();
    let mut queue: VecDeque<RMat> = VecDeque::new();
    let id = RMat::identity(n);
    seen.insert(id.data.clone());
    queue.push_back(id);
    let mut out = Vec::new();
    while let Some(m) = queue.pop_front() {
        out.push(m.clone());
        budget.charge_group("group enumeration", out.len() as u64)?;
        for g in &gens {
            let prod = crate::modlin::mat_mul(ring, g, &m);
            if seen.insert(prod.data.clone()) {
                queue.push_back(prod);
            }
        }
    }
    out.sort_by(|a, b| a.data.cmp(&b.data));
    Ok(out)
}

/// The canonical PGL representative: scale by the inverse of the first
/// nonzero entry in row-major order (fields only).
pub fn pgl_canonicalize(ring: &FiniteRing, g: &RMat) -> RMat {
    let first = g.data.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let inv = ring.inv(first).expect("leading entry of an invertible matrix is a unit");
    let mut out = g.clone();
    for x in out.data.iter_mut() {
        *x = ring.mul(inv, *x);
    }
    out
}

// ---------------------------------------------------------------------------
// Actions on lines, flags, splittings and ℰ-points
// ---------------------------------------------------------------------------

pub fn act_line(ring: &FiniteRing, g: &RMat, l: &Line) -> Line {
    Line::new(ring, &mat_vec(ring, g, l.generator())).expect("group elements preserve lines")
}

pub fn act_submodule(ring: &FiniteRing, g: &RMat, s: &Submodule) -> Submodule {
    let rows: Vec<Vec<Elt>> = s.basis().iter().map(|r| mat_vec(ring, g, r)).collect();
    Submodule::from_basis(ring, rows).expect("group elements preserve summands")
}

pub fn act_flag(ring: &FiniteRing, g: &RMat, f: &Flag) -> Flag {
    Flag::new(
        ring,
        f.steps().iter().map(|s| act_submodule(ring, g, s)).collect(),
    )
    .expect("group elements preserve flags")
}

pub fn act_splitting(ring: &FiniteRing, g: &RMat, a: &Splitting) -> Splitting {
    Splitting::new(
        ring,
        a.lines().iter().map(|l| act_line(ring, g, l)).collect(),
    )
    .expect("group elements preserve splittings")
}

pub fn act_epoint(ring: &FiniteRing, g: &RMat, p: &EPoint) -> EPoint {
    let flag = p.flag().iter().map(|s| act_submodule(ring, g, s)).collect();
    let splittings = p
        .splittings()
        .iter()
        .map(|set| set.iter().map(|m| act_submodule(ring, g, m)).collect())
        .collect();
    EPoint::new(flag, splittings)
}

/// The stabiliser of a splitting inside the full group (brute force).
pub fn stabilizer_of_splitting(
    ring: &FiniteRing,
    beta: &Splitting,
    budget: &Budget,
) -> Result<Vec<RMat>> {
    let group = enumerate_group(ring, beta.rank(), GroupFlavor::FullGl, budget)?;
    Ok(group
        .into_iter()
        .filter(|g| &act_splitting(ring, g, beta) == beta)
        .collect())
}

/// The vertex permutation a label action induces on a complex.  Errors if
/// the action fails to preserve the vertex set or the simplices.
pub fn vertex_permutation<L: Ord + Clone>(
    complex: &SimplicialComplex<L>,
    act: impl Fn(&L) -> L,
) -> Result<Vec<u32>> {
    let mut perm = Vec::with_capacity(complex.vertex_count());
    let mut hit = vec![false; complex.vertex_count()];
    for l in complex.labels() {
        let img = act(l);
        let id = complex
            .vertex_id(&img)
            .ok_or_else(|| Error::InvalidArgument("action leaves the vertex set".into()))?;
        if std::mem::replace(&mut hit[id as usize], true) {
            return Err(Error::InvalidArgument("action is not injective on vertices".into()));
        }
        perm.push(id);
    }
    for facet in complex.facets() {
        let mut img: Vec<u32> = facet.iter().map(|&v| perm[v as usize]).collect();
        img.sort_unstable();
        if !complex.is_simplex(&img) {
            return Err(Error::InvalidArgument("action does not preserve simplices".into()));
        }
    }
    Ok(perm)
}

/// Precomputed chain data for mapping one complex into another repeatedly.
pub struct SimplicialMapper {
    src_chain: crate::homology::ChainComplex,
    dst_chain: crate::homology::ChainComplex,
    src_simplices: Vec<Vec<Vec<u32>>>,
    dst_index: Vec<std::collections::BTreeMap<Vec<u32>, usize>>,
}

impl SimplicialMapper {
    pub fn new<L: Ord + Clone, M: Ord + Clone>(
        src: &SimplicialComplex<L>,
        dst: &SimplicialComplex<M>,
        budget: &Budget,
        max_degree: Option<usize>,
    ) -> Result<SimplicialMapper> {
        let cap = max_degree.unwrap_or(usize::MAX);
        let src_chain = src.chain_complex_through(budget, cap)?;
        let dst_chain = dst.chain_complex_through(budget, cap)?;
        let src_simplices = src.all_simplices_through(budget, cap)?;
        let dst_index = dst
            .all_simplices_through(budget, cap)?
            .into_iter()
            .map(|list| {
                list.into_iter()
                    .enumerate()
                    .map(|(i, s)| (s, i))
                    .collect()
            })
            .collect();
        Ok(SimplicialMapper { src_chain, dst_chain, src_simplices, dst_index })
    }

    /// The chain map a vertex map induces, with orientation signs from
    /// sorting.  The vertex map must be injective on every simplex.
    pub fn chain_map(&self, vmap: &[u32]) -> Result<ChainMap> {
        let mut maps = Vec::new();
        for (d, simplices) in self.src_simplices.iter().enumerate() {
            let index = self.dst_index.get(d);
            let mut m = SparseIntMatrix::zero(self.dst_chain.rank(d), self.src_chain.rank(d));
            for (j, s) in simplices.iter().enumerate() {
                let mut img: Vec<u32> = s.iter().map(|&v| vmap[v as usize]).collect();
                let mut sign = 1i64;
                for a in 0..img.len() {
                    for bb in a + 1..img.len() {
                        match img[a].cmp(&img[bb]) {
                            std::cmp::Ordering::Greater => {
                                img.swap(a, bb);
                                sign = -sign;
                            }
                            std::cmp::Ordering::Equal => {
                                return Err(Error::InvalidArgument(
                                    "vertex map degenerates a simplex".into(),
                                ));
                            }
                            _ => {}
                        }
                    }
                }
                let i = *index
                    .and_then(|ix| ix.get(img.as_slice()))
                    .ok_or_else(|| Error::InvalidArgument("image is not a simplex".into()))?;
                m.set(i, j, sign);
            }
            maps.push(m);
        }
        Ok(ChainMap::new(&self.src_chain, &self.dst_chain, maps))
    }
}

/// One-shot convenience wrapper around [`SimplicialMapper`].
pub fn simplicial_chain_map<L: Ord + Clone, M: Ord + Clone>(
    src: &SimplicialComplex<L>,
    dst: &SimplicialComplex<M>,
    vmap: &[u32],
    budget: &Budget,
    max_degree: Option<usize>,
) -> Result<ChainMap> {
    SimplicialMapper::new(src, dst, budget, max_degree)?.chain_map(vmap)
}

// ---------------------------------------------------------------------------
// ℤ[G]-modules and coinvariants
// ---------------------------------------------------------------------------

/// A free ℤ-module with a signed permutation action of each group generator.
pub struct ZGModule {
    pub rank: usize,
    pub actions: Vec<SparseIntMatrix>,
}

impl ZGModule {
    pub fn new(rank: usize, actions: Vec<SparseIntMatrix>) -> ZGModule {
        for a in &actions {
            assert_eq!((a.rows, a.cols), (rank, rank));
        }
        ZGModule { rank, actions }
    }

    /// Each action matrix must be invertible over ℤ.
    pub fn validate(&self) -> bool {
        self.actions.iter().all(|a| {
            let s = crate::homology::snf(a, SnfFlags::none());
            s.rank() == self.rank && s.diag.iter().all(|d| d.is_one())
        })
    }

    /// H₀(G, M) = M / span{ g·x − x }, from the generator actions.
    pub fn coinvariants(&self) -> AbelianInvariants {
        let cols = self.actions.len() * self.rank;
        let mut rels = SparseIntMatrix::zero(self.rank, cols);
        let mut c = 0;
        for a in &self.actions {
            for j in 0..self.rank {
                for (&(i, jj), v) in a.iter() {
                    if jj == j {
                        rels.add_to(i, c, v.clone());
                    }
                }
                rels.add_to(j, c, -1);
                c += 1;
            }
        }
        presented_group(self.rank, &rels)
    }
}

/// The signed permutation action of a vertex permutation on the degree-d
/// chains of a complex.
pub fn chain_action<L: Ord + Clone>(
    complex: &SimplicialComplex<L>,
    d: usize,
    vmap: &[u32],
) -> SparseIntMatrix {
    let simplices = complex.simplices_of_dim(d);
    let index: BTreeMap<&[u32], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let mut m = SparseIntMatrix::zero(simplices.len(), simplices.len());
    for (j, s) in simplices.iter().enumerate() {
        let mut img: Vec<u32> = s.iter().map(|&v| vmap[v as usize]).collect();
        let mut sign = 1i64;
        for a in 0..img.len() {
            for b in a + 1..img.len() {
                if img[a] > img[b] {
                    img.swap(a, b);
                    sign = -sign;
                }
            }
        }
        m.set(index[img.as_slice()], j, sign);
    }
    m
}

// ---------------------------------------------------------------------------
// Elementary triviality on stable homology classes
// ---------------------------------------------------------------------------

pub struct ElementaryReport {
    pub ring: String,
    pub n: usize,
    pub generator_count: usize,
    pub image_classes: usize,
    pub per_generator: Vec<bool>,
    pub all_trivial: bool,
}

/// The inclusion 𝔽𝕃(Aⁿ) ↪ 𝔽𝕃(Aⁿ⁺¹) induced by appending a zero coordinate
/// and the full module as the top flag step.
fn embed_flag(ring: &FiniteRing, f: &Flag, n: usize) -> Flag {
    let mut steps: Vec<Submodule> = f
        .steps()
        .iter()
        .map(|s| {
            let rows: Vec<Vec<Elt>> = s
                .basis()
                .iter()
                .map(|r| {
                    let mut v = r.clone();
                    v.push(0);
                    v
                })
                .collect();
            Submodule::from_basis(ring, rows).expect("embedding preserves summands")
        })
        .collect();
    steps.push(Submodule::full(n + 1));
    Flag::new(ring, steps).expect("embedded flag is a flag")
}

/// For every elementary generator g of E_{n+1}(A): does the induced map on
/// H₁(𝔽𝕃(Aⁿ⁺¹)) fix the image of H₁(𝔽𝕃(Aⁿ)) pointwise?
pub fn elementary_triviality_check(
    ring: &FiniteRing,
    n: usize,
    budget: &Budget,
) -> Result<ElementaryReport> {
    let small = build_fl(ring, n, budget)?;
    let big = build_fl(ring, n + 1, budget)?;
    let vmap: Vec<u32> = small
        .labels()
        .iter()
        .map(|f| {
            big.vertex_id(&embed_flag(ring, f, n))
                .expect("embedded flag is a vertex")
        })
        .collect();
    let incl = simplicial_chain_map(&small, &big, &vmap, budget, Some(2))?;
    let small_chain = small.chain_complex(budget)?;
    let big_chain = big.chain_complex(budget)?;
    let src_basis = small_chain.homology_basis(1);
    let dst_basis = big_chain.homology_basis(1);
    let images: Vec<Vec<BigInt>> = (0..src_basis.coordinate_count())
        .map(|i| incl.apply(1, &src_basis.generator(i)))
        .collect();
    let mapper = SimplicialMapper::new(&big, &big, budget, Some(2))?;
    let mut per_generator = Vec::new();
    for g in elementary_generators(ring, n + 1) {
        let perm = vertex_permutation(&big, |f| act_flag(ring, &g, f))?;
        let gmap = mapper.chain_map(&perm)?;
        let fixed = images.iter().all(|cycle| {
            let moved = gmap.apply(1, cycle);
            dst_basis.same_class(&moved, cycle)
        });
        per_generator.push(fixed);
    }
    Ok(ElementaryReport {
        ring: ring.descriptor(),
        n,
        generator_count: per_generator.len(),
        image_classes: images.len(),
        all_trivial: per_generator.iter().all(|&b| b),
        per_generator,
    })
}

// ---------------------------------------------------------------------------
// Rational stabilisation probe
// ---------------------------------------------------------------------------

/// Observational report: dimensions of H₀(GL_{m+1}, H_m(𝔼𝕋(A^{m+1})) ⊗ ℚ)
/// and H_m(𝔼𝕋(A^d)) ⊗ ℚ, plus the rank of the induced map.  No pass/fail
/// is asserted.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StabilizationProbe {
    pub ring: String,
    pub m: usize,
    pub d: usize,
    pub dim_h_source: usize,
    pub dim_coinvariants: usize,
    pub dim_target: usize,
    pub induced_rank: usize,
}

fn free_coordinate_rows(basis: &HomologyBasis) -> Vec<usize> {
    basis
        .orders()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_zero())
        .map(|(i, _)| i)
        .collect()
}

pub fn stabilization_probe(
    ring: &FiniteRing,
    m: usize,
    d: usize,
    budget: &Budget,
) -> Result<StabilizationProbe> {
    assert!(d > m + 1, "probe needs d > m+1");
    let src_poset = crate::complexes::build_e_poset(ring, m + 1, budget)?;
    let src_nerve = src_poset.nerve(budget)?;
    let src_chain = src_nerve.chain_complex(budget)?;
    let src_basis = src_chain.homology_basis(m);
    let free_rows = free_coordinate_rows(&src_basis);
    let dim_h_source = free_rows.len();

    // coinvariants over Q: quotient the free part by the columns g*·x − x
    let field = crate::field::Rationals;
    let mut span = crate::field::Subspace::zero(&field, dim_h_source);
    for g in gl_generators(ring, m + 1) {
        let perm = vertex_permutation(&src_nerve, |p| act_epoint(ring, &g, p))?;
        let gmap = simplicial_chain_map(&src_nerve, &src_nerve, &perm, budget, Some(m + 1))?;
        let induced = gmap.induced(m, &src_basis, &src_basis);
        for (i, img) in induced.iter().enumerate() {
            if !free_rows.contains(&i) {
                continue;
            }
            let diff: Vec<num_rational::BigRational> = free_rows
                .iter()
                .map(|&row| {
                    let mut x = img[row].clone();
                    if row == i {
                        x -= BigInt::one();
                    }
                    num_rational::BigRational::from_integer(x)
                })
                .collect();
            span.insert(diff);
        }
    }
    let dim_coinvariants = dim_h_source - span.dim();

    // the chain of product embeddings A^{m+1} ⊂ ... ⊂ A^d on nerves
    let dst_poset = crate::complexes::build_e_poset(ring, d, budget)?;
    let dst_nerve = dst_poset.nerve(budget)?;
    let dst_chain = dst_nerve.chain_complex(budget)?;
    let dst_basis = dst_chain.homology_basis(m);
    // vertex map by iterated embedding of E-points
    let mut vmap: Vec<u32> = Vec::with_capacity(src_nerve.vertex_count());
    for p in src_nerve.labels() {
        let mut cur = p.clone();
        for k in (m + 1)..d {
            let w = Submodule::from_basis(
                ring,
                (0..k)
                    .map(|i| {
                        let mut e = vec![0; k + 1];
                        e[i] = 1;
                        e
                    })
                    .collect(),
            )?;
            let emb = ProductEmbedding::new(ring, &w)?;
            let tail = enumerate_e_points(ring, 1, budget)?;
            cur = emb.embed(ring, &cur, &tail[0])?;
        }
        vmap.push(
            dst_nerve
                .vertex_id(&cur)
                .ok_or_else(|| Error::InvalidArgument("embedding left the poset".into()))?,
        );
    }
    let incl = simplicial_chain_map(&src_nerve, &dst_nerve, &vmap, budget, Some(m + 1))?;
    let induced = incl.induced(m, &src_basis, &dst_basis);
    let dst_free = free_coordinate_rows(&dst_basis);
    let mut image_span = crate::field::Subspace::zero(&field, dst_free.len());
    for (i, img) in induced.iter().enumerate() {
        if !free_rows.contains(&i) {
            continue;
        }
        let v: Vec<num_rational::BigRational> = dst_free
            .iter()
            .map(|&row| num_rational::BigRational::from_integer(img[row].clone()))
            .collect();
        image_span.insert(v);
    }
    Ok(StabilizationProbe {
        ring: ring.descriptor(),
        m,
        d,
        dim_h_source,
        dim_coinvariants,
        dim_target: dst_free.len(),
        induced_rank: image_span.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::build_spl;

    fn ring(d: &str) -> FiniteRing {
        FiniteRing::parse(d).unwrap()
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_group(&ring("fq:2"), 2, GroupFlavor::FullGl, &b()).unwrap().len(), 6);
        assert_eq!(enumerate_group(&ring("fq:3"), 2, GroupFlavor::FullGl, &b()).unwrap().len(), 48);
        assert_eq!(enumerate_group(&ring("fq:2"), 3, GroupFlavor::FullGl, &b()).unwrap().len(), 168);
    }

    #[test]
    fn elementary_group_is_sl() {
        // |SL2(F3)| = 24
        let e = enumerate_group(&ring("fq:3"), 2, GroupFlavor::Elementary, &b()).unwrap();
        assert_eq!(e.len(), 24);
        let d = enumerate_group(&ring("fq:3"), 2, GroupFlavor::DiagonalTorus, &b()).unwrap();
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn stabilizer_orders() {
        let r3 = ring("fq:3");
        let s = stabilizer_of_splitting(&r3, &Splitting::standard(&r3, 2), &b()).unwrap();
        assert_eq!(s.len(), 8); // (q-1)^n n! = 4 * 2
        let r2 = ring("fq:2");
        let s = stabilizer_of_splitting(&r2, &Splitting::standard(&r2, 3), &b()).unwrap();
        assert_eq!(s.len(), 6); // 1 * 3!
        let s = stabilizer_of_splitting(&r2, &Splitting::standard(&r2, 1), &b()).unwrap();
        assert_eq!(s.len(), 1); // all of GL_1(F_2)
    }

    #[test]
    fn action_is_functorial_on_fl_f2_2() {
        let r = ring("fq:2");
        let fl = build_fl(&r, 2, &b()).unwrap();
        let group = enumerate_group(&r, 2, GroupFlavor::FullGl, &b()).unwrap();
        let perms: Vec<Vec<u32>> = group
            .iter()
            .map(|g| vertex_permutation(&fl, |f| act_flag(&r, g, f)).unwrap())
            .collect();
        for (gi, g) in group.iter().enumerate() {
            for (hi, h) in group.iter().enumerate() {
                let gh = crate::modlin::mat_mul(&r, g, h);
                let k = group.iter().position(|m| m.data == gh.data).unwrap();
                for v in 0..fl.vertex_count() {
                    let composite = perms[gi][perms[hi][v] as usize];
                    assert_eq!(composite, perms[k][v]);
                }
            }
        }
    }

    #[test]
    fn scalars_act_trivially_on_all_buildings() {
        let r = ring("fq:3");
        let fl = build_fl(&r, 2, &b()).unwrap();
        let spl = build_spl(&r, 2, &b()).unwrap();
        let et = crate::complexes::build_et(&r, 2, &b()).unwrap();
        let mut scalar = RMat::identity(2);
        scalar.set(0, 0, 2);
        scalar.set(1, 1, 2);
        let p1 = vertex_permutation(&fl, |f| act_flag(&r, &scalar, f)).unwrap();
        let p2 = vertex_permutation(&spl, |a| act_splitting(&r, &scalar, a)).unwrap();
        let p3 = vertex_permutation(&et, |p| act_epoint(&r, &scalar, p)).unwrap();
        assert!(p1.iter().enumerate().all(|(i, &x)| i as u32 == x));
        assert!(p2.iter().enumerate().all(|(i, &x)| i as u32 == x));
        assert!(p3.iter().enumerate().all(|(i, &x)| i as u32 == x));
    }

    #[test]
    fn transposition_swaps_coordinate_flags() {
        let r = ring("fq:2");
        let fl = build_fl(&r, 2, &b()).unwrap();
        let swap = permutation_generators(&r, 2).pop().unwrap();
        let perm = vertex_permutation(&fl, |f| act_flag(&r, &swap, f)).unwrap();
        let moved = perm.iter().enumerate().filter(|(i, &x)| *i as u32 != x).count();
        assert_eq!(moved, 2); // swaps the two coordinate flags, fixes the diagonal
    }

    #[test]
    fn coinvariants_examples() {
        // trivial action on Z^k
        let m = ZGModule::new(3, vec![SparseIntMatrix::identity(3)]);
        assert!(m.validate());
        assert_eq!(m.coinvariants(), AbelianInvariants::free(3));
        // sign action of order 2 on Z
        let mut s = SparseIntMatrix::zero(1, 1);
        s.set(0, 0, -1);
        let m = ZGModule::new(1, vec![s]);
        assert_eq!(
            m.coinvariants(),
            AbelianInvariants { betti: 0, torsion: vec![BigInt::from(2)] }
        );
    }

    #[test]
    fn coinvariants_independent_of_generating_set() {
        // GL2(F3) acting on the oriented edges of K(F3^2)
        let r = ring("fq:3");
        let k = crate::grassmann::build_k_complex(&r, 2, 2, &b()).unwrap();
        let with = |mats: &[RMat]| -> AbelianInvariants {
            let actions: Vec<SparseIntMatrix> = mats
                .iter()
                .map(|g| {
                    let perm = vertex_permutation(&k, |l| act_line(&r, g, l)).unwrap();
                    chain_action(&k, 1, &perm)
                })
                .collect();
            ZGModule::new(k.simplices_of_dim(1).len(), actions).coinvariants()
        };
        let small = gl_generators(&r, 2);
        let full = enumerate_group(&r, 2, GroupFlavor::FullGl, &b()).unwrap();
        assert_eq!(with(&small), with(&full));
    }

    #[test]
    fn elementary_triviality_f2_rank2() {
        let report = elementary_triviality_check(&ring("fq:2"), 2, &b()).unwrap();
        assert!(report.all_trivial);
        assert!(report.image_classes > 0);
    }

    #[test]
    fn pgl_canonical_form() {
        let r = ring("fq:5");
        let mut g = RMat::identity(2);
        g.set(0, 0, 3);
        g.set(0, 1, 1);
        g.set(1, 0, 2);
        g.set(1, 1, 4);
        let c = pgl_canonicalize(&r, &g);
        assert_eq!(c.at(0, 0), 1);
        // scalar multiples collapse to the same representative
        let mut g2 = g.clone();
        for x in g2.data.iter_mut() {
            *x = r.mul(2, *x);
        }
        assert_eq!(pgl_canonicalize(&r, &g2).data, c.data);
    }

    #[test]
    fn stabilization_probe_m0() {
        // connected complexes: both sides one-dimensional in degree 0
        let p = stabilization_probe(&ring("fq:2"), 0, 2, &b()).unwrap();
        assert_eq!(p.dim_coinvariants, 1);
        assert_eq!(p.dim_target, 1);
        assert_eq!(p.induced_rank, 1);
    }
}
