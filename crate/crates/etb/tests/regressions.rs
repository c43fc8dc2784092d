//! Frozen regression values.  Everything here was computed once by this
//! artifact and pinned; the values are canonical only relative to the
//! crate's deterministic vertex orders and normal forms.

use etb::complexes::{build_et, build_fl, CellStructure};
use etb::equivariant::simplicial_chain_map;
use etb::homology::Coefficients;
use etb::modlin::{Flag, Submodule};
use etb::ring::FiniteRing;
use etb::spectral::{filter_et, run_spectral};
use etb::Budget;
use num_bigint::BigInt;

fn ring(d: &str) -> FiniteRing {
    FiniteRing::parse(d).unwrap()
}

fn b() -> Budget {
    Budget::default()
}

#[test]
fn integral_homology_of_the_enriched_buildings() {
    let expect: [(&str, usize, &[(usize, &[i64])]); 3] = [
        ("fq:2", 2, &[(1, &[]), (1, &[])]),
        ("fq:3", 2, &[(1, &[]), (3, &[])]),
        ("fq:2", 3, &[(1, &[]), (0, &[2]), (6, &[])]),
    ];
    for (desc, n, groups) in expect {
        let r = ring(desc);
        let h = build_et(&r, n, &b())
            .unwrap()
            .chain_complex(&b())
            .unwrap()
            .homology_integral();
        assert_eq!(h.len(), groups.len(), "{desc} rank {n}");
        for (g, &(betti, torsion)) in h.iter().zip(groups) {
            assert_eq!(g.betti, betti, "{desc} rank {n} degree {}", g.degree);
            let t: Vec<BigInt> = torsion.iter().map(|&x| BigInt::from(x)).collect();
            assert_eq!(g.torsion, t, "{desc} rank {n} degree {}", g.degree);
        }
    }
}

#[test]
fn inclusion_hits_the_torsion_class_of_rank_three() {
    // H1(FL(F2^2)) = Z maps onto H1(FL(F2^3)) = Z/2
    let f2 = ring("fq:2");
    let small = build_fl(&f2, 2, &b()).unwrap();
    let big = build_fl(&f2, 3, &b()).unwrap();
    let vmap: Vec<u32> = small
        .labels()
        .iter()
        .map(|f| {
            let steps: Vec<Submodule> = f
                .steps()
                .iter()
                .map(|s| {
                    let rows: Vec<Vec<u32>> = s
                        .basis()
                        .iter()
                        .map(|r| {
                            let mut v = r.clone();
                            v.push(0);
                            v
                        })
                        .collect();
                    Submodule::from_basis(&f2, rows).unwrap()
                })
                .chain([Submodule::full(3)])
                .collect();
            big.vertex_id(&Flag::new(&f2, steps).unwrap()).unwrap()
        })
        .collect();
    let incl = simplicial_chain_map(&small, &big, &vmap, &b(), Some(2)).unwrap();
    let src = small.chain_complex(&b()).unwrap().homology_basis(1);
    let dst = big.chain_complex(&b()).unwrap().homology_basis(1);
    assert_eq!(src.invariants().betti, 1);
    assert!(src.invariants().torsion.is_empty());
    let dst_inv = dst.invariants();
    assert_eq!(dst_inv.betti, 0);
    assert_eq!(dst_inv.torsion, vec![BigInt::from(2)]);
    let induced = incl.induced(1, &src, &dst);
    assert_eq!(induced.len(), 1);
    // the single nontrivial coordinate of the image is the Z/2 generator
    let nontrivial: Vec<&BigInt> = induced[0]
        .iter()
        .zip(dst.orders())
        .filter(|(_, o)| **o != BigInt::from(1))
        .map(|(c, _)| c)
        .collect();
    assert_eq!(nontrivial, vec![&BigInt::from(1)]);
}

#[test]
fn page_tables_of_rank_three_over_f2_and_q() {
    let f2 = ring("fq:2");
    let cs = CellStructure::build(&f2, 3, &b()).unwrap();
    let fc = filter_et(&cs).unwrap();

    let pages = run_spectral(&fc, Coefficients::PrimeField(2)).unwrap();
    let table: Vec<(usize, usize, usize, usize)> = pages
        .iter()
        .flat_map(|p| p.dims.iter().map(move |(&(a, q), &d)| (p.r, a, q, d)))
        .collect();
    assert_eq!(
        table,
        vec![
            (1, 0, 0, 7),
            (1, 0, 1, 7),
            (1, 1, 0, 21),
            (1, 2, 0, 28),
            (2, 0, 0, 1),
            (2, 0, 1, 7),
            (2, 2, 0, 13),
            (3, 0, 0, 1),
            (3, 0, 1, 1),
            (3, 2, 0, 7),
        ]
    );
    assert_eq!(pages[0].differential_rank(1, 0), 6);
    assert_eq!(pages[0].differential_rank(2, 0), 15);
    assert_eq!(pages[1].differential_rank(2, 0), 6);

    let pages_q = run_spectral(&fc, Coefficients::Rationals).unwrap();
    // the second differential sees one more rank over Q than over F2
    assert_eq!(pages_q[1].differential_rank(2, 0), 7);
    let stable: Vec<(usize, usize, usize)> = pages_q
        .last()
        .unwrap()
        .dims
        .iter()
        .map(|(&(p, q), &d)| (p, q, d))
        .collect();
    assert_eq!(stable, vec![(0, 0, 1), (2, 0, 6)]);
}

#[test]
fn splitting_subsets_stay_in_general_position() {
    use etb::modlin::{enumerate_splittings, in_general_position};
    use itertools::Itertools;
    for desc in ["fq:2", "fq:3"] {
        let r = ring(desc);
        for alpha in enumerate_splittings(&r, 3, &b()).unwrap() {
            for k in 1..=3usize {
                for sub in alpha.lines().iter().cloned().combinations(k) {
                    assert!(in_general_position(&r, &sub).unwrap());
                }
            }
        }
    }
}

#[test]
fn stabilization_probe_reports() {
    // observational values, frozen: the rational stabilisation map out of
    // rank m+1 for m = 1 has nothing to hit in rank 3 over these fields
    let p = etb::equivariant::stabilization_probe(&ring("fq:2"), 1, 3, &b()).unwrap();
    assert_eq!(
        (p.dim_h_source, p.dim_coinvariants, p.dim_target, p.induced_rank),
        (1, 0, 0, 0)
    );
    let p = etb::equivariant::stabilization_probe(&ring("fq:3"), 1, 3, &b()).unwrap();
    assert_eq!(
        (p.dim_h_source, p.dim_coinvariants, p.dim_target, p.induced_rank),
        (3, 0, 0, 0)
    );
}
