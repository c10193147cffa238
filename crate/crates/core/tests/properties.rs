//! Randomized invariants.

mod common;

use decomp_lab::cyclolin::CycloScalar;
use decomp_lab::gflin::{kernel, rref, GFSubspace, SymplecticSpace};
use decomp_lab::homology::{
    chain_homology, homology, induced_maps, mayer_vietoris_check, smith_normal_form, ChainMap, SparseMatrixZ,
};
use decomp_lab::poset::{random_poset, union_and_intersection, FinPoset, PosetMap};
use decomp_lab::repdecomp::{
    f_delta, f_gamma, glom_any, isorefine, uniformize, HeisGroup,
};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, cols), rows)
}

/// Applies random elementary row operations of determinant ±1.
fn unimodular_rows(m: &[Vec<i64>], ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut m = m.to_vec();
    let n = m.len();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            m.swap(i, (i + 1) % n);
        } else {
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(&src) {
                *x += c * y;
            }
        }
    }
    m
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

fn down_closure<L>(poset: &FinPoset<L>, seeds: &[usize]) -> Vec<usize> {
    (0..poset.len()).filter(|&x| seeds.iter().any(|&s| poset.leq(x, s))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_unimodular_invariant(
        m in matrix(4, 5),
        row_ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
        col_ops in prop::collection::vec((0usize..5, 0usize..5, -3i64..=3), 0..8),
    ) {
        let a = smith_normal_form(&SparseMatrixZ::from_i64(&m));
        let rows = unimodular_rows(&m, &row_ops);
        let both = transpose(&unimodular_rows(&transpose(&rows), &col_ops));
        let b = smith_normal_form(&SparseMatrixZ::from_i64(&both));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn smith_rank_matches_rational_rank(m in matrix(5, 4)) {
        let q: Vec<Vec<BigRational>> =
            m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
        prop_assert_eq!(smith_normal_form(&SparseMatrixZ::from_i64(&m)).rank(), common::rational_rank(q));
    }

    #[test]
    fn rank_plus_nullity(p in small_prime(), rows in prop::collection::vec(prop::collection::vec(0u32..5, 5), 0..6)) {
        let row_space = rref(p, 5, &rows).unwrap();
        let null = kernel(p, 5, &rows).unwrap();
        prop_assert_eq!(row_space.dim() + null.dim(), 5);
    }

    #[test]
    fn annihilator_and_perp_are_involutions(p in small_prime(), rows in prop::collection::vec(prop::collection::vec(0u32..5, 4), 0..5)) {
        let w = rref(p, 4, &rows).unwrap();
        prop_assert_eq!(&w.annihilator().annihilator(), &w);
        let s = SymplecticSpace::new(p, 2).unwrap();
        prop_assert_eq!(s.perp(&s.perp(&w).unwrap()).unwrap(), w.clone());
        prop_assert_eq!(s.perp(&w).unwrap().dim(), 4 - w.dim());
    }

    #[test]
    fn cyclotomic_text_round_trip(order in prop::sample::select(vec![3u32, 4, 5]), coeffs in prop::collection::vec((-9i64..=9, 1i64..=5), 5)) {
        let len = if order == 4 { 2 } else { order as usize - 1 };
        let q: Vec<BigRational> = coeffs[..len].iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect();
        let x = CycloScalar::from_coeffs(order, q).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        let back = CycloScalar::parse(order, &serde_json::from_str::<String>(&text).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn subspace_json_round_trip(p in small_prime(), rows in prop::collection::vec(prop::collection::vec(0u32..5, 4), 0..4)) {
        let w = rref(p, 4, &rows).unwrap();
        let v: serde_json::Value = serde_json::to_value(&w).unwrap();
        let basis: Vec<Vec<u32>> = serde_json::from_value(v["basis"].clone()).unwrap();
        let p2 = v["p"].as_u64().unwrap() as u32;
        let n = v["ambient_dim"].as_u64().unwrap() as usize;
        prop_assert_eq!(rref(p2, n, &basis).unwrap(), w);
    }

    #[test]
    fn subdivision_preserves_homology(seed in any::<u64>(), n in 1usize..=8, density in 0.1f64..0.7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poset = random_poset(&mut rng, n, density);
        let sd = poset.edgewise_subdivision();
        let h = homology(&poset.order_complex().unwrap(), true).unwrap();
        let hs = homology(&sd.order_complex().unwrap(), true).unwrap();
        prop_assert_eq!(&h, &hs);
        prop_assert_eq!(common::reduced_betti(&poset.order_complex().unwrap()), h.betti_numbers().into_iter().filter(|&(_, b)| b > 0).collect());
    }

    #[test]
    fn induced_isomorphism_iff_cone_is_acyclic(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poset = random_poset(&mut rng, n, 0.4);
        let sd = poset.edgewise_subdivision();
        let pr = &poset;
        let top: Vec<usize> = (0..n).flat_map(|x| (0..n).filter(move |&y| pr.leq(x, y))).collect();
        let map = PosetMap::new(&sd, &poset, top).unwrap();
        let chain = ChainMap::from_simplicial(&map.simplicial_map(&sd, &poset).unwrap(), true).unwrap();
        let all_iso = induced_maps(&chain).unwrap().iter().all(|m| m.is_iso);
        let cone_acyclic = chain_homology(&chain.mapping_cone()).is_acyclic();
        prop_assert!(all_iso);
        prop_assert_eq!(all_iso, cone_acyclic);

        // A constant map to a point is an isomorphism only on acyclic posets.
        let constant = PosetMap::new(&poset, &FinPoset::chain(vec![0usize]), vec![0; n]).unwrap();
        let c = ChainMap::from_simplicial(&constant.simplicial_map(&poset, &FinPoset::chain(vec![0usize])).unwrap(), true).unwrap();
        let iso = induced_maps(&c).unwrap().iter().all(|m| m.is_iso);
        prop_assert_eq!(iso, chain_homology(&c.mapping_cone()).is_acyclic());
        prop_assert_eq!(iso, homology(&poset.order_complex().unwrap(), true).unwrap().is_acyclic());
    }

    #[test]
    fn mayer_vietoris_ranks(seed in any::<u64>(), n in 2usize..=8, a in prop::collection::vec(0usize..8, 1..3), b in prop::collection::vec(0usize..8, 1..3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poset = random_poset(&mut rng, n, 0.4);
        let first = down_closure(&poset, &a.iter().map(|x| x % n).collect::<Vec<_>>());
        let second = down_closure(&poset, &b.iter().map(|x| x % n).collect::<Vec<_>>());
        let triple = union_and_intersection(&poset, &first, &second).unwrap();
        prop_assert!(mayer_vietoris_check(&triple).unwrap().consistent);
    }
}

#[test]
fn coisotropic_subspaces_have_dimension_at_least_k() {
    for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)] {
        let s = SymplecticSpace::new(p, k).unwrap();
        let all = s.proper_coisotropic_subspaces().unwrap();
        assert_eq!(all.len() as u64, common::tits_sp_size(p as u64, k as u32));
        for w in &all {
            assert!(w.dim() >= k);
            assert!(s.radical(w).unwrap().is_subspace_of(w));
            assert!(s.perp(w).unwrap().is_subspace_of(w));
        }
    }
}

fn translation_subspaces(p: u32, k: usize) -> Vec<GFSubspace> {
    decomp_lab::gflin::enumerate_subspaces(p, k, None).unwrap()
}

#[test]
fn glom_and_refine_are_idempotent() {
    for (p, k) in [(2, 2), (3, 1), (3, 2), (2, 3)] {
        let g = HeisGroup::new(p, k).unwrap();
        let eps = g.basis_lines();
        let subs = translation_subspaces(p, k);
        for big in &subs {
            let kg = g.translation_generators(big);
            let glommed = glom_any(&g, &eps, &kg).unwrap();
            assert_eq!(glom_any(&g, &glommed, &kg).unwrap(), glommed);
            for small in subs.iter().filter(|h| h.is_subspace_of(big)) {
                let hg = g.translation_generators(small);
                let refined = isorefine(&g, &glommed, &hg).unwrap();
                assert_eq!(isorefine(&g, &refined, &hg).unwrap(), refined);
            }
        }
    }
}

#[test]
fn uniformize_is_idempotent_and_fixes_uniform_inputs() {
    for (p, k) in [(2, 2), (3, 2)] {
        let g = HeisGroup::new(p, k).unwrap();
        let space = SymplecticSpace::new(p, k).unwrap();
        let delta = GFSubspace::span(p, 2 * k, &(0..k).map(|i| decomp_lab::gflin::GFVector::unit(p, 2 * k, i)).collect::<Vec<_>>()).unwrap();
        for h in translation_subspaces(p, k) {
            for kk in translation_subspaces(p, k).into_iter().filter(|x| h.is_subspace_of(x)) {
                if h.is_zero() && kk.is_full() {
                    continue;
                }
                let lambda = f_delta(&g, &h, &kk).unwrap();
                let u = uniformize(&g, &lambda, &delta).unwrap();
                assert_eq!(u, lambda);
                assert_eq!(uniformize(&g, &u, &delta).unwrap(), u);
            }
        }
        for w in space.proper_coisotropic_subspaces().unwrap() {
            let lambda = f_gamma(&g, &w).unwrap();
            assert_eq!(uniformize(&g, &lambda, &w).unwrap(), lambda);
        }
    }
}

#[test]
fn isotypical_refinement_is_unique() {
    // Refining any coarser fixed decomposition by the radical of W recovers λ_W.
    for (p, k) in [(2, 2), (3, 2)] {
        let g = HeisGroup::new(p, k).unwrap();
        let s = SymplecticSpace::new(p, k).unwrap();
        let ws = s.proper_coisotropic_subspaces().unwrap();
        let lambdas: Vec<_> = ws.iter().map(|w| f_gamma(&g, w).unwrap()).collect();
        let mut pairs = 0;
        for (i, w) in ws.iter().enumerate() {
            let gens = g.generators_of(&s.radical(w).unwrap());
            assert_eq!(isorefine(&g, &g.whole(), &gens).unwrap(), lambdas[i]);
            for (j, w2) in ws.iter().enumerate() {
                if i != j && w.is_subspace_of(w2) {
                    assert_eq!(isorefine(&g, &lambdas[j], &gens).unwrap(), lambdas[i]);
                    pairs += 1;
                }
            }
        }
        assert!(pairs > 0);
    }
}

#[test]
fn dense_representation_is_multiplicative() {
    use rand::Rng;
    for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)] {
        let g = HeisGroup::new(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64 * 31 + k as u64);
        let mut random = || {
            let a: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p)).collect();
            let b: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p)).collect();
            let c = rng.gen_range(0..p);
            g.element(&a, &b, c)
        };
        for _ in 0..200 {
            let (x, y) = (random(), random());
            let lhs = g.matrix_rep(&x).mul(&g.matrix_rep(&y)).unwrap();
            assert_eq!(lhs, g.matrix_rep(&g.mul(&x, &y)));
            assert_eq!(g.matrix_rep(&x).trace(), g.rep(&x).trace());
        }
    }
}
