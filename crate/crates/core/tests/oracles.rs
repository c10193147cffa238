//! Library results against independent reference computations.

mod common;

use decomp_lab::buildings::{all_partitions, suspension_model, tits_gl, tits_sp};
use decomp_lab::gflin::{enumerate_subspaces, SymplecticSpace};
use decomp_lab::homology::homology;
use decomp_lab::poset::SimplicialComplex;

fn betti_nonzero(k: &SimplicialComplex) -> std::collections::BTreeMap<i64, usize> {
    homology(k, true).unwrap().betti_numbers().into_iter().filter(|&(_, b)| b > 0).collect()
}

#[test]
fn oracle_self_checks() {
    assert_eq!(common::bell(4), 15);
    assert_eq!(common::gaussian_binomial(3, 1, 2), 7);
    assert_eq!(common::tits_gl_size(2, 3), 14);
    assert_eq!(common::tits_sp_size(2, 2), 30);
}

#[test]
fn subspace_counts_match_gaussian_binomials() {
    for (p, n) in [(2u32, 3usize), (2, 4), (3, 3), (5, 2)] {
        for j in 0..=n {
            let got = enumerate_subspaces(p, n, Some(j)).unwrap().len() as u64;
            assert_eq!(got, common::gaussian_binomial(n as u32, j as u32, p as u64), "p={p} n={n} j={j}");
        }
    }
}

#[test]
fn building_sizes_match_closed_forms() {
    for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 2), (5, 2)] {
        assert_eq!(tits_gl(p, k).unwrap().len() as u64, common::tits_gl_size(p as u64, k as u32));
    }
    for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)] {
        assert_eq!(tits_sp(p, k).unwrap().len() as u64, common::tits_sp_size(p as u64, k as u32));
    }
}

#[test]
fn coisotropy_by_brute_force_form_evaluation() {
    // W is coisotropic iff every vector orthogonal to all of W lies in W.
    for (p, k) in [(2, 1), (3, 1), (2, 2)] {
        let s = SymplecticSpace::new(p, k).unwrap();
        let all = enumerate_subspaces(p, 2 * k, None).unwrap();
        let vectors = enumerate_subspaces(p, 2 * k, Some(2 * k)).unwrap()[0].elements();
        let mut count = 0;
        for w in &all {
            let members = w.elements();
            let brute = vectors
                .iter()
                .filter(|v| members.iter().all(|m| s.form(v.coords(), m.coords()) == 0))
                .all(|v| w.contains_vector(v.coords()));
            assert_eq!(brute, s.is_coisotropic(w).unwrap(), "{w}");
            if brute && !w.is_full() {
                count += 1;
            }
        }
        assert_eq!(count, tits_sp(p, k).unwrap().len());
    }
}

#[test]
fn rational_betti_numbers_agree() {
    let mut complexes = Vec::new();
    for (p, k) in [(2, 2), (2, 3), (3, 2)] {
        complexes.push(tits_gl(p, k).unwrap().order_complex().unwrap());
    }
    for (p, k) in [(2, 1), (3, 1), (2, 2)] {
        complexes.push(tits_sp(p, k).unwrap().order_complex().unwrap());
    }
    for (p, k) in [(2, 2), (2, 3)] {
        complexes.push(suspension_model(p, k).unwrap().tdiamond().order_complex().unwrap());
    }
    for c in &complexes {
        assert_eq!(betti_nonzero(c), common::reduced_betti(c));
    }
}

#[test]
fn torsion_is_detected_where_rational_ranks_miss_it() {
    // Six-vertex projective plane: H̃_1 = Z/2, invisible over Q.
    let faces: Vec<Vec<usize>> = [[0, 1, 3], [0, 1, 5], [0, 2, 4], [0, 2, 5], [0, 3, 4], [1, 2, 3], [1, 2, 4], [1, 4, 5], [2, 3, 5], [3, 4, 5]]
        .iter()
        .map(|f| f.to_vec())
        .collect();
    let rp2 = SimplicialComplex::from_simplices(6, faces).unwrap();
    let h = homology(&rp2, true).unwrap();
    assert!(common::reduced_betti(&rp2).is_empty());
    assert!(!h.is_torsion_free());
    assert_eq!(h.summary(), "H̃_1 = Z/2");
}

#[test]
fn partition_counts_are_bell_numbers() {
    for n in 0..=8 {
        assert_eq!(all_partitions(n).len() as u64, common::bell(n), "n={n}");
    }
}
