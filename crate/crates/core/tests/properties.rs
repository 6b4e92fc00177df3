//! Property tests: text round trips, basis changes, reduction and gradings.

use proptest::prelude::*;

use mazur_floer::grading::propagate;
use mazur_floer::patterns::printed;
use mazur_floer::reduction::{graded_homology, reduce, split_components, Homology};
use mazur_floer::structures::{change_basis, validate_type_d, GradedComplexFU, Substitution, TypeDStructure};
use mazur_floer::torus_algebra::{Idem, Kind, Side};

fn type_d() -> impl Strategy<Value = TypeDStructure> {
    let gens = prop::collection::vec(any::<bool>(), 1..8);
    (gens, prop::collection::vec((0usize..64, 0usize..64, 0usize..Kind::ALL.len(), 0u32..4), 0..20)).prop_map(
        |(idems, arrows)| {
            let mut d = TypeDStructure::new(Side::Sigma, true);
            for (i, &b) in idems.iter().enumerate() {
                d.add_gen(&format!("g{i}"), if b { Idem::I1 } else { Idem::I0 }).unwrap();
            }
            let n = idems.len();
            for (s, t, k, u) in arrows {
                let (s, t, k) = (s % n, t % n, Kind::ALL[k]);
                if k.is_zero() || k.source() != Some(d.idem(s)) || k.target() != Some(d.idem(t)) {
                    continue;
                }
                let u = if k.is_idempotent() { u.max(1) } else { u };
                d.add_arrow(&format!("g{s}"), u, k, &format!("g{t}")).unwrap();
            }
            d
        },
    )
}

/// A graded complex over F₂[U] with known homology: a direct sum of single
/// generators and pairs `x → U^k y`, conjugated by homogeneous elementary
/// basis changes `e_i ↦ e_i + U^m e_j`.
#[derive(Clone, Debug)]
struct Known {
    complex: GradedComplexFU,
    homology: Homology,
}

fn known_complex() -> impl Strategy<Value = Known> {
    let pieces = prop::collection::vec((any::<bool>(), -3i64..4, 0u32..3), 1..7);
    let ops = prop::collection::vec((0usize..64, 0usize..64), 0..30);
    (pieces, ops).prop_map(|(pieces, ops)| {
        let mut grading = Vec::new();
        let mut homology = Homology::default();
        let mut edges = Vec::new();
        for (pair, a, k) in pieces {
            if pair {
                edges.push((grading.len(), grading.len() + 1));
                grading.extend([a, a + i64::from(k)]);
                if k > 0 {
                    homology.torsion.push((a + i64::from(k), k));
                }
            } else {
                grading.push(a);
                homology.free.push(a);
            }
        }
        let n = grading.len();
        let mut d = vec![vec![false; n]; n];
        for (x, y) in edges {
            d[x][y] = true;
        }
        for (i, j) in ops {
            let (i, j) = (i % n, j % n);
            if i == j || grading[j] < grading[i] {
                continue;
            }
            // P = I + E_ij is its own inverse; d' = P d P.
            let ri = d[j].clone();
            d[i].iter_mut().zip(&ri).for_each(|(a, b)| *a ^= b);
            // Old e_i is e_i' + U^m e_j' in the new basis.
            for row in d.iter_mut() {
                if row[i] {
                    row[j] = !row[j];
                }
            }
        }
        let mut c = GradedComplexFU::new();
        for (i, &g) in grading.iter().enumerate() {
            c.add_gen(&format!("e{i}"), Some(g)).unwrap();
        }
        for x in 0..n {
            for y in 0..n {
                if d[x][y] {
                    let u = u32::try_from(grading[y] - grading[x]).expect("homogeneous");
                    c.add_arrow(&format!("e{x}"), u, &format!("e{y}")).unwrap();
                }
            }
        }
        homology.free.sort_unstable();
        homology.torsion.sort_unstable();
        Known { complex: c, homology }
    })
}

proptest! {
    #[test]
    fn type_d_text_and_json_round_trip(d in type_d()) {
        prop_assert_eq!(TypeDStructure::parse(&d.dump()).unwrap(), d.clone());
        prop_assert_eq!(TypeDStructure::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn complex_round_trip(k in known_complex()) {
        prop_assert_eq!(GradedComplexFU::parse(&k.complex.dump()).unwrap(), k.complex.clone());
    }

    #[test]
    fn constructed_complexes_are_valid(k in known_complex()) {
        prop_assert!(k.complex.validate().is_valid());
    }

    #[test]
    fn homology_is_a_basis_invariant(k in known_complex()) {
        prop_assert_eq!(graded_homology(&k.complex).unwrap(), k.homology);
    }

    #[test]
    fn reduction_preserves_homology(k in known_complex()) {
        let r = GradedComplexFU { arrows: reduce(&k.complex.arrows) };
        prop_assert!(r.validate().is_valid());
        prop_assert_eq!(graded_homology(&r).unwrap(), k.homology);
        prop_assert!(r.arrows.arrows().all(|(_, _, u)| u.0 > 0));
    }

    #[test]
    fn propagation_recovers_gradings(k in known_complex()) {
        let mut c = k.complex.clone();
        for comp in split_components(&c.arrows) {
            for i in 1..comp.len() {
                let j = c.arrows.find(comp.name(i)).unwrap();
                c.arrows.set_label(j, None);
            }
        }
        propagate(&mut c).unwrap();
        prop_assert_eq!(&c, &k.complex);
        let again = c.clone();
        propagate(&mut c).unwrap();
        prop_assert_eq!(c, again);
    }

    #[test]
    fn basis_change_is_invertible(picks in prop::collection::vec((0usize..64, 0usize..64, 0usize..Kind::ALL.len(), 0u32..3), 1..6)) {
        // Substituted generators never appear as terms, so H² = 0 and the
        // substitution is its own inverse.
        let d = printed::cfd_v_q21();
        let n = d.len();
        let mut olds = Vec::new();
        let mut subs: Vec<Substitution> = Vec::new();
        for (g, t, k, u) in picks {
            let (g, t, k) = (g % n, t % n, Kind::ALL[k]);
            if g == t || k.is_zero() || k.source() != Some(d.idem(g)) || k.target() != Some(d.idem(t)) {
                continue;
            }
            if olds.contains(&t) || subs.iter().any(|s| s.terms.iter().any(|(_, _, o)| o == d.arrows.name(g))) {
                continue;
            }
            let u = if k.is_idempotent() { u.max(1) } else { u };
            match subs.iter_mut().find(|s| s.old == d.arrows.name(g)) {
                Some(s) => s.terms.push((u, k, d.arrows.name(t).to_string())),
                None => {
                    olds.push(g);
                    subs.push(Substitution::new(d.arrows.name(g), d.arrows.name(g), &[(u, k, d.arrows.name(t))]));
                }
            }
        }
        let fwd = change_basis(&d, &subs).unwrap();
        prop_assert!(validate_type_d(&fwd).is_valid());
        prop_assert_eq!(change_basis(&fwd, &subs).unwrap(), d);
    }
}
