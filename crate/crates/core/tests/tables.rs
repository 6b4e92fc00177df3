//! The pattern tables against each other and against the pipeline.

use mazur_floer::cfk::{cfd_from_cfk, preset, PRESETS};
use mazur_floer::invariants::{satellite_complex, tau_satellite};
use mazur_floer::pairing::DEFAULT_PATH_CAP;
use mazur_floer::patterns::{d_to_a, pattern_module, printed, Pattern};
use mazur_floer::reduction::{isomorphic, reduce};
use mazur_floer::structures::{change_basis, GradedComplexFU, Substitution};
use mazur_floer::torus_algebra::Kind;

#[test]
fn diagram_basis_change_gives_the_q_table() {
    let subs = [
        Substitution::new("y2", "y2", &[(0, Kind::R123, "x5")]),
        Substitution::new("y4", "y4", &[(0, Kind::R123, "x6")]),
    ];
    let d = change_basis(&printed::cfd_v_q_diagram(), &subs).unwrap();
    assert_eq!(d, printed::cfd_v_q());
}

#[test]
fn derived_q_table_is_the_printed_one_by_name() {
    let m = pattern_module(Pattern::Q).unwrap();
    assert!(isomorphic(&m.cfd.arrows, &printed::cfd_v_q().arrows).is_some());
    let printed_a = printed::cfa_v_q();
    assert_eq!(m.cfa.expanded_table(3, 16), printed_a.expanded_table(3, 16));
}

#[test]
fn printed_and_derived_q21_give_the_same_taus() {
    // The printed table differs from the derived one by a change of basis.
    let a = d_to_a(&printed::cfd_v_q21()).unwrap();
    let consts = mazur_floer::invariants::constants(Pattern::Q21).unwrap();
    for name in PRESETS {
        let k = preset(name).unwrap();
        let d = cfd_from_cfk(&k).unwrap();
        let c = mazur_floer::pairing::box_tensor_ad(&a, &d, DEFAULT_PATH_CAP).unwrap();
        let c = mazur_floer::grading::assign_gradings(&c, &k, &consts).unwrap();
        let r = GradedComplexFU { arrows: reduce(&c.arrows) };
        let h = mazur_floer::grading::satellite_homology(&r).unwrap();
        let t = mazur_floer::grading::tau_of(&h).unwrap();
        assert_eq!(t, tau_satellite(&k, Pattern::Q21, DEFAULT_PATH_CAP).unwrap(), "{name}");
    }
}

#[test]
fn satellite_gradings_follow_the_rule() {
    for name in PRESETS {
        let k = preset(name).unwrap();
        for p in Pattern::ALL {
            let c = satellite_complex(&k, p, DEFAULT_PATH_CAP).unwrap();
            assert!(c.validate().is_valid(), "{name} {p:?}");
        }
    }
}

#[test]
fn path_cap_that_is_too_small_is_reported() {
    let k = preset("t2_7").unwrap();
    assert!(tau_satellite(&k, Pattern::Q, 1).is_err());
}
