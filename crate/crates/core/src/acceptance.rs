//! The verification suite: nine criteria, each a list of named sub-checks.
//!
//! A few sub-checks compare against printed data that the computation does
//! not reproduce. They are reported as failures, and [`KNOWN_DEVIATIONS`]
//! records why each one fails.

use std::collections::BTreeMap;

use crate::cfk::{cfd_from_cfk, check_coefficient_identities, preset, CFKData, PRESETS};
use crate::cli;
use crate::grading::{pin_constants, satellite_homology};
use crate::invariants::{
    check_consistency, constants, epsilon_q_formula, hom_cable_tau, satellite_complex, tau_q_formula, tau_q_iterate,
    tau_q_recursive,
};
use crate::pairing::{box_tensor_ad, pair_name, DEFAULT_PATH_CAP};
use crate::patterns::{
    cfa_solid_torus, cfd_v_q2m1_full, cfdd_xlq, d_to_a, derive_pattern, pattern_module, printed, reduced_tensor,
    Pattern, SolidTorus, BASIS_SEED,
};
use crate::reduction::{component_of, isomorphic, isomorphic_up_to_basis, reduce, split_components};
use crate::structures::{render_word, validate_dd, validate_type_d, AInftyModule, GradedComplexFU, TypeDStructure};

/// Star expansions and word length used when comparing operation tables.
const TABLE_STARS: usize = 3;
const TABLE_LEN: usize = 16;
/// Longest word on which the A∞ relations are checked.
const RELATION_LEN: usize = 12;

/// Sub-checks that fail against printed data, with the reason.
pub const KNOWN_DEVIATIONS: [(&str, &str); 4] = [
    (
        "d_to_a of the printed Q21 D table equals the printed Q21 A table",
        "the printed A table omits three operations (x3 -> U q1 on r23 r2 r1, y3 -> q5 on r2 r12 r1, \
         y4 -> q5 on r12 r12 r1); without them it violates the A-infinity relations, with them it satisfies them",
    ),
    (
        "reduced (2,-1) tensor product has a component isomorphic to the printed Q2-1 table",
        "the principal summand has 39 generators: the printed figure omits the ladder rung \
         r9 -> r10 -> r8 (and s9 -> s10 -> s8); with that rung added the two agree up to change of basis",
    ),
    (
        "tau(Q(trefoil_lh)_2,-1) = 1",
        "the chain level gives -1, which is 2 tau(Q(K)) - 1 as the (2,-1) cable formula requires for \
         tau(Q(K)) = 0 and epsilon(Q(K)) = 1; the claimed value 1 has the wrong sign",
    ),
    (
        "tau(Q(synthetic_tau0_eps1)_2,-1) = 1",
        "same as for trefoil_lh: tau(Q(K)) = 0 and epsilon(Q(K)) = 1 force 2 tau(Q(K)) - 1 = -1",
    ),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubCheck {
    pub name: String,
    pub pass: bool,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<SubCheck>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SubCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One line: `criterion N: PASS|FAIL  title`.
    pub fn summary(&self) -> String {
        format!("criterion {}: {}  {}", self.id, if self.pass() { "PASS" } else { "FAIL" }, self.title)
    }
}

fn sub(name: impl Into<String>, pass: bool, detail: Vec<String>) -> SubCheck {
    SubCheck { name: name.into(), pass, detail }
}

fn err<E: std::fmt::Display>(name: impl Into<String>, e: E) -> SubCheck {
    sub(name, false, vec![format!("error: {e}")])
}

/// Why a failing sub-check fails, if it is a recorded deviation.
pub fn known_deviation(name: &str) -> Option<&'static str> {
    KNOWN_DEVIATIONS.iter().find(|(n, _)| *n == name).map(|(_, why)| *why)
}

pub fn criterion(id: u8) -> Criterion {
    match id {
        1 => criterion1(),
        2 => criterion2(),
        3 => criterion3(),
        4 => criterion4(),
        5 => criterion5(),
        6 => criterion6(),
        7 => criterion7(),
        8 => criterion8(),
        9 => criterion9(),
        _ => panic!("no criterion {id}"),
    }
}

pub fn run_all() -> Vec<Criterion> {
    (1..=9).map(criterion).collect()
}

/// Summary lines, then every sub-check with its detail.
pub fn render(criteria: &[Criterion]) -> String {
    let mut out = String::new();
    for c in criteria {
        out.push_str(&c.summary());
        out.push('\n');
    }
    for c in criteria {
        out.push_str(&format!("\n[{}] {}\n", c.id, c.title));
        for s in &c.checks {
            out.push_str(&format!("  {} {}\n", if s.pass { "ok  " } else { "FAIL" }, s.name));
            for d in &s.detail {
                out.push_str(&format!("         {d}\n"));
            }
            if !s.pass {
                if let Some(why) = known_deviation(&s.name) {
                    out.push_str(&format!("         known deviation: {why}\n"));
                }
            }
        }
    }
    out
}

fn criterion1() -> Criterion {
    let b = cfdd_xlq();
    let rep = validate_dd(&b);
    Criterion {
        id: 1,
        title: "link-complement DD bimodule satisfies two-sided d^2 = 0",
        checks: vec![
            sub("34 generators", b.len() == 34, vec![format!("{} generators", b.len())]),
            sub("validate_dd", rep.is_valid(), rep.issues),
        ],
    }
}

fn u_arrows(m: &TypeDStructure) -> usize {
    m.arrows.arrows().filter(|(_, _, c)| c.u > 0).count()
}

fn criterion2() -> Criterion {
    let title = "core (x) DD bimodule reduces to the printed 13-generator Q table";
    let reduced = match reduced_tensor(SolidTorus::Core) {
        Ok(r) => r,
        Err(e) => return Criterion { id: 2, title, checks: vec![err("reduction", e)] },
    };
    let table = printed::cfd_v_q();
    let iso = isomorphic(&reduced.arrows, &table.arrows);
    let detail = vec![format!(
        "{} generators, {} arrows, {} U-weighted; table: {} generators, {} arrows, {} U-weighted",
        reduced.len(),
        reduced.arrows.arrow_count(),
        u_arrows(&reduced),
        table.len(),
        table.arrows.arrow_count(),
        u_arrows(&table)
    )];
    Criterion {
        id: 2,
        title,
        checks: vec![
            sub("13 generators and 8 U-weighted arrows", reduced.len() == 13 && u_arrows(&reduced) == 8, detail),
            sub("exact isomorphism with the printed table", iso.is_some(), vec![]),
        ],
    }
}

type Table = std::collections::BTreeSet<(String, Vec<crate::torus_algebra::Kind>, u32, String)>;

fn table(m: &AInftyModule) -> Table {
    m.expanded_table(TABLE_STARS, TABLE_LEN)
}

fn render_ops<'a>(
    ops: impl Iterator<Item = &'a (String, Vec<crate::torus_algebra::Kind>, u32, String)>,
) -> Vec<String> {
    ops.map(|(x, w, u, y)| {
        let u = if *u == 0 { String::new() } else { format!("U^{u} ") };
        format!("m({x}, {}) = {u}{y}", render_word(w))
    })
    .collect()
}

fn compare_tables(name: &str, derived: &AInftyModule, expected: &AInftyModule) -> SubCheck {
    let (d, e) = (table(derived), table(expected));
    let mut detail = Vec::new();
    let extra: Vec<_> = d.difference(&e).collect();
    let missing: Vec<_> = e.difference(&d).collect();
    if !extra.is_empty() {
        detail.push(format!("{} operations only in the derived table:", extra.len()));
        detail.extend(render_ops(extra.iter().copied()).into_iter().map(|s| format!("  {s}")));
    }
    if !missing.is_empty() {
        detail.push(format!("{} operations only in the printed table:", missing.len()));
        detail.extend(render_ops(missing.iter().copied()).into_iter().map(|s| format!("  {s}")));
    }
    let (vd, ve) = (derived.validate(RELATION_LEN), expected.validate(RELATION_LEN));
    detail.push(format!(
        "A-infinity relations: derived {}, printed {}",
        if vd.is_valid() { "hold".to_string() } else { format!("fail ({} issues)", vd.issues.len()) },
        if ve.is_valid() { "hold".to_string() } else { format!("fail ({} issues)", ve.issues.len()) },
    ));
    sub(name, extra.is_empty() && missing.is_empty(), detail)
}

/// An unknot-pairing complex over `a ⊗ ξ₀`, from `(source, U power, target)`.
fn xi0_complex(arrows: &[(&str, u32, &str)]) -> GradedComplexFU {
    let mut c = GradedComplexFU::new();
    let xi0 = crate::cfk::xi_name(0);
    for &(s, _, t) in arrows {
        for g in [s, t] {
            let n = pair_name(g, &xi0);
            if c.arrows.find(&n).is_none() {
                c.add_gen(&n, None).expect("fresh name");
            }
        }
    }
    for &(s, u, t) in arrows {
        c.add_arrow(&pair_name(s, &xi0), u, &pair_name(t, &xi0)).expect("known names");
    }
    c
}

fn unknot_complex(p: Pattern) -> GradedComplexFU {
    let base = [("x2", 0, "x0"), ("x4", 0, "y2")];
    let mut a = base.to_vec();
    match p {
        Pattern::Q => a.extend([("x2", 1, "y2"), ("x4", 1, "y4")]),
        Pattern::Q21 => a.extend([
            ("x2", 2, "y2"),
            ("x4", 2, "y4"),
            ("x4", 1, "r6"),
            ("r6", 1, "s6"),
            ("y4", 0, "s6"),
            ("r9", 0, "r6"),
            ("r9", 1, "s9"),
            ("s9", 0, "s6"),
        ]),
        Pattern::Q2m1 => {
            a.extend([("x2", 2, "y2"), ("x4", 2, "y4"), ("x4", 1, "r6"), ("r6", 1, "s6"), ("y4", 0, "s6")])
        }
    }
    xi0_complex(&a)
}

/// Does the unknot pairing of `m` contain the expected complex as a component?
fn unknot_pairing_check(name: &str, m: &AInftyModule, p: Pattern) -> SubCheck {
    let unknot = match preset("unknot").and_then(|k| cfd_from_cfk(&k)) {
        Ok(d) => d,
        Err(e) => return err(name, e),
    };
    let c = match box_tensor_ad(m, &unknot, DEFAULT_PATH_CAP) {
        Ok(c) => c,
        Err(e) => return err(name, e),
    };
    let expected = unknot_complex(p);
    let start = pair_name("x2", &crate::cfk::xi_name(0));
    let found = component_of(&c.arrows, &start);
    let ok = found.as_ref().is_some_and(|comp| isomorphic(comp, &expected.arrows).is_some());
    let detail = vec![format!(
        "pairing has {} generators; component of {start} has {}, expected {}",
        c.len(),
        found.map_or(0, |f| f.len()),
        expected.len()
    )];
    sub(name, ok, detail)
}

fn criterion3() -> Criterion {
    let title = "d_to_a reproduces the printed A tables";
    let mut checks = Vec::new();
    match d_to_a(&printed::cfd_v_q()) {
        Ok(a) => checks.push(compare_tables(
            "d_to_a of the printed Q D table equals the printed Q A table",
            &a,
            &printed::cfa_v_q(),
        )),
        Err(e) => checks.push(err("d_to_a of the printed Q D table", e)),
    }
    match d_to_a(&printed::cfd_v_q21()) {
        Ok(a) => checks.push(compare_tables(
            "d_to_a of the printed Q21 D table equals the printed Q21 A table",
            &a,
            &printed::cfa_v_q21(),
        )),
        Err(e) => checks.push(err("d_to_a of the printed Q21 D table", e)),
    }
    match pattern_module(Pattern::Q2m1) {
        Ok(m) => checks.push(unknot_pairing_check(
            "derived Q2-1 A module paired with the unknot gives the printed complex",
            &m.cfa,
            Pattern::Q2m1,
        )),
        Err(e) => checks.push(err("derived Q2-1 A module", e)),
    }
    for p in Pattern::ALL {
        let name = format!("derived {} A module is strictly unital and satisfies the relations", p.name());
        match pattern_module(p) {
            Ok(m) => {
                let rep = m.cfa.validate(RELATION_LEN);
                checks.push(sub(name, rep.is_valid(), rep.issues));
            }
            Err(e) => checks.push(err(name, e)),
        }
    }
    Criterion { id: 3, title, checks }
}

/// Component sizes, and the first component that matches `table` up to change of basis.
fn find_component(reduced: &TypeDStructure, table: &TypeDStructure) -> (Vec<usize>, Option<(usize, bool)>) {
    let comps = split_components(&reduced.arrows);
    let sizes = comps.iter().map(|c| c.len()).collect();
    let hit = comps.iter().filter(|c| c.len() == table.len()).find_map(|c| {
        if isomorphic(c, &table.arrows).is_some() {
            return Some((c.len(), true));
        }
        let d = reduced.with_arrows(c.clone());
        isomorphic_up_to_basis(&d, table, BASIS_SEED).map(|_| (c.len(), false))
    });
    (sizes, hit)
}

fn component_check(name: &str, reduced: &TypeDStructure, table: &TypeDStructure) -> SubCheck {
    let (sizes, hit) = find_component(reduced, table);
    let mut detail = vec![format!("component sizes {sizes:?}; table has {} generators", table.len())];
    match hit {
        Some((n, true)) => detail.push(format!("{n}-generator component matches by relabeling")),
        Some((n, false)) => detail.push(format!("{n}-generator component matches after a change of basis")),
        None => detail.push("no component matches".into()),
    }
    sub(name, hit.is_some(), detail)
}

fn criterion4() -> Criterion {
    let title = "cable tensor products contain the printed cable tables";
    let mut checks = Vec::new();
    match reduced_tensor(SolidTorus::Cable21) {
        Ok(r) => checks.push(component_check(
            "reduced (2,1) tensor product has a component isomorphic to the printed Q21 table",
            &r,
            &printed::cfd_v_q21(),
        )),
        Err(e) => checks.push(err("(2,1) tensor product", e)),
    }
    match reduced_tensor(SolidTorus::Cable2m1) {
        Ok(r) => {
            checks.push(component_check(
                "reduced (2,-1) tensor product has a component isomorphic to the printed Q2-1 table",
                &r,
                &printed::cfd_v_q2m1(),
            ));
            checks.push(component_check(
                "reduced (2,-1) tensor product has a component isomorphic to the Q2-1 table with the r10/s10 rung",
                &r,
                &cfd_v_q2m1_full(),
            ));
        }
        Err(e) => checks.push(err("(2,-1) tensor product", e)),
    }
    Criterion { id: 4, title, checks }
}

fn named(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
    pairs.iter().map(|&(n, v)| (n.to_string(), v)).collect()
}

fn expected_constants(p: Pattern) -> BTreeMap<String, i64> {
    match p {
        Pattern::Q => named(&[("x0", -2), ("x2", -2), ("x4", -1), ("y2", -1), ("y4", 0)]),
        Pattern::Q21 => named(&[
            ("r6", -1),
            ("r9", -1),
            ("s6", 0),
            ("s9", 0),
            ("x0", -4),
            ("x2", -4),
            ("x4", -2),
            ("y2", -2),
            ("y4", 0),
        ]),
        Pattern::Q2m1 => named(&[("r6", 0), ("s6", 1), ("x0", -3), ("x2", -3), ("x4", -1), ("y2", -1), ("y4", 1)]),
    }
}

fn criterion5() -> Criterion {
    let title = "unknot pairings give F[U], the grading constants and tau = 0";
    let mut checks = Vec::new();
    let unknot = preset("unknot").expect("preset exists");
    for p in Pattern::ALL {
        let name = format!("{}: homology of the unknot pairing is F[U] in grading 0", p.name());
        let h = satellite_complex(&unknot, p, DEFAULT_PATH_CAP)
            .map(|c| GradedComplexFU { arrows: reduce(&c.arrows) })
            .map_err(|e| e.to_string())
            .and_then(|r| satellite_homology(&r).map_err(|e| e.to_string()));
        match h {
            Ok(h) => checks.push(sub(
                name,
                h.free == [0] && h.torsion.is_empty(),
                vec![format!("free {:?}, torsion {:?}; tau = {}", h.free, h.torsion, h.free.first().map_or(0, |g| -g))],
            )),
            Err(e) => checks.push(err(name, e)),
        }
        let name = format!("{}: grading constants", p.name());
        match constants(p) {
            Ok(c) => {
                let want = expected_constants(p);
                checks.push(sub(name, c.constants == want, vec![format!("{:?}", c.constants)]));
            }
            Err(e) => checks.push(err(name, e)),
        }
    }
    // Independent route for the (2,1) constants: the printed D table through d_to_a.
    let name = "Q21: constants recomputed from the printed D table agree";
    match d_to_a(&printed::cfd_v_q21()) {
        Ok(a) => match pin_constants(&a, Pattern::Q21.winding(), DEFAULT_PATH_CAP) {
            Ok(c) => checks.push(sub(
                name,
                c.constants == expected_constants(Pattern::Q21),
                vec![format!("{:?}", c.constants)],
            )),
            Err(e) => checks.push(err(name, e)),
        },
        Err(e) => checks.push(err(name, e)),
    }
    for p in [Pattern::Q, Pattern::Q21] {
        let name = format!("derived {} A module paired with the unknot gives the printed complex", p.name());
        match pattern_module(p) {
            Ok(m) => checks.push(unknot_pairing_check(&name, &m.cfa, p)),
            Err(e) => checks.push(err(name, e)),
        }
    }
    Criterion { id: 5, title, checks }
}

fn presets() -> Vec<(&'static str, CFKData)> {
    PRESETS.iter().map(|&n| (n, preset(n).expect("preset exists"))).collect()
}

fn criterion6() -> Criterion {
    let title = "chain-level tau and epsilon of Q(K) on the presets";
    let mut checks = Vec::new();
    for (name, k) in presets() {
        let r = match check_consistency(&k, DEFAULT_PATH_CAP, false) {
            Ok(r) => r,
            Err(e) => {
                checks.push(err(format!("{name}: pipeline"), e));
                continue;
            }
        };
        let (tq, eq) = (tau_q_formula(k.tau, k.epsilon), epsilon_q_formula(k.tau, k.epsilon));
        let pair = |a: i64, b: i64| vec![format!("chain {a}, expected {b}")];
        checks.push(sub(format!("tau(Q({name})) = {tq}"), r.tau_q == tq, pair(r.tau_q, tq)));
        checks.push(sub(format!("epsilon(Q({name})) = {eq}"), r.epsilon_q == eq, pair(r.epsilon_q, eq)));
        checks.push(sub(
            format!("tau(Q({name})_2,1) = 2 tau(Q({name}))"),
            r.tau_q21 == 2 * r.tau_q,
            pair(r.tau_q21, 2 * r.tau_q),
        ));
        if name == "trefoil_lh" || name == "synthetic_tau0_eps1" {
            checks.push(sub(format!("tau(Q({name})_2,-1) = 1"), r.tau_q2m1 == 1, pair(r.tau_q2m1, 1)));
        }
    }
    Criterion { id: 6, title, checks }
}

fn criterion7() -> Criterion {
    let title = "formula suite";
    let mut grid_bad = Vec::new();
    let mut excl_bad = Vec::new();
    for tau in -5..=5 {
        for eps in -1..=1 {
            if eps == 0 && tau != 0 {
                continue;
            }
            for n in 1..=10 {
                let t = tau_q_iterate(tau, eps, n);
                if t != tau_q_recursive(tau, eps, n) {
                    grid_bad.push(format!("({tau}, {eps}, {n})"));
                }
                if n >= 2 && (1..i64::from(n)).contains(&t) {
                    excl_bad.push(format!("({tau}, {eps}, {n}) -> {t}"));
                }
            }
        }
    }
    let mut checks = vec![
        sub("closed form equals n-fold recursion on the grid", grid_bad.is_empty(), grid_bad),
        sub("tau(Q^n(K)) avoids 1..n-1 on the grid", excl_bad.is_empty(), excl_bad),
    ];
    for (name, k) in presets() {
        let cname = format!("{name}: cable formulas match the chain-level cable taus");
        match check_consistency(&k, DEFAULT_PATH_CAP, false) {
            Ok(r) => {
                let (tq, eq) = (r.tau_q, r.epsilon_q);
                let (p, m) = (hom_cable_tau(tq, eq, 1), hom_cable_tau(tq, eq, -1));
                checks.push(sub(
                    cname,
                    p == r.tau_q21 && m == r.tau_q2m1,
                    vec![format!("(2,1): chain {} formula {p}; (2,-1): chain {} formula {m}", r.tau_q21, r.tau_q2m1)],
                ));
            }
            Err(e) => checks.push(err(cname, e)),
        }
    }
    Criterion { id: 7, title, checks }
}

fn criterion8() -> Criterion {
    let title = "structural invariants on every constructed object";
    let mut checks = Vec::new();
    let mut d_structs: Vec<(String, TypeDStructure)> = vec![
        ("printed Q".into(), printed::cfd_v_q()),
        ("printed Q diagram basis".into(), printed::cfd_v_q_diagram()),
        ("printed Q21".into(), printed::cfd_v_q21()),
        ("printed Q2-1".into(), printed::cfd_v_q2m1()),
        ("Q2-1 with rung".into(), cfd_v_q2m1_full()),
    ];
    for p in Pattern::ALL {
        if let Ok(m) = pattern_module(p) {
            d_structs.push((format!("reduced {} tensor product", p.name()), m.reduced.clone()));
            d_structs.push((format!("derived {}", p.name()), m.cfd.clone()));
        }
    }
    let mut bad = Vec::new();
    for (name, d) in &d_structs {
        bad.extend(validate_type_d(d).issues.into_iter().map(|i| format!("{name}: {i}")));
    }
    bad.extend(validate_dd(&cfdd_xlq()).issues);
    checks.push(sub(
        format!("delta^2 = 0 on {} type D structures and the bimodule", d_structs.len()),
        bad.is_empty(),
        bad,
    ));

    let mut bad = Vec::new();
    for (name, kind) in [("core", SolidTorus::Core), ("(2,1)", SolidTorus::Cable21), ("(2,-1)", SolidTorus::Cable2m1)] {
        bad.extend(cfa_solid_torus(kind).validate(RELATION_LEN).issues.into_iter().map(|i| format!("{name}: {i}")));
    }
    bad.extend(printed::cfa_v_q().validate(RELATION_LEN).issues.into_iter().map(|i| format!("printed Q: {i}")));
    checks.push(sub("A-infinity relations on the solid-torus modules and the printed Q table", bad.is_empty(), bad));

    let mut identity_bad = Vec::new();
    let mut complex_bad = Vec::new();
    let mut rank_bad = Vec::new();
    for (name, k) in presets() {
        match cfd_from_cfk(&k) {
            Ok(d) => {
                identity_bad
                    .extend(check_coefficient_identities(&k, &d).issues.into_iter().map(|i| format!("{name}: {i}")));
                identity_bad.extend(validate_type_d(&d).issues.into_iter().map(|i| format!("{name}: {i}")));
            }
            Err(e) => identity_bad.push(format!("{name}: {e}")),
        }
        for p in Pattern::ALL {
            match satellite_complex(&k, p, DEFAULT_PATH_CAP) {
                Ok(c) => {
                    complex_bad.extend(c.validate().issues.into_iter().map(|i| format!("{name}, {}: {i}", p.name())));
                    let r = GradedComplexFU { arrows: reduce(&c.arrows) };
                    complex_bad.extend(r.validate().issues.into_iter().map(|i| format!("{name}, {}: {i}", p.name())));
                    match satellite_homology(&r) {
                        Ok(h) if h.free_rank() == 1 => {}
                        Ok(h) => rank_bad.push(format!("{name}, {}: free rank {}", p.name(), h.free_rank())),
                        Err(e) => rank_bad.push(format!("{name}, {}: {e}", p.name())),
                    }
                }
                Err(e) => complex_bad.push(format!("{name}, {}: {e}", p.name())),
            }
        }
    }
    checks.push(sub(
        "knot-complement D structures are valid and satisfy both coefficient-map identities",
        identity_bad.is_empty(),
        identity_bad,
    ));
    checks.push(sub(
        "satellite complexes have d^2 = 0 and A(x) = A(y) - k on every graded arrow",
        complex_bad.is_empty(),
        complex_bad,
    ));
    checks.push(sub("every satellite homology has free rank 1", rank_bad.is_empty(), rank_bad));
    Criterion { id: 8, title, checks }
}

/// Everything whose bytes must not depend on scheduling: criteria 1 to 8,
/// the invariants table for every preset, and fresh pattern derivations.
fn snapshot() -> String {
    let mut out = render(&(1..=8).map(criterion).collect::<Vec<_>>());
    let knots: Vec<String> = PRESETS.iter().map(|s| s.to_string()).collect();
    for json in [false, true] {
        let o = cli::Options { json, formulas: true, cap: DEFAULT_PATH_CAP };
        let r = cli::cmd_invariants(&knots, &o);
        out.push_str(&format!("{}\n{}{}", r.code, r.stdout, r.stderr));
    }
    for p in Pattern::ALL {
        match derive_pattern(p) {
            Ok(m) => {
                out.push_str(&m.reduced.dump());
                out.push_str(&m.cfd.dump());
                out.push_str(&m.cfa.dump());
            }
            Err(e) => out.push_str(&format!("{e}\n")),
        }
    }
    out
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
    Ok(pool.install(f))
}

fn criterion9() -> Criterion {
    let title = "output is byte-identical across runs and thread counts";
    let runs: Vec<(String, Result<String, String>)> = vec![
        ("1 thread".into(), in_pool(1, snapshot)),
        ("4 threads".into(), in_pool(4, snapshot)),
        ("4 threads again".into(), in_pool(4, snapshot)),
    ];
    let mut checks = Vec::new();
    let base = &runs[0].1;
    for (name, r) in &runs[1..] {
        let same = base.is_ok() && r == base;
        let detail = match (base, r) {
            (Ok(a), Ok(b)) => vec![format!("{} and {} bytes", a.len(), b.len())],
            (Err(e), _) | (_, Err(e)) => vec![format!("error: {e}")],
        };
        checks.push(sub(format!("1 thread and {name} agree"), same, detail));
    }
    Criterion { id: 9, title, checks }
}
