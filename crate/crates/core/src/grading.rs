//! Alexander gradings on paired complexes: constants `C_a` from the unknot
//! pairing, the satellite formula `A(a ⊗ x) = m·A_K(x) + C_a`, propagation
//! along arrows, and extraction of τ.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::cfk::{cfd_from_cfk, preset, xi_name, CFKData, CfkError};
use crate::pairing::{box_tensor_ad, PairingError};
use crate::reduction::{graded_homology, split_components, Homology, ReductionError};
use crate::structures::{AInftyModule, Arrows, GradedComplexFU, UPow};
use crate::torus_algebra::Idem;

#[derive(Debug, Error)]
pub enum GradingError {
    #[error("conflicting gradings for {name}: {a} and {b}")]
    Inconsistent { name: String, a: i64, b: i64 },
    #[error("no constant can be pinned: the unknot pairing has no free tower")]
    NoTower,
    #[error("homology has free rank {0}, expected 1")]
    FreeRank(usize),
    #[error("the free tower lies in a component with no pinned grading")]
    Unpinned,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Cfk(#[from] CfkError),
}

/// `C_a` for the `ι₀` generators whose grading the unknot pairing pins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingConstants {
    pub winding: i64,
    pub constants: BTreeMap<String, i64>,
}

/// Fills in gradings along arrows (`A(y) = A(x) + k` for `x → U^k y`) from
/// every graded generator, failing on a conflict.
pub fn propagate(c: &mut GradedComplexFU) -> Result<(), GradingError> {
    let a = &c.arrows;
    let n = a.len();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (x, y, UPow(k)) in a.arrows() {
        adj[x].push((y, i64::from(k)));
        adj[y].push((x, -i64::from(k)));
    }
    let mut g: Vec<Option<i64>> = (0..n).map(|i| c.grading(i)).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| g[i].is_some()).collect();
    while let Some(x) = queue.pop_front() {
        let gx = g[x].expect("queued generators are graded");
        for &(y, d) in &adj[x] {
            match g[y] {
                None => {
                    g[y] = Some(gx + d);
                    queue.push_back(y);
                }
                Some(gy) if gy != gx + d => {
                    return Err(GradingError::Inconsistent { name: a.name(y).to_string(), a: gy, b: gx + d });
                }
                _ => {}
            }
        }
    }
    for (i, v) in g.into_iter().enumerate() {
        c.arrows.set_label(i, v);
    }
    Ok(())
}

fn split_pair(name: &str) -> Option<(&str, &str)> {
    name.split_once('.')
}

/// Grades each component relative to its first generator.
fn relative(arrows: Arrows<Option<i64>, UPow>) -> Result<GradedComplexFU, GradingError> {
    let mut c = GradedComplexFU { arrows };
    if !c.is_empty() && c.grading(0).is_none() {
        c.arrows.set_label(0, Some(0));
    }
    propagate(&mut c)?;
    Ok(c)
}

/// Homology of a complex whose components are either fully graded or fully
/// ungraded. Ungraded components get a relative grading and must be torsion;
/// their torsion is reported with that relative grading.
pub fn satellite_homology(c: &GradedComplexFU) -> Result<Homology, GradingError> {
    let mut total = Homology::default();
    for comp in split_components(&c.arrows) {
        let pinned = !comp.is_empty() && comp.label(0).is_some();
        let h = graded_homology(&relative(comp)?)?;
        if !pinned && h.free_rank() > 0 {
            return Err(GradingError::Unpinned);
        }
        total.free.extend(h.free);
        total.torsion.extend(h.torsion);
    }
    total.free.sort_unstable();
    total.torsion.sort_unstable();
    Ok(total)
}

/// Pairs a pattern with the unknot complement and normalizes the free tower to
/// grading 0. `C_a` is then the grading of `a ⊗ ξ₀`.
pub fn pin_constants(pattern: &AInftyModule, winding: i64, cap: usize) -> Result<GradingConstants, GradingError> {
    let d = cfd_from_cfk(&preset("unknot")?)?;
    let c = box_tensor_ad(pattern, &d, cap)?;
    let mut tower: Option<GradedComplexFU> = None;
    for comp in split_components(&c.arrows) {
        let g = relative(comp)?;
        let h = graded_homology(&g)?;
        match h.free_rank() {
            0 => {}
            1 if tower.is_none() => {
                let shift = h.free[0];
                let mut g = g;
                for i in 0..g.len() {
                    g.arrows.set_label(i, g.grading(i).map(|v| v - shift));
                }
                tower = Some(g);
            }
            r => return Err(GradingError::FreeRank(r + usize::from(tower.is_some()))),
        }
    }
    let tower = tower.ok_or(GradingError::NoTower)?;
    let xi0 = xi_name(0);
    let constants = (0..tower.len())
        .filter_map(|i| {
            let (a, x) = split_pair(tower.arrows.name(i))?;
            (x == xi0 && pattern.find(a).is_some_and(|j| pattern.idem(j) == Idem::I0))
                .then(|| (a.to_string(), tower.grading(i).expect("graded")))
        })
        .collect();
    Ok(GradingConstants { winding, constants })
}

/// Sets `A(a ⊗ ξ_p) = m·A_K(ξ_p) + C_a` where `C_a` is known, then propagates.
/// Components without a pinned generator stay ungraded.
pub fn assign_gradings(
    c: &GradedComplexFU,
    k: &CFKData,
    consts: &GradingConstants,
) -> Result<GradedComplexFU, GradingError> {
    let mut out = c.clone();
    let xi: BTreeMap<String, i64> = (0..k.size()).map(|p| (xi_name(p), k.alexander[p])).collect();
    for i in 0..out.len() {
        let g = split_pair(out.arrows.name(i))
            .and_then(|(a, x)| Some(consts.winding * xi.get(x)? + consts.constants.get(a)?));
        out.arrows.set_label(i, g);
    }
    // Check the formula against itself across arrows before filling the rest.
    let seeded = out.clone();
    propagate(&mut out)?;
    for i in 0..seeded.len() {
        if let (Some(a), Some(b)) = (seeded.grading(i), out.grading(i)) {
            if a != b {
                return Err(GradingError::Inconsistent { name: out.arrows.name(i).to_string(), a, b });
            }
        }
    }
    Ok(out)
}

/// `τ = −A(free tower generator)`.
pub fn tau_of(h: &Homology) -> Result<i64, GradingError> {
    match h.free.as_slice() {
        [g] => Ok(-g),
        _ => Err(GradingError::FreeRank(h.free_rank())),
    }
}
