//! The pattern modules for `Q`, `Q₂,₁` and `Q₂,₋₁`, derived from the solid-torus
//! modules and the link-complement bimodule and named after the printed tables.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use super::{cfa_solid_torus, cfdd_xlq, d_to_a, printed, DToAError, SolidTorus};
use crate::pairing::{box_tensor_a_dd, DEFAULT_PATH_CAP};
use crate::reduction::{isomorphic, isomorphic_up_to_basis, reduce, split_components};
use crate::structures::{AInftyModule, TypeDStructure};

/// Seed for the change-of-basis search used to name derived generators.
pub const BASIS_SEED: u64 = 7;

#[derive(Clone, Debug, Error)]
pub enum PatternError {
    #[error("pairing failed: {0}")]
    Pairing(String),
    #[error(transparent)]
    DToA(#[from] DToAError),
    #[error("derived {0} module does not match its reference table")]
    Mismatch(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Q,
    Q21,
    Q2m1,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Q, Pattern::Q21, Pattern::Q2m1];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Q => "Q",
            Pattern::Q21 => "Q21",
            Pattern::Q2m1 => "Q2m1",
        }
    }

    pub fn solid_torus(self) -> SolidTorus {
        match self {
            Pattern::Q => SolidTorus::Core,
            Pattern::Q21 => SolidTorus::Cable21,
            Pattern::Q2m1 => SolidTorus::Cable2m1,
        }
    }

    /// Winding number of the pattern in the solid torus.
    pub fn winding(self) -> i64 {
        match self {
            Pattern::Q => -1,
            Pattern::Q21 | Pattern::Q2m1 => -2,
        }
    }

    /// Table whose generator names the derived module takes.
    pub fn reference(self) -> TypeDStructure {
        match self {
            Pattern::Q => printed::cfd_v_q(),
            Pattern::Q21 => printed::cfd_v_q21(),
            Pattern::Q2m1 => cfd_v_q2m1_full(),
        }
    }
}

/// The printed `(2,−1)` summand with the extra ladder rung the tensor product has.
pub fn cfd_v_q2m1_full() -> TypeDStructure {
    TypeDStructure::parse(include_str!("cfd_v_q2m1_full.txt")).expect("embedded table parses")
}

#[derive(Clone, Debug)]
pub struct PatternModule {
    pub pattern: Pattern,
    /// Reduced tensor product before splitting, with tensor-product names.
    pub reduced: TypeDStructure,
    /// Principal summand, renamed after the reference table.
    pub cfd: TypeDStructure,
    pub cfa: AInftyModule,
}

/// Solid-torus module ⊠ bimodule, reduced with lexicographic cancellation.
pub fn reduced_tensor(kind: SolidTorus) -> Result<TypeDStructure, PatternError> {
    let t = box_tensor_a_dd(&cfa_solid_torus(kind), &cfdd_xlq(), DEFAULT_PATH_CAP)
        .map_err(|e| PatternError::Pairing(e.to_string()))?;
    Ok(t.with_arrows(reduce(&t.arrows)))
}

/// The largest connected summand; ties go to the earliest.
pub fn principal_component(m: &TypeDStructure) -> TypeDStructure {
    let comps = split_components(&m.arrows);
    let best = comps.iter().enumerate().max_by_key(|(i, c)| (c.len(), std::cmp::Reverse(*i))).map(|(_, c)| c.clone());
    m.with_arrows(best.unwrap_or_default())
}

/// Derives one pattern module from scratch, bypassing the cache.
pub fn derive_pattern(p: Pattern) -> Result<PatternModule, PatternError> {
    let reduced = reduced_tensor(p.solid_torus())?;
    // The Q table is the whole module; the cable tables are one summand.
    let principal = match p {
        Pattern::Q => reduced.clone(),
        _ => principal_component(&reduced),
    };
    let reference = p.reference();
    let names: HashMap<String, String> = match isomorphic(&principal.arrows, &reference.arrows) {
        Some(f) => (0..f.len())
            .map(|i| (principal.arrows.name(i).to_string(), reference.arrows.name(f[i]).to_string()))
            .collect(),
        None => isomorphic_up_to_basis(&principal, &reference, BASIS_SEED)
            .ok_or(PatternError::Mismatch(p.name()))?
            .matching
            .into_iter()
            .map(|(small, big)| (big, small))
            .collect(),
    };
    let arrows = principal.arrows.rename(|n| names[n].clone()).expect("renaming is a bijection");
    let cfd = principal.with_arrows(arrows);
    let cfa = d_to_a(&cfd)?;
    Ok(PatternModule { pattern: p, reduced, cfd, cfa })
}

static CACHE: OnceLock<[Result<PatternModule, PatternError>; 3]> = OnceLock::new();

/// All three pattern modules, computed once.
pub fn derive_pattern_modules() -> Result<[&'static PatternModule; 3], PatternError> {
    let all = CACHE.get_or_init(|| Pattern::ALL.map(derive_pattern));
    let get = |i: usize| all[i].as_ref().map_err(Clone::clone);
    Ok([get(0)?, get(1)?, get(2)?])
}

pub fn pattern_module(p: Pattern) -> Result<&'static PatternModule, PatternError> {
    let [q, q21, q2m1] = derive_pattern_modules()?;
    Ok(match p {
        Pattern::Q => q,
        Pattern::Q21 => q21,
        Pattern::Q2m1 => q2m1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::validate_type_d;
    use crate::torus_algebra::Idem;

    #[test]
    fn principal_summand_sizes() {
        let m = pattern_module(Pattern::Q).unwrap();
        assert_eq!(m.cfd.len(), 13);
        let mut iota0: Vec<&str> = m.cfd.gens_with(Idem::I0).into_iter().map(|i| m.cfd.arrows.name(i)).collect();
        iota0.sort_unstable();
        assert_eq!(iota0, ["x0", "x2", "x4", "y2", "y4"]);
        let m = pattern_module(Pattern::Q21).unwrap();
        assert_eq!(m.cfd.len(), 37);
        assert_eq!(m.cfd.gens_with(Idem::I0).len(), 17);
    }

    #[test]
    fn derived_modules_are_valid() {
        for m in derive_pattern_modules().unwrap() {
            assert!(validate_type_d(&m.cfd).is_valid());
            assert!(m.cfa.validate(12).is_valid(), "{:?}", m.pattern);
        }
    }

    #[test]
    fn isolated_summands_avoid_the_principal_one() {
        let m = pattern_module(Pattern::Q21).unwrap();
        let principal = principal_component(&m.reduced);
        for name in ["b.g3", "c.g3", "b.g28", "c.g28", "b.g9", "c.g9", "b.g20", "c.g20", "b.g32", "c.g32"] {
            assert!(m.reduced.arrows.find(name).is_some(), "{name}");
            assert!(principal.arrows.find(name).is_none(), "{name}");
        }
    }
}
