//! Pattern data: the DD bimodule of the link complement, the solid-torus
//! modules, the printed pattern tables, and the derived pattern modules.

mod d_to_a;
mod derive;

use crate::structures::{AInftyModule, DDBimodule, TypeDStructure};

pub use d_to_a::{d_to_a, translate, DToAError};
pub use derive::{
    cfd_v_q2m1_full, derive_pattern, derive_pattern_modules, pattern_module, principal_component, reduced_tensor,
    Pattern, PatternError, PatternModule, BASIS_SEED,
};

pub fn cfdd_xlq() -> DDBimodule {
    DDBimodule::parse(include_str!("cfdd_xlq.txt")).expect("embedded table parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolidTorus {
    Core,
    Cable21,
    Cable2m1,
}

pub fn cfa_solid_torus(kind: SolidTorus) -> AInftyModule {
    let text = match kind {
        SolidTorus::Core => include_str!("cfa_core.txt"),
        SolidTorus::Cable21 => include_str!("cfa_c21.txt"),
        SolidTorus::Cable2m1 => include_str!("cfa_c2m1.txt"),
    };
    AInftyModule::parse(text).expect("embedded table parses")
}

pub mod printed {
    use super::*;
    pub fn cfd_v_q() -> TypeDStructure {
        TypeDStructure::parse(include_str!("cfd_v_q.txt")).expect("embedded table parses")
    }
    pub fn cfd_v_q_diagram() -> TypeDStructure {
        TypeDStructure::parse(include_str!("cfd_v_q_diagram.txt")).expect("embedded table parses")
    }
    pub fn cfa_v_q() -> AInftyModule {
        AInftyModule::parse(include_str!("cfa_v_q.txt")).expect("embedded table parses")
    }
    pub fn cfd_v_q21() -> TypeDStructure {
        TypeDStructure::parse(include_str!("cfd_v_q21.txt")).expect("embedded table parses")
    }
    pub fn cfa_v_q21() -> AInftyModule {
        AInftyModule::parse(include_str!("cfa_v_q21.txt")).expect("embedded table parses")
    }
    pub fn cfd_v_q2m1() -> TypeDStructure {
        TypeDStructure::parse(include_str!("cfd_v_q2m1.txt")).expect("embedded table parses")
    }
}
