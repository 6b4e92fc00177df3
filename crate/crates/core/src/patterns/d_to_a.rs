//! Conversion of a torus-boundary type D structure into the A∞ module of
//! the same bordered manifold.
//!
//! A coefficient `σ_I` becomes the letters of `I` under `i ↦ 4 − i`
//! (`σ₃ ↦ ρ₁`, `σ₂₃ ↦ ρ₂ρ₁`, `σ₁₂₃ ↦ ρ₃ρ₂ρ₁`, ...). Every chain of Reeb arrows
//! `x → y₁ → ⋯ → y_k` whose translated words glue, meaning the last letter
//! so far times the next first letter is a nonzero chord that replaces both,
//! gives `m(x, word) = U^(Σn) y_k`. Arrows `x → U^k·y` with `k > 0` become `m₁`.

use thiserror::Error;

use crate::structures::{validate_type_d, AInftyModule, OperationPattern, TypeDStructure};
use crate::torus_algebra::Kind;

/// Longest chain followed before declaring the module unbounded.
pub const CHAIN_CAP: usize = 64;

#[derive(Clone, Debug, Error)]
pub enum DToAError {
    #[error("input is not a valid type D structure: {0}")]
    Invalid(String),
    #[error("input has a unit arrow {0} -> {1}; reduce it first")]
    NotReduced(String, String),
    #[error("chain from {0} does not terminate within {CHAIN_CAP} arrows")]
    Unbounded(String),
}

/// The letters `T(σ_I)` of a Reeb coefficient.
pub fn translate(k: Kind) -> Vec<Kind> {
    k.letters().iter().map(|&i| Kind::chord(4 - i, 4 - i)).collect()
}

/// Appends `next` to `word`, gluing at the junction; `None` when they do not glue.
fn glue(word: &[Kind], next: &[Kind]) -> Option<Vec<Kind>> {
    let (&last, head) = word.split_last()?;
    let p = last.mul(next[0]);
    if p.is_zero() {
        return None;
    }
    let mut w = head.to_vec();
    w.push(p);
    w.extend_from_slice(&next[1..]);
    Some(w)
}

pub fn d_to_a(m: &TypeDStructure) -> Result<AInftyModule, DToAError> {
    let rep = validate_type_d(m);
    if !rep.is_valid() {
        return Err(DToAError::Invalid(rep.issues.join("; ")));
    }
    let a = &m.arrows;
    let mut out = AInftyModule::new();
    for (name, idem) in a.generators() {
        out.add_gen(name, *idem).expect("names are unique");
    }
    let mut ops: std::collections::BTreeMap<(usize, Vec<Kind>, u32, usize), bool> = Default::default();
    for x in 0..a.len() {
        for &(y, c) in a.delta(x) {
            if c.alg.is_idempotent() {
                if c.u == 0 {
                    return Err(DToAError::NotReduced(a.name(x).into(), a.name(y).into()));
                }
                *ops.entry((x, Vec::new(), c.u, y)).or_default() ^= true;
            }
        }
        let mut stack: Vec<(usize, Vec<Kind>, u32, usize)> =
            a.delta(x).iter().filter(|(_, c)| c.alg.is_reeb()).map(|&(y, c)| (y, translate(c.alg), c.u, 1)).collect();
        while let Some((y, word, u, len)) = stack.pop() {
            *ops.entry((x, word.clone(), u, y)).or_default() ^= true;
            for &(z, c) in a.delta(y) {
                if !c.alg.is_reeb() {
                    continue;
                }
                if let Some(w) = glue(&word, &translate(c.alg)) {
                    if len + 1 > CHAIN_CAP {
                        return Err(DToAError::Unbounded(a.name(x).into()));
                    }
                    stack.push((z, w, u + c.u, len + 1));
                }
            }
        }
    }
    for ((x, word, u, y), on) in ops {
        if on {
            out.push_op(OperationPattern::literal(x, &word, u, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_algebra::{Idem, Side};
    use Kind::*;

    #[test]
    fn translation_table() {
        assert_eq!(translate(R1), vec![R3]);
        assert_eq!(translate(R3), vec![R1]);
        assert_eq!(translate(R12), vec![R3, R2]);
        assert_eq!(translate(R23), vec![R2, R1]);
        assert_eq!(translate(R123), vec![R3, R2, R1]);
    }

    #[test]
    fn single_generator_without_arrows() {
        let mut d = TypeDStructure::new(Side::Sigma, true);
        d.add_gen("a", Idem::I0).unwrap();
        let m = d_to_a(&d).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.ops().is_empty());
    }

    #[test]
    fn unit_arrow_is_rejected() {
        let mut d = TypeDStructure::new(Side::Sigma, true);
        d.add_gen("a", Idem::I0).unwrap();
        d.add_gen("b", Idem::I0).unwrap();
        d.add_arrow("a", 0, Iota0, "b").unwrap();
        assert!(matches!(d_to_a(&d), Err(DToAError::NotReduced(..))));
    }

    #[test]
    fn self_gluing_loop_is_unbounded() {
        let mut d = TypeDStructure::new(Side::Sigma, false);
        d.add_gen("a", Idem::I0).unwrap();
        d.add_arrow("a", 0, R12, "a").unwrap();
        assert!(matches!(d_to_a(&d), Err(DToAError::Unbounded(_))));
    }
}
