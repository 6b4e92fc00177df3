//! Box tensor products of an A∞ module with a type D structure or a DD bimodule.

use rayon::prelude::*;
use thiserror::Error;

use crate::structures::{
    validate_type_d, AInftyModule, DCoef, DDBimodule, GradedComplexFU, StructureError, TypeDStructure, UPow,
    ValidationReport,
};
use crate::torus_algebra::{Kind, Side};

/// Default cap on the number of D-side arrows in one pairing path.
pub const DEFAULT_PATH_CAP: usize = 64;

#[derive(Debug, Error)]
pub enum PairingError {
    #[error("unbounded pairing: the D side has a rho23 cycle and the A side has a starred family")]
    Unbounded,
    #[error("path from {0} exceeds the path-length cap of {1}")]
    PathCap(String, usize),
    #[error("A side uses the sigma algebra, expected rho")]
    WrongSide,
    #[error("pairing result is not a differential: {}", .0.issues.join("; "))]
    NotDifferential(ValidationReport),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// One D-side arrow: target, ρ-letter, and the extra data carried along.
type Edge<E> = (usize, Kind, E);

/// Name of the paired generator `a ⊗ x`.
pub fn pair_name(a: &str, x: &str) -> String {
    format!("{a}.{x}")
}

fn has_rho23_cycle<E>(adj: &[Vec<Edge<E>>]) -> bool {
    // Iterative three-colour DFS on the ρ23 subgraph.
    let n = adj.len();
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some((v, i)) = stack.pop() {
            let next = adj[v][i..].iter().position(|e| e.1 == Kind::R23).map(|p| p + i);
            match next {
                Some(j) => {
                    stack.push((v, j + 1));
                    let w = adj[v][j].0;
                    match state[w] {
                        1 => return true,
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        _ => {}
                    }
                }
                None => state[v] = 2,
            }
        }
    }
    false
}

/// All `(A-target, U-power, D-target, extra)` reached from `a ⊗ start` along
/// paths whose ρ-letters are Reeb elements, including the empty path.
fn paths_from<E: Copy>(
    module: &AInftyModule,
    a: usize,
    start: usize,
    adj: &[Vec<Edge<E>>],
    init: E,
    combine: &(dyn Fn(E, E) -> Option<E> + Sync),
    cap: usize,
    start_name: &str,
) -> Result<Vec<(usize, u32, usize, E)>, PairingError> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Kind>, E)> = vec![(start, Vec::new(), init)];
    while let Some((x, word, extra)) = stack.pop() {
        for (b, u) in module.apply(a, &word) {
            out.push((b, u.0, x, extra));
        }
        for &(y, k, e) in &adj[x] {
            if !k.is_reeb() {
                continue;
            }
            let Some(next) = combine(extra, e) else { continue };
            let mut w = word.clone();
            w.push(k);
            if !module.has_extension(a, &w) {
                continue;
            }
            if w.len() > cap {
                return Err(PairingError::PathCap(start_name.to_string(), cap));
            }
            stack.push((y, w, next));
        }
    }
    Ok(out)
}

/// `A ⊠ D` as a chain complex over F₂[U], with generators `a.x` for
/// idempotent-matched pairs. Gradings are left unset.
pub fn box_tensor_ad(module: &AInftyModule, d: &TypeDStructure, cap: usize) -> Result<GradedComplexFU, PairingError> {
    if d.side != Side::Rho {
        return Err(PairingError::WrongSide);
    }
    let da = &d.arrows;
    let adj: Vec<Vec<Edge<u32>>> =
        (0..da.len()).map(|i| da.delta(i).iter().map(|&(t, c)| (t, c.alg, c.u)).collect()).collect();
    if module.ops().iter().any(|op| op.starred) && has_rho23_cycle(&adj) {
        return Err(PairingError::Unbounded);
    }
    let mut pairs = Vec::new();
    let mut out = GradedComplexFU::new();
    for a in 0..module.len() {
        for x in 0..da.len() {
            if module.idem(a) == d.idem(x) {
                let i = out.add_gen(&pair_name(module.name(a), da.name(x)), None)?;
                pairs.push((a, x));
                debug_assert_eq!(i + 1, pairs.len());
            }
        }
    }
    let index = |a: usize, x: usize| pairs.binary_search(&(a, x)).ok();
    let add = |u: u32, v: u32| Some(u + v);
    let terms: Vec<Vec<(usize, u32)>> = pairs
        .par_iter()
        .map(|&(a, x)| {
            let name = pair_name(module.name(a), da.name(x));
            let mut t = Vec::new();
            for (b, u, y, du) in paths_from(module, a, x, &adj, 0, &add, cap, &name)? {
                if let Some(j) = index(b, y) {
                    t.push((j, u + du));
                }
            }
            // Strict unitality: an idempotent arrow acts through m₂(a, ι) = a.
            for &(y, k, du) in &adj[x] {
                if k.is_idempotent() {
                    if let Some(j) = index(a, y) {
                        t.push((j, du));
                    }
                }
            }
            Ok(t)
        })
        .collect::<Result<_, PairingError>>()?;
    for (i, t) in terms.into_iter().enumerate() {
        for (j, u) in t {
            out.arrows.toggle(i, j, UPow(u));
        }
    }
    let rep = out.validate();
    if !rep.is_valid() {
        return Err(PairingError::NotDifferential(rep));
    }
    Ok(out)
}

/// `A ⊠ B` for a ρ-side A∞ module and a DD bimodule: a U-enabled type D
/// structure over the σ side, with generators `a.g`.
pub fn box_tensor_a_dd(module: &AInftyModule, b: &DDBimodule, cap: usize) -> Result<TypeDStructure, PairingError> {
    let ba = &b.arrows;
    let adj: Vec<Vec<Edge<Kind>>> =
        (0..ba.len()).map(|i| ba.delta(i).iter().map(|&(t, c)| (t, c.rho, c.sigma)).collect()).collect();
    if module.ops().iter().any(|op| op.starred) && has_rho23_cycle(&adj) {
        return Err(PairingError::Unbounded);
    }
    let mut pairs = Vec::new();
    let mut out = TypeDStructure::new(Side::Sigma, true);
    for a in 0..module.len() {
        for g in 0..ba.len() {
            let (rho, sigma) = *ba.label(g);
            if module.idem(a) == rho {
                out.add_gen(&pair_name(module.name(a), ba.name(g)), sigma)?;
                pairs.push((a, g));
            }
        }
    }
    let index = |a: usize, g: usize| pairs.binary_search(&(a, g)).ok();
    let mul = |s: Kind, t: Kind| {
        let p = s.mul(t);
        (!p.is_zero()).then_some(p)
    };
    let terms: Vec<Vec<(usize, DCoef)>> = pairs
        .par_iter()
        .map(|&(a, g)| {
            let name = pair_name(module.name(a), ba.name(g));
            let init = ba.label(g).1.element();
            let mut t = Vec::new();
            for (c, u, h, sigma) in paths_from(module, a, g, &adj, init, &mul, cap, &name)? {
                if let Some(j) = index(c, h) {
                    t.push((j, DCoef::new(u, sigma)));
                }
            }
            for &(h, rho, sigma) in &adj[g] {
                if rho.is_idempotent() {
                    if let Some(j) = index(a, h) {
                        t.push((j, DCoef::new(0, sigma)));
                    }
                }
            }
            Ok(t)
        })
        .collect::<Result<_, PairingError>>()?;
    for (i, t) in terms.into_iter().enumerate() {
        for (j, c) in t {
            out.arrows.toggle(i, j, c);
        }
    }
    let rep = validate_type_d(&out);
    if !rep.is_valid() {
        return Err(PairingError::NotDifferential(rep));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_algebra::Idem;

    fn core() -> AInftyModule {
        let mut m = AInftyModule::new();
        m.add_gen("a", Idem::I0).unwrap();
        m.add_family("a", &[Kind::R3], &[Kind::R2], 1, 1, "a").unwrap();
        m
    }

    fn unknot() -> TypeDStructure {
        let mut d = TypeDStructure::new(Side::Rho, false);
        d.add_gen("xi0", Idem::I0).unwrap();
        d.add_arrow("xi0", 0, Kind::R12, "xi0").unwrap();
        d
    }

    #[test]
    fn core_with_unknot_is_one_generator() {
        let c = box_tensor_ad(&core(), &unknot(), DEFAULT_PATH_CAP).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.arrows.arrow_count(), 0);
    }

    #[test]
    fn rho23_cycle_with_star_is_unbounded() {
        let mut d = TypeDStructure::new(Side::Rho, false);
        d.add_gen("k", Idem::I1).unwrap();
        d.add_arrow("k", 0, Kind::R23, "k").unwrap();
        assert!(matches!(box_tensor_ad(&core(), &d, 64), Err(PairingError::Unbounded)));
    }

    #[test]
    fn path_cap_is_an_error() {
        // A long ρ3, ρ23, ..., ρ23, ρ2 chain pairs with the starred family.
        let mut d = TypeDStructure::new(Side::Rho, false);
        d.add_gen("s", Idem::I0).unwrap();
        for i in 0..6 {
            d.add_gen(&format!("k{i}"), Idem::I1).unwrap();
        }
        d.add_gen("t", Idem::I0).unwrap();
        d.add_arrow("s", 0, Kind::R3, "k0").unwrap();
        for i in 0..5 {
            d.add_arrow(&format!("k{i}"), 0, Kind::R23, &format!("k{}", i + 1)).unwrap();
        }
        d.add_arrow("k5", 0, Kind::R2, "t").unwrap();
        let c = box_tensor_ad(&core(), &d, 64).unwrap();
        let s = c.arrows.idx("a.s").unwrap();
        let t = c.arrows.idx("a.t").unwrap();
        assert!(c.arrows.delta(s).contains(&(t, UPow(6))));
        assert!(matches!(box_tensor_ad(&core(), &d, 3), Err(PairingError::PathCap(..))));
    }
}
