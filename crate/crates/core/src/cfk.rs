//! Knot Floer input data in simplified bases and the type D structure of the
//! knot complement built from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structures::{validate_type_d, StructureError, TypeDStructure, ValidationReport};
use crate::torus_algebra::{Idem, Kind, Side};

#[derive(Debug, Error)]
pub enum CfkError {
    #[error("invalid knot data: {}", .0.issues.join("; "))]
    Invalid(ValidationReport),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("malformed knot JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `CFK⁻` of a knot described by a vertically simplified basis `ξ₀..ξ_{2n}` and
/// a horizontally simplified basis `η₀..η_{2n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFKData {
    pub n: usize,
    pub tau: i64,
    pub epsilon: i64,
    /// Length `k_j` of the vertical arrow `ξ_{2j−1} → ξ_{2j}`.
    pub vertical: Vec<u32>,
    /// Length `l_j` of the horizontal arrow `η_{2j−1} → η_{2j}`.
    pub horizontal: Vec<u32>,
    /// Row `q` expresses `η_q` in the `ξ` basis, mod `U`.
    pub eta_in_xi: Vec<Vec<u8>>,
    /// Alexander grading of each `ξ_p`.
    pub alexander: Vec<i64>,
}

type Matrix = Vec<Vec<bool>>;

fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<bool>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| i == j));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| a[i][col])?;
        a.swap(col, p);
        let pr = a[col].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i != col && r[col] {
                r.iter_mut().zip(&pr).for_each(|(x, y)| *x ^= y);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl CFKData {
    pub fn from_json(text: &str) -> Result<Self, CfkError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    /// Number of `ξ` generators.
    pub fn size(&self) -> usize {
        2 * self.n + 1
    }

    fn b(&self) -> Matrix {
        self.eta_in_xi.iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect()
    }

    /// Alexander grading of `η_q`, if homogeneous.
    pub fn eta_grading(&self, q: usize) -> Option<i64> {
        let mut gs = self.eta_in_xi[q].iter().zip(&self.alexander).filter(|(&v, _)| v == 1).map(|(_, &a)| a);
        let first = gs.next()?;
        gs.all(|g| g == first).then_some(first)
    }

    fn is_basis_vector(&self, q: usize, p: usize) -> bool {
        self.eta_in_xi[q].iter().enumerate().all(|(i, &v)| (v == 1) == (i == p))
    }
}

pub fn validate_cfk(k: &CFKData) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let size = k.size();
    if k.vertical.len() != k.n || k.horizontal.len() != k.n {
        rep.push(format!("expected {} vertical and horizontal lengths", k.n));
    }
    if k.vertical.iter().chain(&k.horizontal).any(|&l| l == 0) {
        rep.push("arrow lengths must be at least 1");
    }
    if k.alexander.len() != size {
        rep.push(format!("expected {size} Alexander gradings"));
    }
    if k.eta_in_xi.len() != size || k.eta_in_xi.iter().any(|r| r.len() != size) {
        rep.push(format!("eta_in_xi must be {size}x{size}"));
    }
    if k.eta_in_xi.iter().flatten().any(|&v| v > 1) {
        rep.push("eta_in_xi entries must be 0 or 1");
    }
    if !rep.is_valid() {
        return rep;
    }
    if inverse(&k.b()).is_none() {
        rep.push("eta_in_xi is not invertible over F2");
    }
    if !(-1..=1).contains(&k.epsilon) {
        rep.push("epsilon must be -1, 0 or 1");
    }
    if k.epsilon == 0 && k.tau != 0 {
        rep.push("epsilon = 0 forces tau = 0");
    }
    if k.alexander[0] != k.tau {
        rep.push("A(xi0) must equal tau");
    }
    let eta: Vec<Option<i64>> = (0..size).map(|q| k.eta_grading(q)).collect();
    for (q, g) in eta.iter().enumerate() {
        if g.is_none() {
            rep.push(format!("eta{q} is not homogeneous"));
        }
    }
    if eta[0].is_some_and(|g| g != -k.tau) {
        rep.push("A(eta0) must equal -tau");
    }
    let ident = match k.epsilon {
        -1 if k.n >= 1 => k.is_basis_vector(1, 0) && k.is_basis_vector(0, 1),
        0 => k.is_basis_vector(0, 0),
        1 if k.n >= 1 => k.is_basis_vector(2, 0) && k.is_basis_vector(0, 2),
        _ => false,
    };
    if !ident {
        rep.push(format!("basis identifications for epsilon = {} do not hold", k.epsilon));
    }
    for j in 1..=k.n {
        if k.alexander[2 * j] != k.alexander[2 * j - 1] - k.vertical[j - 1] as i64 {
            rep.push(format!("vertical arrow {j} has the wrong Alexander drop"));
        }
        if let (Some(a), Some(b)) = (eta[2 * j - 1], eta[2 * j]) {
            if b != a + k.horizontal[j - 1] as i64 {
                rep.push(format!("horizontal arrow {j} has the wrong Alexander jump"));
            }
        }
    }
    rep
}

pub fn xi_name(p: usize) -> String {
    format!("xi{p}")
}

/// `CFD` of the knot complement over the ρ side, in the `ξ` basis of `ι₀`.
pub fn cfd_from_cfk(k: &CFKData) -> Result<TypeDStructure, CfkError> {
    let rep = validate_cfk(k);
    if !rep.is_valid() {
        return Err(CfkError::Invalid(rep));
    }
    let size = k.size();
    let b = k.b();
    let a = inverse(&b).expect("validated");
    let mut d = TypeDStructure::new(Side::Rho, false);
    for p in 0..size {
        d.add_gen(&xi_name(p), Idem::I0)?;
    }
    // A ι₁ chain c₁ → D₂₃ → ⋯ → c_len.
    let chain = |d: &mut TypeDStructure, prefix: &str, len: u32| -> Result<Vec<String>, StructureError> {
        let names: Vec<String> = (1..=len).map(|i| format!("{prefix}{i}")).collect();
        for nm in &names {
            d.add_gen(nm, Idem::I1)?;
        }
        for w in names.windows(2) {
            d.add_arrow(&w[0], 0, Kind::R23, &w[1])?;
        }
        Ok(names)
    };
    // ξ-expansions of "from η_q" (dual, via a) and "to η_q" (via b).
    let (a, b) = (&a, &b);
    let from_eta = |q: usize| (0..size).filter(move |&p| a[p][q]);
    let to_eta = |q: usize| (0..size).filter(move |&p| b[q][p]);
    for j in 1..=k.n {
        let kappa = chain(&mut d, &format!("kappa{j}_"), k.vertical[j - 1])?;
        d.add_arrow(&xi_name(2 * j), 0, Kind::R123, &kappa[0])?;
        d.add_arrow(&xi_name(2 * j - 1), 0, Kind::R1, kappa.last().unwrap())?;
        let lambda = chain(&mut d, &format!("lambda{j}_"), k.horizontal[j - 1])?;
        for p in from_eta(2 * j - 1) {
            d.add_arrow(&xi_name(p), 0, Kind::R3, &lambda[0])?;
        }
        for p in to_eta(2 * j) {
            d.add_arrow(lambda.last().unwrap(), 0, Kind::R2, &xi_name(p))?;
        }
    }
    let s = 2 * k.tau.unsigned_abs() as u32;
    match k.tau.signum() {
        1 => {
            let mu = chain(&mut d, "mu", s)?;
            for p in from_eta(0) {
                d.add_arrow(&xi_name(p), 0, Kind::R3, &mu[0])?;
            }
            d.add_arrow(&xi_name(0), 0, Kind::R1, mu.last().unwrap())?;
        }
        0 => {
            for p in to_eta(0) {
                d.add_arrow(&xi_name(0), 0, Kind::R12, &xi_name(p))?;
            }
        }
        _ => {
            let mu = chain(&mut d, "mu", s)?;
            d.add_arrow(&xi_name(0), 0, Kind::R123, &mu[0])?;
            for p in to_eta(0) {
                d.add_arrow(mu.last().unwrap(), 0, Kind::R2, &xi_name(p))?;
            }
        }
    }
    let rep = validate_type_d(&d);
    if !rep.is_valid() {
        return Err(CfkError::Invalid(rep));
    }
    Ok(d)
}

/// The coefficient map `D_I` applied to a set of generators, mod 2.
pub fn coefficient_map(d: &TypeDStructure, kind: Kind, xs: &[usize]) -> Vec<usize> {
    let mut out = std::collections::BTreeSet::new();
    for &x in xs {
        for &(y, c) in d.arrows.delta(x) {
            if c.alg == kind && c.u == 0 && !out.insert(y) {
                out.remove(&y);
            }
        }
    }
    out.into_iter().collect()
}

/// `(D₁ ∘ D₂ ∘ D₃)(ξ₀)`, which vanishes for every knot.
pub fn d1d2d3_xi0(d: &TypeDStructure) -> Vec<usize> {
    let x = d.arrows.find(&xi_name(0)).into_iter().collect::<Vec<_>>();
    let y = coefficient_map(d, Kind::R3, &x);
    let z = coefficient_map(d, Kind::R2, &y);
    coefficient_map(d, Kind::R1, &z)
}

/// `D₃(ξ₂)`, which vanishes when `ε = −1` and `k₁ = 1`.
pub fn d3_xi2(d: &TypeDStructure) -> Vec<usize> {
    let x = d.arrows.find(&xi_name(2)).into_iter().collect::<Vec<_>>();
    coefficient_map(d, Kind::R3, &x)
}

/// Checks the two coefficient-map identities on `cfd_from_cfk(k)`.
pub fn check_coefficient_identities(k: &CFKData, d: &TypeDStructure) -> ValidationReport {
    let mut rep = ValidationReport::default();
    if !d1d2d3_xi0(d).is_empty() {
        rep.push("(D1 o D2 o D3)(xi0) is nonzero");
    }
    if k.epsilon == -1 && k.vertical.first() == Some(&1) && !d3_xi2(d).is_empty() {
        rep.push("D3(xi2) is nonzero although epsilon = -1 and k1 = 1");
    }
    rep
}

pub const PRESETS: [&str; 7] =
    ["unknot", "trefoil_rh", "trefoil_lh", "figure_eight", "t2_7", "synthetic_tau0_eps_minus1", "synthetic_tau0_eps1"];

/// Permutation matrix with `η_q = ξ_{perm[q]}`.
fn perm(p: &[usize]) -> Vec<Vec<u8>> {
    p.iter().map(|&j| (0..p.len()).map(|i| u8::from(i == j)).collect()).collect()
}

pub fn preset(name: &str) -> Result<CFKData, CfkError> {
    let k = |n, tau, epsilon, vertical: &[u32], horizontal: &[u32], eta: &[usize], alexander: &[i64]| CFKData {
        n,
        tau,
        epsilon,
        vertical: vertical.to_vec(),
        horizontal: horizontal.to_vec(),
        eta_in_xi: perm(eta),
        alexander: alexander.to_vec(),
    };
    Ok(match name {
        "unknot" => k(0, 0, 0, &[], &[], &[0], &[0]),
        "trefoil_rh" => k(1, 1, 1, &[1], &[1], &[2, 1, 0], &[1, 0, -1]),
        "trefoil_lh" => k(1, -1, -1, &[1], &[1], &[1, 0, 2], &[-1, 1, 0]),
        "figure_eight" => k(2, 0, 0, &[1, 1], &[1, 1], &[0, 1, 3, 2, 4], &[0, 0, -1, 1, 0]),
        // Staircase with ξ = (a₀, b₃, a₃, b₁, a₁, b₂, a₂).
        "t2_7" => k(3, 3, 1, &[1, 1, 1], &[1, 1, 1], &[2, 3, 0, 5, 4, 1, 6], &[3, -2, -3, 2, 1, 0, -1]),
        // A single pair cannot realize τ = 0 with ε = ±1, so these use two.
        "synthetic_tau0_eps_minus1" => k(2, 0, -1, &[2, 1], &[1, 4], &[1, 0, 4, 2, 3], &[0, 0, -2, 2, 1]),
        "synthetic_tau0_eps1" => k(2, 0, 1, &[1, 1], &[1, 1], &[2, 4, 0, 3, 1], &[0, 1, 0, 0, -1]),
        _ => return Err(CfkError::UnknownPreset(name.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_satisfy_the_coefficient_identities() {
        for name in PRESETS {
            let k = preset(name).unwrap();
            assert!(validate_cfk(&k).is_valid(), "{name}: {:?}", validate_cfk(&k));
            let d = cfd_from_cfk(&k).unwrap();
            assert!(check_coefficient_identities(&k, &d).is_valid(), "{name}");
            let iota1: u32 = k.vertical.iter().chain(&k.horizontal).sum::<u32>() + 2 * k.tau.unsigned_abs() as u32;
            assert_eq!(d.gens_with(Idem::I0).len(), k.size());
            assert_eq!(d.gens_with(Idem::I1).len(), iota1 as usize);
        }
    }

    #[test]
    fn unknot_is_a_rho12_loop() {
        let d = cfd_from_cfk(&preset("unknot").unwrap()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.arrows.arrows().collect::<Vec<_>>(), vec![(0, 0, crate::structures::DCoef::new(0, Kind::R12))]);
    }

    #[test]
    fn lh_trefoil_unstable_chain() {
        let d = cfd_from_cfk(&preset("trefoil_lh").unwrap()).unwrap();
        let text = d.dump();
        assert!(text.contains("xi0 -> r123 mu1"));
        assert!(text.contains("mu1 -> r23 mu2"));
        assert!(text.contains("mu2 -> r2 xi1"));
    }

    #[test]
    fn flipped_epsilon_is_rejected() {
        let mut k = preset("trefoil_rh").unwrap();
        k.epsilon = -1;
        assert!(!validate_cfk(&k).is_valid());
        assert!(matches!(cfd_from_cfk(&k), Err(CfkError::Invalid(_))));
    }

    #[test]
    fn json_round_trip() {
        let k = preset("t2_7").unwrap();
        assert_eq!(CFKData::from_json(&k.to_json()).unwrap(), k);
        assert!(matches!(CFKData::from_json("{\"n\": 1}"), Err(CfkError::Json(_))));
    }

    #[test]
    fn non_invertible_matrix_is_rejected() {
        let mut k = preset("figure_eight").unwrap();
        k.eta_in_xi[1] = k.eta_in_xi[2].clone();
        assert!(validate_cfk(&k).issues.iter().any(|i| i.contains("invertible")));
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("hopf"), Err(CfkError::UnknownPreset(_))));
    }
}
