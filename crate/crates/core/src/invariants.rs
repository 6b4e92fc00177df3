//! End-to-end τ and ε of satellites, the closed-form formulas they are checked
//! against, and a consistency report.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::cfk::{cfd_from_cfk, CFKData, CfkError};
use crate::grading::{assign_gradings, pin_constants, satellite_homology, tau_of, GradingConstants, GradingError};
use crate::pairing::{box_tensor_ad, PairingError, DEFAULT_PATH_CAP};
use crate::patterns::{pattern_module, Pattern, PatternError};
use crate::reduction::reduce;
use crate::structures::GradedComplexFU;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Cfk(#[from] CfkError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error("tau of both cables is odd ({0}, {1})")]
    BothOdd(i64, i64),
    #[error("both cable taus are even but not both zero ({0}, {1})")]
    EvenNonzero(i64, i64),
}

static CONSTANTS: OnceLock<[Result<GradingConstants, String>; 3]> = OnceLock::new();

/// Grading constants of a pattern, pinned once with the default path cap.
pub fn constants(p: Pattern) -> Result<GradingConstants, InvariantError> {
    let all = CONSTANTS.get_or_init(|| {
        Pattern::ALL.map(|p| {
            let m = pattern_module(p).map_err(|e| e.to_string())?;
            pin_constants(&m.cfa, p.winding(), DEFAULT_PATH_CAP).map_err(|e| e.to_string())
        })
    });
    let i = Pattern::ALL.iter().position(|&q| q == p).expect("listed");
    all[i].clone().map_err(|e| InvariantError::Pattern(PatternError::Pairing(e)))
}

/// The graded complex `CFA(V, P) ⊠ CFD(X_K)` before reduction.
pub fn satellite_complex(k: &CFKData, p: Pattern, cap: usize) -> Result<GradedComplexFU, InvariantError> {
    let d = cfd_from_cfk(k)?;
    let m = pattern_module(p)?;
    let c = box_tensor_ad(&m.cfa, &d, cap)?;
    Ok(assign_gradings(&c, k, &constants(p)?)?)
}

/// τ of the satellite `P(K)`.
pub fn tau_satellite(k: &CFKData, p: Pattern, cap: usize) -> Result<i64, InvariantError> {
    let c = satellite_complex(k, p, cap)?;
    let r = GradedComplexFU { arrows: reduce(&c.arrows) };
    Ok(tau_of(&satellite_homology(&r)?)?)
}

/// ε from the parities of τ of the `(2,1)` and `(2,−1)` cables.
pub fn epsilon_from_cables(t_plus: i64, t_minus: i64) -> Result<i64, InvariantError> {
    match (t_plus % 2 != 0, t_minus % 2 != 0) {
        (true, true) => Err(InvariantError::BothOdd(t_plus, t_minus)),
        (true, false) => Ok(-1),
        (false, true) => Ok(1),
        (false, false) if t_plus == 0 && t_minus == 0 => Ok(0),
        (false, false) => Err(InvariantError::EvenNonzero(t_plus, t_minus)),
    }
}

/// ε(Q(K)) through the cables of `Q(K)`.
pub fn epsilon_q(k: &CFKData, cap: usize) -> Result<i64, InvariantError> {
    let t_plus = tau_satellite(k, Pattern::Q21, cap)?;
    let t_minus = tau_satellite(k, Pattern::Q2m1, cap)?;
    epsilon_from_cables(t_plus, t_minus)
}

pub fn tau_q_formula(tau: i64, eps: i64) -> i64 {
    if tau <= 0 && (eps == 0 || eps == 1) {
        tau
    } else {
        tau + 1
    }
}

pub fn epsilon_q_formula(_tau: i64, eps: i64) -> i64 {
    if eps == 0 {
        0
    } else {
        1
    }
}

/// τ(Qⁿ(K)) in closed form.
pub fn tau_q_iterate(tau: i64, eps: i64, n: u32) -> i64 {
    if (tau == 0 && eps == -1) || tau > 0 {
        tau + i64::from(n)
    } else if eps == -1 {
        tau + 1
    } else {
        tau
    }
}

/// τ(Qⁿ(K)) by applying the one-step formulas `n` times.
pub fn tau_q_recursive(tau: i64, eps: i64, n: u32) -> i64 {
    (0..n).fold((tau, eps), |(t, e), _| (tau_q_formula(t, e), epsilon_q_formula(t, e))).0
}

/// τ of the `(2, sign)` cable from τ and ε of the companion.
pub fn hom_cable_tau(tau: i64, eps: i64, sign: i64) -> i64 {
    match (sign > 0, eps) {
        (_, 0) => 0,
        (true, -1) => 2 * tau + 1,
        (true, _) => 2 * tau,
        (false, -1) => 2 * tau,
        (false, _) => 2 * tau - 1,
    }
}

/// One formula comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub chain: i64,
    pub formula: i64,
    pub ok: bool,
}

/// Chain-level invariants of `Q(K)` and its cables, with formula checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub tau_k: i64,
    pub epsilon_k: i64,
    pub tau_q: i64,
    pub epsilon_q: i64,
    pub tau_q21: i64,
    pub tau_q2m1: i64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn check(name: &str, chain: i64, formula: i64) -> Check {
    Check { name: name.to_string(), chain, formula, ok: chain == formula }
}

/// Runs the three satellites; with `formulas`, compares against every closed form.
pub fn check_consistency(k: &CFKData, cap: usize, formulas: bool) -> Result<Report, InvariantError> {
    let tau_q = tau_satellite(k, Pattern::Q, cap)?;
    let tau_q21 = tau_satellite(k, Pattern::Q21, cap)?;
    let tau_q2m1 = tau_satellite(k, Pattern::Q2m1, cap)?;
    let epsilon_q = epsilon_from_cables(tau_q21, tau_q2m1)?;
    let mut checks = Vec::new();
    if formulas {
        let (t, e) = (k.tau, k.epsilon);
        let (tq, eq) = (tau_q_formula(t, e), epsilon_q_formula(t, e));
        checks.push(check("tau(Q(K))", tau_q, tq));
        checks.push(check("epsilon(Q(K))", epsilon_q, eq));
        checks.push(check("tau(Q(K)_2,1) = 2 tau(Q(K))", tau_q21, 2 * tau_q));
        checks.push(check("tau(Q(K)_2,1) cable formula", tau_q21, hom_cable_tau(tq, eq, 1)));
        checks.push(check("tau(Q(K)_2,-1) cable formula", tau_q2m1, hom_cable_tau(tq, eq, -1)));
        checks.push(Check { name: "epsilon(Q(K)) != -1".into(), chain: epsilon_q, formula: 1, ok: epsilon_q != -1 });
    }
    Ok(Report { tau_k: k.tau, epsilon_k: k.epsilon, tau_q, epsilon_q, tau_q21, tau_q2m1, checks })
}
