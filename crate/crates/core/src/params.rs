//! Parameter wiring for the main theorem and feasibility checks.
//!
//! All inequalities are evaluated in log₂ space: at realistic sizes the
//! right-hand sides overflow `f64` long before they become interesting.

use serde::{Deserialize, Serialize};

use crate::combin::{big_to_f64, binomial};
use crate::error::{invalid, Result};
use crate::kikuchi::params_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Paper,
    Desk,
}

/// Which `ρ` term sits inside `log(10·C^40·…)` in the walk-length formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoTerm {
    /// `(ρ/2)^{−2}`.
    HalfRhoSquared,
    /// `ρ^{−4}`.
    RhoFourth,
}

impl RhoTerm {
    fn ln(self, rho: f64) -> f64 {
        match self {
            RhoTerm::HalfRhoSquared => 2.0 * (2.0 / rho).ln(),
            RhoTerm::RhoFourth => -4.0 * rho.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConfig {
    /// Anticoncentration constant, must exceed 1.2.
    pub c_anti: f64,
    pub rho_term: RhoTerm,
    /// The constant `C` in the suggested-ℓ formula.
    pub ell_constant: f64,
    /// Target failure probability.
    pub delta: f64,
    /// Fixed ε instead of `10·log(1/ρ)/log k`.
    pub epsilon: Option<f64>,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            c_anti: 2.0,
            rho_term: RhoTerm::HalfRhoSquared,
            ell_constant: 2.0,
            delta: 0.01,
            epsilon: None,
        }
    }
}

/// `lhs ≥ rhs`, both as log₂ values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub log2_lhs: f64,
    pub log2_rhs: f64,
    /// `log2_lhs − log2_rhs`; negative when the bound fails.
    pub log2_gap: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(log2_lhs: f64, log2_rhs: f64) -> Self {
        let log2_gap = if log2_lhs.is_nan() || log2_rhs.is_nan() {
            f64::NAN
        } else if log2_rhs == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            log2_lhs - log2_rhs
        };
        Self {
            log2_lhs,
            log2_rhs,
            log2_gap,
            holds: log2_lhs >= log2_rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub ell: usize,
    pub rho: f64,
    pub epsilon: f64,
    /// Unrounded walk length.
    pub walk_len_real: f64,
    /// `⌊walk_len_real⌋`; zero means no admissible walk length.
    pub walk_len: usize,
    pub log2_vertex_count: f64,
    pub average_degree: f64,
    /// `d̄ ≥ 120·ε·(10·C^40·(2/ρ)²)^{10/ε}·log N`.
    pub degree_requirement: Inequality,
    /// `d̄ ≥ 300·N^{4/T}·T`.
    pub walk_precondition: Inequality,
    /// `4·log(1/δ) < T`.
    pub delta_condition: bool,
    /// `(C_anti, T)` for a few anticoncentration constants.
    pub walk_len_sensitivity: Vec<(f64, f64)>,
    /// `m / (n^{k/2}·log n)`.
    pub density: f64,
    pub suggested_ell: usize,
    /// `ℓ ≤ √n`, standing in for `ℓ ≤ O(√n)`.
    pub ell_below_sqrt_n: bool,
    pub feasible_paper: bool,
    pub feasible_desk: bool,
}

/// `10·log(1/ρ)/log k`, in base 2 so dyadic inputs come out exact.
pub fn theorem_epsilon(rho: f64, k: usize) -> f64 {
    10.0 * (1.0 / rho).log2() / (k as f64).log2()
}

/// `⌈(C·log(1/ρ)/log k)^{2/(k−2)} · (ρ²·C(k,k/2))^{−2/(k−2)} · (1/δ')^{2/(k−2)}⌉`,
/// clamped below at `k`.
pub fn suggested_ell(k: usize, rho: f64, density: f64, ell_constant: f64) -> usize {
    let p = 2.0 / (k as f64 - 2.0);
    let central = big_to_f64(&binomial(k as u64, k as u64 / 2));
    let prefactor = (ell_constant * (1.0 / rho).ln() / (k as f64).ln()).powf(p);
    let raw = prefactor * (rho * rho * central).powf(-p) * (1.0 / density).powf(p);
    let ceil = if raw.is_finite() {
        raw.ceil().max(0.0)
    } else {
        f64::INFINITY
    };
    if ceil >= usize::MAX as f64 {
        usize::MAX
    } else {
        (ceil as usize).max(k)
    }
}

fn walk_len_real(epsilon: f64, ln_n: f64, c_anti: f64, rho: f64, term: RhoTerm) -> f64 {
    0.4 * epsilon * ln_n / (10f64.ln() + 40.0 * c_anti.ln() + term.ln(rho))
}

/// Derives ε, T and the theorem's preconditions for the given sizes.
///
/// Only argument-shape problems (odd `k`, `ρ ∉ (0, 1]`, ℓ out of range) are
/// errors; unmet bounds are reported through the feasibility flags.
pub fn derive_theorem_params(
    n: usize,
    k: usize,
    m: usize,
    ell: usize,
    rho: f64,
    cfg: &TheoremConfig,
) -> Result<DerivedParams> {
    if k < 4 || k % 2 == 1 {
        return invalid(format!("k = {k} must be even and at least 4"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return invalid(format!("rho = {rho} outside (0, 1]"));
    }
    if cfg.c_anti.is_nan() || cfg.c_anti <= 1.2 {
        return invalid(format!("c_anti = {} must exceed 1.2", cfg.c_anti));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return invalid(format!("delta = {} outside (0, 1)", cfg.delta));
    }
    let kp = params_for(n, k, m, ell)?;
    let epsilon = cfg.epsilon.unwrap_or_else(|| theorem_epsilon(rho, k));
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon = {epsilon} must be finite and non-negative"));
    }
    let ln_n = kp.ln_vertex_count();
    let log2_n = ln_n / std::f64::consts::LN_2;
    let t_real = walk_len_real(epsilon, ln_n, cfg.c_anti, rho, cfg.rho_term);
    let walk_len = if t_real >= 1.0 { t_real.floor() as usize } else { 0 };
    let average_degree = kp.average_degree_f64();
    let log2_d = average_degree.log2();

    let base_log2 = (10f64.ln() + 40.0 * cfg.c_anti.ln() + cfg.rho_term.ln(rho)) / std::f64::consts::LN_2;
    let req = if epsilon > 0.0 {
        (120.0 * epsilon).log2() + (10.0 / epsilon) * base_log2 + log2_n.log2()
    } else {
        f64::INFINITY
    };
    let walk_req = if walk_len > 0 {
        300f64.log2() + 4.0 / walk_len as f64 * log2_n + (walk_len as f64).log2()
    } else {
        f64::INFINITY
    };
    let degree_requirement = Inequality::new(log2_d, req);
    let walk_precondition = Inequality::new(log2_d, walk_req);
    let delta_condition = 4.0 * (1.0 / cfg.delta).log2() < walk_len as f64;

    let walk_len_sensitivity = [1.25, 2.0, 4.0, 8.0]
        .iter()
        .map(|&c| (c, walk_len_real(epsilon, ln_n, c, rho, cfg.rho_term)))
        .collect();

    let density = m as f64 / ((n as f64).powi(k as i32 / 2) * (n as f64).log2());
    let feasible_desk = m > 0 && average_degree > 0.0;
    Ok(DerivedParams {
        n,
        k,
        m,
        ell,
        rho,
        epsilon,
        walk_len_real: t_real,
        walk_len,
        log2_vertex_count: log2_n,
        average_degree,
        degree_requirement,
        walk_precondition,
        delta_condition,
        walk_len_sensitivity,
        density,
        suggested_ell: suggested_ell(k, rho, density, cfg.ell_constant),
        ell_below_sqrt_n: (ell * ell) as f64 <= n as f64,
        feasible_paper: feasible_desk
            && walk_len >= 1
            && degree_requirement.holds
            && walk_precondition.holds
            && delta_condition,
        feasible_desk,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub profile: Profile,
    pub params: DerivedParams,
    pub feasible: bool,
}

pub fn check_feasibility(
    n: usize,
    k: usize,
    m: usize,
    ell: usize,
    rho: f64,
    profile: Profile,
    cfg: &TheoremConfig,
) -> Result<Feasibility> {
    let params = derive_theorem_params(n, k, m, ell, rho, cfg)?;
    let feasible = match profile {
        Profile::Paper => params.feasible_paper,
        Profile::Desk => params.feasible_desk,
    };
    Ok(Feasibility {
        profile,
        params,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_examples() {
        assert_eq!(theorem_epsilon(1.0, 16), 0.0);
        assert_eq!(theorem_epsilon(0.5, 16), 2.5);
        let p = derive_theorem_params(40, 16, 100, 16, 0.5, &TheoremConfig::default()).unwrap();
        assert_eq!(p.epsilon, 2.5);
    }

    #[test]
    fn rho_one_is_infeasible() {
        let p = derive_theorem_params(40, 16, 100, 16, 1.0, &TheoremConfig::default()).unwrap();
        assert_eq!(p.epsilon, 0.0);
        assert_eq!(p.walk_len, 0);
        assert!(!p.feasible_paper);
        assert!(!p.degree_requirement.holds);
        assert_eq!(p.degree_requirement.log2_gap, f64::NEG_INFINITY);
    }

    #[test]
    fn ell_clamps_at_k() {
        assert_eq!(suggested_ell(16, 1.0, 0.1, 2.0), 16);
        assert_eq!(suggested_ell(4, 1.0, 1e-9, 2.0), 4);
        // Huge density drives the main factor to zero.
        assert_eq!(suggested_ell(6, 0.5, 1e300, 2.0), 6);
        // Sparse instances push ℓ above k.
        assert!(suggested_ell(4, 0.5, 1e-6, 2.0) > 4);
    }

    #[test]
    fn suggested_ell_arithmetic() {
        // k = 4: exponent 1, C(4,2) = 6, so ℓ = ⌈(2·ln2/ln4)·(6ρ²)^{-1}/δ'⌉.
        let (rho, density) = (0.5f64, 0.001f64);
        let expect = ((2.0 * 2f64.ln() / 4f64.ln()) / (6.0 * rho * rho) / density).ceil() as usize;
        assert_eq!(suggested_ell(4, rho, density, 2.0), expect);
        assert_eq!(expect, 667);
    }

    #[test]
    fn walk_length_formula() {
        let cfg = TheoremConfig::default();
        let p = derive_theorem_params(30, 4, 1000, 3, 0.5, &cfg).unwrap();
        let n = 4060f64; // C(30, 3)
        let expect = 0.4 * p.epsilon * n.log2() / (10.0 * 2f64.powi(40) * 16.0).log2();
        assert!((p.walk_len_real - expect).abs() < 1e-12);
        assert_eq!(p.walk_len, expect.floor() as usize);
        let fourth = TheoremConfig {
            rho_term: RhoTerm::RhoFourth,
            ..cfg
        };
        let q = derive_theorem_params(30, 4, 1000, 3, 0.5, &fourth).unwrap();
        // At ρ = 1/2 both terms equal 16.
        assert!((q.walk_len_real - p.walk_len_real).abs() < 1e-12);
        let q = derive_theorem_params(30, 4, 1000, 3, 0.25, &fourth).unwrap();
        let p = derive_theorem_params(30, 4, 1000, 3, 0.25, &cfg).unwrap();
        assert!(q.walk_len_real < p.walk_len_real);
    }

    #[test]
    fn degree_requirement_in_log_space() {
        let cfg = TheoremConfig::default();
        let p = derive_theorem_params(30, 4, 1000, 3, 0.5, &cfg).unwrap();
        let eps = p.epsilon;
        let direct = 120.0 * eps * (10.0 * 2f64.powi(40) * 16.0f64).powf(10.0 / eps) * 4060f64.log2();
        assert!((p.degree_requirement.log2_rhs - direct.log2()).abs() < 1e-9);
        assert!(!p.degree_requirement.holds);
        assert!(p.degree_requirement.log2_gap < 0.0);
        assert!(!p.feasible_paper);
        assert!(p.feasible_desk);
    }

    #[test]
    fn empty_hypergraph_is_infeasible_everywhere() {
        let p = derive_theorem_params(20, 4, 0, 2, 0.5, &TheoremConfig::default()).unwrap();
        assert_eq!(p.average_degree, 0.0);
        assert!(!p.feasible_paper && !p.feasible_desk);
        for profile in [Profile::Paper, Profile::Desk] {
            assert!(
                !check_feasibility(20, 4, 0, 2, 0.5, profile, &TheoremConfig::default())
                    .unwrap()
                    .feasible
            );
        }
    }

    #[test]
    fn argument_checks() {
        let cfg = TheoremConfig::default();
        assert!(derive_theorem_params(20, 5, 10, 3, 0.5, &cfg).is_err());
        assert!(derive_theorem_params(20, 4, 10, 3, 0.0, &cfg).is_err());
        assert!(derive_theorem_params(20, 4, 10, 1, 0.5, &cfg).is_err());
        let bad = TheoremConfig { c_anti: 1.1, ..cfg };
        assert!(derive_theorem_params(20, 4, 10, 3, 0.5, &bad).is_err());
    }
}
