//! Closed-form secure sum GDoF, leakage constants and the finite-P rate
//! accounting that turns measured error rates into certified GDoF estimates.

use num_rational::Rational64;
use serde::Serialize;

use crate::channel::Rx;
use crate::constellation::sum_entropy_bits;
use crate::decoder::{simulate_errors, GainSource};
use crate::error::Result;
use crate::ratio;
use crate::scheme::{Design, Regime, RegimeParams};

/// Secure sum GDoF of the symmetric channel with a helper:
/// `2(1−α)` on `[0, 1/2]`, `2α` on `[1/2, 2/3]`, `2(1−α/2)` on `[2/3, 1]`,
/// `α` on `[1, 2]` and `2` beyond.
pub fn gdof_theorem(alpha: Rational64) -> Rational64 {
    let r = Rational64::new;
    let two = r(2, 1);
    if alpha <= r(1, 2) {
        two * (r(1, 1) - alpha)
    } else if alpha <= r(2, 3) {
        two * alpha
    } else if alpha <= r(1, 1) {
        two * (r(1, 1) - alpha / two)
    } else if alpha <= two {
        alpha
    } else {
        two
    }
}

pub fn gdof_theorem_f64(alpha: Rational64) -> f64 {
    ratio::to_f64(&gdof_theorem(alpha))
}

/// Sum GDoF carried by the constellations, `2·(λ_c + λ_p)`.
pub fn design_gdof(params: &RegimeParams) -> Rational64 {
    Rational64::from_integer(2) * (params.lambda_c + params.lambda_p)
}

/// Multiple of `ε` by which [`design_gdof`] falls short of the theorem.
pub fn design_gap_multiple(regime: Regime) -> i64 {
    match regime {
        Regime::Low | Regime::Mid => 4,
        Regime::High | Regime::Top => 2,
        Regime::NoHelper => 0,
    }
}

/// Constant bound on the information one user's symbol leaks to the other
/// receiver: `log2(2√65)` with private symbols, 1 bit without.
pub fn leakage_upper_bound(regime: Regime) -> f64 {
    if regime.has_private() {
        1.0 + 0.5 * 65f64.log2()
    } else {
        1.0
    }
}

/// `H(v_c + u3) − H(u3)` in bits for the design's aligned constellations.
pub fn leakage_discrete_exact(design: &Design) -> Result<f64> {
    Ok(sum_entropy_bits(&design.common, &design.jamming)? - design.jamming.entropy_bits())
}

/// `max(0, (1 − pe)·H(v) − 1 − leak)`, a per-user achievable secure rate.
pub fn rate_lower_bound(h_v_bits: f64, pe: f64, leak_bits: f64) -> f64 {
    ((1.0 - pe) * h_v_bits - 1.0 - leak_bits).max(0.0)
}

/// `H(v) = H(v_c) + H(v_p)`.
pub fn user_entropy_bits(design: &Design) -> f64 {
    design.common.entropy_bits() + design.private.map_or(0.0, |s| s.entropy_bits())
}

/// One point of a GDoF sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdofPoint {
    #[serde(with = "ratio::serde_str")]
    pub alpha: Rational64,
    pub m_direct: u32,
    pub regime: Regime,
    pub d_theory: f64,
    pub d_design: f64,
    pub d_empirical: f64,
    pub pe_user1: f64,
    pub pe_user2: f64,
    pub h_v_bits: f64,
    pub leak_bits: f64,
    pub leak_exact_bits: f64,
    pub rate_user1: f64,
    pub rate_user2: f64,
    pub n_trials: u64,
    pub degenerate_trials: u64,
}

/// Runs `n_trials` encode, channel, decode rounds and converts the measured
/// per-user error rates into `d_empirical = (R1 + R2)/(½·log2 P)`.
pub fn empirical_gdof(design: &Design, gains: GainSource, n_trials: u64, seed: u64) -> Result<GdofPoint> {
    let counts = simulate_errors(design, gains, n_trials, seed);
    let regime = design.regime();
    let h_v = user_entropy_bits(design);
    let leak = leakage_upper_bound(regime);
    let pe = [counts.pe_own(Rx::One), counts.pe_own(Rx::Two)];
    let rates = pe.map(|p| rate_lower_bound(h_v, p, leak));
    Ok(GdofPoint {
        alpha: design.params.alpha,
        m_direct: design.cfg.m_direct,
        regime,
        d_theory: gdof_theorem_f64(design.params.alpha),
        d_design: ratio::to_f64(&design_gdof(&design.params)),
        d_empirical: (rates[0] + rates[1]) / design.cfg.half_log2_p(),
        pe_user1: pe[0],
        pe_user2: pe[1],
        h_v_bits: h_v,
        leak_bits: leak,
        leak_exact_bits: leakage_discrete_exact(design)?,
        rate_user1: rates[0],
        rate_user2: rates[1],
        n_trials,
        degenerate_trials: counts.rx[0].degenerate + counts.rx[1].degenerate,
    })
}
