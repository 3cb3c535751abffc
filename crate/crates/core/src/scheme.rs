//! Regime-dependent parameter design and the aligned transmit signals.
//!
//! Each user splits its message into a common symbol `v_c` and (when `α < 1`)
//! a private symbol `v_p` sent `2^{-m_cross}` below it. The helper sends a
//! jamming symbol `u3` drawn from the same constellation as the common
//! symbols, precoded so that at each receiver it lands on exactly the same
//! coefficient as the other user's common symbol.

use std::fmt;

use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::channel::{ChannelGains, StrengthConfig, Tx};
use crate::constellation::{make_pam, PamSet, PamSymbol, SumSet};
use crate::error::{Error, Result};
use crate::ratio::{self, format_rational};

/// Largest admissible amplitude constant, `1/(8√2)`.
pub const GAMMA_MAX: f64 = std::f64::consts::SQRT_2 / 16.0;

/// Default amplitude constant.
pub const DEFAULT_GAMMA: f64 = GAMMA_MAX;

/// α-regimes of the parameter table. Boundary values belong to the higher regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `0 ≤ α ≤ 1/2`: no helper is needed; only the GDoF value is modelled.
    NoHelper,
    /// `1/2 < α < 2/3`: successive decoding, private symbols present.
    Low,
    /// `2/3 ≤ α < 1`: joint decoding, private symbols present.
    Mid,
    /// `1 ≤ α < 2`: joint decoding, common symbols only.
    High,
    /// `α ≥ 2`: successive decoding, common symbols only.
    Top,
}

impl Regime {
    pub fn of(alpha: Rational64) -> Regime {
        let r = Rational64::new;
        if alpha <= r(1, 2) {
            Regime::NoHelper
        } else if alpha < r(2, 3) {
            Regime::Low
        } else if alpha < r(1, 1) {
            Regime::Mid
        } else if alpha < r(2, 1) {
            Regime::High
        } else {
            Regime::Top
        }
    }

    pub fn has_private(self) -> bool {
        matches!(self, Regime::Low | Regime::Mid)
    }

    pub fn is_joint(self) -> bool {
        matches!(self, Regime::Mid | Regime::High)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::NoHelper => "no-helper",
            Regime::Low => "low",
            Regime::Mid => "mid",
            Regime::High => "high",
            Regime::Top => "top",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A power exponent `β` in `√(P^{−β})`; `Infinite` means the symbol is not sent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerExponent {
    Finite(Rational64),
    Infinite,
}

impl Serialize for PowerExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PowerExponent::Finite(r) => s.serialize_str(&format_rational(r)),
            PowerExponent::Infinite => s.serialize_str("inf"),
        }
    }
}

/// One row of the parameter table for a given `α` and `ε`.
///
/// `λ` exponents are exact rationals; a symbol with `β = ∞` has `λ = 0` and is
/// omitted from the transmit sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeParams {
    pub regime: Regime,
    #[serde(with = "ratio::serde_str")]
    pub alpha: Rational64,
    #[serde(with = "ratio::serde_str")]
    pub epsilon: Rational64,
    pub gamma: f64,
    pub beta_c: PowerExponent,
    pub beta_p: PowerExponent,
    pub beta_u: PowerExponent,
    #[serde(with = "ratio::serde_str")]
    pub lambda_c: Rational64,
    #[serde(with = "ratio::serde_str")]
    pub lambda_p: Rational64,
    #[serde(with = "ratio::serde_str")]
    pub lambda_u: Rational64,
}

/// Parameter table lookup.
pub fn params_for(alpha: Rational64, epsilon: Rational64, gamma: f64) -> Result<RegimeParams> {
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    let two = Rational64::from_integer(2);
    if alpha < zero {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {}", format_rational(&alpha))));
    }
    if epsilon <= zero {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", format_rational(&epsilon))));
    }
    if !(gamma > 0.0 && gamma <= GAMMA_MAX) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1/(8*sqrt(2))], got {gamma}")));
    }
    let regime = Regime::of(alpha);
    let (lambda_c, lambda_p) = match regime {
        Regime::NoHelper => return Err(Error::NoHelperRegime { alpha: format_rational(&alpha) }),
        Regime::Low => (two * alpha - one - epsilon, one - alpha - epsilon),
        Regime::Mid => (alpha / two - epsilon, one - alpha - epsilon),
        Regime::High => (alpha / two - epsilon, zero),
        Regime::Top => (one - epsilon, zero),
    };
    let check = |symbol: &'static str, value: Rational64| {
        if value <= zero {
            Err(Error::NegativeLambda {
                regime: regime.name().into(),
                epsilon: format_rational(&epsilon),
                symbol,
                value: format_rational(&value),
            })
        } else {
            Ok(())
        }
    };
    check("c", lambda_c)?;
    if regime.has_private() {
        check("p", lambda_p)?;
    }
    let finite = PowerExponent::Finite;
    Ok(RegimeParams {
        regime,
        alpha,
        epsilon,
        gamma,
        beta_c: finite(zero),
        beta_p: if regime.has_private() { finite(alpha) } else { PowerExponent::Infinite },
        beta_u: finite(zero),
        lambda_c,
        lambda_p,
        lambda_u: lambda_c,
    })
}

/// Parameters bound to a concrete strength configuration, with the
/// constellations they induce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Design {
    pub params: RegimeParams,
    pub cfg: StrengthConfig,
    /// `Ω(2γ/Q_c, Q_c)` for `v_{1,c}` and `v_{2,c}`.
    pub common: PamSet,
    /// Same law as `common`; kept separate for bookkeeping.
    pub jamming: PamSet,
    /// `Ω(γ/Q_p, Q_p)`, absent when `α ≥ 1`.
    pub private: Option<PamSet>,
    /// `√(P^{−β_p}) = 2^{−m_cross}`; zero when there is no private symbol.
    pub private_scale: f64,
}

impl Design {
    pub fn new(params: RegimeParams, cfg: StrengthConfig) -> Result<Self> {
        if cfg.alpha() != params.alpha {
            return Err(Error::InvalidParameter(format!(
                "strength configuration has alpha = {}, parameters were built for {}",
                format_rational(&cfg.alpha()),
                format_rational(&params.alpha)
            )));
        }
        let p = cfg.p();
        let gamma = params.gamma;
        let common = make_pam(2.0 * gamma, ratio::to_f64(&params.lambda_c), p)?;
        let jamming = make_pam(2.0 * gamma, ratio::to_f64(&params.lambda_u), p)?;
        let (private, private_scale) = if params.regime.has_private() {
            let set = make_pam(gamma, ratio::to_f64(&params.lambda_p), p)?;
            (Some(set), (-(cfg.m_cross as f64)).exp2())
        } else {
            (None, 0.0)
        };
        Ok(Self { params, cfg, common, jamming, private, private_scale })
    }

    /// Convenience constructor from `(α, m_direct, ε, γ)`.
    pub fn build(alpha: Rational64, m_direct: u32, epsilon: Rational64, gamma: f64) -> Result<Self> {
        let cfg = StrengthConfig::from_alpha(alpha, m_direct)?;
        Self::new(params_for(alpha, epsilon, gamma)?, cfg)
    }

    pub fn regime(&self) -> Regime {
        self.params.regime
    }

    /// Support of `v_{ℓ,c} + u3`.
    pub fn sum_set(&self) -> SumSet {
        self.common.sum_set()
    }
}

/// One channel use: the drawn symbols and the three channel inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TxBundle {
    pub v1c: PamSymbol,
    pub v1p: Option<PamSymbol>,
    pub v2c: PamSymbol,
    pub v2p: Option<PamSymbol>,
    pub u3: PamSymbol,
    pub x: [f64; 3],
}

impl TxBundle {
    /// Forms `x1 = h23·h12·(v1c + 2^{−m_c}·v1p)`, `x2 = h13·h21·(v2c + 2^{−m_c}·v2p)`
    /// and `x3 = h12·h21·u3`.
    pub fn assemble(
        design: &Design,
        gains: &ChannelGains,
        v1c: PamSymbol,
        v1p: Option<PamSymbol>,
        v2c: PamSymbol,
        v2p: Option<PamSymbol>,
        u3: PamSymbol,
    ) -> Self {
        let layer = |c: PamSymbol, p: Option<PamSymbol>| c.value + p.map_or(0.0, |p| design.private_scale * p.value);
        let x = [
            gains.precoder(Tx::One) * layer(v1c, v1p),
            gains.precoder(Tx::Two) * layer(v2c, v2p),
            gains.precoder(Tx::Helper) * u3.value,
        ];
        Self { v1c, v1p, v2c, v2p, u3, x }
    }

    /// Common symbol of user `k` (0 or 1).
    pub fn common(&self, user: usize) -> PamSymbol {
        if user == 0 {
            self.v1c
        } else {
            self.v2c
        }
    }

    pub fn private(&self, user: usize) -> Option<PamSymbol> {
        if user == 0 {
            self.v1p
        } else {
            self.v2p
        }
    }
}

/// Draws every active symbol uniformly and assembles the channel inputs.
///
/// Draw order is fixed (`v1c, v1p, v2c, v2p, u3`) so a seeded source
/// reproduces the bundle exactly.
pub fn encode<R: Rng + ?Sized>(design: &Design, gains: &ChannelGains, rng: &mut R) -> TxBundle {
    let v1c = design.common.sample(rng);
    let v1p = design.private.map(|s| s.sample(rng));
    let v2c = design.common.sample(rng);
    let v2p = design.private.map(|s| s.sample(rng));
    let u3 = design.jamming.sample(rng);
    TxBundle::assemble(design, gains, v1c, v1p, v2c, v2p, u3)
}

/// Exact `E|x_k|²` for the three inputs, failing if any exceeds 1.
pub fn verify_power(design: &Design, gains: &ChannelGains) -> Result<[f64; 3]> {
    let private_energy = design.private.map_or(0.0, |s| design.private_scale.powi(2) * s.second_moment());
    let user = design.common.second_moment() + private_energy;
    let powers = [
        gains.precoder(Tx::One).powi(2) * user,
        gains.precoder(Tx::Two).powi(2) * user,
        gains.precoder(Tx::Helper).powi(2) * design.jamming.second_moment(),
    ];
    for (value, input) in powers.iter().zip(["x1", "x2", "x3"]) {
        if *value > 1.0 {
            return Err(Error::PowerViolation { regime: design.regime().name().into(), input, value: *value });
        }
    }
    Ok(powers)
}

/// `160γ²/3`, the worst-case bound on `E|x_k|²` for the regimes with private
/// symbols (`h ≡ 2`, `Q = 1`).
pub fn worst_case_power_bound(gamma: f64) -> f64 {
    160.0 * gamma * gamma / 3.0
}
