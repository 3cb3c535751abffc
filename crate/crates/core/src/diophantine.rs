//! Minimum distance of the two-term integer form `a0·g0·q0 + a1·g1·q1` and
//! the measure of channel gains for which it is small.
//!
//! The threshold `β` of the measure bound is unrelated to the power exponents
//! of the scheme; it is called `threshold` here.

use num_rational::Rational64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{sample_gains, Rx, StrengthConfig};
use crate::decoder::JointForm;
use crate::error::{Error, Result};
use crate::ratio;
use crate::rng;
use crate::scheme::{Design, Regime};

/// Upper end of the gain-product interval `(1, τ]` used by the scheme.
pub const SCHEME_TAU: u32 = 8;

/// Constant of the outage measure bound.
pub const OUTAGE_CONSTANT: f64 = 1792.0;

/// Parameters of the measure bound on
/// `B = {(g0, g1) ∈ (1, τ]² : ∃ (q0, q1) ≠ 0, |a0·g0·q0 + a1·g1·q1| < threshold}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFormSpec {
    pub a0: u64,
    pub a1: u64,
    pub q0_max: u64,
    pub q1_max: u64,
    pub threshold: f64,
    pub tau: u32,
}

impl LinearFormSpec {
    pub fn new(a0: u64, a1: u64, q0_max: u64, q1_max: u64, threshold: f64, tau: u32) -> Result<Self> {
        if a0 == 0 || a1 == 0 || q0_max == 0 || q1_max == 0 {
            return Err(Error::InvalidParameter("a0, a1, q0_max and q1_max must be positive integers".into()));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!("threshold must lie in (0, 1], got {threshold}")));
        }
        if tau < 2 {
            return Err(Error::InvalidParameter(format!("tau must be at least 2, got {tau}")));
        }
        Ok(Self { a0, a1, q0_max, q1_max, threshold, tau })
    }

    /// Same form with the roles of `(a0, q0_max)` and `(a1, q1_max)` exchanged.
    pub fn swapped(&self) -> Self {
        Self { a0: self.a1, a1: self.a0, q0_max: self.q1_max, q1_max: self.q0_max, ..*self }
    }
}

/// `min |a0·g0·Δ0 + a1·g1·Δ1|` over `(Δ0, Δ1) ≠ 0`, `|Δ0| ≤ 2·q0_max`,
/// `|Δ1| ≤ 2·q1_max`.
///
/// `Δ` and `−Δ` give the same value, so `Δ0 ≥ 0`; for each `Δ0` the value is
/// convex in `Δ1` and only the two lattice points around the real minimizer
/// can attain it.
pub fn min_distance(g0: f64, g1: f64, a0: u64, a1: u64, q0_max: u64, q1_max: u64) -> f64 {
    let c0 = a0 as f64 * g0;
    let c1 = a1 as f64 * g1;
    let d1_max = 2 * q1_max as i64;
    // Δ0 = 0 forces Δ1 ≠ 0, best at |Δ1| = 1.
    let mut best = c1;
    for d0 in 1..=2 * q0_max as i64 {
        let base = c0 * d0 as f64;
        let fl = (-base / c1).floor().clamp(-(d1_max as f64) - 1.0, d1_max as f64) as i64;
        for k in [fl, fl + 1] {
            let d1 = k.clamp(-d1_max, d1_max);
            let v = (base + c1 * d1 as f64).abs();
            if v < best {
                best = v;
            }
        }
    }
    best
}

/// `8(τ−1)·threshold·min{Q1Q0/A1, Q0Q1/A0, Q0τ/A1, Q1τ/A0}`.
pub fn lemma1_bound(spec: &LinearFormSpec) -> f64 {
    let (a0, a1) = (spec.a0 as f64, spec.a1 as f64);
    let (q0, q1) = (spec.q0_max as f64, spec.q1_max as f64);
    let tau = spec.tau as f64;
    let m = (q1 * q0 / a1).min(q0 * q1 / a0).min(q0 * tau / a1).min(q1 * tau / a0);
    8.0 * (tau - 1.0) * spec.threshold * m
}

/// Cell-centre estimate of the measure of `B` on a `grid_n × grid_n` grid.
///
/// A point is in `B` when some `|q0| ≤ Q0`, `|q1| ≤ Q1`, not both zero, has
/// `|a0·g0·q0 + a1·g1·q1| < threshold`. With `g1 > 1` and `threshold ≤ 1`,
/// `q0 = 0` never qualifies, and `q0 < 0` mirrors `q0 > 0`.
pub fn measure_b_grid(spec: &LinearFormSpec, grid_n: usize) -> f64 {
    let span = spec.tau as f64 - 1.0;
    let h = span / grid_n as f64;
    let q1_max = spec.q1_max as i64;
    let hits: u64 = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let g0 = 1.0 + (i as f64 + 0.5) * h;
            let c0 = spec.a0 as f64 * g0;
            (0..grid_n)
                .filter(|&j| {
                    let g1 = 1.0 + (j as f64 + 0.5) * h;
                    let c1 = spec.a1 as f64 * g1;
                    (1..=spec.q0_max as i64).any(|q0| {
                        let t = -c0 * q0 as f64 / c1;
                        let q1 = t.round().clamp(-(q1_max as f64), q1_max as f64);
                        (c0 * q0 as f64 + c1 * q1).abs() < spec.threshold
                    })
                })
                .count() as u64
        })
        .sum();
    hits as f64 / (grid_n * grid_n) as f64 * span * span
}

/// `δ·P^{−(3α/2−1)/2}` for `Mid` and `δ·P^{−(1−α/2)/2}` for `High`.
pub fn outage_threshold(regime: Regime, alpha: Rational64, delta: f64, cfg: &StrengthConfig) -> Result<f64> {
    let one = Rational64::from_integer(1);
    let half = Rational64::new(1, 2);
    let exponent = match regime {
        Regime::Mid => Rational64::new(3, 2) * alpha - one,
        Regime::High => one - half * alpha,
        other => return Err(Error::NotJointRegime { regime: other.name().into() }),
    };
    // P^{−e/2} = 2^{−m_direct·e}
    let power = -exponent * Rational64::from_integer(cfg.m_direct as i64);
    Ok(delta * ratio::exp2(&power))
}

/// Empirical measure of the outage set on the unit-volume gain cube, next to
/// its analytic bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageReport {
    pub regime: Regime,
    #[serde(with = "ratio::serde_str")]
    pub alpha: Rational64,
    pub m_direct: u32,
    pub delta: f64,
    pub epsilon: f64,
    pub threshold: f64,
    pub n_samples: u64,
    pub n_outage: u64,
    pub empirical_fraction: f64,
    /// Binomial standard error of `empirical_fraction`.
    pub std_error: f64,
    /// `1792·δ·P^{−ε/2}`, clamped to 1.
    pub analytic_bound: f64,
    /// The unclamped bound was at least 1.
    pub vacuous_bound: bool,
}

/// `1792·δ·P^{−ε/2}` before clamping.
pub fn outage_bound_raw(delta: f64, epsilon: Rational64, cfg: &StrengthConfig) -> f64 {
    OUTAGE_CONSTANT * delta * (-(cfg.m_direct as f64) * ratio::to_f64(&epsilon)).exp2()
}

/// Samples gains uniformly on `(1, 2]^{2×3}` and counts those whose receiver-1
/// minimum distance falls below the outage threshold.
pub fn outage_fraction_mc(design: &Design, delta: f64, n_samples: u64, seed: u64) -> Result<OutageReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    let form = JointForm::of(design)?;
    let params = &design.params;
    let threshold = outage_threshold(design.regime(), params.alpha, delta, &design.cfg)?;
    let n_outage: u64 = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let g = sample_gains(&mut rng::stream(seed, i)).receiver(Rx::One);
            let d = min_distance(g.direct, g.cross, form.a0, form.a1, form.q0_max, form.q1_max);
            (d < threshold) as u64
        })
        .sum();
    let fraction = n_outage as f64 / n_samples as f64;
    let raw = outage_bound_raw(delta, params.epsilon, &design.cfg);
    Ok(OutageReport {
        regime: design.regime(),
        alpha: params.alpha,
        m_direct: design.cfg.m_direct,
        delta,
        epsilon: ratio::to_f64(&params.epsilon),
        threshold,
        n_samples,
        n_outage,
        empirical_fraction: fraction,
        std_error: (fraction * (1.0 - fraction) / n_samples as f64).sqrt(),
        analytic_bound: raw.min(1.0),
        vacuous_bound: raw >= 1.0,
    })
}

/// A random spec for exploration: small integer coefficients and ranges.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, tau: u32) -> LinearFormSpec {
    let a0 = 1u64 << rng.random_range(0..4);
    let a1 = 1u64 << rng.random_range(0..3);
    let q0_max = rng.random_range(1..=12);
    let q1_max = rng.random_range(1..=24);
    let threshold = 10f64.powf(rng.random_range(-4.0..-1.0));
    LinearFormSpec { a0, a1, q0_max, q1_max, threshold, tau }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::DEFAULT_GAMMA;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    /// Enumerates every difference pair in a different loop order.
    fn brute_force_min(g0: f64, g1: f64, a0: u64, a1: u64, q0: u64, q1: u64) -> f64 {
        let (c0, c1) = (a0 as f64 * g0, a1 as f64 * g1);
        let mut best = f64::INFINITY;
        for d1 in -2 * q1 as i64..=2 * q1 as i64 {
            for d0 in (-2 * q0 as i64..=2 * q0 as i64).rev() {
                if d0 == 0 && d1 == 0 {
                    continue;
                }
                // Written as |c0·|Δ0| ± c1·Δ1| to match the sign-folded evaluation.
                let (s0, s1) = if d0 < 0 { (-d0, -d1) } else { (d0, d1) };
                let v = (c0 * s0 as f64 + c1 * s1 as f64).abs();
                best = best.min(v);
            }
        }
        best
    }

    #[test]
    fn rational_dependence_gives_zero() {
        assert_eq!(min_distance(3.375, 3.375, 4, 1, 5, 10), 0.0);
        for q in [1, 3, 9] {
            assert_eq!(min_distance(1.7, 1.7, 1, 1, q, q), 0.0);
        }
        // a0·g0 / (a1·g1) = 3/5 within range
        assert_eq!(min_distance(1.5, 5.0, 2, 1, 3, 2), 0.0);
    }

    #[test]
    fn generic_instance_matches_enumeration() {
        let fast = min_distance(3.375, 1.98, 4, 1, 5, 10);
        assert_eq!(fast, brute_force_min(3.375, 1.98, 4, 1, 5, 10));
        assert!(fast > 0.0);
    }

    proptest! {
        #[test]
        fn min_distance_equals_enumeration(
            g0 in 1.0f64..8.0, g1 in 1.0f64..8.0,
            a0 in 1u64..9, a1 in 1u64..9,
            q0 in 1u64..12, q1 in 1u64..24,
        ) {
            prop_assert_eq!(min_distance(g0, g1, a0, a1, q0, q1), brute_force_min(g0, g1, a0, a1, q0, q1));
        }

        #[test]
        fn lemma1_bound_is_symmetric(a0 in 1u64..16, a1 in 1u64..16, q0 in 1u64..50, q1 in 1u64..50, t in 0.001f64..1.0) {
            let s = LinearFormSpec::new(a0, a1, q0, q1, t, 8).unwrap();
            prop_assert_eq!(lemma1_bound(&s), lemma1_bound(&s.swapped()));
        }
    }

    #[test]
    fn lemma1_example() {
        let s = LinearFormSpec::new(4, 1, 2, 4, 0.1, 8).unwrap();
        assert!((lemma1_bound(&s) - 11.2).abs() < 1e-12);
        let tiny = LinearFormSpec { threshold: 1e-12, ..s };
        assert!(lemma1_bound(&tiny) < 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(LinearFormSpec::new(0, 1, 1, 1, 0.5, 8).is_err());
        assert!(LinearFormSpec::new(1, 1, 1, 1, 1.5, 8).is_err());
        assert!(LinearFormSpec::new(1, 1, 1, 1, 0.5, 1).is_err());
    }

    #[test]
    fn single_strip_area() {
        let tau = 8u32;
        let s = LinearFormSpec::new(1, 1, 1, 1, 1.0, tau).unwrap();
        let est = measure_b_grid(&s, 2000);
        let t = tau as f64;
        let exact = (t - 1.0).powi(2) - (t - 2.0).powi(2);
        assert!((est - exact).abs() <= 0.05 * exact, "{est} vs {exact}");
    }

    #[test]
    fn tiny_threshold_only_hits_exact_rational_lines() {
        // Cell centers are rational, so some fall exactly on the null lines
        // A0·g0·q0 = −A1·g1·q1. Those hits do not depend on β; nothing else remains.
        let tiny = LinearFormSpec::new(4, 1, 5, 10, 1e-9, 8).unwrap();
        let tinier = LinearFormSpec::new(4, 1, 5, 10, 1e-13, 8).unwrap();
        let a = measure_b_grid(&tiny, 200);
        assert_eq!(a, measure_b_grid(&tinier, 200));
        assert!(a < 0.01 * 49.0);
        let irrational = LinearFormSpec::new(3, 1, 1, 1, 1e-9, 2).unwrap();
        assert_eq!(measure_b_grid(&irrational, 100), 0.0);
    }

    #[test]
    fn thresholds() {
        let cfg = StrengthConfig::new(6, 4).unwrap();
        assert_eq!(outage_threshold(Regime::Mid, r(2, 3), 0.3, &cfg).unwrap(), 0.3);
        let cfg = StrengthConfig::new(8, 6).unwrap();
        let t = outage_threshold(Regime::Mid, r(3, 4), 1e-4, &cfg).unwrap();
        assert!((t - 5e-5).abs() < 1e-18);
        let cfg = StrengthConfig::new(4, 8).unwrap();
        assert_eq!(outage_threshold(Regime::High, r(2, 1), 0.25, &cfg).unwrap(), 0.25);
        assert!(outage_threshold(Regime::Low, r(3, 5), 0.1, &cfg).is_err());
    }

    #[test]
    fn outage_report_fields() {
        let d = Design::build(r(3, 4), 8, r(1, 10), DEFAULT_GAMMA).unwrap();
        let rep = outage_fraction_mc(&d, 1e-4, 500, 3).unwrap();
        assert!((rep.analytic_bound - 1792.0 * 1e-4 * 2f64.powf(-0.8)).abs() < 1e-12);
        assert!((rep.analytic_bound - 0.1029).abs() < 1e-3);
        assert!(!rep.vacuous_bound);
        assert!((0.0..=1.0).contains(&rep.empirical_fraction));

        let vac = outage_fraction_mc(&d, 0.9, 200, 3).unwrap();
        assert!(vac.vacuous_bound);
        assert_eq!(vac.analytic_bound, 1.0);

        let none = outage_fraction_mc(&d, 1e-300, 500, 3).unwrap();
        assert_eq!(none.n_outage, 0);
    }
}
