//! Symmetric two-user Gaussian interference channel with a helper.
//!
//! Link strengths are powers of two, `√(P^{α_kℓ}) = 2^{m_kℓ}`, so every scale
//! factor in the gain path is an exact float and `α = m_cross / m_direct` is a
//! rational number.

use num_rational::Rational64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio;

/// Power-of-two exponents of the direct and cross links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrengthConfig {
    pub m_direct: u32,
    pub m_cross: u32,
}

impl StrengthConfig {
    pub fn new(m_direct: u32, m_cross: u32) -> Result<Self> {
        if m_direct == 0 {
            return Err(Error::InvalidStrength("m_direct must be a positive integer".into()));
        }
        if m_direct > 500 || m_cross > 500 {
            return Err(Error::InvalidStrength(format!(
                "exponents ({m_direct}, {m_cross}) overflow double precision"
            )));
        }
        Ok(Self { m_direct, m_cross })
    }

    /// The configuration with `m_cross = α·m_direct`, if that is an integer.
    pub fn from_alpha(alpha: Rational64, m_direct: u32) -> Result<Self> {
        if alpha < Rational64::from_integer(0) {
            return Err(Error::InvalidStrength(format!("alpha must be non-negative, got {alpha}")));
        }
        let m_cross = alpha * Rational64::from_integer(m_direct as i64);
        if !m_cross.is_integer() {
            return Err(Error::UnrepresentableAlpha {
                alpha: ratio::format_rational(&alpha),
                m_direct,
                nearest: nearest_feasible_m(alpha, m_direct),
            });
        }
        Self::new(m_direct, m_cross.to_integer() as u32)
    }

    /// `α = m_cross / m_direct` in lowest terms.
    pub fn alpha(&self) -> Rational64 {
        Rational64::new(self.m_cross as i64, self.m_direct as i64)
    }

    /// `P = 2^{2·m_direct}`.
    pub fn p(&self) -> f64 {
        (2.0 * self.m_direct as f64).exp2()
    }

    /// `½·log2 P`, the GDoF normaliser.
    pub fn half_log2_p(&self) -> f64 {
        self.m_direct as f64
    }

    /// `√P = 2^{m_direct}`.
    pub fn direct_amplitude(&self) -> f64 {
        (self.m_direct as f64).exp2()
    }

    /// `√(P^α) = 2^{m_cross}`.
    pub fn cross_amplitude(&self) -> f64 {
        (self.m_cross as f64).exp2()
    }

    /// `2^{m_direct − m_cross}`, an integer when `α ≤ 1`.
    pub fn direct_over_cross(&self) -> f64 {
        (self.m_direct as f64 - self.m_cross as f64).exp2()
    }
}

/// Closest `m ≥ 1` for which `α·m` is an integer (ties resolve upward).
pub fn nearest_feasible_m(alpha: Rational64, m_direct: u32) -> u32 {
    let den = *alpha.denom() as u32;
    let lower = (m_direct / den) * den;
    let upper = lower + den;
    if lower == 0 || m_direct - lower >= upper - m_direct {
        upper
    } else {
        lower
    }
}

/// Receiver index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rx {
    One,
    Two,
}

impl Rx {
    pub const BOTH: [Rx; 2] = [Rx::One, Rx::Two];

    pub fn index(self) -> usize {
        match self {
            Rx::One => 0,
            Rx::Two => 1,
        }
    }
}

/// Transmitter index; `Helper` is transmitter 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tx {
    One,
    Two,
    Helper,
}

impl Tx {
    pub fn index(self) -> usize {
        match self {
            Tx::One => 0,
            Tx::Two => 1,
            Tx::Helper => 2,
        }
    }
}

/// Normalized channel coefficients `h_kℓ ∈ (1, 2]`, row = receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    h: [[f64; 3]; 2],
}

/// The two gain products seen by one receiver: `direct` multiplies its own
/// common symbol and `cross` the aligned pair (other user's common symbol plus
/// the jamming symbol).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverGains {
    pub direct: f64,
    pub cross: f64,
}

impl ChannelGains {
    pub fn new(h: [[f64; 3]; 2]) -> Result<Self> {
        for (k, row) in h.iter().enumerate() {
            for (l, &value) in row.iter().enumerate() {
                if !(value > 1.0 && value <= 2.0) {
                    return Err(Error::GainOutOfRange { rx: k + 1, tx: l + 1, value });
                }
            }
        }
        Ok(Self { h })
    }

    /// Every coefficient equal to `value`.
    pub fn uniform(value: f64) -> Result<Self> {
        Self::new([[value; 3]; 2])
    }

    pub fn h(&self, rx: Rx, tx: Tx) -> f64 {
        self.h[rx.index()][tx.index()]
    }

    pub fn as_array(&self) -> [[f64; 3]; 2] {
        self.h
    }

    /// `h_kℓ` with 1-based indices, as written in the channel equations.
    fn at(&self, k: usize, l: usize) -> f64 {
        self.h[k - 1][l - 1]
    }

    /// Precoding factor applied by a transmitter: `h23·h12` for user 1,
    /// `h13·h21` for user 2 and `h12·h21` for the helper.
    pub fn precoder(&self, tx: Tx) -> f64 {
        match tx {
            Tx::One => self.at(2, 3) * self.at(1, 2),
            Tx::Two => self.at(1, 3) * self.at(2, 1),
            Tx::Helper => self.at(1, 2) * self.at(2, 1),
        }
    }

    /// `g0, g1` for a receiver: at receiver 1, `g0 = h11·h23·h12` and
    /// `g1 = h12·h21·h13`; receiver 2 is the mirror image.
    pub fn receiver(&self, rx: Rx) -> ReceiverGains {
        match rx {
            Rx::One => ReceiverGains {
                direct: self.at(1, 1) * self.precoder(Tx::One),
                cross: self.at(1, 2) * self.at(2, 1) * self.at(1, 3),
            },
            Rx::Two => ReceiverGains {
                direct: self.at(2, 2) * self.precoder(Tx::Two),
                cross: self.at(2, 1) * self.at(1, 2) * self.at(2, 3),
            },
        }
    }
}

/// Channel outputs of one channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RxObservation {
    pub y1: f64,
    pub y2: f64,
}

impl RxObservation {
    pub fn at(&self, rx: Rx) -> f64 {
        match rx {
            Rx::One => self.y1,
            Rx::Two => self.y2,
        }
    }
}

/// Each coefficient i.i.d. uniform on `(1, 2]`.
pub fn sample_gains<R: Rng + ?Sized>(rng: &mut R) -> ChannelGains {
    let mut h = [[0.0; 3]; 2];
    for row in h.iter_mut() {
        for v in row.iter_mut() {
            // random::<f64>() is in [0, 1), so 2 - u is in (1, 2].
            *v = 2.0 - rng.random::<f64>();
        }
    }
    ChannelGains { h }
}

/// `y_k = 2^{m_d}·h_kk·x_k + 2^{m_c}·(h_kℓ·x_ℓ + h_k3·x_3) + z_k` with unit
/// Gaussian noise.
pub fn apply_channel<R: Rng + ?Sized>(x: [f64; 3], gains: &ChannelGains, cfg: &StrengthConfig, rng: &mut R) -> RxObservation {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    apply_channel_with_noise(x, gains, cfg, [z1, z2])
}

/// Noiseless mode, used as a deterministic test hook.
pub fn apply_channel_noiseless(x: [f64; 3], gains: &ChannelGains, cfg: &StrengthConfig) -> RxObservation {
    apply_channel_with_noise(x, gains, cfg, [0.0, 0.0])
}

pub fn apply_channel_with_noise(x: [f64; 3], gains: &ChannelGains, cfg: &StrengthConfig, z: [f64; 2]) -> RxObservation {
    let direct = cfg.direct_amplitude();
    let cross = cfg.cross_amplitude();
    let h = |k, l| gains.at(k, l);
    let [x1, x2, x3] = x;
    let y1 = direct * h(1, 1) * x1 + cross * (h(1, 2) * x2 + h(1, 3) * x3) + z[0];
    let y2 = direct * h(2, 2) * x2 + cross * (h(2, 1) * x1 + h(2, 3) * x3) + z[1];
    RxObservation { y1, y2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::{any, prop, prop_assert, proptest};

    #[test]
    fn alpha_is_reduced() {
        assert_eq!(StrengthConfig::new(8, 6).unwrap().alpha(), Rational64::new(3, 4));
        assert_eq!(StrengthConfig::new(8, 0).unwrap().alpha(), Rational64::from_integer(0));
        assert_eq!(StrengthConfig::new(4, 10).unwrap().alpha(), Rational64::new(5, 2));
    }

    #[test]
    fn from_alpha_checks_integrality() {
        let a = Rational64::new(7, 10);
        assert_eq!(StrengthConfig::from_alpha(a, 10).unwrap().m_cross, 7);
        match StrengthConfig::from_alpha(a, 9) {
            Err(Error::UnrepresentableAlpha { nearest, .. }) => assert_eq!(nearest, 10),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(nearest_feasible_m(Rational64::new(3, 4), 5), 4);
        assert_eq!(nearest_feasible_m(Rational64::new(3, 2), 5), 6);
        assert_eq!(nearest_feasible_m(Rational64::new(3, 5), 2), 5);
        assert!(StrengthConfig::new(0, 1).is_err());
    }

    #[test]
    fn amplitudes_are_exact_powers_of_two() {
        let cfg = StrengthConfig::new(8, 6).unwrap();
        assert_eq!(cfg.p(), 65536.0);
        assert_eq!(cfg.direct_amplitude(), 256.0);
        assert_eq!(cfg.cross_amplitude(), 64.0);
        assert_eq!(cfg.direct_over_cross(), 4.0);
    }

    #[test]
    fn gains_validate_range() {
        assert!(ChannelGains::uniform(2.0).is_ok());
        assert!(ChannelGains::uniform(1.0).is_err());
        assert!(ChannelGains::uniform(2.5).is_err());
    }

    #[test]
    fn zero_input_returns_noise() {
        let gains = ChannelGains::uniform(1.5).unwrap();
        let cfg = StrengthConfig::new(8, 6).unwrap();
        let y = apply_channel([0.0; 3], &gains, &cfg, &mut rng::stream(5, 0));
        let mut r = rng::stream(5, 0);
        let z1: f64 = r.sample(StandardNormal);
        let z2: f64 = r.sample(StandardNormal);
        assert_eq!((y.y1, y.y2), (z1, z2));
    }

    #[test]
    fn noiseless_single_input() {
        let mut h = [[1.5; 3]; 2];
        h[0][0] = 2.0;
        let gains = ChannelGains::new(h).unwrap();
        let cfg = StrengthConfig::new(1, 0).unwrap();
        let y = apply_channel_noiseless([1.0, 0.0, 0.0], &gains, &cfg);
        assert_eq!(y.y1, 4.0);
        assert_eq!(y.y2, 1.5);
    }

    #[test]
    fn noise_has_unit_variance() {
        let gains = ChannelGains::uniform(1.5).unwrap();
        let cfg = StrengthConfig::new(4, 3).unwrap();
        let mut r = rng::stream(17, 0);
        let n = 100_000;
        let ys: Vec<f64> = (0..n).map(|_| apply_channel([0.0; 3], &gains, &cfg, &mut r).y1).collect();
        let mean = ys.iter().sum::<f64>() / n as f64;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn sampled_gains_are_uniform_on_the_cube() {
        let mut r = rng::stream(23, 0);
        let n = 100_000;
        let mut sums = [[0.0; 3]; 2];
        for _ in 0..n {
            let g = sample_gains(&mut r);
            for (k, row) in g.as_array().iter().enumerate() {
                for (l, v) in row.iter().enumerate() {
                    assert!(*v > 1.0 && *v <= 2.0);
                    sums[k][l] += v;
                }
            }
        }
        for row in sums {
            for s in row {
                assert!((s / n as f64 - 1.5).abs() < 0.005);
            }
        }
        assert_eq!(sample_gains(&mut rng::stream(1, 2)), sample_gains(&mut rng::stream(1, 2)));
    }

    proptest! {
        #[test]
        fn linear_in_inputs(
            a in prop::array::uniform3(-1.0f64..1.0),
            b in prop::array::uniform3(-1.0f64..1.0),
            seed in any::<u64>(),
        ) {
            let gains = sample_gains(&mut rng::stream(seed, 0));
            let cfg = StrengthConfig::new(6, 4).unwrap();
            let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
            let ys = apply_channel_noiseless(sum, &gains, &cfg);
            let ya = apply_channel_noiseless(a, &gains, &cfg);
            let yb = apply_channel_noiseless(b, &gains, &cfg);
            prop_assert!((ys.y1 - ya.y1 - yb.y1).abs() <= 1e-12 * (1.0 + ys.y1.abs()));
            prop_assert!((ys.y2 - ya.y2 - yb.y2).abs() <= 1e-12 * (1.0 + ys.y2.abs()));
        }
    }

    #[test]
    fn linear_exactly_on_dyadic_inputs() {
        let gains = ChannelGains::new([[1.5, 1.25, 1.75], [1.125, 2.0, 1.375]]).unwrap();
        let cfg = StrengthConfig::new(8, 6).unwrap();
        let a = [0.5, -0.25, 0.125];
        let b = [0.0625, 0.75, -0.5];
        let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
        let ys = apply_channel_noiseless(sum, &gains, &cfg);
        let ya = apply_channel_noiseless(a, &gains, &cfg);
        let yb = apply_channel_noiseless(b, &gains, &cfg);
        assert_eq!(ys.y1, ya.y1 + yb.y1);
        assert_eq!(ys.y2, ya.y2 + yb.y2);
    }
}
