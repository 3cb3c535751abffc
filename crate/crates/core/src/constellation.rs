//! Symmetric PAM constellations `{ξ·a : a ∈ ℤ, |a| ≤ Q}` and the support of
//! the sum of two aligned symbols.
//!
//! Everything here is exact bookkeeping: entropies come from counting, second
//! moments from closed-form integer sums, and decoding is a nearest-point
//! search with a fixed tie rule so that simulations are bit-reproducible.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether two spacings are "the same".
const SPACING_RTOL: f64 = 1e-12;

/// One drawn or decoded symbol: integer lattice index and its amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamSymbol {
    pub index: i64,
    pub value: f64,
}

/// A uniform PAM constellation with spacing `γ/Q` and half-range `Q`.
///
/// The maximum amplitude is the generating constant `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamSet {
    gamma: f64,
    half_range: u64,
    degenerate: bool,
}

impl PamSet {
    /// Builds `Ω(γ/Q, Q)` directly from its half-range.
    pub fn new(gamma: f64, half_range: u64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConstellation(format!("gamma must be positive and finite, got {gamma}")));
        }
        if half_range == 0 {
            return Err(Error::InvalidConstellation("half_range must be at least 1".into()));
        }
        Ok(Self { gamma, half_range, degenerate: false })
    }

    pub fn spacing(&self) -> f64 {
        self.gamma / self.half_range as f64
    }

    pub fn half_range(&self) -> u64 {
        self.half_range
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of points, `2Q + 1`.
    pub fn cardinality(&self) -> u64 {
        2 * self.half_range + 1
    }

    /// True when the set was built with `λ = 0`: it carries no GDoF and the
    /// scheme never transmits it.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn point(&self, index: i64) -> PamSymbol {
        PamSymbol { index, value: self.spacing() * index as f64 }
    }

    /// Uniform draw over the support.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PamSymbol {
        let q = self.half_range as i64;
        self.point(rng.random_range(-q..=q))
    }

    /// `log2(2Q + 1)`: entropy of the uniform law on the support.
    pub fn entropy_bits(&self) -> f64 {
        (self.cardinality() as f64).log2()
    }

    /// Exact `E|v|²` under the uniform law, `ξ²·Q(Q+1)/3`.
    pub fn second_moment(&self) -> f64 {
        let q = self.half_range as f64;
        let xi = self.spacing();
        xi * xi * q * (q + 1.0) / 3.0
    }

    /// Nearest constellation point to `y`; ties go to the smaller `|a|` and
    /// out-of-range inputs clamp to the endpoints.
    pub fn nearest_point(&self, y: f64) -> PamSymbol {
        let index = nearest_index(self.spacing(), self.half_range as i64, y);
        self.point(index)
    }

    /// Support of the sum of two i.i.d. symbols drawn from this set.
    pub fn sum_set(&self) -> SumSet {
        SumSet { spacing: self.spacing(), half_range: 2 * self.half_range }
    }
}

/// `2·Ω(ξ, Q) = {ξ·a : |a| ≤ 2Q}`, the support of an aligned symbol sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumSet {
    spacing: f64,
    half_range: u64,
}

impl SumSet {
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_range(&self) -> u64 {
        self.half_range
    }

    pub fn point(&self, index: i64) -> PamSymbol {
        PamSymbol { index, value: self.spacing * index as f64 }
    }

    pub fn nearest_point(&self, y: f64) -> PamSymbol {
        self.point(nearest_index(self.spacing, self.half_range as i64, y))
    }
}

/// Builds the constellation with `Q = ⌊P^{λ/2}⌋` and `ξ = γ/Q`.
///
/// Values of `P^{λ/2}` within 1e-9 (relative) of an integer are snapped to it
/// so that exact powers of two are not floored one step too low. `λ = 0`
/// yields `Q = 1` flagged as degenerate.
pub fn make_pam(gamma: f64, lambda: f64, p: f64) -> Result<PamSet> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConstellation(format!("gamma must be positive, got {gamma}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidConstellation(format!("P must be at least 1, got {p}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConstellation(format!("lambda must be non-negative, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(PamSet { gamma, half_range: 1, degenerate: true });
    }
    let raw = p.powf(lambda / 2.0);
    let rounded = raw.round();
    let q = if (raw - rounded).abs() <= 1e-9 * raw { rounded } else { raw.floor() };
    if q > (1u64 << 52) as f64 {
        return Err(Error::InvalidConstellation(format!("half range {q} exceeds exact integer range")));
    }
    PamSet::new(gamma, (q as u64).max(1))
}

/// Exact entropy (bits) of `a + b` for independent uniform symbols on two
/// constellations sharing one spacing.
///
/// The pmf is the discrete convolution of the two uniform count vectors, which
/// for uniform inputs is the trapezoid `c(s) = |{i : |i| ≤ Qa, |s − i| ≤ Qb}|`.
pub fn sum_entropy_bits(a: &PamSet, b: &PamSet) -> Result<f64> {
    let (sa, sb) = (a.spacing(), b.spacing());
    if (sa - sb).abs() > SPACING_RTOL * sa.max(sb) {
        return Err(Error::SpacingMismatch { a: sa, b: sb });
    }
    let (qa, qb) = (a.half_range as i64, b.half_range as i64);
    let total = (a.cardinality() as f64) * (b.cardinality() as f64);
    let weighted: f64 = (-(qa + qb)..=(qa + qb))
        .map(|s| {
            let count = (qa.min(s + qb) - (-qa).max(s - qb) + 1).max(0) as f64;
            if count > 0.0 {
                count * count.log2()
            } else {
                0.0
            }
        })
        .sum();
    Ok(total.log2() - weighted / total)
}

fn nearest_index(spacing: f64, half_range: i64, y: f64) -> i64 {
    if y.is_nan() {
        return 0;
    }
    let t = (y / spacing).floor();
    if t >= half_range as f64 {
        return half_range;
    }
    if t < -(half_range as f64) {
        return -half_range;
    }
    let lo = t as i64;
    let hi = lo + 1;
    let d_lo = (y - spacing * lo as f64).abs();
    let d_hi = (y - spacing * hi as f64).abs();
    // Adjacent integers never share |a|, so the magnitude rule settles every tie.
    if d_lo < d_hi || (d_lo == d_hi && lo.abs() < hi.abs()) {
        lo
    } else {
        hi
    }
}
