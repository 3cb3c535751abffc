//! Receiver procedures and their analytic error predictor.
//!
//! Receiver `k` sees (written for `k = 1`)
//!
//! ```text
//! y = 2^{m_d}·g0·v1c + 2^{m_c}·g1·(v2c + u3) + 2^{m_d−m_c}·g0·v1p + g1·v2p + z
//! ```
//!
//! where `g0, g1` are the receiver's gain products. The common symbol and the
//! aligned sum `s = v2c + u3` live on the same lattice, so when their scales
//! are not separated (`2/3 ≤ α < 2`) they are decoded jointly as one integer
//! pair; otherwise layers are peeled off from the strongest down.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::channel::{apply_channel, ChannelGains, ReceiverGains, Rx};
use crate::constellation::PamSymbol;
use crate::diophantine::outage_threshold;
use crate::error::{Error, Result};
use crate::ratio;
use crate::rng;
use crate::scheme::{encode, Design, Regime, TxBundle};

/// Relative gap below which the joint minimizer is declared non-unique.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Estimates produced at one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeOutcome {
    /// Own common symbol.
    pub vc: PamSymbol,
    /// Own private symbol, when the regime has one.
    pub vp: Option<PamSymbol>,
    /// Aligned sum of the other user's common symbol and the jamming symbol.
    pub s: PamSymbol,
}

/// Which estimates were wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymbolErrors {
    pub common: bool,
    pub private: bool,
    pub sum: bool,
}

impl SymbolErrors {
    /// Error on any of the receiver's own symbols.
    pub fn own(&self) -> bool {
        self.common || self.private
    }
}

impl DecodeOutcome {
    pub fn score(&self, tx: &TxBundle, rx: Rx) -> SymbolErrors {
        let own = rx.index();
        let other = 1 - own;
        let sum_index = tx.common(other).index + tx.u3.index;
        SymbolErrors {
            common: self.vc.index != tx.common(own).index,
            private: match (self.vp, tx.private(own)) {
                (Some(a), Some(b)) => a.index != b.index,
                (None, None) => false,
                _ => true,
            },
            sum: self.s.index != sum_index,
        }
    }
}

/// The integer-combination form decoded jointly in the `Mid` and `High`
/// regimes: `y ≈ scale·(a0·g0·q0 + a1·g1·q1)` with `|q0| ≤ q0_max`,
/// `|q1| ≤ q1_max = 2·q0_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointForm {
    pub scale: f64,
    pub a0: u64,
    pub a1: u64,
    pub q0_max: u64,
    pub q1_max: u64,
    /// Worst-case magnitude of what is treated as noise besides `z`,
    /// `2^{m_d−m_c}·√2` for `Mid` and 0 for `High`.
    pub interference: f64,
}

impl JointForm {
    pub fn of(design: &Design) -> Result<Self> {
        let cfg = design.cfg;
        let q = design.common.half_range();
        let xi = design.common.spacing();
        match design.regime() {
            Regime::Mid => {
                let a0 = 1u64 << (cfg.m_direct - cfg.m_cross);
                Ok(Self {
                    scale: cfg.cross_amplitude() * xi,
                    a0,
                    a1: 1,
                    q0_max: q,
                    q1_max: 2 * q,
                    interference: a0 as f64 * std::f64::consts::SQRT_2,
                })
            }
            Regime::High => Ok(Self {
                scale: cfg.direct_amplitude() * xi,
                a0: 1,
                a1: 1u64 << (cfg.m_cross - cfg.m_direct),
                q0_max: q,
                q1_max: 2 * q,
                interference: 0.0,
            }),
            other => Err(Error::NotJointRegime { regime: other.name().into() }),
        }
    }

    /// Candidate evaluations the joint search performs per decode.
    pub fn search_cost(&self) -> u64 {
        4 * (2 * self.q0_max + 1)
    }
}

/// Three-stage successive decoding for `1/2 < α < 2/3`: common symbol, then
/// the aligned sum, then the private symbol.
pub fn successive_decode_low(y: f64, g: ReceiverGains, design: &Design) -> DecodeOutcome {
    let cfg = design.cfg;
    let private = design.private.expect("low regime carries private symbols");
    let direct = cfg.direct_amplitude() * g.direct;
    let cross = cfg.cross_amplitude() * g.cross;
    let vc = design.common.nearest_point(y / direct);
    let r1 = y - direct * vc.value;
    let s = design.sum_set().nearest_point(r1 / cross);
    let r2 = r1 - cross * s.value;
    let vp = private.nearest_point(r2 / (cfg.direct_over_cross() * g.direct));
    DecodeOutcome { vc, vp: Some(vp), s }
}

/// Two-stage successive decoding for `α ≥ 2`: the aligned sum is strongest.
pub fn successive_decode_top(y: f64, g: ReceiverGains, design: &Design) -> DecodeOutcome {
    let cfg = design.cfg;
    let cross = cfg.cross_amplitude() * g.cross;
    let s = design.sum_set().nearest_point(y / cross);
    let r = y - cross * s.value;
    let vc = design.common.nearest_point(r / (cfg.direct_amplitude() * g.direct));
    DecodeOutcome { vc, vp: None, s }
}

/// Result of the exhaustive integer-pair search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSearch {
    pub q0: i64,
    pub q1: i64,
    pub distance: f64,
    /// Distance of the best pair different from `(q0, q1)`.
    pub runner_up: f64,
}

/// Minimizes `|y − (c0·q0 + c1·q1)|` over the box `|q0| ≤ q0_max`,
/// `|q1| ≤ q1_max`.
///
/// Every `q0` is visited; for each, the objective is convex in `q1`, so the
/// best and second-best `q1` lie in `{⌊t⌋−1, …, ⌊t⌋+2}` (clamped) with
/// `t = (y − c0·q0)/c1`.
pub fn search_pair(y: f64, c0: f64, c1: f64, q0_max: i64, q1_max: i64) -> PairSearch {
    let mut best = (f64::INFINITY, 0i64, 0i64);
    let mut second = f64::INFINITY;
    for q0 in -q0_max..=q0_max {
        let base = y - c0 * q0 as f64;
        let fl = (base / c1).floor();
        let fl = if fl.is_finite() { fl.clamp(-(q1_max as f64), q1_max as f64) as i64 } else { 0 };
        let mut last = None;
        for k in fl - 1..=fl + 2 {
            let q1 = k.clamp(-q1_max, q1_max);
            if last == Some(q1) {
                continue;
            }
            last = Some(q1);
            let d = (base - c1 * q1 as f64).abs();
            if d < best.0 {
                second = best.0;
                best = (d, q0, q1);
            } else if d < second {
                second = d;
            }
        }
    }
    PairSearch { q0: best.1, q1: best.2, distance: best.0, runner_up: second }
}

/// Joint noise-removal/signal-separation decoding for `2/3 ≤ α < 2`.
///
/// Fails with `DegenerateGains` when the minimizing pair is not unique to
/// within `DEGENERACY_RTOL` of the signal magnitude.
pub fn joint_decode(y: f64, g: ReceiverGains, design: &Design) -> Result<DecodeOutcome> {
    let form = JointForm::of(design)?;
    let c0 = form.scale * form.a0 as f64 * g.direct;
    let c1 = form.scale * form.a1 as f64 * g.cross;
    let (q0_max, q1_max) = (form.q0_max as i64, form.q1_max as i64);
    let found = search_pair(y, c0, c1, q0_max, q1_max);
    let magnitude = y.abs() + c0 * q0_max as f64 + c1 * q1_max as f64;
    if found.runner_up - found.distance <= DEGENERACY_RTOL * magnitude {
        return Err(Error::DegenerateGains { ties: 2, distance: found.distance });
    }
    let vc = design.common.point(found.q0);
    let s = design.sum_set().point(found.q1);
    let vp = design.private.map(|private| {
        let residual = y - c0 * found.q0 as f64 - c1 * found.q1 as f64;
        private.nearest_point(residual / (form.a0 as f64 * g.direct))
    });
    Ok(DecodeOutcome { vc, vp, s })
}

/// Dispatches to the regime's decoder.
pub fn decode(y: f64, gains: &ChannelGains, rx: Rx, design: &Design) -> Result<DecodeOutcome> {
    let g = gains.receiver(rx);
    match design.regime() {
        Regime::Low => Ok(successive_decode_low(y, g, design)),
        Regime::Top => Ok(successive_decode_top(y, g, design)),
        Regime::Mid | Regime::High => joint_decode(y, g, design),
        Regime::NoHelper => Err(Error::NoHelperRegime { alpha: ratio::format_rational(&design.params.alpha) }),
    }
}

/// Gaussian tail `Q(x) = P[N(0,1) > x]`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Upper bound on `P[x_s ≠ x̂_s]` for a channel with minimum distance `d_min`.
///
/// Uses `exp(−P^{1−α}(γδP^{ε/2} − √2)²/2)` in the `Mid` regime when
/// `γδP^{ε/2} ≥ √2` and `d_min` clears the outage threshold; otherwise the
/// two-sided form `2·Q(scale·d_min/2 − interference)`, which is 1 when its
/// argument is not positive.
pub fn predicted_pe_bound(d_min: f64, delta: f64, design: &Design) -> Result<f64> {
    let form = JointForm::of(design)?;
    let params = &design.params;
    if design.regime() == Regime::Mid {
        let eps = ratio::to_f64(&params.epsilon);
        let margin = params.gamma * delta * (design.cfg.m_direct as f64 * eps).exp2();
        let threshold = outage_threshold(design.regime(), params.alpha, delta, &design.cfg)?;
        if margin >= std::f64::consts::SQRT_2 && d_min >= threshold {
            let p_one_minus_alpha = (2.0 * (design.cfg.m_direct as f64 - design.cfg.m_cross as f64)).exp2();
            return Ok((-p_one_minus_alpha * (margin - std::f64::consts::SQRT_2).powi(2) / 2.0).exp().min(1.0));
        }
    }
    let arg = form.scale * d_min / 2.0 - form.interference;
    if arg <= 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * gaussian_tail(arg)).min(1.0))
}

/// Where the channel gains of each Monte Carlo trial come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainSource {
    Fixed(ChannelGains),
    /// Fresh uniform draw per trial from the trial's own stream.
    PerTrial,
}

/// Error counts at one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RxCounts {
    pub common: u64,
    pub private: u64,
    pub sum: u64,
    /// Trials with an error on an own symbol (degenerate trials included).
    pub own: u64,
    pub degenerate: u64,
}

impl RxCounts {
    fn add(self, o: Self) -> Self {
        Self {
            common: self.common + o.common,
            private: self.private + o.private,
            sum: self.sum + o.sum,
            own: self.own + o.own,
            degenerate: self.degenerate + o.degenerate,
        }
    }
}

/// Aggregate outcome of `n_trials` encode, channel, decode rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ErrorCounts {
    pub n_trials: u64,
    pub rx: [RxCounts; 2],
}

impl ErrorCounts {
    /// Fraction of trials with an own-symbol error at receiver `rx`.
    pub fn pe_own(&self, rx: Rx) -> f64 {
        self.rx[rx.index()].own as f64 / self.n_trials as f64
    }

    /// Own-symbol error rate pooled over both receivers.
    pub fn pe_pooled(&self) -> f64 {
        (self.rx[0].own + self.rx[1].own) as f64 / (2 * self.n_trials) as f64
    }

    pub fn pe_sum(&self) -> f64 {
        (self.rx[0].sum + self.rx[1].sum + self.rx[0].degenerate + self.rx[1].degenerate) as f64 / (2 * self.n_trials) as f64
    }

    fn add(self, o: Self) -> Self {
        Self { n_trials: self.n_trials + o.n_trials, rx: [self.rx[0].add(o.rx[0]), self.rx[1].add(o.rx[1])] }
    }
}

/// One trial on the supplied random source.
pub fn run_trial<R: Rng + ?Sized>(design: &Design, gains: &ChannelGains, rng: &mut R) -> ErrorCounts {
    let tx = encode(design, gains, rng);
    let y = apply_channel(tx.x, gains, &design.cfg, rng);
    let mut counts = ErrorCounts { n_trials: 1, ..Default::default() };
    for rx in Rx::BOTH {
        let c = &mut counts.rx[rx.index()];
        match decode(y.at(rx), gains, rx, design) {
            Ok(out) => {
                let e = out.score(&tx, rx);
                c.common = e.common as u64;
                c.private = e.private as u64;
                c.sum = e.sum as u64;
                c.own = e.own() as u64;
            }
            Err(_) => {
                c.degenerate = 1;
                c.own = 1;
            }
        }
    }
    counts
}

/// Monte Carlo error counts; trial `i` uses stream `i` of `seed`, so the
/// totals do not depend on the rayon pool size.
pub fn simulate_errors(design: &Design, gains: GainSource, n_trials: u64, seed: u64) -> ErrorCounts {
    (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i);
            let g = match gains {
                GainSource::Fixed(g) => g,
                GainSource::PerTrial => crate::channel::sample_gains(&mut r),
            };
            run_trial(design, &g, &mut r)
        })
        .reduce(ErrorCounts::default, ErrorCounts::add)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel_noiseless, sample_gains};
    use crate::constellation::PamSet;
    use crate::diophantine::min_distance;
    use crate::scheme::DEFAULT_GAMMA;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn brute_force(y: f64, c0: f64, c1: f64, q0_max: i64, q1_max: i64) -> (i64, i64, f64, f64) {
        let mut all: Vec<(f64, i64, i64)> = Vec::new();
        for q1 in -q1_max..=q1_max {
            for q0 in -q0_max..=q0_max {
                all.push(((y - c0 * q0 as f64 - c1 * q1 as f64).abs(), q0, q1));
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        (all[0].1, all[0].2, all[0].0, all[1].0)
    }

    proptest! {
        #[test]
        fn pair_search_matches_brute_force(
            y in -200.0f64..200.0,
            c0 in 0.5f64..30.0,
            c1 in 0.5f64..30.0,
            q in 1i64..=20,
        ) {
            let s = search_pair(y, c0, c1, q, 2 * q);
            let (b0, b1, bd, b2) = brute_force(y, c0, c1, q, 2 * q);
            let scale = y.abs() + c0 * q as f64 + c1 * 2.0 * q as f64;
            if b2 - bd > 1e-9 * scale {
                prop_assert_eq!((s.q0, s.q1), (b0, b1));
            }
            prop_assert!((s.distance - bd).abs() <= 1e-12 * scale);
            prop_assert!((s.runner_up - b2).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn equal_gains_are_degenerate_in_mid_regime() {
        let d = Design::build(r(3, 4), 8, r(1, 10), DEFAULT_GAMMA).unwrap();
        let g = ChannelGains::uniform(1.5).unwrap();
        let rg = g.receiver(Rx::One);
        assert_eq!(rg.direct, rg.cross);
        let form = JointForm::of(&d).unwrap();
        assert_eq!(form.a0, 4);
        let dmin = min_distance(rg.direct, rg.cross, form.a0, form.a1, form.q0_max, form.q1_max);
        assert_eq!(dmin, 0.0);
        let tx = encode(&d, &g, &mut rng::stream(1, 0));
        let y = apply_channel_noiseless(tx.x, &g, &d.cfg);
        assert!(matches!(decode(y.y1, &g, Rx::One, &d), Err(Error::DegenerateGains { .. })));
    }

    #[test]
    fn noiseless_low_and_top_recover_everything() {
        for (alpha, m, eps) in [(r(3, 5), 30, r(3, 20)), (r(5, 2), 10, r(1, 10))] {
            let d = Design::build(alpha, m, eps, DEFAULT_GAMMA).unwrap();
            for i in 0..100 {
                let mut rg = rng::stream(77, i);
                let g = sample_gains(&mut rg);
                let tx = encode(&d, &g, &mut rg);
                let y = apply_channel_noiseless(tx.x, &g, &d.cfg);
                for rx in Rx::BOTH {
                    let out = decode(y.at(rx), &g, rx, &d).unwrap();
                    assert_eq!(out.score(&tx, rx), SymbolErrors::default(), "alpha {alpha} trial {i}");
                }
            }
        }
    }

    #[test]
    fn noiseless_high_recovers_on_generic_gains() {
        let d = Design::build(r(3, 2), 8, r(1, 10), DEFAULT_GAMMA).unwrap();
        for i in 0..100 {
            let mut rg = rng::stream(78, i);
            let g = sample_gains(&mut rg);
            let tx = encode(&d, &g, &mut rg);
            let y = apply_channel_noiseless(tx.x, &g, &d.cfg);
            for rx in Rx::BOTH {
                let out = decode(y.at(rx), &g, rx, &d).unwrap();
                assert_eq!(out.score(&tx, rx), SymbolErrors::default());
            }
        }
    }

    #[test]
    fn low_regime_stage_one_interference_bound() {
        // Aggregate treated as noise in stage 1, normalised by √(P^α); with
        // h ≡ 2 every gain product equals 8.
        let d = Design::build(r(3, 5), 10, r(1, 10), DEFAULT_GAMMA).unwrap();
        let g = ChannelGains::uniform(2.0).unwrap().receiver(Rx::One);
        let cfg = d.cfg;
        let private = d.private.unwrap();
        let extreme = |set: &PamSet| [-(set.half_range() as i64), set.half_range() as i64];
        let mut worst = 0.0f64;
        for s in [-(2 * d.common.half_range() as i64), 2 * d.common.half_range() as i64] {
            for a in extreme(&private) {
                for b in extreme(&private) {
                    let agg = cfg.cross_amplitude() * g.cross * d.sum_set().point(s).value
                        + cfg.direct_over_cross() * g.direct * private.point(a).value
                        + g.cross * private.point(b).value;
                    worst = worst.max(agg.abs() / cfg.cross_amplitude());
                }
            }
        }
        assert!(worst <= 4.0 * 2f64.sqrt() + 1e-12, "{worst}");
    }

    #[test]
    fn top_regime_common_term_bound() {
        let d = Design::build(r(5, 2), 4, r(1, 10), DEFAULT_GAMMA).unwrap();
        let g = ChannelGains::uniform(2.0).unwrap().receiver(Rx::One);
        let top = d.common.point(d.common.half_range() as i64).value;
        assert!((g.direct * top).abs() <= 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn predicted_bound_edges() {
        let d = Design::build(r(3, 4), 12, r(1, 10), DEFAULT_GAMMA).unwrap();
        assert_eq!(predicted_pe_bound(0.0, 0.01, &d).unwrap(), 1.0);
        let form = JointForm::of(&d).unwrap();
        let at_zero = 2.0 * form.interference / form.scale;
        assert_eq!(predicted_pe_bound(at_zero, 0.01, &d).unwrap(), 1.0);
        let big = predicted_pe_bound(at_zero * 10.0, 0.01, &d).unwrap();
        assert!(big < 1e-6);
        assert!((gaussian_tail(0.0) - 0.5).abs() < 1e-15);
        let low = Design::build(r(3, 5), 10, r(1, 10), DEFAULT_GAMMA).unwrap();
        assert!(matches!(predicted_pe_bound(1.0, 0.01, &low), Err(Error::NotJointRegime { .. })));
    }

    #[test]
    fn exponential_form_at_its_boundary_is_one() {
        // γδP^{ε/2} = √2 exactly: γ = 1/(8√2), δ = 1, ε·m = 4 gives 16γ = √2.
        let d = Design::build(r(3, 4), 40, r(1, 10), DEFAULT_GAMMA).unwrap();
        let margin = d.params.gamma * 1.0 * (40.0f64 * 0.1).exp2();
        assert!((margin - 2f64.sqrt()).abs() < 1e-12);
        let bound = predicted_pe_bound(1.0, 1.0, &d).unwrap();
        assert!((bound - 1.0).abs() < 1e-9, "{bound}");
    }

    #[test]
    fn simulation_is_deterministic_and_pool_independent() {
        let d = Design::build(r(3, 4), 8, r(1, 10), DEFAULT_GAMMA).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_errors(&d, GainSource::PerTrial, 2000, 5))
        };
        assert_eq!(run(1), run(4));
    }
}
