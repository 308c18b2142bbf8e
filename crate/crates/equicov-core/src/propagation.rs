//! Multi-slope pathloss, fading, cell association and per-realization SIR.
//!
//! The pathloss is a continuous piecewise power law: on the annulus
//! `R[i-1] < z <= R[i]` the gain is `eta_i * z^-alpha_i`, with `eta_1 = 1`
//! and `eta_j / eta_{j-1} = R[j-1]^(alpha_j - alpha_{j-1})` so adjacent
//! pieces agree at the breakpoints. Scaling all node positions by `k`
//! together with all finite breakpoints leaves the SIR of every realization
//! unchanged; [`sir_scaling_identity_check`] evaluates both sides of that
//! identity.

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::plane::Point;

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Continuous piecewise power-law distance gain.
#[derive(Debug, Clone, PartialEq)]
pub struct PathlossModel {
    /// Finite interior breakpoints, strictly increasing. Empty for a single
    /// slope; the implied outer boundary is infinite.
    boundaries: Vec<f64>,
    /// One exponent per piece; `boundaries.len() + 1` entries.
    alphas: Vec<f64>,
    /// Continuity coefficients; `etas[0] = 1`.
    etas: Vec<f64>,
}

impl PathlossModel {
    /// Build the model from the finite breakpoints and per-piece exponents,
    /// deriving the continuity coefficients.
    pub fn new(boundaries: &[f64], alphas: &[f64]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid("at least one pathloss exponent required"));
        }
        if alphas.len() != boundaries.len() + 1 {
            return Err(Error::invalid(format!(
                "expected {} exponents for {} breakpoints, got {}",
                boundaries.len() + 1,
                boundaries.len(),
                alphas.len()
            )));
        }
        for w in boundaries.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(
                    "pathloss breakpoints must be strictly increasing",
                ));
            }
        }
        if let Some(first) = boundaries.first() {
            if !(first.is_finite() && *first > 0.0) {
                return Err(Error::invalid(
                    "pathloss breakpoints must be finite and positive",
                ));
            }
        }
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid(
                "pathloss breakpoints must be finite and positive",
            ));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("pathloss exponents must be finite"));
        }

        let mut etas = Vec::with_capacity(alphas.len());
        etas.push(1.0);
        for j in 1..alphas.len() {
            let eta = etas[j - 1] * boundaries[j - 1].powf(alphas[j] - alphas[j - 1]);
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::invalid(format!(
                    "continuity coefficient eta_{} is not finite/positive",
                    j + 1
                )));
            }
            etas.push(eta);
        }

        let model = PathlossModel {
            boundaries: boundaries.to_vec(),
            alphas: alphas.to_vec(),
            etas,
        };
        model.check_continuity()?;
        Ok(model)
    }

    /// Plain `z^-alpha`.
    pub fn single_slope(alpha: f64) -> Result<Self> {
        PathlossModel::new(&[], &[alpha])
    }

    fn check_continuity(&self) -> Result<()> {
        for (i, &b) in self.boundaries.iter().enumerate() {
            let left = self.etas[i] * b.powf(-self.alphas[i]);
            let right = self.etas[i + 1] * b.powf(-self.alphas[i + 1]);
            if (left - right).abs() > 1e-12 * left.abs() {
                return Err(Error::invalid(format!(
                    "pathloss discontinuous at breakpoint {b}: {left} vs {right}"
                )));
            }
        }
        Ok(())
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn slopes(&self) -> usize {
        self.alphas.len()
    }

    /// Exponent of the outermost piece, which controls far-field interference.
    pub fn tail_alpha(&self) -> f64 {
        *self.alphas.last().expect("at least one piece")
    }

    /// Gain at distance `z > 0`. Intervals are left-open/right-closed, so a
    /// breakpoint evaluates on its left piece; continuity makes the choice
    /// numerically immaterial.
    pub fn eval(&self, z: f64) -> Result<f64> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::domain(format!(
                "pathloss is defined for positive finite distances, got {z}"
            )));
        }
        let i = self.boundaries.partition_point(|b| *b < z);
        Ok(self.etas[i] * z.powf(-self.alphas[i]))
    }

    /// The model with every finite breakpoint multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<PathlossModel> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!(
                "scale factor must be finite and positive, got {k}"
            )));
        }
        let boundaries: Vec<f64> = self.boundaries.iter().map(|b| b * k).collect();
        PathlossModel::new(&boundaries, &self.alphas)
    }

    /// Key/value serialization (`etas` emitted for audit only; it is always
    /// re-derived on parse).
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("alphas".into(), join(&self.alphas)),
            ("boundaries".into(), join(&self.boundaries)),
            ("etas".into(), join(&self.etas)),
        ]
    }
}

/// Breakpoint distance of the two-ray ground-reflection model,
/// `4 h_t h_r f_c / c`.
pub fn two_ray_breakpoint(h_tx_m: f64, h_rx_m: f64, carrier_hz: f64) -> Result<f64> {
    for (name, v) in [("h_tx_m", h_tx_m), ("h_rx_m", h_rx_m), ("carrier_hz", carrier_hz)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!(
                "{name} must be finite and positive, got {v}"
            )));
        }
    }
    Ok(4.0 * h_tx_m * h_rx_m * carrier_hz / SPEED_OF_LIGHT_M_PER_S)
}

/// Distribution of the i.i.d. per-link power gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingSpec {
    /// Unit-mean exponential power gain (Rayleigh amplitude). Sampled by
    /// inverse CDF, one uniform per draw.
    Rayleigh,
    /// Unit-mean gamma power gain with shape `m` (Nakagami-m amplitude).
    Nakagami { m: f64 },
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        if let FadingSpec::Nakagami { m } = self {
            if !(m.is_finite() && *m > 0.0) {
                return Err(Error::invalid(format!(
                    "Nakagami shape must be finite and positive, got {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_rayleigh(&self) -> bool {
        matches!(self, FadingSpec::Rayleigh)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            FadingSpec::Rayleigh => -(1.0 - rng.random::<f64>()).ln(),
            FadingSpec::Nakagami { m } => {
                let gamma = rand_distr::Gamma::new(*m, 1.0 / m).expect("validated shape");
                gamma.sample(rng)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FadingSpec::Rayleigh => "rayleigh",
            FadingSpec::Nakagami { .. } => "nakagami",
        }
    }
}

/// How the typical user picks its serving base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssociationPolicy {
    /// Highest average received power, i.e. highest pathloss gain.
    MaxPower,
    /// Highest instantaneous fading-weighted received power, which is also
    /// the highest instantaneous SIR.
    MaxSir,
}

impl AssociationPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            AssociationPolicy::MaxPower => "max_power",
            AssociationPolicy::MaxSir => "max_sir",
        }
    }
}

/// Transmit power and SIR threshold. Power cancels in every SIR ratio and is
/// carried only for configuration completeness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub sir_threshold: f64,
}

impl LinkBudget {
    pub fn new(tx_power_w: f64, sir_threshold: f64) -> Result<Self> {
        for (name, v) in [("tx_power_w", tx_power_w), ("sir_threshold", sir_threshold)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(LinkBudget {
            tx_power_w,
            sir_threshold,
        })
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Pick the serving base station index for `user`.
///
/// `fading` must hold one power gain per base station under [`AssociationPolicy::MaxSir`];
/// it is ignored under [`AssociationPolicy::MaxPower`].
pub fn associate(
    user: Point,
    bs_points: &[Point],
    fading: &[f64],
    policy: AssociationPolicy,
    model: &PathlossModel,
) -> Result<usize> {
    if bs_points.is_empty() {
        return Err(Error::NoServer);
    }
    let gains = bs_points
        .iter()
        .map(|b| model.eval(b.dist(user)))
        .collect::<Result<Vec<f64>>>()?;
    associate_from_gains(&gains, fading, policy)
}

/// Association when pathloss gains are already computed.
pub fn associate_from_gains(
    gains: &[f64],
    fading: &[f64],
    policy: AssociationPolicy,
) -> Result<usize> {
    if gains.is_empty() {
        return Err(Error::NoServer);
    }
    match policy {
        AssociationPolicy::MaxPower => Ok(argmax(gains.iter().copied()).expect("nonempty")),
        AssociationPolicy::MaxSir => {
            if fading.len() != gains.len() {
                return Err(Error::invalid(format!(
                    "fading vector length {} does not match base-station count {}",
                    fading.len(),
                    gains.len()
                )));
            }
            Ok(argmax(gains.iter().zip(fading).map(|(g, h)| g * h)).expect("nonempty"))
        }
    }
}

/// SIR of the link from `bs_points[serving]` to `user`: fading-weighted
/// serving gain over the sum of all other fading-weighted gains. An empty
/// interference sum yields `+inf`.
pub fn compute_sir(
    user: Point,
    bs_points: &[Point],
    serving: usize,
    fading: &[f64],
    model: &PathlossModel,
) -> Result<f64> {
    if serving >= bs_points.len() {
        return Err(Error::invalid(format!(
            "serving index {serving} out of range for {} base stations",
            bs_points.len()
        )));
    }
    if fading.len() != bs_points.len() {
        return Err(Error::invalid(format!(
            "fading vector length {} does not match base-station count {}",
            fading.len(),
            bs_points.len()
        )));
    }
    let gains = bs_points
        .iter()
        .map(|b| model.eval(b.dist(user)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(sir_from_gains(&gains, fading, serving))
}

pub(crate) fn sir_from_gains(gains: &[f64], fading: &[f64], serving: usize) -> f64 {
    let signal = fading[serving] * gains[serving];
    let interference: f64 = gains
        .iter()
        .zip(fading)
        .enumerate()
        .filter(|(i, _)| *i != serving)
        .map(|(_, (g, h))| g * h)
        .sum();
    if interference == 0.0 {
        f64::INFINITY
    } else {
        signal / interference
    }
}

/// Result of evaluating the SIR scaling identity on one realization.
#[derive(Debug, Clone, Copy)]
pub struct SirScalingCheck {
    pub serving: usize,
    pub serving_scaled: usize,
    pub sir: f64,
    pub sir_scaled: f64,
    pub relative_error: f64,
}

/// Evaluate the SIR once on `(user, bs_points, model)` and once with every
/// position and every finite breakpoint multiplied by `k`, reusing the same
/// fading realization. The two values agree up to floating-point rounding
/// and the serving index is identical.
pub fn sir_scaling_identity_check(
    user: Point,
    bs_points: &[Point],
    fading: &[f64],
    model: &PathlossModel,
    k: f64,
    policy: AssociationPolicy,
) -> Result<SirScalingCheck> {
    let serving = associate(user, bs_points, fading, policy, model)?;
    let sir = compute_sir(user, bs_points, serving, fading, model)?;

    let scaled_points: Vec<Point> = bs_points.iter().map(|p| p.scaled(k)).collect();
    let scaled_user = user.scaled(k);
    let scaled_model = model.scaled(k)?;
    let serving_scaled = associate(scaled_user, &scaled_points, fading, policy, &scaled_model)?;
    let sir_scaled = compute_sir(scaled_user, &scaled_points, serving_scaled, fading, &scaled_model)?;

    let relative_error = if sir.is_infinite() && sir_scaled.is_infinite() {
        0.0
    } else {
        (sir - sir_scaled).abs() / sir.abs().max(sir_scaled.abs())
    };
    Ok(SirScalingCheck {
        serving,
        serving_scaled,
        sir,
        sir_scaled,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_ppp, PppParams};
    use crate::plane::Shape;
    use crate::rng::SeedTree;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn single_slope_is_a_plain_power_law() {
        let m = PathlossModel::single_slope(4.0).unwrap();
        assert_eq!(m.eval(0.5).unwrap(), 16.0);
        assert_eq!(m.eval(2.0).unwrap(), 0.0625);
    }

    #[test]
    fn dual_slope_continuity_at_unit_breakpoint() {
        let m = PathlossModel::new(&[1.0], &[3.0, 4.0]).unwrap();
        assert_eq!(m.etas(), &[1.0, 1.0]);
        assert!((m.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((m.eval(0.5).unwrap() - 8.0).abs() < 1e-12);
        assert!((m.eval(2.0).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn continuity_coefficient_recursion() {
        let m = PathlossModel::new(&[2.0], &[2.0, 4.0]).unwrap();
        assert_eq!(m.etas()[1], 4.0);
        assert_eq!(m.eval(4.0).unwrap(), 0.015625);
    }

    #[test]
    fn breakpoint_evaluates_on_left_piece() {
        let m = PathlossModel::new(&[1.0], &[3.0, 4.0]).unwrap();
        // Left piece at the breakpoint: 1^-3; the interval is (R_prev, R].
        assert_eq!(m.eval(1.0).unwrap(), 1.0f64.powf(-3.0));
    }

    #[test]
    fn continuity_holds_at_every_breakpoint() {
        let m = PathlossModel::new(&[0.7, 3.0, 11.0], &[2.1, 2.9, 3.7, 4.4]).unwrap();
        for &b in m.boundaries() {
            let left = m.eval(b).unwrap();
            let right = m.eval(b * (1.0 + 1e-13)).unwrap();
            assert!(
                (left - right).abs() <= 1e-11 * left,
                "discontinuity at {b}: {left} vs {right}"
            );
        }
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(PathlossModel::new(&[2.0, 1.0], &[2.0, 3.0, 4.0]).is_err());
        assert!(PathlossModel::new(&[-1.0], &[2.0, 3.0]).is_err());
        assert!(PathlossModel::new(&[1.0], &[2.0]).is_err());
        assert!(PathlossModel::new(&[], &[]).is_err());
    }

    #[test]
    fn eval_rejects_nonpositive_distances() {
        let m = PathlossModel::single_slope(4.0).unwrap();
        assert!(matches!(m.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(m.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn two_ray_breakpoint_examples() {
        let d = two_ray_breakpoint(10.0, 1.5, 2e9).unwrap();
        assert!((d - 400.2769).abs() < 1e-3, "got {d}");
        let doubled = two_ray_breakpoint(10.0, 1.5, 4e9).unwrap();
        assert!((doubled - 2.0 * d).abs() < 1e-9);
        let unit = two_ray_breakpoint(1.0, 1.0, SPEED_OF_LIGHT_M_PER_S / 4.0).unwrap();
        assert!((unit - 1.0).abs() < 1e-12);
        assert!(two_ray_breakpoint(0.0, 1.0, 1e9).is_err());
    }

    #[test]
    fn max_power_picks_nearest_under_single_slope() {
        let m = PathlossModel::single_slope(4.0).unwrap();
        let bs = [Point::new(3.0, 0.0), Point::new(1.0, 1.0), Point::new(-5.0, 0.0)];
        let idx = associate(Point::ORIGIN, &bs, &[], AssociationPolicy::MaxPower, &m).unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn max_sir_weighs_fading() {
        let m = PathlossModel::single_slope(4.0).unwrap();
        let bs = [Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        let fading = [0.1, 4.0];
        let idx = associate(Point::ORIGIN, &bs, &fading, AssociationPolicy::MaxSir, &m).unwrap();
        assert_eq!(idx, 1, "4·2^-4 = 0.25 beats 0.1·1");
    }

    #[test]
    fn single_bs_is_served_under_either_policy() {
        let m = PathlossModel::single_slope(3.0).unwrap();
        let bs = [Point::new(1.0, 2.0)];
        for policy in [AssociationPolicy::MaxPower, AssociationPolicy::MaxSir] {
            assert_eq!(associate(Point::ORIGIN, &bs, &[1.0], policy, &m).unwrap(), 0);
        }
        assert!(matches!(
            associate(Point::ORIGIN, &[], &[], AssociationPolicy::MaxPower, &m),
            Err(Error::NoServer)
        ));
    }

    #[test]
    fn sir_examples() {
        let m = PathlossModel::single_slope(4.0).unwrap();
        let bs = [Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        let sir = compute_sir(Point::ORIGIN, &bs, 0, &[1.0, 1.0], &m).unwrap();
        assert!((sir - 16.0).abs() < 1e-12);

        let lonely = compute_sir(Point::ORIGIN, &bs[..1], 0, &[1.0], &m).unwrap();
        assert!(lonely.is_infinite());

        // m interferers at the serving distance with equal fading: SIR = 1/m.
        let ring: Vec<Point> = (0..5)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                Point::new(th.cos(), th.sin())
            })
            .collect();
        let sir = compute_sir(Point::ORIGIN, &ring, 0, &vec![1.0; 5], &m).unwrap();
        assert!((sir - 0.25).abs() < 1e-12);
    }

    #[test]
    fn scaling_identity_is_bitwise_at_k_one() {
        let m = PathlossModel::new(&[1.0], &[3.0, 4.0]).unwrap();
        let bs = [Point::new(0.3, 0.4), Point::new(-1.5, 0.2), Point::new(2.0, 2.0)];
        let fading = [0.7, 1.3, 0.2];
        let chk =
            sir_scaling_identity_check(Point::ORIGIN, &bs, &fading, &m, 1.0, AssociationPolicy::MaxSir)
                .unwrap();
        assert_eq!(chk.sir, chk.sir_scaled);
        assert_eq!(chk.serving, chk.serving_scaled);
    }

    #[test]
    fn scaling_identity_dual_slope_hand_pattern() {
        let m = PathlossModel::new(&[1.0], &[3.0, 4.0]).unwrap();
        let bs = [Point::new(0.4, 0.1), Point::new(1.2, -0.3), Point::new(-2.5, 1.0)];
        let fading = [1.1, 0.4, 2.2];
        for policy in [AssociationPolicy::MaxPower, AssociationPolicy::MaxSir] {
            let chk = sir_scaling_identity_check(Point::ORIGIN, &bs, &fading, &m, 2.0, policy).unwrap();
            assert_eq!(chk.serving, chk.serving_scaled);
            assert!(
                chk.relative_error < 1e-10,
                "relative error {} too large",
                chk.relative_error
            );
        }
    }

    #[test]
    fn policy_dominance_per_realization() {
        // The max-SIR serving choice maximizes the SIR itself, so it can
        // never do worse than max-power on the same realization.
        let seeds = SeedTree::new(77);
        let mut rng = seeds.rng("dominance", 0);
        let m = PathlossModel::new(&[1.0], &[2.5, 4.0]).unwrap();
        let window = Shape::disk(Point::ORIGIN, 10.0).unwrap();
        for _ in 0..200 {
            let pattern = sample_ppp(PppParams::new(0.5).unwrap(), window, &mut rng).unwrap();
            if pattern.is_empty() {
                continue;
            }
            let fading: Vec<f64> = (0..pattern.len())
                .map(|_| FadingSpec::Rayleigh.sample(&mut rng))
                .collect();
            let s_pow = associate(
                Point::ORIGIN,
                &pattern.points,
                &fading,
                AssociationPolicy::MaxPower,
                &m,
            )
            .unwrap();
            let s_sir = associate(
                Point::ORIGIN,
                &pattern.points,
                &fading,
                AssociationPolicy::MaxSir,
                &m,
            )
            .unwrap();
            let sir_pow = compute_sir(Point::ORIGIN, &pattern.points, s_pow, &fading, &m).unwrap();
            let sir_sir = compute_sir(Point::ORIGIN, &pattern.points, s_sir, &fading, &m).unwrap();
            assert!(sir_sir >= sir_pow);
        }
    }

    #[test]
    fn fading_has_unit_mean() {
        let seeds = SeedTree::new(5);
        let mut rng = seeds.rng("fading", 0);
        for spec in [FadingSpec::Rayleigh, FadingSpec::Nakagami { m: 2.0 }] {
            let n = 200_000;
            let mean: f64 = (0..n).map(|_| spec.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.01, "{spec:?} mean {mean}");
        }
    }

    proptest! {
        #[test]
        fn pathloss_is_strictly_decreasing(
            alpha1 in 0.5f64..3.0,
            step in 0.1f64..2.0,
            breakpoint in 0.2f64..5.0,
            z in 0.01f64..20.0,
        ) {
            let m = PathlossModel::new(&[breakpoint], &[alpha1, alpha1 + step]).unwrap();
            let dz = 1e-6 + z * 1e-6;
            prop_assert!(m.eval(z).unwrap() > m.eval(z + dz).unwrap());
        }

        #[test]
        fn scaling_identity_randomized(
            seed in 0u64..300,
            k in prop::sample::select(vec![0.1f64, 0.5, 2.0, 10.0]),
            n_slopes in 1usize..4,
        ) {
            let seeds = SeedTree::new(seed);
            let mut rng = seeds.rng("identity", 0);
            let boundaries: Vec<f64> = (0..n_slopes - 1).map(|i| 0.5 * (i + 1) as f64).collect();
            let alphas: Vec<f64> = (0..n_slopes).map(|i| 2.5 + 0.7 * i as f64).collect();
            let m = PathlossModel::new(&boundaries, &alphas).unwrap();
            let window = Shape::disk(Point::ORIGIN, 8.0).unwrap();
            let pattern = sample_ppp(PppParams::new(0.8).unwrap(), window, &mut rng).unwrap();
            prop_assume!(!pattern.is_empty());
            let fading: Vec<f64> = (0..pattern.len())
                .map(|_| FadingSpec::Rayleigh.sample(&mut rng))
                .collect();
            for policy in [AssociationPolicy::MaxPower, AssociationPolicy::MaxSir] {
                let chk = sir_scaling_identity_check(
                    Point::ORIGIN, &pattern.points, &fading, &m, k, policy,
                ).unwrap();
                prop_assert_eq!(chk.serving, chk.serving_scaled);
                prop_assert!(chk.relative_error < 1e-9, "err {}", chk.relative_error);
            }
        }
    }
}
