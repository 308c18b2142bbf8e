//! Planar point processes: sampling, scaling and void-probability testing.
//!
//! Three process families are supported: the homogeneous Poisson point
//! process (PPP) and two Neyman–Scott cluster processes, the Matérn cluster
//! process (offspring uniform on a disk of radius `rho` around each parent)
//! and the Thomas cluster process (offspring displaced by an isotropic
//! Gaussian with per-axis standard deviation `rho`).
//!
//! Scaling a realization by `k` maps a PPP of intensity `lambda` onto one of
//! intensity `lambda / k²`, and a cluster process `(lambda_p, m_bar, rho)`
//! onto `(lambda_p / k², m_bar, k·rho)`. [`test_scaling_equivalence`] checks
//! that equality in distribution empirically through void probabilities,
//! which characterize a point process completely.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::plane::{Point, Shape};
use crate::rng::SeedTree;
use crate::stats::{two_proportion_z, wilson_interval, Confidence};

/// Parents of a Thomas cluster are sampled this many standard deviations
/// beyond the window so edge clusters still contribute offspring.
pub const THOMAS_GUARD_SIGMAS: f64 = 5.0;

/// Homogeneous PPP intensity (points per m²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PppParams {
    pub lambda: f64,
}

impl PppParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(format!(
                "PPP intensity must be finite and positive, got {lambda}"
            )));
        }
        Ok(PppParams { lambda })
    }
}

/// Offspring dispersion kernel of a cluster process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterKind {
    /// Offspring uniform on a disk of radius `rho` (Matérn cluster process).
    Matern,
    /// Offspring isotropic Gaussian with per-axis std `rho` (Thomas cluster process).
    Thomas,
}

impl ClusterKind {
    pub fn label(&self) -> &'static str {
        match self {
            ClusterKind::Matern => "mcp",
            ClusterKind::Thomas => "tcp",
        }
    }

    /// Displacement of one offspring point from its parent.
    pub fn displacement(&self, rho: f64, rng: &mut impl Rng) -> Point {
        match self {
            ClusterKind::Matern => {
                let r = rho * rng.random::<f64>().sqrt();
                let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                Point::new(r * theta.cos(), r * theta.sin())
            }
            ClusterKind::Thomas => {
                let nx: f64 = rng.sample(StandardNormal);
                let ny: f64 = rng.sample(StandardNormal);
                Point::new(rho * nx, rho * ny)
            }
        }
    }

    /// Window dilation that keeps edge parents' offspring from being
    /// undercounted: the full support for Matérn, 5σ for Thomas.
    pub fn guard_margin(&self, rho: f64) -> f64 {
        match self {
            ClusterKind::Matern => rho,
            ClusterKind::Thomas => THOMAS_GUARD_SIGMAS * rho,
        }
    }
}

/// Neyman–Scott cluster process parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcpParams {
    /// Parent PPP intensity (per m²).
    pub lambda_p: f64,
    /// Mean offspring count per parent.
    pub m_bar: f64,
    /// Cluster length scale: disk radius (Matérn) or per-axis std (Thomas).
    pub rho: f64,
    pub kind: ClusterKind,
}

impl PcpParams {
    pub fn new(lambda_p: f64, m_bar: f64, rho: f64, kind: ClusterKind) -> Result<Self> {
        for (name, v) in [("lambda_p", lambda_p), ("m_bar", m_bar), ("rho", rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "cluster process {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(PcpParams {
            lambda_p,
            m_bar,
            rho,
            kind,
        })
    }
}

/// Either process family, as accepted by the scaling-equivalence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessParams {
    Ppp(PppParams),
    Pcp(PcpParams),
}

impl ProcessParams {
    /// Length scale used to size default test regions: the mean
    /// nearest-point spacing for a PPP, the cluster scale for a PCP.
    pub fn characteristic_length(&self) -> f64 {
        match self {
            ProcessParams::Ppp(p) => 1.0 / p.lambda.sqrt(),
            ProcessParams::Pcp(p) => p.rho,
        }
    }

    /// Parameters of the process equal in distribution to this process
    /// scaled by `k`: `lambda/k²` for a PPP, `(lambda_p/k², m_bar, k·rho)`
    /// for a cluster process.
    pub fn reparameterized(&self, k: f64) -> Result<ProcessParams> {
        check_scale(k)?;
        Ok(match self {
            ProcessParams::Ppp(p) => ProcessParams::Ppp(PppParams::new(p.lambda / (k * k))?),
            ProcessParams::Pcp(p) => ProcessParams::Pcp(PcpParams::new(
                p.lambda_p / (k * k),
                p.m_bar,
                p.rho * k,
                p.kind,
            )?),
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProcessParams::Ppp(_) => "ppp",
            ProcessParams::Pcp(p) => p.kind.label(),
        }
    }
}

/// A finite realization of a point process together with its window.
///
/// `parents[i]` (when present) is the index of the parent that produced
/// `points[i]` in an accompanying parent pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<Point>,
    pub window: Shape,
    pub parents: Option<Vec<usize>>,
}

impl PointPattern {
    pub fn new(points: Vec<Point>, window: Shape) -> Self {
        PointPattern {
            points,
            window,
            parents: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count_in(&self, region: &Shape) -> usize {
        self.points.iter().filter(|p| region.contains(**p)).count()
    }

    /// Check the structural invariants: window membership and, when parent
    /// indices are present, their alignment and validity.
    pub fn validate(&self, parent_count: Option<usize>) -> Result<()> {
        for p in &self.points {
            if !self.window.contains(*p) {
                return Err(Error::invalid(format!(
                    "point ({}, {}) lies outside the window",
                    p.x, p.y
                )));
            }
        }
        if let Some(parents) = &self.parents {
            if parents.len() != self.points.len() {
                return Err(Error::invalid(
                    "parent index list length does not match point count".to_string(),
                ));
            }
            if let Some(n) = parent_count {
                if parents.iter().any(|&i| i >= n) {
                    return Err(Error::invalid(
                        "parent index out of range of the parent pattern".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn check_scale(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!(
            "scale factor must be finite and positive, got {k}"
        )));
    }
    Ok(())
}

pub(crate) fn poisson_count(mean: f64, rng: &mut impl Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    dist.sample(rng) as u64
}

/// Sample a homogeneous PPP on `window`: a Poisson(`lambda`·area) number of
/// i.i.d. uniform points.
pub fn sample_ppp(params: PppParams, window: Shape, rng: &mut impl Rng) -> Result<PointPattern> {
    if !(window.area() > 0.0) {
        return Err(Error::invalid("window must have positive area".to_string()));
    }
    let count = poisson_count(params.lambda * window.area(), rng);
    let points = (0..count).map(|_| window.sample_uniform(rng)).collect();
    Ok(PointPattern::new(points, window))
}

/// Sample a cluster process on `window`.
///
/// Parents are drawn on the window dilated by the kernel's guard margin so
/// clusters centered just outside still contribute; offspring falling
/// outside `window` are clipped. Returns `(offspring, parents)` with
/// offspring carrying parent indices.
pub fn sample_pcp(
    params: PcpParams,
    window: Shape,
    rng: &mut impl Rng,
) -> Result<(PointPattern, PointPattern)> {
    if !(window.area() > 0.0) {
        return Err(Error::invalid("window must have positive area".to_string()));
    }
    let parent_window = window.dilated(params.kind.guard_margin(params.rho));
    let parents = sample_ppp(PppParams::new(params.lambda_p)?, parent_window, rng)?;

    let mut points = Vec::new();
    let mut parent_idx = Vec::new();
    for (i, parent) in parents.points.iter().enumerate() {
        let n = poisson_count(params.m_bar, rng);
        for _ in 0..n {
            let p = *parent + params.kind.displacement(params.rho, rng);
            if window.contains(p) {
                points.push(p);
                parent_idx.push(i);
            }
        }
    }
    let offspring = PointPattern {
        points,
        window,
        parents: Some(parent_idx),
    };
    Ok((offspring, parents))
}

/// Map every point `x` to `k·x` and scale the window about the origin.
pub fn scale_pattern(pattern: &PointPattern, k: f64) -> Result<PointPattern> {
    check_scale(k)?;
    Ok(PointPattern {
        points: pattern.points.iter().map(|p| p.scaled(k)).collect(),
        window: pattern.window.scaled(k),
        parents: pattern.parents.clone(),
    })
}

/// A repeatable generator of point patterns over a fixed window.
pub trait PatternSampler {
    fn window(&self) -> Shape;
    fn sample(&self, rng: &mut dyn RngCore) -> PointPattern;
}

#[derive(Debug, Clone, Copy)]
pub struct PppSampler {
    pub params: PppParams,
    pub window: Shape,
}

impl PatternSampler for PppSampler {
    fn window(&self) -> Shape {
        self.window
    }

    fn sample(&self, rng: &mut dyn RngCore) -> PointPattern {
        sample_ppp(self.params, self.window, &mut &mut *rng).expect("validated PPP sampler")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PcpSampler {
    pub params: PcpParams,
    pub window: Shape,
}

impl PatternSampler for PcpSampler {
    fn window(&self) -> Shape {
        self.window
    }

    fn sample(&self, rng: &mut dyn RngCore) -> PointPattern {
        sample_pcp(self.params, self.window, &mut &mut *rng)
            .expect("validated PCP sampler")
            .0
    }
}

/// Wraps a sampler and scales each realization (and the window) by `k`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSampler<S> {
    inner: S,
    k: f64,
}

impl<S: PatternSampler> ScaledSampler<S> {
    pub fn new(inner: S, k: f64) -> Result<Self> {
        check_scale(k)?;
        Ok(ScaledSampler { inner, k })
    }
}

impl<S: PatternSampler> PatternSampler for ScaledSampler<S> {
    fn window(&self) -> Shape {
        self.inner.window().scaled(self.k)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> PointPattern {
        scale_pattern(&self.inner.sample(rng), self.k).expect("validated scale factor")
    }
}

/// Build the sampler for a process over `window`.
pub fn process_sampler(params: &ProcessParams, window: Shape) -> ProcessSampler {
    match params {
        ProcessParams::Ppp(p) => ProcessSampler::Ppp(PppSampler { params: *p, window }),
        ProcessParams::Pcp(p) => ProcessSampler::Pcp(PcpSampler { params: *p, window }),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ProcessSampler {
    Ppp(PppSampler),
    Pcp(PcpSampler),
}

impl PatternSampler for ProcessSampler {
    fn window(&self) -> Shape {
        match self {
            ProcessSampler::Ppp(s) => s.window(),
            ProcessSampler::Pcp(s) => s.window(),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> PointPattern {
        match self {
            ProcessSampler::Ppp(s) => s.sample(rng),
            ProcessSampler::Pcp(s) => s.sample(rng),
        }
    }
}

/// Monte Carlo void-probability estimate with a Wilson confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct VoidProbability {
    pub estimate: f64,
    pub ci: (f64, f64),
    pub void_count: u64,
    pub n_trials: u64,
}

fn void_counts(
    sampler: &impl PatternSampler,
    regions: &[Shape],
    n_trials: u64,
    rng: &mut dyn RngCore,
) -> Vec<u64> {
    let mut counts = vec![0u64; regions.len()];
    for _ in 0..n_trials {
        let pattern = sampler.sample(rng);
        for (c, region) in counts.iter_mut().zip(regions) {
            if !pattern.points.iter().any(|p| region.contains(*p)) {
                *c += 1;
            }
        }
    }
    counts
}

/// Estimate `P(no point of the process falls in region)` over `n_trials`
/// fresh realizations. The region must lie inside the sampler's window,
/// otherwise clipped points would bias the estimate.
pub fn estimate_void_probability(
    sampler: &impl PatternSampler,
    region: &Shape,
    n_trials: u64,
    confidence: Confidence,
    rng: &mut dyn RngCore,
) -> Result<VoidProbability> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be at least 1".to_string()));
    }
    if !sampler.window().contains_shape(region) {
        return Err(Error::invalid(
            "test region escapes the sampler window".to_string(),
        ));
    }
    let void_count = void_counts(sampler, std::slice::from_ref(region), n_trials, rng)[0];
    Ok(VoidProbability {
        estimate: void_count as f64 / n_trials as f64,
        ci: wilson_interval(void_count, n_trials, confidence.z()),
        void_count,
        n_trials,
    })
}

/// Per-region outcome of a two-sampler void-probability comparison.
#[derive(Debug, Clone)]
pub struct RegionComparison {
    pub region: Shape,
    pub lhs: VoidProbability,
    pub rhs: VoidProbability,
    pub z: f64,
    pub pass: bool,
}

/// Outcome of comparing two samplers over a set of regions.
#[derive(Debug, Clone)]
pub struct ScalingEquivalenceReport {
    pub k: f64,
    pub confidence: Confidence,
    pub regions: Vec<RegionComparison>,
    pub pass: bool,
}

/// Compare empirical void probabilities of two samplers on each region with
/// a pooled two-proportion z test at `confidence`. The samplers draw from
/// independent streams of `seeds`.
pub fn compare_void_probabilities(
    lhs: &impl PatternSampler,
    rhs: &impl PatternSampler,
    regions: &[Shape],
    n_trials: u64,
    confidence: Confidence,
    seeds: &SeedTree,
) -> Result<ScalingEquivalenceReport> {
    if regions.is_empty() {
        return Err(Error::invalid("at least one test region required".to_string()));
    }
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be at least 1".to_string()));
    }
    for (side, sampler_window) in [("lhs", lhs.window()), ("rhs", rhs.window())] {
        for region in regions {
            if !sampler_window.contains_shape(region) {
                return Err(Error::invalid(format!(
                    "test region escapes the {side} sampler window"
                )));
            }
        }
    }

    let counts_l = void_counts(lhs, regions, n_trials, &mut seeds.rng("void/lhs", 0));
    let counts_r = void_counts(rhs, regions, n_trials, &mut seeds.rng("void/rhs", 0));

    let z_crit = confidence.z();
    let comparisons: Vec<RegionComparison> = regions
        .iter()
        .zip(counts_l.iter().zip(&counts_r))
        .map(|(region, (&cl, &cr))| {
            let z = two_proportion_z(cl, n_trials, cr, n_trials);
            RegionComparison {
                region: *region,
                lhs: VoidProbability {
                    estimate: cl as f64 / n_trials as f64,
                    ci: wilson_interval(cl, n_trials, z_crit),
                    void_count: cl,
                    n_trials,
                },
                rhs: VoidProbability {
                    estimate: cr as f64 / n_trials as f64,
                    ci: wilson_interval(cr, n_trials, z_crit),
                    void_count: cr,
                    n_trials,
                },
                z,
                pass: z <= z_crit,
            }
        })
        .collect();

    let pass = comparisons.iter().all(|c| c.pass);
    Ok(ScalingEquivalenceReport {
        k: f64::NAN,
        confidence,
        regions: comparisons,
        pass,
    })
}

/// Headroom applied to the void-test window so a region touching the
/// nominal boundary still passes the containment check after scaling.
const REGION_WINDOW_HEADROOM: f64 = 1.05;

fn enclosing_radius(regions: &[Shape]) -> f64 {
    regions
        .iter()
        .map(|r| match *r {
            Shape::Disk { center, radius } => center.norm() + radius,
            Shape::Rect { min, max } => {
                let corners = [
                    Point::new(min.x, min.y),
                    Point::new(min.x, max.y),
                    Point::new(max.x, min.y),
                    Point::new(max.x, max.y),
                ];
                corners.iter().map(|c| c.norm()).fold(0.0, f64::max)
            }
        })
        .fold(0.0, f64::max)
}

/// Empirically check that the process scaled by `k` matches its
/// re-parameterized counterpart in distribution.
///
/// One side scales realizations of `params` drawn on a window shrunk by
/// `1/k`; the other samples `params.reparameterized(k)` directly. Void
/// probabilities on every region are compared at `confidence`.
pub fn test_scaling_equivalence(
    params: &ProcessParams,
    k: f64,
    regions: &[Shape],
    n_trials: u64,
    confidence: Confidence,
    seeds: &SeedTree,
) -> Result<ScalingEquivalenceReport> {
    check_scale(k)?;
    if regions.is_empty() {
        return Err(Error::invalid("at least one test region required".to_string()));
    }
    let radius = enclosing_radius(regions) * REGION_WINDOW_HEADROOM;
    if !(radius > 0.0) {
        return Err(Error::invalid("regions must have positive extent".to_string()));
    }
    let target_window = Shape::disk(Point::ORIGIN, radius)?;
    let base_window = Shape::disk(Point::ORIGIN, radius / k)?;

    let scaled = ScaledSampler::new(process_sampler(params, base_window), k)?;
    let reparam = process_sampler(&params.reparameterized(k)?, target_window);

    let mut report = compare_void_probabilities(&scaled, &reparam, regions, n_trials, confidence, seeds)?;
    report.k = k;
    Ok(report)
}

/// Default void-test regions: origin-centered disks with radii
/// `{0.5, 1, 2}` times the characteristic length, spanning sub- and
/// super-cluster scales.
pub fn default_void_regions(characteristic_length: f64) -> Vec<Shape> {
    [0.5, 1.0, 2.0]
        .iter()
        .map(|m| Shape::Disk {
            center: Point::ORIGIN,
            radius: m * characteristic_length,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;
    use proptest::prelude::*;

    fn rng(stream: u64) -> crate::rng::StreamRng {
        SeedTree::new(0xE0C0).rng("geometry-tests", stream)
    }

    #[test]
    fn ppp_mean_count_matches_intensity() {
        // Poisson mean = lambda * |A|; check within 3 standard errors.
        let mut r = rng(0);
        let params = PppParams::new(4.0).unwrap();
        let window = Shape::unit_square();
        let n = 10_000;
        let total: u64 = (0..n)
            .map(|_| sample_ppp(params, window, &mut r).unwrap().len() as u64)
            .sum();
        let mean = total as f64 / n as f64;
        let se = (4.0f64 / n as f64).sqrt();
        assert!(
            (mean - 4.0).abs() < 3.0 * se,
            "mean count {mean} too far from 4"
        );
    }

    #[test]
    fn ppp_count_variance_matches_intensity() {
        let mut r = rng(1);
        let params = PppParams::new(4.0).unwrap();
        let window = Shape::unit_square();
        let n = 10_000usize;
        let counts: Vec<f64> = (0..n)
            .map(|_| sample_ppp(params, window, &mut r).unwrap().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n as f64 - 1.0);
        // SE of a Poisson(λ) sample variance is roughly sqrt((2λ² + λ)/n).
        let se = ((2.0 * 16.0 + 4.0) / n as f64).sqrt();
        assert!(
            (var - 4.0).abs() < 4.0 * se,
            "count variance {var} too far from 4"
        );
    }

    #[test]
    fn ppp_void_probability_on_unit_square() {
        let mut r = rng(2);
        let sampler = PppSampler {
            params: PppParams::new(1.0).unwrap(),
            window: Shape::rect(Point::new(-1.0, -1.0), Point::new(2.0, 2.0)).unwrap(),
        };
        let region = Shape::unit_square();
        let vp =
            estimate_void_probability(&sampler, &region, 100_000, Confidence::P99, &mut r).unwrap();
        let expected = (-1.0f64).exp();
        assert!(
            vp.ci.0 <= expected && expected <= vp.ci.1,
            "e^-1={expected} outside CI {:?}",
            vp.ci
        );
    }

    #[test]
    fn vanishing_intensity_gives_empty_patterns() {
        let mut r = rng(3);
        let params = PppParams::new(1e-9).unwrap();
        for _ in 0..200 {
            assert!(sample_ppp(params, Shape::unit_square(), &mut r).unwrap().is_empty());
        }
    }

    #[test]
    fn empty_sampler_void_probability_is_one() {
        let mut r = rng(4);
        let sampler = PppSampler {
            params: PppParams::new(1e-12).unwrap(),
            window: Shape::disk(Point::ORIGIN, 4.0).unwrap(),
        };
        let region = Shape::disk(Point::ORIGIN, 1.0).unwrap();
        let vp = estimate_void_probability(&sampler, &region, 2_000, Confidence::P95, &mut r).unwrap();
        assert_eq!(vp.estimate, 1.0);
    }

    #[test]
    fn region_escaping_window_is_rejected() {
        let mut r = rng(5);
        let sampler = PppSampler {
            params: PppParams::new(1.0).unwrap(),
            window: Shape::disk(Point::ORIGIN, 1.0).unwrap(),
        };
        let region = Shape::disk(Point::new(0.5, 0.0), 1.0).unwrap();
        assert!(matches!(
            estimate_void_probability(&sampler, &region, 10, Confidence::P95, &mut r),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn matern_offspring_stay_within_cluster_radius() {
        let mut r = rng(6);
        let params = PcpParams::new(0.5, 4.0, 1.0, ClusterKind::Matern).unwrap();
        let window = Shape::disk(Point::ORIGIN, 8.0).unwrap();
        for _ in 0..50 {
            let (offspring, parents) = sample_pcp(params, window, &mut r).unwrap();
            offspring.validate(Some(parents.len())).unwrap();
            let idx = offspring.parents.as_ref().unwrap();
            for (p, &pi) in offspring.points.iter().zip(idx) {
                assert!(p.dist(parents.points[pi]) <= params.rho);
            }
        }
    }

    #[test]
    fn thomas_mean_squared_displacement_is_two_sigma_squared() {
        let mut r = rng(7);
        let sigma = 0.5;
        let params = PcpParams::new(0.5, 4.0, sigma, ClusterKind::Thomas).unwrap();
        let window = Shape::disk(Point::ORIGIN, 30.0).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        while count < 20_000 {
            let (offspring, parents) = sample_pcp(params, window, &mut r).unwrap();
            let idx = offspring.parents.as_ref().unwrap();
            for (p, &pi) in offspring.points.iter().zip(idx) {
                let d = p.dist(parents.points[pi]);
                sum += d * d;
                count += 1;
            }
        }
        let msd = sum / count as f64;
        let expected = 2.0 * sigma * sigma;
        // Var(D²) = 4σ⁴ for an exponential D² with mean 2σ².
        let se = 2.0 * sigma * sigma / (count as f64).sqrt();
        assert!(
            (msd - expected).abs() < 4.0 * se,
            "MSD {msd} too far from {expected}"
        );
    }

    #[test]
    fn tiny_mean_offspring_gives_empty_patterns() {
        let mut r = rng(8);
        let params = PcpParams::new(0.5, 1e-9, 1.0, ClusterKind::Thomas).unwrap();
        let window = Shape::disk(Point::ORIGIN, 5.0).unwrap();
        for _ in 0..100 {
            let (offspring, _) = sample_pcp(params, window, &mut r).unwrap();
            assert!(offspring.is_empty());
        }
    }

    #[test]
    fn scale_pattern_examples() {
        let window = Shape::disk(Point::ORIGIN, 10.0).unwrap();
        let pattern = PointPattern::new(vec![Point::new(1.0, 2.0), Point::new(-3.0, 0.0)], window);
        let scaled = scale_pattern(&pattern, 2.0).unwrap();
        assert_eq!(scaled.points, vec![Point::new(2.0, 4.0), Point::new(-6.0, 0.0)]);
        assert_eq!(scaled.window, window.scaled(2.0));

        let identity = scale_pattern(&pattern, 1.0).unwrap();
        assert_eq!(identity, pattern);

        assert!(scale_pattern(&pattern, 0.0).is_err());
        assert!(scale_pattern(&pattern, -2.0).is_err());
    }

    #[test]
    fn scaled_ppp_void_probability_matches_reparameterization() {
        // A PPP(4) scaled by 2 has void probability exp(-pi) on the unit disk.
        let mut r = rng(9);
        let base = PppSampler {
            params: PppParams::new(4.0).unwrap(),
            window: Shape::disk(Point::ORIGIN, 2.0).unwrap(),
        };
        let sampler = ScaledSampler::new(base, 2.0).unwrap();
        let region = Shape::disk(Point::ORIGIN, 1.0).unwrap();
        let vp =
            estimate_void_probability(&sampler, &region, 100_000, Confidence::P99, &mut r).unwrap();
        let expected = (-std::f64::consts::PI).exp();
        assert!(
            vp.ci.0 <= expected && expected <= vp.ci.1,
            "exp(-pi)={expected} outside CI {:?}",
            vp.ci
        );
    }

    #[test]
    fn scaling_equivalence_for_ppp() {
        let seeds = SeedTree::new(1001);
        let params = ProcessParams::Ppp(PppParams::new(2.0).unwrap());
        let regions = vec![Shape::disk(Point::ORIGIN, 1.0).unwrap()];
        let report =
            test_scaling_equivalence(&params, 3.0, &regions, 40_000, Confidence::P99, &seeds)
                .unwrap();
        assert!(report.pass, "report: {report:?}");
        // And the re-parameterized void probability matches exp(-(2/9)π).
        let expected = (-(2.0 / 9.0) * std::f64::consts::PI).exp();
        let est = report.regions[0].rhs.estimate;
        assert!((est - expected).abs() < 0.01, "{est} vs {expected}");
    }

    #[test]
    fn scaling_equivalence_for_mcp() {
        let seeds = SeedTree::new(1002);
        let params =
            ProcessParams::Pcp(PcpParams::new(1.0, 4.0, 0.5, ClusterKind::Matern).unwrap());
        let regions = default_void_regions(0.5);
        let report =
            test_scaling_equivalence(&params, 2.0, &regions, 30_000, Confidence::P99, &seeds)
                .unwrap();
        assert!(report.pass, "report: {report:?}");
    }

    #[test]
    fn scaling_equivalence_trivial_at_k_one() {
        let seeds = SeedTree::new(1003);
        let params = ProcessParams::Ppp(PppParams::new(1.0).unwrap());
        let regions = default_void_regions(1.0);
        let report =
            test_scaling_equivalence(&params, 1.0, &regions, 10_000, Confidence::P99, &seeds)
                .unwrap();
        assert!(report.pass);
    }

    #[test]
    fn wrong_reparameterization_fails() {
        // lambda/k instead of lambda/k² must be detected.
        let seeds = SeedTree::new(1004);
        let k = 2.0;
        let window = Shape::disk(Point::ORIGIN, 2.1).unwrap();
        let scaled = ScaledSampler::new(
            PppSampler {
                params: PppParams::new(1.0).unwrap(),
                window: window.scaled(1.0 / k),
            },
            k,
        )
        .unwrap();
        let wrong = PppSampler {
            params: PppParams::new(1.0 / k).unwrap(),
            window,
        };
        let regions = vec![Shape::disk(Point::ORIGIN, 1.0).unwrap()];
        let report =
            compare_void_probabilities(&scaled, &wrong, &regions, 50_000, Confidence::P99, &seeds)
                .unwrap();
        assert!(!report.pass, "wrong rule must fail: {report:?}");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(PppParams::new(0.0).is_err());
        assert!(PppParams::new(f64::INFINITY).is_err());
        assert!(PcpParams::new(1.0, 0.0, 1.0, ClusterKind::Thomas).is_err());
        assert!(PcpParams::new(1.0, 1.0, -1.0, ClusterKind::Matern).is_err());
    }

    proptest! {
        #[test]
        fn scaling_composes_multiplicatively(
            a in 0.1f64..10.0,
            b in 0.1f64..10.0,
            xs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 0..40),
        ) {
            let window = Shape::disk(Point::ORIGIN, 100.0).unwrap();
            let pattern = PointPattern::new(
                xs.into_iter().map(|(x, y)| Point::new(x, y)).collect(),
                window,
            );
            let two_step = scale_pattern(&scale_pattern(&pattern, a).unwrap(), b).unwrap();
            let one_step = scale_pattern(&pattern, a * b).unwrap();
            for (p, q) in two_step.points.iter().zip(&one_step.points) {
                let scale = p.norm().max(1e-300);
                prop_assert!(p.dist(*q) <= 1e-12 * scale);
            }
        }

        #[test]
        fn sampled_points_lie_in_window(seed in 0u64..1000) {
            let mut r = SeedTree::new(seed).rng("prop-window", 0);
            let window = Shape::disk(Point::new(1.0, -1.0), 3.0).unwrap();
            let pattern = sample_ppp(PppParams::new(2.0).unwrap(), window, &mut r).unwrap();
            pattern.validate(None).unwrap();
            let (offspring, parents) = sample_pcp(
                PcpParams::new(0.5, 3.0, 0.4, ClusterKind::Thomas).unwrap(),
                window,
                &mut r,
            ).unwrap();
            offspring.validate(Some(parents.len())).unwrap();
        }
    }
}
