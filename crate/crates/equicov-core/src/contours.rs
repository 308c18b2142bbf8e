//! Equi-coverage parameter families: generation, verification, level sets.
//!
//! Scaling every node position by `k` and every finite pathloss breakpoint
//! by `k` leaves the per-realization SIR unchanged, so re-parameterizing
//! the point processes accordingly produces a family of configurations with
//! identical meta distributions:
//!
//! * independent PPPs: only the BS process needs rescaling, `lambda_b/k²`;
//! * coupled user clusters on a BS PPP: `(lambda_b/k², m_bar, k·rho)` users
//!   and `lambda_b/k²` BSs;
//! * shared-parent clusters: `lambda_p/k²` and `k·rho` on both processes,
//!   mean offspring counts untouched.
//!
//! [`verify_contour`] checks family membership by simulation, either with
//! independent randomness (an honest statistical test) or in a paired mode
//! that reuses the base realizations and fading, turning the comparison
//! into the exact per-realization identity. [`sweep_level_sets`] estimates
//! mean coverage over a parameter grid and extracts iso-coverage polylines
//! with marching squares for contour plots.

use rayon::prelude::*;

use crate::coverage::{
    conditional_coverage_resolved, meta_distribution, resolve_inner, CoverageConfig,
    MetaDistEstimate,
};
use crate::error::{Error, Result};
use crate::geometry::{PcpParams, PppParams};
use crate::netmodels::{auto_window, sample_scene, NetworkModel};
use crate::plane::{Point, Shape};
use crate::propagation::PathlossModel;
use crate::rng::SeedTree;
use crate::stats::{permutation_sup_gap_band, sup_ccdf_gap, Confidence};

/// A base configuration plus the scale factors that generate its family.
#[derive(Debug, Clone)]
pub struct ContourSpec {
    pub model: NetworkModel,
    pub pathloss: PathlossModel,
    pub k_values: Vec<f64>,
}

/// Whether the pathloss breakpoints scale along with the point processes.
/// [`ScalingRule::FixBoundaries`] deliberately breaks the family and serves
/// as the negative control; with single-slope pathloss the two rules
/// coincide (there is no breakpoint to scale).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRule {
    ScaleBoundaries,
    FixBoundaries,
}

/// Independent resampling per `k`, or common random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every configuration simulated with fresh randomness; equality is
    /// tested statistically.
    Independent,
    /// Base realizations and fading are reused and rescaled, so matching
    /// configurations must agree realization by realization to near
    /// machine precision.
    Paired,
}

/// Knobs for [`verify_contour`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    pub rule: ScalingRule,
    /// Mean coverages must agree within this many combined standard errors.
    pub tolerance_se: f64,
    /// Confidence of the permutation null band for the sup CCDF gap.
    pub band_confidence: Confidence,
    pub n_permutations: u32,
    /// Per-realization gap allowed in paired mode.
    pub paired_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: VerifyMode::Independent,
            rule: ScalingRule::ScaleBoundaries,
            tolerance_se: 3.0,
            band_confidence: Confidence::P999,
            n_permutations: 400,
            paired_tolerance: 1e-9,
        }
    }
}

/// The configuration whose network matches the base one scaled by `k`.
pub fn scale_config(
    model: &NetworkModel,
    pathloss: &PathlossModel,
    k: f64,
) -> Result<(NetworkModel, PathlossModel)> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!(
            "scale factor must be finite and positive, got {k}"
        )));
    }
    let k2 = k * k;
    let scaled_model = match model {
        NetworkModel::PppPpp { users, bs } => NetworkModel::PppPpp {
            // Independent stationary user process: scaling it is not needed
            // for family membership, so it is left untouched.
            users: *users,
            bs: PppParams::new(bs.lambda / k2)?,
        },
        NetworkModel::PcpPpp { users, bs } => NetworkModel::PcpPpp {
            users: PcpParams::new(bs.lambda / k2, users.m_bar, users.rho * k, users.kind)?,
            bs: PppParams::new(bs.lambda / k2)?,
        },
        NetworkModel::PcpPcp { users, bs } => NetworkModel::PcpPcp {
            users: PcpParams::new(users.lambda_p / k2, users.m_bar, users.rho * k, users.kind)?,
            bs: PcpParams::new(bs.lambda_p / k2, bs.m_bar, bs.rho * k, bs.kind)?,
        },
    };
    Ok((scaled_model, pathloss.scaled(k)?))
}

/// Per-`k` comparison against the base configuration.
#[derive(Debug, Clone)]
pub struct ContourCheck {
    pub k: f64,
    pub mean_coverage: f64,
    pub mean_ci: (f64, f64),
    /// |mean_k - mean_base| in combined standard errors.
    pub mean_gap_z: f64,
    /// Sup over the reliability grid of the CCDF difference to the base.
    pub sup_gap: f64,
    /// Permutation null band for the sup gap (independent mode only).
    pub sup_gap_limit: Option<f64>,
    /// Largest per-realization coverage difference (paired mode only).
    pub paired_max_gap: Option<f64>,
    pub pass: bool,
}

/// Verdict over the whole scale family.
#[derive(Debug, Clone)]
pub struct ContourVerdict {
    pub base_mean: f64,
    pub base_ci: (f64, f64),
    pub checks: Vec<ContourCheck>,
    pub pass: bool,
}

/// Simulate the base configuration and each `k`-scaled configuration and
/// test that they share one meta distribution.
///
/// The simulation window scales with `k` so truncation acts identically on
/// both sides of the comparison.
pub fn verify_contour(
    spec: &ContourSpec,
    cfg: &CoverageConfig,
    window: Shape,
    seeds: &SeedTree,
    opts: &VerifyOptions,
) -> Result<ContourVerdict> {
    if spec.k_values.is_empty() {
        return Err(Error::invalid("at least one scale factor required"));
    }
    for &k in &spec.k_values {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!(
                "scale factor must be finite and positive, got {k}"
            )));
        }
    }
    match opts.mode {
        VerifyMode::Independent => verify_independent(spec, cfg, window, seeds, opts),
        VerifyMode::Paired => verify_paired(spec, cfg, window, seeds, opts),
    }
}

fn scaled_pathloss(pathloss: &PathlossModel, k: f64, rule: ScalingRule) -> Result<PathlossModel> {
    match rule {
        ScalingRule::ScaleBoundaries => pathloss.scaled(k),
        ScalingRule::FixBoundaries => Ok(pathloss.clone()),
    }
}

fn verify_independent(
    spec: &ContourSpec,
    cfg: &CoverageConfig,
    window: Shape,
    seeds: &SeedTree,
    opts: &VerifyOptions,
) -> Result<ContourVerdict> {
    let base = meta_distribution(&spec.model, &spec.pathloss, cfg, window, &seeds.child("base"))?;
    base.check_consistency()?;

    let mut checks = Vec::with_capacity(spec.k_values.len());
    for (i, &k) in spec.k_values.iter().enumerate() {
        let (model_k, _) = scale_config(&spec.model, &spec.pathloss, k)?;
        let pathloss_k = scaled_pathloss(&spec.pathloss, k, opts.rule)?;
        let est = meta_distribution(
            &model_k,
            &pathloss_k,
            cfg,
            window.scaled(k),
            &seeds.child(&format!("k{i}")),
        )?;
        est.check_consistency()?;
        checks.push(independent_check(
            k,
            &base,
            &est,
            cfg,
            opts,
            &mut seeds.rng("permute", i as u64),
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ContourVerdict {
        base_mean: base.mean_coverage,
        base_ci: base.mean_ci,
        checks,
        pass,
    })
}

fn independent_check(
    k: f64,
    base: &MetaDistEstimate,
    est: &MetaDistEstimate,
    cfg: &CoverageConfig,
    opts: &VerifyOptions,
    permute_rng: &mut crate::rng::StreamRng,
) -> ContourCheck {
    let combined_se = (base.mean_se * base.mean_se + est.mean_se * est.mean_se).sqrt();
    let mean_gap_z = if combined_se == 0.0 {
        if est.mean_coverage == base.mean_coverage {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (est.mean_coverage - base.mean_coverage).abs() / combined_se
    };
    let sup_gap = sup_ccdf_gap(&cfg.epsilon_grid, &base.samples, &est.samples);
    let limit = permutation_sup_gap_band(
        &cfg.epsilon_grid,
        &base.samples,
        &est.samples,
        opts.n_permutations,
        opts.band_confidence,
        permute_rng,
    );
    let pass = mean_gap_z <= opts.tolerance_se && sup_gap <= limit;
    ContourCheck {
        k,
        mean_coverage: est.mean_coverage,
        mean_ci: est.mean_ci,
        mean_gap_z,
        sup_gap,
        sup_gap_limit: Some(limit),
        paired_max_gap: None,
        pass,
    }
}

fn verify_paired(
    spec: &ContourSpec,
    cfg: &CoverageConfig,
    window: Shape,
    seeds: &SeedTree,
    opts: &VerifyOptions,
) -> Result<ContourVerdict> {
    let inner = resolve_inner(cfg)?;
    let pathlosses: Vec<PathlossModel> = spec
        .k_values
        .iter()
        .map(|&k| scaled_pathloss(&spec.pathloss, k, opts.rule))
        .collect::<Result<Vec<_>>>()?;

    // rows[i] = (base coverage, per-k coverages) for realization i, with
    // identical fading streams on every side.
    let rows: Vec<(f64, Vec<f64>)> = (0..cfg.n_outer)
        .into_par_iter()
        .map(|i| {
            let mut scene_rng = seeds.rng("scene", i);
            let scene = sample_scene(&spec.model, window, &cfg.scene, &mut scene_rng)?;
            let inner_rng = seeds.rng("inner", i);
            let p_base = conditional_coverage_resolved(
                &scene,
                &spec.pathloss,
                cfg,
                inner,
                &mut inner_rng.clone(),
            )?;
            let mut per_k = Vec::with_capacity(spec.k_values.len());
            for (k, pathloss_k) in spec.k_values.iter().zip(&pathlosses) {
                let scaled_scene = crate::netmodels::TypicalUserScene {
                    user: scene.user.scaled(*k),
                    bs_pattern: crate::geometry::scale_pattern(&scene.bs_pattern, *k)?,
                    own_cluster_bs: scene.own_cluster_bs.clone(),
                };
                per_k.push(conditional_coverage_resolved(
                    &scaled_scene,
                    pathloss_k,
                    cfg,
                    inner,
                    &mut inner_rng.clone(),
                )?);
            }
            Ok((p_base, per_k))
        })
        .collect::<Result<Vec<_>>>()?;

    let base_samples: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let base = MetaDistEstimate::from_samples(
        base_samples,
        cfg.epsilon_grid.clone(),
        cfg.confidence,
    );

    let mut checks = Vec::with_capacity(spec.k_values.len());
    for (j, &k) in spec.k_values.iter().enumerate() {
        let samples: Vec<f64> = rows.iter().map(|r| r.1[j]).collect();
        let max_gap = rows
            .iter()
            .map(|r| (r.1[j] - r.0).abs())
            .fold(0.0, f64::max);
        let est =
            MetaDistEstimate::from_samples(samples, cfg.epsilon_grid.clone(), cfg.confidence);
        let sup_gap = sup_ccdf_gap(&cfg.epsilon_grid, &base.samples, &est.samples);
        checks.push(ContourCheck {
            k,
            mean_coverage: est.mean_coverage,
            mean_ci: est.mean_ci,
            mean_gap_z: f64::NAN,
            sup_gap,
            sup_gap_limit: None,
            paired_max_gap: Some(max_gap),
            pass: max_gap <= opts.paired_tolerance,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ContourVerdict {
        base_mean: base.mean_coverage,
        base_ci: base.mean_ci,
        checks,
        pass,
    })
}

/// Which model parameter a sweep axis drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// BS intensity (parent intensity for the shared-parent model).
    BsIntensity,
    /// Cluster length scale of the cluster process(es).
    ClusterScale,
    /// First finite pathloss breakpoint (requires at least two slopes).
    FirstBoundary,
}

impl SweepParam {
    pub fn label(&self) -> &'static str {
        match self {
            SweepParam::BsIntensity => "lambda_b_per_m2",
            SweepParam::ClusterScale => "rho_m",
            SweepParam::FirstBoundary => "r_c1_m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisScale {
    Linear,
    Log,
}

impl AxisScale {
    pub fn label(&self) -> &'static str {
        match self {
            AxisScale::Linear => "linear",
            AxisScale::Log => "log",
        }
    }
}

/// One sweep axis: a parameter, its range and spacing.
#[derive(Debug, Clone, Copy)]
pub struct AxisSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: AxisScale,
}

impl AxisSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.max > self.min)
        {
            return Err(Error::invalid(format!(
                "axis range must satisfy 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 3 {
            return Err(Error::invalid("each sweep axis needs at least 3 points"));
        }
        Ok(())
    }

    /// Grid node values along the axis.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n).map(|i| self.value_at(i as f64)).collect()
    }

    /// Value at a fractional grid index (used by contour interpolation).
    fn value_at(&self, idx: f64) -> f64 {
        let t = idx / (self.points - 1) as f64;
        match self.scale {
            AxisScale::Linear => self.min + t * (self.max - self.min),
            AxisScale::Log => {
                let (lo, hi) = (self.min.ln(), self.max.ln());
                (lo + t * (hi - lo)).exp()
            }
        }
    }
}

/// A parameter-plane sweep: base configuration, two axes and the coverage
/// levels whose contours should be extracted.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub model: NetworkModel,
    pub pathloss: PathlossModel,
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub levels: Vec<f64>,
    /// Tail fraction for per-cell auto window sizing.
    pub window_tail_fraction: f64,
}

/// Iso-coverage polylines for one level, in parameter coordinates.
#[derive(Debug, Clone)]
pub struct LevelSet {
    pub level: f64,
    pub polylines: Vec<Vec<Point>>,
}

/// Mean-coverage field on the grid plus extracted level sets.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// `coverage[ix][iy]` is the mean coverage at `(x_values[ix], y_values[iy])`.
    pub coverage: Vec<Vec<f64>>,
    pub level_sets: Vec<LevelSet>,
}

fn apply_param(
    model: &NetworkModel,
    pathloss: &PathlossModel,
    param: SweepParam,
    value: f64,
) -> Result<(NetworkModel, PathlossModel)> {
    match param {
        SweepParam::BsIntensity => {
            let model = match model {
                NetworkModel::PppPpp { users, .. } => NetworkModel::PppPpp {
                    users: *users,
                    bs: PppParams::new(value)?,
                },
                NetworkModel::PcpPpp { users, .. } => NetworkModel::PcpPpp {
                    users: PcpParams::new(value, users.m_bar, users.rho, users.kind)?,
                    bs: PppParams::new(value)?,
                },
                NetworkModel::PcpPcp { users, bs } => NetworkModel::PcpPcp {
                    users: PcpParams::new(value, users.m_bar, users.rho, users.kind)?,
                    bs: PcpParams::new(value, bs.m_bar, bs.rho, bs.kind)?,
                },
            };
            Ok((model, pathloss.clone()))
        }
        SweepParam::ClusterScale => {
            let model = match model {
                NetworkModel::PppPpp { .. } => {
                    return Err(Error::invalid(
                        "cluster-scale sweeps need a cluster process in the model",
                    ))
                }
                NetworkModel::PcpPpp { users, bs } => NetworkModel::PcpPpp {
                    users: PcpParams::new(users.lambda_p, users.m_bar, value, users.kind)?,
                    bs: *bs,
                },
                NetworkModel::PcpPcp { users, bs } => NetworkModel::PcpPcp {
                    users: PcpParams::new(users.lambda_p, users.m_bar, value, users.kind)?,
                    bs: PcpParams::new(bs.lambda_p, bs.m_bar, value, bs.kind)?,
                },
            };
            Ok((model, pathloss.clone()))
        }
        SweepParam::FirstBoundary => {
            let mut boundaries = pathloss.boundaries().to_vec();
            if boundaries.is_empty() {
                return Err(Error::invalid(
                    "breakpoint sweeps need a multi-slope pathloss model",
                ));
            }
            boundaries[0] = value;
            Ok((*model, PathlossModel::new(&boundaries, pathloss.alphas())?))
        }
    }
}

/// Estimate mean coverage on the grid and extract iso-coverage polylines by
/// marching squares with bilinear edge interpolation.
///
/// Requested levels outside the observed coverage range produce an empty
/// level set and a logged notice.
pub fn sweep_level_sets(
    spec: &SweepSpec,
    cfg: &CoverageConfig,
    seeds: &SeedTree,
) -> Result<SweepResult> {
    spec.x.validate()?;
    spec.y.validate()?;
    if spec.levels.iter().any(|l| !(0.0 < *l && *l < 1.0)) {
        return Err(Error::invalid("contour levels must lie in (0,1)"));
    }
    let x_values = spec.x.values();
    let y_values = spec.y.values();

    let cells: Vec<(usize, usize)> = (0..x_values.len())
        .flat_map(|ix| (0..y_values.len()).map(move |iy| (ix, iy)))
        .collect();
    let flat: Vec<f64> = cells
        .par_iter()
        .map(|&(ix, iy)| {
            let (model_x, pathloss_x) =
                apply_param(&spec.model, &spec.pathloss, spec.x.param, x_values[ix])?;
            let (model_xy, pathloss_xy) =
                apply_param(&model_x, &pathloss_x, spec.y.param, y_values[iy])?;
            let window = auto_window(&model_xy, &pathloss_xy, spec.window_tail_fraction)?;
            let est = meta_distribution(
                &model_xy,
                &pathloss_xy,
                cfg,
                window,
                &seeds.child(&format!("cell{ix}_{iy}")),
            )?;
            Ok(est.mean_coverage)
        })
        .collect::<Result<Vec<f64>>>()?;

    let ny = y_values.len();
    let coverage: Vec<Vec<f64>> = flat.chunks(ny).map(|c| c.to_vec()).collect();

    let (lo, hi) = flat
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let level_sets = spec
        .levels
        .iter()
        .map(|&level| {
            if level < lo || level > hi {
                log::warn!(
                    "contour level {level} outside the observed coverage range [{lo}, {hi}]; \
                     emitting an empty level set"
                );
            }
            let polylines = march_level(&coverage, level)
                .into_iter()
                .map(|poly| {
                    poly.into_iter()
                        .map(|(fx, fy)| Point::new(spec.x.value_at(fx), spec.y.value_at(fy)))
                        .collect()
                })
                .collect();
            LevelSet { level, polylines }
        })
        .collect();

    Ok(SweepResult {
        x_values,
        y_values,
        coverage,
        level_sets,
    })
}

type GridVertex = (f64, f64);

/// Marching squares over `values[ix][iy]`, returning polylines in
/// fractional grid-index coordinates.
fn march_level(values: &[Vec<f64>], level: f64) -> Vec<Vec<GridVertex>> {
    let nx = values.len();
    let ny = values.first().map_or(0, |c| c.len());
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let mut segments: Vec<(GridVertex, GridVertex)> = Vec::new();
    for ix in 0..nx - 1 {
        for iy in 0..ny - 1 {
            let v = [
                values[ix][iy],
                values[ix + 1][iy],
                values[ix + 1][iy + 1],
                values[ix][iy + 1],
            ];
            let mut mask = 0usize;
            for (bit, val) in v.iter().enumerate() {
                if *val >= level {
                    mask |= 1 << bit;
                }
            }
            if mask == 0 || mask == 15 {
                continue;
            }
            let x = ix as f64;
            let y = iy as f64;
            // Crossing point on each cell edge, linear in the corner values.
            let t = |a: f64, b: f64| (level - a) / (b - a);
            let bottom = || (x + t(v[0], v[1]), y);
            let right = || (x + 1.0, y + t(v[1], v[2]));
            let top = || (x + t(v[3], v[2]), y + 1.0);
            let left = || (x, y + t(v[0], v[3]));

            match mask {
                1 => segments.push((left(), bottom())),
                2 => segments.push((bottom(), right())),
                3 => segments.push((left(), right())),
                4 => segments.push((right(), top())),
                6 => segments.push((bottom(), top())),
                7 => segments.push((left(), top())),
                8 => segments.push((top(), left())),
                9 => segments.push((bottom(), top())),
                11 => segments.push((right(), top())),
                12 => segments.push((right(), left())),
                13 => segments.push((bottom(), right())),
                14 => segments.push((left(), bottom())),
                5 | 10 => {
                    // Saddle: disambiguate with the cell-center average.
                    let center = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                    let center_inside = center >= level;
                    let diag_bits_05 = mask == 5;
                    if diag_bits_05 == center_inside {
                        segments.push((bottom(), right()));
                        segments.push((top(), left()));
                    } else {
                        segments.push((left(), bottom()));
                        segments.push((right(), top()));
                    }
                }
                _ => unreachable!("masks 0 and 15 are filtered above"),
            }
        }
    }
    stitch_segments(segments)
}

fn vertex_key(v: GridVertex) -> (i64, i64) {
    ((v.0 * 1e9).round() as i64, (v.1 * 1e9).round() as i64)
}

/// Join segments that share endpoints into polylines. Zero-length segments
/// (contours passing exactly through a grid node) are dropped first; they
/// carry no geometry and would create spurious junctions.
fn stitch_segments(segments: Vec<(GridVertex, GridVertex)>) -> Vec<Vec<GridVertex>> {
    use std::collections::HashMap;
    let segments: Vec<(GridVertex, GridVertex)> = segments
        .into_iter()
        .filter(|(a, b)| vertex_key(*a) != vertex_key(*b))
        .collect();
    let mut adjacency: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(vertex_key(*a)).or_default().push(i);
        adjacency.entry(vertex_key(*b)).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut line = vec![a, b];

        // Extend each end until no unused segment continues it.
        for end in 0..2 {
            loop {
                let tip = if end == 0 { *line.last().unwrap() } else { line[0] };
                let Some(candidates) = adjacency.get(&vertex_key(tip)) else {
                    break;
                };
                let Some(&next) = candidates.iter().find(|&&i| !used[i]) else {
                    break;
                };
                used[next] = true;
                let (na, nb) = segments[next];
                let far = if vertex_key(na) == vertex_key(tip) { nb } else { na };
                if end == 0 {
                    line.push(far);
                } else {
                    line.insert(0, far);
                }
            }
        }
        polylines.push(line);
    }
    polylines
}
