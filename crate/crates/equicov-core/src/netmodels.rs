//! Joint user/base-station network models and typical-user scene sampling.
//!
//! Three deployment models are supported:
//!
//! * [`NetworkModel::PppPpp`] — independent user and BS Poisson processes;
//! * [`NetworkModel::PcpPpp`] — users form a cluster process whose parent
//!   process *is* the BS PPP (small cells at hotspot centers), so the two
//!   are coupled and the user parent intensity equals the BS intensity;
//! * [`NetworkModel::PcpPcp`] — user and BS cluster processes driven by one
//!   common parent PPP, conditionally independent given the parents.
//!
//! Coverage statistics are taken at a *typical user*. [`sample_scene`]
//! realizes the network as seen from that user placed at the origin: for
//! cluster-process users the user's own cluster is materialized explicitly
//! (center displaced by one offspring draw), the rest of the network
//! unconditionally. [`sample_scene_ergodic`] instead samples the full joint
//! process and picks a random user near the window center; agreement of the
//! two estimators is a consistency check on the construction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{poisson_count, sample_ppp, ClusterKind, PcpParams, PointPattern, PppParams};
use crate::plane::{Point, Shape};
use crate::propagation::PathlossModel;
use crate::rng::fork;

/// User and base-station point process configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetworkModel {
    /// Independent user and BS PPPs.
    PppPpp { users: PppParams, bs: PppParams },
    /// User cluster process whose parents are the BS PPP itself
    /// (`users.lambda_p == bs.lambda` by construction).
    PcpPpp { users: PcpParams, bs: PppParams },
    /// User and BS cluster processes sharing one parent PPP
    /// (`users.lambda_p == bs.lambda_p` by construction).
    PcpPcp { users: PcpParams, bs: PcpParams },
}

impl NetworkModel {
    /// Independent PPP users and PPP base stations.
    pub fn ppp_ppp(lambda_u: f64, lambda_b: f64) -> Result<Self> {
        Ok(NetworkModel::PppPpp {
            users: PppParams::new(lambda_u)?,
            bs: PppParams::new(lambda_b)?,
        })
    }

    /// Clustered users centered on the BS PPP.
    pub fn pcp_ppp(lambda_b: f64, user_m_bar: f64, user_rho: f64, kind: ClusterKind) -> Result<Self> {
        Ok(NetworkModel::PcpPpp {
            users: PcpParams::new(lambda_b, user_m_bar, user_rho, kind)?,
            bs: PppParams::new(lambda_b)?,
        })
    }

    /// User and BS cluster processes on a shared parent PPP.
    pub fn pcp_pcp(users: PcpParams, bs: PcpParams) -> Result<Self> {
        if users.lambda_p != bs.lambda_p {
            return Err(Error::invalid(format!(
                "shared-parent model requires equal parent intensities, got {} and {}",
                users.lambda_p, bs.lambda_p
            )));
        }
        Ok(NetworkModel::PcpPcp { users, bs })
    }

    /// Enforce the structural coupling constraints.
    pub fn validate(&self) -> Result<()> {
        match self {
            NetworkModel::PppPpp { .. } => Ok(()),
            NetworkModel::PcpPpp { users, bs } => {
                if users.lambda_p != bs.lambda {
                    Err(Error::invalid(
                        "user parent intensity must equal the BS intensity",
                    ))
                } else {
                    Ok(())
                }
            }
            NetworkModel::PcpPcp { users, bs } => {
                if users.lambda_p != bs.lambda_p {
                    Err(Error::invalid(
                        "user and BS cluster processes must share the parent intensity",
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Stationary intensity of the base-station process.
    pub fn bs_intensity(&self) -> f64 {
        match self {
            NetworkModel::PppPpp { bs, .. } => bs.lambda,
            NetworkModel::PcpPpp { bs, .. } => bs.lambda,
            NetworkModel::PcpPcp { bs, .. } => bs.lambda_p * bs.m_bar,
        }
    }

    /// Guard margin needed so edge clusters of the BS process are not lost.
    fn bs_guard_margin(&self) -> f64 {
        match self {
            NetworkModel::PcpPcp { bs, .. } => bs.kind.guard_margin(bs.rho),
            _ => 0.0,
        }
    }

    /// Largest cluster length scale in the model (0 for pure PPP).
    pub fn cluster_margin(&self) -> f64 {
        match self {
            NetworkModel::PppPpp { .. } => 0.0,
            NetworkModel::PcpPpp { users, .. } => users.kind.guard_margin(users.rho),
            NetworkModel::PcpPcp { users, bs } => bs
                .kind
                .guard_margin(bs.rho)
                .max(users.kind.guard_margin(users.rho)),
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            NetworkModel::PppPpp { .. } => "ppp_ppp",
            NetworkModel::PcpPpp { .. } => "pcp_ppp",
            NetworkModel::PcpPcp { .. } => "pcp_pcp",
        }
    }

    /// Key/value description for CSV metadata blocks.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut kv = vec![("model_kind".to_string(), self.kind_label().to_string())];
        match self {
            NetworkModel::PppPpp { users, bs } => {
                kv.push(("lambda_u_per_m2".into(), format!("{}", users.lambda)));
                kv.push(("lambda_b_per_m2".into(), format!("{}", bs.lambda)));
            }
            NetworkModel::PcpPpp { users, bs } => {
                kv.push(("lambda_b_per_m2".into(), format!("{}", bs.lambda)));
                kv.push(("user_cluster".into(), users.kind.label().into()));
                kv.push(("user_m_bar".into(), format!("{}", users.m_bar)));
                kv.push(("user_rho_m".into(), format!("{}", users.rho)));
            }
            NetworkModel::PcpPcp { users, bs } => {
                kv.push(("lambda_p_per_m2".into(), format!("{}", users.lambda_p)));
                kv.push(("user_cluster".into(), users.kind.label().into()));
                kv.push(("user_m_bar".into(), format!("{}", users.m_bar)));
                kv.push(("user_rho_m".into(), format!("{}", users.rho)));
                kv.push(("bs_cluster".into(), bs.kind.label().into()));
                kv.push(("bs_m_bar".into(), format!("{}", bs.m_bar)));
                kv.push(("bs_rho_m".into(), format!("{}", bs.rho)));
            }
        }
        kv
    }
}

/// Retry and degeneracy guards for scene sampling.
#[derive(Debug, Clone, Copy)]
pub struct SceneOptions {
    /// Resample attempts before giving up on an empty BS pattern.
    pub retry_limit: u32,
    /// Scenes with a BS closer to the user than this exclusion radius are
    /// resampled; the power-law gain is unphysical at zero distance and one
    /// such draw would dominate every Monte Carlo average.
    pub min_link_distance_m: f64,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions {
            retry_limit: 100,
            min_link_distance_m: 1e-6,
        }
    }
}

/// The network as seen by one (typical) user.
#[derive(Debug, Clone)]
pub struct TypicalUserScene {
    /// The observation point; the origin for Palm scenes.
    pub user: Point,
    pub bs_pattern: PointPattern,
    /// Indices into `bs_pattern.points` of the base stations belonging to
    /// the user's own cluster (the coupled parent BS for [`NetworkModel::PcpPpp`],
    /// the co-cluster BSs for [`NetworkModel::PcpPcp`], empty otherwise).
    pub own_cluster_bs: Vec<usize>,
}

impl TypicalUserScene {
    pub fn bs_count(&self) -> usize {
        self.bs_pattern.len()
    }
}

fn scene_ok(user: Point, points: &[Point], opts: &SceneOptions) -> bool {
    !points.is_empty() && points.iter().all(|b| b.dist(user) >= opts.min_link_distance_m)
}

/// Sample the network conditioned on a typical user at the origin.
///
/// For cluster-process users the user's own cluster center sits at `-s`
/// with `s` one draw of the offspring displacement; co-cluster *users* do
/// not affect downlink SIR and are omitted. Scenes with no base station or
/// with one inside the exclusion radius are resampled up to
/// `opts.retry_limit` times.
pub fn sample_scene(
    model: &NetworkModel,
    window: Shape,
    opts: &SceneOptions,
    rng: &mut impl Rng,
) -> Result<TypicalUserScene> {
    model.validate()?;
    if !(window.area() > 0.0) {
        return Err(Error::invalid("window must have positive area"));
    }
    for _ in 0..opts.retry_limit {
        let (points, own) = draw_palm_bs(model, window, rng)?;
        if scene_ok(Point::ORIGIN, &points, opts) {
            return Ok(TypicalUserScene {
                user: Point::ORIGIN,
                bs_pattern: PointPattern::new(points, window),
                own_cluster_bs: own,
            });
        }
    }
    Err(Error::NoBaseStations {
        attempts: opts.retry_limit,
    })
}

fn draw_palm_bs(
    model: &NetworkModel,
    window: Shape,
    rng: &mut impl Rng,
) -> Result<(Vec<Point>, Vec<usize>)> {
    match model {
        NetworkModel::PppPpp { bs, .. } => {
            Ok((sample_ppp(*bs, window, rng)?.points, Vec::new()))
        }
        NetworkModel::PcpPpp { users, bs } => {
            // The user's parent BS sits at -s; the rest of the BS PPP is
            // unconditioned.
            let s = users.kind.displacement(users.rho, rng);
            let own_bs = Point::ORIGIN - s;
            let mut points = Vec::new();
            let mut own = Vec::new();
            if window.contains(own_bs) {
                own.push(0);
                points.push(own_bs);
            }
            points.extend(sample_ppp(*bs, window, rng)?.points);
            Ok((points, own))
        }
        NetworkModel::PcpPcp { users, bs } => {
            // Own cluster center at -s from the user offspring kernel; that
            // cluster gets its own BS offspring draw. Remaining parents form
            // an unconditioned PPP, sampled on a dilated window so edge
            // clusters still contribute BSs. BS offspring use a stream
            // forked off the parent draws, keeping them independent of any
            // user-side sampling.
            let s = users.kind.displacement(users.rho, rng);
            let own_center = Point::ORIGIN - s;
            let parent_window = window.dilated(bs.kind.guard_margin(bs.rho));
            let parents = sample_ppp(PppParams::new(bs.lambda_p)?, parent_window, rng)?;
            let mut bs_rng = fork(rng);

            let mut points = Vec::new();
            let mut own = Vec::new();
            for _ in 0..poisson_count(bs.m_bar, &mut bs_rng) {
                let p = own_center + bs.kind.displacement(bs.rho, &mut bs_rng);
                if window.contains(p) {
                    own.push(points.len());
                    points.push(p);
                }
            }
            for parent in &parents.points {
                for _ in 0..poisson_count(bs.m_bar, &mut bs_rng) {
                    let p = *parent + bs.kind.displacement(bs.rho, &mut bs_rng);
                    if window.contains(p) {
                        points.push(p);
                    }
                }
            }
            Ok((points, own))
        }
    }
}

/// Sample the full joint user+BS process and declare a uniformly chosen
/// user inside the central half-extent of the window "typical".
///
/// This is the model-agnostic cross-check for [`sample_scene`]: both must
/// produce the same coverage statistics up to Monte Carlo error and edge
/// effects. Requires the window to be large relative to the cluster scale.
pub fn sample_scene_ergodic(
    model: &NetworkModel,
    window: Shape,
    opts: &SceneOptions,
    rng: &mut impl Rng,
) -> Result<TypicalUserScene> {
    model.validate()?;
    let margin = model.cluster_margin();
    if window.min_half_extent() <= 2.0 * margin {
        return Err(Error::invalid(format!(
            "window half-extent {} too small for cluster scale {margin}",
            window.min_half_extent()
        )));
    }
    let central = window.shrunk_about_center(0.5);

    for _ in 0..opts.retry_limit {
        let draw = draw_joint(model, window, rng)?;

        let candidates: Vec<usize> = (0..draw.users.len())
            .filter(|&i| central.contains(draw.users[i].0))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let pick = candidates[rng.random_range(0..candidates.len())];
        let (user, cluster) = draw.users[pick];

        if !scene_ok(user, &draw.bs_points, opts) {
            continue;
        }
        let own_cluster_bs = match cluster {
            Some(tag) => (0..draw.bs_points.len())
                .filter(|&i| draw.bs_cluster.get(i) == Some(&tag))
                .collect(),
            None => Vec::new(),
        };
        return Ok(TypicalUserScene {
            user,
            bs_pattern: PointPattern::new(draw.bs_points, window),
            own_cluster_bs,
        });
    }
    Err(Error::NoUsers {
        attempts: opts.retry_limit,
    })
}

/// One realization of the joint process. `bs_cluster[i]` and the user tag
/// share a numbering so a user's co-cluster BSs can be recovered: the BS's
/// own index for the coupled-parent model, the parent index for the
/// shared-parent model.
struct JointDraw {
    bs_points: Vec<Point>,
    bs_cluster: Vec<usize>,
    users: Vec<(Point, Option<usize>)>,
}

fn draw_joint(model: &NetworkModel, window: Shape, rng: &mut impl Rng) -> Result<JointDraw> {
    match model {
        NetworkModel::PppPpp { users, bs } => {
            let bs_points = sample_ppp(*bs, window, rng)?.points;
            let bs_cluster = (0..bs_points.len()).collect();
            let users = sample_ppp(*users, window, rng)?
                .points
                .into_iter()
                .map(|p| (p, None))
                .collect();
            Ok(JointDraw {
                bs_points,
                bs_cluster,
                users,
            })
        }
        NetworkModel::PcpPpp { users, bs } => {
            // The BS PPP doubles as the user parent process. Users near the
            // window edge may lose their parent to clipping, but the central
            // selection region keeps such users out of the estimate.
            let bs_points = sample_ppp(*bs, window, rng)?.points;
            let bs_cluster = (0..bs_points.len()).collect();
            let mut user_rng = fork(rng);
            let mut user_points = Vec::new();
            for (i, parent) in bs_points.iter().enumerate() {
                for _ in 0..poisson_count(users.m_bar, &mut user_rng) {
                    let p = *parent + users.kind.displacement(users.rho, &mut user_rng);
                    if window.contains(p) {
                        user_points.push((p, Some(i)));
                    }
                }
            }
            Ok(JointDraw {
                bs_points,
                bs_cluster,
                users: user_points,
            })
        }
        NetworkModel::PcpPcp { users, bs } => {
            // Both offspring processes hang off one parent draw but consume
            // forked streams, so they are conditionally independent given
            // the parents.
            let parent_window = window.dilated(model.cluster_margin());
            let parents = sample_ppp(PppParams::new(bs.lambda_p)?, parent_window, rng)?;
            let mut bs_rng = fork(rng);
            let mut user_rng = fork(rng);

            let mut bs_points = Vec::new();
            let mut bs_cluster = Vec::new();
            for (i, parent) in parents.points.iter().enumerate() {
                for _ in 0..poisson_count(bs.m_bar, &mut bs_rng) {
                    let p = *parent + bs.kind.displacement(bs.rho, &mut bs_rng);
                    if window.contains(p) {
                        bs_points.push(p);
                        bs_cluster.push(i);
                    }
                }
            }

            let mut user_points = Vec::new();
            for (i, parent) in parents.points.iter().enumerate() {
                for _ in 0..poisson_count(users.m_bar, &mut user_rng) {
                    let p = *parent + users.kind.displacement(users.rho, &mut user_rng);
                    if window.contains(p) {
                        user_points.push((p, Some(i)));
                    }
                }
            }
            Ok(JointDraw {
                bs_points,
                bs_cluster,
                users: user_points,
            })
        }
    }
}

/// Fraction of expected far-field interference allowed beyond the window
/// under the default auto sizing.
pub const DEFAULT_TAIL_FRACTION: f64 = 1e-3;

/// Fallback window multiple of the reference link distance when the tail
/// exponent makes far-field interference non-integrable.
const UNCONTROLLED_TAIL_WINDOW_MULTIPLE: f64 = 32.0;

/// Pick a simulation window radius such that the expected interference a
/// PPP of the model's BS intensity contributes from beyond the window is at
/// most `tail_fraction` of the in-window expectation (measured from the
/// mean nearest-BS distance). With a tail exponent `<= 2` the far-field
/// expectation diverges and truncation bias is uncontrolled; a fixed
/// multiple of the reference distance is used and a warning logged.
pub fn auto_window_radius(
    pathloss: &PathlossModel,
    bs_intensity: f64,
    tail_fraction: f64,
) -> Result<f64> {
    if !(bs_intensity.is_finite() && bs_intensity > 0.0) {
        return Err(Error::invalid(format!(
            "BS intensity must be finite and positive, got {bs_intensity}"
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "tail fraction must lie in (0,1), got {tail_fraction}"
        )));
    }
    let r_ref = 0.5 / bs_intensity.sqrt();
    if pathloss.tail_alpha() <= 2.0 {
        log::warn!(
            "tail pathloss exponent {} <= 2: far-field interference diverges, \
             truncation bias is uncontrolled (window = {} reference distances)",
            pathloss.tail_alpha(),
            UNCONTROLLED_TAIL_WINDOW_MULTIPLE
        );
        return Ok(UNCONTROLLED_TAIL_WINDOW_MULTIPLE * r_ref);
    }
    if pathloss.slopes() == 1 {
        // Single slope solves in closed form: (R/r)^(2-a) = q/(1+q).
        let alpha = pathloss.tail_alpha();
        let ratio = ((1.0 + tail_fraction) / tail_fraction).powf(1.0 / (alpha - 2.0));
        return Ok(r_ref * ratio);
    }

    // Piecewise integral of 2*pi*z*l(z): antiderivative per piece.
    let radial = |a: f64, b: f64| -> f64 {
        // integral over [a, b] of z^(1) * l(z) up to the common 2*pi*lambda factor
        let mut total = 0.0;
        let bounds = pathloss.boundaries();
        let alphas = pathloss.alphas();
        let etas = pathloss.etas();
        for i in 0..alphas.len() {
            let lo = if i == 0 { 0.0 } else { bounds[i - 1] };
            let hi = if i == alphas.len() - 1 { f64::INFINITY } else { bounds[i] };
            let (lo, hi) = (lo.max(a), hi.min(b));
            if lo >= hi {
                continue;
            }
            let p = 2.0 - alphas[i];
            total += if p.abs() < 1e-12 {
                etas[i] * (hi / lo).ln()
            } else {
                etas[i] * (hi.powf(p) - lo.powf(p)) / p
            };
        }
        total
    };
    let tail = |r: f64| -> f64 {
        let alpha = pathloss.tail_alpha();
        let eta = *pathloss.etas().last().expect("nonempty");
        eta * r.powf(2.0 - alpha) / (alpha - 2.0)
    };

    let fraction = |r: f64| tail(r) / radial(r_ref, r);

    let mut hi = 4.0 * r_ref;
    for _ in 0..200 {
        if fraction(hi) < tail_fraction {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = r_ref * 1.000001;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fraction(mid) > tail_fraction {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-9 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Auto-sized disk window centered on the typical user.
pub fn auto_window(model: &NetworkModel, pathloss: &PathlossModel, tail_fraction: f64) -> Result<Shape> {
    let radius = auto_window_radius(pathloss, model.bs_intensity(), tail_fraction)?
        .max(2.0 * model.bs_guard_margin().max(model.cluster_margin()));
    Shape::disk(Point::ORIGIN, radius)
}
