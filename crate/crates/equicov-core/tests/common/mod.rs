//! Independent numerical oracles for the statistical tests.
//!
//! Void probabilities of cluster processes have an exact double-integral
//! form: `exp(-lambda_p * I)` with
//! `I = int_R2 (1 - exp(-m_bar * p_in(x))) dx`, where `p_in(x)` is the
//! probability that one offspring of a parent at `x` lands in the test
//! region. These evaluators integrate that expression numerically and never
//! touch the samplers, so they can arbitrate sampler correctness.

use equicov_core::stats::adaptive_simpson;
use statrs::function::erf::erf;

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Probability that an isotropic Gaussian displacement (per-axis std
/// `sigma`) from a parent at distance `r` lands inside the origin-centered
/// disk of radius `disk_radius`. The y-integral is a normal CDF difference,
/// leaving one numerical integral over x.
fn gaussian_mass_in_disk(r: f64, sigma: f64, disk_radius: f64) -> f64 {
    let integrand = |x: f64| {
        let b = (disk_radius * disk_radius - x * x).max(0.0).sqrt();
        let density = (-0.5 * ((x - r) / sigma).powi(2)).exp()
            / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        density * (normal_cdf(b / sigma) - normal_cdf(-b / sigma))
    };
    adaptive_simpson(&integrand, -disk_radius, disk_radius, 1e-11)
}

/// Area of the intersection of two disks with radii `r1`, `r2` and center
/// distance `d` (standard lens formula).
fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return std::f64::consts::PI * r * r;
    }
    let d2 = d * d;
    let r1s = r1 * r1;
    let r2s = r2 * r2;
    let a1 = r1s * (((d2 + r1s - r2s) / (2.0 * d * r1)).clamp(-1.0, 1.0)).acos();
    let a2 = r2s * (((d2 + r2s - r1s) / (2.0 * d * r2)).clamp(-1.0, 1.0)).acos();
    let kernel = 0.5
        * ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
            .max(0.0)
            .sqrt();
    a1 + a2 - kernel
}

fn cluster_void_disk(
    lambda_p: f64,
    m_bar: f64,
    mass_in_disk: impl Fn(f64) -> f64,
    r_max: f64,
) -> f64 {
    let outer = |r: f64| 2.0 * std::f64::consts::PI * r * (1.0 - (-m_bar * mass_in_disk(r)).exp());
    let integral = adaptive_simpson(&outer, 0.0, r_max, 1e-10);
    (-lambda_p * integral).exp()
}

/// Void probability of a Thomas cluster process on an origin-centered disk.
pub fn tcp_void_disk(lambda_p: f64, m_bar: f64, sigma: f64, disk_radius: f64) -> f64 {
    cluster_void_disk(
        lambda_p,
        m_bar,
        |r| gaussian_mass_in_disk(r, sigma, disk_radius),
        disk_radius + 10.0 * sigma,
    )
}

/// Void probability of a Matérn cluster process on an origin-centered disk.
pub fn mcp_void_disk(lambda_p: f64, m_bar: f64, cluster_radius: f64, disk_radius: f64) -> f64 {
    cluster_void_disk(
        lambda_p,
        m_bar,
        |r| lens_area(disk_radius, cluster_radius, r) / (std::f64::consts::PI * cluster_radius * cluster_radius),
        disk_radius + cluster_radius,
    )
}

/// Void probability of a homogeneous PPP on a region of the given area.
pub fn ppp_void(lambda: f64, area: f64) -> f64 {
    (-lambda * area).exp()
}
