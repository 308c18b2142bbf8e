//! Small statistical toolbox: confidence intervals, two-proportion tests,
//! empirical CCDF utilities and a permutation null band for sup-distance
//! statistics.

use rand::seq::SliceRandom;
use rand::Rng;

/// Supported two-sided confidence levels with their normal quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    P90,
    P95,
    P99,
    P999,
}

impl Confidence {
    pub const fn level(self) -> f64 {
        match self {
            Confidence::P90 => 0.90,
            Confidence::P95 => 0.95,
            Confidence::P99 => 0.99,
            Confidence::P999 => 0.999,
        }
    }

    /// Two-sided standard-normal quantile `z` with `P(|Z| <= z) = level`.
    pub const fn z(self) -> f64 {
        match self {
            Confidence::P90 => 1.644_853_626_951_472_2,
            Confidence::P95 => 1.959_963_984_540_054,
            Confidence::P99 => 2.575_829_303_548_900_4,
            Confidence::P999 => 3.290_526_731_491_926,
        }
    }

    pub fn parse(s: &str) -> Option<Confidence> {
        match s {
            "0.9" | "0.90" | "90" => Some(Confidence::P90),
            "0.95" | "95" => Some(Confidence::P95),
            "0.99" | "99" => Some(Confidence::P99),
            "0.999" | "99.9" => Some(Confidence::P999),
            _ => None,
        }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Sample mean with a normal-approximation confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub ci: (f64, f64),
    pub n: u64,
}

pub fn mean_with_interval(samples: &[f64], z: f64) -> MeanEstimate {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return MeanEstimate {
            mean: f64::NAN,
            se: f64::NAN,
            ci: (f64::NAN, f64::NAN),
            n: 0,
        };
    }
    let mean = samples.iter().sum::<f64>() / n;
    let se = if samples.len() < 2 {
        f64::INFINITY
    } else {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    MeanEstimate {
        mean,
        se,
        ci: (mean - z * se, mean + z * se),
        n: samples.len() as u64,
    }
}

/// Pooled two-proportion z statistic (absolute value). Returns 0 when both
/// proportions are degenerate and equal.
pub fn two_proportion_z(successes_a: u64, n_a: u64, successes_b: u64, n_b: u64) -> f64 {
    let (na, nb) = (n_a as f64, n_b as f64);
    let pa = successes_a as f64 / na;
    let pb = successes_b as f64 / nb;
    let pooled = (successes_a + successes_b) as f64 / (na + nb);
    let se = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
    if se == 0.0 {
        if pa == pb {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (pa - pb).abs() / se
    }
}

/// Trapezoid rule over an (x, y) grid given as parallel slices.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Linear-interpolation quantile of an already sorted slice, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Empirical CCDF of `sorted` evaluated at `x`: fraction of samples `>= x`.
pub fn ccdf_sorted(sorted: &[f64], x: f64) -> f64 {
    let below = sorted.partition_point(|v| *v < x);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// Sup over the grid of the absolute CCDF difference between two samples.
pub fn sup_ccdf_gap(grid: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.total_cmp(y));
    sb.sort_by(|x, y| x.total_cmp(y));
    sup_ccdf_gap_sorted(grid, &sa, &sb)
}

fn sup_ccdf_gap_sorted(grid: &[f64], sa: &[f64], sb: &[f64]) -> f64 {
    grid.iter()
        .map(|&e| (ccdf_sorted(sa, e) - ccdf_sorted(sb, e)).abs())
        .fold(0.0, f64::max)
}

/// Permutation estimate of the null quantile of [`sup_ccdf_gap`] under the
/// hypothesis that `a` and `b` come from the same distribution: the pooled
/// sample is reshuffled `n_perm` times and the requested quantile of the
/// resulting sup-gap statistics is returned.
pub fn permutation_sup_gap_band(
    grid: &[f64],
    a: &[f64],
    b: &[f64],
    n_perm: u32,
    confidence: Confidence,
    rng: &mut impl Rng,
) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let mut gaps = Vec::with_capacity(n_perm as usize);
    for _ in 0..n_perm {
        pooled.shuffle(rng);
        let (pa, pb) = pooled.split_at(a.len());
        let mut sa = pa.to_vec();
        let mut sb = pb.to_vec();
        sa.sort_by(|x, y| x.total_cmp(y));
        sb.sort_by(|x, y| x.total_cmp(y));
        gaps.push(sup_ccdf_gap_sorted(grid, &sa, &sb));
    }
    gaps.sort_by(|x, y| x.total_cmp(y));
    quantile_sorted(&gaps, confidence.level())
}

/// Adaptive Simpson quadrature on a finite interval.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}
