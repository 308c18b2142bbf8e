//! The four experiment commands. Each reads a validated
//! [`ExperimentConfig`], runs the corresponding estimator and writes CSV
//! artifacts into the output directory.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use equicov_core::contours::{
    sweep_level_sets, verify_contour, ContourSpec, ContourVerdict, SweepSpec, VerifyOptions,
};
use equicov_core::coverage::meta_distribution;
use equicov_core::csvio;
use equicov_core::geometry::{
    compare_void_probabilities, default_void_regions, process_sampler, test_scaling_equivalence,
    PointPattern, ProcessParams, ScalingEquivalenceReport, ScaledSampler,
};
use equicov_core::netmodels::sample_scene;
use equicov_core::{Point, SeedTree, Shape};

use crate::config::{ExperimentConfig, ReparamRule, VoidtestSection, WindowChoice};
use crate::CliError;

fn create(out_dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(name);
    let file = File::create(&path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn join_indices(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Sample one typical-user scene and write the user and BS patterns.
pub fn cmd_sample(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let window = cfg.window()?;
    let seeds = SeedTree::new(cfg.run.seed);
    let mut rng = seeds.rng("sample/scene", 0);
    let scene = sample_scene(&cfg.model, window, &cfg.coverage.scene, &mut rng)?;

    let meta = cfg.metadata();

    let mut users_meta = meta.clone();
    users_meta.push(("role".into(), "users".into()));
    let user_pattern = PointPattern::new(vec![scene.user], window);
    let mut w = create(out_dir, "users.csv")?;
    csvio::write_pattern_csv(&mut w, &user_pattern, &users_meta)?;

    let mut bs_meta = meta;
    bs_meta.push(("role".into(), "bs".into()));
    bs_meta.push((
        "own_cluster_bs_indices".into(),
        join_indices(&scene.own_cluster_bs),
    ));
    let mut w = create(out_dir, "bs.csv")?;
    csvio::write_pattern_csv(&mut w, &scene.bs_pattern, &bs_meta)?;

    println!(
        "sampled scene: {} base stations ({} in the typical user's cluster) -> {}",
        scene.bs_count(),
        scene.own_cluster_bs.len(),
        out_dir.display()
    );
    Ok(())
}

/// Estimate the meta distribution of SIR and write it as CSV.
pub fn cmd_metadist(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let window = cfg.window()?;
    let seeds = SeedTree::new(cfg.run.seed);
    let est = meta_distribution(
        &cfg.model,
        &cfg.pathloss,
        &cfg.coverage,
        window,
        &seeds.child("metadist"),
    )?;
    est.check_consistency()
        .map_err(|e| CliError::Runtime(format!("inconsistent estimate: {e}")))?;

    let mut meta = cfg.metadata();
    meta.extend(window.metadata());
    let mut w = create(out_dir, "metadist.csv")?;
    csvio::write_metadist_csv(&mut w, &est, &meta)?;

    println!(
        "mean coverage {:.6} (CI [{:.6}, {:.6}]) over {} realizations -> {}",
        est.mean_coverage,
        est.mean_ci.0,
        est.mean_ci.1,
        est.n_outer,
        out_dir.join("metadist.csv").display()
    );
    Ok(())
}

fn write_verdict_csv(
    out_dir: &Path,
    verdict: &ContourVerdict,
    meta: &[(String, String)],
) -> Result<(), CliError> {
    let mut w = create(out_dir, "contour_verdict.csv")?;
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "# base_mean_coverage={}", verdict.base_mean)?;
    writeln!(w, "k,mean_coverage,ci_lo,ci_hi,mean_gap_z,sup_gap,sup_gap_limit,paired_max_gap,pass")?;
    for c in &verdict.checks {
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            c.k,
            c.mean_coverage,
            c.mean_ci.0,
            c.mean_ci.1,
            c.mean_gap_z,
            c.sup_gap,
            fmt_opt(c.sup_gap_limit),
            fmt_opt(c.paired_max_gap),
            c.pass
        )?;
    }
    Ok(())
}

/// Verify equi-coverage families and/or extract iso-coverage level sets.
pub fn cmd_contour(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    if cfg.contour.is_none() && cfg.sweep.is_none() {
        return Err(CliError::Config(
            "the contour command needs a [contour] and/or [sweep] section".into(),
        ));
    }
    let seeds = SeedTree::new(cfg.run.seed);
    let mut failed = false;

    if let Some(section) = &cfg.contour {
        let window = cfg.window()?;
        let spec = ContourSpec {
            model: cfg.model,
            pathloss: cfg.pathloss.clone(),
            k_values: section.k_values.clone(),
        };
        let opts = VerifyOptions {
            mode: section.mode,
            rule: section.rule,
            tolerance_se: section.tolerance_se,
            band_confidence: section.band_confidence,
            n_permutations: section.permutations,
            paired_tolerance: section.paired_tolerance,
        };
        let verdict = verify_contour(&spec, &cfg.coverage, window, &seeds.child("contour"), &opts)?;

        println!(
            "base mean coverage {:.6} (CI [{:.6}, {:.6}])",
            verdict.base_mean, verdict.base_ci.0, verdict.base_ci.1
        );
        for c in &verdict.checks {
            let detail = match c.paired_max_gap {
                Some(gap) => format!("paired max |Δcoverage| {gap:.3e}"),
                None => format!(
                    "mean gap {:.2} se, sup CCDF gap {:.4} (limit {:.4})",
                    c.mean_gap_z,
                    c.sup_gap,
                    c.sup_gap_limit.unwrap_or(f64::NAN)
                ),
            };
            println!(
                "k={:<6} mean {:.6}  {}  {}",
                c.k,
                c.mean_coverage,
                detail,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        write_verdict_csv(out_dir, &verdict, &cfg.metadata())?;
        failed |= !verdict.pass;
    }

    if let Some(section) = &cfg.sweep {
        let tail_fraction = match cfg.run.window {
            WindowChoice::Auto { tail_fraction } => tail_fraction,
            WindowChoice::Radius(_) => equicov_core::netmodels::DEFAULT_TAIL_FRACTION,
        };
        let spec = SweepSpec {
            model: cfg.model,
            pathloss: cfg.pathloss.clone(),
            x: section.x,
            y: section.y,
            levels: section.levels.clone(),
            window_tail_fraction: tail_fraction,
        };
        let sweep = sweep_level_sets(&spec, &cfg.coverage, &seeds.child("sweep"))?;

        let mut meta = cfg.metadata();
        meta.push(("x_param".into(), section.x.param.label().into()));
        meta.push(("x_scale".into(), section.x.scale.label().into()));
        meta.push(("y_param".into(), section.y.param.label().into()));
        meta.push(("y_scale".into(), section.y.scale.label().into()));

        let mut w = create(out_dir, "levelsets.csv")?;
        csvio::write_levelsets_csv(&mut w, &sweep.level_sets, &meta)?;
        let mut w = create(out_dir, "sweep_grid.csv")?;
        csvio::write_sweep_grid_csv(&mut w, &sweep, &meta)?;

        for set in &sweep.level_sets {
            println!(
                "level {:.4}: {} polyline(s), {} vertices",
                set.level,
                set.polylines.len(),
                set.polylines.iter().map(|p| p.len()).sum::<usize>()
            );
        }
    }

    if failed {
        return Err(CliError::Verification(
            "equi-coverage verification failed; see contour_verdict.csv".into(),
        ));
    }
    Ok(())
}

fn void_regions(section: &VoidtestSection, params: &ProcessParams) -> Vec<Shape> {
    match &section.region_radii_m {
        Some(radii) => radii
            .iter()
            .map(|r| Shape::Disk {
                center: Point::ORIGIN,
                radius: *r,
            })
            .collect(),
        None => default_void_regions(params.characteristic_length()),
    }
}

/// Scaling-equivalence reports for every configured process and scale.
pub fn cmd_voidtest(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let Some(section) = &cfg.voidtest else {
        return Err(CliError::Config(
            "the voidtest command needs a [voidtest] section".into(),
        ));
    };
    let seeds = SeedTree::new(cfg.run.seed);
    let mut w = create(out_dir, "voidtest.csv")?;
    writeln!(w, "# reparam={}", match section.reparam {
        ReparamRule::Quadratic => "quadratic",
        ReparamRule::Linear => "linear",
    })?;
    writeln!(w, "# n_trials={}", section.n_trials)?;
    writeln!(w, "# seed={}", cfg.run.seed)?;
    writeln!(
        w,
        "process,k,region_radius_m,scaled_void,scaled_ci_lo,scaled_ci_hi,reparam_void,reparam_ci_lo,reparam_ci_hi,z,pass"
    )?;

    let mut all_pass = true;
    for params in &section.processes {
        let regions = void_regions(section, params);
        for (ki, &k) in section.k_values.iter().enumerate() {
            let tree = seeds.child(&format!("voidtest/{}/k{}", params.label(), ki));
            let report = run_void_comparison(section, params, k, &regions, &tree)?;
            for cmp in &report.regions {
                let radius = match cmp.region {
                    Shape::Disk { radius, .. } => radius,
                    Shape::Rect { .. } => f64::NAN,
                };
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    params.label(),
                    k,
                    radius,
                    cmp.lhs.estimate,
                    cmp.lhs.ci.0,
                    cmp.lhs.ci.1,
                    cmp.rhs.estimate,
                    cmp.rhs.ci.0,
                    cmp.rhs.ci.1,
                    cmp.z,
                    cmp.pass
                )?;
                println!(
                    "{:<4} k={:<5} region r={:<8.4} scaled {:.4} vs reparam {:.4}  z={:>6.2}  {}",
                    params.label(),
                    k,
                    radius,
                    cmp.lhs.estimate,
                    cmp.rhs.estimate,
                    cmp.z,
                    if cmp.pass { "PASS" } else { "FAIL" }
                );
            }
            all_pass &= report.pass;
        }
    }
    if !all_pass {
        return Err(CliError::Verification(
            "void-probability scaling equivalence failed; see voidtest.csv".into(),
        ));
    }
    Ok(())
}

fn run_void_comparison(
    section: &VoidtestSection,
    params: &ProcessParams,
    k: f64,
    regions: &[Shape],
    seeds: &SeedTree,
) -> Result<ScalingEquivalenceReport, CliError> {
    match section.reparam {
        ReparamRule::Quadratic => Ok(test_scaling_equivalence(
            params,
            k,
            regions,
            section.n_trials,
            section.confidence,
            seeds,
        )?),
        ReparamRule::Linear => {
            // Deliberately wrong rule: intensities divided by k instead of
            // k^2. Serves as the negative control for the test harness.
            let radius = regions
                .iter()
                .map(|r| match *r {
                    Shape::Disk { center, radius } => center.norm() + radius,
                    Shape::Rect { min, max } => min.norm().max(max.norm()),
                })
                .fold(0.0, f64::max)
                * 1.05;
            let target_window = Shape::disk(Point::ORIGIN, radius)?;
            let base_window = Shape::disk(Point::ORIGIN, radius / k)?;
            let scaled = ScaledSampler::new(process_sampler(params, base_window), k)?;
            let wrong = match params {
                ProcessParams::Ppp(p) => ProcessParams::Ppp(
                    equicov_core::PppParams::new(p.lambda / k)?,
                ),
                ProcessParams::Pcp(p) => ProcessParams::Pcp(equicov_core::PcpParams::new(
                    p.lambda_p / k,
                    p.m_bar,
                    p.rho * k,
                    p.kind,
                )?),
            };
            let rhs = process_sampler(&wrong, target_window);
            let mut report = compare_void_probabilities(
                &scaled,
                &rhs,
                regions,
                section.n_trials,
                section.confidence,
                seeds,
            )?;
            report.k = k;
            Ok(report)
        }
    }
}
