//! Cross-validation of the coverage estimators: the typical-user scene
//! construction against the ergodic (full joint process) estimator, and the
//! analytic PPP baseline against brute-force simulation.

use equicov_core::coverage::{conditional_coverage, meta_distribution, ppp_coverage_oracle};
use equicov_core::netmodels::{auto_window, sample_scene_ergodic};
use equicov_core::propagation::AssociationPolicy;
use equicov_core::stats::mean_with_interval;
use equicov_core::{
    ClusterKind, Confidence, CoverageConfig, NetworkModel, PathlossModel, PcpParams, SceneOptions,
    SeedTree, Shape,
};

fn ergodic_mean_coverage(
    model: &NetworkModel,
    pathloss: &PathlossModel,
    cfg: &CoverageConfig,
    window: Shape,
    seeds: &SeedTree,
    n: u64,
) -> (f64, f64) {
    let opts = SceneOptions::default();
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let mut scene_rng = seeds.rng("ergodic-scene", i);
            let scene = sample_scene_ergodic(model, window, &opts, &mut scene_rng).unwrap();
            let mut inner_rng = seeds.rng("ergodic-inner", i);
            conditional_coverage(&scene, pathloss, cfg, &mut inner_rng).unwrap()
        })
        .collect();
    let est = mean_with_interval(&samples, Confidence::P95.z());
    (est.mean, est.se)
}

fn assert_estimators_agree(model: NetworkModel, pathloss: PathlossModel, seed: u64) {
    let seeds = SeedTree::new(seed);
    let mut cfg = CoverageConfig::new(1.0, AssociationPolicy::MaxPower).unwrap();
    cfg.n_outer = 900;
    let window = auto_window(&model, &pathloss, 1e-2).unwrap();

    let palm = meta_distribution(&model, &pathloss, &cfg, window, &seeds.child("palm")).unwrap();
    let (erg_mean, erg_se) =
        ergodic_mean_coverage(&model, &pathloss, &cfg, window, &seeds.child("erg"), 900);

    let gap = (palm.mean_coverage - erg_mean).abs();
    let tol = 2.0 * (palm.mean_se * palm.mean_se + erg_se * erg_se).sqrt();
    assert!(
        gap <= tol,
        "typical-user {} vs ergodic {} (gap {gap}, tol {tol})",
        palm.mean_coverage,
        erg_mean
    );
}

#[test]
fn palm_and_ergodic_estimators_agree_model1() {
    assert_estimators_agree(
        NetworkModel::ppp_ppp(1.0, 1.0).unwrap(),
        PathlossModel::single_slope(4.0).unwrap(),
        41,
    );
}

#[test]
fn palm_and_ergodic_estimators_agree_model2() {
    assert_estimators_agree(
        NetworkModel::pcp_ppp(1.0, 4.0, 0.4, ClusterKind::Thomas).unwrap(),
        PathlossModel::single_slope(4.0).unwrap(),
        42,
    );
}

#[test]
fn palm_and_ergodic_estimators_agree_model3() {
    let users = PcpParams::new(0.4, 4.0, 0.4, ClusterKind::Matern).unwrap();
    let bs = PcpParams::new(0.4, 3.0, 0.3, ClusterKind::Matern).unwrap();
    assert_estimators_agree(
        NetworkModel::pcp_pcp(users, bs).unwrap(),
        PathlossModel::new(&[1.0], &[3.0, 4.0]).unwrap(),
        43,
    );
}

#[test]
fn ppp_oracle_is_validated_by_simulation() {
    // Interference-limited PPP with single-slope pathloss: the analytic
    // values must sit inside the simulation confidence band.
    let seeds = SeedTree::new(77);
    let model = NetworkModel::ppp_ppp(1.0, 1.0).unwrap();
    let pathloss = PathlossModel::single_slope(4.0).unwrap();
    let window = auto_window(&model, &pathloss, 1e-3).unwrap();
    for policy in [AssociationPolicy::MaxPower, AssociationPolicy::MaxSir] {
        let mut cfg = CoverageConfig::new(1.0, policy).unwrap();
        cfg.n_outer = 1500;
        let est = meta_distribution(
            &model,
            &pathloss,
            &cfg,
            window,
            &seeds.child(policy.label()),
        )
        .unwrap();
        let oracle = ppp_coverage_oracle(1.0, 4.0, policy).unwrap();
        let gap = (est.mean_coverage - oracle).abs();
        assert!(
            gap <= 3.0 * est.mean_se,
            "{policy:?}: simulated {} vs oracle {oracle}",
            est.mean_coverage
        );
    }
}

#[test]
fn shrinking_user_clusters_drive_coverage_to_one() {
    // Users piled directly onto their serving BS see negligible relative
    // interference.
    let seeds = SeedTree::new(78);
    let model = NetworkModel::pcp_ppp(1.0, 4.0, 1e-4, ClusterKind::Thomas).unwrap();
    let pathloss = PathlossModel::single_slope(4.0).unwrap();
    let mut cfg = CoverageConfig::new(1.0, AssociationPolicy::MaxPower).unwrap();
    cfg.n_outer = 300;
    let window = Shape::disk(equicov_core::Point::ORIGIN, 8.0).unwrap();
    let est = meta_distribution(&model, &pathloss, &cfg, window, &seeds).unwrap();
    assert!(
        est.mean_coverage > 0.999,
        "mean coverage {} should approach 1",
        est.mean_coverage
    );
}

#[test]
fn mean_coverage_is_ordered_by_policy() {
    let seeds = SeedTree::new(79);
    let model = NetworkModel::ppp_ppp(1.0, 1.0).unwrap();
    let pathloss = PathlossModel::new(&[1.0], &[2.5, 4.0]).unwrap();
    let window = auto_window(&model, &pathloss, 1e-2).unwrap();
    let mut means = Vec::new();
    for policy in [AssociationPolicy::MaxPower, AssociationPolicy::MaxSir] {
        let mut cfg = CoverageConfig::new(1.0, policy).unwrap();
        cfg.n_outer = 1000;
        let est = meta_distribution(&model, &pathloss, &cfg, window, &seeds.child(policy.label()))
            .unwrap();
        means.push((est.mean_coverage, est.mean_se));
    }
    let (pow, sir) = (means[0], means[1]);
    assert!(
        sir.0 >= pow.0 - 3.0 * (sir.1 * sir.1 + pow.1 * pow.1).sqrt(),
        "max-SIR mean {} must not trail max-power mean {}",
        sir.0,
        pow.0
    );
}
