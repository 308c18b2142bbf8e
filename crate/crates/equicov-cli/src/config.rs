//! Flat, sectioned `key = value` experiment configuration.
//!
//! The format is deliberately tool-free: `[section]` headers, one
//! `key = value` pair per line, `#` comments, units spelled out in key
//! names. Every violated invariant is reported with the offending line
//! number.

use std::collections::BTreeMap;
use std::path::PathBuf;

use equicov_core::contours::{AxisScale, AxisSpec, ScalingRule, SweepParam, VerifyMode};
use equicov_core::coverage::{default_epsilon_grid, InnerEstimator};
use equicov_core::geometry::ProcessParams;
use equicov_core::{
    AssociationPolicy, ClusterKind, Confidence, CoverageConfig, FadingSpec, LinkBudget,
    NetworkModel, PathlossModel, PcpParams, PppParams, SceneOptions,
};

use crate::CliError;

fn cfg_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw parsed file: section -> key -> (value, line).
#[derive(Debug, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
    section_lines: BTreeMap<String, usize>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, CliError> {
        let mut raw = RawConfig::default();
        let mut current: Option<String> = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(cfg_err(line_no, "unterminated section header"));
                };
                let name = name.trim().to_string();
                if name.is_empty() {
                    return Err(cfg_err(line_no, "empty section name"));
                }
                raw.sections.entry(name.clone()).or_default();
                raw.section_lines.entry(name.clone()).or_insert(line_no);
                current = Some(name);
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(cfg_err(line_no, format!("expected `key = value`, got `{trimmed}`")));
            };
            let Some(section) = &current else {
                return Err(cfg_err(line_no, "key outside of any [section]"));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let dup = raw
                .sections
                .get_mut(section)
                .expect("section registered")
                .insert(key.clone(), Entry { value, line: line_no });
            if let Some(prev) = dup {
                return Err(cfg_err(
                    line_no,
                    format!("duplicate key `{key}` (first set on line {})", prev.line),
                ));
            }
        }
        Ok(raw)
    }

    fn section(&self, name: &str) -> Option<&BTreeMap<String, Entry>> {
        self.sections.get(name)
    }

    fn section_line(&self, name: &str) -> usize {
        self.section_lines.get(name).copied().unwrap_or(0)
    }
}

/// Tracks which keys were consumed so leftovers become errors.
struct SectionReader<'a> {
    name: &'a str,
    entries: Option<&'a BTreeMap<String, Entry>>,
    used: Vec<&'a str>,
}

impl<'a> SectionReader<'a> {
    fn new(raw: &'a RawConfig, name: &'a str) -> Self {
        SectionReader {
            name,
            entries: raw.section(name),
            used: Vec::new(),
        }
    }

    fn exists(&self) -> bool {
        self.entries.is_some()
    }

    fn raw(&mut self, key: &'a str) -> Option<(&'a str, usize)> {
        self.used.push(key);
        self.entries
            .and_then(|s| s.get(key))
            .map(|e| (e.value.as_str(), e.line))
    }

    fn require(&mut self, key: &'a str) -> Result<(&'a str, usize), CliError> {
        self.raw(key).ok_or_else(|| {
            CliError::Config(format!(
                "section [{}]: missing required key `{key}`",
                self.name
            ))
        })
    }

    fn f64(&mut self, key: &'a str) -> Result<Option<(f64, usize)>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => {
                let parsed = v
                    .parse::<f64>()
                    .map_err(|_| cfg_err(line, format!("`{key}` must be a number, got `{v}`")))?;
                Ok(Some((parsed, line)))
            }
        }
    }

    fn f64_or(&mut self, key: &'a str, default: f64) -> Result<(f64, usize), CliError> {
        Ok(self.f64(key)?.unwrap_or((default, 0)))
    }

    fn require_f64(&mut self, key: &'a str) -> Result<(f64, usize), CliError> {
        let (v, line) = self.require(key)?;
        let parsed = v
            .parse::<f64>()
            .map_err(|_| cfg_err(line, format!("`{key}` must be a number, got `{v}`")))?;
        Ok((parsed, line))
    }

    fn u64_or(&mut self, key: &'a str, default: u64) -> Result<(u64, usize), CliError> {
        match self.raw(key) {
            None => Ok((default, 0)),
            Some((v, line)) => {
                let parsed = v.parse::<u64>().map_err(|_| {
                    cfg_err(line, format!("`{key}` must be a nonnegative integer, got `{v}`"))
                })?;
                Ok((parsed, line))
            }
        }
    }

    fn f64_list(&mut self, key: &'a str) -> Result<Option<(Vec<f64>, usize)>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => {
                if v.is_empty() {
                    return Ok(Some((Vec::new(), line)));
                }
                let parsed = v
                    .split(',')
                    .map(|item| item.trim().parse::<f64>())
                    .collect::<Result<Vec<f64>, _>>()
                    .map_err(|_| {
                        cfg_err(line, format!("`{key}` must be a comma-separated number list"))
                    })?;
                Ok(Some((parsed, line)))
            }
        }
    }

    fn finish(self) -> Result<(), CliError> {
        let Some(entries) = self.entries else {
            return Ok(());
        };
        for (key, entry) in entries {
            if !self.used.contains(&key.as_str()) {
                return Err(cfg_err(
                    entry.line,
                    format!("unknown key `{key}` in section [{}]", self.name),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub enum WindowChoice {
    Auto { tail_fraction: f64 },
    Radius(f64),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: Option<usize>,
    pub window: WindowChoice,
    pub scene: SceneOptions,
}

#[derive(Debug, Clone)]
pub struct ContourSection {
    pub k_values: Vec<f64>,
    pub mode: VerifyMode,
    pub rule: ScalingRule,
    pub tolerance_se: f64,
    pub band_confidence: Confidence,
    pub permutations: u32,
    pub paired_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSection {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub levels: Vec<f64>,
}

/// Which re-parameterization the void test compares against: the quadratic
/// intensity rule (correct) or a linear one (deliberate negative control).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReparamRule {
    Quadratic,
    Linear,
}

#[derive(Debug, Clone)]
pub struct VoidtestSection {
    pub processes: Vec<ProcessParams>,
    pub k_values: Vec<f64>,
    pub n_trials: u64,
    pub confidence: Confidence,
    pub reparam: ReparamRule,
    pub region_radii_m: Option<Vec<f64>>,
}

/// Fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: NetworkModel,
    pub pathloss: PathlossModel,
    pub coverage: CoverageConfig,
    pub budget: LinkBudget,
    pub run: RunConfig,
    pub output_dir: PathBuf,
    pub contour: Option<ContourSection>,
    pub sweep: Option<SweepSection>,
    pub voidtest: Option<VoidtestSection>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let raw = RawConfig::parse(text)?;
        for name in raw.sections.keys() {
            if !matches!(
                name.as_str(),
                "model" | "pathloss" | "coverage" | "run" | "output" | "contour" | "sweep"
                    | "voidtest"
            ) {
                return Err(cfg_err(
                    raw.section_line(name),
                    format!("unknown section [{name}]"),
                ));
            }
        }

        let model = parse_model(&raw)?;
        let pathloss = parse_pathloss(&raw)?;
        let run = parse_run(&raw)?;
        let (coverage, budget) = parse_coverage(&raw, run.scene)?;
        let output_dir = parse_output(&raw)?;
        let contour = parse_contour(&raw)?;
        let sweep = parse_sweep(&raw)?;
        let voidtest = parse_voidtest(&raw)?;

        Ok(ExperimentConfig {
            model,
            pathloss,
            coverage,
            budget,
            run,
            output_dir,
            contour,
            sweep,
            voidtest,
        })
    }

    /// Window used for coverage runs, honoring `window_radius_m = auto`.
    pub fn window(&self) -> Result<equicov_core::Shape, CliError> {
        match self.run.window {
            WindowChoice::Radius(r) => {
                equicov_core::Shape::disk(equicov_core::Point::ORIGIN, r).map_err(CliError::from)
            }
            WindowChoice::Auto { tail_fraction } => {
                equicov_core::netmodels::auto_window(&self.model, &self.pathloss, tail_fraction)
                    .map_err(CliError::from)
            }
        }
    }

    /// Metadata block shared by all outputs of a run.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut kv = self.model.metadata();
        kv.extend(self.pathloss.to_key_values());
        kv.push(("beta".into(), format!("{}", self.coverage.beta)));
        kv.push(("policy".into(), self.coverage.policy.label().into()));
        kv.push(("fading".into(), self.coverage.fading.label().into()));
        kv.push(("n_inner".into(), format!("{}", self.coverage.n_inner)));
        kv.push(("tx_power_w".into(), format!("{}", self.budget.tx_power_w)));
        kv.push(("seed".into(), format!("{}", self.run.seed)));
        kv
    }
}

fn cluster_kind(value: &str, line: usize) -> Result<ClusterKind, CliError> {
    match value {
        "tcp" | "thomas" => Ok(ClusterKind::Thomas),
        "mcp" | "matern" => Ok(ClusterKind::Matern),
        other => Err(cfg_err(line, format!("unknown cluster kind `{other}` (tcp|mcp)"))),
    }
}

fn parse_model(raw: &RawConfig) -> Result<NetworkModel, CliError> {
    let mut s = SectionReader::new(raw, "model");
    if !s.exists() {
        return Err(CliError::Config("missing required section [model]".into()));
    }
    let (kind, kind_line) = s.require("kind")?;
    let model = match kind {
        "ppp_ppp" | "model1" => {
            let (lambda_u, lu_line) = s.require_f64("lambda_u_per_m2")?;
            let (lambda_b, lb_line) = s.require_f64("lambda_b_per_m2")?;
            NetworkModel::ppp_ppp(lambda_u, lambda_b)
                .map_err(|e| cfg_err(lu_line.max(lb_line), e))?
        }
        "pcp_ppp" | "model2" => {
            let (lambda_b, line) = s.require_f64("lambda_b_per_m2")?;
            let (m_bar, _) = s.require_f64("user_m_bar")?;
            let (rho, _) = s.require_f64("user_rho_m")?;
            let (kind_v, kline) = s.require("user_cluster")?;
            let kind = cluster_kind(kind_v, kline)?;
            NetworkModel::pcp_ppp(lambda_b, m_bar, rho, kind).map_err(|e| cfg_err(line, e))?
        }
        "pcp_pcp" | "model3" => {
            let (lambda_p, line) = s.require_f64("lambda_p_per_m2")?;
            let (user_m, _) = s.require_f64("user_m_bar")?;
            let (user_rho, _) = s.require_f64("user_rho_m")?;
            let (user_kind, ukl) = s.require("user_cluster")?;
            let (bs_m, _) = s.require_f64("bs_m_bar")?;
            let (bs_rho, _) = s.require_f64("bs_rho_m")?;
            let (bs_kind, bkl) = s.require("bs_cluster")?;
            let users = PcpParams::new(lambda_p, user_m, user_rho, cluster_kind(user_kind, ukl)?)
                .map_err(|e| cfg_err(line, e))?;
            let bs = PcpParams::new(lambda_p, bs_m, bs_rho, cluster_kind(bs_kind, bkl)?)
                .map_err(|e| cfg_err(line, e))?;
            NetworkModel::pcp_pcp(users, bs).map_err(|e| cfg_err(line, e))?
        }
        other => {
            return Err(cfg_err(
                kind_line,
                format!("unknown model kind `{other}` (ppp_ppp|pcp_ppp|pcp_pcp)"),
            ))
        }
    };
    s.finish()?;
    Ok(model)
}

fn parse_pathloss(raw: &RawConfig) -> Result<PathlossModel, CliError> {
    let mut s = SectionReader::new(raw, "pathloss");
    if !s.exists() {
        return Err(CliError::Config("missing required section [pathloss]".into()));
    }
    let (alphas, a_line) = s
        .f64_list("alphas")?
        .ok_or_else(|| CliError::Config("section [pathloss]: missing required key `alphas`".into()))?;
    let boundaries = s.f64_list("boundaries_m")?.map(|(v, _)| v).unwrap_or_default();
    let model = PathlossModel::new(&boundaries, &alphas).map_err(|e| cfg_err(a_line, e))?;
    s.finish()?;
    Ok(model)
}

fn parse_coverage(
    raw: &RawConfig,
    scene: SceneOptions,
) -> Result<(CoverageConfig, LinkBudget), CliError> {
    let mut s = SectionReader::new(raw, "coverage");
    if !s.exists() {
        return Err(CliError::Config("missing required section [coverage]".into()));
    }
    let (beta, beta_line) = s.require_f64("beta")?;

    let policy = match s.raw("policy") {
        None => AssociationPolicy::MaxPower,
        Some(("max_power", _)) => AssociationPolicy::MaxPower,
        Some(("max_sir", _)) => AssociationPolicy::MaxSir,
        Some((other, line)) => {
            return Err(cfg_err(
                line,
                format!("unknown policy `{other}` (max_power|max_sir)"),
            ))
        }
    };

    let fading = match s.raw("fading") {
        None | Some(("rayleigh", _)) => FadingSpec::Rayleigh,
        Some(("nakagami", _)) => {
            let (m, _) = s.require_f64("nakagami_m")?;
            FadingSpec::Nakagami { m }
        }
        Some((other, line)) => {
            return Err(cfg_err(
                line,
                format!("unknown fading `{other}` (rayleigh|nakagami)"),
            ))
        }
    };
    if fading.is_rayleigh() {
        // consume the optional key so it is not reported as unknown
        let _ = s.f64("nakagami_m")?;
    }

    let inner = match s.raw("inner") {
        None | Some(("auto", _)) => InnerEstimator::Auto,
        Some(("closed_form", _)) => InnerEstimator::ClosedForm,
        Some(("monte_carlo", _)) => InnerEstimator::MonteCarlo,
        Some((other, line)) => {
            return Err(cfg_err(
                line,
                format!("unknown inner estimator `{other}` (auto|closed_form|monte_carlo)"),
            ))
        }
    };

    let confidence = match s.raw("confidence") {
        None => Confidence::P95,
        Some((v, line)) => Confidence::parse(v)
            .ok_or_else(|| cfg_err(line, format!("unsupported confidence `{v}` (0.9|0.95|0.99|0.999)")))?,
    };

    let epsilon_grid = match (s.f64_list("epsilon_grid")?, s.u64_or("epsilon_points", 0)?) {
        (Some((grid, line)), (0, _)) => {
            if grid.is_empty() {
                return Err(cfg_err(line, "`epsilon_grid` must not be empty"));
            }
            grid
        }
        (Some(_), (_, line)) => {
            return Err(cfg_err(
                line,
                "`epsilon_grid` and `epsilon_points` are mutually exclusive",
            ))
        }
        (None, (0, _)) => default_epsilon_grid(),
        (None, (points, line)) => {
            if points < 2 {
                return Err(cfg_err(line, "`epsilon_points` must be at least 2"));
            }
            (0..points)
                .map(|i| i as f64 / (points - 1) as f64)
                .collect()
        }
    };

    let (n_outer, _) = s.u64_or("n_outer", 2000)?;
    let (n_inner, _) = s.u64_or("n_inner", 500)?;
    let (tx_power, tx_line) = s.f64_or("tx_power_w", 1.0)?;

    let budget = LinkBudget::new(tx_power, beta).map_err(|e| cfg_err(tx_line.max(beta_line), e))?;
    let cfg = CoverageConfig {
        beta,
        epsilon_grid,
        n_outer,
        n_inner,
        policy,
        fading,
        inner,
        confidence,
        scene,
    };
    cfg.validate().map_err(|e| cfg_err(beta_line, e))?;
    s.finish()?;
    Ok((cfg, budget))
}

fn parse_run(raw: &RawConfig) -> Result<RunConfig, CliError> {
    let mut s = SectionReader::new(raw, "run");
    let (seed, _) = s.u64_or("seed", 0)?;
    let workers = match s.u64_or("workers", 0)? {
        (0, _) => None,
        (n, _) => Some(n as usize),
    };
    let (tail_fraction, tf_line) =
        s.f64_or("window_tail_fraction", equicov_core::netmodels::DEFAULT_TAIL_FRACTION)?;
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(cfg_err(tf_line, "`window_tail_fraction` must lie in (0,1)"));
    }
    let window = match s.raw("window_radius_m") {
        None | Some(("auto", _)) => WindowChoice::Auto { tail_fraction },
        Some((v, line)) => {
            let r = v
                .parse::<f64>()
                .map_err(|_| cfg_err(line, format!("`window_radius_m` must be `auto` or a number, got `{v}`")))?;
            if !(r.is_finite() && r > 0.0) {
                return Err(cfg_err(line, "`window_radius_m` must be positive"));
            }
            WindowChoice::Radius(r)
        }
    };
    let (retry_limit, _) = s.u64_or("retry_limit", 100)?;
    let (min_link, ml_line) = s.f64_or("min_link_distance_m", 1e-6)?;
    if !(min_link > 0.0) {
        return Err(cfg_err(ml_line, "`min_link_distance_m` must be positive"));
    }
    let scene = SceneOptions {
        retry_limit: retry_limit as u32,
        min_link_distance_m: min_link,
    };
    s.finish()?;
    Ok(RunConfig {
        seed,
        workers,
        window,
        scene,
    })
}

fn parse_output(raw: &RawConfig) -> Result<PathBuf, CliError> {
    let mut s = SectionReader::new(raw, "output");
    let dir = match s.raw("directory") {
        Some((v, _)) => PathBuf::from(v),
        None => PathBuf::from("out"),
    };
    if let Some((fmt, line)) = s.raw("formats") {
        if fmt != "csv" {
            return Err(cfg_err(line, format!("unsupported output format `{fmt}` (csv)")));
        }
    }
    s.finish()?;
    Ok(dir)
}

fn parse_contour(raw: &RawConfig) -> Result<Option<ContourSection>, CliError> {
    let mut s = SectionReader::new(raw, "contour");
    if !s.exists() {
        return Ok(None);
    }
    let (k_values, k_line) = s
        .f64_list("k_values")?
        .ok_or_else(|| CliError::Config("section [contour]: missing required key `k_values`".into()))?;
    if k_values.is_empty() {
        return Err(cfg_err(k_line, "`k_values` must contain at least one scale factor"));
    }
    let mode = match s.raw("mode") {
        None | Some(("independent", _)) => VerifyMode::Independent,
        Some(("paired", _)) => VerifyMode::Paired,
        Some((other, line)) => {
            return Err(cfg_err(line, format!("unknown mode `{other}` (independent|paired)")))
        }
    };
    let rule = match s.raw("scale_boundaries") {
        None | Some(("true", _)) => ScalingRule::ScaleBoundaries,
        Some(("false", _)) => ScalingRule::FixBoundaries,
        Some((other, line)) => {
            return Err(cfg_err(line, format!("`scale_boundaries` must be true|false, got `{other}`")))
        }
    };
    let (tolerance_se, t_line) = s.f64_or("tolerance_se", 3.0)?;
    if !(tolerance_se > 0.0) {
        return Err(cfg_err(t_line, "`tolerance_se` must be positive"));
    }
    let band_confidence = match s.raw("band_confidence") {
        None => Confidence::P999,
        Some((v, line)) => Confidence::parse(v)
            .ok_or_else(|| cfg_err(line, format!("unsupported confidence `{v}`")))?,
    };
    let (permutations, _) = s.u64_or("permutations", 400)?;
    let (paired_tolerance, pt_line) = s.f64_or("paired_tolerance", 1e-9)?;
    if !(paired_tolerance > 0.0) {
        return Err(cfg_err(pt_line, "`paired_tolerance` must be positive"));
    }
    s.finish()?;
    Ok(Some(ContourSection {
        k_values,
        mode,
        rule,
        tolerance_se,
        band_confidence,
        permutations: permutations as u32,
        paired_tolerance,
    }))
}

fn parse_axis(
    s: &mut SectionReader<'_>,
    prefix: &'static str,
    keys: [&'static str; 5],
) -> Result<AxisSpec, CliError> {
    let [param_key, min_key, max_key, points_key, scale_key] = keys;
    let (param_v, p_line) = s.require(param_key)?;
    let param = match param_v {
        "lambda_b_per_m2" | "lambda_p_per_m2" => SweepParam::BsIntensity,
        "rho_m" | "sigma_m" | "r_d_m" => SweepParam::ClusterScale,
        "r_c1_m" => SweepParam::FirstBoundary,
        other => {
            return Err(cfg_err(
                p_line,
                format!("unknown {prefix} parameter `{other}` (lambda_b_per_m2|rho_m|r_c1_m)"),
            ))
        }
    };
    let (min, _) = s.require_f64(min_key)?;
    let (max, _) = s.require_f64(max_key)?;
    let (points, _) = s.u64_or(points_key, 7)?;
    let scale = match s.raw(scale_key) {
        None | Some(("linear", _)) => AxisScale::Linear,
        Some(("log", _)) => AxisScale::Log,
        Some((other, line)) => {
            return Err(cfg_err(line, format!("unknown axis scale `{other}` (linear|log)")))
        }
    };
    let axis = AxisSpec {
        param,
        min,
        max,
        points: points as usize,
        scale,
    };
    axis.validate()
        .map_err(|e| cfg_err(p_line, format!("{prefix} axis: {e}")))?;
    Ok(axis)
}

fn parse_sweep(raw: &RawConfig) -> Result<Option<SweepSection>, CliError> {
    let mut s = SectionReader::new(raw, "sweep");
    if !s.exists() {
        return Ok(None);
    }
    let x = parse_axis(&mut s, "x", ["x_param", "x_min", "x_max", "x_points", "x_scale"])?;
    let y = parse_axis(&mut s, "y", ["y_param", "y_min", "y_max", "y_points", "y_scale"])?;
    let (levels, l_line) = s
        .f64_list("levels")?
        .ok_or_else(|| CliError::Config("section [sweep]: missing required key `levels`".into()))?;
    if levels.is_empty() {
        return Err(cfg_err(l_line, "`levels` must contain at least one coverage level"));
    }
    if levels.iter().any(|l| !(0.0 < *l && *l < 1.0)) {
        return Err(cfg_err(l_line, "`levels` must lie strictly inside (0,1)"));
    }
    s.finish()?;
    Ok(Some(SweepSection { x, y, levels }))
}

fn parse_voidtest(raw: &RawConfig) -> Result<Option<VoidtestSection>, CliError> {
    let mut s = SectionReader::new(raw, "voidtest");
    if !s.exists() {
        return Ok(None);
    }
    let (proc_list, p_line) = s.require("processes")?;
    let (lambda, _) = s.f64_or("lambda_per_m2", 1.0)?;
    let (lambda_p, _) = s.f64_or("lambda_p_per_m2", 0.5)?;
    let (m_bar, _) = s.f64_or("m_bar", 3.0)?;
    let (rho, _) = s.f64_or("rho_m", 1.0)?;
    let mut processes = Vec::new();
    for name in proc_list.split(',').map(str::trim) {
        let params = match name {
            "ppp" => ProcessParams::Ppp(PppParams::new(lambda).map_err(|e| cfg_err(p_line, e))?),
            "tcp" => ProcessParams::Pcp(
                PcpParams::new(lambda_p, m_bar, rho, ClusterKind::Thomas)
                    .map_err(|e| cfg_err(p_line, e))?,
            ),
            "mcp" => ProcessParams::Pcp(
                PcpParams::new(lambda_p, m_bar, rho, ClusterKind::Matern)
                    .map_err(|e| cfg_err(p_line, e))?,
            ),
            other => {
                return Err(cfg_err(p_line, format!("unknown process `{other}` (ppp|tcp|mcp)")))
            }
        };
        processes.push(params);
    }
    let (k_values, k_line) = s.f64_list("k_values")?.unwrap_or((vec![0.5, 2.0], 0));
    if k_values.is_empty() {
        return Err(cfg_err(k_line, "`k_values` must contain at least one scale factor"));
    }
    let (n_trials, _) = s.u64_or("n_trials", 100_000)?;
    let confidence = match s.raw("confidence") {
        None => Confidence::P99,
        Some((v, line)) => Confidence::parse(v)
            .ok_or_else(|| cfg_err(line, format!("unsupported confidence `{v}`")))?,
    };
    let reparam = match s.raw("reparam") {
        None | Some(("quadratic", _)) => ReparamRule::Quadratic,
        Some(("linear", _)) => ReparamRule::Linear,
        Some((other, line)) => {
            return Err(cfg_err(
                line,
                format!("unknown reparameterization `{other}` (quadratic|linear)"),
            ))
        }
    };
    let region_radii_m = s.f64_list("region_radii_m")?.map(|(v, _)| v);
    s.finish()?;
    Ok(Some(VoidtestSection {
        processes,
        k_values,
        n_trials,
        confidence,
        reparam,
        region_radii_m,
    }))
}
