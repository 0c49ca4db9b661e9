use serde::Serialize;
use serde_json::{json, Value};

use focklab::covering::{
    generate_covering_with, lipschitz_scale, verify_covering, CoveringError, RadialScale, ScaledTau,
    DEFAULT_CANDIDATE_BUDGET,
};
use focklab::criteria::{
    d_unboundedness_witness, ig_mg_verdict, inclusion_ratio_diagnostic, mg_unboundedness_witness, vg_from_sup_into_p_with,
    vg_into_sup_classify_with, CriteriaError, OperatorKind, OperatorVerdict, SymbolKind, Tri, WitnessSequence,
    CLASSIFIER_RADIUS_CAP,
};
use focklab::local_estimates::{
    local_equivalence_check, subharmonic_survey, tau_comparability, LocalError, LocalParams, DEFAULT_SIGMA,
};
use focklab::norms::{
    littlewood_paley_p_with, littlewood_paley_sup_with, norm_with, Exponent, NormError, NormOptions, DEFAULT_RADIUS_CAP,
};
use focklab::profile::{Classification, GrowthProfile};
use focklab::verify::verify_all;
use focklab::weights::{check_admissibility, WeightError};

use crate::config::ExperimentConfig;

pub const DEFAULT_R_MAX: f64 = 1000.0;
pub const DEFAULT_N_SAMPLES: usize = 400;
pub const DEFAULT_N_RANGE: [usize; 2] = [1, 40];
pub const DEFAULT_SURVEY_SAMPLES: usize = 200;
pub const DEFAULT_COMPARABILITY_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Divergent,
    Violation,
    ConfigError,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ConfigError => 2,
            Status::Divergent => 3,
            Status::Violation => 4,
            Status::Error => 5,
        }
    }

    /// Severity order used to combine the statuses of a batch.
    pub fn severity(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Divergent => 1,
            Status::Error => 2,
            Status::Violation => 3,
            Status::ConfigError => 4,
        }
    }
}

/// Result of one entry: the JSON payload plus extra files keyed by suffix.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub error: Option<String>,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn new(status: Status, result: impl Serialize) -> Self {
        Outcome {
            status,
            result: serde_json::to_value(result).expect("results serialize"),
            error: None,
            files: Vec::new(),
        }
    }

    fn failed(status: Status, msg: String) -> Self {
        Outcome {
            status,
            result: Value::Null,
            error: Some(msg),
            files: Vec::new(),
        }
    }

    fn with_profile(mut self, suffix: &str, p: &GrowthProfile) -> Self {
        self.files
            .push((format!("{suffix}.csv"), p.to_csv().expect("profiles serialize to CSV")));
        self
    }
}

/// Errors raised while running an operation, already sorted into statuses.
struct Failure(Status, String);

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure(Status::ConfigError, s)
    }
}

impl From<WeightError> for Failure {
    fn from(e: WeightError) -> Self {
        let status = match e {
            WeightError::InvalidParameter(_) | WeightError::UnknownSpec(_) | WeightError::Expr(_) => Status::ConfigError,
            WeightError::NonPositiveLaplacian { .. } => Status::Error,
        };
        Failure(status, e.to_string())
    }
}

impl From<NormError> for Failure {
    fn from(e: NormError) -> Self {
        let status = match e {
            NormError::DivergentIntegral { .. } => Status::Divergent,
            NormError::InvalidExponent(_) => Status::ConfigError,
        };
        Failure(status, e.to_string())
    }
}

impl From<CriteriaError> for Failure {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::InvalidParameter(m) => Failure(Status::ConfigError, format!("invalid parameter: {m}")),
            CriteriaError::Norm(n) => n.into(),
        }
    }
}

impl From<LocalError> for Failure {
    fn from(e: LocalError) -> Self {
        match e {
            LocalError::InvalidParameter(m) => Failure(Status::ConfigError, format!("invalid parameter: {m}")),
            LocalError::Weight(w) => w.into(),
            e @ LocalError::Quadrature { .. } => Failure(Status::Error, e.to_string()),
        }
    }
}

impl From<CoveringError> for Failure {
    fn from(e: CoveringError) -> Self {
        match e {
            CoveringError::InvalidRegion(_) => Failure(Status::ConfigError, e.to_string()),
            CoveringError::Weight(w) => w.into(),
            e @ CoveringError::RegionTooLarge { .. } => Failure(Status::Error, e.to_string()),
        }
    }
}

type Run = Result<Outcome, Failure>;

pub fn run(operation: &str, cfg: &ExperimentConfig) -> Outcome {
    let res = match operation {
        "weight-check" => weight_check(cfg),
        "norm" => norm_op(cfg, false),
        "lp-norm" => norm_op(cfg, true),
        "classify-vg" => classify_vg(cfg),
        "verdict-igmg" => verdict_igmg(cfg),
        "witness-mg" => witness(cfg, true),
        "witness-d" => witness(cfg, false),
        "covering" => covering(cfg),
        "local-checks" => local_checks(cfg),
        "inclusion-diagnostic" => inclusion(cfg),
        "verify-all" => Ok(verify()),
        other => Err(Failure(Status::ConfigError, format!("unknown operation `{other}`"))),
    };
    res.unwrap_or_else(|Failure(status, msg)| Outcome::failed(status, msg))
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{name}` must be finite and positive, got {v}").into())
    }
}

fn norm_options(cfg: &ExperimentConfig) -> Result<NormOptions, Failure> {
    Ok(NormOptions {
        radius_cap: positive("radius_cap", cfg.params.radius_cap.unwrap_or(DEFAULT_RADIUS_CAP))?,
    })
}

fn weight_check(cfg: &ExperimentConfig) -> Run {
    let w = cfg.weight()?;
    let r_max = positive("r_max", cfg.params.r_max.unwrap_or(DEFAULT_R_MAX))?;
    if r_max <= 1.0 {
        return Err("`r_max` must exceed 1".to_string().into());
    }
    let n = cfg.params.n_samples.unwrap_or(DEFAULT_N_SAMPLES);
    if n < 8 {
        return Err("`n_samples` must be at least 8".to_string().into());
    }
    let rep = check_admissibility(&w, r_max, n);
    let tau = GrowthProfile::new(rep.radii.clone(), rep.ln_tau.clone());
    Ok(Outcome::new(Status::Ok, &rep).with_profile("ln_tau", &tau))
}

fn norm_op(cfg: &ExperimentConfig, lp: bool) -> Run {
    let w = cfg.weight()?;
    let f = cfg.symbol("f")?;
    let p = cfg.exponent("p", None)?;
    let opts = norm_options(cfg)?;
    let res = match (lp, p) {
        (false, p) => norm_with(&f, &w, p, &opts)?,
        (true, Exponent::Finite(p)) => littlewood_paley_p_with(&f, &w, p, &opts)?,
        (true, Exponent::Infinite) => littlewood_paley_sup_with(&f, &w, &opts),
    };
    let status = if res.divergent { Status::Divergent } else { Status::Ok };
    Ok(Outcome::new(status, &res))
}

fn verdict_status(v: &OperatorVerdict) -> Status {
    if v.bounded == Tri::No {
        Status::Divergent
    } else {
        Status::Ok
    }
}

fn classify_vg(cfg: &ExperimentConfig) -> Run {
    let w = cfg.weight()?;
    let g = cfg.symbol("g")?;
    let p = cfg.exponent("p", None)?;
    let q = cfg.exponent("q", Some(Exponent::Infinite))?;
    let cap = positive("radius_cap", cfg.params.radius_cap.unwrap_or(CLASSIFIER_RADIUS_CAP))?;
    let v = match (p, q) {
        (p, Exponent::Infinite) => vg_into_sup_classify_with(&g, &w, p, cap),
        (Exponent::Infinite, Exponent::Finite(q)) => vg_from_sup_into_p_with(&g, &w, q, cap)?,
        _ => return Err("classify-vg needs q = inf, or p = inf with finite q".to_string().into()),
    };
    let mut out = Outcome::new(verdict_status(&v), &v);
    if let Some(profile) = &v.profile {
        out = out.with_profile("profile", profile);
    }
    Ok(out)
}

fn verdict_igmg(cfg: &ExperimentConfig) -> Run {
    let g = cfg.symbol("g")?;
    let p = cfg.exponent("p", None)?;
    let q = cfg.exponent("q", Some(p))?;
    let op = match cfg.params.operator.as_deref().map(str::to_ascii_lowercase).as_deref() {
        Some("ig" | "i_g") => OperatorKind::Ig,
        Some("mg" | "m_g") => OperatorKind::Mg,
        other => return Err(format!("`params.operator` must be Ig or Mg, got {other:?}").into()),
    };
    let v = ig_mg_verdict(op, SymbolKind::of(&g), p, q)?;
    Ok(Outcome::new(verdict_status(&v), &v))
}

fn witness_profile(seq: &WitnessSequence) -> Option<GrowthProfile> {
    (seq.n.first().copied().unwrap_or(0) >= 1 && seq.n.len() >= 4).then(|| seq.profile())
}

fn witness(cfg: &ExperimentConfig, mg: bool) -> Run {
    let w = cfg.weight()?;
    let range = cfg.params.n_range.unwrap_or(DEFAULT_N_RANGE);
    let n = range[0]..=range[1];
    let p = cfg.exponent("p", None)?;
    let seq = if mg {
        mg_unboundedness_witness(&cfg.symbol("g")?, &w, p, n)?
    } else {
        d_unboundedness_witness(&w, p, cfg.exponent("q", Some(p))?, n)?
    };
    let profile = witness_profile(&seq);
    let divergent = seq.monotone_tail && profile.as_ref().map_or(false, |p| p.classification == Classification::Divergent);
    let status = if divergent { Status::Divergent } else { Status::Ok };
    let mut out = Outcome::new(
        status,
        json!({
            "sequence": seq,
            "classification": profile.as_ref().map(|p| p.classification),
            "unbounded_corroborated": divergent,
        }),
    );
    if let Some(p) = &profile {
        out = out.with_profile("profile", p);
    }
    Ok(out)
}

fn inclusion(cfg: &ExperimentConfig) -> Run {
    let w = cfg.weight()?;
    let p = cfg.exponent("p", None)?;
    let q = cfg.exponent("q", None)?;
    let range = cfg.params.n_range.unwrap_or(DEFAULT_N_RANGE);
    let prof = inclusion_ratio_diagnostic(&w, p, q, range[0]..=range[1])?;
    let status = if prof.classification == Classification::Divergent {
        Status::Divergent
    } else {
        Status::Ok
    };
    Ok(Outcome::new(status, &prof).with_profile("profile", &prof))
}

fn covering(cfg: &ExperimentConfig) -> Run {
    let w = cfg.weight()?;
    let region = positive("region_radius", cfg.params.region_radius.ok_or_else(|| "missing `params.region_radius`".to_string())?)?;
    let budget = cfg.params.candidate_budget.unwrap_or(DEFAULT_CANDIDATE_BUDGET);
    let s = lipschitz_scale(&w, region)?;
    let t = ScaledTau { weight: &w, scale: s };
    let lat = generate_covering_with(&t, s, region, budget)?;
    let spacing = match cfg.params.probe_spacing {
        Some(h) => positive("probe_spacing", h)?,
        None => t.extremes(region).0 / 10.0,
    };
    let rep = verify_covering(&lat, &t, spacing);
    let status = if rep.all_ok() { Status::Ok } else { Status::Violation };
    let mut out = Outcome::new(status, json!({ "probe_spacing": spacing, "scale": s, "report": rep }));
    out.files
        .push(("lattice.csv".into(), lat.to_csv().expect("lattices serialize to CSV")));
    Ok(out)
}

fn local_checks(cfg: &ExperimentConfig) -> Run {
    let w = cfg.weight()?;
    let p = cfg.finite_exponent("p", Some(2.0))?;
    let q = cfg.finite_exponent("q", Some(p))?;
    let sigma = cfg.params.sigma.unwrap_or(DEFAULT_SIGMA);
    let params = LocalParams::new(sigma, cfg.params.beta.unwrap_or(p))?;
    let samples = cfg.params.samples.unwrap_or(DEFAULT_SURVEY_SAMPLES);
    let k = cfg.params.k.unwrap_or(2);
    let survey = subharmonic_survey(&w, p, &params, samples)?;
    let comparability = tau_comparability(&w, sigma, DEFAULT_COMPARABILITY_SAMPLES)?;
    let equivalence = local_equivalence_check(k, &w, p, q, sigma)?;
    let ok = survey.ratios.iter().all(|r| r.is_finite()) && equivalence.agree;
    let status = if ok { Status::Ok } else { Status::Violation };
    let out = Outcome::new(
        status,
        json!({
            "survey": survey,
            "comparability": comparability,
            "equivalence": equivalence,
        }),
    );
    Ok(out
        .with_profile("side_a", &equivalence.side_a)
        .with_profile("side_b", &equivalence.side_b))
}

fn verify() -> Outcome {
    let rep = verify_all();
    let status = if rep.all_passed && rep.missing.is_empty() {
        Status::Ok
    } else {
        Status::Violation
    };
    let manifest = serde_json::to_string_pretty(&json!({
        "manifest": rep.manifest,
        "missing": rep.missing,
    }))
    .expect("manifest serializes");
    let mut out = Outcome::new(status, &rep);
    out.files.push(("manifest.json".into(), manifest + "\n"));
    out
}
