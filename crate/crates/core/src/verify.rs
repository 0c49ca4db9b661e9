//! The invariant battery behind `focklab verify-all`.
//!
//! Every check names the operations it exercises; the report carries the
//! resulting manifest and lists any operation that no check touched.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covering::{generate_covering, lipschitz_scale, verify_covering, RadialScale, ScaledTau};
use crate::criteria::{
    d_unboundedness_witness, degree_threshold_power_weight, ig_mg_verdict, inclusion_ratio_diagnostic,
    mg_unboundedness_witness, vg_from_sup_into_p, vg_into_sup_classify, OperatorKind, SymbolKind, Tri,
};
use crate::entire::{weighted_log_modulus, EntireFunction};
use crate::local_estimates::{
    local_equivalence_check, subharmonic_mean_ratio, tau_comparability, LocalParams, CONSTANT_RATIO,
};
use crate::norms::{littlewood_paley_p, littlewood_paley_sup, norm_finite_p, norm_sup, Exponent};
use crate::numeric::ln_factorial;
use crate::operators::{companion, differentiate_op, multiply, parts_identity_residual, volterra};
use crate::profile::Classification;
use crate::weight_expr::parse;
use crate::weights::{check_admissibility, Weight};
use crate::Error;

/// Every operation the battery must reach, as `module::name`.
pub const OPERATIONS: &[&str] = &[
    "weight_expr::parse",
    "weight_expr::differentiate",
    "weight_expr::eval_log",
    "weights::make_weight",
    "weights::laplacian",
    "weights::tau",
    "weights::tau_profile",
    "weights::check_admissibility",
    "entire::evaluate",
    "entire::derivative",
    "entire::antiderivative",
    "entire::weighted_log_modulus",
    "operators::volterra",
    "operators::companion",
    "operators::multiply",
    "operators::differentiate_op",
    "operators::parts_identity_residual",
    "norms::norm_finite_p",
    "norms::norm_sup",
    "norms::littlewood_paley_p",
    "norms::littlewood_paley_sup",
    "criteria::vg_into_sup_classify",
    "criteria::vg_from_sup_into_p",
    "criteria::degree_threshold_power_weight",
    "criteria::ig_mg_verdict",
    "criteria::mg_unboundedness_witness",
    "criteria::d_unboundedness_witness",
    "criteria::inclusion_ratio_diagnostic",
    "covering::lipschitz_scale",
    "covering::generate_covering",
    "covering::verify_covering",
    "local_estimates::subharmonic_mean_ratio",
    "local_estimates::tau_comparability",
    "local_estimates::local_equivalence_check",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub operations: Vec<String>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    /// Operation to the checks that exercised it.
    pub manifest: BTreeMap<String, Vec<String>>,
    pub missing: Vec<String>,
    pub all_passed: bool,
}

type Outcome = Result<(bool, String), Error>;

struct Check {
    name: &'static str,
    ops: &'static [&'static str],
    run: fn() -> Outcome,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn expr_round_trip() -> Outcome {
    let e = parse("exp(r) + r^3/3")?;
    let d = e.differentiate();
    let r = 1.3f64;
    let fd = (e.eval(r + 1e-6) - e.eval(r - 1e-6)) / 2e-6;
    let want = r.exp() + r * r;
    let ln = e.eval_log(r)?;
    let ok = rel(d.eval(r), want) < 1e-14 && rel(fd, want) < 1e-8 && rel(ln, e.eval(r).ln()) < 1e-14;
    Ok((ok, format!("d/dr at 1.3 = {}, expected {want}", d.eval(r))))
}

fn weight_quantities() -> Outcome {
    let p4 = Weight::power(4.0)?;
    let g = Weight::gaussian();
    let lap = p4.laplacian(2.0);
    let tau = g.tau(5.0)?;
    let prof = p4.tau_profile(1000.0, 60)?;
    let ok = rel(lap, 64.0) < 1e-14
        && rel(tau, 1.0 / 3f64.sqrt()) < 1e-14
        && prof.classification == Classification::Vanishing;
    Ok((ok, format!("Laplacian {lap}, Gaussian tau {tau}, power:4 tau {:?}", prof.classification)))
}

fn admissibility() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (spec, want) in [("power:3", true), ("power:4", true), ("exp:1", true), ("superexp:1", true), ("gaussian", false)] {
        let w: Weight = spec.parse()?;
        let v = check_admissibility(&w, 1000.0, 400).verdict;
        ok &= v == want;
        detail.push(format!("{spec}={v}"));
    }
    Ok((ok, detail.join(" ")))
}

fn series_evaluation() -> Outcome {
    let e = EntireFunction::truncated_exp(Complex64::new(1.0, 0.0), 60);
    let z = Complex64::new(1.0, 1.0);
    let v = e.evaluate(z).to_complex();
    let err = (v - z.exp()).norm() / z.exp().norm();
    let f = EntireFunction::from_real(&[1.0, -2.0, 0.5, 3.0]);
    let back = f.derivative().antiderivative();
    let round = (0..=3).all(|k| (back.coeff(k) - if k == 0 { Complex64::new(0.0, 0.0) } else { f.coeff(k) }).norm() < 1e-15);
    let wl = weighted_log_modulus(&EntireFunction::monomial(3), &Weight::gaussian(), Complex64::new(0.0, 2.0));
    let ok = err < 1e-14 && round && (wl - (3.0 * 2f64.ln() - 2.0)).abs() < 1e-14;
    Ok((ok, format!("exp(1+i) rel error {err:e}, weighted log modulus {wl}")))
}

fn operator_identities() -> Outcome {
    let z = EntireFunction::monomial(1);
    let g = EntireFunction::from_real(&[0.5, -1.0, 2.0, 0.25]);
    let f = EntireFunction::from_real(&[1.0, 1.0, -3.0, 0.0, 2.0]);
    let res = parts_identity_residual(&g, &f);
    let ok = volterra(&z, &EntireFunction::constant(Complex64::new(1.0, 0.0))) == z
        && companion(&EntireFunction::constant(Complex64::new(1.0, 0.0)), &z) == z
        && multiply(&z, &z) == EntireFunction::monomial(2)
        && differentiate_op(&EntireFunction::monomial(2)) == z.scale(Complex64::new(2.0, 0.0))
        && res < 1e-14;
    Ok((ok, format!("parts identity residual {res:e}")))
}

fn classical_norms() -> Outcome {
    let g = Weight::gaussian();
    let mut worst: f64 = 0.0;
    for n in [0usize, 3, 10] {
        let r = norm_finite_p(&EntireFunction::monomial(n), &g, 2.0)?;
        let want = 0.5 * (PI.ln() + ln_factorial(n));
        worst = worst.max((r.log_value - want).abs());
    }
    for n in [1usize, 5, 20] {
        let r = norm_sup(&EntireFunction::monomial(n), &g);
        let nf = n as f64;
        worst = worst.max((r.log_value - 0.5 * nf * (nf.ln() - 1.0)).abs());
    }
    Ok((worst < 1e-8, format!("largest log error {worst:e}")))
}

fn littlewood_paley() -> Outcome {
    let w = Weight::power(4.0)?;
    let f = EntireFunction::from_real(&[1.0, 0.0, 2.0, 1.0]);
    let a = norm_finite_p(&f, &w, 2.0)?.log_value - littlewood_paley_p(&f, &w, 2.0)?.log_value;
    let b = norm_sup(&f, &w).log_value - littlewood_paley_sup(&f, &w).log_value;
    let inside = |x: f64| x.exp() >= 0.05 && x.exp() <= 20.0;
    Ok((inside(a) && inside(b), format!("norm/LP ratios {} and {}", a.exp(), b.exp())))
}

fn vg_classifiers() -> Outcome {
    let w = Weight::power(4.0)?;
    let t = degree_threshold_power_weight(4.0, Exponent::Finite(2.0))?;
    let above = vg_into_sup_classify(&EntireFunction::monomial(5), &w, Exponent::Infinite);
    let at = vg_into_sup_classify(&EntireFunction::monomial(3), &w, Exponent::Finite(2.0));
    let into = vg_from_sup_into_p(&EntireFunction::monomial(1), &w, 2.0)?;
    let ok = t.value == 3.0 && above.bounded == Tri::No && at.bounded == Tri::Yes && into.bounded != Tri::Inconclusive;
    Ok((
        ok,
        format!(
            "threshold {}, z^5 into sup {:?}, z^3 (p=2) {:?}, sup into p=2 {:?}",
            t.value, above.bounded, at.bounded, into.bounded
        ),
    ))
}

fn ig_mg_table() -> Outcome {
    let two = Exponent::Finite(2.0);
    let four = Exponent::Finite(4.0);
    let c = Complex64::new(2.0, 0.0);
    let a = ig_mg_verdict(OperatorKind::Mg, SymbolKind::Constant(c), two, two)?;
    let b = ig_mg_verdict(OperatorKind::Mg, SymbolKind::Nonconstant, two, two)?;
    let d = ig_mg_verdict(OperatorKind::Ig, SymbolKind::Constant(c), four, two)?;
    let ok = a.bounded == Tri::Yes && a.compact == Tri::No && b.bounded == Tri::No && d.bounded == Tri::No;
    Ok((ok, format!("M_c {:?}/{:?}, M_z {:?}, I_c (4 -> 2) {:?}", a.bounded, a.compact, b.bounded, d.bounded)))
}

fn witnesses() -> Outcome {
    let w = Weight::power(4.0)?;
    let two = Exponent::Finite(2.0);
    let mg = mg_unboundedness_witness(&EntireFunction::monomial(1), &w, two, 1..=20)?;
    let d = d_unboundedness_witness(&w, two, two, 2..=20)?;
    let inc = inclusion_ratio_diagnostic(&Weight::gaussian(), two, Exponent::Finite(4.0), 1..=20)?;
    let ok = mg.strictly_increasing() && d.strictly_increasing() && inc.classification != Classification::Divergent;
    Ok((
        ok,
        format!(
            "M_z and D ratios increasing: {} {}; inclusion profile {:?}",
            mg.strictly_increasing(),
            d.strictly_increasing(),
            inc.classification
        ),
    ))
}

fn covering_small_region() -> Outcome {
    let w = Weight::power(4.0)?;
    let region = 1.2;
    let s = lipschitz_scale(&w, region)?;
    let lat = generate_covering(&w, region)?;
    let t = ScaledTau { weight: &w, scale: s };
    let (t_min, _) = t.extremes(region);
    let rep = verify_covering(&lat, &t, t_min / 10.0);
    Ok((
        rep.all_ok(),
        format!("scale {s}, {} centers, N_max {}, {} probe failures", rep.centers, rep.n_max, rep.coverage_failures),
    ))
}

fn local_checks() -> Outcome {
    let w = Weight::power(4.0)?;
    let flat = LocalParams::new(0.1, 0.0)?;
    let r = subharmonic_mean_ratio(&EntireFunction::monomial(0), &w, 2.0, &flat, Complex64::new(1.0, 2.0))?;
    let spreads = [0.2, 0.1, 0.05]
        .iter()
        .map(|s| tau_comparability(&w, *s, 100).map(|c| c.spread()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut agree = true;
    for k in [0, 6] {
        for (p, q) in [(1.0, 2.0), (2.0, 2.0), (4.0, 1.0)] {
            agree &= local_equivalence_check(k, &w, p, q, 0.1)?.agree;
        }
    }
    let ok = (r - CONSTANT_RATIO).abs() < 1e-12 && spreads[0] > spreads[1] && spreads[1] > spreads[2] && agree;
    Ok((ok, format!("constant ratio {r}, tau spreads {spreads:?}, equivalence agrees {agree}")))
}

const CHECKS: &[Check] = &[
    Check {
        name: "expression_derivative",
        ops: &["weight_expr::parse", "weight_expr::differentiate", "weight_expr::eval_log"],
        run: expr_round_trip,
    },
    Check {
        name: "weight_quantities",
        ops: &["weights::make_weight", "weights::laplacian", "weights::tau", "weights::tau_profile"],
        run: weight_quantities,
    },
    Check {
        name: "admissibility_audit",
        ops: &["weights::make_weight", "weights::check_admissibility"],
        run: admissibility,
    },
    Check {
        name: "series_evaluation",
        ops: &[
            "entire::evaluate",
            "entire::derivative",
            "entire::antiderivative",
            "entire::weighted_log_modulus",
        ],
        run: series_evaluation,
    },
    Check {
        name: "operator_identities",
        ops: &[
            "operators::volterra",
            "operators::companion",
            "operators::multiply",
            "operators::differentiate_op",
            "operators::parts_identity_residual",
        ],
        run: operator_identities,
    },
    Check {
        name: "classical_norms",
        ops: &["norms::norm_finite_p", "norms::norm_sup"],
        run: classical_norms,
    },
    Check {
        name: "littlewood_paley",
        ops: &[
            "norms::norm_finite_p",
            "norms::norm_sup",
            "norms::littlewood_paley_p",
            "norms::littlewood_paley_sup",
        ],
        run: littlewood_paley,
    },
    Check {
        name: "vg_classifiers",
        ops: &[
            "criteria::degree_threshold_power_weight",
            "criteria::vg_into_sup_classify",
            "criteria::vg_from_sup_into_p",
        ],
        run: vg_classifiers,
    },
    Check {
        name: "ig_mg_table",
        ops: &["criteria::ig_mg_verdict"],
        run: ig_mg_table,
    },
    Check {
        name: "witnesses",
        ops: &[
            "criteria::mg_unboundedness_witness",
            "criteria::d_unboundedness_witness",
            "criteria::inclusion_ratio_diagnostic",
        ],
        run: witnesses,
    },
    Check {
        name: "covering_small_region",
        ops: &["covering::lipschitz_scale", "covering::generate_covering", "covering::verify_covering"],
        run: covering_small_region,
    },
    Check {
        name: "local_estimates",
        ops: &[
            "local_estimates::subharmonic_mean_ratio",
            "local_estimates::tau_comparability",
            "local_estimates::local_equivalence_check",
        ],
        run: local_checks,
    },
];

/// Runs the whole battery. Checks run in a fixed order; an error inside a
/// check marks it failed and is reported in `detail`.
pub fn verify_all() -> VerifyReport {
    let mut checks = Vec::with_capacity(CHECKS.len());
    let mut manifest: BTreeMap<String, Vec<String>> =
        OPERATIONS.iter().map(|op| (op.to_string(), Vec::new())).collect();
    for c in CHECKS {
        let (passed, detail) = match (c.run)() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        for op in c.ops {
            manifest.entry(op.to_string()).or_default().push(c.name.to_string());
        }
        checks.push(CheckResult {
            name: c.name.to_string(),
            operations: c.ops.iter().map(|s| s.to_string()).collect(),
            passed,
            detail,
        });
    }
    let missing: Vec<String> = manifest
        .iter()
        .filter(|(_, v)| v.is_empty())
        .map(|(k, _)| k.clone())
        .collect();
    let all_passed = missing.is_empty() && checks.iter().all(|c| c.passed);
    VerifyReport {
        checks,
        manifest,
        missing,
        all_passed,
    }
}
