//! Sequential and parallel execution must give bit-identical results. The
//! execution mode is process-wide, so everything runs inside one test.

use num_complex::Complex64;

use focklab::covering::{generate_covering, verify_covering, RadialScale, ScaledTau};
use focklab::criteria::{d_unboundedness_witness, mg_unboundedness_witness, vg_from_sup_into_p, vg_into_sup_classify};
use focklab::entire::EntireFunction;
use focklab::exec::{set_execution, Execution};
use focklab::local_estimates::{local_equivalence_check, subharmonic_survey, tau_comparability, LocalParams};
use focklab::norms::{littlewood_paley_p, norm, Exponent};
use focklab::weights::Weight;

fn run_all() -> String {
    let w = Weight::power(4.0).unwrap();
    let e: Weight = "exp:1".parse().unwrap();
    let g = EntireFunction::new(vec![Complex64::new(1.0, 0.5), Complex64::new(0.0, 0.0), Complex64::new(-2.0, 1.0)]);
    let mut out = Vec::new();
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinite] {
        out.push(format!("{:?}", norm(&g, &w, p).unwrap()));
        out.push(format!("{:?}", vg_into_sup_classify(&g, &w, p)));
        out.push(format!("{:?}", vg_into_sup_classify(&g, &e, p)));
    }
    out.push(format!("{:?}", littlewood_paley_p(&g, &e, 2.0).unwrap()));
    out.push(format!("{:?}", vg_from_sup_into_p(&g, &w, 2.0).unwrap()));
    out.push(format!("{:?}", mg_unboundedness_witness(&g, &w, Exponent::Finite(2.0), 1..=20).unwrap()));
    out.push(format!("{:?}", d_unboundedness_witness(&w, Exponent::Finite(2.0), Exponent::Infinite, 1..=20).unwrap()));
    let params = LocalParams::new(0.1, 2.0).unwrap();
    out.push(format!("{:?}", subharmonic_survey(&w, 2.0, &params, 50).unwrap()));
    out.push(format!("{:?}", tau_comparability(&e, 0.1, 40).unwrap()));
    out.push(format!("{:?}", local_equivalence_check(6, &w, 2.0, 4.0, 0.1).unwrap()));
    let lat = generate_covering(&w, 1.2).unwrap();
    let t = ScaledTau { weight: &w, scale: lat.scale };
    let (t_min, _) = t.extremes(lat.region_radius);
    out.push(format!("{:?}", verify_covering(&lat, &t, t_min / 5.0)));
    out.push(lat.to_csv().unwrap());
    out.join("\n")
}

#[test]
fn sequential_and_parallel_agree() {
    set_execution(Execution::Sequential);
    let seq = run_all();
    set_execution(Execution::Parallel);
    let par = run_all();
    assert!(seq == par, "results differ between execution modes");
}
