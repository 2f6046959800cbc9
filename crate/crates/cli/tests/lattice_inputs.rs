//! End-to-end coverage of user-supplied lattice data: explicit series lines
//! must verify exactly like the built-in recipe, and a wrong candidate must
//! surface as a failing residual rather than silence.

use tmotive_cli::commands::{self, RunCfg};
use tmotive_cli::modfile;
use tmotive_core::drinfeld::carlitz_period;
use tmotive_core::field::{Ctx, FieldSpec, K};

const CM_HEADER: &str = "\
p = 2
e = 1
m = 2
D = 2
r = 2
kappa_1 = 0
kappa_2 = 1
";

fn cfg() -> RunCfg {
    RunCfg { n: 2, tdeg: 10, prec: 36, hterms: 8, seed: 1 }
}

#[test]
fn explicit_lambda_series_verify() {
    // compute the lattice out of band and hand it over as text
    let rho_ctx = Ctx::new(FieldSpec::new(2, 1, 2, 2).unwrap()).unwrap();
    let big = Ctx::new(FieldSpec::new(2, 2, 1, 1).unwrap()).unwrap();
    let (pi, _) = carlitz_period(&big, 70).unwrap();
    let l1 = pi.clone();
    let l2 = pi.scale(&rho_ctx, K(2));
    let text = format!(
        "{CM_HEADER}lambda_1 = {}\nlambda_2 = {}\n",
        l1.to_text(&rho_ctx),
        l2.to_text(&rho_ctx)
    );
    let def = modfile::parse(&text).unwrap();
    let (out, pass) = commands::verify_triv(&def, &cfg()).unwrap();
    assert!(pass, "explicit lattice should verify: {out:?}");
}

#[test]
fn wrong_lambda_is_reported_not_hidden() {
    let rho_ctx = Ctx::new(FieldSpec::new(2, 1, 2, 2).unwrap()).unwrap();
    let big = Ctx::new(FieldSpec::new(2, 2, 1, 1).unwrap()).unwrap();
    let (pi, _) = carlitz_period(&big, 70).unwrap();
    // perturb the first candidate off the lattice
    let bad = pi.add(&rho_ctx, &tmotive_core::series::RamSeries::one(&rho_ctx, 3));
    let l2 = pi.scale(&rho_ctx, K(2));
    let text = format!(
        "{CM_HEADER}lambda_1 = {}\nlambda_2 = {}\n",
        bad.to_text(&rho_ctx),
        l2.to_text(&rho_ctx)
    );
    let def = modfile::parse(&text).unwrap();
    let (out, pass) = commands::verify_triv(&def, &cfg()).unwrap();
    assert!(!pass, "a non-lattice candidate must fail the residual check");
    // the report carries the offending valuation instead of hiding it
    assert!(out.levels.iter().any(|l| l.residual_max_valuation.is_some()));
}
