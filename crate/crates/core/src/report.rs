//! End-to-end evaluation of one scenario into a flat report record.

use serde::{Deserialize, Serialize};

use crate::absorption::{
    indistinguishable_double_absorption, outcome_probabilities, InitialStateKind, Scenario, State,
};
use crate::entanglement::{
    build_lambda, hyperentanglement_report, lambda_schmidt_route, lambda_spectrum_check, schmidt_decompose,
    Classification, REAL_TOLERANCE,
};
use crate::error::Result;
use crate::state::Bipartition;

/// Everything computed for one scenario. Field names are the CSV and
/// JSON-lines column names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub kind: InitialStateKind,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub delta_re: f64,
    pub delta_im: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub p_double: f64,
    pub p_a_only: f64,
    pub p_b_only: f64,
    pub p_none: f64,
    pub p_double_indistinguishable: f64,
    pub entropy_initial: f64,
    pub entropy_final: f64,
    pub entropy_final_lambda: Option<f64>,
    pub k_value: Option<f64>,
    pub lambda_verdict: Option<bool>,
    pub spatial_internal_product: bool,
    pub classification: Classification,
    pub linear_regime_warning: bool,
}

impl ScenarioReport {
    /// Column names, in serialization order.
    pub const COLUMNS: [&'static str; 26] = [
        "kind",
        "alpha_re",
        "alpha_im",
        "beta_re",
        "beta_im",
        "gamma_re",
        "gamma_im",
        "delta_re",
        "delta_im",
        "a",
        "b",
        "c",
        "d",
        "p_double",
        "p_a_only",
        "p_b_only",
        "p_none",
        "p_double_indistinguishable",
        "entropy_initial",
        "entropy_final",
        "entropy_final_lambda",
        "k_value",
        "lambda_verdict",
        "spatial_internal_product",
        "classification",
        "linear_regime_warning",
    ];

    /// Values formatted for CSV, aligned with [`Self::COLUMNS`].
    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_number).unwrap_or_default();
        vec![
            self.kind.to_string(),
            fmt_number(self.alpha_re),
            fmt_number(self.alpha_im),
            fmt_number(self.beta_re),
            fmt_number(self.beta_im),
            fmt_number(self.gamma_re),
            fmt_number(self.gamma_im),
            fmt_number(self.delta_re),
            fmt_number(self.delta_im),
            fmt_number(self.a),
            fmt_number(self.b),
            fmt_number(self.c),
            fmt_number(self.d),
            fmt_number(self.p_double),
            fmt_number(self.p_a_only),
            fmt_number(self.p_b_only),
            fmt_number(self.p_none),
            fmt_number(self.p_double_indistinguishable),
            fmt_number(self.entropy_initial),
            fmt_number(self.entropy_final),
            opt(self.entropy_final_lambda),
            opt(self.k_value),
            self.lambda_verdict.map(|v| v.to_string()).unwrap_or_default(),
            self.spatial_internal_product.to_string(),
            self.classification.to_string(),
            self.linear_regime_warning.to_string(),
        ]
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_number(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Branch-weighted entropy across the atoms. Zero for mixtures of
/// product branches; pure states give their Schmidt entropy.
fn across_atoms_entropy(state: &State) -> Result<f64> {
    state
        .branches()
        .into_iter()
        .map(|(w, k)| Ok(w * schmidt_decompose(k, Bipartition::Particles)?.entropy_bits))
        .sum()
}

/// Runs the whole pipeline for one scenario.
///
/// Mixture scenarios report branch-weighted entropies and the most
/// entangled branch classification. The Λ fields are filled for the
/// entangled preparation with real amplitudes only.
pub fn evaluate(scenario: &Scenario, product_tolerance: f64) -> Result<ScenarioReport> {
    let initial = scenario.initial();
    let final_state = scenario.final_state()?;
    let outcomes = outcome_probabilities(&final_state)?;
    let p_indist = indistinguishable_double_absorption(&final_state, &scenario.overlaps)?;

    let mut classification = Classification::Separable;
    let mut dof_product = true;
    for (_, ket) in final_state.branches() {
        let r = hyperentanglement_report(ket, product_tolerance)?;
        classification = classification.max(r.classification);
        dof_product &= r.spatial_internal_product;
    }

    let (entropy_final_lambda, k_value, lambda_verdict) =
        if scenario.kind == InitialStateKind::Entangled && scenario.amplitudes.is_real(REAL_TOLERANCE) {
            let lm = build_lambda(&scenario.amplitudes, &scenario.overlaps)?;
            let spectrum = lambda_spectrum_check(&lm);
            let eigen = lambda_schmidt_route(&lm)?;
            (Some(eigen.entropy_bits), Some(lm.k_value), Some(spectrum.verdict))
        } else {
            (None, None, None)
        };

    let amps = &scenario.amplitudes;
    let ov = &scenario.overlaps;
    Ok(ScenarioReport {
        kind: scenario.kind,
        alpha_re: amps.alpha.re,
        alpha_im: amps.alpha.im,
        beta_re: amps.beta.re,
        beta_im: amps.beta.im,
        gamma_re: amps.gamma.re,
        gamma_im: amps.gamma.im,
        delta_re: amps.delta.re,
        delta_im: amps.delta.im,
        a: ov.a,
        b: ov.b,
        c: ov.c,
        d: ov.d,
        p_double: outcomes.p_double,
        p_a_only: outcomes.p_a_only,
        p_b_only: outcomes.p_b_only,
        p_none: outcomes.p_none,
        p_double_indistinguishable: p_indist,
        entropy_initial: across_atoms_entropy(&initial)?,
        entropy_final: across_atoms_entropy(&final_state)?,
        entropy_final_lambda,
        k_value,
        lambda_verdict,
        spatial_internal_product: dof_product,
        classification,
        linear_regime_warning: amps.linear_regime_warning(),
    })
}
