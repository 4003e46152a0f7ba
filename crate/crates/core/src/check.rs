//! Self-contained reproduction checks behind the `check` subcommand.
//!
//! Each check draws parameters from a fixed-seed generator, evaluates one
//! claim at a pinned tolerance and reports measured against expected
//! values. A [`Fault`] corrupts one step of one check so that the harness
//! itself can be shown to fail.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::absorption::{
    apply_absorption, build_initial, indistinguishable_double_absorption, outcome_probabilities,
    AbsorptionAmplitudes, InitialStateKind, Scenario, State,
};
use crate::entanglement::{
    build_lambda, entropy_bits, is_product_across, lambda_from_state, lambda_schmidt_route,
    lambda_spectrum_check, schmidt_decompose, singular_values, PRODUCT_TOLERANCE,
};
use crate::error::Result;
use crate::overlap::{
    gaussian_recoil_overlap, gaussian_recoil_overlap_quadrature, GaussianRecoilModel, RecoilOverlaps,
};
use crate::state::{
    coefficient_matrix, normalize, reduced_density, BasisLabel, Bipartition, Ket, Particle, Subsystem,
};

pub const ENHANCEMENT_TOLERANCE: f64 = 1e-12;
pub const LAMBDA_ENTRY_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;
pub const MINOR_TOLERANCE: f64 = 1e-12;
pub const ENTROPY_TOLERANCE: f64 = 1e-9;
/// Eigen-route and SVD-route entropies are compared only above this `|k|`.
pub const ROUTE_K_THRESHOLD: f64 = 1e-6;
/// Generic states must have a second singular value above this fraction of the first.
pub const NON_PRODUCT_THRESHOLD: f64 = 1e-6;
pub const SEPARABLE_ENTROPY_TOLERANCE: f64 = 1e-12;
pub const COMPLETENESS_TOLERANCE: f64 = 1e-12;
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
pub const QUADRATURE_STEP: f64 = 1.0 / 64.0;
pub const SPECTRUM_ORACLE_TOLERANCE: f64 = 1e-10;

/// Deliberate corruption of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Adds probabilities instead of amplitudes for the two alternatives.
    IncoherentAlternatives,
    /// Flips the sign of one off-diagonal entry of Λ̃.
    LambdaSign,
    /// Natural instead of base-2 logarithm in the entropy.
    NaturalLogEntropy,
    /// Drops recoil from the generic hyperentanglement draws.
    IgnoreRecoil,
    /// Leaves the no-excitation outcome out of the completeness sum.
    DropNoneOutcome,
    /// Uses `exp(−k²σ²)` instead of `exp(−k²σ²/2)`.
    GaussianVariance,
    /// Forms the reduced density matrix without complex conjugation.
    DensityWithoutConjugate,
}

impl Fault {
    pub const ALL: [Fault; 7] = [
        Fault::IncoherentAlternatives,
        Fault::LambdaSign,
        Fault::NaturalLogEntropy,
        Fault::IgnoreRecoil,
        Fault::DropNoneOutcome,
        Fault::GaussianVariance,
        Fault::DensityWithoutConjugate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Fault::None => "none",
            Fault::IncoherentAlternatives => "incoherent-alternatives",
            Fault::LambdaSign => "lambda-sign",
            Fault::NaturalLogEntropy => "natural-log-entropy",
            Fault::IgnoreRecoil => "ignore-recoil",
            Fault::DropNoneOutcome => "drop-none-outcome",
            Fault::GaussianVariance => "gaussian-variance",
            Fault::DensityWithoutConjugate => "density-without-conjugate",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        std::iter::once(Fault::None)
            .chain(Fault::ALL)
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown fault {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub title: &'static str,
    pub details: Vec<String>,
    pub passed: bool,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.details.join("; ")
        )
    }
}

/// Real amplitudes with random signs and real overlaps with `b, d ≥ 0`.
///
/// With `generic`, all of α, β, γ, δ, b, d stay away from zero.
pub fn random_real_parameters<R: Rng>(rng: &mut R, generic: bool) -> (AbsorptionAmplitudes, RecoilOverlaps) {
    let magnitude = |rng: &mut R| {
        if generic {
            rng.random_range(0.05..0.95)
        } else {
            rng.random_range(0.0..=1.0)
        }
    };
    let signed = |rng: &mut R, m: f64| if rng.random::<bool>() { m } else { -m };
    let pair = |rng: &mut R| {
        let x: f64 = magnitude(rng);
        let y = (1.0 - x * x).max(0.0).sqrt();
        let x = signed(rng, x);
        let y = signed(rng, y);
        (x, y)
    };
    let (alpha, beta) = pair(rng);
    let (gamma, delta) = pair(rng);
    let m = magnitude(rng);
    let a = signed(rng, m);
    let m = magnitude(rng);
    let c = signed(rng, m);
    let amps = AbsorptionAmplitudes::real(alpha, beta, gamma, delta).expect("unit pairs by construction");
    let ov = RecoilOverlaps::from_overlaps(a, c).expect("overlaps within [-1, 1]");
    (amps, ov)
}

/// Complex amplitudes with arbitrary phases.
pub fn random_complex_amplitudes<R: Rng>(rng: &mut R) -> AbsorptionAmplitudes {
    let mut pair = || {
        let m: f64 = rng.random_range(0.0..=1.0);
        let p1: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let p2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        (
            Complex64::from_polar(m, p1),
            Complex64::from_polar((1.0 - m * m).max(0.0).sqrt(), p2),
        )
    };
    let (alpha, beta) = pair();
    let (gamma, delta) = pair();
    AbsorptionAmplitudes::new(alpha, beta, gamma, delta).expect("unit pairs by construction")
}

/// Normalized ket with random complex amplitudes on an `m × n` block of
/// the product basis, `1 ≤ m, n ≤ 8`.
pub fn random_ket<R: Rng>(rng: &mut R) -> Ket {
    let m = rng.random_range(1..=8);
    let n = rng.random_range(1..=8);
    let rows = BasisLabel::all(Particle::A);
    let cols = BasisLabel::all(Particle::B);
    let mut terms = Vec::with_capacity(m * n);
    for a in &rows[..m] {
        for b in &cols[..n] {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            terms.push((*a, *b, z));
        }
    }
    normalize(&Ket::from_terms(terms).expect("labels belong to their atoms")).expect("nonzero random ket")
}

fn pure(state: State) -> Ket {
    match state {
        State::Pure(k) => k,
        State::Mixed(_) => unreachable!("pure preparation"),
    }
}

fn entangled_final(amps: &AbsorptionAmplitudes, ov: &RecoilOverlaps) -> Result<Ket> {
    Ok(pure(apply_absorption(
        &build_initial(InitialStateKind::Entangled),
        amps,
        ov,
    )?))
}

fn rng_for(id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + id as u64)
}

fn entropy_with(probabilities: &[f64], fault: Fault) -> Result<f64> {
    if fault == Fault::NaturalLogEntropy {
        Ok(-probabilities
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>())
    } else {
        entropy_bits(probabilities)
    }
}

/// Entangled preparations doubly absorb twice as often as the mixture.
pub fn check_enhancement(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(1);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut ratio_sum = 0.0;
    let mut born_ratio_sum = 0.0;
    let draws = 1000;
    for _ in 0..draws {
        let (amps, ov) = random_real_parameters(&mut rng, false);
        let ent = apply_absorption(&build_initial(InitialStateKind::Entangled), &amps, &ov)?;
        let mix = apply_absorption(&build_initial(InitialStateKind::EqualMixture), &amps, &ov)?;
        let (p_ent, p_mix) = if fault == Fault::IncoherentAlternatives {
            (
                outcome_probabilities(&ent)?.p_double,
                outcome_probabilities(&mix)?.p_double,
            )
        } else {
            (
                indistinguishable_double_absorption(&ent, &ov)?,
                indistinguishable_double_absorption(&mix, &ov)?,
            )
        };
        let expected = 2.0 * (amps.alpha * amps.gamma).norm_sqr();
        worst_abs = worst_abs.max((p_ent - expected).abs());
        if p_mix > 0.0 {
            let ratio = p_ent / p_mix;
            worst_ratio = worst_ratio.max((ratio - 2.0).abs());
            ratio_sum += ratio;
            born_ratio_sum += outcome_probabilities(&ent)?.p_double / outcome_probabilities(&mix)?.p_double;
        }
    }
    let passed = worst_ratio <= ENHANCEMENT_TOLERANCE && worst_abs <= ENHANCEMENT_TOLERANCE;
    Ok(CheckOutcome {
        id: 1,
        title: "entanglement-enhanced absorption",
        details: vec![
            format!("entangled/mixture ratio {:.6} (expected 2)", ratio_sum / draws as f64),
            format!("max |ratio - 2| = {worst_ratio:.1e}, max |P - 2|αγ|²| = {worst_abs:.1e} (tol {ENHANCEMENT_TOLERANCE:.0e}, {draws} draws)"),
            format!("Born-rule weight ratio {:.6}", born_ratio_sum / draws as f64),
        ],
        passed,
    })
}

fn lambda_for(
    amps: &AbsorptionAmplitudes,
    ov: &RecoilOverlaps,
    fault: Fault,
) -> Result<crate::entanglement::LambdaMatrices> {
    let lm = build_lambda(amps, ov)?;
    if fault == Fault::LambdaSign {
        let mut tilde = lm.lambda_tilde;
        tilde[(0, 1)] = -tilde[(0, 1)];
        Ok(lm.with_tilde(tilde))
    } else {
        Ok(lm)
    }
}

/// The hand-built Λ equals the channel-generated coefficient matrix.
pub fn check_lambda_reproduction(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(2);
    let draws = 200;
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let (amps, ov) = random_real_parameters(&mut rng, false);
        let lm = lambda_for(&amps, &ov, fault)?;
        let from_state = lambda_from_state(&entangled_final(&amps, &ov)?)?;
        for i in 0..6 {
            for j in 0..6 {
                worst = worst.max((from_state[(i, j)] - Complex64::new(lm.lambda_full[(i, j)], 0.0)).norm());
            }
        }
    }
    Ok(CheckOutcome {
        id: 2,
        title: "Λ reproduction",
        details: vec![format!(
            "max |√2·C − Λ| = {worst:.1e} (tol {LAMBDA_ENTRY_TOLERANCE:.0e}, {draws} draws)"
        )],
        passed: worst <= LAMBDA_ENTRY_TOLERANCE,
    })
}

/// Λ has eigenvalues `{0 ×4, ±k}` and Λ̃ is rank one.
pub fn check_spectrum(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(3);
    let draws = 200;
    let (mut worst_eig, mut worst_quartic, mut worst_minor): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut sample = None;
    for _ in 0..draws {
        let (amps, ov) = random_real_parameters(&mut rng, false);
        let lm = lambda_for(&amps, &ov, fault)?;
        let spectrum = lambda_spectrum_check(&lm);
        worst_eig = worst_eig.max(spectrum.max_deviation);
        worst_quartic = worst_quartic.max((spectrum.quartic_coefficient + lm.k_value * lm.k_value).abs());
        worst_minor = worst_minor.max(lm.max_minor());
        sample.get_or_insert((lm.k_value, spectrum.eigenvalues[5]));
    }
    let (k, top) = sample.unwrap_or_default();
    Ok(CheckOutcome {
        id: 3,
        title: "Λ spectrum",
        details: vec![
            format!("first draw: top eigenvalue {top:.6} (expected |k| = {:.6})", k.abs()),
            format!("max eigenvalue deviation {worst_eig:.1e}, max |c₄ + k²| {worst_quartic:.1e} (tol {EIGENVALUE_TOLERANCE:.0e})"),
            format!("max 2×2 minor of Λ̃ {worst_minor:.1e} (tol {MINOR_TOLERANCE:.0e})"),
        ],
        passed: worst_eig <= EIGENVALUE_TOLERANCE
            && worst_quartic <= EIGENVALUE_TOLERANCE
            && worst_minor <= MINOR_TOLERANCE,
    })
}

/// Absorption leaves the entropy between the atoms at one bit.
pub fn check_entropy_conservation(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(4);
    let draws = 500;
    let psi0 = pure(build_initial(InitialStateKind::Entangled));
    let s0 = entropy_with(
        &schmidt_decompose(&psi0, Bipartition::Particles)?.probabilities(),
        fault,
    )?;
    let mut worst_final: f64 = 0.0;
    let mut worst_route: f64 = 0.0;
    let mut compared = 0;
    let mut mean_final = 0.0;
    for _ in 0..draws {
        let (amps, ov) = random_real_parameters(&mut rng, false);
        let psi = entangled_final(&amps, &ov)?;
        let svd = schmidt_decompose(&psi, Bipartition::Particles)?;
        let s_svd = entropy_with(&svd.probabilities(), fault)?;
        worst_final = worst_final.max((s_svd - 1.0).abs());
        mean_final += s_svd / draws as f64;
        let lm = build_lambda(&amps, &ov)?;
        if lm.k_value.abs() > ROUTE_K_THRESHOLD {
            let eigen = lambda_schmidt_route(&lm)?;
            let s_eig = entropy_with(&eigen.probabilities(), fault)?;
            worst_route = worst_route.max((s_eig - s_svd).abs());
            compared += 1;
        }
    }
    let passed = (s0 - 1.0).abs() <= ENTROPY_TOLERANCE
        && worst_final <= ENTROPY_TOLERANCE
        && worst_route <= ENTROPY_TOLERANCE;
    Ok(CheckOutcome {
        id: 4,
        title: "entropy conservation",
        details: vec![
            format!("S(ψ₀) {s0:.6} (expected 1)"),
            format!("S(ψ_f) {mean_final:.6} (expected 1), max deviation {worst_final:.1e} (tol {ENTROPY_TOLERANCE:.0e}, {draws} draws)"),
            format!("max |S_eigen − S_svd| {worst_route:.1e} over {compared} draws with |k| > {ROUTE_K_THRESHOLD:.0e}"),
        ],
        passed,
    })
}

fn second_singular_ratio(x: &Ket, split: Bipartition) -> f64 {
    let sv = singular_values(&coefficient_matrix(x, split).matrix);
    match sv.as_slice() {
        [first, second, ..] if *first > 0.0 => second / first,
        _ => 0.0,
    }
}

/// Recoil produces non-product hyperentanglement; without recoil or
/// without initial entanglement it does not.
pub fn check_hyperentanglement(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(5);
    let draws = 200;
    let mut no_recoil_ok = true;
    let mut min_generic_ratio = f64::INFINITY;
    let mut worst_product_entropy: f64 = 0.0;
    for _ in 0..draws {
        let (amps, ov) = random_real_parameters(&mut rng, true);

        let psi = entangled_final(&amps, &RecoilOverlaps::none())?;
        no_recoil_ok &= is_product_across(&psi, Bipartition::DegreesOfFreedom, PRODUCT_TOLERANCE);

        let generic_ov = if fault == Fault::IgnoreRecoil {
            RecoilOverlaps::none()
        } else {
            ov
        };
        let psi = entangled_final(&amps, &generic_ov)?;
        min_generic_ratio = min_generic_ratio.min(second_singular_ratio(&psi, Bipartition::DegreesOfFreedom));

        let product = pure(apply_absorption(
            &build_initial(InitialStateKind::Product),
            &amps,
            &ov,
        )?);
        let s = schmidt_decompose(&product, Bipartition::Particles)?.entropy_bits;
        worst_product_entropy = worst_product_entropy.max(s.abs());
    }
    let passed = no_recoil_ok
        && min_generic_ratio > NON_PRODUCT_THRESHOLD
        && worst_product_entropy <= SEPARABLE_ENTROPY_TOLERANCE;
    Ok(CheckOutcome {
        id: 5,
        title: "hyperentanglement classification",
        details: vec![
            format!("no recoil ⇒ spatial|internal product: {no_recoil_ok} (expected true)"),
            format!("generic min σ₂/σ₁ {min_generic_ratio:.3e} (expected > {NON_PRODUCT_THRESHOLD:.0e})"),
            format!("absorbed product state max S {worst_product_entropy:.1e} (expected 0, tol {SEPARABLE_ENTROPY_TOLERANCE:.0e})"),
        ],
        passed,
    })
}

/// The four excitation outcomes exhaust the probability.
pub fn check_completeness(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(6);
    let draws = 1000;
    let mut worst: f64 = 0.0;
    for i in 0..draws {
        let (real_amps, ov) = random_real_parameters(&mut rng, false);
        let amps = if i % 2 == 0 {
            real_amps
        } else {
            random_complex_amplitudes(&mut rng)
        };
        for kind in InitialStateKind::ALL {
            let scenario = Scenario {
                kind,
                amplitudes: amps,
                overlaps: ov,
            };
            let p = outcome_probabilities(&scenario.final_state()?)?;
            let total = if fault == Fault::DropNoneOutcome {
                p.p_double + p.p_a_only + p.p_b_only
            } else {
                p.total()
            };
            worst = worst.max((total - 1.0).abs());
        }
    }
    Ok(CheckOutcome {
        id: 6,
        title: "probability completeness",
        details: vec![format!(
            "max |Σp − 1| {worst:.1e} (tol {COMPLETENESS_TOLERANCE:.0e}, {draws} draws × 3 kinds)"
        )],
        passed: worst <= COMPLETENESS_TOLERANCE,
    })
}

/// Closed-form Gaussian overlap against trapezoidal quadrature.
pub fn check_gaussian_overlap(fault: Fault) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for sigma in [0.1, 1.0, 10.0] {
        for k in [0.0, 0.5, 1.0, 5.0] {
            let model = GaussianRecoilModel::new(sigma, k)?;
            let oracle = gaussian_recoil_overlap_quadrature(&model, QUADRATURE_STEP);
            let closed = if fault == Fault::GaussianVariance {
                (-(k * sigma).powi(2)).exp()
            } else {
                gaussian_recoil_overlap(&model)
            };
            worst = worst.max((closed - oracle).abs());
        }
    }
    let unit = gaussian_recoil_overlap_quadrature(&GaussianRecoilModel::new(1.0, 1.0)?, QUADRATURE_STEP);
    Ok(CheckOutcome {
        id: 7,
        title: "Gaussian overlap oracle",
        details: vec![
            format!("σ = 1, k = 1 quadrature {unit:.6} (expected 0.606531)"),
            format!("max |closed − quadrature| {worst:.1e} on 3×4 grid (tol {QUADRATURE_TOLERANCE:.0e})"),
        ],
        passed: worst <= QUADRATURE_TOLERANCE,
    })
}

/// Reduced-density eigenvalues equal squared Schmidt coefficients.
pub fn check_density_oracle(fault: Fault) -> Result<CheckOutcome> {
    let mut rng = rng_for(8);
    let draws = 500;
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let x = random_ket(&mut rng);
        let eig = if fault == Fault::DensityWithoutConjugate {
            let c = coefficient_matrix(&x, Bipartition::Particles).matrix;
            let rho: DMatrix<Complex64> = &c * c.transpose();
            let mut e: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
            e.sort_by(|a, b| b.total_cmp(a));
            e
        } else {
            reduced_density(&x, Subsystem::A)?.eigenvalues()
        };
        let schmidt = schmidt_decompose(&x, Bipartition::Particles)?.probabilities();
        for (i, e) in eig.iter().enumerate() {
            let s = schmidt.get(i).copied().unwrap_or(0.0);
            worst = worst.max((e - s).abs());
        }
    }
    Ok(CheckOutcome {
        id: 8,
        title: "density-matrix oracle",
        details: vec![format!(
            "max |eig(ρ_A) − λ²| {worst:.1e} (tol {SPECTRUM_ORACLE_TOLERANCE:.0e}, {draws} kets up to 8×8)"
        )],
        passed: worst <= SPECTRUM_ORACLE_TOLERANCE,
    })
}

/// Runs every check. Library errors inside a check count as failures.
pub fn run_checks(fault: Fault) -> Vec<CheckOutcome> {
    type CheckFn = fn(Fault) -> Result<CheckOutcome>;
    let checks: [(u8, &'static str, CheckFn); 8] = [
        (1, "entanglement-enhanced absorption", check_enhancement),
        (2, "Λ reproduction", check_lambda_reproduction),
        (3, "Λ spectrum", check_spectrum),
        (4, "entropy conservation", check_entropy_conservation),
        (5, "hyperentanglement classification", check_hyperentanglement),
        (6, "probability completeness", check_completeness),
        (7, "Gaussian overlap oracle", check_gaussian_overlap),
        (8, "density-matrix oracle", check_density_oracle),
    ];
    checks
        .iter()
        .map(|(id, title, f)| {
            f(fault).unwrap_or_else(|e| CheckOutcome {
                id: *id,
                title,
                details: vec![format!("error: {e}")],
                passed: false,
            })
        })
        .collect()
}
