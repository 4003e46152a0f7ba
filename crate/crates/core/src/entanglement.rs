//! Schmidt decomposition, von Neumann entropy, the Λ-matrix eigen route,
//! and hyperentanglement classification.
//!
//! The canonical Schmidt route is the singular value decomposition of a
//! coefficient matrix. For the entangled preparation after absorption the
//! coefficient matrix can also be written down by hand as a block matrix
//! `Λ = [[0, Λ̃], [Λ̃, 0]]` whose `3×3` block is rank one; its eigenvalues
//! `{0 ×4, ±(αγ(ac+bd) + βδ)}` give a second, independent route to the
//! same entropy.
//!
//! Λ̃ is laid out with atom-B labels on rows and atom-A labels on columns,
//! so `Λ = √2 · Cᵀ` where `C` is the A-rows coefficient matrix of the
//! final state. Both factors use the order
//! `(L,g) (L,e) (L⊥,e) (R,g) (R,e) (R⊥,e)`.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, Vector6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::absorption::AbsorptionAmplitudes;
use crate::error::{Error, Result};
use crate::overlap::RecoilOverlaps;
use crate::state::{
    coefficient_matrix, coefficient_matrix_in, BasisLabel, Bipartition, CoefficientMatrix, FactorLabel,
    Internal, Ket, Particle, Spatial,
};

/// Default relative threshold on the second singular value for product tests.
pub const PRODUCT_TOLERANCE: f64 = 1e-8;
/// Schmidt coefficients at or below this value are discarded.
pub const SCHMIDT_CUTOFF: f64 = 1e-14;
/// Tolerance on probability sums for [`entropy_bits`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-10;
/// Tolerance for the Λ spectrum comparison.
pub const SPECTRUM_TOLERANCE: f64 = 1e-10;
/// Below this `|k|` the normalized eigen route is undefined.
pub const DEGENERATE_K: f64 = 1e-10;
/// Largest imaginary part tolerated when restricting amplitudes to reals.
pub const REAL_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtResult {
    pub split: Bipartition,
    pub row_basis: Vec<FactorLabel>,
    pub col_basis: Vec<FactorLabel>,
    /// Non-negative, descending.
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<DVector<Complex64>>,
    pub right_vectors: Vec<DVector<Complex64>>,
    pub entropy_bits: f64,
}

impl SchmidtResult {
    /// `Σ λ_k |u_k⟩|v_k⟩`.
    pub fn reconstruct(&self) -> Ket {
        let mut matrix = DMatrix::<Complex64>::zeros(self.row_basis.len(), self.col_basis.len());
        for ((s, u), v) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            matrix += u * v.transpose() * Complex64::new(*s, 0.0);
        }
        CoefficientMatrix {
            split: self.split,
            rows: self.row_basis.clone(),
            cols: self.col_basis.clone(),
            matrix,
        }
        .to_ket()
    }

    /// Squared coefficients.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn schmidt_decompose(x: &Ket, split: Bipartition) -> Result<SchmidtResult> {
    x.require_normalized()?;
    let cm = coefficient_matrix(x, split);
    let svd = cm.matrix.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    order.retain(|&k| svd.singular_values[k] > SCHMIDT_CUTOFF);

    let coefficients: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left_vectors = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let right_vectors = order
        .iter()
        .map(|&k| v_t.row(k).transpose().into_owned())
        .collect();
    let probs: Vec<f64> = coefficients.iter().map(|s| s * s).collect();
    let entropy = entropy_bits(&probs)?;
    Ok(SchmidtResult {
        split,
        row_basis: cm.rows,
        col_basis: cm.cols,
        coefficients,
        left_vectors,
        right_vectors,
        entropy_bits: entropy,
    })
}

/// `−Σ p log₂ p`, with `0 · log 0 = 0`.
pub fn entropy_bits(probabilities: &[f64]) -> Result<f64> {
    if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::NotADistribution(format!(
            "entry {p} is negative or not finite"
        )));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::NotADistribution(format!("entries sum to {total}")));
    }
    let h = -probabilities
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| p * p.log2())
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// True iff the second singular value of the reshaped ket is below
/// `tol` times the largest.
pub fn is_product_across(x: &Ket, split: Bipartition, tol: f64) -> bool {
    let sv = singular_values(&coefficient_matrix(x, split).matrix);
    match sv.as_slice() {
        [] | [_] => true,
        [first, second, ..] => *second < tol * first,
    }
}

/// The block matrices Λ̃ and Λ for real amplitudes and overlaps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaMatrices {
    pub lambda_tilde: Matrix3<f64>,
    pub lambda_full: Matrix6<f64>,
    /// `αγ(ac + bd) + βδ`
    pub k_value: f64,
}

impl LambdaMatrices {
    /// Rebuilds Λ around a given block, keeping `k_value`.
    pub fn with_tilde(&self, lambda_tilde: Matrix3<f64>) -> Self {
        Self {
            lambda_tilde,
            lambda_full: block_antidiagonal(&lambda_tilde),
            k_value: self.k_value,
        }
    }

    /// Largest absolute 2×2 minor of Λ̃; zero for a rank-one block.
    pub fn max_minor(&self) -> f64 {
        let m = &self.lambda_tilde;
        let mut worst: f64 = 0.0;
        for (r1, r2) in [(0, 1), (0, 2), (1, 2)] {
            for (c1, c2) in [(0, 1), (0, 2), (1, 2)] {
                let minor = m[(r1, c1)] * m[(r2, c2)] - m[(r1, c2)] * m[(r2, c1)];
                worst = worst.max(minor.abs());
            }
        }
        worst
    }
}

fn block_antidiagonal(tilde: &Matrix3<f64>) -> Matrix6<f64> {
    let mut full = Matrix6::zeros();
    full.fixed_view_mut::<3, 3>(0, 3).copy_from(tilde);
    full.fixed_view_mut::<3, 3>(3, 0).copy_from(tilde);
    full
}

fn real_part(name: &'static str, z: Complex64) -> Result<f64> {
    if z.im.abs() > REAL_TOLERANCE {
        Err(Error::ComplexAmplitudes { name, imag: z.im })
    } else {
        Ok(z.re)
    }
}

pub fn build_lambda(amps: &AbsorptionAmplitudes, ov: &RecoilOverlaps) -> Result<LambdaMatrices> {
    let alpha = real_part("α", amps.alpha)?;
    let beta = real_part("β", amps.beta)?;
    let gamma = real_part("γ", amps.gamma)?;
    let delta = real_part("δ", amps.delta)?;
    let RecoilOverlaps { a, b, c, d } = *ov;
    #[rustfmt::skip]
    let lambda_tilde = Matrix3::new(
        beta * delta,      alpha * delta * a,          alpha * delta * b,
        beta * gamma * c,  alpha * gamma * a * c,      alpha * gamma * b * c,
        beta * gamma * d,  alpha * gamma * a * d,      alpha * gamma * b * d,
    );
    Ok(LambdaMatrices {
        lambda_tilde,
        lambda_full: block_antidiagonal(&lambda_tilde),
        k_value: alpha * gamma * (a * c + b * d) + beta * delta,
    })
}

/// The six labels of one atom populated after absorption, in Λ order.
pub fn lambda_basis(particle: Particle) -> [BasisLabel; 6] {
    let l = |s, i| BasisLabel::new(particle, s, i);
    [
        l(Spatial::L, Internal::Ground),
        l(Spatial::L, Internal::Excited),
        l(Spatial::LPerp, Internal::Excited),
        l(Spatial::R, Internal::Ground),
        l(Spatial::R, Internal::Excited),
        l(Spatial::RPerp, Internal::Excited),
    ]
}

fn lambda_factor_basis(particle: Particle) -> Vec<FactorLabel> {
    lambda_basis(particle)
        .into_iter()
        .map(FactorLabel::Atom)
        .collect()
}

/// `√2 · Cᵀ` for a final state, laid out like Λ (B rows, A columns).
pub fn lambda_from_state(x: &Ket) -> Result<Matrix6<Complex64>> {
    let cm = coefficient_matrix_in(
        x,
        Bipartition::Particles,
        lambda_factor_basis(Particle::A),
        lambda_factor_basis(Particle::B),
    )?;
    Ok(Matrix6::from_fn(|i, j| cm.matrix[(j, i)] * SQRT_2))
}

/// Coefficients `c_0..=c_n` of `det(λI − M) = Σ c_i λ^i` (Faddeev–LeVerrier).
pub fn characteristic_polynomial(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut aux = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        aux = m * &aux + DMatrix::identity(n, n) * coeffs[n - k + 1];
        coeffs[n - k] = -(m * &aux).trace() / k as f64;
    }
    coeffs
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCheck {
    /// Real parts of the numerically computed eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub max_imaginary: f64,
    /// Largest distance to the expected multiset `{−k, 0, 0, 0, 0, k}`.
    pub max_deviation: f64,
    /// Coefficient of `λ⁴` in the characteristic polynomial.
    pub quartic_coefficient: f64,
    pub verdict: bool,
}

pub fn lambda_spectrum_check(lm: &LambdaMatrices) -> SpectrumCheck {
    let eig = lm.lambda_full.complex_eigenvalues();
    let mut pairs: Vec<Complex64> = eig.iter().copied().collect();
    pairs.sort_by(|a, b| a.re.total_cmp(&b.re));
    let k = lm.k_value.abs();
    let expected = [-k, 0.0, 0.0, 0.0, 0.0, k];
    let max_deviation = pairs
        .iter()
        .zip(expected)
        .map(|(z, e)| (z - Complex64::new(e, 0.0)).norm())
        .fold(0.0, f64::max);
    let max_imaginary = pairs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let dense = DMatrix::from_fn(6, 6, |i, j| lm.lambda_full[(i, j)]);
    let quartic_coefficient = characteristic_polynomial(&dense)[4];
    let verdict = max_deviation <= SPECTRUM_TOLERANCE
        && (quartic_coefficient + lm.k_value * lm.k_value).abs() <= SPECTRUM_TOLERANCE;
    SpectrumCheck {
        eigenvalues: pairs.iter().map(|z| z.re).collect(),
        max_imaginary,
        max_deviation,
        quartic_coefficient,
        verdict,
    }
}

/// Eigenvector of `m` for the simple eigenvalue `lambda` when the spectrum
/// of `m` is `{λ, −λ, 0, …}`: a column of the projector `m(m + λI)/(2λ²)`.
fn eigenvector_by_projection(m: &Matrix6<f64>, lambda: f64) -> Vector6<f64> {
    let projector = m * (m + Matrix6::identity() * lambda) / (2.0 * lambda * lambda);
    let best = (0..6)
        .max_by(|&i, &j| projector.column(i).norm().total_cmp(&projector.column(j).norm()))
        .expect("six columns");
    projector.column(best).normalize()
}

/// Schmidt form from the Λ eigenvalues `λ± = ±k`.
///
/// Coefficients are `|λ±| / √(λ₊² + λ₋²)`. The A-side vectors are the
/// eigenvectors of Λᵀ for `±k`; each B-side partner is `Λχ/‖Λχ‖`. Rows use
/// the atom-A Λ basis, columns the atom-B Λ basis.
pub fn lambda_schmidt_route(lm: &LambdaMatrices) -> Result<SchmidtResult> {
    let k = lm.k_value;
    if k.abs() <= DEGENERATE_K {
        return Err(Error::DegenerateSpectrum(k.abs()));
    }
    let eigenvalues = [k.abs(), -k.abs()];
    let scale = (eigenvalues[0].powi(2) + eigenvalues[1].powi(2)).sqrt();
    let transpose = lm.lambda_full.transpose();

    let mut coefficients = Vec::with_capacity(2);
    let mut left_vectors = Vec::with_capacity(2);
    let mut right_vectors = Vec::with_capacity(2);
    for lambda in eigenvalues {
        let chi = eigenvector_by_projection(&transpose, lambda);
        let image = lm.lambda_full * chi;
        let partner = image / image.norm();
        coefficients.push(lambda.abs() / scale);
        left_vectors.push(DVector::from_iterator(
            6,
            chi.iter().map(|v| Complex64::new(*v, 0.0)),
        ));
        right_vectors.push(DVector::from_iterator(
            6,
            partner.iter().map(|v| Complex64::new(*v, 0.0)),
        ));
    }
    let probs: Vec<f64> = coefficients.iter().map(|s| s * s).collect();
    let entropy = entropy_bits(&probs)?;
    Ok(SchmidtResult {
        split: Bipartition::Particles,
        row_basis: lambda_factor_basis(Particle::A),
        col_basis: lambda_factor_basis(Particle::B),
        coefficients,
        left_vectors,
        right_vectors,
        entropy_bits: entropy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// No entanglement between the atoms.
    #[serde(rename = "separable")]
    Separable,
    /// Atoms entangled in one degree of freedom; the state factors into
    /// spatial and internal parts.
    #[serde(rename = "single-dof entangled")]
    SingleDofEntangled,
    /// Both degrees of freedom entangled, still factoring into spatial and
    /// internal parts.
    #[serde(rename = "product-form hyperentangled")]
    ProductFormHyperentangled,
    /// Atoms entangled and the state does not factor into spatial and
    /// internal parts.
    #[serde(rename = "non-product hyperentangled")]
    NonProductHyperentangled,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Separable => "separable",
            Classification::SingleDofEntangled => "single-dof entangled",
            Classification::ProductFormHyperentangled => "product-form hyperentangled",
            Classification::NonProductHyperentangled => "non-product hyperentangled",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperentanglementReport {
    pub entangled_across_atoms: bool,
    pub entropy_across_atoms: f64,
    pub spatial_internal_product: bool,
    pub classification: Classification,
}

/// Whether a vector over two-atom factor labels is entangled between the atoms.
fn factor_is_entangled<K: Ord + Copy>(entries: impl Iterator<Item = ((K, K), Complex64)>, tol: f64) -> bool {
    let entries: Vec<_> = entries.collect();
    let mut rows = BTreeMap::new();
    let mut cols = BTreeMap::new();
    for ((r, c), _) in &entries {
        let n = rows.len();
        rows.entry(*r).or_insert(n);
        let n = cols.len();
        cols.entry(*c).or_insert(n);
    }
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for ((r, c), v) in entries {
        m[(rows[&r], cols[&c])] += v;
    }
    match singular_values(&m).as_slice() {
        [] | [_] => false,
        [first, second, ..] => *second >= tol * first,
    }
}

pub fn hyperentanglement_report(x: &Ket, tol: f64) -> Result<HyperentanglementReport> {
    let across = schmidt_decompose(x, Bipartition::Particles)?;
    let entangled = match across.coefficients.as_slice() {
        [] | [_] => false,
        [first, second, ..] => *second >= tol * first,
    };
    let dof = schmidt_decompose(x, Bipartition::DegreesOfFreedom)?;
    let dof_product = match dof.coefficients.as_slice() {
        [] | [_] => true,
        [first, second, ..] => *second < tol * first,
    };

    let classification = if !entangled {
        Classification::Separable
    } else if !dof_product {
        Classification::NonProductHyperentangled
    } else {
        let spatial = dof
            .row_basis
            .iter()
            .zip(dof.left_vectors[0].iter())
            .filter_map(|(l, v)| match l {
                FactorLabel::Spatial(a, b) => Some(((*a, *b), *v)),
                _ => None,
            });
        let internal = dof
            .col_basis
            .iter()
            .zip(dof.right_vectors[0].iter())
            .filter_map(|(l, v)| match l {
                FactorLabel::Internal(a, b) => Some(((*a, *b), *v)),
                _ => None,
            });
        match (
            factor_is_entangled(spatial, tol),
            factor_is_entangled(internal, tol),
        ) {
            (true, true) => Classification::ProductFormHyperentangled,
            _ => Classification::SingleDofEntangled,
        }
    };
    Ok(HyperentanglementReport {
        entangled_across_atoms: entangled,
        entropy_across_atoms: across.entropy_bits,
        spatial_internal_product: dof_product,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorption::{build_initial, InitialStateKind, Scenario, State};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn psi0() -> Ket {
        match build_initial(InitialStateKind::Entangled) {
            State::Pure(k) => k,
            State::Mixed(_) => unreachable!(),
        }
    }

    fn reference_scenario() -> Scenario {
        Scenario {
            kind: InitialStateKind::Entangled,
            amplitudes: AbsorptionAmplitudes::real(0.6, 0.8, 0.6, 0.8).unwrap(),
            overlaps: RecoilOverlaps::new(0.8, 0.6, 0.6, 0.8).unwrap(),
        }
    }

    fn final_ket(s: &Scenario) -> Ket {
        match s.final_state().unwrap() {
            State::Pure(k) => k,
            State::Mixed(_) => unreachable!(),
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_bits(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy_bits(&[1.0, 0.0]).unwrap(), 0.0);
        // −(¼ log₂ ¼ + ¾ log₂ ¾), evaluated independently
        assert!((entropy_bits(&[0.25, 0.75]).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-15);
        assert!(entropy_bits(&[0.5, 0.6]).is_err());
        assert!(entropy_bits(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn schmidt_of_initial_and_product() {
        let r = schmidt_decompose(&psi0(), Bipartition::Particles).unwrap();
        assert_eq!(r.coefficients.len(), 2);
        for c in &r.coefficients {
            assert!((c - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!((r.entropy_bits - 1.0).abs() < 1e-14);
        assert!(r.reconstruct().max_abs_diff(&psi0()) < 1e-15);

        let p = Ket::basis(
            BasisLabel::a(Spatial::L, Internal::Ground),
            BasisLabel::b(Spatial::R, Internal::Ground),
        )
        .unwrap();
        let r = schmidt_decompose(&p, Bipartition::Particles).unwrap();
        assert_eq!(r.coefficients, vec![1.0]);
        assert_eq!(r.entropy_bits, 0.0);
    }

    #[test]
    fn schmidt_rejects_unnormalized() {
        let k = psi0().scaled(Complex64::new(3.0, 0.0));
        assert!(matches!(
            schmidt_decompose(&k, Bipartition::Particles),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn lambda_entries_and_k_value() {
        let s = reference_scenario();
        let lm = build_lambda(&s.amplitudes, &s.overlaps).unwrap();
        assert!((lm.k_value - 0.9856).abs() < 1e-15);
        assert!((lm.lambda_tilde[(0, 0)] - 0.64).abs() < 1e-15);
        assert!((lm.lambda_tilde[(0, 1)] - 0.6 * 0.8 * 0.8).abs() < 1e-15);
        assert!((lm.lambda_tilde[(2, 2)] - 0.36 * 0.6 * 0.8).abs() < 1e-15);
        assert!(lm.max_minor() < 1e-15);
        assert_eq!(lm.lambda_full.fixed_view::<3, 3>(0, 0), Matrix3::zeros());
    }

    #[test]
    fn lambda_special_parameters() {
        let amps = AbsorptionAmplitudes::real(0.0, 1.0, 0.6, 0.8).unwrap();
        let ov = RecoilOverlaps::from_overlaps(0.3, 0.5).unwrap();
        let lm = build_lambda(&amps, &ov).unwrap();
        for r in 0..3 {
            assert_eq!(lm.lambda_tilde[(r, 1)], 0.0);
            assert_eq!(lm.lambda_tilde[(r, 2)], 0.0);
        }
        assert_eq!(lm.lambda_tilde[(1, 0)], 0.6 * 0.5);

        let amps = AbsorptionAmplitudes::real(0.6, 0.8, 0.6, 0.8).unwrap();
        let lm = build_lambda(&amps, &RecoilOverlaps::none()).unwrap();
        for i in 0..3 {
            assert_eq!(lm.lambda_tilde[(2, i)], 0.0);
            assert_eq!(lm.lambda_tilde[(i, 2)], 0.0);
        }
    }

    #[test]
    fn lambda_rejects_complex_amplitudes() {
        let amps = AbsorptionAmplitudes::new(
            Complex64::new(0.0, 0.6),
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.8, 0.0),
        )
        .unwrap();
        assert!(matches!(
            build_lambda(&amps, &RecoilOverlaps::none()),
            Err(Error::ComplexAmplitudes { name: "α", .. })
        ));
    }

    #[test]
    fn lambda_matches_channel_output() {
        let s = reference_scenario();
        let lm = build_lambda(&s.amplitudes, &s.overlaps).unwrap();
        let from_state = lambda_from_state(&final_ket(&s)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((from_state[(i, j)] - Complex64::new(lm.lambda_full[(i, j)], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn spectrum_of_reference_parameters() {
        let s = reference_scenario();
        let lm = build_lambda(&s.amplitudes, &s.overlaps).unwrap();
        let check = lambda_spectrum_check(&lm);
        assert!(check.verdict, "{check:?}");
        assert!((check.eigenvalues[5] - 0.9856).abs() < 1e-10);
        assert!((check.eigenvalues[0] + 0.9856).abs() < 1e-10);
        assert!(check.eigenvalues[1..5].iter().all(|e| e.abs() < 1e-10));
        assert!((check.quartic_coefficient + 0.9856f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn spectrum_with_full_absorption() {
        // α = 1, β = 0, a = c = 1 ⇒ λ± = ±γ
        let amps = AbsorptionAmplitudes::real(1.0, 0.0, 0.6, 0.8).unwrap();
        let lm = build_lambda(&amps, &RecoilOverlaps::none()).unwrap();
        assert!((lm.k_value - 0.6).abs() < 1e-15);
        let check = lambda_spectrum_check(&lm);
        assert!(check.verdict);
        assert!((check.eigenvalues[5] - 0.6).abs() < 1e-10);
    }

    #[test]
    fn spectrum_check_detects_perturbation() {
        let s = reference_scenario();
        let lm = build_lambda(&s.amplitudes, &s.overlaps).unwrap();
        let mut tilde = lm.lambda_tilde;
        tilde[(0, 1)] = -tilde[(0, 1)];
        assert!(!lambda_spectrum_check(&lm.with_tilde(tilde)).verdict);
    }

    #[test]
    fn characteristic_polynomial_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let c = characteristic_polynomial(&m);
        // (λ−1)(λ−2)(λ−3) = λ³ − 6λ² + 11λ − 6
        assert_eq!(c, vec![-6.0, 11.0, -6.0, 1.0]);
    }

    #[test]
    fn eigen_route_matches_svd_route() {
        let s = reference_scenario();
        let lm = build_lambda(&s.amplitudes, &s.overlaps).unwrap();
        let eigen = lambda_schmidt_route(&lm).unwrap();
        assert!((eigen.entropy_bits - 1.0).abs() < 1e-15);
        let psi = final_ket(&s);
        let svd = schmidt_decompose(&psi, Bipartition::Particles).unwrap();
        assert!((eigen.entropy_bits - svd.entropy_bits).abs() < 1e-9);
        assert!(eigen.reconstruct().max_abs_diff(&psi) < 1e-12);
    }

    #[test]
    fn eigen_route_rejects_degenerate_spectrum() {
        // α = 1, β = 0, a = c = 0 ⇒ k = αγ(bd) with b = d = 1; pick γ = 0 too
        let amps = AbsorptionAmplitudes::real(1.0, 0.0, 0.0, 1.0).unwrap();
        let lm = build_lambda(&amps, &RecoilOverlaps::none()).unwrap();
        assert_eq!(lm.k_value, 0.0);
        assert!(matches!(
            lambda_schmidt_route(&lm),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn classification_examples() {
        let r = hyperentanglement_report(&psi0(), PRODUCT_TOLERANCE).unwrap();
        assert_eq!(r.classification, Classification::SingleDofEntangled);
        assert!((r.entropy_across_atoms - 1.0).abs() < 1e-14);
        assert!(r.spatial_internal_product);

        let s = reference_scenario();
        let r = hyperentanglement_report(&final_ket(&s), PRODUCT_TOLERANCE).unwrap();
        assert_eq!(r.classification, Classification::NonProductHyperentangled);
        assert!(!r.spatial_internal_product);

        let p = Scenario {
            kind: InitialStateKind::Product,
            ..s
        };
        let r = hyperentanglement_report(&final_ket(&p), PRODUCT_TOLERANCE).unwrap();
        assert_eq!(r.classification, Classification::Separable);
        assert!(r.entropy_across_atoms.abs() < 1e-12);
    }

    #[test]
    fn product_form_hyperentanglement_is_recognised() {
        // (φLϕR + φRϕL)(eg + ge)/2
        let mut terms = Vec::new();
        for (sa, sb) in [(Spatial::L, Spatial::R), (Spatial::R, Spatial::L)] {
            for (ia, ib) in [
                (Internal::Excited, Internal::Ground),
                (Internal::Ground, Internal::Excited),
            ] {
                terms.push((
                    BasisLabel::a(sa, ia),
                    BasisLabel::b(sb, ib),
                    Complex64::new(0.5, 0.0),
                ));
            }
        }
        let k = Ket::from_terms(terms).unwrap();
        let r = hyperentanglement_report(&k, PRODUCT_TOLERANCE).unwrap();
        assert_eq!(r.classification, Classification::ProductFormHyperentangled);
        assert!((r.entropy_across_atoms - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classification_strings() {
        assert_eq!(
            serde_json::to_string(&Classification::NonProductHyperentangled).unwrap(),
            "\"non-product hyperentangled\""
        );
        assert_eq!(
            Classification::SingleDofEntangled.to_string(),
            "single-dof entangled"
        );
    }
}
