//! Recoil overlaps.
//!
//! After absorbing a photon an atom's centre-of-mass wavefunction `φ̄`
//! overlaps its pre-absorption wavefunction `φ`. We write
//! `φ̄ = a·φ + b·φ⊥` with `a, b` real, `b ≥ 0`, and `a² + b² = 1`; the same
//! pair serves both travelling directions. Atom B uses `(c, d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const OVERLAP_TOLERANCE: f64 = 1e-12;

/// Coordinates of the recoiled wavefunctions over `{original, complement}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoilOverlaps {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RecoilOverlaps {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, value, partner) in [("a² + b²", a, b), ("c² + d²", c, d)] {
            if partner < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "complement coordinate in {name} must be non-negative, got {partner}"
                )));
            }
            let norm = value * value + partner * partner;
            if (norm - 1.0).abs() > OVERLAP_TOLERANCE {
                return Err(Error::Normalization {
                    relation: if name.starts_with('a') {
                        "a² + b²"
                    } else {
                        "c² + d²"
                    },
                    value: norm,
                });
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// From the two scalar overlaps `⟨φ|φ̄⟩ = a` and `⟨ϕ|ϕ̄⟩ = c`.
    pub fn from_overlaps(a: f64, c: f64) -> Result<Self> {
        let (a, b) = decompose_overlap(a)?;
        let (c, d) = decompose_overlap(c)?;
        Ok(Self { a, b, c, d })
    }

    /// No recoil: `φ̄ = φ`, `ϕ̄ = ϕ`.
    pub fn none() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 1.0,
            d: 0.0,
        }
    }

    /// `ac + bd`, the overlap factor entering the Λ spectrum.
    pub fn cross_term(&self) -> f64 {
        self.a * self.c + self.b * self.d
    }
}

/// Splits a real overlap `s = ⟨φ|φ̄⟩` into `(a, b) = (s, +√(1 − s²))`.
pub fn decompose_overlap(s: f64) -> Result<(f64, f64)> {
    if !s.is_finite() || s.abs() > 1.0 + OVERLAP_TOLERANCE {
        return Err(Error::OutOfRange(s));
    }
    let a = s.clamp(-1.0, 1.0);
    let b = (1.0 - a * a).max(0.0).sqrt();
    Ok((a, b))
}

/// Gaussian wavepacket given a momentum kick `φ̄(x) = e^{ikx} φ(x)`.
///
/// `sigma_x` is the standard deviation of the position density `|φ|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianRecoilModel {
    pub sigma_x: f64,
    pub k_recoil: f64,
}

impl GaussianRecoilModel {
    pub fn new(sigma_x: f64, k_recoil: f64) -> Result<Self> {
        if !(sigma_x.is_finite() && sigma_x > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma_x must be finite and positive, got {sigma_x}"
            )));
        }
        if !(k_recoil.is_finite() && k_recoil >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "k_recoil must be finite and non-negative, got {k_recoil}"
            )));
        }
        Ok(Self { sigma_x, k_recoil })
    }
}

/// `|⟨φ|φ̄⟩| = exp(−k²σ²/2)`.
pub fn gaussian_recoil_overlap(model: &GaussianRecoilModel) -> f64 {
    let ks = model.k_recoil * model.sigma_x;
    (-0.5 * ks * ks).exp()
}

/// Quadrature route to the same overlap: trapezoidal integration of
/// `∫ |φ(x)|² e^{ikx} dx` for a Gaussian density of standard deviation σ.
///
/// Works in the scaled variable `t = x/σ` on `[-40, 40]`, where the
/// density underflows, with step `h`. For this smooth, rapidly decaying
/// integrand the trapezoid rule converges geometrically.
pub fn gaussian_recoil_overlap_quadrature(model: &GaussianRecoilModel, h: f64) -> f64 {
    let omega = model.k_recoil * model.sigma_x;
    let half_width = 40.0;
    let n = (2.0 * half_width / h).ceil() as usize;
    let h = 2.0 * half_width / n as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..=n {
        let t = -half_width + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let rho = norm * (-0.5 * t * t).exp();
        re += w * rho * (omega * t).cos();
        im += w * rho * (omega * t).sin();
    }
    (re * h).hypot(im * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_overlap(1.0).unwrap(), (1.0, 0.0));
        assert_eq!(decompose_overlap(0.0).unwrap(), (0.0, 1.0));
        let (a, b) = decompose_overlap(0.6).unwrap();
        assert_eq!(a, 0.6);
        assert!((b - 0.8).abs() < 1e-15);
        assert!(matches!(decompose_overlap(1.1), Err(Error::OutOfRange(_))));
        assert!(decompose_overlap(f64::NAN).is_err());
        // rounding slack just above one is clamped
        assert_eq!(decompose_overlap(1.0 + 1e-13).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn gaussian_closed_form_examples() {
        let m = GaussianRecoilModel::new(1.0, 0.0).unwrap();
        assert_eq!(gaussian_recoil_overlap(&m), 1.0);
        // quadrature value, frozen: 0.6065306597126334
        let m = GaussianRecoilModel::new(1.0, 1.0).unwrap();
        assert!((gaussian_recoil_overlap(&m) - 0.606_530_659_712_633_4).abs() < 1e-12);
    }

    #[test]
    fn gaussian_overlap_decreases_with_kick() {
        let mut prev = 1.0 + 1e-9;
        for k in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let v = gaussian_recoil_overlap(&GaussianRecoilModel::new(0.7, k).unwrap());
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(GaussianRecoilModel::new(0.0, 1.0).is_err());
        assert!(GaussianRecoilModel::new(f64::INFINITY, 1.0).is_err());
        assert!(GaussianRecoilModel::new(1.0, -1.0).is_err());
    }

    #[test]
    fn recoil_overlaps_validate() {
        assert!(RecoilOverlaps::new(0.6, 0.8, 1.0, 0.0).is_ok());
        assert!(RecoilOverlaps::new(0.6, -0.8, 1.0, 0.0).is_err());
        assert!(RecoilOverlaps::new(0.6, 0.7, 1.0, 0.0).is_err());
        let ov = RecoilOverlaps::from_overlaps(0.8, 0.6).unwrap();
        assert!((ov.cross_term() - (0.48 + 0.6 * 0.8)).abs() < 1e-15);
    }
}
