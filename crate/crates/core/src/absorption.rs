//! Initial preparations, the linear-regime absorption channel, and
//! absorption-outcome probabilities.
//!
//! A ground-state factor of atom A transforms as
//! `|φ_j,g⟩ → α(a|φ_j,e⟩ + b|φ_j⊥,e⟩) + β|φ_j,g⟩`, and atom B analogously
//! with `(γ, δ, c, d)`. The channel acts on each atom independently and is
//! extended bilinearly to two-atom kets.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::overlap::RecoilOverlaps;
use crate::state::{BasisLabel, Internal, Ket, MixedState, Particle, Spatial, NORM_TOLERANCE};

/// Above this single-atom excitation probability the linear regime is doubtful.
pub const LINEAR_REGIME_LIMIT: f64 = 0.1;

/// Channel coefficients: α, β for atom A and γ, δ for atom B.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionAmplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl AbsorptionAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64) -> Result<Self> {
        Self::with_tolerance(alpha, beta, gamma, delta, NORM_TOLERANCE)
    }

    pub fn with_tolerance(
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        delta: Complex64,
        tol: f64,
    ) -> Result<Self> {
        let na = alpha.norm_sqr() + beta.norm_sqr();
        if !na.is_finite() || (na - 1.0).abs() > tol {
            return Err(Error::Normalization {
                relation: "|α|² + |β|²",
                value: na,
            });
        }
        let nb = gamma.norm_sqr() + delta.norm_sqr();
        if !nb.is_finite() || (nb - 1.0).abs() > tol {
            return Err(Error::Normalization {
                relation: "|γ|² + |δ|²",
                value: nb,
            });
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        Self::new(re(alpha), re(beta), re(gamma), re(delta))
    }

    /// Completes β and δ as `+√(1 − |α|²)` and `+√(1 − |γ|²)`.
    pub fn completed(alpha: Complex64, gamma: Complex64) -> Result<Self> {
        let beta = complete(alpha, "|α|² + |β|²")?;
        let delta = complete(gamma, "|γ|² + |δ|²")?;
        Self::new(alpha, beta, gamma, delta)
    }

    /// True when either excitation probability leaves the low-intensity regime.
    pub fn linear_regime_warning(&self) -> bool {
        self.alpha.norm_sqr() > LINEAR_REGIME_LIMIT || self.gamma.norm_sqr() > LINEAR_REGIME_LIMIT
    }

    pub fn is_real(&self, tol: f64) -> bool {
        [self.alpha, self.beta, self.gamma, self.delta]
            .iter()
            .all(|z| z.im.abs() <= tol)
    }
}

pub(crate) fn complete(z: Complex64, relation: &'static str) -> Result<Complex64> {
    let rest = 1.0 - z.norm_sqr();
    if rest < -NORM_TOLERANCE || !rest.is_finite() {
        return Err(Error::Normalization {
            relation,
            value: z.norm_sqr(),
        });
    }
    Ok(re(rest.max(0.0).sqrt()))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialStateKind {
    /// `(|φ_L,g; ϕ_R,g⟩ + |φ_R,g; ϕ_L,g⟩)/√2`
    Entangled,
    /// Equal-weight mixture of the two terms of the entangled state.
    #[serde(rename = "mixture")]
    EqualMixture,
    /// `|φ_L,g; ϕ_R,g⟩`
    Product,
}

impl InitialStateKind {
    pub const ALL: [InitialStateKind; 3] = [
        InitialStateKind::Entangled,
        InitialStateKind::EqualMixture,
        InitialStateKind::Product,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InitialStateKind::Entangled => "entangled",
            InitialStateKind::EqualMixture => "mixture",
            InitialStateKind::Product => "product",
        }
    }
}

impl fmt::Display for InitialStateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitialStateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "entangled" => Ok(InitialStateKind::Entangled),
            "mixture" | "equal-mixture" | "equal_mixture" => Ok(InitialStateKind::EqualMixture),
            "product" => Ok(InitialStateKind::Product),
            other => Err(Error::InvalidParameter(format!(
                "unknown initial-state kind {other:?} (expected entangled, mixture or product)"
            ))),
        }
    }
}

/// A pure ket or a weighted mixture of pure kets.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(Ket),
    Mixed(MixedState),
}

impl State {
    /// `(weight, ket)` view; a pure state is a single branch of weight 1.
    pub fn branches(&self) -> Vec<(f64, &Ket)> {
        match self {
            State::Pure(k) => vec![(1.0, k)],
            State::Mixed(m) => m.branches().iter().map(|(w, k)| (*w, k)).collect(),
        }
    }

    pub fn as_pure(&self) -> Option<&Ket> {
        match self {
            State::Pure(k) => Some(k),
            State::Mixed(_) => None,
        }
    }
}

/// Initial preparation, channel coefficients and recoil overlaps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: InitialStateKind,
    pub amplitudes: AbsorptionAmplitudes,
    pub overlaps: RecoilOverlaps,
}

impl Scenario {
    pub fn initial(&self) -> State {
        build_initial(self.kind)
    }

    pub fn final_state(&self) -> Result<State> {
        apply_absorption(&self.initial(), &self.amplitudes, &self.overlaps)
    }
}

fn ground(p: Particle, s: Spatial) -> BasisLabel {
    BasisLabel::new(p, s, Internal::Ground)
}

fn left_right_term() -> Ket {
    Ket::basis(ground(Particle::A, Spatial::L), ground(Particle::B, Spatial::R))
        .expect("labels belong to their atoms")
}

fn right_left_term() -> Ket {
    Ket::basis(ground(Particle::A, Spatial::R), ground(Particle::B, Spatial::L))
        .expect("labels belong to their atoms")
}

pub fn build_initial(kind: InitialStateKind) -> State {
    match kind {
        InitialStateKind::Entangled => State::Pure(
            left_right_term()
                .plus(&right_left_term())
                .scaled(re(FRAC_1_SQRT_2)),
        ),
        InitialStateKind::EqualMixture => State::Mixed(
            MixedState::new(vec![(0.5, left_right_term()), (0.5, right_left_term())])
                .expect("equal weights over normalized kets"),
        ),
        InitialStateKind::Product => State::Pure(left_right_term()),
    }
}

/// Image of one ground-state label under the single-atom channel.
fn local_channel(
    label: BasisLabel,
    excite: Complex64,
    stay: Complex64,
    along: f64,
    across: f64,
) -> Result<[(BasisLabel, Complex64); 3]> {
    if label.internal() == Internal::Excited {
        return Err(Error::ExcitedInput(label));
    }
    if label.spatial().is_complement() {
        return Err(Error::ComplementInput(label));
    }
    let excited = label.with_internal(Internal::Excited);
    Ok([
        (label, stay),
        (excited, excite * along),
        (
            excited.with_spatial(label.spatial().complement()),
            excite * across,
        ),
    ])
}

/// Applies the channel to a pure two-atom ket.
pub fn absorb_ket(x: &Ket, amps: &AbsorptionAmplitudes, ov: &RecoilOverlaps) -> Result<Ket> {
    let mut terms = Vec::with_capacity(9 * x.len());
    for ((la, lb), amp) in x.iter() {
        let ia = local_channel(*la, amps.alpha, amps.beta, ov.a, ov.b)?;
        let ib = local_channel(*lb, amps.gamma, amps.delta, ov.c, ov.d)?;
        for (na, va) in ia {
            for (nb, vb) in ib {
                terms.push((na, nb, amp * va * vb));
            }
        }
    }
    Ket::from_terms(terms)
}

/// Applies the channel branch-wise; mixture weights are unchanged.
pub fn apply_absorption(state: &State, amps: &AbsorptionAmplitudes, ov: &RecoilOverlaps) -> Result<State> {
    match state {
        State::Pure(k) => Ok(State::Pure(absorb_ket(k, amps, ov)?)),
        State::Mixed(m) => {
            let branches = m
                .branches()
                .iter()
                .map(|(w, k)| Ok((*w, absorb_ket(k, amps, ov)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(State::Mixed(MixedState::new(branches)?))
        }
    }
}

/// Born-rule probabilities of the four excitation patterns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub p_double: f64,
    pub p_a_only: f64,
    pub p_b_only: f64,
    pub p_none: f64,
}

impl OutcomeProbabilities {
    pub fn total(&self) -> f64 {
        self.p_double + self.p_a_only + self.p_b_only + self.p_none
    }
}

pub fn outcome_probabilities(state: &State) -> Result<OutcomeProbabilities> {
    let mut out = OutcomeProbabilities {
        p_double: 0.0,
        p_a_only: 0.0,
        p_b_only: 0.0,
        p_none: 0.0,
    };
    for (w, ket) in state.branches() {
        ket.require_normalized()?;
        for ((la, lb), amp) in ket.iter() {
            let p = w * amp.norm_sqr();
            match (la.internal(), lb.internal()) {
                (Internal::Excited, Internal::Excited) => out.p_double += p,
                (Internal::Excited, Internal::Ground) => out.p_a_only += p,
                (Internal::Ground, Internal::Excited) => out.p_b_only += p,
                (Internal::Ground, Internal::Ground) => out.p_none += p,
            }
        }
    }
    Ok(out)
}

/// Recoiled excited state `a|φ_j,e⟩ + b|φ_j⊥,e⟩` (or the B analogue).
fn recoiled_excited(particle: Particle, side: Spatial, along: f64, across: f64) -> [(BasisLabel, f64); 2] {
    [
        (BasisLabel::new(particle, side, Internal::Excited), along),
        (
            BasisLabel::new(particle, side.complement(), Internal::Excited),
            across,
        ),
    ]
}

/// Amplitude `⟨φ̄_{side_a},e; ϕ̄_{side_b},e | x⟩`.
fn double_excitation_amplitude(x: &Ket, ov: &RecoilOverlaps, side_a: Spatial, side_b: Spatial) -> Complex64 {
    let mut amp = Complex64::new(0.0, 0.0);
    for (la, wa) in recoiled_excited(Particle::A, side_a, ov.a, ov.b) {
        for (lb, wb) in recoiled_excited(Particle::B, side_b, ov.c, ov.d) {
            amp += x.amplitude(&la, &lb) * (wa * wb);
        }
    }
    amp
}

/// Double-absorption probability with the two which-atom alternatives
/// (A left and B right, or A right and B left) treated as indistinguishable.
///
/// Each alternative contributes the amplitude of its doubly excited,
/// recoiled product state; the amplitudes are added before squaring.
/// Mixture branches are combined with their weights. For the entangled
/// preparation this gives `2|αγ|²`, for the mixture and the product
/// preparation `|αγ|²`.
///
/// This differs from [`OutcomeProbabilities::p_double`], which is the
/// Born-rule weight of the doubly excited sector. The two alternatives are
/// orthogonal states, so that weight is `|αγ|²` for every preparation.
pub fn indistinguishable_double_absorption(state: &State, ov: &RecoilOverlaps) -> Result<f64> {
    let mut total = 0.0;
    for (w, ket) in state.branches() {
        ket.require_normalized()?;
        let amp = double_excitation_amplitude(ket, ov, Spatial::L, Spatial::R)
            + double_excitation_amplitude(ket, ov, Spatial::R, Spatial::L);
        total += w * amp.norm_sqr();
    }
    Ok(total)
}

/// Final state of the entangled preparation when recoil is neglected:
/// the spatially entangled factor times `(α|e⟩ + β|g⟩)_A (γ|e⟩ + δ|g⟩)_B`.
pub fn no_recoil_final(scenario: &Scenario) -> Result<Ket> {
    if scenario.kind != InitialStateKind::Entangled {
        return Err(Error::WrongKind);
    }
    let amps = &scenario.amplitudes;
    let internal_a = [(Internal::Excited, amps.alpha), (Internal::Ground, amps.beta)];
    let internal_b = [(Internal::Excited, amps.gamma), (Internal::Ground, amps.delta)];
    let spatial = [(Spatial::L, Spatial::R), (Spatial::R, Spatial::L)];
    let mut terms = Vec::with_capacity(8);
    for (sa, sb) in spatial {
        for (ia, va) in internal_a {
            for (ib, vb) in internal_b {
                terms.push((
                    BasisLabel::a(sa, ia),
                    BasisLabel::b(sb, ib),
                    re(FRAC_1_SQRT_2) * va * vb,
                ));
            }
        }
    }
    Ket::from_terms(terms)
}
