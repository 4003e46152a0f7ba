//! Complex state algebra over the labeled two-atom product basis.
//!
//! Every single-atom basis label combines a spatial mode (left or right
//! travelling wavepacket, or its orthogonal complement) with an internal
//! level (ground or excited). All labels of one atom form an orthonormal
//! set; non-orthogonal recoiled wavefunctions only ever appear as
//! coordinates over this set (see [`crate::overlap`]).
//!
//! A two-atom [`Ket`] is a sparse map from `(label of A, label of B)` to a
//! complex amplitude. Bipartitions reshape a ket into a coefficient matrix,
//! from which Schmidt coefficients and reduced density matrices follow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes with modulus at or below this value are not stored.
pub const DROP_TOLERANCE: f64 = 1e-15;
/// Tolerance on the squared norm of a normalized ket.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Kets with a norm at or below this value cannot be normalized.
pub const ZERO_NORM: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Particle {
    A,
    B,
}

/// Spatial (centre-of-mass) mode of one atom.
///
/// The derived ordering `L < LPerp < R < RPerp`, combined with the
/// internal ordering `Ground < Excited`, lists the occupied labels of an
/// absorbed state as `(L,g) (L,e) (L⊥,e) (R,g) (R,e) (R⊥,e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    L,
    LPerp,
    R,
    RPerp,
}

impl Spatial {
    pub const ALL: [Spatial; 4] = [Spatial::L, Spatial::LPerp, Spatial::R, Spatial::RPerp];

    /// Orthogonal complement partner of a travelling mode.
    pub fn complement(self) -> Spatial {
        match self {
            Spatial::L => Spatial::LPerp,
            Spatial::R => Spatial::RPerp,
            Spatial::LPerp => Spatial::L,
            Spatial::RPerp => Spatial::R,
        }
    }

    pub fn is_complement(self) -> bool {
        matches!(self, Spatial::LPerp | Spatial::RPerp)
    }

    fn suffix(self) -> &'static str {
        match self {
            Spatial::L => "L",
            Spatial::LPerp => "L⊥",
            Spatial::R => "R",
            Spatial::RPerp => "R⊥",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Internal {
    Ground,
    Excited,
}

impl Internal {
    pub const ALL: [Internal; 2] = [Internal::Ground, Internal::Excited];
}

impl fmt::Display for Internal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Internal::Ground => "g",
            Internal::Excited => "e",
        })
    }
}

/// One single-atom basis label: atom, spatial mode and internal level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    particle: Particle,
    spatial: Spatial,
    internal: Internal,
}

impl BasisLabel {
    pub const fn new(particle: Particle, spatial: Spatial, internal: Internal) -> Self {
        Self {
            particle,
            spatial,
            internal,
        }
    }

    pub const fn a(spatial: Spatial, internal: Internal) -> Self {
        Self::new(Particle::A, spatial, internal)
    }

    pub const fn b(spatial: Spatial, internal: Internal) -> Self {
        Self::new(Particle::B, spatial, internal)
    }

    pub fn particle(&self) -> Particle {
        self.particle
    }

    pub fn spatial(&self) -> Spatial {
        self.spatial
    }

    pub fn internal(&self) -> Internal {
        self.internal
    }

    pub fn with_internal(self, internal: Internal) -> Self {
        Self { internal, ..self }
    }

    pub fn with_spatial(self, spatial: Spatial) -> Self {
        Self { spatial, ..self }
    }

    /// Every label of one atom, in canonical order.
    pub fn all(particle: Particle) -> Vec<BasisLabel> {
        let mut out = Vec::with_capacity(8);
        for s in Spatial::ALL {
            for i in Internal::ALL {
                out.push(BasisLabel::new(particle, s, i));
            }
        }
        out
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.particle {
            Particle::A => "φ",
            Particle::B => "ϕ",
        };
        write!(f, "{}{},{}", mode, self.spatial.suffix(), self.internal)
    }
}

fn insert_amplitude<K: Ord>(map: &mut BTreeMap<K, Complex64>, key: K, amp: Complex64) {
    let entry = map.entry(key).or_insert(Complex64::new(0.0, 0.0));
    *entry += amp;
}

fn prune<K: Ord>(map: &mut BTreeMap<K, Complex64>) {
    map.retain(|_, amp| amp.norm() > DROP_TOLERANCE);
}

/// Amplitude map over the labels of a single atom.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalKet {
    particle: Particle,
    amplitudes: BTreeMap<BasisLabel, Complex64>,
}

impl LocalKet {
    pub fn new(particle: Particle) -> Self {
        Self {
            particle,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(particle: Particle, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisLabel, Complex64)>,
    {
        let mut out = Self::new(particle);
        for (label, amp) in terms {
            out.add(label, amp)?;
        }
        prune(&mut out.amplitudes);
        Ok(out)
    }

    pub fn basis(label: BasisLabel) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(label, Complex64::new(1.0, 0.0));
        Self {
            particle: label.particle,
            amplitudes,
        }
    }

    /// Adds `amp` to the amplitude of `label`. Labels of the other atom are rejected.
    pub fn add(&mut self, label: BasisLabel, amp: Complex64) -> Result<()> {
        if label.particle != self.particle {
            return Err(Error::FamilyMismatch {
                label,
                expected: self.particle,
            });
        }
        insert_amplitude(&mut self.amplitudes, label, amp);
        Ok(())
    }

    pub fn particle(&self) -> Particle {
        self.particle
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amplitudes.get(label).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Sparse two-atom ket over `(label of A, label of B)` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ket {
    amplitudes: BTreeMap<(BasisLabel, BasisLabel), Complex64>,
}

impl Ket {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a ket from `(A label, B label, amplitude)` terms; repeated
    /// pairs accumulate.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisLabel, BasisLabel, Complex64)>,
    {
        let mut amplitudes = BTreeMap::new();
        for (a, b, amp) in terms {
            check_family(a, Particle::A)?;
            check_family(b, Particle::B)?;
            insert_amplitude(&mut amplitudes, (a, b), amp);
        }
        prune(&mut amplitudes);
        Ok(Self { amplitudes })
    }

    /// Single product-basis ket with unit amplitude.
    pub fn basis(a: BasisLabel, b: BasisLabel) -> Result<Self> {
        Self::from_terms([(a, b, Complex64::new(1.0, 0.0))])
    }

    pub fn amplitude(&self, a: &BasisLabel, b: &BasisLabel) -> Complex64 {
        self.amplitudes.get(&(*a, *b)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(BasisLabel, BasisLabel), &Complex64)> {
        self.amplitudes.iter()
    }

    /// Number of stored (non-negligible) amplitudes.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Ket {
        let mut amplitudes: BTreeMap<_, _> = self.amplitudes.iter().map(|(k, v)| (*k, v * factor)).collect();
        prune(&mut amplitudes);
        Ket { amplitudes }
    }

    /// Superposition `self + other`.
    pub fn plus(&self, other: &Ket) -> Ket {
        let mut amplitudes = self.amplitudes.clone();
        for (k, v) in &other.amplitudes {
            insert_amplitude(&mut amplitudes, *k, *v);
        }
        prune(&mut amplitudes);
        Ket { amplitudes }
    }

    /// Largest entry-wise distance to another ket.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        let keys: BTreeSet<_> = self.amplitudes.keys().chain(other.amplitudes.keys()).collect();
        keys.into_iter()
            .map(|(a, b)| (self.amplitude(a, b) - other.amplitude(a, b)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_family(label: BasisLabel, expected: Particle) -> Result<()> {
    if label.particle == expected {
        Ok(())
    } else {
        Err(Error::FamilyMismatch { label, expected })
    }
}

/// `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner(x: &Ket, y: &Ket) -> Complex64 {
    // iterate the shorter map
    let (small, large, conj_small) = if x.len() <= y.len() {
        (x, y, true)
    } else {
        (y, x, false)
    };
    small
        .amplitudes
        .iter()
        .filter_map(|(k, s)| large.amplitudes.get(k).map(|l| (s, l)))
        .map(|(s, l)| if conj_small { s.conj() * l } else { l.conj() * s })
        .sum()
}

pub fn normalize(x: &Ket) -> Result<Ket> {
    let norm = x.norm();
    if norm <= ZERO_NORM {
        return Err(Error::ZeroNorm(norm));
    }
    Ok(x.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Product `a ⊗ b` of an atom-A amplitude map with an atom-B amplitude map.
pub fn tensor(a: &LocalKet, b: &LocalKet) -> Result<Ket> {
    if a.particle != Particle::A {
        if let Some((label, _)) = a.iter().next() {
            return Err(Error::FamilyMismatch {
                label: *label,
                expected: Particle::A,
            });
        }
    }
    if b.particle != Particle::B {
        if let Some((label, _)) = b.iter().next() {
            return Err(Error::FamilyMismatch {
                label: *label,
                expected: Particle::B,
            });
        }
    }
    Ket::from_terms(
        a.iter()
            .flat_map(|(la, va)| b.iter().map(move |(lb, vb)| (*la, *lb, va * vb))),
    )
}

/// Weighted list of pure branches.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    branches: Vec<(f64, Ket)>,
}

impl MixedState {
    pub fn new(branches: Vec<(f64, Ket)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidWeights("no branches".into()));
        }
        let mut total = 0.0;
        for (w, ket) in &branches {
            if !(*w > 0.0 && *w <= 1.0) {
                return Err(Error::InvalidWeights(format!("weight {w} not in (0, 1]")));
            }
            ket.require_normalized()?;
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[(f64, Ket)] {
        &self.branches
    }

    /// Full two-atom density matrix `Σ w |ψ⟩⟨ψ|` over the occupied pair labels.
    pub fn density_matrix(&self) -> DensityMatrix {
        let basis: Vec<FactorLabel> = self
            .branches
            .iter()
            .flat_map(|(_, k)| k.amplitudes.keys())
            .map(|(a, b)| FactorLabel::Pair(*a, *b))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<_, _> = basis.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let n = basis.len();
        let mut matrix = DMatrix::<Complex64>::zeros(n, n);
        for (w, ket) in &self.branches {
            let v: Vec<(usize, Complex64)> = ket
                .iter()
                .map(|((a, b), amp)| (index[&FactorLabel::Pair(*a, *b)], *amp))
                .collect();
            for (i, ai) in &v {
                for (j, aj) in &v {
                    matrix[(*i, *j)] += ai * aj.conj() * *w;
                }
            }
        }
        DensityMatrix { basis, matrix }
    }
}

/// How the two-atom system is cut into two factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bipartition {
    /// Atom A against atom B.
    Particles,
    /// Spatial modes of both atoms against internal levels of both atoms.
    DegreesOfFreedom,
}

/// Label of one row or column of a reshaped ket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorLabel {
    Atom(BasisLabel),
    Spatial(Spatial, Spatial),
    Internal(Internal, Internal),
    Pair(BasisLabel, BasisLabel),
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorLabel::Atom(l) => write!(f, "{l}"),
            FactorLabel::Spatial(a, b) => write!(f, "φ{};ϕ{}", a.suffix(), b.suffix()),
            FactorLabel::Internal(a, b) => write!(f, "{a}{b}"),
            FactorLabel::Pair(a, b) => write!(f, "{a};{b}"),
        }
    }
}

impl Bipartition {
    fn split(self, a: BasisLabel, b: BasisLabel) -> (FactorLabel, FactorLabel) {
        match self {
            Bipartition::Particles => (FactorLabel::Atom(a), FactorLabel::Atom(b)),
            Bipartition::DegreesOfFreedom => (
                FactorLabel::Spatial(a.spatial, b.spatial),
                FactorLabel::Internal(a.internal, b.internal),
            ),
        }
    }

    fn join(self, row: FactorLabel, col: FactorLabel) -> Option<(BasisLabel, BasisLabel)> {
        match (self, row, col) {
            (Bipartition::Particles, FactorLabel::Atom(a), FactorLabel::Atom(b)) => Some((a, b)),
            (Bipartition::DegreesOfFreedom, FactorLabel::Spatial(sa, sb), FactorLabel::Internal(ia, ib)) => {
                Some((BasisLabel::a(sa, ia), BasisLabel::b(sb, ib)))
            }
            _ => None,
        }
    }
}

/// A ket reshaped into a matrix: rows index the first factor, columns the second.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMatrix {
    pub split: Bipartition,
    pub rows: Vec<FactorLabel>,
    pub cols: Vec<FactorLabel>,
    pub matrix: DMatrix<Complex64>,
}

impl CoefficientMatrix {
    /// Flattens back to a ket.
    pub fn to_ket(&self) -> Ket {
        let mut terms = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in self.cols.iter().enumerate() {
                if let Some((a, b)) = self.split.join(*r, *c) {
                    terms.push((a, b, self.matrix[(i, j)]));
                }
            }
        }
        Ket::from_terms(terms).expect("bipartition join yields correct families")
    }
}

/// Reshapes `x` over the occupied row and column labels of `split`.
pub fn coefficient_matrix(x: &Ket, split: Bipartition) -> CoefficientMatrix {
    let mut rows = BTreeSet::new();
    let mut cols = BTreeSet::new();
    for (a, b) in x.amplitudes.keys() {
        let (r, c) = split.split(*a, *b);
        rows.insert(r);
        cols.insert(c);
    }
    coefficient_matrix_in(x, split, rows.into_iter().collect(), cols.into_iter().collect())
        .expect("occupied labels cover the ket")
}

/// Reshapes `x` over caller-chosen row and column bases. Fails if `x`
/// carries amplitude outside them.
pub fn coefficient_matrix_in(
    x: &Ket,
    split: Bipartition,
    rows: Vec<FactorLabel>,
    cols: Vec<FactorLabel>,
) -> Result<CoefficientMatrix> {
    let row_index: BTreeMap<_, _> = rows.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let col_index: BTreeMap<_, _> = cols.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let mut matrix = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for ((a, b), amp) in &x.amplitudes {
        let (r, c) = split.split(*a, *b);
        match (row_index.get(&r), col_index.get(&c)) {
            (Some(i), Some(j)) => matrix[(*i, *j)] = *amp,
            _ => return Err(Error::OutsideBasis(format!("{a};{b}"))),
        }
    }
    Ok(CoefficientMatrix {
        split,
        rows,
        cols,
        matrix,
    })
}

/// Subsystem kept by a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
    Spatial,
    Internal,
}

impl Subsystem {
    fn bipartition(self) -> (Bipartition, bool) {
        match self {
            Subsystem::A => (Bipartition::Particles, true),
            Subsystem::B => (Bipartition::Particles, false),
            Subsystem::Spatial => (Bipartition::DegreesOfFreedom, true),
            Subsystem::Internal => (Bipartition::DegreesOfFreedom, false),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub basis: Vec<FactorLabel>,
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.matrix.nrows();
        (0..n).all(|i| (0..n).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.matrix.is_empty() {
            return Vec::new();
        }
        let eig = self.matrix.clone().symmetric_eigenvalues();
        let mut out: Vec<f64> = eig.iter().copied().collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Partial trace of a normalized pure state onto `keep`.
pub fn reduced_density(x: &Ket, keep: Subsystem) -> Result<DensityMatrix> {
    x.require_normalized()?;
    let (split, keep_rows) = keep.bipartition();
    let cm = coefficient_matrix(x, split);
    let c = &cm.matrix;
    if keep_rows {
        Ok(DensityMatrix {
            basis: cm.rows,
            matrix: c * c.adjoint(),
        })
    } else {
        // ρ[j, j'] = Σ_i C[i, j] conj(C[i, j'])
        Ok(DensityMatrix {
            basis: cm.cols,
            matrix: c.transpose() * c.map(|z| z.conj()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn lg() -> (BasisLabel, BasisLabel) {
        (
            BasisLabel::a(Spatial::L, Internal::Ground),
            BasisLabel::b(Spatial::R, Internal::Ground),
        )
    }

    fn rg() -> (BasisLabel, BasisLabel) {
        (
            BasisLabel::a(Spatial::R, Internal::Ground),
            BasisLabel::b(Spatial::L, Internal::Ground),
        )
    }

    fn psi0() -> Ket {
        let (a1, b1) = lg();
        let (a2, b2) = rg();
        Ket::from_terms([(a1, b1, c(FRAC_1_SQRT_2)), (a2, b2, c(FRAC_1_SQRT_2))]).unwrap()
    }

    #[test]
    fn inner_products_on_basis() {
        let (a1, b1) = lg();
        let (a2, b2) = rg();
        let x = Ket::basis(a1, b1).unwrap();
        let y = Ket::basis(a2, b2).unwrap();
        assert_eq!(inner(&x, &x), c(1.0));
        assert_eq!(inner(&x, &y), c(0.0));
        assert!((inner(&x, &psi0()) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let (a1, b1) = lg();
        let x = Ket::from_terms([(a1, b1, Complex64::new(0.0, 1.0))]).unwrap();
        let y = Ket::basis(a1, b1).unwrap();
        assert_eq!(inner(&x, &y), Complex64::new(0.0, -1.0));
        assert_eq!(inner(&y, &x), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn normalize_cases() {
        let (a1, b1) = lg();
        let (a2, b2) = rg();
        let x = Ket::from_terms([(a1, b1, c(2.0))]).unwrap();
        assert_eq!(normalize(&x).unwrap().amplitude(&a1, &b1), c(1.0));

        let y = Ket::from_terms([(a1, b1, c(1.0)), (a2, b2, c(1.0))]).unwrap();
        let y = normalize(&y).unwrap();
        assert!((y.amplitude(&a2, &b2) - c(FRAC_1_SQRT_2)).norm() < 1e-15);

        assert!(matches!(normalize(&Ket::zero()), Err(Error::ZeroNorm(_))));
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let a = BasisLabel::a(Spatial::L, Internal::Ground);
        assert!(matches!(
            Ket::from_terms([(a, a, c(1.0))]),
            Err(Error::FamilyMismatch { .. })
        ));
        let mut local = LocalKet::new(Particle::B);
        assert!(local.add(a, c(1.0)).is_err());
        let wrong = LocalKet::basis(a);
        assert!(tensor(&wrong, &wrong).is_err());
    }

    #[test]
    fn tensor_is_bilinear() {
        let alpha = c(0.6);
        let beta = c(0.8);
        let a = LocalKet::from_terms(
            Particle::A,
            [
                (BasisLabel::a(Spatial::L, Internal::Excited), alpha),
                (BasisLabel::a(Spatial::L, Internal::Ground), beta),
            ],
        )
        .unwrap();
        let b = LocalKet::basis(BasisLabel::b(Spatial::R, Internal::Ground));
        let t = tensor(&a, &b).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(
            t.amplitude(
                &BasisLabel::a(Spatial::L, Internal::Excited),
                &BasisLabel::b(Spatial::R, Internal::Ground)
            ),
            alpha
        );
        let cm = coefficient_matrix(&t, Bipartition::Particles);
        assert_eq!(cm.matrix.rank(1e-12), 1);
    }

    #[test]
    fn psi0_coefficient_matrix_is_antidiagonal() {
        let cm = coefficient_matrix(&psi0(), Bipartition::Particles);
        assert_eq!(cm.matrix.shape(), (2, 2));
        assert_eq!(cm.matrix[(0, 0)], c(0.0));
        assert!((cm.matrix[(0, 1)] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((cm.matrix[(1, 0)] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert_eq!(cm.matrix[(1, 1)], c(0.0));
        assert_eq!(cm.to_ket(), psi0());
    }

    #[test]
    fn explicit_basis_rejects_outside_labels() {
        let rows = vec![FactorLabel::Atom(BasisLabel::a(Spatial::L, Internal::Ground))];
        let cols = vec![FactorLabel::Atom(BasisLabel::b(Spatial::R, Internal::Ground))];
        assert!(coefficient_matrix_in(&psi0(), Bipartition::Particles, rows, cols).is_err());
    }

    #[test]
    fn reduced_density_of_psi0() {
        let rho = reduced_density(&psi0(), Subsystem::A).unwrap();
        assert_eq!(rho.matrix.shape(), (2, 2));
        assert!((rho.matrix[(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((rho.matrix[(1, 1)] - c(0.5)).norm() < 1e-15);
        assert!(rho.matrix[(0, 1)].norm() < 1e-15);
        assert!(rho.is_hermitian(1e-12));

        let unnormalized = psi0().scaled(c(2.0));
        assert!(matches!(
            reduced_density(&unnormalized, Subsystem::A),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn reduced_density_of_product_is_projector() {
        let (a1, b1) = lg();
        let x = Ket::basis(a1, b1).unwrap();
        for keep in [
            Subsystem::A,
            Subsystem::B,
            Subsystem::Spatial,
            Subsystem::Internal,
        ] {
            let rho = reduced_density(&x, keep).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn psi0_factors_across_degrees_of_freedom() {
        let cm = coefficient_matrix(&psi0(), Bipartition::DegreesOfFreedom);
        assert_eq!(cm.matrix.shape(), (2, 1));
        assert_eq!(
            cm.cols,
            vec![FactorLabel::Internal(Internal::Ground, Internal::Ground)]
        );
    }

    #[test]
    fn mixture_weights_are_validated() {
        let (a1, b1) = lg();
        let x = Ket::basis(a1, b1).unwrap();
        assert!(MixedState::new(vec![(0.5, x.clone()), (0.4, x.clone())]).is_err());
        assert!(MixedState::new(vec![(1.0, x.scaled(c(2.0)))]).is_err());
        let m = MixedState::new(vec![(0.5, x.clone()), (0.5, psi0())]).unwrap();
        let rho = m.density_matrix();
        assert!((rho.trace() - c(1.0)).norm() < 1e-14);
        assert!(rho.is_hermitian(1e-14));
    }

    #[test]
    fn tiny_amplitudes_are_dropped() {
        let (a1, b1) = lg();
        let x = Ket::from_terms([(a1, b1, c(1e-16))]).unwrap();
        assert!(x.is_empty());
    }
}
