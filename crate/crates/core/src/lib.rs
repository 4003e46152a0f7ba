//! Light absorption by pairs of atoms prepared in entangled, mixed or
//! product states.
//!
//! The crate models a two-atom system with a spatial (centre-of-mass) and
//! an internal (ground/excited) degree of freedom per atom, applies a
//! low-intensity absorption channel that includes photon recoil, and
//! analyses the result: excitation probabilities, Schmidt coefficients and
//! von Neumann entropy for any bipartition, and whether the absorbed state
//! is hyperentangled.
//!
//! ```
//! use hyperabsorb::absorption::{AbsorptionAmplitudes, InitialStateKind, Scenario};
//! use hyperabsorb::overlap::RecoilOverlaps;
//! use hyperabsorb::entanglement::schmidt_decompose;
//! use hyperabsorb::state::Bipartition;
//! use num_complex::Complex64;
//!
//! let scenario = Scenario {
//!     kind: InitialStateKind::Entangled,
//!     amplitudes: AbsorptionAmplitudes::completed(Complex64::new(0.1, 0.0), Complex64::new(0.1, 0.0))?,
//!     overlaps: RecoilOverlaps::from_overlaps(0.9, 0.9)?,
//! };
//! let psi = scenario.final_state()?;
//! let schmidt = schmidt_decompose(psi.as_pure().unwrap(), Bipartition::Particles)?;
//! assert!((schmidt.entropy_bits - 1.0).abs() < 1e-9);
//! # Ok::<(), hyperabsorb::Error>(())
//! ```

pub mod absorption;
pub mod check;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod overlap;
pub mod report;
pub mod state;

pub use error::{Error, Result};
