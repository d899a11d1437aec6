//! Single-photon scattering off two giant atoms in a one-dimensional waveguide.
//!
//! Each atom couples to the waveguide at two points. Depending on how the four
//! points interleave, the pair is *separate*, *braided* or *nested*. The crate
//! computes transmission/reflection spectra, decomposes reflection into two
//! Lorentzian channels (Fano analysis), classifies EIT versus Autler-Townes
//! splitting, and cross-checks everything against a Lindblad master equation.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The type aliases
//! at the crate root fix the scalar to `f64`.
//!
//! ```
//! use gawqed::{amplitudes_general, SymmetricConfig, Topology};
//!
//! let cfg = SymmetricConfig::new(Topology::Separate, 0.5 * std::f64::consts::PI, 1.0)
//!     .expand()
//!     .unwrap();
//! let p = amplitudes_general(&cfg, 1.0).unwrap();
//! assert!((p.reflectance - 1.0).abs() < 1e-12);
//! ```

pub mod eit;
pub mod fano;
pub mod lindblad;
pub mod linalg;
pub mod model;
pub mod real;
pub mod realspace;
pub mod scattering;

pub use model::{characteristics, classify_topology, detect_symmetric, AtomLabel, ModelError, Topology};
pub use eit::{
    classify_eit, collective_eit_amplitudes, lambda_reference, maximum_symmetric_quantities, sa_basis,
    single_atom_eit_amplitudes, CollectiveMode, DarkState, EitError, EitRegime, EitScheme,
};
pub use fano::{fano_fit, fano_regime, lorentz_decompose, rabi_approximation, FanoError, FanoRegime};
pub use lindblad::{
    build_liouvillian, inelastic_spectrum, scattering_from_master, steady_state, InelasticSpectrum, LindbladError,
};
pub use real::{Cplx, Real};
pub use realspace::solve_real_space;
pub use scattering::{amplitudes_general, amplitudes_topology, closed_form, peak_minimum_loci, ScatterError};

pub type CouplingPoint = model::CouplingPoint<f64>;
pub type GiantAtom = model::GiantAtom<f64>;
pub type SystemConfig = model::SystemConfig<f64>;
pub type SymmetricConfig = model::SymmetricConfig<f64>;
pub type CharQuantities = model::CharQuantities<f64>;
pub type ScatterPoint = scattering::ScatterPoint<f64>;
pub type Loci = scattering::Loci<f64>;
pub type RealSpaceSolution = realspace::RealSpaceSolution<f64>;
pub type LorentzPair = fano::LorentzPair<f64>;
pub type FanoFit = fano::FanoFit<f64>;
pub type SABasisQuantities = eit::SABasisQuantities<f64>;
pub type SaRates = eit::SaRates<f64>;
pub type EitVerdict = eit::EitVerdict<f64>;
pub type DriveSpec = lindblad::DriveSpec<f64>;
pub type SteadyState = lindblad::SteadyState<f64>;
pub type LindbladResult = lindblad::LindbladResult<f64>;
