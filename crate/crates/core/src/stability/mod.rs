//! The stability operator `L = Delta - <x, grad> + ||A||^2 + 1`: application,
//! spectra, identity checks and Rayleigh-quotient bounds.

pub mod field;
pub mod identity;
pub mod operator;
pub mod rayleigh;
pub mod spectrum;

pub use field::{jets, Field, Jet};
pub use identity::{check_identities, check_identity, IdentityId, IdentityReport, LAMBDA_TOLERANCE};
pub use operator::{apply_cal_l, apply_l, quadratic_value, sample_with_gradient, FieldSamples};
pub use rayleigh::{default_trials, rayleigh_delta, rayleigh_quotient, DeltaEstimate};
pub use spectrum::{profile_spectrum, sphere_spectrum, SpectralLine, SpectrumResult};
