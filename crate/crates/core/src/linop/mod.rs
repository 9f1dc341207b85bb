//! The measurement operator: a reflexive-boundary blur, its adjoint, the
//! least-squares gradient and the DCT spectrum of `A^T A`.

mod blur;
mod dct;
mod psf;
mod spectral;

pub use blur::{blur_adjoint, blur_apply, data_fidelity, gradient, normal_apply};
pub use dct::{dct2, idct2, Dct2d};
pub use psf::Psf;
pub use spectral::{lambda_max_ata, spectral_decompose, SpectralDiag};
