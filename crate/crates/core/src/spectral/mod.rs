//! Unitary building blocks: modulation, dilation, Fourier transform and the MDFM propagator.

mod fft;
mod field;
mod grid;
mod mdfm;
mod ops;
mod resample;
mod snapshot;

pub use fft::{fourier, fourier_to, inverse_fourier, inverse_fourier_to, SpectralPlan};
pub use field::Field;
pub use grid::Grid;
pub use mdfm::{free_propagate, mdfm_between, mdfm_factors, mdfm_inverse, mdfm_propagator};
pub use ops::{dilate, dilation_factor, modulate, modulate_curvature, undilate};
pub use resample::resample;
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot};
