//! Image-to-audio camouflage and its evaluation machinery.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std` (only `alloc` is required). File handling, manifests
//! and the command line live in the `camocodec` companion crate.
//!
//! - [`raster`]: PGM/PPM decoding, grayscale conversion, bilinear resize.
//! - [`sonify`]: additive-synthesis image encoder, spectrogram decoder, WAV codec.
//! - [`dsp`]: FFT/STFT, mel filterbank, DCT-II, MFCC, spectral centroid.
//! - [`dataset`]: feature matrices, class balance, PCA, the CAMF feature format.
//! - [`dnn`]: dense softmax classifier, optimizers, training loop, grid search.
//! - [`metrics`]: confusion matrix, class report, ROC/PR curves, timing strings.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dataset;
pub mod dnn;
pub mod dsp;
pub mod metrics;
pub mod raster;
pub mod sonify;
pub mod stats;

mod bytes;
