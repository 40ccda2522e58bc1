//! Linear-regression inversion of black-box optical imaging systems.
//!
//! Two linear systems are simulated and attacked:
//!
//! * a triple random phase encryption cryptosystem ([`trpe`]), broken by a
//!   known-plaintext attack that learns the complex decryption matrix with
//!   per-sample gradient descent ([`linreg`]);
//! * single-pixel imaging ([`spi`]) with unknown illumination patterns,
//!   recovered by learning the patterns from object/measurement pairs and then
//!   reconstructing by total-variation compressive sensing ([`tv`]).
//!
//! [`bench`] wires these into reproducible experiment pipelines over the
//! MNIST, Fashion-MNIST and CIFAR-100 corpora ([`datasets`]), scored with
//! PSNR ([`metrics`]).

pub mod bench;
pub mod datasets;
pub mod error;
pub mod field;
pub mod linreg;
pub mod metrics;
pub mod pgm;
pub mod seed;
pub mod spi;
pub mod trpe;
pub mod tv;

pub use error::{Error, Result};
pub use field::{ComplexField, Image};
