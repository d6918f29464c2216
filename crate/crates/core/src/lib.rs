//! Compressed sensing shadow tomography: Lindblad signal generation,
//! classical-shadow sampling, DCT-domain l1 recovery and error metrics.
//!
//! Real-valued code (transforms, recovery, metrics) is generic over
//! [`Real`]; the `*F64` aliases below fix the scalar for common use.

pub mod error;
pub mod io;
pub mod lindblad;
pub mod metrics;
pub mod pauli;
pub mod recovery;
pub mod scalar;
pub mod seed;
pub mod shadow;
pub mod state;
pub mod transform;

pub use error::{CsstError, Result};
pub use pauli::{enumerate_paulis, expectation, family_size, Letter, PauliString};
pub use scalar::Real;
pub use state::{initial_state, DensityMatrix, InitialState};
pub use transform::{SamplingPlan, TransformKind};

pub type BasisF64 = transform::Basis<f64>;
pub type MeasurementOperatorF64 = transform::MeasurementOperator<f64>;
pub type LassoConfigF64 = recovery::LassoConfig<f64>;
pub type ReconstructionResultF64 = recovery::ReconstructionResult<f64>;
pub type AlphaSweepF64 = recovery::AlphaSweep<f64>;
