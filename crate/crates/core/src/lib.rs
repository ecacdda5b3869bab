//! Continuous-time classical random walks and chiral continuous-time quantum
//! walks on small graphs.
//!
//! The central figure of merit is the quantum-classical distance
//!
//! ```text
//! D_QC^j(t) = 1 - Σ_k p_kj(t) |<k| exp(-iHt) |j>|²
//! ```
//!
//! which compares the classical walk `exp(-tL)` with a quantum walk generated
//! by a Hermitian `H` carrying complex phases on the graph edges. The crate
//! builds the graphs and Hamiltonians, propagates both walks, evaluates the
//! distance together with coherence and inverse participation ratio, offers
//! closed forms for cycles and complete graphs, and searches phase space for
//! extremal distances.

pub mod closed_forms;
pub mod error;
pub mod expm;
pub mod graph;
pub mod grid;
pub mod hamiltonian;
pub mod metrics;
pub mod optimizer;
pub mod propagation;

pub use error::{Result, WalkError};
pub use graph::Graph;
pub use grid::TimeGrid;
pub use hamiltonian::{Coupling, GaugeVector, PhasedHamiltonian};
pub use propagation::{AmplitudeVector, ClassicalWalk, SpectralDecomposition};
