//! Multi-group social network generation and analysis.
//!
//! Networks are built from dense Erdős–Rényi subgroups whose sizes follow a
//! heavy-tailed law, wired together under one of four inter-group
//! connectivity modalities:
//!
//! * **bridge** – one edge per pair of groups adjacent in a random spanning tree,
//! * **edge bundle** – several edges per tree pair, scaling with both group sizes,
//! * **co-membership** – one member of a group joins a neighbouring group,
//! * **liaison** – extra nodes arranged in a hierarchy above the groups.
//!
//! On top of the generators the crate computes structural metrics, the
//! spectral radius that governs linearised SI/SIS growth, the convergence
//! time of equal-neighbour consensus averaging, and the steady-state
//! disagreement of noisy consensus (through Markov chain hitting times).
//! The [`experiments`] module runs seeded size sweeps and [`regression`] fits
//! the comparative OLS model used to compare modalities.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod io;
pub mod partition;
pub mod regression;
pub mod rng;

pub use error::{Error, Result};
pub use generators::{generate, Modality, ModalityParams, MultiGroupGraph};
pub use graph::Graph;
