//! Computable core of bounded-degree graph-sequence limit theory.
//!
//! The pieces fit together like this: [`graph`] holds finite
//! bounded-degree graphs and the elementary constructions; [`stats`]
//! computes rooted-ball canonical forms and local statistics with the
//! product-topology distance (weak convergence); [`metrics`] the labeled
//! star distances and the geometric distance over disjoint multiples
//! (strong convergence); [`partition`] edge-removal partitions into
//! bounded components (hyperfiniteness) with component-class bookkeeping;
//! [`functionals`] almost-additive and subadditive limit harnesses;
//! [`spectral`] pattern-invariant finite-range operators and their
//! integrated density of states; [`seqgen`] deterministic generators and
//! sequence manifests.

mod canon;
pub mod functionals;
pub mod graph;
pub mod metrics;
pub mod partition;
pub mod seqgen;
pub mod spectral;
pub mod stats;

pub use functionals::{FunctionalError, FunctionalKind, GraphFunctional, StepFn, Value};
pub use graph::{Distance, Graph, GraphError, RootedGraph, VertexLabeling};
pub use metrics::{DeltaSConfig, DistanceEstimate, EstimateKind, MetricsError, StarMode};
pub use partition::{Partition, PartitionError};
pub use seqgen::{SeqGenError, SequenceManifest};
pub use spectral::{Kernel, KernelSpec, SpectralCdf, SpectralConfig, SpectralError};
pub use stats::{CanonicalBallKey, StatVector, StatsError};
