//! Signal representation on graph bundles.
//!
//! A graph bundle is a total graph that looks like a Cartesian product
//! `U □ F` over small pieces `U` of a base graph, but may twist globally.
//! This crate builds such bundles from voltage assignments, trivializes them
//! over covers of the base, and lifts orthonormal bases of the base and fiber
//! into a tight frame on the total graph through a partition of unity.
//!
//! ```
//! use bundlegsp::{presets, cover, spectral, transform::{self, Frame}};
//!
//! let bundle = presets::mobius();
//! let cover = cover::star_cover(bundle.base());
//! let partition = cover::inverse_multiplicity_partition(&cover);
//! let dict = transform::build_dictionary(
//!     &bundle,
//!     &cover,
//!     &partition,
//!     &spectral::fourier_basis(bundle.base()).unwrap(),
//!     &spectral::fourier_basis(bundle.fiber()).unwrap(),
//! )
//! .unwrap();
//! assert_eq!(dict.atom_count(), 50);
//! let (lower, upper) = transform::frame_bounds(&dict).unwrap();
//! assert!((lower - 1.0).abs() < 1e-9 && (upper - 1.0).abs() < 1e-9);
//! ```

pub mod bundle;
pub mod cover;
pub mod denoise;
pub mod error;
pub mod graph;
pub mod isomorphism;
pub mod presets;
pub mod signal;
pub mod spectral;
pub mod transform;

pub use bundle::{build_bundle, trivialize, validate_bundle, GraphBundle, Permutation, VoltageAssignment};
pub use cover::{Cover, PartitionOfUnity};
pub use error::{Error, Result};
pub use graph::{Graph, GraphMap, LocalIsomorphism, ProductIndexing};
pub use signal::Signal;
pub use spectral::OrthonormalDictionary;
pub use transform::{build_dictionary, BundleCoefficients, BundleDictionary, Frame};
