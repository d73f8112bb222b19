pub mod bundle;
pub mod rng;
pub mod summary;

pub use bundle::{generate_bundle, Branch, OuterPath, PathBundle};
pub use rng::{derive_label, Layer, RandomStream, SeededStreamFactory};
pub use summary::{summarize, BoundEstimate};
