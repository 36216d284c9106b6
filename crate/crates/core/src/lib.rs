//! Σ-homotopy classification of Morse mappings from compact surfaces to the
//! line or the circle.
//!
//! * [`surface`]: surfaces, boundary signs and critical types;
//! * [`kr_graph`]: Kronrod–Reeb graphs and their extraction from height meshes;
//! * [`classify`]: the equivalence decision procedure and minimality;
//! * [`canonical`]: one normal-form graph per critical type;
//! * [`symplectic`]: `Sp(2g, Z)` and its factorization into named generators;
//! * [`mcg_action`]: mapping class group generators and their admissibility.

pub mod canonical;
pub mod classify;
pub mod kr_graph;
pub mod mcg_action;
pub mod surface;
pub mod symplectic;

pub use canonical::{canonical_kr_graph, CanonicalError};
pub use classify::{compare, equivalent_up_to_flip, is_minimal, minimal_fiber_count, sigma_homotopy_equivalent, ClassifyError, Verdict};
pub use kr_graph::{critical_type_of, cut_at_level, extract_kr_graph, HeightMesh, KRGraph};
pub use mcg_action::{canonical_generator_set, factor_stabilizer, level_set_class, twist_admissible, CurveClass, McgError};
pub use surface::{flip_target_orientation, validate_critical_type, BoundarySigns, CriticalType, Sign, Surface, Target};
pub use symplectic::{evaluate, stabilizer_decompose, Generator, GeneratorWord, SpMatrix, SymplecticError};
