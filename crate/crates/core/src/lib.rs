//! Bounding homomorphisms from punctured-surface groups to free groups, their
//! realization as curve-and-arc diagrams, and splitting tuples built from them.

pub mod diagram;
pub mod equiv;
pub mod folding;
pub mod realize;
pub mod surface;
pub mod synth;
pub mod unionfind;
pub mod words;

pub use diagram::{BandEvent, Component, ComponentKind, Dash, Diagram, DiagramError};
pub use equiv::{
    AbelianInvariants, ConditionVerdict, Flavor, Presentation, SplittingTuple, TupleError, Verdict,
};
pub use folding::{ComponentTag, FoldGraph, FoldKind, FoldRecord, OrientationCase};
pub use realize::{realize, RealizationResult, RealizeError};
pub use surface::{BoundingReport, FreeTargetHom, SurfaceError, SurfaceSignature};
pub use words::{CancellationTrace, Family, Generator, Letter, Sign, Word, WordError};
