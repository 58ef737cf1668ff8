//! Exact spectral-sequence computations over F_p.

pub mod algebra;
pub mod chart;
pub mod engine;
pub mod instances;
pub mod linalg;
pub mod oracle;
pub mod verify;

pub use algebra::{
    AlgebraError, AlgebraPresentation, Element, GeneratorKind, GeneratorSpec, Monomial, Trigrade, Window,
};
pub use chart::{render_json, render_svg, render_text, ChartError, ChartSpec, Dump, LabelPolicy};
pub use engine::{
    DifferentialRule, DifferentialShift, EngineError, FactorAction, LogEntry, Page, RunResult, SpectralSequence,
};
pub use instances::{BasisClass, BigradedBasis, InstanceError};
pub use linalg::{Echelon, FpMatrix, LinalgError};
