//! Circuit templates, their random instantiation, lightcones and the circuit
//! text format.

mod circuit;
mod grid;
mod template;
pub mod text;

pub(crate) use circuit::conjugate_local;
pub use circuit::{CliffordCircuit, Direction, Ensemble, SamplerPolicy};
pub use grid::GridGeometry;
pub use template::{
    brickwork_template, brickwork_template_with_order, coarse_grained_template, compiled_template,
    default_snake_depth, lightcone, snake_path, Architecture, BrickColor, CircuitTemplate,
    GateSupport, DEFAULT_BRICK_ORDER,
};
