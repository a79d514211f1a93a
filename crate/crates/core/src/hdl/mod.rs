//! VHDL generation: an AST for the emitted subset, the builder that lowers a
//! mapped design into it, the text emitter and structural validation.

pub mod ast;
mod build;
mod emit;
mod validate;

pub use build::{build_design, ci_ports, PORT_WIDTH};
pub use emit::emit_vhdl;
pub use validate::{
    design_views, read_emitted, validate_emitted, validate_structure, validate_view,
    ComponentView, InstanceView, UnitView, Violation,
};
