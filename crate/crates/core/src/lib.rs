//! Compiles dataflow descriptions of Nios II custom instructions into VHDL,
//! C glue and a cycle-accurate model.

pub mod config;
pub mod cpatch;
pub mod frontend;
pub mod hdl;
pub mod lpm;
pub mod mapper;
pub mod metrics;
pub mod names;
pub mod pipeline;
pub mod sim;
