//! Library surface of the `ultrawalks` command-line tool: configuration
//! resolution, matrix/table serialization, the experiment runner, and the
//! invariant suite. The binary in `main.rs` is a thin dispatcher over
//! these modules.

pub mod config;
pub mod io;
pub mod run;
pub mod validate;
