//! Instance generators and the acceptance-suite driver behind the
//! `sparsekit` binary. Everything here is deterministic: the same spec or
//! suite name reproduces the same instances and verdicts byte for byte.

pub mod accept;
pub mod generate;
