//! Shared test inputs.

pub(crate) const POSTORDER: &str = include_str!("../../../fixtures/listings/postorder.py");
