//! Bundled example inputs.

use crate::document::{parse_input, Model};
use crate::error::{Error, Result};

/// `(name, document text)` for every bundled example.
pub const EXAMPLES: [(&str, &str); 5] = [
    ("golden", include_str!("../fixtures/golden.toml")),
    ("polynomial", include_str!("../fixtures/polynomial.toml")),
    ("c3c3_swap", include_str!("../fixtures/c3c3_swap.toml")),
    ("c2f2_mixed", include_str!("../fixtures/c2f2_mixed.toml")),
    ("identity", include_str!("../fixtures/identity.toml")),
];

pub fn example_text(name: &str) -> Result<&'static str> {
    EXAMPLES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::input("example", format!("no bundled example named `{name}`")))
}

pub fn example(name: &str) -> Result<Model> {
    parse_input(example_text(name)?)
}
