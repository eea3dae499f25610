//! Holds the `acceptance` test target only. It lives in its own package so
//! that `cargo test --workspace` runs it after the core and CLI tests.
