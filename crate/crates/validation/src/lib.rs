//! Holds the `acceptance` test target (`tests/acceptance.rs`), which prints
//! one PASS/FAIL line per acceptance criterion. It lives in its own package
//! so that it runs after every other test target in `cargo test --workspace`.
