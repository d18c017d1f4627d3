//! Benchmarks for the `threshnet` crate; see `benches/`.
