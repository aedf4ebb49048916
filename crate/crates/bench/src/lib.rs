//! Criterion benchmarks for `permea`; see `benches/`.
