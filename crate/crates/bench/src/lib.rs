//! Criterion benchmarks for `hokcov`; see `benches/`.
