//! Criterion benchmarks for `linesearch-core`; see `benches/`.
