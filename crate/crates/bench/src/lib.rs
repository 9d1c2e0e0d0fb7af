//! Criterion benchmarks for liftac live in `benches/`.
