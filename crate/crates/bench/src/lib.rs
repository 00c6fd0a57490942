//! Criterion benchmarks for the l0combo kernels live in `benches/`.
