//! Criterion benchmarks for the relbgk kernels; see `benches/kernels.rs`.
