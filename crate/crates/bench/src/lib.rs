//! Criterion benchmarks for the enumeration kernels; see `benches/`.
