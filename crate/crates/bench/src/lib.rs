//! Criterion benchmarks for the statgeom engine; see `benches/engine.rs`.
//! Run with `cargo bench -p statgeom-bench`.
