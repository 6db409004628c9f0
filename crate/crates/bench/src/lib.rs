//! Benchmarks live in `benches/scaling.rs`; run them with `cargo bench -p commscale-bench`.
