//! Criterion benchmarks for the certificate, sweep and harness paths live in
//! `benches/`; run them with `cargo bench -p pvopt-bench`.
