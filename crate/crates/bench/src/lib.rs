//! Criterion benchmarks for the circuit simulator and the environment. The
//! benchmarks live under `benches/`; this library is intentionally empty.
