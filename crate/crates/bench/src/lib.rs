//! Benchmark inputs shared by the criterion targets.

/// `n` values with greedy expansions of increasing length.
pub const GREEDY_NS: [u64; 3] = [41, 56, 3113];

/// `u` values whose congruence moduli span small to direct-range sizes.
pub const CONGRUENCE_US: [u64; 3] = [9, 17, 26];
