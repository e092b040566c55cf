//! Stable 64-bit seed derivation.
//!
//! One master seed feeds every random stream in the crate. Sub-streams are
//! derived with SplitMix64 so that streams are independent of each other:
//! task placement never moves when the participant count changes, and every
//! (sweep value, repetition) cell of a scenario can be re-run in isolation.

/// One SplitMix64 step. Stable across platforms and releases.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the RNG of one generated entity (stream = tasks or participants,
/// index = position within the stream).
pub fn entity_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ stream) ^ index)
}

/// Seed for one (sweep value, repetition) cell of a scenario run.
pub fn run_seed(master: u64, sweep_value: u64, repetition: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ sweep_value) ^ repetition)
}

/// Stream tag for task generation.
pub const STREAM_TASKS: u64 = 0x5441_534B; // "TASK"
/// Stream tag for participant generation.
pub const STREAM_PARTICIPANTS: u64 = 0x5041_5254; // "PART"
