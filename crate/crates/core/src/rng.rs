//! Counter-based random streams.
//!
//! Every replicate of an experiment owns three independent ChaCha8 streams,
//! one per [`Purpose`]. A stream is addressed by `(master_seed, replicate,
//! purpose)`: the master seed expands into the ChaCha key and the pair
//! `(replicate, purpose)` selects the 64-bit stream id, so any replicate can be
//! replayed on its own and results never depend on how replicates are spread
//! over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    /// Random edges, whether materialized up front or revealed lazily.
    Graph = 0,
    /// Placement of the initially active vertices.
    Seeds = 1,
    /// Choice of the next vertex to use during exploration phases.
    PhaseOrder = 2,
}

const PURPOSE_BITS: u32 = 2;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Returns the stream for `(master_seed, replicate, purpose)`.
///
/// Replicate indices must stay below `2^62`.
pub fn stream(master_seed: u64, replicate: u64, purpose: Purpose) -> StreamRng {
    assert!(replicate < 1 << (64 - PURPOSE_BITS), "replicate index overflow");
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((replicate << PURPOSE_BITS) | purpose as u64);
    rng
}
