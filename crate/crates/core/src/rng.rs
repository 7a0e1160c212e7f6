//! Named random substreams derived from a single 64-bit master seed.
//!
//! Every stochastic task draws from `substream(master, component, index)`, so
//! results depend only on the master seed and the task's identity, never on
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// 64-bit FNV-1a.
fn fnv1a(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

/// Generator for task `index` of `component`.
pub fn substream(master: u64, component: &str, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ fnv1a(component));
    rng.set_stream(index);
    rng
}
