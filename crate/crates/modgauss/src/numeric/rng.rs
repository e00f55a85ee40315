use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reproducible, splittable RNG handle. Two streams with the same seed but
/// different stream ids are independent; the same (seed, stream) pair always
/// yields the identical sequence, regardless of thread count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    /// Concrete generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }

    /// Child stream `id` of this stream (disjoint counter block).
    pub fn substream(&self, id: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream: self
                .stream
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(id)
                .wrapping_add(1),
        }
    }
}

/// Fixed-size chunking for deterministic parallel Monte Carlo: chunk `i`
/// always uses `base.substream(i)` and the per-chunk results are reduced in
/// chunk order, so the total is byte-identical for any thread count.
pub fn chunk_streams(base: RngStream, total: u64, chunk: u64) -> Vec<(RngStream, u64)> {
    assert!(chunk > 0);
    let mut out = Vec::new();
    let mut done = 0u64;
    let mut idx = 0u64;
    while done < total {
        let take = chunk.min(total - done);
        out.push((base.substream(idx), take));
        done += take;
        idx += 1;
    }
    out
}
