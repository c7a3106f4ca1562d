use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

/// A reproducible random stream identified by `(master_seed, stream_index)`.
///
/// Backed by the ChaCha20 block function: the seed selects the key and the
/// index selects the stream (nonce), so distinct indices give independent
/// sequences while identical pairs replay exactly.
#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

pub fn make_stream(master_seed: u64, stream_index: u64) -> RandomStream {
    RandomStream::new(master_seed, stream_index)
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = StandardNormal.sample(&mut self.rng);
        }
    }

    pub fn draw_standard_normal(&mut self, count: usize) -> Vec<f64> {
        let mut v = vec![0.0; count];
        self.fill_standard_normal(&mut v);
        v
    }

    /// One chi-squared variate with `dof` degrees of freedom.
    pub fn chi_squared(&mut self, dof: f64) -> f64 {
        ChiSquared::new(dof)
            .expect("positive degrees of freedom")
            .sample(&mut self.rng)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Derives a child seed; used to hand out per-trial seeds.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }
}
