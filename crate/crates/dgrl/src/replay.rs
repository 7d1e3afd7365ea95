//! Ring-buffer experience replay with uniform sampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::space::ExecutableAction;

/// One environment interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: ExecutableAction,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

/// Fixed-capacity ring storage; pushes evict the oldest entry once full.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    storage: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidParameter(
                "replay capacity must be positive".into(),
            ));
        }
        Ok(ReplayBuffer {
            storage: Vec::with_capacity(capacity.min(4096)),
            capacity,
            cursor: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, transition: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(transition);
        } else {
            self.storage[self.cursor] = transition;
            self.cursor = (self.cursor + 1) % self.capacity;
        }
    }

    /// Uniform sampling with replacement; deterministic for a fixed rng.
    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<&Transition>> {
        if self.storage.len() < batch {
            return Err(Error::State(format!(
                "buffer holds {} transitions, cannot sample a batch of {batch}",
                self.storage.len()
            )));
        }
        Ok((0..batch)
            .map(|_| &self.storage[rng.gen_range(0..self.storage.len())])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(reward: f64) -> Transition {
        Transition {
            state: vec![0.0],
            action: ExecutableAction::discrete_only(vec![0]),
            reward,
            next_state: vec![0.0],
            terminal: false,
        }
    }

    #[test]
    fn push_grows_until_capacity() {
        let mut buf = ReplayBuffer::new(2).unwrap();
        buf.push(t(1.0));
        assert_eq!(buf.len(), 1);
        buf.push(t(2.0));
        buf.push(t(3.0));
        assert_eq!(buf.len(), 2);
        // Oldest entry (reward 1.0) is gone.
        let rewards: Vec<f64> = buf.storage.iter().map(|x| x.reward).collect();
        assert!(rewards.contains(&2.0) && rewards.contains(&3.0));
    }

    #[test]
    fn push_then_sample_returns_that_transition() {
        let mut buf = ReplayBuffer::new(8).unwrap();
        buf.push(t(7.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let batch = buf.sample(1, &mut rng).unwrap();
        assert_eq!(batch[0].reward, 7.0);
    }

    #[test]
    fn undersized_buffer_rejects_sampling() {
        let buf = ReplayBuffer::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(buf.sample(1, &mut rng), Err(Error::State(_))));
    }

    #[test]
    fn cloned_rng_reproduces_the_batch() {
        let mut buf = ReplayBuffer::new(16).unwrap();
        for i in 0..16 {
            buf.push(t(i as f64));
        }
        let rng = ChaCha8Rng::seed_from_u64(5);
        let a: Vec<f64> = buf
            .sample(8, &mut rng.clone())
            .unwrap()
            .iter()
            .map(|x| x.reward)
            .collect();
        let b: Vec<f64> = buf
            .sample(8, &mut rng.clone())
            .unwrap()
            .iter()
            .map(|x| x.reward)
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_is_uniform_chi_square() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};

        let mut buf = ReplayBuffer::new(10).unwrap();
        for i in 0..10 {
            buf.push(t(i as f64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 10_000usize;
        let mut counts = [0f64; 10];
        for _ in 0..draws {
            let got = buf.sample(1, &mut rng).unwrap();
            counts[got[0].reward as usize] += 1.0;
        }
        let expected = draws as f64 / 10.0;
        let stat: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        let dist = ChiSquared::new(9.0).unwrap();
        let p = 1.0 - dist.cdf(stat);
        assert!(p > 0.01, "chi-square stat {stat}, p {p}");
    }
}
