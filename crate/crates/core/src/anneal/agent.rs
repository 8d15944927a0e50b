//! Move-kind selection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Chooses among `arms` move kinds and learns from rewards.
pub trait MoveSelector {
    fn select(&mut self, rng: &mut ChaCha8Rng) -> usize;
    fn reward(&mut self, arm: usize, reward: f64);
}

/// ε-greedy bandit with an exponential moving average per arm.
#[derive(Debug, Clone)]
pub struct EpsilonGreedy {
    pub epsilon: f64,
    pub decay: f64,
    values: Vec<f64>,
}

impl EpsilonGreedy {
    pub fn new(arms: usize, epsilon: f64, decay: f64) -> Self {
        assert!(arms > 0);
        EpsilonGreedy {
            epsilon,
            decay,
            values: vec![0.0; arms],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl MoveSelector for EpsilonGreedy {
    fn select(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let n = self.values.len();
        if rng.gen::<f64>() < self.epsilon {
            return rng.gen_range(0..n);
        }
        let best = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties = self.values.iter().filter(|&&v| v == best).count();
        let pick = if ties == 1 { 0 } else { rng.gen_range(0..ties) };
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == best)
            .nth(pick)
            .map(|(i, _)| i)
            .unwrap()
    }

    fn reward(&mut self, arm: usize, reward: f64) {
        let v = &mut self.values[arm];
        *v = self.decay * *v + (1.0 - self.decay) * reward;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_rewards_explore_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = EpsilonGreedy::new(5, 0.1, 0.99);
        let mut hist = [0usize; 5];
        let n = 10_000;
        for _ in 0..n {
            let k = a.select(&mut rng);
            a.reward(k, 0.0);
            hist[k] += 1;
        }
        let e = n as f64 / 5.0;
        let chi2: f64 = hist.iter().map(|&h| (h as f64 - e).powi(2) / e).sum();
        // 4 degrees of freedom, p = 0.001
        assert!(chi2 < 18.47, "{hist:?}");
    }

    #[test]
    fn rewarded_arm_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut a = EpsilonGreedy::new(5, 0.1, 0.99);
        let n = 20_000;
        let mut hits = 0;
        for _ in 0..n {
            let k = a.select(&mut rng);
            a.reward(k, if k == 2 { 1.0 } else { 0.0 });
            hits += usize::from(k == 2);
        }
        assert!(hits as f64 / n as f64 > 0.9 + 0.1 / 5.0 - 0.01);
    }
}
