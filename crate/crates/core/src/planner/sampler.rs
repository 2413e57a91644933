use rand::Rng;
use serde::{Deserialize, Serialize};

/// Roulette-wheel weights over cutlines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams { alpha: 1e9, beta: 0.2 }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha >= 1e6 && self.alpha.is_finite()) {
            return Err(format!("alpha must be >= 1e6, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(format!("beta must be in (0, 1], got {}", self.beta));
        }
        Ok(())
    }
}

/// Per-cutline counters: `mu` tree nodes in the two adjacent cells, `eta`
/// samples taken on the cutline, `kappa` occurrences in recorded classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutlineStats {
    pub mu: Vec<u32>,
    pub eta: Vec<u32>,
    pub kappa: Vec<u32>,
}

impl CutlineStats {
    pub fn new(n: usize) -> Self {
        CutlineStats {
            mu: vec![0; n],
            eta: vec![0; n],
            kappa: vec![0; n],
        }
    }

    pub fn weight(&self, i: usize, p: &SamplerParams, use_alpha: bool) -> f64 {
        if self.mu[i] == 0 {
            return 0.0;
        }
        let a = if use_alpha && self.eta[i] == 0 { 1.0 + p.alpha } else { 1.0 };
        a * p.beta.powi(self.kappa[i] as i32)
    }
}

/// Binary sum tree; internal nodes are recomputed from their children so
/// large weights leave no residue once removed.
#[derive(Debug, Clone)]
pub struct SumTree {
    size: usize,
    n: usize,
    tree: Vec<f64>,
}

impl SumTree {
    pub fn new(n: usize) -> Self {
        let size = n.next_power_of_two().max(1);
        SumTree {
            size,
            n,
            tree: vec![0.0; 2 * size],
        }
    }

    pub fn set(&mut self, i: usize, w: f64) {
        let mut k = self.size + i;
        self.tree[k] = w;
        while k > 1 {
            k /= 2;
            self.tree[k] = self.tree[2 * k] + self.tree[2 * k + 1];
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.tree[self.size + i]
    }

    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    /// Leaf whose cumulative range holds `u` in `[0, total)`.
    pub fn find(&self, mut u: f64) -> Option<usize> {
        if !(self.total() > 0.0) {
            return None;
        }
        let mut k = 1;
        while k < self.size {
            let left = self.tree[2 * k];
            if u < left || self.tree[2 * k + 1] <= 0.0 {
                k *= 2;
            } else {
                u -= left;
                k = 2 * k + 1;
            }
        }
        let i = k - self.size;
        if i < self.n && self.get(i) > 0.0 {
            return Some(i);
        }
        (0..self.n).rev().find(|&j| self.get(j) > 0.0)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        let u = rng.gen::<f64>() * self.total();
        self.find(u)
    }
}
