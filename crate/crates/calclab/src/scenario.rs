//! Flat scenario configuration shared by the CLI and the suites.

use anyhow::{bail, Context, Result};
use calclab_core::{Grid, SearchMode};
use serde::{Deserialize, Serialize};

/// Every knob a suite or an evaluation reads. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub suite: String,
    pub m: usize,
    pub n_cells: usize,
    /// Partner grid for refinement checks; `n_cells / 4` when absent.
    pub coarse_n_cells: Option<usize>,
    pub domain: [f64; 2],
    pub kappa: u32,
    /// Level for the sharp maximal function.
    pub s: f64,
    pub gamma: f64,
    /// Orlicz exponents per input slot; `(0, …, 0, 1)` when absent.
    pub beta: Option<Vec<f64>>,
    /// Weight specs: `power:x0:a`, `constant:c` or `file:path`.
    pub weights: Vec<String>,
    pub exponents: Vec<f64>,
    pub seed: u64,
    /// Number of consecutive seeds starting at `seed`.
    pub seeds: usize,
    /// Random sample count for sampling-based checks.
    pub samples: usize,
    pub search: SearchMode,
    /// Operator for `calclab eval`.
    pub op: Option<String>,
    /// Evaluation points for `calclab eval`; every cell center when empty.
    pub points: Vec<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            suite: String::new(),
            m: 1,
            n_cells: 1024,
            coarse_n_cells: None,
            domain: [-4.0, 4.0],
            kappa: 3,
            s: 0.1,
            gamma: 1.0,
            beta: None,
            weights: Vec::new(),
            exponents: Vec::new(),
            seed: 7,
            seeds: 1,
            samples: 10_000,
            search: SearchMode::Dilated,
            op: None,
            points: Vec::new(),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).context("parsing scenario")?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            bail!("m must be at least 1");
        }
        if !self.n_cells.is_power_of_two() || self.n_cells < 16 {
            bail!("n_cells must be a power of two ≥ 16, got {}", self.n_cells);
        }
        let c = self.coarse_n();
        if !c.is_power_of_two() || c < 16 {
            bail!("coarse grid must be a power of two ≥ 16, got {c}");
        }
        if !(self.domain[0] < self.domain[1]) {
            bail!("domain must be an increasing pair, got {:?}", self.domain);
        }
        if self.kappa == 0 {
            bail!("kappa must be at least 1");
        }
        if self.seeds == 0 {
            bail!("seeds must be at least 1");
        }
        if let Some(b) = &self.beta {
            if b.len() != self.m + 1 {
                bail!("beta needs m + 1 = {} entries, got {}", self.m + 1, b.len());
            }
        }
        Ok(())
    }

    pub fn coarse_n(&self) -> usize {
        self.coarse_n_cells.unwrap_or((self.n_cells / 4).max(16))
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.domain[0], self.domain[1], self.n_cells)?)
    }

    pub fn coarse_grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.domain[0], self.domain[1], self.coarse_n())?)
    }

    pub fn beta(&self) -> Vec<f64> {
        self.beta.clone().unwrap_or_else(|| {
            let mut b = vec![0.0; self.m];
            b.push(1.0);
            b
        })
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let s = Scenario::from_json(r#"{"suite":"domination","m":2,"n_cells":256,"search":"dyadic"}"#).unwrap();
        assert_eq!(s.m, 2);
        assert_eq!(s.coarse_n(), 64);
        assert_eq!(s.beta(), vec![0.0, 0.0, 1.0]);
        assert_eq!(s.search, SearchMode::Dyadic);
        assert!(Scenario::from_json(r#"{"n_cells":100}"#).is_err());
        assert!(Scenario::from_json(r#"{"bogus":1}"#).is_err());
    }
}
