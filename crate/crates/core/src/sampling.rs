//! Finite-shot emulation: draws detection outcomes from an exact outcome table.

use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{OutcomeClass, OutcomeRecord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ShotRow {
    pub label: String,
    pub class: OutcomeClass,
    pub probability: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShotTable {
    pub shots: u64,
    pub seed: u64,
    /// One row per outcome, in the order of the input table.
    pub rows: Vec<ShotRow>,
}

impl ShotTable {
    pub fn frequency(&self, row: &ShotRow) -> f64 {
        row.count as f64 / self.shots as f64
    }

    pub fn coincidence_count(&self) -> u64 {
        self.rows
            .iter()
            .filter(|r| r.class == OutcomeClass::Coincidence)
            .map(|r| r.count)
            .sum()
    }

    pub fn coincidence_frequency(&self) -> f64 {
        self.coincidence_count() as f64 / self.shots as f64
    }

    pub fn render(&self) -> String {
        let mut s = format!("shots {} seed {}\n", self.shots, self.seed);
        let _ = writeln!(
            s,
            "{:<8} {:>12} {:>10} {:>14}",
            "outcome", "exact", "count", "frequency"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<8} {:>12.6} {:>10} {:>14.6}",
                r.label,
                r.probability,
                r.count,
                self.frequency(r)
            );
        }
        let _ = writeln!(
            s,
            "coincidence frequency {:.6}",
            self.coincidence_frequency()
        );
        s
    }
}

/// Draws `shots` outcomes from `outcomes` with a ChaCha8 stream seeded by `seed`.
pub fn sample_shots(outcomes: &[OutcomeRecord], shots: u64, seed: u64) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::Sampling("at least one shot is required".into()));
    }
    let dist = WeightedIndex::new(outcomes.iter().map(|o| o.probability))
        .map_err(|e| Error::Sampling(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; outcomes.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    let rows = outcomes
        .iter()
        .zip(counts)
        .map(|(o, count)| ShotRow {
            label: o.label.clone(),
            class: o.class,
            probability: o.probability,
            count,
        })
        .collect();
    Ok(ShotTable { shots, seed, rows })
}
