//! Seeded stratified fold assignment.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Fold index (0-based) for every item, stratified by label.
///
/// Items of each class are shuffled and dealt round-robin; the starting fold
/// rotates between classes so total fold sizes stay within one of each other
/// whenever possible.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(Error::Config(format!("cannot split {} items into {folds} folds", labels.len())));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut seed::rng(seed, &[class as u64]));
        for (pos, &i) in members.iter().enumerate() {
            assignment[i] = (offset + pos) % folds;
        }
        offset = (offset + members.len()) % folds;
    }
    Ok(assignment)
}

/// `(train, test)` index lists for fold `f`.
pub fn split(assignment: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..assignment.len()).partition(|&i| assignment[i] != f)
}

/// Repeated stratified k-fold plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// `assignments[repeat][item]` = test fold of the item in that repeat.
    pub assignments: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn test_indices(&self, repeat: usize, fold: usize) -> Vec<usize> {
        split(&self.assignments[repeat], fold).1
    }

    pub fn train_indices(&self, repeat: usize, fold: usize) -> Vec<usize> {
        split(&self.assignments[repeat], fold).0
    }
}

/// Build `repeats` independent stratified `folds`-fold assignments.
pub fn make_folds(labels: &[usize], folds: usize, repeats: usize, seed: u64) -> Result<FoldPlan> {
    if repeats == 0 {
        return Err(Error::Config("need at least one repeat".into()));
    }
    let assignments = (0..repeats)
        .map(|r| stratified_folds(labels, folds, seed::derive(seed, &[r as u64])))
        .collect::<Result<_>>()?;
    Ok(FoldPlan {
        folds,
        repeats,
        seed,
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_class_counts_balanced() {
        let labels: Vec<usize> = (0..103).map(|i| 1 + i % 4).collect();
        let plan = make_folds(&labels, 10, 4, 5).unwrap();
        for a in &plan.assignments {
            for class in 1..=4 {
                let mut counts = [0; 10];
                for (i, &f) in a.iter().enumerate() {
                    if labels[i] == class {
                        counts[f] += 1;
                    }
                }
                let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
                assert!(hi - lo <= 1);
            }
        }
        assert_ne!(plan.assignments[0], plan.assignments[1]);
        assert_eq!(plan, make_folds(&labels, 10, 4, 5).unwrap());
    }
}
