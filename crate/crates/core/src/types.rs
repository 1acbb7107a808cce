//! Work-list items and filter outcomes shared by every filtering stage.

use crate::error::{param, Result};

/// A node of the multifilter tree: a subset of dataset indices and its purity
/// parameter `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkItem {
    /// Sorted, unique dataset indices.
    pub subset: Vec<usize>,
    pub alpha: f64,
    /// Seed for the randomized steps run on this item. Assigned by the
    /// orchestrator when the item is queued.
    pub seed: u64,
}

impl WorkItem {
    /// Builds an item from indices that are already sorted and unique.
    pub fn new(subset: Vec<usize>, alpha: f64) -> Self {
        debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        Self {
            subset,
            alpha,
            seed: 0,
        }
    }

    /// Validating constructor: indices must be sorted, unique and `< n`;
    /// `alpha` must lie in `(0, 1]`.
    pub fn checked(subset: Vec<usize>, alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return param(format!("work item alpha must lie in (0, 1], got {alpha}"));
        }
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return param("work item indices must be sorted and unique");
        }
        if subset.last().is_some_and(|&i| i >= n) {
            return param("work item index out of range");
        }
        Ok(Self::new(subset, alpha))
    }

    pub fn len(&self) -> usize {
        self.subset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subset.is_empty()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Result of one main-multifilter call.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterOutcome {
    /// A `k`-sparse mean estimate.
    Candidate(Vec<f64>),
    /// The item cannot be good; drop it.
    Reject,
    /// One or two children satisfying the multifilter condition.
    Split(Vec<WorkItem>),
}

/// `Σ 1/α_i²` over a list of items.
pub fn potential<'a>(items: impl IntoIterator<Item = &'a WorkItem>) -> f64 {
    items.into_iter().map(|w| w.alpha.powi(-2)).sum()
}

/// Checks the bookkeeping half of the multifilter condition for children of
/// `parent`: `Σ 1/α_i² ≤ 1/α²` (with `1e-9` slack) and that at least one
/// child is strictly smaller than the parent.
pub fn satisfies_multifilter_condition(parent: &WorkItem, children: &[WorkItem]) -> bool {
    if children.is_empty() || children.len() > 2 {
        return false;
    }
    let budget = parent.alpha.powi(-2);
    let spent = potential(children);
    let progress = children.iter().any(|c| c.len() < parent.len());
    let subsets = children
        .iter()
        .all(|c| c.subset.iter().all(|i| parent.subset.binary_search(i).is_ok()));
    spent <= budget + 1e-9 * budget.max(1.0) && progress && subsets
}
