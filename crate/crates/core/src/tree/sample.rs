use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::sample_index;
use crate::measures::ProbVector;
use crate::tree::{progeny_distribution, OffspringConfig, OffspringKernel, TypedTree};

#[derive(Clone, Debug, PartialEq)]
pub enum TreeSample {
    Tree(TypedTree),
    /// The tree grew past the vertex cap before it was complete.
    Overflow,
}

/// A conditioned draw together with the number of free draws it took.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedSample {
    pub tree: TypedTree,
    pub attempts: u64,
}

fn check_shapes(mu: &ProbVector, kernel: &OffspringKernel) -> Result<()> {
    if mu.len() != kernel.k() {
        return Err(Error::ShapeMismatch { expected: kernel.k(), got: mu.len() });
    }
    Ok(())
}

/// Grows a tree breadth first: the root type is drawn from `mu`, then every
/// vertex in the queue draws its configuration from `Q{·|type}`. Stops with
/// [`TreeSample::Overflow`] as soon as more than `cap` vertices exist.
pub fn sample_tree<R: Rng + ?Sized>(
    mu: &ProbVector,
    kernel: &OffspringKernel,
    cap: usize,
    rng: &mut R,
) -> Result<TreeSample> {
    check_shapes(mu, kernel)?;
    if cap == 0 {
        return Err(Error::invalid("cap must be at least 1"));
    }
    let weights: Vec<Vec<f64>> = (0..kernel.k())
        .map(|a| kernel.row(a).iter().map(|(_, p)| *p).collect())
        .collect();

    // breadth-first labels: type and chosen configuration row per vertex
    let mut types = vec![sample_index(mu.weights(), rng)];
    let mut chosen: Vec<usize> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let t = types[v];
        let i = sample_index(&weights[t], rng);
        chosen.push(i);
        let config = &kernel.row(t)[i].0;
        if types.len() + config.len() > cap {
            return Ok(TreeSample::Overflow);
        }
        for &c in config.types() {
            queue.push_back(types.len());
            types.push(c);
        }
    }

    // relabel in preorder
    let mut first_child = Vec::with_capacity(types.len());
    let mut next = 1;
    for (v, &i) in chosen.iter().enumerate() {
        first_child.push(next);
        next += kernel.row(types[v])[i].0.len();
    }
    let mut configs: Vec<OffspringConfig> = Vec::with_capacity(types.len());
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let config = &kernel.row(types[v])[chosen[v]].0;
        configs.push(config.clone());
        let start = first_child[v];
        stack.extend((start..start + config.len()).rev());
    }
    Ok(TreeSample::Tree(TypedTree::from_preorder_configs(kernel.k(), types[0], &configs)?))
}

/// Exact draw from the tree law conditioned on `|T| = n`, by rejection.
///
/// Sizes of probability zero (checked with [`progeny_distribution`]) fail
/// fast with [`Error::ImpossibleSize`].
pub fn sample_tree_conditioned<R: Rng + ?Sized>(
    n: usize,
    mu: &ProbVector,
    kernel: &OffspringKernel,
    max_attempts: u64,
    rng: &mut R,
) -> Result<ConditionedSample> {
    sample_tree_window(n, 0, mu, kernel, max_attempts, rng)
}

/// Like [`sample_tree_conditioned`] but accepts any size in `[n, n + w]`.
/// The result is a draw from the law conditioned on that window, not on an
/// exact size.
pub fn sample_tree_window<R: Rng + ?Sized>(
    n: usize,
    w: usize,
    mu: &ProbVector,
    kernel: &OffspringKernel,
    max_attempts: u64,
    rng: &mut R,
) -> Result<ConditionedSample> {
    check_shapes(mu, kernel)?;
    if n == 0 {
        return Err(Error::ImpossibleSize(0));
    }
    let dist = progeny_distribution(mu, kernel, n + w)?;
    if dist[n..].iter().all(|&p| p <= 0.0) {
        return Err(Error::ImpossibleSize(n));
    }
    for attempt in 1..=max_attempts {
        if let TreeSample::Tree(tree) = sample_tree(mu, kernel, n + w, rng)? {
            if tree.size() >= n {
                return Ok(ConditionedSample { tree, attempts: attempt });
            }
        }
    }
    Err(Error::AttemptsExhausted { attempts: max_attempts })
}
