use crate::tree::{OffspringConfig, OffspringKernel, TypedTree};

/// Every tree with exactly `n` vertices whose root has type `root_type` and
/// whose configurations all have positive kernel probability. Only sensible
/// for small `n`.
pub fn all_trees(kernel: &OffspringKernel, root_type: usize, n: usize) -> Vec<TypedTree> {
    let mut out = Vec::new();
    let mut configs = Vec::new();
    extend(kernel, root_type, n, &mut vec![root_type], &mut configs, &mut out);
    out
}

fn extend(
    kernel: &OffspringKernel,
    root_type: usize,
    n: usize,
    pending: &mut Vec<usize>,
    configs: &mut Vec<OffspringConfig>,
    out: &mut Vec<TypedTree>,
) {
    let Some(t) = pending.pop() else {
        if configs.len() == n {
            out.push(TypedTree::from_preorder_configs(kernel.k(), root_type, configs).expect("complete tree"));
        }
        return;
    };
    for (c, p) in kernel.row(t) {
        // every pending vertex still needs a slot
        if *p <= 0.0 || configs.len() + 1 + pending.len() + c.len() > n {
            continue;
        }
        let depth = pending.len();
        pending.extend(c.types().iter().rev());
        configs.push(c.clone());
        extend(kernel, root_type, n, pending, configs, out);
        configs.pop();
        pending.truncate(depth);
    }
    pending.push(t);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts() {
        let q = OffspringKernel::binary_critical();
        let counts: Vec<usize> = (1..=9).map(|n| all_trees(&q, 0, n).len()).collect();
        assert_eq!(counts, vec![1, 0, 1, 0, 2, 0, 5, 0, 14]);
    }

    #[test]
    fn mtdna_trees_distinct() {
        let q = OffspringKernel::mtdna(0.5, 0.5, 0.3).unwrap();
        let trees = all_trees(&q, 0, 5);
        let texts: std::collections::HashSet<String> = trees.iter().map(|t| t.to_text()).collect();
        assert_eq!(texts.len(), trees.len());
        assert!(trees.iter().all(|t| t.size() == 5));
    }
}
