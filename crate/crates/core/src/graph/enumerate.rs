use crate::graph::ColouredGraph;

/// Every coloured graph on `n` vertices with `k` colours, `k^n · 2^{n(n−1)/2}`
/// in total. Only sensible for tiny `n`.
pub fn all_coloured_graphs(n: usize, k: usize) -> impl Iterator<Item = ColouredGraph> {
    assert!(n >= 1 && k >= 1);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(pairs.len() < 32, "too many pairs to enumerate");
    let colourings = (k as u64).pow(n as u32);
    let subsets = 1u64 << pairs.len();
    (0..colourings).flat_map(move |ci| {
        let mut colours = vec![0usize; n];
        let mut rest = ci;
        for c in colours.iter_mut() {
            *c = (rest % k as u64) as usize;
            rest /= k as u64;
        }
        let pairs = pairs.clone();
        (0..subsets).map(move |mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            ColouredGraph::new(k, colours.clone(), edges).expect("enumerated graph is valid")
        })
    })
}
