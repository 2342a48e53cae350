use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::ScalingFamily;
use crate::measures::{ConnectionKernel, ProbVector};

/// The triple (colour law, connection kernel, scaling family).
#[derive(Clone, Debug, PartialEq)]
pub struct GraphModel {
    colour_law: ProbVector,
    kernel: ConnectionKernel,
    family: ScalingFamily,
}

impl GraphModel {
    pub fn new(colour_law: ProbVector, kernel: ConnectionKernel, family: ScalingFamily) -> Result<Self> {
        if colour_law.alphabet() != kernel.alphabet() {
            return Err(Error::invalid("colour law and kernel use different alphabets"));
        }
        if !colour_law.is_strictly_positive() {
            return Err(Error::invalid("colour law must be strictly positive"));
        }
        Ok(Self { colour_law, kernel, family })
    }

    pub fn colour_law(&self) -> &ProbVector {
        &self.colour_law
    }

    pub fn kernel(&self) -> &ConnectionKernel {
        &self.kernel
    }

    pub fn family(&self) -> &ScalingFamily {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.colour_law.len()
    }

    /// The law of the graph on `n` vertices, with
    /// `p_n(a,b) = min(1, a_n · C(a,b))`.
    pub fn law(&self, n: usize) -> Result<GraphLaw> {
        let a_n = self.family.a_n(n as u64)?;
        let k = self.k();
        let mut p = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                p[a * k + b] = (a_n * self.kernel.get(a, b)).min(1.0);
            }
        }
        GraphLaw::new(n, a_n, self.colour_law.clone(), p)
    }
}

/// A coloured random graph law at a fixed size: colour law plus a symmetric
/// table of connection probabilities. Tilted laws are also of this form.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphLaw {
    n: usize,
    a_n: f64,
    colour_law: ProbVector,
    p: Vec<f64>,
}

impl GraphLaw {
    pub fn new(n: usize, a_n: f64, colour_law: ProbVector, p: Vec<f64>) -> Result<Self> {
        let k = colour_law.len();
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        if p.len() != k * k {
            return Err(Error::ShapeMismatch { expected: k * k, got: p.len() });
        }
        if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::invalid("connection probabilities must lie in [0,1]"));
        }
        for a in 0..k {
            for b in 0..a {
                if p[a * k + b] != p[b * k + a] {
                    return Err(Error::invalid("connection probabilities must be symmetric"));
                }
            }
        }
        Ok(Self { n, a_n, colour_law, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_n(&self) -> f64 {
        self.a_n
    }

    pub fn k(&self) -> usize {
        self.colour_law.len()
    }

    pub fn colour_law(&self) -> &ProbVector {
        &self.colour_law
    }

    pub fn p(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.k() + b]
    }

    pub fn p_table(&self) -> &[f64] {
        &self.p
    }
}

/// `n` coloured vertices and a simple undirected edge set, each edge stored
/// as `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredGraph {
    k: usize,
    colours: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl ColouredGraph {
    pub fn new(k: usize, colours: Vec<usize>, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = colours.len();
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        if let Some(c) = colours.iter().find(|&&c| c >= k) {
            return Err(Error::invalid(format!("colour index {c} out of range for k = {k}")));
        }
        if let Some(e) = edges.iter().find(|(u, v)| u >= v || *v >= n) {
            return Err(Error::invalid(format!("bad edge {e:?}")));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate edge"));
        }
        Ok(Self { k, colours, edges })
    }

    pub fn n(&self) -> usize {
        self.colours.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn colours(&self) -> &[usize] {
        &self.colours
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn colour_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.k];
        for &c in &self.colours {
            counts[c] += 1;
        }
        counts
    }

    /// Edge counts per unordered colour class, indexed `[min(a,b) * k + max(a,b)]`.
    pub fn edge_class_counts(&self) -> Vec<u64> {
        let k = self.k;
        let mut counts = vec![0u64; k * k];
        for &(u, v) in &self.edges {
            let (a, b) = (self.colours[u], self.colours[v]);
            counts[a.min(b) * k + a.max(b)] += 1;
        }
        counts
    }

    /// Whether `(u, v)`, `u < v`, is an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }
}

/// Draws a colour index from `weights` by inversion.
pub(crate) fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left u ≥ Σw; take the last symbol with positive weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Number of failures before the first success in Bernoulli(p) trials.
fn geometric_skip<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    (u.ln() / (-p).ln_1p()).floor()
}

/// Samples a coloured graph from `law`.
///
/// Colours are i.i.d. from the colour law. For each vertex `u` and each
/// colour class `b`, the later vertices of colour `b` are linked to `u`
/// independently with probability `p(colour(u), b)`; the successes are found
/// by geometric skipping, which is exact and costs `O(n·k + |E|)` rather
/// than one draw per pair.
pub fn sample_graph<R: Rng + ?Sized>(law: &GraphLaw, rng: &mut R) -> ColouredGraph {
    let n = law.n();
    let k = law.k();
    let weights = law.colour_law().weights();
    let colours: Vec<usize> = (0..n).map(|_| sample_index(weights, rng)).collect();

    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &c) in colours.iter().enumerate() {
        classes[c].push(v);
    }
    // classes[b][cursor[b]..] are the vertices of colour b with index > u
    let mut cursor = vec![0usize; k];
    let mut edges = Vec::new();
    let mut row = Vec::new();
    for u in 0..n {
        let cu = colours[u];
        cursor[cu] += 1;
        row.clear();
        for b in 0..k {
            let later = &classes[b][cursor[b]..];
            let p = law.p(cu, b);
            if later.is_empty() || p <= 0.0 {
                continue;
            }
            if p >= 1.0 {
                row.extend_from_slice(later);
                continue;
            }
            let mut i = 0usize;
            loop {
                let skip = geometric_skip(p, rng);
                if skip >= (later.len() - i) as f64 {
                    break;
                }
                i += skip as usize;
                row.push(later[i]);
                i += 1;
                if i >= later.len() {
                    break;
                }
            }
        }
        row.sort_unstable();
        edges.extend(row.iter().map(|&v| (u, v)));
    }
    ColouredGraph { k, colours, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Alphabet;
    use crate::rng::rng_from_seed;

    fn model(c: f64, family: ScalingFamily) -> GraphModel {
        let al = Alphabet::new(["a", "b"]).unwrap();
        GraphModel::new(
            ProbVector::new(al.clone(), vec![0.6, 0.4]).unwrap(),
            ConnectionKernel::constant(al, c).unwrap(),
            family,
        )
        .unwrap()
    }

    #[test]
    fn zero_kernel_gives_no_edges() {
        let law = model(0.0, ScalingFamily::Sparse).law(200).unwrap();
        let g = sample_graph(&law, &mut rng_from_seed(1));
        assert!(g.edges().is_empty());
    }

    #[test]
    fn saturated_kernel_gives_complete_graph() {
        let law = model(1e9, ScalingFamily::Sparse).law(30).unwrap();
        let g = sample_graph(&law, &mut rng_from_seed(2));
        assert_eq!(g.edges().len(), 30 * 29 / 2);
    }

    #[test]
    fn deterministic_given_seed() {
        let law = model(3.0, ScalingFamily::Sparse).law(500).unwrap();
        let a = sample_graph(&law, &mut rng_from_seed(7));
        let b = sample_graph(&law, &mut rng_from_seed(7));
        assert_eq!(a, b);
    }

    #[test]
    fn edge_count_matches_exact_expectation() {
        // E|E| = Σ_{u<v} p_n = (n(n−1)/2) Σ μ(a) p(a,b) μ(b) for constant p;
        // Var|E| ≤ E|E| + colour fluctuation, both tiny against the 3σ band.
        let n = 10_000;
        let law = model(1.0, ScalingFamily::Sparse).law(n).unwrap();
        let p = 1.0 / n as f64;
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        let g = sample_graph(&law, &mut rng_from_seed(11));
        let e = g.edges().len() as f64;
        assert!((e - mean).abs() < 3.0 * sd, "edges {e} vs mean {mean} ± {sd}");
    }

    #[test]
    fn graph_validation() {
        assert!(ColouredGraph::new(2, vec![0, 1], vec![(1, 0)]).is_err());
        assert!(ColouredGraph::new(2, vec![0, 1], vec![(0, 1), (0, 1)]).is_err());
        assert!(ColouredGraph::new(2, vec![0, 2], vec![]).is_err());
        assert!(ColouredGraph::new(2, vec![], vec![]).is_err());
        let g = ColouredGraph::new(2, vec![0, 1, 1], vec![(1, 2), (0, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
    }
}
