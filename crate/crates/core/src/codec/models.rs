use std::fmt::Write as _;

use crate::codec::range::{BitString, Decoder, Encoder, FreqTable, TOTAL};
use crate::error::{Error, Result};
use crate::graph::{ColouredGraph, GraphLaw};
use crate::measures::ProbVector;
use crate::tree::{OffspringKernel, TypedTree};

/// Rounds probabilities to multiples of `2^-32`. Every positive probability
/// keeps at least one quantum; the rounding surplus or deficit is settled on
/// the largest entry so the table sums to exactly `2^32`.
pub fn quantize(p: &[f64]) -> Result<FreqTable> {
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::invalid("probabilities must be finite and nonnegative"));
    }
    let mut q: Vec<u64> = p
        .iter()
        .map(|&x| if x > 0.0 { ((x * TOTAL as f64).round() as u64).clamp(1, TOTAL) } else { 0 })
        .collect();
    let sum: u64 = q.iter().sum();
    let (imax, _) = q
        .iter()
        .enumerate()
        .max_by_key(|(_, v)| **v)
        .ok_or_else(|| Error::invalid("empty distribution"))?;
    if sum == 0 {
        return Err(Error::invalid("distribution has no mass"));
    }
    if sum > TOTAL {
        let excess = sum - TOTAL;
        if q[imax] <= excess {
            return Err(Error::invalid("cannot quantize: too many tiny probabilities"));
        }
        q[imax] -= excess;
    } else {
        q[imax] += TOTAL - sum;
    }
    FreqTable::new(&q)
}

fn f64_list(out: &mut String, v: &[f64]) {
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:?}");
    }
    out.push('\n');
}

/// The coding model for graphs on `n` vertices: colour table plus one
/// Bernoulli table per colour pair.
pub struct GraphCoder {
    n: usize,
    k: usize,
    colours: FreqTable,
    pairs: Vec<FreqTable>,
    description: String,
}

impl GraphCoder {
    pub fn new(law: &GraphLaw) -> Result<Self> {
        let k = law.k();
        let colours = quantize(law.colour_law().weights())?;
        let pairs = law.p_table().iter().map(|&p| quantize(&[1.0 - p, p])).collect::<Result<Vec<_>>>()?;
        let mut description = format!("graph\nn {}\nk {k}\nmu ", law.n());
        f64_list(&mut description, law.colour_law().weights());
        description.push_str("p ");
        f64_list(&mut description, law.p_table());
        Ok(Self { n: law.n(), k, colours, pairs, description })
    }

    /// Text that identifies the model exactly; hashed into containers.
    pub fn description(&self) -> &str {
        &self.description
    }

    /// Colours in vertex order, then every pair `u < v` in lexicographic
    /// order as an edge/non-edge bit.
    pub fn encode(&self, x: &ColouredGraph) -> Result<BitString> {
        if x.n() != self.n || x.k() != self.k {
            return Err(Error::ModelMismatch(format!(
                "graph has n = {}, k = {}; model has n = {}, k = {}",
                x.n(),
                x.k(),
                self.n,
                self.k
            )));
        }
        let mut enc = Encoder::new();
        let colours = x.colours();
        for &c in colours {
            enc.encode(&self.colours, c)?;
        }
        let mut edges = x.edges().iter().peekable();
        for u in 0..self.n {
            let row = &self.pairs[colours[u] * self.k..(colours[u] + 1) * self.k];
            for v in u + 1..self.n {
                let present = edges.peek() == Some(&&(u, v));
                if present {
                    edges.next();
                }
                enc.encode(&row[colours[v]], present as usize)?;
            }
        }
        Ok(enc.finish())
    }

    pub fn decode(&self, bits: &BitString) -> Result<ColouredGraph> {
        let mut dec = Decoder::new(bits);
        let colours = (0..self.n).map(|_| dec.decode(&self.colours)).collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for u in 0..self.n {
            let row = &self.pairs[colours[u] * self.k..(colours[u] + 1) * self.k];
            for v in u + 1..self.n {
                if dec.decode(&row[colours[v]])? == 1 {
                    edges.push((u, v));
                }
            }
        }
        dec.finish(bits)?;
        ColouredGraph::new(self.k, colours, edges)
    }
}

pub fn encode_graph(x: &ColouredGraph, law: &GraphLaw) -> Result<BitString> {
    GraphCoder::new(law)?.encode(x)
}

pub fn decode_graph(bits: &BitString, law: &GraphLaw) -> Result<ColouredGraph> {
    GraphCoder::new(law)?.decode(bits)
}

/// Default bound on decoded tree size, guarding against streams that do not
/// terminate under the model.
pub const TREE_DECODE_CAP: usize = 1 << 26;

/// The coding model for trees: root type under `μ`, then each vertex's
/// configuration in preorder under `Q{·|type}`. Trees are coded
/// unconditionally, so the stream delimits itself.
pub struct TreeCoder {
    k: usize,
    root: FreqTable,
    rows: Vec<FreqTable>,
    configs: Vec<Vec<crate::tree::OffspringConfig>>,
    kernel: OffspringKernel,
    description: String,
}

impl TreeCoder {
    pub fn new(mu: &ProbVector, kernel: &OffspringKernel) -> Result<Self> {
        let k = kernel.k();
        if mu.len() != k {
            return Err(Error::ShapeMismatch { expected: k, got: mu.len() });
        }
        let root = quantize(mu.weights())?;
        let mut rows = Vec::with_capacity(k);
        let mut configs = Vec::with_capacity(k);
        for a in 0..k {
            let row = kernel.row(a);
            rows.push(quantize(&row.iter().map(|(_, p)| *p).collect::<Vec<_>>())?);
            configs.push(row.iter().map(|(c, _)| c.clone()).collect());
        }
        let mut description = String::from("tree\nmu ");
        f64_list(&mut description, mu.weights());
        description.push_str(&kernel.to_text());
        Ok(Self { k, root, rows, configs, kernel: kernel.clone(), description })
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn encode(&self, t: &TypedTree) -> Result<BitString> {
        if t.k() != self.k {
            return Err(Error::ModelMismatch(format!("tree has k = {}, model has k = {}", t.k(), self.k)));
        }
        let mut enc = Encoder::new();
        enc.encode(&self.root, t.root_type())?;
        for (a, c) in t.configs() {
            let i = self.configs[a]
                .iter()
                .position(|x| *x == c)
                .ok_or_else(|| Error::ModelMismatch(format!("configuration {c} not in the kernel of type {a}")))?;
            enc.encode(&self.rows[a], i)?;
        }
        Ok(enc.finish())
    }

    pub fn decode(&self, bits: &BitString) -> Result<TypedTree> {
        self.decode_capped(bits, TREE_DECODE_CAP)
    }

    pub fn decode_capped(&self, bits: &BitString, max_vertices: usize) -> Result<TypedTree> {
        let mut dec = Decoder::new(bits);
        let root = dec.decode(&self.root)?;
        let mut pending = vec![root];
        let mut configs = Vec::new();
        while let Some(a) = pending.pop() {
            if configs.len() == max_vertices {
                return Err(Error::invalid(format!("decoded tree exceeds {max_vertices} vertices")));
            }
            let c = &self.configs[a][dec.decode(&self.rows[a])?];
            pending.extend(c.types().iter().rev());
            configs.push(c.clone());
        }
        dec.finish(bits)?;
        TypedTree::from_preorder_configs(self.k, root, &configs)
    }

    pub fn kernel(&self) -> &OffspringKernel {
        &self.kernel
    }
}

pub fn encode_tree(t: &TypedTree, mu: &ProbVector, kernel: &OffspringKernel) -> Result<BitString> {
    TreeCoder::new(mu, kernel)?.encode(t)
}

pub fn decode_tree(bits: &BitString, mu: &ProbVector, kernel: &OffspringKernel) -> Result<TypedTree> {
    TreeCoder::new(mu, kernel)?.decode(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{log_prob_graph, sample_graph, GraphModel, ScalingFamily};
    use crate::measures::{Alphabet, ConnectionKernel};
    use crate::rng::rng_from_seed;
    use crate::tree::{log_prob_tree, sample_tree_conditioned};

    #[test]
    fn quantization_invariants() {
        let t = quantize(&[0.5, 0.5]).unwrap();
        assert_eq!(t.freq(0), TOTAL / 2);
        let t = quantize(&[1e-15, 1.0 - 1e-15]).unwrap();
        assert_eq!(t.freq(0), 1);
        assert_eq!(t.freq(1), TOTAL - 1);
        let t = quantize(&[0.0, 1.0]).unwrap();
        assert_eq!(t.freq(0), 0);
        assert_eq!(t.certain(), Some(1));
        let t = quantize(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!((0..4).map(|s| t.freq(s)).sum::<u64>(), TOTAL);
    }

    #[test]
    fn deterministic_graph_model_costs_one_bit() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let law = GraphLaw::new(
            20,
            0.1,
            ProbVector::new(al, vec![1.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let x = sample_graph(&law, &mut rng_from_seed(1));
        let bits = encode_graph(&x, &law).unwrap();
        assert!(bits.len_bits() <= 2);
        assert_eq!(decode_graph(&bits, &law).unwrap(), x);
    }

    #[test]
    fn graph_round_trip_and_length() {
        let al = Alphabet::new(["a", "b", "c"]).unwrap();
        let model = GraphModel::new(
            ProbVector::new(al.clone(), vec![0.2, 0.3, 0.5]).unwrap(),
            ConnectionKernel::new(al, vec![1.0, 2.0, 0.5, 2.0, 3.0, 1.0, 0.5, 1.0, 4.0]).unwrap(),
            ScalingFamily::LogNOverN,
        )
        .unwrap();
        let mut rng = rng_from_seed(5);
        for n in [1, 2, 10, 60] {
            let law = model.law(n).unwrap();
            let coder = GraphCoder::new(&law).unwrap();
            for _ in 0..10 {
                let x = sample_graph(&law, &mut rng);
                let bits = coder.encode(&x).unwrap();
                assert_eq!(coder.decode(&bits).unwrap(), x);
                let ideal = -log_prob_graph(&x, &law).unwrap() / std::f64::consts::LN_2;
                let excess = bits.len_bits() as f64 - ideal;
                assert!(excess > -1e-3 && excess < 4.0, "excess {excess}");
            }
        }
    }

    #[test]
    fn graph_model_mismatch() {
        let al = Alphabet::new(["a"]).unwrap();
        let law = GraphLaw::new(3, 0.1, ProbVector::new(al, vec![1.0]).unwrap(), vec![0.0]).unwrap();
        let x = ColouredGraph::new(1, vec![0; 3], vec![(0, 1)]).unwrap();
        assert!(matches!(encode_graph(&x, &law), Err(Error::ModelMismatch(_))));
    }

    #[test]
    fn tree_round_trip() {
        let q = OffspringKernel::mtdna(0.5, 0.5, 0.3).unwrap();
        let mu = ProbVector::new(q.alphabet().clone(), vec![1.0, 0.0]).unwrap();
        let coder = TreeCoder::new(&mu, &q).unwrap();
        let mut rng = rng_from_seed(8);
        for n in [1, 3, 21, 101] {
            let t = sample_tree_conditioned(n, &mu, &q, 1_000_000, &mut rng).unwrap().tree;
            let bits = coder.encode(&t).unwrap();
            assert_eq!(coder.decode(&bits).unwrap(), t);
            let ideal = -log_prob_tree(&t, &mu, &q).unwrap() / std::f64::consts::LN_2;
            let excess = bits.len_bits() as f64 - ideal;
            assert!(excess > -1e-3 && excess < 4.0, "excess {excess}");
        }
    }

    #[test]
    fn truncated_tree_stream_detected() {
        let q = OffspringKernel::binary_critical();
        let mu = ProbVector::new(q.alphabet().clone(), vec![1.0]).unwrap();
        let t = sample_tree_conditioned(101, &mu, &q, 1_000_000, &mut rng_from_seed(3)).unwrap().tree;
        let bits = encode_tree(&t, &mu, &q).unwrap();
        // drop all but the first byte: the decoded tree cannot be the original
        let short = BitString::new(8, bits.bytes()[..1].to_vec()).unwrap();
        match decode_tree(&short, &mu, &q) {
            Err(Error::TruncatedStream) => {}
            Ok(other) => assert_ne!(other, t),
            Err(e) => panic!("unexpected {e}"),
        }
    }
}
