use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tree::OffspringConfig;

/// A finite rooted planar tree with typed vertices, stored in preorder.
/// Vertex 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedTree {
    k: usize,
    types: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl TypedTree {
    /// The single-vertex tree.
    pub fn leaf(k: usize, root_type: usize) -> Result<Self> {
        Self::from_preorder_configs(k, root_type, &[OffspringConfig::leaf()])
    }

    /// Rebuilds a tree from the root type and the configuration of every
    /// vertex in preorder. The configurations determine the child types, so
    /// the sequence is self-delimiting; it must describe exactly one tree.
    pub fn from_preorder_configs(k: usize, root_type: usize, configs: &[OffspringConfig]) -> Result<Self> {
        if root_type >= k {
            return Err(Error::invalid(format!("root type {root_type} out of range")));
        }
        let n = configs.len();
        let mut types = Vec::with_capacity(n);
        let mut children = vec![Vec::new(); n];
        // (type, parent) of vertices not yet visited, next one on top
        let mut pending: Vec<(usize, Option<usize>)> = vec![(root_type, None)];
        for (v, c) in configs.iter().enumerate() {
            let Some((t, parent)) = pending.pop() else {
                return Err(Error::invalid("configuration sequence continues past a complete tree"));
            };
            if let Some(bad) = c.types().iter().find(|&&t| t >= k) {
                return Err(Error::invalid(format!("child type {bad} out of range")));
            }
            types.push(t);
            if let Some(p) = parent {
                children[p].push(v);
            }
            pending.extend(c.types().iter().rev().map(|&ct| (ct, Some(v))));
        }
        if !pending.is_empty() {
            return Err(Error::invalid("configuration sequence ends before the tree is complete"));
        }
        Ok(Self { k, types, children })
    }

    /// Number of vertices `|T|`.
    pub fn size(&self) -> usize {
        self.types.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root_type(&self) -> usize {
        self.types[0]
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `C(v)`, the ordered child types of `v`.
    pub fn config(&self, v: usize) -> OffspringConfig {
        OffspringConfig(self.children[v].iter().map(|&c| self.types[c]).collect())
    }

    /// `(type, config)` for every vertex in preorder.
    pub fn configs(&self) -> impl Iterator<Item = (usize, OffspringConfig)> + '_ {
        (0..self.size()).map(|v| (self.types[v], self.config(v)))
    }

    /// Preorder text form `type(child child …)`; leaves are bare indices.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(3 * self.size());
        // entries: Some(v) to open v, None to close a parenthesis
        let mut stack: Vec<Option<usize>> = vec![Some(0)];
        let mut need_space = false;
        while let Some(item) = stack.pop() {
            match item {
                Some(v) => {
                    if need_space {
                        out.push(' ');
                    }
                    let _ = write!(out, "{}", self.types[v]);
                    if self.children[v].is_empty() {
                        need_space = true;
                    } else {
                        out.push('(');
                        need_space = false;
                        stack.push(None);
                        stack.extend(self.children[v].iter().rev().map(|&c| Some(c)));
                    }
                }
                None => {
                    out.push(')');
                    need_space = true;
                }
            }
        }
        out
    }

    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let bytes = text.trim().as_bytes();
        let mut pos = 0;
        let mut root_type = None;
        let mut configs: Vec<OffspringConfig> = Vec::new();
        // indices into `configs` of the vertices whose child lists are open
        let mut open: Vec<usize> = Vec::new();
        let mut last: Option<usize> = None;
        let err = |msg: &str, at: usize| Error::parse(format!("tree text at byte {at}: {msg}"));
        while pos < bytes.len() {
            match bytes[pos] {
                b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
                b'0'..=b'9' => {
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let t: usize = std::str::from_utf8(&bytes[start..pos])
                        .expect("ascii digits")
                        .parse()
                        .map_err(|_| err("type index too large", start))?;
                    if t >= k {
                        return Err(err("type index out of range", start));
                    }
                    match open.last() {
                        Some(&p) => configs[p].0.push(t),
                        None if root_type.is_none() => root_type = Some(t),
                        None => return Err(err("more than one root", start)),
                    }
                    configs.push(OffspringConfig::leaf());
                    last = Some(configs.len() - 1);
                }
                b'(' => {
                    let v = last.take().ok_or_else(|| err("'(' must follow a type", pos))?;
                    if !configs[v].is_empty() {
                        return Err(err("vertex has two child lists", pos));
                    }
                    open.push(v);
                    pos += 1;
                }
                b')' => {
                    let v = open.pop().ok_or_else(|| err("unbalanced ')'", pos))?;
                    if configs[v].is_empty() {
                        return Err(err("empty child list", pos));
                    }
                    last = None;
                    pos += 1;
                }
                _ => return Err(err("unexpected character", pos)),
            }
        }
        if !open.is_empty() {
            return Err(err("unclosed '('", pos));
        }
        let root_type = root_type.ok_or_else(|| Error::parse("empty tree text"))?;
        Self::from_preorder_configs(k, root_type, &configs)
    }
}
