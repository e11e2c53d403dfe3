use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Partition of `n` nodes into `k` non-empty clusters labelled `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl ClusterAssignment {
    /// Builds an assignment from arbitrary integer labels. Labels are compacted
    /// to `0..k` preserving their numeric order, so every cluster is non-empty.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let distinct: BTreeSet<usize> = labels.iter().copied().collect();
        let remap: HashMap<usize, usize> = distinct
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let labels: Vec<usize> = labels.iter().map(|l| remap[l]).collect();
        let k = distinct.len();
        let mut sizes = vec![0; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        Self { labels, k, sizes }
    }

    /// Single cluster containing every node.
    pub fn single(n: usize) -> Self {
        Self::from_labels(vec![0; n])
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_min(&self) -> usize {
        self.sizes.iter().copied().min().unwrap_or(0)
    }

    pub fn n_max(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Node indices of each cluster, each list increasing.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (u, &l) in self.labels.iter().enumerate() {
            out[l].push(u);
        }
        out
    }

    /// Parses a `node<TAB>label` file against the graph's node identifiers.
    /// Label strings are ordered lexicographically to obtain cluster indices.
    pub fn parse_label_file(text: &str, node_ids: &[String]) -> Result<Self> {
        let index: HashMap<&str, usize> = node_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut raw: Vec<Option<&str>> = vec![None; node_ids.len()];
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 2 fields, found {}", fields.len()),
                });
            }
            let &u = index.get(fields[0]).ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("unknown node '{}'", fields[0]),
            })?;
            if raw[u].is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("node '{}' labelled twice", fields[0]),
                });
            }
            raw[u] = Some(fields[1]);
        }
        if let Some(missing) = raw.iter().position(Option::is_none) {
            return Err(Error::InvalidArgument(format!(
                "label file does not cover node '{}'",
                node_ids[missing]
            )));
        }
        let names: BTreeMap<&str, usize> = raw
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Ok(Self::from_labels(
            raw.iter().map(|s| names[s.unwrap()]).collect(),
        ))
    }

    /// Writes the assignment as `node<TAB>label` lines in node order.
    pub fn to_label_file(&self, node_ids: &[String]) -> String {
        let mut out = String::new();
        for (id, l) in node_ids.iter().zip(&self.labels) {
            out.push_str(id);
            out.push('\t');
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

impl From<Vec<usize>> for ClusterAssignment {
    fn from(labels: Vec<usize>) -> Self {
        Self::from_labels(labels)
    }
}

impl From<ClusterAssignment> for Vec<usize> {
    fn from(a: ClusterAssignment) -> Self {
        a.labels
    }
}
