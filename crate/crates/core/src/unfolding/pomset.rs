use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::canon::canonical_form;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("the relation has a cycle through vertex {0}")]
    Cyclic(usize),
}

/// A labelled partial order, stored as its strict part (transitively closed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lpo {
    labels: Vec<String>,
    less: Vec<Vec<bool>>,
}

impl Lpo {
    /// Closes `pairs` (read as `u < v`) transitively. Reflexive pairs are
    /// ignored; any other cycle is rejected.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = labels.len();
        let mut less = vec![vec![false; n]; n];
        for &(u, v) in pairs {
            if u >= n {
                return Err(OrderError::OutOfRange(u));
            }
            if v >= n {
                return Err(OrderError::OutOfRange(v));
            }
            if u != v {
                less[u][v] = true;
            }
        }
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    for j in 0..n {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| less[i][i]) {
            return Err(OrderError::Cyclic(i));
        }
        Ok(Lpo { labels, less })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Strict order `u < v`.
    pub fn less(&self, u: usize, v: usize) -> bool {
        self.less[u][v]
    }

    /// Reflexive order `u ≤ v`.
    pub fn leq(&self, u: usize, v: usize) -> bool {
        u == v || self.less[u][v]
    }

    /// Covering pairs (the Hasse diagram).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if self.less[u][v] && !(0..n).any(|w| self.less[u][w] && self.less[w][v]) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// The isomorphism class of a labelled partial order, in canonical form:
/// events numbered canonically, order given by its covering pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pomset {
    labels: Vec<String>,
    covers: Vec<(usize, usize)>,
}

/// Canonical form of an LPO; equal for two LPOs iff they are isomorphic.
pub fn canonicalize(o: &Lpo) -> Pomset {
    let g = canonical_form(&o.labels, &o.covers());
    Pomset {
        labels: g.labels,
        covers: g.edges,
    }
}

impl Pomset {
    pub fn empty() -> Self {
        Pomset {
            labels: Vec::new(),
            covers: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn to_lpo(&self) -> Lpo {
        Lpo::new(self.labels.clone(), &self.covers).expect("canonical pomsets are acyclic")
    }

    /// Whether some event labelled `x` is strictly below some event labelled `y`.
    pub fn orders(&self, x: &str, y: &str) -> bool {
        let lpo = self.to_lpo();
        (0..self.len()).any(|u| {
            lpo.label(u) == x && (0..self.len()).any(|v| lpo.label(v) == y && lpo.less(u, v))
        })
    }

    /// One line per event and one per covering pair, tab separated.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("event\te{}\t{l}\n", i + 1));
        }
        for (u, v) in &self.covers {
            out.push_str(&format!("order\te{}\te{}\n", u + 1, v + 1));
        }
        out
    }
}

impl Ord for Pomset {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.labels.len(), &self.labels, &self.covers).cmp(&(
            other.labels.len(),
            &other.labels,
            &other.covers,
        ))
    }
}

impl PartialOrd for Pomset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pomset {
    /// `events: e1:a e2:c e3:b` then `order: e1<e3 e2<e3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("events:")?;
        for (i, l) in self.labels.iter().enumerate() {
            write!(f, " e{}:{l}", i + 1)?;
        }
        f.write_str("\norder:")?;
        for (u, v) in &self.covers {
            write!(f, " e{}<e{}", u + 1, v + 1)?;
        }
        Ok(())
    }
}
