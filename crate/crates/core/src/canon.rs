//! Canonical forms of small vertex-labelled directed graphs.
//!
//! Colour refinement (label, then multisets of successor and predecessor
//! colours) followed by individualisation with backtracking. Every leaf of
//! the search is a discrete colouring; the canonical form is the
//! lexicographically least relabelled edge list over all leaves. Vertices of
//! a cell with identical in- and out-neighbourhoods are interchangeable, so
//! only one of them is individualised, and a cell made only of such twins is
//! split in one go.
//!
//! Exact at any size, cheap on the graphs this crate produces (posets of a
//! few dozen vertices with few symmetries).

use std::collections::BTreeSet;

/// The canonical form of a labelled digraph: vertex labels in canonical
/// order and the edge list relabelled and sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalGraph<L> {
    pub labels: Vec<L>,
    pub edges: Vec<(usize, usize)>,
}

/// Encoded edge list of a leaf and the vertex order producing it.
type Leaf = (Vec<(usize, usize)>, Vec<usize>);

struct Search<'a> {
    out: Vec<BTreeSet<usize>>,
    inc: Vec<BTreeSet<usize>>,
    edges: &'a [(usize, usize)],
    best: Option<Leaf>,
}

fn distinct(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

impl Search<'_> {
    fn refine(&self, colors: &mut [usize]) {
        let mut count = distinct(colors);
        loop {
            let sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..colors.len())
                .map(|v| {
                    let mut o: Vec<usize> = self.out[v].iter().map(|&w| colors[w]).collect();
                    let mut i: Vec<usize> = self.inc[v].iter().map(|&w| colors[w]).collect();
                    o.sort_unstable();
                    i.sort_unstable();
                    (colors[v], o, i)
                })
                .collect();
            let mut uniq: Vec<&(usize, Vec<usize>, Vec<usize>)> = sigs.iter().collect();
            uniq.sort();
            uniq.dedup();
            for (v, sig) in sigs.iter().enumerate() {
                colors[v] = uniq.binary_search(&sig).expect("signature present");
            }
            let now = uniq.len();
            if now == count {
                break;
            }
            count = now;
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        self.out[u] == self.out[v] && self.inc[u] == self.inc[v]
    }

    fn leaf(&mut self, colors: &[usize]) {
        let mut enc: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (colors[u], colors[v]))
            .collect();
        enc.sort_unstable();
        enc.dedup();
        let better = match &self.best {
            None => true,
            Some((b, _)) => enc < *b,
        };
        if better {
            let mut order = vec![0; colors.len()];
            for (v, &c) in colors.iter().enumerate() {
                order[c] = v;
            }
            self.best = Some((enc, order));
        }
    }

    fn search(&mut self, mut colors: Vec<usize>) {
        self.refine(&mut colors);
        let n = colors.len();
        let mut cell_sizes = vec![0usize; n];
        for &c in &colors {
            cell_sizes[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| cell_sizes[c] > 1) else {
            self.leaf(&colors);
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        if cell.iter().all(|&v| self.twins(cell[0], v)) {
            // Every order of a cell of twins is related by an automorphism.
            let mut next: Vec<usize> = colors.iter().map(|&c| c * n).collect();
            for (rank, &v) in cell.iter().enumerate() {
                next[v] += rank;
            }
            self.search(next);
            return;
        }
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let next: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(w, &c)| {
                    if w == v {
                        2 * c
                    } else {
                        2 * c + 1
                    }
                })
                .collect();
            self.search(next);
        }
    }
}

/// Canonical vertex order: `order[i]` is the original vertex placed at
/// position `i`. Two labelled digraphs are isomorphic iff relabelling by
/// their canonical orders yields identical label sequences and edge sets.
pub fn canonical_order<L: Ord>(labels: &[L], edges: &[(usize, usize)]) -> Vec<usize> {
    let n = labels.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = vec![BTreeSet::new(); n];
    let mut inc = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        out[u].insert(v);
        inc[v].insert(u);
    }
    let mut sorted: Vec<&L> = labels.iter().collect();
    sorted.sort();
    sorted.dedup();
    let colors: Vec<usize> = labels
        .iter()
        .map(|l| sorted.binary_search(&l).expect("label present"))
        .collect();
    let mut search = Search {
        out,
        inc,
        edges,
        best: None,
    };
    search.search(colors);
    search.best.expect("search reaches a leaf").1
}

pub fn canonical_form<L: Ord + Clone>(labels: &[L], edges: &[(usize, usize)]) -> CanonicalGraph<L> {
    let order = canonical_order(labels, edges);
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut e: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (pos[u], pos[v])).collect();
    e.sort_unstable();
    e.dedup();
    CanonicalGraph {
        labels: order.iter().map(|&v| labels[v].clone()).collect(),
        edges: e,
    }
}
