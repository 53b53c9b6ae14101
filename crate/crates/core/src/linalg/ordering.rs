//! Symmetric fill-reducing orderings computed on the pattern of `A + Aᵀ`.

use std::collections::VecDeque;

use super::sparse::SparseMatrix;

/// Subgraphs at or below this size are not dissected further.
const LEAF_SIZE: usize = 48;

/// Undirected adjacency structure without self loops.
#[derive(Debug, Clone)]
pub struct Graph {
    xadj: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Pattern graph of `A + Aᵀ` for a square matrix.
    pub fn from_matrix(a: &SparseMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "ordering needs a square matrix");
        let n = a.nrows();
        let mut deg = vec![0usize; n + 1];
        for i in 0..n {
            for &j in a.row(i).0 {
                if i != j {
                    deg[i + 1] += 1;
                    deg[j + 1] += 1;
                }
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut next = deg.clone();
        let mut adj = vec![0usize; deg[n]];
        for i in 0..n {
            for &j in a.row(i).0 {
                if i != j {
                    adj[next[i]] = j;
                    next[i] += 1;
                    adj[next[j]] = i;
                    next[j] += 1;
                }
            }
        }
        // Sort and deduplicate each neighbour list.
        let mut xadj = Vec::with_capacity(n + 1);
        let mut out = Vec::with_capacity(adj.len());
        xadj.push(0);
        for i in 0..n {
            let nb = &mut adj[deg[i]..deg[i + 1]];
            nb.sort_unstable();
            let mut prev = usize::MAX;
            for &j in nb.iter() {
                if j != prev {
                    out.push(j);
                    prev = j;
                }
            }
            xadj.push(out.len());
        }
        Graph { xadj, adj: out }
    }

    pub fn len(&self) -> usize {
        self.xadj.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.xadj[v]..self.xadj[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }
}

/// Ordering used by the sparse LU: nested dissection on `A + Aᵀ`.
/// Entry `k` of the result is the original index placed at position `k`.
pub fn fill_reducing_order(a: &SparseMatrix) -> Vec<usize> {
    nested_dissection(&Graph::from_matrix(a))
}

/// Groups of vertices with identical closed neighbourhoods, together with
/// the quotient graph whose vertices are those groups.
///
/// Systems with several unknowns per mesh vertex have such groups of size
/// two or three; dissecting the quotient keeps them together and makes the
/// level structures much cheaper.
fn compress(g: &Graph) -> (Graph, Vec<Vec<usize>>) {
    let n = g.len();
    let key = |v: usize| -> (usize, usize) {
        let s: usize = g.neighbors(v).iter().fold(v, |acc, &w| acc.wrapping_add(w));
        (g.degree(v), s)
    };
    let same = |u: usize, v: usize| -> bool {
        if g.degree(u) != g.degree(v) || !g.neighbors(u).contains(&v) {
            return false;
        }
        let mut a: Vec<usize> = g.neighbors(u).iter().copied().filter(|&w| w != v).collect();
        let mut b: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| w != u).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    };
    let mut group_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if group_of[v] != usize::MAX {
            continue;
        }
        let id = groups.len();
        group_of[v] = id;
        let mut members = vec![v];
        let kv = key(v);
        for &w in g.neighbors(v) {
            if w > v && group_of[w] == usize::MAX && key(w) == kv && same(v, w) {
                group_of[w] = id;
                members.push(w);
            }
        }
        groups.push(members);
    }
    let mut xadj = vec![0usize];
    let mut adj = Vec::new();
    let mut seen = vec![usize::MAX; groups.len()];
    for (id, members) in groups.iter().enumerate() {
        seen[id] = id;
        for &w in g.neighbors(members[0]) {
            let gw = group_of[w];
            if seen[gw] != id {
                seen[gw] = id;
                adj.push(gw);
            }
        }
        let start = *xadj.last().unwrap();
        adj[start..].sort_unstable();
        xadj.push(adj.len());
    }
    (Graph { xadj, adj }, groups)
}

/// Nested dissection driven by breadth-first level structures.
///
/// Vertices of very high degree (for instance a row tying every pressure
/// unknown together) are pulled out first and numbered last; they would
/// otherwise collapse every level structure to depth two.
pub fn nested_dissection(g: &Graph) -> Vec<usize> {
    let (quotient, groups) = compress(g);
    let weight: Vec<usize> = groups.iter().map(Vec::len).collect();
    let coarse = dissect_weighted(&quotient, &weight, g.len());
    coarse.into_iter().flat_map(|c| groups[c].iter().copied()).collect()
}

fn dissect_weighted(g: &Graph, weight: &[usize], total: usize) -> Vec<usize> {
    let n = g.len();
    let dense_cut = 16.max((10.0 * (total as f64).sqrt()) as usize);
    let mut nd = Dissector {
        g,
        weight,
        label: vec![0; n],
        stamp: vec![0; n],
        level: vec![0; n],
        clock: 0,
        next_label: 1,
        order: Vec::with_capacity(n),
    };
    let mut dense = Vec::new();
    let mut rest = Vec::with_capacity(n);
    for v in 0..n {
        let fine_degree: usize = g.neighbors(v).iter().map(|&w| weight[w]).sum();
        if fine_degree > dense_cut {
            nd.label[v] = usize::MAX;
            dense.push(v);
        } else {
            nd.label[v] = 1;
            rest.push(v);
        }
    }
    nd.next_label = 2;
    nd.dissect(rest, 1);
    nd.order.extend(dense);
    debug_assert_eq!(nd.order.len(), n);
    nd.order
}

struct Dissector<'a> {
    g: &'a Graph,
    weight: &'a [usize],
    label: Vec<usize>,
    stamp: Vec<usize>,
    level: Vec<usize>,
    clock: usize,
    next_label: usize,
    order: Vec<usize>,
}

impl Dissector<'_> {
    fn fresh_label(&mut self) -> usize {
        self.next_label += 1;
        self.next_label - 1
    }

    /// Breadth-first search from `root` inside subgraph `lab`; returns the
    /// visited vertices in BFS order and records levels.
    fn bfs(&mut self, root: usize, lab: usize) -> Vec<usize> {
        self.clock += 1;
        let clock = self.clock;
        let mut out = vec![root];
        self.stamp[root] = clock;
        self.level[root] = 0;
        let mut head = 0;
        while head < out.len() {
            let v = out[head];
            head += 1;
            for &w in self.g.neighbors(v) {
                if self.label[w] == lab && self.stamp[w] != clock {
                    self.stamp[w] = clock;
                    self.level[w] = self.level[v] + 1;
                    out.push(w);
                }
            }
        }
        out
    }

    fn restricted_degree(&self, v: usize, lab: usize) -> usize {
        self.g.neighbors(v).iter().filter(|&&w| self.label[w] == lab).count()
    }

    fn pseudo_peripheral(&mut self, start: usize, lab: usize) -> (usize, Vec<usize>) {
        let mut root = start;
        let mut visit = self.bfs(root, lab);
        let mut ecc = self.level[*visit.last().unwrap()];
        for _ in 0..8 {
            let last = self.level[*visit.last().unwrap()];
            let cand = visit
                .iter()
                .rev()
                .take_while(|&&v| self.level[v] == last)
                .copied()
                .min_by_key(|&v| (self.restricted_degree(v, lab), v))
                .unwrap();
            let trial = self.bfs(cand, lab);
            let e = self.level[*trial.last().unwrap()];
            if e <= ecc {
                // Restore levels for the accepted root.
                visit = self.bfs(root, lab);
                break;
            }
            root = cand;
            ecc = e;
            visit = trial;
        }
        (root, visit)
    }

    fn dissect(&mut self, nodes: Vec<usize>, lab: usize) {
        if nodes.iter().map(|&v| self.weight[v]).sum::<usize>() <= LEAF_SIZE {
            self.order.extend(nodes);
            return;
        }
        let (_, visit) = self.pseudo_peripheral(nodes[0], lab);
        if visit.len() < nodes.len() {
            // Disconnected: split off the component just found.
            let comp_lab = self.fresh_label();
            for &v in &visit {
                self.label[v] = comp_lab;
            }
            let rest: Vec<usize> = nodes.into_iter().filter(|&v| self.label[v] == lab).collect();
            self.dissect(visit, comp_lab);
            self.dissect(rest, lab);
            return;
        }
        let depth = self.level[*visit.last().unwrap()];
        if depth < 2 {
            self.order.extend(visit);
            return;
        }
        // Level whose cumulative count first reaches half the vertices.
        let mut counts = vec![0usize; depth + 1];
        let mut total = 0;
        for &v in &visit {
            counts[self.level[v]] += self.weight[v];
            total += self.weight[v];
        }
        let half = total / 2;
        let mut acc = 0;
        let mut cut = 1;
        for (l, c) in counts.iter().enumerate() {
            acc += c;
            if acc >= half {
                cut = l;
                break;
            }
        }
        let cut = cut.clamp(1, depth - 1);

        let la = self.fresh_label();
        let lb = self.fresh_label();
        let mut part_a = Vec::new();
        let mut part_b = Vec::new();
        let mut sep = Vec::new();
        for &v in &visit {
            let l = self.level[v];
            if l < cut {
                part_a.push(v);
            } else if l > cut {
                part_b.push(v);
            } else {
                let touches_next = self
                    .g
                    .neighbors(v)
                    .iter()
                    .any(|&w| self.label[w] == lab && self.level[w] == cut + 1 && self.stamp[w] == self.clock);
                if touches_next {
                    sep.push(v);
                } else {
                    part_a.push(v);
                }
            }
        }
        for &v in &part_a {
            self.label[v] = la;
        }
        for &v in &part_b {
            self.label[v] = lb;
        }
        for &v in &sep {
            self.label[v] = 0;
        }
        self.dissect(part_a, la);
        self.dissect(part_b, lb);
        self.order.extend(sep);
    }
}

/// Reverse Cuthill-McKee ordering; a bandwidth-reducing alternative to
/// nested dissection.
pub fn reverse_cuthill_mckee(g: &Graph) -> Vec<usize> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    for &start in &by_degree {
        if seen[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| !seen[w]).collect();
            nb.sort_by_key(|&w| (g.degree(w), w));
            for w in nb {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::Triplets;

    fn grid_laplacian(k: usize) -> SparseMatrix {
        let n = k * k;
        let mut t = Triplets::new(n, n);
        for j in 0..k {
            for i in 0..k {
                let v = j * k + i;
                t.push(v, v, 4.0);
                if i + 1 < k {
                    t.push(v, v + 1, -1.0);
                    t.push(v + 1, v, -1.0);
                }
                if j + 1 < k {
                    t.push(v, v + k, -1.0);
                    t.push(v + k, v, -1.0);
                }
            }
        }
        t.build()
    }

    fn is_permutation(p: &[usize], n: usize) -> bool {
        let mut s = p.to_vec();
        s.sort_unstable();
        s == (0..n).collect::<Vec<_>>()
    }

    #[test]
    fn nd_is_permutation() {
        let a = grid_laplacian(30);
        let p = fill_reducing_order(&a);
        assert!(is_permutation(&p, 900));
    }

    #[test]
    fn rcm_is_permutation() {
        let a = grid_laplacian(17);
        assert!(is_permutation(&reverse_cuthill_mckee(&Graph::from_matrix(&a)), 289));
    }

    #[test]
    fn dense_row_goes_last() {
        let k = 20;
        let n = k * k + 1;
        let base = grid_laplacian(k);
        let mut t = Triplets::new(n, n);
        for i in 0..k * k {
            let (c, v) = base.row(i);
            for (&j, &x) in c.iter().zip(v) {
                t.push(i, j, x);
            }
            t.push(i, n - 1, 1.0);
            t.push(n - 1, i, 1.0);
        }
        let p = fill_reducing_order(&t.build());
        assert_eq!(*p.last().unwrap(), n - 1);
        assert!(is_permutation(&p, n));
    }

    #[test]
    fn handles_disconnected_graphs() {
        let a = SparseMatrix::identity(200);
        assert!(is_permutation(&fill_reducing_order(&a), 200));
    }
}
