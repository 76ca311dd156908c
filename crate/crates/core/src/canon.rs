//! Canonical labeling and automorphism groups of small vertex- and
//! edge-colored graphs.
//!
//! Individualization–refinement in the style of nauty: the ordered
//! partition is refined to an equitable one, the first smallest
//! non-singleton cell is split vertex by vertex, and discrete partitions are
//! compared through their relabeled encodings. Leaves with equal encodings
//! yield automorphisms, which prune sibling subtrees (orbit pruning) and
//! abandon subtrees already covered (jump back to the common ancestor).
//!
//! Everything is deterministic; the canonical form is the lexicographically
//! least leaf encoding, so it does not depend on the input numbering.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: Vec<u32>,
    adj: Vec<Vec<(usize, u8)>>,
}

impl ColoredGraph {
    pub fn new(colors: Vec<u32>) -> Self {
        let adj = vec![Vec::new(); colors.len()];
        Self { colors, adj }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn add_vertex(&mut self, color: u32) -> usize {
        self.colors.push(color);
        self.adj.push(Vec::new());
        self.colors.len() - 1
    }

    /// Undirected edge with a type tag.
    pub fn add_edge(&mut self, u: usize, v: usize, kind: u8) {
        self.adj[u].push((v, kind));
        self.adj[v].push((u, kind));
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    /// Encoding of the graph relabeled so that `lab[i]` becomes vertex `i`.
    fn encode(&self, lab: &[usize]) -> Vec<u32> {
        let n = lab.len();
        let mut inv = vec![0usize; n];
        for (i, &v) in lab.iter().enumerate() {
            inv[v] = i;
        }
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, t) in list {
                let (a, b) = (inv[u], inv[v]);
                if a <= b {
                    edges.push((a as u32, b as u32, t as u32));
                }
            }
        }
        edges.sort_unstable();
        let mut out = Vec::with_capacity(1 + n + 3 * edges.len());
        out.push(n as u32);
        out.extend(lab.iter().map(|&v| self.colors[v]));
        for (a, b, t) in edges {
            out.extend([a, b, t]);
        }
        out
    }

    fn initial_partition(&self) -> Vec<Vec<usize>> {
        let mut by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in self.colors.iter().enumerate() {
            by_color.entry(c).or_default().push(v);
        }
        by_color.into_values().collect()
    }

    /// Splits cells by neighbor-cell signatures until the partition is
    /// equitable. Cell order is determined by signatures only.
    fn refine(&self, cells: &mut Vec<Vec<usize>>) {
        let mut cell_of = vec![0u32; self.len()];
        loop {
            for (i, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = i as u32;
                }
            }
            let mut changed = false;
            let mut next = Vec::with_capacity(cells.len());
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<(u32, u8)>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<(u32, u8)> =
                            self.adj[v].iter().map(|&(u, t)| (cell_of[u], t)).collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        if start > 0 || i < keyed.len() {
                            changed = true;
                        }
                        next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                        start = i;
                    }
                }
            }
            *cells = next;
            if !changed {
                return;
            }
        }
    }
}

/// Result of a canonical labeling run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonResult {
    /// `labeling[i]` is the vertex placed at canonical position `i`.
    pub labeling: Vec<usize>,
    /// Canonical encoding; equal for isomorphic graphs only.
    pub form: Vec<u32>,
    /// Automorphisms (as vertex maps) generating the automorphism group.
    pub generators: Vec<Vec<usize>>,
    pub group_order: u128,
    /// Orbit representative (least vertex) of every vertex.
    pub orbits: Vec<usize>,
}

impl CanonResult {
    /// Canonical position of every vertex.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.labeling.len()];
        for (i, &v) in self.labeling.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

struct Leaf {
    labeling: Vec<usize>,
    prefix: Vec<usize>,
}

struct Search<'a> {
    g: &'a ColoredGraph,
    gens: Vec<Vec<usize>>,
    leaves: BTreeMap<Vec<u32>, Leaf>,
    best: Option<Vec<u32>>,
    first_path: Vec<(Vec<usize>, usize)>,
    prefix: Vec<usize>,
}

impl Search<'_> {
    fn fixing_prefix(&self, prefix: &[usize]) -> Vec<&Vec<usize>> {
        self.gens
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
            .collect()
    }

    /// Returns `Some(d)` to abandon every node deeper than `d`.
    fn run(&mut self, cells: Vec<Vec<usize>>, first: bool) -> Option<usize> {
        let depth = self.prefix.len();
        let Some(target) = smallest_nonsingleton(&cells) else {
            return self.leaf(cells);
        };
        let children = cells[target].clone();
        if first {
            self.first_path.push((children.clone(), children[0]));
        }
        let mut explored: Vec<usize> = Vec::new();
        for &w in &children {
            if !explored.is_empty() {
                let gens = self.fixing_prefix(&self.prefix);
                if !gens.is_empty() {
                    let roots = orbit_roots(self.g.len(), &gens);
                    if explored.iter().any(|&u| roots[u] == roots[w]) {
                        continue;
                    }
                }
            }
            let mut next = cells.clone();
            let rest: Vec<usize> = children.iter().copied().filter(|&x| x != w).collect();
            next.splice(target..=target, [vec![w], rest]);
            self.g.refine(&mut next);
            self.prefix.push(w);
            let jump = self.run(next, first && explored.is_empty());
            self.prefix.pop();
            explored.push(w);
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }

    fn leaf(&mut self, cells: Vec<Vec<usize>>) -> Option<usize> {
        let labeling: Vec<usize> = cells.into_iter().flatten().collect();
        let form = self.g.encode(&labeling);
        if let Some(prev) = self.leaves.get(&form) {
            let mut gamma = vec![0usize; labeling.len()];
            for (i, &v) in prev.labeling.iter().enumerate() {
                gamma[v] = labeling[i];
            }
            let d = prev
                .prefix
                .iter()
                .zip(&self.prefix)
                .take_while(|(a, b)| a == b)
                .count();
            if gamma.iter().enumerate().any(|(i, &x)| i != x) && !self.gens.contains(&gamma) {
                self.gens.push(gamma);
            }
            return Some(d);
        }
        if self.best.as_ref().map_or(true, |b| form < *b) {
            self.best = Some(form.clone());
        }
        self.leaves.insert(
            form,
            Leaf {
                labeling,
                prefix: self.prefix.clone(),
            },
        );
        None
    }
}

fn smallest_nonsingleton(cells: &[Vec<usize>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in cells.iter().enumerate() {
        if c.len() > 1 && best.map_or(true, |b| c.len() < cells[b].len()) {
            best = Some(i);
        }
    }
    best
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Least vertex in the orbit of each vertex under the group generated by `gens`.
pub fn orbit_roots<G: AsRef<[usize]>>(n: usize, gens: &[G]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    for g in gens {
        for (v, &w) in g.as_ref().iter().enumerate() {
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Canonical labeling, automorphism generators, orbits and group order.
pub fn canonicalize(g: &ColoredGraph) -> CanonResult {
    let mut cells = g.initial_partition();
    g.refine(&mut cells);
    let mut s = Search {
        g,
        gens: Vec::new(),
        leaves: BTreeMap::new(),
        best: None,
        first_path: Vec::new(),
        prefix: Vec::new(),
    };
    s.run(cells, true);
    let form = s.best.take().unwrap_or_default();
    let labeling = s.leaves.get(&form).map(|l| l.labeling.clone()).unwrap_or_default();
    let mut order: u128 = 1;
    let mut prefix = Vec::new();
    for (cell, v) in &s.first_path {
        let gens = s.fixing_prefix(&prefix);
        let roots = orbit_roots(g.len(), &gens);
        let size = cell.iter().filter(|&&w| roots[w] == roots[*v]).count() as u128;
        order = order.saturating_mul(size);
        prefix.push(*v);
    }
    let orbits = orbit_roots(g.len(), &s.gens);
    CanonResult {
        labeling,
        form,
        generators: s.gens,
        group_order: order,
        orbits,
    }
}

/// Closes a generating set under composition. Fails once more than `limit`
/// elements have been produced.
pub fn group_closure(n: usize, gens: &[Vec<usize>], limit: usize) -> Option<Vec<Vec<usize>>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: alloc::collections::BTreeSet<Vec<usize>> = Default::default();
    seen.insert(id.clone());
    let mut queue = vec![id];
    let mut i = 0;
    while i < queue.len() {
        let cur = queue[i].clone();
        i += 1;
        for g in gens {
            let next: Vec<usize> = cur.iter().map(|&x| g[x]).collect();
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push(next);
            }
        }
    }
    Some(queue)
}
