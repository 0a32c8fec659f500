//! Minimum-cost closure of the inclusion system via min-cut.
//!
//! Selecting a triangle requires selecting its three face edges. With
//! arbitrary signed weights, the cheapest closed selection is a project
//! selection problem: profitable triangles hang off the source, costly edges
//! feed the sink, and inclusion arcs are uncapacitated. The minimal optimal
//! closure (residual reachability from the source) is returned so results are
//! deterministic.

use std::collections::VecDeque;

use super::Fixings;

const FLOW_EPS: f64 = 1e-12;

struct Arc {
    to: usize,
    cap: f64,
}

struct FlowGraph {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            cursor: vec![0; n],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: f64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    fn bfs(&mut self, s: usize, t: usize, eps: f64) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let v = self.arcs[a].to;
                if self.level[v] < 0 && self.arcs[a].cap > eps {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64, eps: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] < self.adj[u].len() {
            let a = self.adj[u][self.cursor[u]];
            let v = self.arcs[a].to;
            if self.arcs[a].cap > eps && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.arcs[a].cap), eps);
                if got > 0.0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            self.cursor[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize, eps: f64) {
        while self.bfs(s, t, eps) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            while self.dfs(s, t, f64::INFINITY, eps) > eps {}
        }
    }

    fn source_side(&self, s: usize, eps: f64) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.arcs[a].to;
                if !seen[v] && self.arcs[a].cap > eps {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Closure {
    pub s1: Vec<bool>,
    pub s2: Vec<bool>,
    pub value: f64,
}

/// Cheapest selection closed under inclusion that honours `fix`, for weights
/// `w1` (edges) and `w2` (triangles) of any sign. `fix` must be consistent.
pub(crate) fn min_cost_closure(
    triangle_edges: &[[usize; 3]],
    w1: &[f64],
    w2: &[f64],
    fix: &Fixings,
) -> Closure {
    let n1 = w1.len();
    let mut s1 = vec![false; n1];
    let mut s2 = vec![false; w2.len()];
    let mut edge_out = vec![false; n1];
    for e in 0..n1 {
        match fix.edges[e] {
            Some(true) => s1[e] = true,
            Some(false) => edge_out[e] = true,
            None => s1[e] = w1[e] < 0.0,
        }
    }
    let mut candidates = Vec::new();
    for (t, faces) in triangle_edges.iter().enumerate() {
        match fix.triangles[t] {
            Some(true) => {
                s2[t] = true;
                faces.iter().for_each(|&e| s1[e] = true);
            }
            Some(false) => {}
            None => {
                if w2[t] < 0.0 && !faces.iter().any(|&e| edge_out[e]) {
                    candidates.push(t);
                }
            }
        }
    }

    // faces already selected cost nothing extra; only the rest enter the cut
    let mut pending_id = vec![usize::MAX; n1];
    let mut pending = Vec::new();
    let mut graph_tris = Vec::new();
    for &t in &candidates {
        let faces = triangle_edges[t];
        if faces.iter().all(|&e| s1[e]) {
            s2[t] = true;
            continue;
        }
        for &e in &faces {
            if !s1[e] && pending_id[e] == usize::MAX {
                pending_id[e] = pending.len();
                pending.push(e);
            }
        }
        graph_tris.push(t);
    }

    if !graph_tris.is_empty() {
        let scale = graph_tris
            .iter()
            .map(|&t| -w2[t])
            .chain(pending.iter().map(|&e| w1[e]))
            .fold(1.0f64, f64::max);
        let eps = FLOW_EPS * scale;
        let src = 0;
        let sink = 1;
        let tri_base = 2;
        let edge_base = tri_base + graph_tris.len();
        let mut g = FlowGraph::new(edge_base + pending.len());
        for (k, &t) in graph_tris.iter().enumerate() {
            g.add(src, tri_base + k, -w2[t]);
            for &e in &triangle_edges[t] {
                if !s1[e] {
                    g.add(tri_base + k, edge_base + pending_id[e], f64::INFINITY);
                }
            }
        }
        for (k, &e) in pending.iter().enumerate() {
            g.add(edge_base + k, sink, w1[e]);
        }
        g.max_flow(src, sink, eps);
        let side = g.source_side(src, eps);
        for (k, &t) in graph_tris.iter().enumerate() {
            if side[tri_base + k] {
                s2[t] = true;
            }
        }
        for (k, &e) in pending.iter().enumerate() {
            if side[edge_base + k] {
                s1[e] = true;
            }
        }
    }

    let value = w1.iter().zip(&s1).filter(|(_, &b)| b).map(|(w, _)| w).sum::<f64>()
        + w2.iter().zip(&s2).filter(|(_, &b)| b).map(|(w, _)| w).sum::<f64>();
    Closure { s1, s2, value }
}
