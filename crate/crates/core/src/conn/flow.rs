//! Unit-capacity vertex-split flow network for local vertex connectivity.

use std::collections::VecDeque;

const INF: i32 = i32::MAX / 2;

/// Vertex `v` becomes `in = 2v` and `out = 2v + 1` joined by a unit arc;
/// each undirected edge `{u, v}` becomes `u_out -> v_in` and `v_out -> u_in`.
pub(crate) struct SplitNetwork {
    head: Vec<u32>,
    cap: Vec<i32>,
    flow: Vec<i32>,
    // arc ids leaving each node; arc `a ^ 1` is the reverse of `a`
    out_arcs: Vec<Vec<u32>>,
    pred: Vec<u32>,
    queue: VecDeque<u32>,
}

impl SplitNetwork {
    pub(crate) fn new(adjacency: &[Vec<u32>]) -> Self {
        let n = adjacency.len();
        let mut net = SplitNetwork {
            head: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            out_arcs: vec![Vec::new(); 2 * n],
            pred: vec![u32::MAX; 2 * n],
            queue: VecDeque::new(),
        };
        for v in 0..n as u32 {
            net.add_arc(2 * v, 2 * v + 1, 1);
        }
        for (u, list) in adjacency.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    net.add_arc(2 * u as u32 + 1, 2 * v, INF);
                    net.add_arc(2 * v + 1, 2 * u as u32, INF);
                }
            }
        }
        net
    }

    fn add_arc(&mut self, from: u32, to: u32, cap: i32) {
        let id = self.head.len() as u32;
        self.head.push(to);
        self.cap.push(cap);
        self.flow.push(0);
        self.head.push(from);
        self.cap.push(0);
        self.flow.push(0);
        self.out_arcs[from as usize].push(id);
        self.out_arcs[to as usize].push(id + 1);
    }

    fn residual(&self, arc: u32) -> i32 {
        self.cap[arc as usize] - self.flow[arc as usize]
    }

    /// Number of internally vertex-disjoint `s`–`t` paths, stopping once
    /// `limit` is reached. `s` and `t` must be distinct and non-adjacent.
    pub(crate) fn local_connectivity(&mut self, s: usize, t: usize, limit: usize) -> usize {
        self.flow.iter_mut().for_each(|f| *f = 0);
        let source = 2 * s as u32 + 1;
        let sink = 2 * t as u32;
        let mut value = 0;
        while value < limit && self.augment(source, sink) {
            value += 1;
        }
        value
    }

    /// One shortest augmenting path by BFS in the residual network.
    fn augment(&mut self, source: u32, sink: u32) -> bool {
        self.pred.iter_mut().for_each(|p| *p = u32::MAX);
        self.queue.clear();
        self.queue.push_back(source);
        self.pred[source as usize] = u32::MAX - 1;
        let mut found = false;
        'bfs: while let Some(x) = self.queue.pop_front() {
            for &arc in &self.out_arcs[x as usize] {
                let y = self.head[arc as usize];
                if self.pred[y as usize] == u32::MAX && self.residual(arc) > 0 {
                    self.pred[y as usize] = arc;
                    if y == sink {
                        found = true;
                        break 'bfs;
                    }
                    self.queue.push_back(y);
                }
            }
        }
        if !found {
            return false;
        }
        let mut y = sink;
        while y != source {
            let arc = self.pred[y as usize];
            self.flow[arc as usize] += 1;
            self.flow[(arc ^ 1) as usize] -= 1;
            y = self.head[(arc ^ 1) as usize];
        }
        true
    }
}
