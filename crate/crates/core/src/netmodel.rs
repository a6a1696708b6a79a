//! Multicast networks: validation, topological edge order, max-flow paths.

use std::collections::{BTreeSet, HashMap};

use crate::error::NetworkError;

/// Unit-capacity directed edge. Ids are 1-based and dense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
}

/// A validated single-source multicast network.
#[derive(Clone, Debug)]
pub struct MulticastNetwork {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    source: usize,
    receivers: Vec<usize>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    edge_order: Vec<usize>,
}

/// `omega` edge-disjoint paths from `Out(s)` into `In(t)` for one receiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSet {
    pub receiver: usize,
    pub paths: Vec<Vec<usize>>,
}

impl MulticastNetwork {
    /// Builds and validates a network. `edges` holds `(id, tail, head)`
    /// triples naming nodes; ids must be exactly `1..=edges.len()`.
    pub fn new<N: AsRef<str>, R: AsRef<str>, E: AsRef<str>>(
        nodes: &[N],
        source: &str,
        receivers: &[R],
        edges: &[(usize, E, E)],
    ) -> Result<Self, NetworkError> {
        let mut index = HashMap::new();
        let names: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(NetworkError::DuplicateNode(n.clone()));
            }
        }
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| NetworkError::UnknownNode(n.to_string()))
        };
        let source = lookup(source)?;
        let mut recv = Vec::new();
        for r in receivers {
            let t = lookup(r.as_ref())?;
            if t == source {
                return Err(NetworkError::SourceIsReceiver(names[t].clone()));
            }
            if recv.contains(&t) {
                return Err(NetworkError::DuplicateNode(names[t].clone()));
            }
            recv.push(t);
        }

        let mut slots: Vec<Option<Edge>> = vec![None; edges.len()];
        for (id, tail, head) in edges {
            let id = *id;
            if id == 0 || id > edges.len() || slots[id - 1].is_some() {
                return Err(NetworkError::EdgeIds {
                    expected: edges.len(),
                    found: id,
                });
            }
            slots[id - 1] = Some(Edge {
                id,
                tail: lookup(tail.as_ref())?,
                head: lookup(head.as_ref())?,
            });
        }
        let edges: Vec<Edge> = slots.into_iter().map(|e| e.expect("dense ids")).collect();

        let mut in_edges = vec![Vec::new(); names.len()];
        let mut out_edges = vec![Vec::new(); names.len()];
        for e in &edges {
            out_edges[e.tail].push(e.id);
            in_edges[e.head].push(e.id);
        }

        let mut net = MulticastNetwork {
            nodes: names,
            index,
            edges,
            source,
            receivers: recv,
            in_edges,
            out_edges,
            edge_order: Vec::new(),
        };
        net.edge_order = net.compute_edge_order()?;
        net.validate()?;
        Ok(net)
    }

    /// Re-checks every standing assumption, reporting the first failure.
    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.receivers.is_empty() {
            return Err(NetworkError::NoReceivers);
        }
        let s = self.source;
        if !self.in_edges[s].is_empty() {
            return Err(NetworkError::SourceHasInput(self.nodes[s].clone()));
        }
        let omega = self.omega();
        if omega == 0 {
            return Err(NetworkError::SourceHasNoOutput(self.nodes[s].clone()));
        }
        self.topological_nodes().ok_or(NetworkError::Cycle)?;
        for &t in &self.receivers {
            if let Some(&e) = self.in_edges[t].iter().find(|&&e| self.edge(e).tail == s) {
                return Err(NetworkError::DirectSourceEdge {
                    edge: e,
                    receiver: self.nodes[t].clone(),
                });
            }
            let in_degree = self.in_edges[t].len();
            if in_degree != omega {
                return Err(NetworkError::DegreeMismatch {
                    receiver: self.nodes[t].clone(),
                    in_degree,
                    omega,
                });
            }
            let flow = self.max_flow(t).0;
            if flow < omega {
                return Err(NetworkError::InsufficientFlow {
                    receiver: self.nodes[t].clone(),
                    flow,
                    omega,
                });
            }
        }
        Ok(())
    }

    pub fn omega(&self) -> usize {
        self.out_edges[self.source].len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn receivers(&self) -> &[usize] {
        &self.receivers
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.nodes[v]
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Edge by 1-based id.
    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id - 1]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Incoming edge ids of `v`, ascending.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Outgoing edge ids of `v`, ascending.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn source_edges(&self) -> &[usize] {
        &self.out_edges[self.source]
    }

    /// Position of `e` within `Out(s)`, if it is a source edge.
    pub fn source_slot(&self, e: usize) -> Option<usize> {
        self.source_edges().iter().position(|&x| x == e)
    }

    /// All edges: `Out(s)` by id, then by topological rank of the head
    /// node with ties broken by id.
    pub fn edge_order(&self) -> &[usize] {
        &self.edge_order
    }

    /// Adjacent pairs `(d, e)` with `head(d) = tail(e)`, sorted by `(e, d)`.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for e in &self.edges {
            for &d in &self.in_edges[e.tail] {
                out.push((d, e.id));
            }
        }
        out
    }

    pub fn is_adjacent(&self, d: usize, e: usize) -> bool {
        d >= 1
            && e >= 1
            && d <= self.edges.len()
            && e <= self.edges.len()
            && self.edge(d).head == self.edge(e).tail
    }

    /// Kahn's algorithm taking the smallest ready node index first.
    fn topological_nodes(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let h = self.edge(e).head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn compute_edge_order(&self) -> Result<Vec<usize>, NetworkError> {
        let nodes = self.topological_nodes().ok_or(NetworkError::Cycle)?;
        let mut rank = vec![0; self.nodes.len()];
        for (i, &v) in nodes.iter().enumerate() {
            rank[v] = i;
        }
        let mut order: Vec<usize> = self.out_edges[self.source].clone();
        let mut rest: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.tail != self.source)
            .map(|e| e.id)
            .collect();
        rest.sort_by_key(|&e| (rank[self.edge(e).head], e));
        order.extend(rest);
        Ok(order)
    }

    /// Unit-capacity max-flow from the source to `t` by repeated depth-first
    /// augmentation. Returns the flow value and the per-edge flow flags.
    fn max_flow(&self, t: usize) -> (usize, Vec<bool>) {
        let mut flow = vec![false; self.edges.len()];
        let mut value = 0;
        loop {
            let mut visited = vec![false; self.nodes.len()];
            let mut trail = Vec::new();
            if !self.augment(self.source, t, &mut flow, &mut visited, &mut trail) {
                break;
            }
            value += 1;
            if value == self.omega() {
                break;
            }
        }
        (value, flow)
    }

    fn augment(
        &self,
        v: usize,
        t: usize,
        flow: &mut [bool],
        visited: &mut [bool],
        trail: &mut Vec<usize>,
    ) -> bool {
        if v == t {
            return true;
        }
        visited[v] = true;
        for &e in &self.out_edges[v] {
            let h = self.edge(e).head;
            if !flow[e - 1] && !visited[h] && self.augment(h, t, flow, visited, trail) {
                flow[e - 1] = true;
                trail.push(e);
                return true;
            }
        }
        for &e in &self.in_edges[v] {
            let tl = self.edge(e).tail;
            if flow[e - 1] && !visited[tl] && self.augment(tl, t, flow, visited, trail) {
                flow[e - 1] = false;
                trail.push(e);
                return true;
            }
        }
        false
    }

    /// Deterministic edge-disjoint path system for receiver `t`: max-flow
    /// with edges scanned in id order, then decomposed by following the
    /// smallest unused flow edge out of each node.
    pub fn edge_disjoint_paths(&self, t: usize) -> PathSet {
        let (value, flow) = self.max_flow(t);
        assert_eq!(value, self.omega(), "network was validated");
        let mut used = vec![false; self.edges.len()];
        let mut paths = Vec::with_capacity(value);
        for &start in self.source_edges() {
            if !flow[start - 1] {
                continue;
            }
            used[start - 1] = true;
            let mut path = vec![start];
            let mut v = self.edge(start).head;
            while v != t {
                let next = self.out_edges[v]
                    .iter()
                    .copied()
                    .find(|&e| flow[e - 1] && !used[e - 1])
                    .expect("flow conservation");
                used[next - 1] = true;
                path.push(next);
                v = self.edge(next).head;
            }
            paths.push(path);
        }
        PathSet { receiver: t, paths }
    }

    pub fn all_path_sets(&self) -> Vec<PathSet> {
        self.receivers
            .iter()
            .map(|&t| self.edge_disjoint_paths(t))
            .collect()
    }
}

impl PathSet {
    /// Checks that the paths are `omega` pairwise edge-disjoint chains of
    /// adjacent pairs from `Out(s)` into `In(t)`.
    pub fn check(&self, net: &MulticastNetwork) -> Result<(), NetworkError> {
        let bad = |why: String| NetworkError::BadPathSet {
            receiver: net.node_name(self.receiver).to_string(),
            why,
        };
        if self.paths.len() != net.omega() {
            return Err(bad(format!(
                "{} paths, expected {}",
                self.paths.len(),
                net.omega()
            )));
        }
        let mut seen = BTreeSet::new();
        for path in &self.paths {
            let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
                return Err(bad("empty path".into()));
            };
            if path.iter().any(|&e| e == 0 || e > net.num_edges()) {
                return Err(bad("unknown edge id".into()));
            }
            if net.edge(first).tail != net.source() {
                return Err(bad(format!("path starts at e{first}, not in Out(s)")));
            }
            if net.edge(last).head != self.receiver {
                return Err(bad(format!("path ends at e{last}, not in In(t)")));
            }
            for w in path.windows(2) {
                if !net.is_adjacent(w[0], w[1]) {
                    return Err(bad(format!("e{} -> e{} is not an adjacent pair", w[0], w[1])));
                }
            }
            for &e in path {
                if !seen.insert(e) {
                    return Err(bad(format!("edge e{e} used twice")));
                }
            }
        }
        Ok(())
    }

    /// Successor of `d` on whichever path contains it.
    pub fn next_after(&self, d: usize) -> Option<usize> {
        self.paths.iter().find_map(|p| {
            p.iter()
                .position(|&x| x == d)
                .and_then(|i| p.get(i + 1).copied())
        })
    }
}
