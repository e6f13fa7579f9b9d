//! Missingness graphs (m-graphs): causal DAGs whose nodes are partitioned into
//! fully observed, partially observed, unobserved, proxy and missing-indicator
//! variables.
//!
//! A graph is validated once at construction and is immutable afterwards, so
//! every query method takes `&self` and can be shared across threads.

mod classify;
mod dot;
mod dsep;
mod fixtures;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use classify::MissingnessClass;
pub use dot::parse_dot;
pub use fixtures::{fixture, Fixture};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("graph contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("node `{0}` is not a missing indicator")]
    NotIndicator(String),
    #[error("missing indicator `{0}` has no associated partially observed node")]
    UnlinkedIndicator(String),
    #[error("invalid proxy link `{indicator}` -> `{target}`: {reason}")]
    BadProxyLink {
        indicator: String,
        target: String,
        reason: &'static str,
    },
    #[error("proxy node `{0}` must have exactly two parents: a partially observed node and its indicator")]
    BadProxy(String),
    #[error("node `{0}` appears in more than one of the query sets")]
    OverlappingSets(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("unknown fixture `{0}` (expected fig2, fig3 or fig4)")]
    UnknownFixture(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Role of a node in the partition `V = V_o ∪ V_m ∪ N ∪ V* ∪ R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRole {
    FullyObserved,
    PartiallyObserved,
    Unobserved,
    Proxy,
    MissingIndicator,
}

impl NodeRole {
    pub fn keyword(self) -> &'static str {
        match self {
            NodeRole::FullyObserved => "observed",
            NodeRole::PartiallyObserved => "partial",
            NodeRole::Unobserved => "unobserved",
            NodeRole::Proxy => "proxy",
            NodeRole::MissingIndicator => "indicator",
        }
    }
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for NodeRole {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "observed" | "fully-observed" | "Vo" | "V_o" => Ok(NodeRole::FullyObserved),
            "partial" | "partially-observed" | "Vm" | "V_m" => Ok(NodeRole::PartiallyObserved),
            "unobserved" | "latent" | "N" => Ok(NodeRole::Unobserved),
            "proxy" | "V*" => Ok(NodeRole::Proxy),
            "indicator" | "missing-indicator" | "R" => Ok(NodeRole::MissingIndicator),
            other => Err(GraphError::UnknownRole(other.to_string())),
        }
    }
}

/// Incremental constructor for [`MGraph`]. Validation happens in [`build`](Self::build).
#[derive(Debug, Default, Clone)]
pub struct MGraphBuilder {
    nodes: Vec<(String, NodeRole)>,
    edges: Vec<(String, String)>,
    proxy_links: Vec<(String, String)>,
}

impl MGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, name: &str, role: NodeRole) -> Self {
        self.nodes.push((name.to_string(), role));
        self
    }

    pub fn edge(mut self, parent: &str, child: &str) -> Self {
        self.edges.push((parent.to_string(), child.to_string()));
        self
    }

    /// Associates a missing indicator with the partially observed node it governs.
    pub fn proxy(mut self, indicator: &str, target: &str) -> Self {
        self.proxy_links.push((indicator.to_string(), target.to_string()));
        self
    }

    pub fn add_node(&mut self, name: &str, role: NodeRole) {
        self.nodes.push((name.to_string(), role));
    }

    pub fn add_edge(&mut self, parent: &str, child: &str) {
        self.edges.push((parent.to_string(), child.to_string()));
    }

    pub fn add_proxy(&mut self, indicator: &str, target: &str) {
        self.proxy_links.push((indicator.to_string(), target.to_string()));
    }

    pub fn build(self) -> Result<MGraph, GraphError> {
        let mut index = HashMap::with_capacity(self.nodes.len());
        let mut names = Vec::with_capacity(self.nodes.len());
        let mut roles = Vec::with_capacity(self.nodes.len());
        for (name, role) in self.nodes {
            if index.contains_key(&name) {
                return Err(GraphError::DuplicateNode(name));
            }
            index.insert(name.clone(), names.len());
            names.push(name);
            roles.push(role);
        }
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| GraphError::UnknownNode(n.to_string()))
        };

        let n = names.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(self.edges.len());
        for (a, b) in &self.edges {
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if children[ia].contains(&ib) {
                continue;
            }
            children[ia].push(ib);
            parents[ib].push(ia);
            edges.push((ia, ib));
        }

        let mut proxy_links = BTreeMap::new();
        for (r, x) in &self.proxy_links {
            let (ir, ix) = (lookup(r)?, lookup(x)?);
            let bad = |reason| GraphError::BadProxyLink {
                indicator: r.clone(),
                target: x.clone(),
                reason,
            };
            if roles[ir] != NodeRole::MissingIndicator {
                return Err(bad("source is not a missing indicator"));
            }
            if roles[ix] != NodeRole::PartiallyObserved {
                return Err(bad("target is not partially observed"));
            }
            if let Some(prev) = proxy_links.insert(ir, ix) {
                if prev != ix {
                    return Err(bad("indicator already governs another node"));
                }
            }
        }
        for (i, role) in roles.iter().enumerate() {
            if *role == NodeRole::MissingIndicator && !proxy_links.contains_key(&i) {
                return Err(GraphError::UnlinkedIndicator(names[i].clone()));
            }
        }

        let graph = MGraph {
            names,
            roles,
            index,
            parents,
            children,
            edges,
            proxy_links,
            order: Vec::new(),
        };
        for i in 0..n {
            if graph.roles[i] == NodeRole::Proxy && !graph.proxy_parents_ok(i) {
                return Err(GraphError::BadProxy(graph.names[i].clone()));
            }
        }
        let order = graph.compute_topo_order()?;
        Ok(MGraph { order, ..graph })
    }
}

/// An immutable, validated m-graph.
#[derive(Debug, Clone)]
pub struct MGraph {
    names: Vec<String>,
    roles: Vec<NodeRole>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    proxy_links: BTreeMap<usize, usize>,
    order: Vec<usize>,
}

impl MGraph {
    pub fn builder() -> MGraphBuilder {
        MGraphBuilder::new()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, NodeRole)> {
        self.names.iter().map(String::as_str).zip(self.roles.iter().copied())
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.names[a].as_str(), self.names[b].as_str()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Indicator → governed partially observed node, by name.
    pub fn proxy_links(&self) -> impl Iterator<Item = (&str, &str)> {
        self.proxy_links
            .iter()
            .map(|(&r, &x)| (self.names[r].as_str(), self.names[x].as_str()))
    }

    pub fn role(&self, name: &str) -> Result<NodeRole, GraphError> {
        Ok(self.roles[self.idx(name)?])
    }

    pub fn has_edge(&self, parent: &str, child: &str) -> bool {
        match (self.index.get(parent), self.index.get(child)) {
            (Some(&a), Some(&b)) => self.children[a].contains(&b),
            _ => false,
        }
    }

    pub fn indicators(&self) -> impl Iterator<Item = &str> {
        self.nodes_with_role(NodeRole::MissingIndicator)
    }

    pub fn nodes_with_role(&self, role: NodeRole) -> impl Iterator<Item = &str> {
        self.nodes().filter(move |(_, r)| *r == role).map(|(n, _)| n)
    }

    /// A topological order of the nodes; ties resolve by declaration order.
    pub fn topo_order(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.names[i].as_str()).collect()
    }

    /// Copy of the graph with every proxy node (and its incident edges) removed.
    pub fn without_proxies(&self) -> MGraph {
        let mut b = MGraphBuilder::new();
        for (name, role) in self.nodes() {
            if role != NodeRole::Proxy {
                b.add_node(name, role);
            }
        }
        for &(p, c) in &self.edges {
            if self.roles[p] != NodeRole::Proxy && self.roles[c] != NodeRole::Proxy {
                b.add_edge(&self.names[p], &self.names[c]);
            }
        }
        for (r, x) in self.proxy_links() {
            b.add_proxy(r, x);
        }
        b.build()
            .expect("removing sink-like nodes from a valid m-graph keeps it valid")
    }

    /// Serializes to the line-oriented text format read by [`MGraph::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, role) in self.nodes() {
            out.push_str(&format!("node {name} {role}\n"));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("edge {a} {b}\n"));
        }
        for (r, x) in self.proxy_links() {
            out.push_str(&format!("proxy {r} {x}\n"));
        }
        out
    }

    /// Parses `node <name> <role>`, `edge <a> <b>` and `proxy <R> <X>` lines.
    /// Blank lines and `#` comments are ignored.
    pub fn parse_text(text: &str) -> Result<MGraph, GraphError> {
        let mut b = MGraphBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["node", name, role] => {
                    let role = role.parse().map_err(|e: GraphError| parse_err(e.to_string()))?;
                    b.add_node(name, role);
                }
                ["edge", a, c] => b.add_edge(a, c),
                ["proxy", r, x] => b.add_proxy(r, x),
                _ => return Err(parse_err(format!("cannot parse `{line}`"))),
            }
        }
        b.build()
    }

    fn idx(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    fn idx_set(&self, names: &[&str]) -> Result<Vec<usize>, GraphError> {
        names.iter().map(|n| self.idx(n)).collect()
    }

    fn proxy_parents_ok(&self, node: usize) -> bool {
        let ps = &self.parents[node];
        if ps.len() != 2 {
            return false;
        }
        let (a, b) = (ps[0], ps[1]);
        let linked = |r: usize, x: usize| self.proxy_links.get(&r) == Some(&x);
        linked(a, b) || linked(b, a)
    }

    fn compute_topo_order(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        // Min-heap over declaration index keeps the order stable.
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        Err(GraphError::Cycle(self.find_cycle(&indeg)))
    }

    /// Walks parent links among the unresolved nodes until one repeats.
    fn find_cycle(&self, indeg: &[usize]) -> Vec<String> {
        let start = (0..self.len())
            .find(|&i| indeg[i] > 0)
            .expect("cycle detection called on an acyclic graph");
        let mut seen = vec![usize::MAX; self.len()];
        let mut path = Vec::new();
        let mut v = start;
        while seen[v] == usize::MAX {
            seen[v] = path.len();
            path.push(v);
            v = *self.parents[v]
                .iter()
                .find(|&&p| indeg[p] > 0)
                .expect("unresolved node keeps an unresolved parent");
        }
        let mut cycle: Vec<String> = path[seen[v]..].iter().rev().map(|&i| self.names[i].clone()).collect();
        cycle.push(cycle[0].clone());
        cycle
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_has_single_order() {
        let g = MGraph::builder()
            .node("C", NodeRole::FullyObserved)
            .node("A", NodeRole::FullyObserved)
            .node("B", NodeRole::FullyObserved)
            .edge("A", "B")
            .edge("B", "C")
            .build()
            .unwrap();
        assert_eq!(g.topo_order(), vec!["A", "B", "C"]);
    }

    #[test]
    fn single_node_order() {
        let g = MGraph::builder().node("X", NodeRole::Unobserved).build().unwrap();
        assert_eq!(g.topo_order(), vec!["X"]);
    }

    #[test]
    fn cycle_is_rejected_and_listed() {
        let err = MGraph::builder()
            .node("A", NodeRole::FullyObserved)
            .node("B", NodeRole::FullyObserved)
            .node("C", NodeRole::FullyObserved)
            .node("D", NodeRole::FullyObserved)
            .edge("D", "A")
            .edge("A", "B")
            .edge("B", "C")
            .edge("C", "A")
            .build()
            .unwrap_err();
        match err {
            GraphError::Cycle(c) => {
                assert_eq!(c.len(), 4);
                assert_eq!(c.first(), c.last());
                for n in ["A", "B", "C"] {
                    assert!(c.iter().any(|x| x == n));
                }
                assert!(!c.iter().any(|x| x == "D"));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_unknown_nodes() {
        let dup = MGraph::builder()
            .node("A", NodeRole::FullyObserved)
            .node("A", NodeRole::Unobserved)
            .build();
        assert_eq!(dup.unwrap_err(), GraphError::DuplicateNode("A".into()));
        let unk = MGraph::builder()
            .node("A", NodeRole::FullyObserved)
            .edge("A", "Z")
            .build();
        assert_eq!(unk.unwrap_err(), GraphError::UnknownNode("Z".into()));
    }

    #[test]
    fn indicator_must_be_linked() {
        let err = MGraph::builder()
            .node("R_X", NodeRole::MissingIndicator)
            .build()
            .unwrap_err();
        assert_eq!(err, GraphError::UnlinkedIndicator("R_X".into()));
        let err = MGraph::builder()
            .node("R_X", NodeRole::MissingIndicator)
            .node("X", NodeRole::FullyObserved)
            .proxy("R_X", "X")
            .build()
            .unwrap_err();
        assert!(matches!(err, GraphError::BadProxyLink { .. }));
    }

    #[test]
    fn proxy_needs_its_two_parents() {
        let base = MGraph::builder()
            .node("X", NodeRole::PartiallyObserved)
            .node("R_X", NodeRole::MissingIndicator)
            .node("X*", NodeRole::Proxy)
            .proxy("R_X", "X");
        assert!(base.clone().edge("X", "X*").build().is_err());
        let g = base.edge("X", "X*").edge("R_X", "X*").build().unwrap();
        assert_eq!(g.role("X*").unwrap(), NodeRole::Proxy);
    }

    #[test]
    fn text_format_round_trips() {
        for name in [Fixture::Fig2, Fixture::Fig3, Fixture::Fig4] {
            let g = fixture(name);
            let back = MGraph::parse_text(&g.to_text()).unwrap();
            assert_eq!(g.to_text(), back.to_text());
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = MGraph::parse_text("node A observed\n\nbogus line\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
        let err = MGraph::parse_text("node A sideways\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
    }

    #[test]
    fn removing_proxies_drops_only_proxies() {
        let g = fixture(Fixture::Fig4);
        let h = g.without_proxies();
        assert_eq!(h.len(), g.len() - 3);
        assert!(h.nodes().all(|(_, r)| r != NodeRole::Proxy));
        assert_eq!(h.proxy_links().count(), 3);
    }
}
