//! Graphviz DOT export. Observed variables and indicators are drawn filled,
//! unobserved variables open, proxies dashed. The role and proxy link are
//! kept as node attributes so [`parse_dot`] can rebuild the graph.

use super::{GraphError, MGraph, MGraphBuilder, NodeRole};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn style(role: NodeRole) -> &'static str {
    match role {
        NodeRole::FullyObserved | NodeRole::MissingIndicator => {
            "shape=circle, style=filled, fillcolor=black, fontcolor=white"
        }
        NodeRole::PartiallyObserved | NodeRole::Unobserved => "shape=circle, style=solid, fillcolor=white",
        NodeRole::Proxy => "shape=circle, style=dashed",
    }
}

impl MGraph {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph mgraph {\n");
        let links: std::collections::HashMap<&str, &str> = self.proxy_links().collect();
        for (name, role) in self.nodes() {
            let mut attrs = format!("role={}", quote(role.keyword()));
            if let Some(target) = links.get(name) {
                attrs.push_str(&format!(", proxy_of={}", quote(target)));
            }
            out.push_str(&format!("  {} [{}, {}];\n", quote(name), attrs, style(role)));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("  {} -> {};\n", quote(a), quote(b)));
        }
        out.push_str("}\n");
        out
    }
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if let Some(r) = self.rest.strip_prefix(tok) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn ident_or_quoted(&mut self) -> Option<String> {
        self.skip_ws();
        if let Some(r) = self.rest.strip_prefix('"') {
            let mut out = String::new();
            let mut chars = r.char_indices();
            while let Some((i, c)) = chars.next() {
                match c {
                    '\\' => out.push(chars.next()?.1),
                    '"' => {
                        self.rest = &r[i + 1..];
                        return Some(out);
                    }
                    _ => out.push(c),
                }
            }
            None
        } else {
            let end = self
                .rest
                .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.' || c == '*'))
                .unwrap_or(self.rest.len());
            if end == 0 {
                return None;
            }
            let (tok, r) = self.rest.split_at(end);
            self.rest = r;
            Some(tok.to_string())
        }
    }
}

/// Reads back the subset of DOT produced by [`MGraph::to_dot`].
pub fn parse_dot(text: &str) -> Result<MGraph, GraphError> {
    let mut b = MGraphBuilder::new();
    let mut links = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |message: &str| GraphError::Parse {
            line: lineno + 1,
            message: message.to_string(),
        };
        if line.is_empty() || line == "}" || line.starts_with("digraph") || line.starts_with("//") {
            continue;
        }
        let mut cur = Cursor { rest: line };
        let first = cur.ident_or_quoted().ok_or_else(|| err("expected node id"))?;
        if cur.eat("->") {
            let second = cur.ident_or_quoted().ok_or_else(|| err("expected edge target"))?;
            b.add_edge(&first, &second);
            continue;
        }
        if !cur.eat("[") {
            return Err(err("expected attribute list or edge"));
        }
        let mut role = None;
        loop {
            if cur.eat("]") {
                break;
            }
            let key = cur.ident_or_quoted().ok_or_else(|| err("expected attribute"))?;
            if !cur.eat("=") {
                return Err(err("expected `=`"));
            }
            let value = cur.ident_or_quoted().ok_or_else(|| err("expected value"))?;
            match key.as_str() {
                "role" => role = Some(value.parse().map_err(|e: GraphError| err(&e.to_string()))?),
                "proxy_of" => links.push((first.clone(), value)),
                _ => {}
            }
            cur.eat(",");
        }
        b.add_node(&first, role.ok_or_else(|| err("node without role attribute"))?);
    }
    for (r, x) in links {
        b.add_proxy(&r, &x);
    }
    b.build()
}
