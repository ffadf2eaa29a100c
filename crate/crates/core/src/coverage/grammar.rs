//! Grammar model for composite-rule counting.
//!
//! A grammar is a rooted graph of nodes. Keyword nodes carry the rules the
//! keyword can trigger; plain non-terminals only branch; leaves end a path.
//! A composite rule is one choice of rule for every keyword on a
//! root-to-leaf path, so the total is the sum over paths of the product of
//! rule counts along the path.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::rules::{
    aggregate_rule, expr_rule, filter_rule, from_rule, order_rule, select_rule, set_op_rule, variants, RuleId,
    Variant,
};
use crate::ast::*;
use crate::keyword::Keyword;

/// Subquery nesting counted by the desk grammar. Deeper subqueries still
/// execute; their internal structure is not part of the composite.
pub const SUBQUERY_DEPTH_CAP: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar recursion through node {0} has no depth cap")]
    Unbounded(NodeId),
    #[error("composite rule count overflows")]
    Overflow,
    #[error("node {0} does not exist")]
    Dangling(NodeId),
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf,
    Choice(Vec<NodeId>),
    Keyword {
        label: String,
        rules: Vec<String>,
        children: Vec<NodeId>,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Grammar {
    nodes: Vec<Node>,
    root: NodeId,
}

impl Grammar {
    pub fn new() -> Self {
        Grammar::default()
    }

    pub fn leaf(&mut self) -> NodeId {
        self.push(Node::Leaf)
    }

    pub fn choice(&mut self, children: Vec<NodeId>) -> NodeId {
        self.push(Node::Choice(children))
    }

    pub fn keyword(&mut self, label: impl Into<String>, rules: Vec<String>, children: Vec<NodeId>) -> NodeId {
        self.push(Node::Keyword {
            label: label.into(),
            rules,
            children,
        })
    }

    /// Keyword node whose rules are just counted, named `r0..`.
    pub fn keyword_n(&mut self, label: impl Into<String>, rules: usize, children: Vec<NodeId>) -> NodeId {
        self.keyword(label, (0..rules).map(|i| format!("r{i}")).collect(), children)
    }

    /// Appends an edge; this is the only way to build a cycle.
    pub fn add_child(&mut self, parent: NodeId, child: NodeId) {
        match &mut self.nodes[parent] {
            Node::Leaf => self.nodes[parent] = Node::Choice(vec![child]),
            Node::Choice(c) | Node::Keyword { children: c, .. } => c.push(child),
        }
    }

    pub fn set_root(&mut self, root: NodeId) {
        self.root = root;
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn get(&self, id: NodeId) -> Result<&Node, GrammarError> {
        self.nodes.get(id).ok_or(GrammarError::Dangling(id))
    }

    fn children(&self, id: NodeId) -> &[NodeId] {
        match &self.nodes[id] {
            Node::Leaf => &[],
            Node::Choice(c) | Node::Keyword { children: c, .. } => c,
        }
    }

    /// Whether `sig` is the keyword sequence of some root-to-leaf path with
    /// each rule drawn from its keyword node.
    pub fn accepts(&self, sig: &CompositeSignature) -> bool {
        !self.nodes.is_empty() && self.matches(self.root, &sig.0)
    }

    fn matches(&self, id: NodeId, rest: &[RuleId]) -> bool {
        match &self.nodes[id] {
            Node::Leaf => rest.is_empty(),
            Node::Choice(c) => c.iter().any(|&n| self.matches(n, rest)),
            Node::Keyword { label, rules, children } => match rest.split_first() {
                Some((r, tail)) if *label == r.keyword.ident() && rules.iter().any(|x| x == r.variant.name()) => {
                    children.iter().any(|&n| self.matches(n, tail))
                }
                _ => false,
            },
        }
    }
}

/// Depth-first traversal that keeps the keyword path and adds its rule
/// product at every leaf.
pub fn count_composite_rules_dfs(g: &Grammar) -> Result<u128, GrammarError> {
    if g.is_empty() {
        return Ok(0);
    }
    let mut total = 0u128;
    let mut path: Vec<u128> = Vec::new();
    let mut on_path = vec![false; g.len()];
    traverse(g, g.root, &mut path, &mut on_path, &mut total)?;
    Ok(total)
}

fn traverse(
    g: &Grammar,
    id: NodeId,
    path: &mut Vec<u128>,
    on_path: &mut [bool],
    total: &mut u128,
) -> Result<(), GrammarError> {
    let node = g.get(id)?;
    if on_path[id] {
        return Err(GrammarError::Unbounded(id));
    }
    match node {
        Node::Leaf => {
            let mut n = 1u128;
            for r in path.iter() {
                n = n.checked_mul(*r).ok_or(GrammarError::Overflow)?;
            }
            *total = total.checked_add(n).ok_or(GrammarError::Overflow)?;
        }
        Node::Choice(children) | Node::Keyword { children, .. } => {
            let keyword = matches!(node, Node::Keyword { .. });
            if let Node::Keyword { rules, .. } = node {
                path.push(rules.len() as u128);
            }
            on_path[id] = true;
            for &c in children {
                traverse(g, c, path, on_path, total)?;
            }
            on_path[id] = false;
            if keyword {
                path.pop();
            }
        }
    }
    Ok(())
}

/// Same total as [`count_composite_rules_dfs`], computed bottom-up:
/// a leaf counts 1 and a node counts its rule count times the sum over its
/// children. Linear in the size of the graph, so shared sub-grammars are
/// counted once.
pub fn count_composite_rules(g: &Grammar) -> Result<u128, GrammarError> {
    if g.is_empty() {
        return Ok(0);
    }
    let mut memo: HashMap<NodeId, u128> = HashMap::new();
    let mut on_path = vec![false; g.len()];
    count_node(g, g.root, &mut memo, &mut on_path)
}

fn count_node(
    g: &Grammar,
    id: NodeId,
    memo: &mut HashMap<NodeId, u128>,
    on_path: &mut [bool],
) -> Result<u128, GrammarError> {
    if let Some(n) = memo.get(&id) {
        return Ok(*n);
    }
    let node = g.get(id)?;
    if on_path[id] {
        return Err(GrammarError::Unbounded(id));
    }
    on_path[id] = true;
    let n = match node {
        Node::Leaf => 1,
        Node::Choice(_) | Node::Keyword { .. } => {
            let mut sum = 0u128;
            for &c in g.children(id) {
                let k = count_node(g, c, memo, on_path)?;
                sum = sum.checked_add(k).ok_or(GrammarError::Overflow)?;
            }
            let r = match node {
                Node::Keyword { rules, .. } => rules.len() as u128,
                _ => 1,
            };
            sum.checked_mul(r).ok_or(GrammarError::Overflow)?
        }
    };
    on_path[id] = false;
    memo.insert(id, n);
    Ok(n)
}

/// Ordered rules along the derivation path a query takes through the desk
/// grammar.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositeSignature(pub Vec<RuleId>);

impl fmt::Display for CompositeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// The path: for the leftmost `SELECT` block, each clause keyword in
/// execution order (FROM, first join and its ON, WHERE, GROUP BY, HAVING,
/// aggregate, SELECT, DISTINCT/ALL), each condition followed by the rule of
/// its root operator; a set operation prefixes the block and ORDER BY
/// closes it. A subquery that is the root of a WHERE condition is spliced
/// in place, down to [`SUBQUERY_DEPTH_CAP`].
pub fn signature_of(q: &Query) -> CompositeSignature {
    let mut out = Vec::new();
    query_sig(q, 0, &mut out);
    CompositeSignature(out)
}

fn query_sig(q: &Query, depth: usize, out: &mut Vec<RuleId>) {
    if let QueryBody::SetOp { op, left, right } = &q.body {
        out.push(set_op_rule(*op, left, right));
    }
    block_sig(q.selects()[0], depth, out);
    if let Some(o) = &q.order_by {
        out.push(order_rule(o));
    }
}

fn block_sig(s: &Select, depth: usize, out: &mut Vec<RuleId>) {
    if let Some(refs) = &s.from {
        out.push(from_rule(refs));
        let join = refs.iter().find_map(|r| match r {
            TableRef::Join(j) => Some(j),
            TableRef::Table(_) => None,
        });
        if let Some(j) = join {
            out.push(RuleId::new(Keyword::Join(j.kind), Variant::Default));
            if let Some(on) = &j.on {
                cond_sig(Keyword::On, on, depth, out);
            }
        }
    }
    if let Some(w) = &s.where_clause {
        cond_sig(Keyword::Where, w, depth, out);
    }
    if s.group_by.is_some() {
        out.push(RuleId::new(Keyword::GroupBy, Variant::Column));
        if let Some(h) = &s.having {
            cond_sig(Keyword::Having, h, depth, out);
        }
    }
    if let Some(f) = s.aggregate() {
        out.push(aggregate_rule(f, &s.items));
    }
    out.push(select_rule(&s.items));
    if let Some(r) = s.modifier.and_then(filter_rule) {
        out.push(r);
    }
}

fn cond_sig(clause: Keyword, e: &ValueExpr, depth: usize, out: &mut Vec<RuleId>) {
    out.push(super::rules::clause_condition_rule(clause, e));
    if let Some(r) = expr_rule(e) {
        out.push(r);
        if clause == Keyword::Where && depth < SUBQUERY_DEPTH_CAP {
            if let ValueExpr::Exists(q) | ValueExpr::InSubquery { query: q, .. } = e {
                query_sig(q, depth + 1, out);
            }
        }
    }
}

fn expression_keywords() -> Vec<Keyword> {
    Keyword::universe()
        .into_iter()
        .filter(|k| {
            !matches!(
                k,
                Keyword::Select
                    | Keyword::From
                    | Keyword::Where
                    | Keyword::GroupBy
                    | Keyword::Having
                    | Keyword::OrderBy
                    | Keyword::Distinct
                    | Keyword::All
                    | Keyword::On
                    | Keyword::Agg(_)
                    | Keyword::SetOp(_)
                    | Keyword::Join(_)
            )
        })
        .collect()
}

/// The grammar of the supported language, with subquery recursion unrolled
/// to [`SUBQUERY_DEPTH_CAP`].
pub fn desk_grammar() -> Grammar {
    let mut b = Builder {
        g: Grammar::new(),
        expr_keywords: expression_keywords(),
    };
    let end = b.g.leaf();
    let root = b.query(0, end);
    b.g.set_root(root);
    b.g
}

struct Builder {
    g: Grammar,
    expr_keywords: Vec<Keyword>,
}

impl Builder {
    fn kw(&mut self, k: Keyword, vs: &[Variant], children: Vec<NodeId>) -> NodeId {
        let rules = vs.iter().map(|v| v.name().to_string()).collect();
        self.g.keyword(k.ident(), rules, children)
    }

    fn kw_all(&mut self, k: Keyword, children: Vec<NodeId>) -> NodeId {
        self.kw(k, &variants(k), children)
    }

    fn query(&mut self, depth: usize, next: NodeId) -> NodeId {
        let ordered = self.kw_all(Keyword::OrderBy, vec![next]);
        let order = self.g.choice(vec![next, ordered]);
        let block = self.block(depth, order);
        let mut alts = vec![block];
        for op in SetOp::ALL {
            alts.push(self.kw_all(Keyword::SetOp(op), vec![block]));
        }
        self.g.choice(alts)
    }

    fn block(&mut self, depth: usize, next: NodeId) -> NodeId {
        let distinct = self.kw_all(Keyword::Distinct, vec![next]);
        let all = self.kw_all(Keyword::All, vec![next]);
        let filter = self.g.choice(vec![next, distinct, all]);
        let select = self.kw_all(Keyword::Select, vec![filter]);
        let mut aggs = vec![select];
        for f in AggFunc::ALL {
            aggs.push(self.kw_all(Keyword::Agg(f), vec![select]));
        }
        let agg = self.g.choice(aggs);
        let having_cond = self.cond(Keyword::Having, depth, agg);
        let having = self.g.choice(vec![agg, having_cond]);
        let grouped = self.kw_all(Keyword::GroupBy, vec![having]);
        let group = self.g.choice(vec![agg, grouped]);
        let where_cond = self.cond(Keyword::Where, depth, group);
        let filter_where = self.g.choice(vec![group, where_cond]);
        let on_cond = self.cond(Keyword::On, depth, filter_where);
        let mut joins = vec![filter_where];
        for kind in JoinKind::ALL {
            let after = if kind.is_qualified() { on_cond } else { filter_where };
            joins.push(self.kw_all(Keyword::Join(kind), vec![after]));
        }
        let join = self.g.choice(joins);
        let from = self.kw_all(Keyword::From, vec![join]);
        self.g.choice(vec![filter_where, from])
    }

    /// A condition clause followed by the rule of its root operator, if any.
    fn cond(&mut self, clause: Keyword, depth: usize, next: NodeId) -> NodeId {
        let mut roots = vec![next];
        let nested = if clause == Keyword::Where && depth < SUBQUERY_DEPTH_CAP {
            Some(self.query(depth + 1, next))
        } else {
            None
        };
        for k in self.expr_keywords.clone() {
            let mut vs = variants(k);
            if let Some(sub) = nested {
                if vs.contains(&Variant::Subquery) {
                    roots.push(self.kw(k, &[Variant::Subquery], vec![sub]));
                    vs.retain(|v| *v != Variant::Subquery);
                }
            }
            if !vs.is_empty() {
                roots.push(self.kw(k, &vs, vec![next]));
            }
        }
        let root = self.g.choice(roots);
        self.kw_all(clause, vec![root])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn single_path_is_a_product() {
        let mut g = Grammar::new();
        let leaf = g.leaf();
        let b = g.keyword_n("B", 2, vec![leaf]);
        let a = g.keyword_n("A", 3, vec![b]);
        g.set_root(a);
        assert_eq!(count_composite_rules(&g), Ok(6));
        assert_eq!(count_composite_rules_dfs(&g), Ok(6));
    }

    #[test]
    fn disjoint_paths_add() {
        let mut g = Grammar::new();
        let l1 = g.leaf();
        let l2 = g.leaf();
        let b = g.keyword_n("B", 2, vec![l1]);
        let a = g.keyword_n("A", 3, vec![b]);
        let c = g.keyword_n("C", 2, vec![l2]);
        let root = g.choice(vec![a, c]);
        g.set_root(root);
        assert_eq!(count_composite_rules(&g), Ok(8));
        assert_eq!(count_composite_rules_dfs(&g), Ok(8));
    }

    #[test]
    fn keyword_free_grammar_counts_one() {
        let mut g = Grammar::new();
        let l = g.leaf();
        let root = g.choice(vec![l]);
        g.set_root(root);
        assert_eq!(count_composite_rules(&g), Ok(1));
        assert_eq!(count_composite_rules_dfs(&g), Ok(1));
    }

    #[test]
    fn recursion_without_cap_is_an_error() {
        let mut g = Grammar::new();
        let leaf = g.leaf();
        let q = g.keyword_n("SELECT", 2, vec![leaf]);
        let w = g.keyword_n("WHERE", 1, vec![q]);
        g.add_child(q, w);
        g.set_root(q);
        assert_eq!(count_composite_rules(&g), Err(GrammarError::Unbounded(q)));
        assert_eq!(count_composite_rules_dfs(&g), Err(GrammarError::Unbounded(q)));
    }

    #[test]
    fn desk_grammar_is_finite_and_accepts_queries() {
        let g = desk_grammar();
        let n = count_composite_rules(&g).unwrap();
        assert!(n > 1_000_000, "{n}");
        for sql in [
            "SELECT t.b FROM t",
            "SELECT NULL",
            "SELECT 1 WHERE TRUE",
            "SELECT COUNT(*) FROM t GROUP BY t.a HAVING t.a > 1 ORDER BY a DESC",
            "SELECT DISTINCT t.a FROM t LEFT JOIN u ON t.a = u.a WHERE NOT t.a",
            "SELECT t.a FROM t UNION SELECT u.a FROM u",
            "(SELECT t.a FROM t UNION SELECT u.a FROM u) EXCEPT ALL SELECT 1 ORDER BY a ASC",
            "SELECT * FROM t, u NATURAL JOIN v WHERE EXISTS (SELECT * FROM u WHERE u.a IN (SELECT v.a FROM v WHERE EXISTS (SELECT 1)))",
            "SELECT * FROM t WHERE t.a NOT IN (1, 2)",
            "SELECT * FROM t WHERE t.a",
        ] {
            let sig = signature_of(&parse(sql).unwrap());
            assert!(g.accepts(&sig), "{sql}: {sig}");
        }
    }

    #[test]
    fn demo_signature() {
        let sig = signature_of(&parse("SELECT t.b FROM t").unwrap());
        assert_eq!(sig.to_string(), "FROM/single-table SELECT/column-list");
    }
}
