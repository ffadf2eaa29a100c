//! Pre-order traversal over every query, `SELECT` block and expression of a
//! query, with the columns in scope at each point. Mutations count the
//! applicable sites in one pass and rewrite the chosen one in a second.

use sqlsem_core::ast::*;
use sqlsem_core::table::Catalog;

/// Where an expression sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Item,
    On,
    Where,
    Having,
    /// Operand of another expression.
    Operand,
}

#[derive(Debug, Clone)]
pub struct Ctx {
    /// Columns an expression here may reference.
    pub scope: Vec<ColumnRef>,
    /// Columns of this block's FROM (for `Select` sites) or of the
    /// enclosing block (for expressions).
    pub local: Vec<ColumnRef>,
    /// Columns visible from enclosing blocks.
    pub outer: Vec<ColumnRef>,
    /// Subquery nesting (0 at top level).
    pub depth: usize,
    pub slot: Slot,
}

pub enum Site<'a> {
    Query(&'a mut Query),
    Select(&'a mut Select),
    Expr(&'a mut ValueExpr),
}

/// Returns true to stop the traversal.
pub type Visitor<'f> = dyn FnMut(Site<'_>, &Ctx) -> bool + 'f;

pub fn columns_of(catalog: &Catalog, table: &str) -> Vec<ColumnRef> {
    catalog
        .get(table)
        .map(|t| t.attributes.iter().map(|a| ColumnRef::new(table, a.name.as_str())).collect())
        .unwrap_or_default()
}

pub fn from_columns(catalog: &Catalog, s: &Select) -> Vec<ColumnRef> {
    s.table_names().iter().flat_map(|t| columns_of(catalog, t)).collect()
}

pub fn walk(q: &mut Query, catalog: &Catalog, f: &mut Visitor) -> bool {
    walk_query(q, catalog, &[], 0, f)
}

fn walk_query(q: &mut Query, catalog: &Catalog, outer: &[ColumnRef], depth: usize, f: &mut Visitor) -> bool {
    let ctx = Ctx {
        scope: outer.to_vec(),
        local: Vec::new(),
        outer: outer.to_vec(),
        depth,
        slot: Slot::Item,
    };
    if f(Site::Query(q), &ctx) {
        return true;
    }
    if let QueryBody::SetOp { left, right, .. } = &mut q.body {
        return walk_query(left, catalog, outer, depth, f) || walk_query(right, catalog, outer, depth, f);
    }
    let QueryBody::Select(s) = &mut q.body else { unreachable!() };
    walk_select(s, catalog, outer, depth, f)
}

fn walk_select(s: &mut Select, catalog: &Catalog, outer: &[ColumnRef], depth: usize, f: &mut Visitor) -> bool {
    let local = from_columns(catalog, s);
    let mut scope = outer.to_vec();
    scope.extend(local.iter().cloned());
    let ctx = Ctx {
        scope: scope.clone(),
        local: local.clone(),
        outer: outer.to_vec(),
        depth,
        slot: Slot::Item,
    };
    if f(Site::Select(s), &ctx) {
        return true;
    }
    // Grouped, non-aggregate blocks may only use the key.
    let item_scope = match (&s.group_by, s.aggregate()) {
        (Some(k), None) => {
            let mut v = outer.to_vec();
            v.push(k.clone());
            v
        }
        _ => scope.clone(),
    };
    let having_scope = match &s.group_by {
        Some(k) => {
            let mut v = outer.to_vec();
            v.push(k.clone());
            v
        }
        None => scope.clone(),
    };
    let mk = |scope: &[ColumnRef], slot| Ctx {
        scope: scope.to_vec(),
        local: local.clone(),
        outer: outer.to_vec(),
        depth,
        slot,
    };
    if let SelectList::Items(items) = &mut s.items {
        let c = mk(&item_scope, Slot::Item);
        for e in items {
            if walk_expr(e, catalog, &c, f) {
                return true;
            }
        }
    }
    if let Some(refs) = &mut s.from {
        for r in refs {
            if let TableRef::Join(j) = r {
                let mut on_scope = outer.to_vec();
                on_scope.extend(columns_of(catalog, &j.left));
                on_scope.extend(columns_of(catalog, &j.right));
                if let Some(on) = &mut j.on {
                    if walk_expr(on, catalog, &mk(&on_scope, Slot::On), f) {
                        return true;
                    }
                }
            }
        }
    }
    if let Some(w) = &mut s.where_clause {
        if walk_expr(w, catalog, &mk(&scope, Slot::Where), f) {
            return true;
        }
    }
    if let Some(h) = &mut s.having {
        if walk_expr(h, catalog, &mk(&having_scope, Slot::Having), f) {
            return true;
        }
    }
    false
}

fn walk_expr(e: &mut ValueExpr, catalog: &Catalog, ctx: &Ctx, f: &mut Visitor) -> bool {
    if f(Site::Expr(e), ctx) {
        return true;
    }
    let inner = Ctx {
        slot: Slot::Operand,
        ..ctx.clone()
    };
    for c in e.children_mut() {
        if walk_expr(c, catalog, &inner, f) {
            return true;
        }
    }
    for q in e.subqueries_mut() {
        if walk_query(q, catalog, &ctx.scope, ctx.depth + 1, f) {
            return true;
        }
    }
    false
}

/// Number of sites accepted by `pred`.
pub fn count(q: &Query, catalog: &Catalog, pred: &mut dyn FnMut(&Site<'_>, &Ctx) -> bool) -> usize {
    let mut copy = q.clone();
    let mut n = 0;
    walk(&mut copy, catalog, &mut |s, c| {
        if pred(&s, c) {
            n += 1;
        }
        false
    });
    n
}

/// Applies `apply` to the `k`-th site accepted by `pred`; returns what
/// `apply` returned, or false when there are not that many sites.
pub fn apply_nth(
    q: &mut Query,
    catalog: &Catalog,
    k: usize,
    pred: &mut dyn FnMut(&Site<'_>, &Ctx) -> bool,
    apply: &mut dyn FnMut(Site<'_>, &Ctx) -> bool,
) -> bool {
    let mut seen = 0;
    let mut result = false;
    walk(q, catalog, &mut |s, c| {
        if !pred(&s, c) {
            return false;
        }
        if seen == k {
            result = apply(s, c);
            return true;
        }
        seen += 1;
        false
    });
    result
}

/// Traversal indices of the sites accepted by `pred`.
pub fn positions(q: &Query, catalog: &Catalog, pred: &mut dyn FnMut(&Site<'_>, &Ctx) -> bool) -> Vec<usize> {
    let mut copy = q.clone();
    let mut i = 0;
    let mut out = Vec::new();
    walk(&mut copy, catalog, &mut |s, c| {
        if pred(&s, c) {
            out.push(i);
        }
        i += 1;
        false
    });
    out
}

/// Applies `apply` to the site at traversal index `index`.
pub fn apply_at(q: &mut Query, catalog: &Catalog, index: usize, apply: &mut dyn FnMut(Site<'_>, &Ctx) -> bool) -> bool {
    let mut i = 0;
    let mut result = false;
    walk(q, catalog, &mut |s, c| {
        if i == index {
            result = apply(s, c);
            return true;
        }
        i += 1;
        false
    });
    result
}
