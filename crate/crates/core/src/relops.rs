//! Table-level operators over bag tables.

use std::collections::HashMap;

use crate::ast::*;
use crate::error::QueryError;
use crate::eval::{self, holds, num_cmp, EvalEnv};
use crate::options::{ExecOptions, Fault, JoinMode};
use crate::printer::print_expr;
use crate::table::{resolve_in, Attribute, BagTable, Row};
use crate::value::{cast_to_num, Value};

/// Column layout of a shared-column (natural-style) join.
#[derive(Debug, Clone)]
pub struct NaturalLayout {
    /// Index pairs (left, right) of columns with the same name.
    pub shared: Vec<(usize, usize)>,
    pub rest_left: Vec<usize>,
    pub rest_right: Vec<usize>,
}

impl NaturalLayout {
    pub fn new(a1: &[Attribute], a2: &[Attribute]) -> Self {
        let mut shared = Vec::new();
        for (i, a) in a1.iter().enumerate() {
            if let Some(j) = a2.iter().position(|b| b.name == a.name) {
                shared.push((i, j));
            }
        }
        let rest_left = (0..a1.len()).filter(|i| !shared.iter().any(|s| s.0 == *i)).collect();
        let rest_right = (0..a2.len()).filter(|j| !shared.iter().any(|s| s.1 == *j)).collect();
        NaturalLayout {
            shared,
            rest_left,
            rest_right,
        }
    }

    /// Shared columns once (addressable through either side's qualifier),
    /// then the left's remaining columns, then the right's.
    pub fn attributes(&self, a1: &[Attribute], a2: &[Attribute]) -> Vec<Attribute> {
        let mut out: Vec<Attribute> = self
            .shared
            .iter()
            .map(|&(i, j)| {
                let mut q = a1[i].qualifiers.clone();
                q.extend(a2[j].qualifiers.iter().cloned());
                Attribute {
                    qualifiers: q,
                    name: a1[i].name.clone(),
                }
            })
            .collect();
        out.extend(self.rest_left.iter().map(|&i| a1[i].clone()));
        out.extend(self.rest_right.iter().map(|&j| a2[j].clone()));
        out
    }

    /// Shared values agree: identical and non-NULL.
    pub fn matches(&self, r1: &[Value], r2: &[Value]) -> bool {
        self.shared
            .iter()
            .all(|&(i, j)| !r1[i].is_null() && r1[i] == r2[j])
    }

    /// Output row; `None` on a side means that side is padded with NULLs.
    /// Shared values come from whichever side is present (left first).
    pub fn merge(&self, r1: Option<&[Value]>, r2: Option<&[Value]>) -> Row {
        let mut out = Vec::new();
        for &(i, j) in &self.shared {
            out.push(match (r1, r2) {
                (Some(a), _) => a[i].clone(),
                (None, Some(b)) => b[j].clone(),
                (None, None) => Value::Null,
            });
        }
        for &i in &self.rest_left {
            out.push(r1.map_or(Value::Null, |a| a[i].clone()));
        }
        for &j in &self.rest_right {
            out.push(r2.map_or(Value::Null, |b| b[j].clone()));
        }
        out
    }
}

/// Result schema of a join under `mode`.
pub fn join_attributes(kind: JoinKind, a1: &[Attribute], a2: &[Attribute], mode: JoinMode) -> Vec<Attribute> {
    let natural_style = kind == JoinKind::Natural
        || (mode == JoinMode::Padded && matches!(kind, JoinKind::Left | JoinKind::Right | JoinKind::Full));
    if natural_style {
        NaturalLayout::new(a1, a2).attributes(a1, a2)
    } else {
        a1.iter().chain(a2).cloned().collect()
    }
}

fn concat(r1: &[Value], r2: &[Value]) -> Row {
    r1.iter().chain(r2).cloned().collect()
}

fn nulls(n: usize) -> Vec<Value> {
    vec![Value::Null; n]
}

pub fn cross(t1: &BagTable, t2: &BagTable) -> BagTable {
    let attrs = t1.attributes.iter().chain(&t2.attributes).cloned().collect();
    let mut rows = Vec::with_capacity(t1.len() * t2.len());
    for r1 in &t1.rows {
        for r2 in &t2.rows {
            rows.push(concat(r1, r2));
        }
    }
    BagTable::new(attrs, rows)
}

pub fn op_join(
    kind: JoinKind,
    t1: &BagTable,
    t2: &BagTable,
    on: Option<&ValueExpr>,
    env: &EvalEnv,
) -> Result<BagTable, QueryError> {
    if kind.is_qualified() != on.is_some() {
        return Err(QueryError::Semantic(format!(
            "{} {} an ON condition",
            kind.sql(),
            if kind.is_qualified() { "requires" } else { "does not take" }
        )));
    }
    let mode = env.opts.join_mode;
    match kind {
        JoinKind::Cross => Ok(cross(t1, t2)),
        JoinKind::Inner => op_where_having(on.unwrap(), cross(t1, t2), env),
        JoinKind::Natural => Ok(natural_join(t1, t2)),
        JoinKind::Left | JoinKind::Right | JoinKind::Full => match mode {
            JoinMode::Standard => outer_join_standard(kind, t1, t2, on.unwrap(), env),
            JoinMode::Padded => {
                let padded = outer_join_padded(kind, t1, t2);
                op_where_having(on.unwrap(), padded, env)
            }
        },
    }
}

fn natural_join(t1: &BagTable, t2: &BagTable) -> BagTable {
    let layout = NaturalLayout::new(&t1.attributes, &t2.attributes);
    let attrs = layout.attributes(&t1.attributes, &t2.attributes);
    let mut rows = Vec::new();
    if !layout.shared.is_empty() {
        for r1 in &t1.rows {
            for r2 in &t2.rows {
                if layout.matches(r1, r2) {
                    rows.push(layout.merge(Some(r1), Some(r2)));
                }
            }
        }
    }
    BagTable::new(attrs, rows)
}

fn outer_join_padded(kind: JoinKind, t1: &BagTable, t2: &BagTable) -> BagTable {
    let layout = NaturalLayout::new(&t1.attributes, &t2.attributes);
    let attrs = layout.attributes(&t1.attributes, &t2.attributes);
    let mut rows = Vec::new();
    if layout.shared.is_empty() {
        return BagTable::new(attrs, rows);
    }
    let keep_left = matches!(kind, JoinKind::Left | JoinKind::Full);
    let keep_right = matches!(kind, JoinKind::Right | JoinKind::Full);
    let mut right_matched = vec![false; t2.len()];
    for r1 in &t1.rows {
        let mut matched = false;
        for (j, r2) in t2.rows.iter().enumerate() {
            if layout.matches(r1, r2) {
                matched = true;
                right_matched[j] = true;
                rows.push(layout.merge(Some(r1), Some(r2)));
            }
        }
        if !matched && keep_left {
            rows.push(layout.merge(Some(r1), None));
        }
    }
    if keep_right {
        for (j, r2) in t2.rows.iter().enumerate() {
            if !right_matched[j] {
                rows.push(layout.merge(None, Some(r2)));
            }
        }
    }
    BagTable::new(attrs, rows)
}

fn outer_join_standard(
    kind: JoinKind,
    t1: &BagTable,
    t2: &BagTable,
    on: &ValueExpr,
    env: &EvalEnv,
) -> Result<BagTable, QueryError> {
    let attrs: Vec<Attribute> = t1.attributes.iter().chain(&t2.attributes).cloned().collect();
    let keep_left = matches!(kind, JoinKind::Left | JoinKind::Full);
    let keep_right = matches!(kind, JoinKind::Right | JoinKind::Full);
    let mut rows = Vec::new();
    let mut right_matched = vec![false; t2.len()];
    for r1 in &t1.rows {
        let mut matched = false;
        for (j, r2) in t2.rows.iter().enumerate() {
            let row = concat(r1, r2);
            if holds(on, &env.push(&attrs, &row))? {
                matched = true;
                right_matched[j] = true;
                rows.push(row);
            }
        }
        if !matched && keep_left {
            rows.push(concat(r1, &nulls(t2.arity())));
        }
    }
    if keep_right {
        for (j, r2) in t2.rows.iter().enumerate() {
            if !right_matched[j] {
                rows.push(concat(&nulls(t1.arity()), r2));
            }
        }
    }
    Ok(BagTable::new(attrs, rows))
}

/// Row counts in first-appearance order.
fn ordered_counts(rows: &[Row]) -> (Vec<&Row>, HashMap<&Row, usize>) {
    let mut order = Vec::new();
    let mut counts = HashMap::new();
    for r in rows {
        let c = counts.entry(r).or_insert(0);
        if *c == 0 {
            order.push(r);
        }
        *c += 1;
    }
    (order, counts)
}

pub fn op_collection(op: SetOp, t1: &BagTable, t2: &BagTable, opts: &ExecOptions) -> Result<BagTable, QueryError> {
    if t1.arity() != t2.arity() {
        return Err(QueryError::Arity {
            left: t1.arity(),
            right: t2.arity(),
        });
    }
    let op = if op == SetOp::UnionAll && opts.has(Fault::UnionAllDedup) {
        SetOp::Union
    } else {
        op
    };
    let (order1, c1) = ordered_counts(&t1.rows);
    let (order2, c2) = ordered_counts(&t2.rows);
    let m2 = |r: &Row| c2.get(r).copied().unwrap_or(0);
    let mut rows: Vec<Row> = Vec::new();
    let mut emit = |r: &Row, n: usize| rows.extend(std::iter::repeat_n(r.clone(), n));
    match op {
        SetOp::UnionAll => {
            for r in t1.rows.iter().chain(&t2.rows) {
                emit(r, 1);
            }
        }
        SetOp::Union => {
            for r in &order1 {
                emit(r, 1);
            }
            for r in &order2 {
                if !c1.contains_key(*r) {
                    emit(r, 1);
                }
            }
        }
        SetOp::Intersect => {
            for r in &order1 {
                if m2(r) > 0 {
                    emit(r, 1);
                }
            }
        }
        SetOp::IntersectAll => {
            for r in &order1 {
                emit(r, c1[*r].min(m2(r)));
            }
        }
        SetOp::Except => {
            for r in &order1 {
                if m2(r) == 0 {
                    emit(r, 1);
                }
            }
        }
        SetOp::ExceptAll => {
            for r in &order1 {
                emit(r, c1[*r].saturating_sub(m2(r)));
            }
            if opts.has(Fault::ExceptAllNoClamp) {
                for r in &order2 {
                    let a = c1.get(*r).copied().unwrap_or(0);
                    emit(r, c2[*r].saturating_sub(a));
                }
            }
        }
    }
    Ok(BagTable::new(t1.attributes.clone(), rows))
}

/// DISTINCT (`true`) or ALL (`false`).
pub fn op_filter(distinct: bool, t: BagTable) -> BagTable {
    if !distinct {
        return t;
    }
    let (order, _) = ordered_counts(&t.rows);
    let rows = order.into_iter().cloned().collect();
    BagTable {
        rows,
        ..t.clone()
    }
}

/// Aggregates a one-column table (or, for `COUNT(*)`, counts rows of any
/// table when `star` is set) into a single value.
pub fn op_aggregate(f: AggFunc, t: &BagTable, star: bool, opts: &ExecOptions) -> Result<Value, QueryError> {
    if star {
        if f != AggFunc::Count {
            return Err(QueryError::Semantic(format!("{}(*) is not supported", f.sql())));
        }
        return Ok(Value::Int(t.len() as i64));
    }
    if t.arity() != 1 {
        return Err(QueryError::Semantic(format!(
            "{} takes exactly one column, got {}",
            f.sql(),
            t.arity()
        )));
    }
    let col = t.rows.iter().map(|r| &r[0]);
    if f == AggFunc::Count {
        let n = if opts.has(Fault::CountNulls) {
            t.len()
        } else {
            col.filter(|v| !v.is_null()).count()
        };
        return Ok(Value::Int(n as i64));
    }
    let present: Vec<&Value> = col.filter(|v| !v.is_null()).collect();
    if present.is_empty() {
        return Ok(Value::Null);
    }
    match f {
        AggFunc::Max | AggFunc::Min => {
            let mut best = present[0];
            for v in &present[1..] {
                let o = num_cmp(&cast_to_num(v), &cast_to_num(best));
                let better = if f == AggFunc::Max { o.is_gt() } else { o.is_lt() };
                if better {
                    best = v;
                }
            }
            Ok(best.clone())
        }
        AggFunc::Sum | AggFunc::Avg => {
            let mut acc = Value::Int(0);
            for v in &present {
                acc = eval::arith(ArithOp::Add, &acc, &cast_to_num(v))?;
            }
            if f == AggFunc::Sum {
                Ok(acc)
            } else {
                eval::arith(ArithOp::Div, &acc, &Value::Int(present.len() as i64))
            }
        }
        AggFunc::Count => unreachable!(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupedTable {
    pub key_index: usize,
    pub attributes: Vec<Attribute>,
    /// Groups in order of first appearance of their key.
    pub groups: Vec<(Value, BagTable)>,
}

pub fn op_group_by(col: &ColumnRef, t: &BagTable) -> Result<GroupedTable, QueryError> {
    let key_index = t.resolve(col)?;
    let mut index: HashMap<&Value, usize> = HashMap::new();
    let mut groups: Vec<(Value, BagTable)> = Vec::new();
    for r in &t.rows {
        let k = &r[key_index];
        let g = *index.entry(k).or_insert_with(|| {
            groups.push((k.clone(), BagTable::empty(t.attributes.clone())));
            groups.len() - 1
        });
        groups[g].1.rows.push(r.clone());
    }
    Ok(GroupedTable {
        key_index,
        attributes: t.attributes.clone(),
        groups,
    })
}

/// Output attribute for a select item evaluated over `attrs`.
pub fn item_attribute(e: &ValueExpr, attrs: &[Attribute]) -> Attribute {
    if let ValueExpr::Column(c) = e {
        if let Ok(Some(i)) = resolve_in(attrs, c) {
            return attrs[i].clone();
        }
    }
    Attribute::computed(print_expr(e))
}

pub fn select_attributes(list: &SelectList, attrs: &[Attribute]) -> Vec<Attribute> {
    match list {
        SelectList::Star => attrs.to_vec(),
        SelectList::Items(items) => items.iter().map(|e| item_attribute(e, attrs)).collect(),
    }
}

/// A select list made of a single bare NULL yields no rows.
pub fn is_null_select(list: &SelectList) -> bool {
    matches!(list, SelectList::Items(items) if items.len() == 1 && items[0] == ValueExpr::Null)
}

pub fn op_select(list: &SelectList, t: &BagTable, env: &EvalEnv) -> Result<BagTable, QueryError> {
    let attrs = select_attributes(list, &t.attributes);
    let items = match list {
        SelectList::Star => return Ok(BagTable::new(attrs, t.rows.clone())),
        SelectList::Items(items) => items,
    };
    if is_null_select(list) {
        return Ok(BagTable::empty(attrs));
    }
    let mut rows = Vec::with_capacity(t.len());
    for r in &t.rows {
        let inner = env.push(&t.attributes, r);
        rows.push(
            items
                .iter()
                .map(|e| eval::eval(e, &inner))
                .collect::<Result<Row, _>>()?,
        );
    }
    Ok(BagTable::new(attrs, rows))
}

/// Keeps the rows on which `cond` is TRUE.
pub fn op_where_having(cond: &ValueExpr, t: BagTable, env: &EvalEnv) -> Result<BagTable, QueryError> {
    let mut keep = Vec::with_capacity(t.len());
    for r in &t.rows {
        keep.push(holds(cond, &env.push(&t.attributes, r))?);
    }
    let mut k = keep.into_iter();
    let BagTable {
        name,
        attributes,
        rows,
    } = t;
    let rows = rows.into_iter().filter(|_| k.next().unwrap()).collect();
    Ok(BagTable {
        name,
        attributes,
        rows,
    })
}

/// Stable sort on one column by numeric value. NULLs sort first ascending
/// and last descending.
pub fn op_order_by(col: &ColumnRef, dir: Direction, t: BagTable, opts: &ExecOptions) -> Result<BagTable, QueryError> {
    let i = t.resolve(col)?;
    let nulls_last_asc = opts.has(Fault::NullsLastAsc);
    let mut keyed: Vec<(Value, Row)> = t
        .rows
        .into_iter()
        .map(|r| (cast_to_num(&r[i]), r))
        .collect();
    keyed.sort_by(|(a, _), (b, _)| {
        use std::cmp::Ordering::*;
        let asc = match (a.is_null(), b.is_null()) {
            (true, true) => Equal,
            (true, false) => {
                if nulls_last_asc {
                    Greater
                } else {
                    Less
                }
            }
            (false, true) => {
                if nulls_last_asc {
                    Less
                } else {
                    Greater
                }
            }
            (false, false) => num_cmp(a, b),
        };
        match dir {
            Direction::Asc => asc,
            Direction::Desc => asc.reverse(),
        }
    });
    Ok(BagTable {
        name: t.name,
        attributes: t.attributes,
        rows: keyed.into_iter().map(|(_, r)| r).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{multiplicity, Catalog};

    fn ints(name: &str, vals: &[i64]) -> BagTable {
        BagTable::base(name, &["x"], vals.iter().map(|v| vec![Value::Int(*v)]).collect())
    }

    fn col(t: &BagTable) -> Vec<i64> {
        let mut v: Vec<i64> = t
            .rows
            .iter()
            .map(|r| match r[0] {
                Value::Int(i) => i,
                _ => panic!(),
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn bag_operators() {
        let o = ExecOptions::default();
        let a = ints("a", &[1, 1, 2]);
        assert_eq!(col(&op_collection(SetOp::ExceptAll, &a, &ints("b", &[1]), &o).unwrap()), vec![1, 2]);
        assert_eq!(
            col(&op_collection(SetOp::IntersectAll, &a, &ints("b", &[1, 1, 1]), &o).unwrap()),
            vec![1, 1]
        );
        assert_eq!(col(&op_collection(SetOp::Union, &a, &a, &o).unwrap()), vec![1, 2]);
        assert_eq!(col(&op_filter(true, a.clone())), vec![1, 2]);
        assert_eq!(op_filter(false, a.clone()), a);
        let bad = BagTable::base("c", &["x", "y"], vec![]);
        assert!(matches!(
            op_collection(SetOp::Union, &a, &bad, &o),
            Err(QueryError::Arity { left: 1, right: 2 })
        ));
    }

    #[test]
    fn aggregates() {
        let o = ExecOptions::default();
        assert_eq!(op_aggregate(AggFunc::Max, &ints("t", &[4, 5, 8]), false, &o).unwrap(), Value::Int(8));
        assert_eq!(op_aggregate(AggFunc::Count, &ints("t", &[1, 1, 2]), false, &o).unwrap(), Value::Int(3));
        assert_eq!(op_aggregate(AggFunc::Avg, &ints("t", &[1, 2, 3, 4]), false, &o).unwrap(), Value::Float(2.5));
        let empty = ints("t", &[]);
        assert_eq!(op_aggregate(AggFunc::Sum, &empty, false, &o).unwrap(), Value::Null);
        assert_eq!(op_aggregate(AggFunc::Count, &empty, false, &o).unwrap(), Value::Int(0));
        let with_null = BagTable::base("t", &["x"], vec![vec![Value::Null], vec![Value::Int(3)]]);
        assert_eq!(op_aggregate(AggFunc::Count, &with_null, false, &o).unwrap(), Value::Int(1));
        assert_eq!(op_aggregate(AggFunc::Count, &with_null, true, &o).unwrap(), Value::Int(2));
        assert_eq!(op_aggregate(AggFunc::Min, &with_null, false, &o).unwrap(), Value::Int(3));
    }

    #[test]
    fn grouping() {
        let g = op_group_by(&ColumnRef::bare("x"), &ints("t", &[1, 1, 2])).unwrap();
        let sizes: Vec<usize> = g.groups.iter().map(|(_, t)| t.len()).collect();
        assert_eq!(sizes, vec![2, 1]);
        let nulls = BagTable::base("t", &["x"], vec![vec![Value::Null], vec![Value::Null]]);
        assert_eq!(op_group_by(&ColumnRef::bare("x"), &nulls).unwrap().groups.len(), 1);
    }

    #[test]
    fn ordering_is_stable_permutation() {
        let o = ExecOptions::default();
        let t = BagTable::base(
            "t",
            &["b", "tag"],
            vec![
                vec![Value::Int(4), Value::Int(0)],
                vec![Value::Int(8), Value::Int(1)],
                vec![Value::Null, Value::Int(2)],
                vec![Value::Int(5), Value::Int(3)],
                vec![Value::Int(4), Value::Int(4)],
            ],
        );
        let asc = op_order_by(&ColumnRef::bare("b"), Direction::Asc, t.clone(), &o).unwrap();
        let tags: Vec<&Value> = asc.rows.iter().map(|r| &r[1]).collect();
        assert_eq!(tags, [&Value::Int(2), &Value::Int(0), &Value::Int(4), &Value::Int(3), &Value::Int(1)]);
        assert!(asc.multiset_eq(&t));
        let desc = op_order_by(&ColumnRef::bare("b"), Direction::Desc, t.clone(), &o).unwrap();
        assert_eq!(desc.rows.last().unwrap()[0], Value::Null);
        assert_eq!(desc.rows[0][0], Value::Int(8));
    }

    #[test]
    fn joins() {
        let cat = Catalog::new();
        let o = ExecOptions::default();
        let env = EvalEnv::new(&cat, &o);
        let t1 = BagTable::base("t1", &["a"], vec![vec![Value::Int(1)], vec![Value::Int(2)], vec![Value::Int(3)]]);
        let t2 = BagTable::base("t2", &["b"], vec![vec![Value::Int(1)], vec![Value::Int(2)]]);
        assert_eq!(op_join(JoinKind::Cross, &t1, &t2, None, &env).unwrap().len(), 6);
        // no shared columns: natural join is empty
        assert!(op_join(JoinKind::Natural, &t1, &t2, None, &env).unwrap().is_empty());
        let inner_true = op_join(JoinKind::Inner, &t1, &t2, Some(&ValueExpr::Bool(true)), &env).unwrap();
        assert!(inner_true.multiset_eq(&cross(&t1, &t2)));
        let on = ValueExpr::compare(CompareOp::Eq, ValueExpr::col("t1", "a"), ValueExpr::col("t2", "b"));
        let left = op_join(JoinKind::Left, &t1, &t2, Some(&on), &env).unwrap();
        assert_eq!(multiplicity(&left, &[Value::Int(3), Value::Null]), 1);
        assert_eq!(left.len(), 3);
    }

    #[test]
    fn right_join_on_false_pads_left_side() {
        let cat = Catalog::new();
        let o = ExecOptions::default();
        let env = EvalEnv::new(&cat, &o);
        let t2 = BagTable::base("t2", &["c0"], vec![vec![Value::Int(960364164)]]);
        let t0 = BagTable::base("t0", &["c0"], vec![vec![Value::Null]]);
        let r = op_join(JoinKind::Right, &t2, &t0, Some(&ValueExpr::Int(0)), &env).unwrap();
        assert_eq!(r.rows, vec![vec![Value::Null, Value::Null]]);
    }
}
