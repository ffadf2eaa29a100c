use sqlsem_core::ast::{AggFunc, ArithOp, DataType, Func, IsTest, JoinKind, SetOp};
use sqlsem_core::JoinMode;

/// Which language features generation and mutation may produce.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub funcs: Vec<Func>,
    pub arith: Vec<ArithOp>,
    pub aggregates: Vec<AggFunc>,
    pub set_ops: Vec<SetOp>,
    pub joins: Vec<JoinKind>,
    pub casts: Vec<DataType>,
    pub is_tests: Vec<IsTest>,
    pub xor: bool,
    pub case: bool,
    pub concat: bool,
    pub subqueries: bool,
    /// Subquery nesting generated from scratch.
    pub max_subquery_depth: usize,
    /// Operator nesting of freshly generated expressions.
    pub max_expr_depth: usize,
    pub floats: bool,
    pub strings: Vec<&'static str>,
    /// Allow `SELECT` without `FROM`.
    pub from_less: bool,
    pub order_by: bool,
    pub group_by: bool,
    /// Allow set-operation operands that print parenthesized (a nested set
    /// operation on the right, or an ordered operand).
    pub parenthesized_operands: bool,
    /// Join semantics the generated queries are validated under.
    pub join_mode: JoinMode,
}

/// Strings chosen to hit the cast rules: empty, alphabetic, numeric
/// prefixes, signs, decimals and padding.
pub const STRINGS: [&str; 10] = ["", "a", "abc", "hhhh", "Hello", "12abc", "-12", "3.5", " x ", "0"];

impl GenConfig {
    /// Every feature of the reference semantics.
    pub fn full() -> Self {
        GenConfig {
            funcs: Func::ALL.to_vec(),
            arith: ArithOp::ALL.to_vec(),
            aggregates: AggFunc::ALL.to_vec(),
            set_ops: SetOp::ALL.to_vec(),
            joins: JoinKind::ALL.to_vec(),
            casts: DataType::ALL.to_vec(),
            is_tests: vec![IsTest::True, IsTest::False, IsTest::Unknown, IsTest::Null],
            xor: true,
            case: true,
            concat: true,
            subqueries: true,
            max_subquery_depth: 2,
            max_expr_depth: 3,
            floats: true,
            strings: STRINGS.to_vec(),
            from_less: true,
            order_by: true,
            group_by: true,
            parenthesized_operands: true,
            join_mode: JoinMode::Standard,
        }
    }

    /// The part of the language a conventional embedded engine evaluates
    /// the same way: integers only, no string/number coercion, no
    /// implementation-defined functions, and no joins whose meaning depends
    /// on the join mode.
    pub fn conformant_core() -> Self {
        GenConfig {
            funcs: vec![Func::Abs, Func::Length],
            arith: vec![ArithOp::Add, ArithOp::Sub, ArithOp::Mul],
            aggregates: vec![AggFunc::Max, AggFunc::Min, AggFunc::Sum, AggFunc::Count],
            set_ops: vec![SetOp::Union, SetOp::UnionAll, SetOp::Intersect, SetOp::Except],
            joins: vec![JoinKind::Cross, JoinKind::Inner, JoinKind::Left],
            casts: Vec::new(),
            is_tests: vec![IsTest::True, IsTest::False, IsTest::Null],
            xor: false,
            case: true,
            concat: false,
            subqueries: true,
            max_subquery_depth: 1,
            max_expr_depth: 2,
            floats: false,
            strings: Vec::new(),
            from_less: false,
            order_by: true,
            group_by: false,
            parenthesized_operands: false,
            join_mode: JoinMode::Standard,
        }
    }
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig::full()
    }
}
