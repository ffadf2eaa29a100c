//! Keyword, rule and composite-rule coverage.

pub mod grammar;
pub mod ledger;
pub mod rules;

pub use grammar::{
    count_composite_rules, count_composite_rules_dfs, desk_grammar, signature_of, CompositeSignature, Grammar,
    GrammarError, Node, NodeId, SUBQUERY_DEPTH_CAP,
};
pub use ledger::{
    total_keywords, total_rules, CoverageLedger, CoverageReport, Criterion, CriterionLine, Increase, Observation,
    Totals,
};
pub use rules::{rule_universe, rules_of, RuleId, Variant};
