use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::grammar::{count_composite_rules, desk_grammar, signature_of, CompositeSignature, SUBQUERY_DEPTH_CAP};
use super::rules::{rule_universe, rules_of, RuleId};
use crate::ast::Query;
use crate::printer::print;
use crate::keyword::{keywords_of, Keyword};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    Keyword,
    Rule,
    Composite,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Keyword, Criterion::Rule, Criterion::Composite];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Keyword => "keyword",
            Criterion::Rule => "rule",
            Criterion::Composite => "composite",
        }
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown criterion `{s}` (expected keyword|rule|composite)"))
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Universe sizes the ratios are taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Totals {
    pub keywords: u128,
    pub rules: u128,
    pub composites: u128,
}

impl Totals {
    /// The sizes of this build's keyword, rule and composite universes.
    pub fn desk() -> Self {
        Totals {
            keywords: total_keywords() as u128,
            rules: total_rules() as u128,
            composites: count_composite_rules(&desk_grammar()).expect("desk grammar is depth-capped"),
        }
    }

    /// The sizes published for the original Prolog semantics.
    pub fn published_scale() -> Self {
        Totals {
            keywords: 138,
            rules: 420,
            composites: 19_000_000,
        }
    }

    pub fn get(&self, c: Criterion) -> u128 {
        match c {
            Criterion::Keyword => self.keywords,
            Criterion::Rule => self.rules,
            Criterion::Composite => self.composites,
        }
    }
}

pub fn total_keywords() -> usize {
    Keyword::universe().len()
}

pub fn total_rules() -> usize {
    rule_universe().len()
}

/// What a single query covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub keywords: BTreeSet<Keyword>,
    pub rules: BTreeSet<RuleId>,
    pub signature: CompositeSignature,
}

impl Observation {
    pub fn of(q: &Query) -> Self {
        Observation {
            keywords: keywords_of(q),
            rules: rules_of(q),
            signature: signature_of(q),
        }
    }
}

/// Which covered sets grew.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Increase {
    pub keyword: bool,
    pub rule: bool,
    pub composite: bool,
}

impl Increase {
    pub fn get(&self, c: Criterion) -> bool {
        match c {
            Criterion::Keyword => self.keyword,
            Criterion::Rule => self.rule,
            Criterion::Composite => self.composite,
        }
    }

    pub fn any(&self) -> bool {
        self.keyword || self.rule || self.composite
    }
}

#[derive(Debug, Clone)]
pub struct CoverageLedger {
    keywords: BTreeSet<Keyword>,
    rules: BTreeSet<RuleId>,
    composites: BTreeSet<CompositeSignature>,
    keyword_counts: BTreeMap<Keyword, usize>,
    seen: BTreeSet<String>,
    queries: usize,
    totals: Totals,
}

impl Default for CoverageLedger {
    fn default() -> Self {
        CoverageLedger::new()
    }
}

impl CoverageLedger {
    pub fn new() -> Self {
        CoverageLedger::with_totals(Totals::desk())
    }

    pub fn with_totals(totals: Totals) -> Self {
        CoverageLedger {
            keywords: BTreeSet::new(),
            rules: BTreeSet::new(),
            composites: BTreeSet::new(),
            keyword_counts: BTreeMap::new(),
            seen: BTreeSet::new(),
            queries: 0,
            totals,
        }
    }

    /// Records `q` once; repeats of an already recorded query are ignored.
    pub fn record(&mut self, q: &Query) -> Increase {
        if !self.seen.insert(print(q)) {
            return Increase::default();
        }
        self.record_observation(Observation::of(q))
    }

    pub fn record_observation(&mut self, o: Observation) -> Increase {
        let inc = self.would_increase_observation(&o);
        self.queries += 1;
        for k in &o.keywords {
            *self.keyword_counts.entry(*k).or_default() += 1;
        }
        self.keywords.extend(o.keywords);
        self.rules.extend(o.rules);
        self.composites.insert(o.signature);
        inc
    }

    /// Dry run of [`record`](Self::record).
    pub fn would_increase(&self, q: &Query) -> Increase {
        self.would_increase_observation(&Observation::of(q))
    }

    pub fn would_increase_observation(&self, o: &Observation) -> Increase {
        Increase {
            keyword: !o.keywords.is_subset(&self.keywords),
            rule: !o.rules.is_subset(&self.rules),
            composite: !self.composites.contains(&o.signature),
        }
    }

    pub fn covered(&self, c: Criterion) -> usize {
        match c {
            Criterion::Keyword => self.keywords.len(),
            Criterion::Rule => self.rules.len(),
            Criterion::Composite => self.composites.len(),
        }
    }

    pub fn total(&self, c: Criterion) -> u128 {
        self.totals.get(c)
    }

    pub fn ratio(&self, c: Criterion) -> f64 {
        ratio(self.covered(c) as u128, self.total(c))
    }

    pub fn covered_keywords(&self) -> &BTreeSet<Keyword> {
        &self.keywords
    }

    pub fn covered_rules(&self) -> &BTreeSet<RuleId> {
        &self.rules
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn report(&self) -> CoverageReport {
        CoverageReport {
            lines: Criterion::ALL
                .into_iter()
                .map(|c| CriterionLine {
                    criterion: c,
                    covered: self.covered(c) as u128,
                    total: self.total(c),
                })
                .collect(),
            keyword_counts: Keyword::universe()
                .into_iter()
                .map(|k| (k.ident(), self.keyword_counts.get(&k).copied().unwrap_or(0)))
                .collect(),
            queries: self.queries,
            depth_cap: SUBQUERY_DEPTH_CAP,
        }
    }
}

fn ratio(covered: u128, total: u128) -> f64 {
    if total == 0 {
        0.0
    } else {
        covered as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionLine {
    pub criterion: Criterion,
    pub covered: u128,
    pub total: u128,
}

impl CriterionLine {
    pub fn ratio(&self) -> f64 {
        ratio(self.covered, self.total)
    }

    /// `COV <criterion> <covered> <total> <ratio>`.
    pub fn machine(&self) -> String {
        let r = self.ratio();
        if r > 0.0 && r < 1e-6 {
            format!("COV {} {} {} {:.6e}", self.criterion, self.covered, self.total, r)
        } else {
            format!("COV {} {} {} {:.6}", self.criterion, self.covered, self.total, r)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub lines: Vec<CriterionLine>,
    /// Number of recorded queries using each keyword, in universe order.
    pub keyword_counts: Vec<(String, usize)>,
    pub queries: usize,
    pub depth_cap: usize,
}

impl CoverageReport {
    pub fn line(&self, c: Criterion) -> &CriterionLine {
        self.lines.iter().find(|l| l.criterion == c).expect("every criterion is reported")
    }

    pub fn render_table(&self) -> String {
        let mut s = format!("{:<10} {:>10} {:>14} {:>9}\n", "criterion", "covered", "total", "ratio");
        for l in &self.lines {
            s += &format!(
                "{:<10} {:>10} {:>14} {:>9.6}\n",
                l.criterion.name(),
                l.covered,
                l.total,
                l.ratio()
            );
        }
        s += &format!("queries: {}, subquery depth cap: {}\n", self.queries, self.depth_cap);
        s
    }

    pub fn render_machine(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s += &l.machine();
            s.push('\n');
        }
        let counts: Vec<String> = self.keyword_counts.iter().map(|(k, n)| format!("{k}={n}")).collect();
        s += &format!("KEYWORDS {}\n", counts.join(" "));
        s += &format!("QUERIES {}\n", self.queries);
        s += &format!("DEPTH_CAP {}\n", self.depth_cap);
        s
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_table())?;
        f.write_str(&self.render_machine())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn demo_query_at_published_scale() {
        let mut l = CoverageLedger::with_totals(Totals::published_scale());
        let inc = l.record(&parse("SELECT t.b FROM t").unwrap());
        assert!(inc.keyword && inc.rule && inc.composite);
        assert_eq!(l.covered(Criterion::Keyword), 2);
        assert_eq!(l.covered(Criterion::Rule), 2);
        assert_eq!(l.report().line(Criterion::Rule).machine(), "COV rule 2 420 0.004762");
    }

    #[test]
    fn recording_twice_does_not_increase() {
        let mut l = CoverageLedger::new();
        let q = parse("SELECT t.b FROM t WHERE t.a > 1").unwrap();
        l.record(&q);
        assert_eq!(l.record(&q), Increase::default());
        let wider = parse("SELECT t.b FROM t WHERE t.a > 1 ORDER BY b ASC").unwrap();
        assert!(l.would_increase(&wider).keyword);
    }

    #[test]
    fn empty_and_full_ratios() {
        let l = CoverageLedger::new();
        for c in Criterion::ALL {
            assert_eq!(l.ratio(c), 0.0);
        }
        let mut l = CoverageLedger::with_totals(Totals {
            keywords: 2,
            rules: 10,
            composites: 10,
        });
        l.record(&parse("SELECT t.b FROM t").unwrap());
        assert_eq!(l.ratio(Criterion::Keyword), 1.0);
    }

    #[test]
    fn report_lists_every_keyword() {
        let mut l = CoverageLedger::new();
        l.record(&parse("SELECT t.b FROM t").unwrap());
        let m = l.report().render_machine();
        assert!(m.contains("\nKEYWORDS SELECT=1 FROM=1 WHERE=0 "), "{m}");
        assert!(m.starts_with("COV keyword 2 "));
    }
}
