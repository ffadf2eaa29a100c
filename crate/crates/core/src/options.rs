use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// How LEFT/RIGHT/FULL joins combine their inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JoinMode {
    /// Conventional ON-driven outer joins; the schema is both inputs'
    /// columns side by side.
    #[default]
    Standard,
    /// Shared-column matching with NULL padding first, the ON condition
    /// applied afterwards as a filter. The schema merges shared columns.
    Padded,
}

impl FromStr for JoinMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(JoinMode::Standard),
            "padded" => Ok(JoinMode::Padded),
            other => Err(format!("unknown join mode `{other}` (expected padded|standard)")),
        }
    }
}

impl fmt::Display for JoinMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinMode::Standard => "standard",
            JoinMode::Padded => "padded",
        })
    }
}

/// Deliberate single-rule defects, used to measure whether differential
/// runs can tell a broken engine from a correct one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fault {
    /// `NULL AND FALSE` yields NULL instead of FALSE.
    AndNullFalse,
    /// `NULL IS FALSE` yields TRUE.
    NullIsFalse,
    /// SUBSTRING counts its start position from 0.
    SubstringZeroBased,
    /// EXCEPT ALL uses |a - b| instead of max(0, a - b).
    ExceptAllNoClamp,
    /// MOD takes the sign of the divisor.
    ModDivisorSign,
    /// COUNT(expr) counts NULLs.
    CountNulls,
    /// Ascending ORDER BY places NULLs last.
    NullsLastAsc,
    /// UNION ALL removes duplicates.
    UnionAllDedup,
}

impl Fault {
    pub const ALL: [Fault; 8] = [
        Fault::AndNullFalse,
        Fault::NullIsFalse,
        Fault::SubstringZeroBased,
        Fault::ExceptAllNoClamp,
        Fault::ModDivisorSign,
        Fault::CountNulls,
        Fault::NullsLastAsc,
        Fault::UnionAllDedup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fault::AndNullFalse => "and-null-false",
            Fault::NullIsFalse => "null-is-false",
            Fault::SubstringZeroBased => "substring-zero-based",
            Fault::ExceptAllNoClamp => "except-all-no-clamp",
            Fault::ModDivisorSign => "mod-divisor-sign",
            Fault::CountNulls => "count-nulls",
            Fault::NullsLastAsc => "nulls-last-asc",
            Fault::UnionAllDedup => "union-all-dedup",
        }
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown fault `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExecOptions {
    pub join_mode: JoinMode,
    pub faults: BTreeSet<Fault>,
}

impl ExecOptions {
    pub fn with_join_mode(join_mode: JoinMode) -> Self {
        ExecOptions {
            join_mode,
            ..Default::default()
        }
    }

    pub fn with_fault(fault: Fault) -> Self {
        ExecOptions {
            faults: [fault].into(),
            ..Default::default()
        }
    }

    pub fn has(&self, f: Fault) -> bool {
        self.faults.contains(&f)
    }
}
