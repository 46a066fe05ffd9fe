//! Threshold rules over feature vectors and the decision formulas built
//! from them.
//!
//! Rule ids follow the performance table of the rule study:
//!
//! | id | feature                         | table threshold |
//! |----|---------------------------------|-----------------|
//! | 1  | deleted tweets                  | ≥ 17            |
//! | 2  | deleted / all tweets            | ≥ 0.25          |
//! | 3  | deleted non-retweets            | ≥ 12            |
//! | 4  | deleted / all non-retweets      | ≥ 0.34          |
//! | 5  | deleted single-engagement       | ≥ 10            |
//! | 6  | deleted / all single-engagement | ≥ 0.50          |
//! | 7  | initial deletions               | ≥ 4             |
//! | 8  | deleted lexicon tweets          | ≥ 4             |
//! | 9  | deleted / all lexicon tweets    | ≥ 0.68          |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;
use crate::ingest::TrendDay;

pub const RULE_COUNT: u8 = 9;

/// Table thresholds, indexed by `rule - 1`.
pub const TABLE_THRESHOLDS: [f64; 9] = [17.0, 0.25, 12.0, 0.34, 10.0, 0.50, 4.0, 4.0, 0.68];

pub fn rule_name(rule: u8) -> Option<&'static str> {
    Some(match rule {
        1 => "n_deleted",
        2 => "deletion_ratio",
        3 => "n_deleted_nonretweet",
        4 => "nonretweet_deletion_ratio",
        5 => "n_deleted_set",
        6 => "set_deletion_ratio",
        7 => "initial_deletions",
        8 => "n_deleted_lexicon",
        9 => "lexicon_deletion_ratio",
        _ => return None,
    })
}

/// The feature value a rule inspects.
pub fn rule_value(rule: u8, f: &FeatureVector) -> Option<f64> {
    Some(match rule {
        1 => f.n_deleted as f64,
        2 => f.deletion_ratio,
        3 => f.n_deleted_nonretweet as f64,
        4 => f.nonretweet_deletion_ratio,
        5 => f.n_deleted_set as f64,
        6 => f.set_deletion_ratio,
        7 => f.initial_deletions as f64,
        8 => f.n_deleted_lexicon as f64,
        9 => f.lexicon_deletion_ratio,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Op {
    pub fn holds(self, observed: f64, threshold: f64) -> bool {
        match self {
            Op::Ge => observed >= threshold,
            Op::Gt => observed > threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Ge => ">=",
            Op::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub rule: u8,
    pub op: Op,
    pub threshold: f64,
}

impl Condition {
    pub fn ge(rule: u8, threshold: f64) -> Self {
        Self { rule, op: Op::Ge, threshold }
    }

    pub fn gt(rule: u8, threshold: f64) -> Self {
        Self { rule, op: Op::Gt, threshold }
    }

    pub fn observed(&self, f: &FeatureVector) -> f64 {
        rule_value(self.rule, f).expect("rule ids are validated on construction")
    }

    pub fn holds(&self, f: &FeatureVector) -> bool {
        self.op.holds(self.observed(f), self.threshold)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}{}{}", self.rule, self.op.symbol(), self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("unknown rule `r{0}` (rules are r1..r9)")]
    UnknownRule(u64),
    #[error("cannot parse condition `{0}`")]
    Syntax(String),
    #[error("a custom preset needs a formula")]
    MissingFormula,
}

/// Disjunction of conjunctions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Formula(pub Vec<Vec<Condition>>);

impl Formula {
    pub fn eval(&self, f: &FeatureVector) -> bool {
        self.0.iter().any(|conj| conj.iter().all(|c| c.holds(f)))
    }

    pub fn conditions(&self) -> impl Iterator<Item = &Condition> {
        self.0.iter().flatten()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .map(|conj| conj.iter().map(ToString::to_string).collect::<Vec<_>>().join(" & "))
            .collect();
        f.write_str(&terms.join(" | "))
    }
}

fn parse_condition(atom: &str) -> Result<Condition, RuleError> {
    let atom = atom.trim();
    let syntax = || RuleError::Syntax(atom.to_string());
    let rest = atom.strip_prefix(['r', 'R']).ok_or_else(syntax)?;
    let digits = rest.chars().take_while(char::is_ascii_digit).count();
    if digits == 0 {
        return Err(syntax());
    }
    let rule: u64 = rest[..digits].parse().map_err(|_| syntax())?;
    if rule == 0 || rule > u64::from(RULE_COUNT) {
        return Err(RuleError::UnknownRule(rule));
    }
    let rule = rule as u8;
    let tail = rest[digits..].trim();
    if tail.is_empty() {
        return Ok(Condition::ge(rule, TABLE_THRESHOLDS[rule as usize - 1]));
    }
    let (op, num) = if let Some(n) = tail.strip_prefix(">=") {
        (Op::Ge, n)
    } else if let Some(n) = tail.strip_prefix('>') {
        (Op::Gt, n)
    } else {
        return Err(syntax());
    };
    let threshold: f64 = num.trim().parse().map_err(|_| syntax())?;
    if !threshold.is_finite() {
        return Err(syntax());
    }
    Ok(Condition { rule, op, threshold })
}

impl FromStr for Formula {
    type Err = RuleError;

    /// `r8>=4 & r9>0.45 | r5>=10`; a bare `rN` means the table threshold.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut terms = Vec::new();
        for term in s.split('|') {
            let conj = term
                .split('&')
                .map(parse_condition)
                .collect::<Result<Vec<_>, _>>()?;
            terms.push(conj);
        }
        Ok(Formula(terms))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// At least 4 deleted lexicon tweets and more than 45% of lexicon tweets deleted.
    #[default]
    LexiconTree,
    /// Same counts with the table's 68% ratio threshold.
    LexiconTree68,
    /// Single-engagement deletions with initial deletions.
    LexiconAgnosticTree,
    /// Rules 1 and 2.
    RatioOnly,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::LexiconTree,
        Preset::LexiconTree68,
        Preset::LexiconAgnosticTree,
        Preset::RatioOnly,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::LexiconTree => "lexicon-tree",
            Preset::LexiconTree68 => "lexicon-tree-68",
            Preset::LexiconAgnosticTree => "lexicon-agnostic-tree",
            Preset::RatioOnly => "ratio-only",
            Preset::Custom => "custom",
        }
    }

    pub fn formula(self) -> Option<Formula> {
        use Condition as C;
        Some(Formula(match self {
            Preset::LexiconTree => vec![vec![C::ge(8, 4.0), C::gt(9, 0.45)]],
            Preset::LexiconTree68 => vec![vec![C::ge(8, 4.0), C::ge(9, 0.68)]],
            Preset::LexiconAgnosticTree => vec![
                vec![C::ge(5, 10.0), C::ge(6, 0.50)],
                vec![C::ge(5, 4.0), C::ge(7, 4.0)],
            ],
            Preset::RatioOnly => vec![vec![C::ge(1, 17.0), C::ge(2, 0.25)]],
            Preset::Custom => return None,
        }))
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A preset plus per-rule threshold overrides. An override replaces the
/// threshold of every condition on that rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorConfig {
    pub preset: Preset,
    pub formula: Formula,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self::preset(Preset::LexiconTree)
    }
}

impl DetectorConfig {
    /// Panics for [`Preset::Custom`]; use [`DetectorConfig::build`].
    pub fn preset(preset: Preset) -> Self {
        Self {
            preset,
            formula: preset.formula().expect("built-in preset"),
        }
    }

    pub fn custom(formula: &str) -> Result<Self, RuleError> {
        Ok(Self {
            preset: Preset::Custom,
            formula: formula.parse()?,
        })
    }

    pub fn build(
        preset: Preset,
        formula: Option<&str>,
        thresholds: &BTreeMap<u64, f64>,
    ) -> Result<Self, RuleError> {
        let mut config = match (preset, formula) {
            (_, Some(text)) => Self {
                preset,
                formula: text.parse()?,
            },
            (Preset::Custom, None) => return Err(RuleError::MissingFormula),
            (p, None) => Self::preset(p),
        };
        for (&rule, &value) in thresholds {
            config.set_threshold(rule, value)?;
        }
        Ok(config)
    }

    pub fn set_threshold(&mut self, rule: u64, value: f64) -> Result<(), RuleError> {
        if rule == 0 || rule > u64::from(RULE_COUNT) {
            return Err(RuleError::UnknownRule(rule));
        }
        for c in self.formula.0.iter_mut().flatten() {
            if u64::from(c.rule) == rule {
                c.threshold = value;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiredRule {
    pub rule: u8,
    pub name: &'static str,
    pub op: Op,
    pub threshold: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub date: chrono::NaiveDate,
    pub keyword: String,
    pub attacked: bool,
    /// Conditions of the formula that hold, in formula order, deduplicated.
    pub fired_rules: Vec<FiredRule>,
    pub features: FeatureVector,
}

pub fn classify_trend(trend: &TrendDay, features: &FeatureVector, config: &DetectorConfig) -> Verdict {
    let mut fired: Vec<FiredRule> = Vec::new();
    for c in config.formula.conditions() {
        let observed = c.observed(features);
        let dup = fired
            .iter()
            .any(|r| r.rule == c.rule && r.op == c.op && r.threshold == c.threshold);
        if c.op.holds(observed, c.threshold) && !dup {
            fired.push(FiredRule {
                rule: c.rule,
                name: rule_name(c.rule).unwrap_or("?"),
                op: c.op,
                threshold: c.threshold,
                observed,
            });
        }
    }
    Verdict {
        date: trend.date,
        keyword: trend.keyword.canonical(),
        attacked: config.formula.eval(features),
        fired_rules: fired,
        features: *features,
    }
}
