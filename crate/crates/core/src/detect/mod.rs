//! Deciding which trends were attacked, locating the attacks, and naming
//! the accounts that carried them out.

mod rules;
mod scan;
mod windows;

pub use rules::{
    classify_trend, rule_name, rule_value, Condition, DetectorConfig, FiredRule, Formula, Op,
    Preset, RuleError, Verdict, RULE_COUNT, TABLE_THRESHOLDS,
};
pub use scan::{label_astrobots, scan_candidates};
pub use windows::{detect_attack_windows, AttackEvent, AttackParams, ParamError};
