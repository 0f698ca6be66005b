//! S-machines: hardware, admissible words, S-rules and the built-in
//! machines S1–S4.

pub mod builtin;
pub mod format;
mod hardware;
mod machine;
mod rule;

pub use builtin::{builtin, builtin_with, BuiltinOptions, UnknownMachine};
pub use format::{parse_machine, serialize_machine, FormatError};
pub use hardware::{AdmissibleError, AdmissibleWord, Hardware};
pub use machine::{Reach, RunError, SMachine, Trace, ValidationReport};
pub use rule::{
    apply_rule, match_rule, ApplyError, CompiledComponent, CompiledRule, MatchResult, NoMatchReason, RuleComponent,
    RuleError, SRule, Span, SplitSide, INVERSE_SUFFIX,
};
