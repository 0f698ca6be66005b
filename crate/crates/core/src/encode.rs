//! Translation of a Turing machine into the admissible words of S(M):
//! the S(M) skeleton hardware, σ(c), the hub word K(u), the input map H and
//! the per-command copies S4(τ).
//!
//! The skeleton has `17k+6` state components, in order
//! `E(0) X(0) F(0)`, then per tape `E(i) X(i) F(i) E'(i) P(i) Q(i) R(i) S(i)
//! T(i) U(i) P̄(i) Q̄(i) R̄(i) S̄(i) T̄(i) Ū(i) F'(i)`, then
//! `E'(k+1) X(k+1) F'(k+1)`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::smachine::builtin::{self, rename_rule};
use crate::smachine::{AdmissibleWord, Hardware, SMachine};
use crate::tm::{Command, ConfigError, Configuration, Polarity, TuringMachine};
use crate::word::{special, Letter, Symbol, Word};

/// Components per tape block.
pub const BLOCK: usize = 17;

const STANDARD: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
const BARRED: [&str; 6] = ["pbar", "qbar", "rbar", "sbar", "tbar", "ubar"];

fn sym(name: String) -> Symbol {
    Symbol::intern(&name)
}

pub fn f_letter(q: Symbol, i: usize) -> Symbol {
    sym(format!("F_{q}({i})"))
}

pub fn f_prime_letter(q: Symbol, i: usize) -> Symbol {
    sym(format!("F'_{q}({i})"))
}

/// Name of `z(i,τ,4)`.
pub fn s4_copy_state(z: Symbol, i: usize, tau: &str) -> Symbol {
    sym(format!("{z}({i},{tau},4)"))
}

pub fn state_component_count(k: usize) -> usize {
    BLOCK * k + 6
}

/// Index of the `P(i)` component (tapes are 1-based).
pub fn p_component(i: usize) -> usize {
    3 + BLOCK * (i - 1) + 4
}

/// Tape on which the S4(τ) copy of a command runs.
pub fn copy_tape(c: &Command) -> usize {
    c.active_tape().map_or(1, |t| t + 1)
}

/// Skeleton hardware of S(M): every component, the standard letters, the F
/// letters for each machine state and the S4(τ) copies for every positive τ.
pub fn skeleton_hardware(m: &TuringMachine) -> Hardware {
    let k = m.tape_count();
    let one = |name: String| BTreeSet::from([sym(name)]);
    let empty = BTreeSet::new;
    let alpha = BTreeSet::from([special::alpha()]);
    let omega = BTreeSet::from([special::omega()]);
    let delta = BTreeSet::from([special::delta()]);
    let s4 = builtin::builtin("S4").expect("S4");

    let mut states = vec![one("E(0)".into()), one("x(0)".into()), one("F(0)".into())];
    let mut tapes = vec![alpha.clone(), alpha, empty()];
    for i in 1..=k {
        let y = m.tapes[i - 1].alphabet.clone();
        states.push(one(format!("E({i})")));
        states.push(one(format!("x({i})")));
        states.push(m.tapes[i - 1].states.iter().map(|q| f_letter(*q, i)).collect());
        states.push(one(format!("E'({i})")));
        tapes.extend([y.clone(), y, empty(), empty()]);
        for (c, letter) in STANDARD.iter().enumerate() {
            let mut set = BTreeSet::from([sym(format!("{letter}({i})"))]);
            for tau in m.positive_commands() {
                for z in &s4.hardware.states()[c] {
                    set.insert(s4_copy_state(*z, i, &tau.name));
                }
            }
            states.push(set);
            tapes.push(delta.clone());
        }
        for letter in BARRED {
            states.push(one(format!("{letter}({i})")));
            tapes.push(delta.clone());
        }
        states.push(m.tapes[i - 1].states.iter().map(|q| f_prime_letter(*q, i)).collect());
        tapes.push(empty());
    }
    states.push(one(format!("E'({})", k + 1)));
    states.push(one(format!("x'({})", k + 1)));
    states.push(one(format!("F'({})", k + 1)));
    tapes.push(empty());
    tapes.push(omega);
    debug_assert_eq!(states.len(), state_component_count(k));
    Hardware::new(tapes, states)
}

/// Skeleton hardware plus the rules of every S4(τ) copy. The remaining
/// machines of S(M) and the connecting rules are not part of it.
pub fn skeleton_machine(m: &TuringMachine) -> SMachine {
    let hw = skeleton_hardware(m);
    let mut rules = Vec::new();
    for tau in m.positive_commands() {
        let copy = instantiate_s4_copy(tau, copy_tape(tau)).expect("positive command");
        rules.extend(copy.positive_rules().iter().cloned());
    }
    SMachine::new(format!("S({})", m.name), hw, rules)
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("hub word needs N >= 1")]
    ZeroN,
    #[error("hub word argument contains κ letter {0}")]
    Kappa(String),
    #[error("S4 copies exist only for positive commands, {0} is negative")]
    NegativeCommand(String),
    #[error("input must be a non-empty positive word")]
    BadInput,
    #[error("input letter {0} not in the alphabet of tape 1")]
    InputLetter(String),
}

/// `||v||`: sum of the signs of the letters of `v`.
pub fn algebraic_degree(v: &Word) -> i64 {
    v.exponent_sum()
}

/// σ(c) with `α^n` and `ω^n` in the outer parts.
pub fn sigma_encode(m: &TuringMachine, c: &Configuration, n: usize) -> Result<AdmissibleWord, EncodeError> {
    c.validate(m)?;
    let k = m.tape_count();
    let n = n as i64;
    let mut states = vec![sym("E(0)".into()), sym("x(0)".into()), sym("F(0)".into())];
    let mut segments = vec![Word::power(special::alpha(), n), Word::empty(), Word::empty()];
    for (idx, (v, q)) in c.tapes.iter().enumerate() {
        let i = idx + 1;
        states.extend([sym(format!("E({i})")), sym(format!("x({i})")), f_letter(*q, i), sym(format!("E'({i})"))]);
        segments.extend([v.clone(), Word::empty(), Word::empty(), Word::empty()]);
        for (j, letter) in STANDARD.iter().chain(BARRED.iter()).enumerate() {
            states.push(sym(format!("{letter}({i})")));
            segments.push(if j == 0 { Word::power(special::delta(), algebraic_degree(v)) } else { Word::empty() });
        }
        states.push(f_prime_letter(*q, i));
        segments.push(Word::empty());
    }
    states.extend([sym(format!("E'({})", k + 1)), sym(format!("x'({})", k + 1)), sym(format!("F'({})", k + 1))]);
    segments.extend([Word::empty(), Word::power(special::omega(), n)]);
    Ok(AdmissibleWord::new(states, segments))
}

/// `K(u) = (u^-1 κ1 u κ2 … u^-1 κ_{2N-1} u κ_{2N}) · (κ_{2N} u^-1 κ_{2N-1} u … κ2 u^-1 κ1 u)^-1`,
/// freely reduced.
pub fn hub_word(u: &Word, n: usize) -> Result<Word, EncodeError> {
    if n == 0 {
        return Err(EncodeError::ZeroN);
    }
    if let Some(l) = u.letters().iter().find(|l| special::is_kappa(l.symbol)) {
        return Err(EncodeError::Kappa(l.symbol.to_string()));
    }
    let ui = u.inverse();
    let mut left: Vec<Letter> = Vec::new();
    for j in 1..=2 * n {
        left.extend_from_slice(if j % 2 == 1 { ui.letters() } else { u.letters() });
        left.push(special::kappa(j).pos());
    }
    let mut right: Vec<Letter> = Vec::new();
    for j in (1..=2 * n).rev() {
        right.push(special::kappa(j).pos());
        right.extend_from_slice(if j % 2 == 0 { ui.letters() } else { u.letters() });
    }
    Ok(Word::reduce(left).multiply(&Word::reduce(right).inverse()))
}

/// The copy S4(τ) placed on tape `i`: every state letter `z` becomes
/// `z(i,τ,4)`, every rule `σ` becomes `σ(4,τ)`.
pub fn instantiate_s4_copy(tau: &Command, i: usize) -> Result<SMachine, EncodeError> {
    if tau.polarity != Polarity::Positive {
        return Err(EncodeError::NegativeCommand(tau.name.clone()));
    }
    let s4 = builtin::builtin("S4").expect("S4");
    let hw = &s4.hardware;
    let rename = |z: Symbol| s4_copy_state(z, i, &tau.name);
    let states = hw.states().iter().map(|q| q.iter().map(|z| rename(*z)).collect()).collect();
    let copy_hw = Hardware::new(hw.tapes().to_vec(), states);
    let is_state = |s: Symbol| hw.is_state(s);
    let suffix = format!("(4,{})", tau.name);
    let rules = s4.positive_rules().iter().map(|r| rename_rule(r, &suffix, &rename, &is_state)).collect();
    Ok(SMachine::new(format!("S4({})", tau.name), copy_hw, rules))
}

/// Square of the input length; the exponent of α and ω in σ of the start
/// configuration.
pub fn h_exponent(input_len: usize) -> usize {
    input_len * input_len
}

/// `H(u) = K(σ(c_start(u)), N)`.
pub fn h_encode(m: &TuringMachine, input: &Word, n: usize) -> Result<Word, EncodeError> {
    if input.is_empty() || !input.is_positive() {
        return Err(EncodeError::BadInput);
    }
    if let Some(l) = input.letters().iter().find(|l| !m.tapes[0].alphabet.contains(&l.symbol)) {
        return Err(EncodeError::InputLetter(l.symbol.to_string()));
    }
    let c = m.start_configuration(input);
    let sigma = sigma_encode(m, &c, h_exponent(input.len()))?;
    hub_word(&sigma.to_word(), n)
}

/// σ of the accept configuration with `n = 0`, the default `W_0`.
pub fn accept_word(m: &TuringMachine) -> Result<AdmissibleWord, EncodeError> {
    sigma_encode(m, &m.accept_configuration(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tm::fixtures;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn sigma_examples() {
        let m = fixtures::unary();
        let hw = skeleton_hardware(&m);
        let c = m.start_configuration(&Word::empty());
        let s = sigma_encode(&m, &c, 0).unwrap();
        s.check(&hw).unwrap();
        assert_eq!(s.segments[p_component(1)], Word::empty());
        assert_eq!(s.states.len(), 23);

        let c = m.start_configuration(&w("a a"));
        let s = sigma_encode(&m, &c, 2).unwrap();
        s.check(&hw).unwrap();
        let word = s.to_word();
        assert_eq!(word.count_symbol(special::alpha()), 2);
        assert_eq!(word.count_symbol(special::omega()), 2);
        assert_eq!(word.count_symbol(special::delta()), 2);
        assert_eq!(s.segments[p_component(1)], Word::power(special::delta(), 2));
    }

    #[test]
    fn degree_is_signed_sum() {
        assert_eq!(algebraic_degree(&Word::reduce(w("a a^-1").letters().iter().copied())), 0);
        let raw = [Symbol::intern("a").pos(), Symbol::intern("a").neg(), Symbol::intern("b").pos()];
        let sum: i64 = raw.iter().map(|l| l.sign()).sum();
        assert_eq!(sum, 1);
        assert_eq!(algebraic_degree(&Word::reduce(raw)), 1);
    }

    #[test]
    fn hub_examples() {
        assert_eq!(hub_word(&Word::empty(), 1).unwrap(), w("k1 k2 k1^-1 k2^-1"));
        let k = hub_word(&w("d"), 1).unwrap();
        assert_eq!(k, w("d^-1 k1 d k2 d^-1 k1^-1 d k2^-1"));
        assert_eq!(k.len(), 8);
        assert!(hub_word(&w("k1"), 1).is_err());
        assert!(hub_word(&w("d"), 0).is_err());
    }

    #[test]
    fn s4_copy_names() {
        let m = fixtures::unary();
        let tau = m.positive_commands().next().unwrap();
        let copy = instantiate_s4_copy(tau, 1).unwrap();
        let sigma1 = copy.rule(&format!("rule1(4,{})", tau.name)).unwrap();
        let q1 = format!("q1(1,{},4)", tau.name);
        let r1 = format!("r1(1,{},4)", tau.name);
        assert_eq!(sigma1.to_string(), format!("[{q1} -> δ^-2 {q1} δ^2 ; {r1} -> δ^-1 {r1} δ]"));
        assert!(copy.validate().is_valid());
        let neg = m.commands.iter().find(|c| c.polarity == Polarity::Negative).unwrap();
        assert!(instantiate_s4_copy(neg, 1).is_err());
    }

    #[test]
    fn skeleton_machine_is_valid() {
        for m in [fixtures::unary(), fixtures::two_tape()] {
            let sk = skeleton_machine(&m);
            assert_eq!(sk.hardware.component_count(), state_component_count(m.tape_count()));
            assert!(sk.validate().is_valid(), "{}", sk.validate());
            accept_word(&m).unwrap().check(&sk.hardware).unwrap();
        }
    }

    #[test]
    fn h_rejects_bad_input() {
        let m = fixtures::unary();
        assert!(matches!(h_encode(&m, &Word::empty(), 1), Err(EncodeError::BadInput)));
        assert!(matches!(h_encode(&m, &w("a^-1"), 1), Err(EncodeError::BadInput)));
        assert!(h_encode(&m, &w("a a"), 1).is_ok());
    }
}
