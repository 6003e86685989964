//! (2P1N)-SAT formulas: every variable occurs exactly three times, twice
//! positively and once negatively, in clauses of two or three literals over
//! distinct variables.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

/// Which of a variable's three occurrences a literal is. Positive occurrences
/// are numbered in reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    FirstPositive,
    SecondPositive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub positive: bool,
    pub slot: Slot,
}

impl Literal {
    pub fn dimacs(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn is_true(&self, a: &Assignment) -> bool {
        a.values[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.var + 1;
        match self.slot {
            Slot::FirstPositive => write!(f, "x{i}"),
            Slot::SecondPositive => write!(f, "x{i}'"),
            Slot::Negative => write!(f, "~x{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_satisfied(&self, a: &Assignment) -> bool {
        self.literals.iter().any(|l| l.is_true(a))
    }
}

/// CNF as read from DIMACS, before any structural checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPOneNFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

/// A structural defect that keeps a CNF from being (2P1N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVariables,
    LiteralOutOfRange { clause: usize, literal: i64 },
    ClauseSize { clause: usize, size: usize },
    RepeatedVariable { clause: usize, var: usize },
    Occurrences { var: usize, positive: usize, negative: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NoVariables => write!(f, "formula has no variables"),
            Violation::LiteralOutOfRange { clause, literal } => {
                write!(f, "clause {}: literal {literal} out of range", clause + 1)
            }
            Violation::ClauseSize { clause, size } => {
                write!(f, "clause {}: {size} literals, expected 2 or 3", clause + 1)
            }
            Violation::RepeatedVariable { clause, var } => {
                write!(f, "clause {}: variable x{} occurs more than once", clause + 1, var + 1)
            }
            Violation::Occurrences { var, positive, negative } => {
                write!(f, "x{}: {positive} positive, {negative} negative", var + 1)
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("header mismatch: {0}")]
    HeaderMismatch(String),
    #[error("not a (2P1N) formula: {}", list(.0))]
    NotTwoPOneN(Vec<Violation>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{num_vars} variables exceed the exhaustive search limit of {limit}")]
    TooLarge { num_vars: usize, limit: usize },
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Every (2P1N) invariant `cnf` breaks; empty iff it is a valid instance.
pub fn validate_2p1n(cnf: &RawCnf) -> Vec<Violation> {
    let mut out = Vec::new();
    if cnf.num_vars == 0 {
        out.push(Violation::NoVariables);
    }
    let mut pos = vec![0usize; cnf.num_vars];
    let mut neg = vec![0usize; cnf.num_vars];
    for (ci, clause) in cnf.clauses.iter().enumerate() {
        if !(2..=3).contains(&clause.len()) {
            out.push(Violation::ClauseSize { clause: ci, size: clause.len() });
        }
        let mut seen = Vec::new();
        for &lit in clause {
            let var = lit.unsigned_abs() as usize;
            if lit == 0 || var > cnf.num_vars {
                out.push(Violation::LiteralOutOfRange { clause: ci, literal: lit });
                continue;
            }
            let var = var - 1;
            if seen.contains(&var) {
                out.push(Violation::RepeatedVariable { clause: ci, var });
            } else {
                seen.push(var);
            }
            if lit > 0 {
                pos[var] += 1;
            } else {
                neg[var] += 1;
            }
        }
    }
    for var in 0..cnf.num_vars {
        if pos[var] != 2 || neg[var] != 1 {
            out.push(Violation::Occurrences { var, positive: pos[var], negative: neg[var] });
        }
    }
    out
}

/// Violation report as JSON: `{"valid": bool, "violations": [...]}`.
pub fn violations_json(violations: &[Violation]) -> Value {
    json!({
        "valid": violations.is_empty(),
        "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

impl TryFrom<RawCnf> for TwoPOneNFormula {
    type Error = SatError;

    fn try_from(cnf: RawCnf) -> Result<Self, SatError> {
        let violations = validate_2p1n(&cnf);
        if !violations.is_empty() {
            return Err(SatError::NotTwoPOneN(violations));
        }
        let mut positives_seen = vec![0usize; cnf.num_vars];
        let clauses = cnf
            .clauses
            .iter()
            .map(|c| Clause {
                literals: c
                    .iter()
                    .map(|&lit| {
                        let var = lit.unsigned_abs() as usize - 1;
                        let slot = if lit < 0 {
                            Slot::Negative
                        } else {
                            positives_seen[var] += 1;
                            if positives_seen[var] == 1 {
                                Slot::FirstPositive
                            } else {
                                Slot::SecondPositive
                            }
                        };
                        Literal { var, positive: lit > 0, slot }
                    })
                    .collect(),
            })
            .collect();
        Ok(TwoPOneNFormula { num_vars: cnf.num_vars, clauses })
    }
}

impl TwoPOneNFormula {
    pub fn from_clauses(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, SatError> {
        RawCnf { num_vars, clauses }.try_into()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn to_raw(&self) -> RawCnf {
        RawCnf {
            num_vars: self.num_vars,
            clauses: self.clauses.iter().map(|c| c.literals.iter().map(Literal::dimacs).collect()).collect(),
        }
    }

    /// Clause index and position holding the occurrence `(var, slot)`.
    pub fn occurrence(&self, var: usize, slot: Slot) -> Option<(usize, usize)> {
        self.clauses.iter().enumerate().find_map(|(ci, c)| {
            c.literals.iter().position(|l| l.var == var && l.slot == slot).map(|p| (ci, p))
        })
    }

    /// Canonical DIMACS text: header, then clauses in original order.
    pub fn to_dimacs(&self) -> String {
        write_dimacs(&self.to_raw(), &[])
    }
}

/// DIMACS writer; `comments` become leading `c` lines.
pub fn write_dimacs(cnf: &RawCnf, comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        s.push_str("c ");
        s.push_str(c);
        s.push('\n');
    }
    s.push_str(&format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len()));
    for clause in &cnf.clauses {
        for lit in clause {
            s.push_str(&lit.to_string());
            s.push(' ');
        }
        s.push_str("0\n");
    }
    s
}

/// Reads DIMACS CNF without checking (2P1N) structure.
pub fn parse_dimacs_raw(text: &str) -> Result<RawCnf, SatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_pos = (1, 1);
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('c') || trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let column = line.len() - trimmed.len() + 1;
            if header.is_some() {
                return Err(SatError::Syntax { line: line_no, column, message: "second header line".into() });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let bad = || SatError::Syntax { line: line_no, column, message: "expected `p cnf <vars> <clauses>`".into() };
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(bad());
            }
            let n = parts[2].parse().map_err(|_| bad())?;
            let m = parts[3].parse().map_err(|_| bad())?;
            header = Some((n, m));
            continue;
        }
        let mut offset = 0;
        for token in line.split_whitespace() {
            let start = line[offset..].find(token).expect("token from this line") + offset;
            offset = start + token.len();
            let column = start + 1;
            last_pos = (line_no, column);
            if header.is_none() {
                return Err(SatError::Syntax { line: line_no, column, message: "clause before `p cnf` header".into() });
            }
            let lit: i64 = token.parse().map_err(|_| SatError::Syntax {
                line: line_no,
                column,
                message: format!("expected an integer literal, found `{token}`"),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(SatError::Syntax { line: 1, column: 1, message: "missing `p cnf` header".into() });
    };
    if !current.is_empty() {
        return Err(SatError::Syntax { line: last_pos.0, column: last_pos.1, message: "clause not terminated by 0".into() });
    }
    if clauses.len() != num_clauses {
        return Err(SatError::HeaderMismatch(format!("header declares {num_clauses} clauses, found {}", clauses.len())));
    }
    if let Some(lit) = clauses.iter().flatten().find(|l| l.unsigned_abs() as usize > num_vars) {
        return Err(SatError::HeaderMismatch(format!("literal {lit} exceeds declared {num_vars} variables")));
    }
    Ok(RawCnf { num_vars, clauses })
}

/// Reads DIMACS CNF and checks (2P1N) structure. Positive occurrences get
/// their slots in reading order.
pub fn parse_dimacs(text: &str) -> Result<TwoPOneNFormula, SatError> {
    parse_dimacs_raw(text)?.try_into()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn to_json(&self) -> Value {
        let map: BTreeMap<String, bool> = self.values.iter().enumerate().map(|(i, &b)| (format!("x{}", i + 1), b)).collect();
        json!(map)
    }

    /// Parses `{"x1": true, ...}`; every variable `1..=num_vars` must be present.
    pub fn from_json(value: &Value, num_vars: usize) -> Result<Self, SatError> {
        let obj = value.as_object().ok_or_else(|| SatError::InvalidArgument("assignment must be a JSON object".into()))?;
        let mut values = vec![None; num_vars];
        for (key, v) in obj {
            let idx: usize = key
                .strip_prefix('x')
                .and_then(|s| s.parse().ok())
                .filter(|&i| i >= 1 && i <= num_vars)
                .ok_or_else(|| SatError::InvalidArgument(format!("unknown variable `{key}`")))?;
            let b = v.as_bool().ok_or_else(|| SatError::InvalidArgument(format!("`{key}` is not a boolean")))?;
            values[idx - 1] = Some(b);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| SatError::InvalidArgument(format!("x{} unassigned", i + 1))))
            .collect::<Result<_, _>>()?;
        Ok(Assignment { values })
    }
}

/// True iff every clause has a true literal.
pub fn evaluate(formula: &TwoPOneNFormula, a: &Assignment) -> Result<bool, SatError> {
    if a.values.len() != formula.num_vars {
        return Err(SatError::InvalidArgument(format!(
            "assignment covers {} variables, formula has {}",
            a.values.len(),
            formula.num_vars
        )));
    }
    Ok(formula.clauses.iter().all(|c| c.is_satisfied(a)))
}

pub const SAT_VAR_LIMIT: usize = 30;

/// Lexicographically smallest satisfying assignment (x1 most significant,
/// false before true), or `None` if unsatisfiable.
pub fn solve_sat(formula: &TwoPOneNFormula) -> Result<Option<Assignment>, SatError> {
    let n = formula.num_vars;
    if n > SAT_VAR_LIMIT {
        return Err(SatError::TooLarge { num_vars: n, limit: SAT_VAR_LIMIT });
    }
    // clauses indexed by their highest variable: fully decided once it is set
    let mut closing: Vec<Vec<&Clause>> = vec![Vec::new(); n];
    for c in &formula.clauses {
        let last = c.literals.iter().map(|l| l.var).max().expect("non-empty clause");
        closing[last].push(c);
    }
    let mut values = vec![false; n];
    fn go(var: usize, values: &mut Vec<bool>, closing: &[Vec<&Clause>]) -> bool {
        if var == values.len() {
            return true;
        }
        for choice in [false, true] {
            values[var] = choice;
            let ok = closing[var].iter().all(|c| c.literals.iter().any(|l| values[l.var] == l.positive));
            if ok && go(var + 1, values, closing) {
                return true;
            }
        }
        false
    }
    Ok(go(0, &mut values, &closing).then_some(Assignment { values }))
}
