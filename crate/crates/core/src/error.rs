use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("DIMACS parse error on line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("clause {clause} contains both {var} and -{var}")]
    ComplementaryLiterals { clause: usize, var: usize },
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("formula must have at least one clause and one variable")]
    EmptyFormula,
    #[error("index ({i}, {j}) out of range for a formula with {n} clauses and {m} variables")]
    IndexOutOfRange { i: usize, j: usize, n: usize, m: usize },
    #[error("assignment has length {got}, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("the clause count {0} must be odd; normalize the formula first")]
    EvenClauseCount(usize),
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("configuration parse error on line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },
    #[error("cell {0:?} is red and has no successor")]
    RedCell((usize, usize)),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: String, budget: String },
    #[error("truncated bit string: expected {expected} bits, got {got}")]
    Truncated { expected: u64, got: u64 },
    #[error("assignment {0} does not satisfy the formula")]
    NotSatisfying(String),
    #[error("formula is satisfiable by {assignment}; A_phi has a blue cycle of length {cycle_len}")]
    Satisfiable { assignment: String, cycle_len: usize },
    #[error("malformed refutation: {0}")]
    MalformedRefutation(String),
    #[error("state index {index} does not fit in {width} bits")]
    Width { index: u64, width: u32 },
    #[error("sequence code is not below the declared bound")]
    CodeOverflow,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("arithmetic overflow while evaluating a term")]
    ArithmeticOverflow,
    #[error("formula syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
