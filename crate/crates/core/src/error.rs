use crate::poset::Elem;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate. Variant names follow the failure they
/// report; `Exceeded` is not a failure of the input but of the search budget.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cycle: element {0} reaches itself under transitive closure")]
    Cycle(Elem),

    #[error("element {id} out of range 1..={n}")]
    Range { id: u64, n: u64 },

    #[error("duplicate element {0} in list")]
    DuplicateElement(Elem),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("list {list} inverts comparable pair: {below} placed after {above}")]
    InvalidList { list: usize, below: Elem, above: Elem },

    #[error("bipartite graph invariant violated: {0}")]
    Degree(String),

    #[error("summand {index}: {reason}")]
    NotARealiser { index: usize, reason: String },

    #[error("list {0} has fewer than two elements; drop trivial lists before encoding")]
    TrivialList(usize),

    #[error("realiser has no lists to encode")]
    EmptyRealiser,

    #[error("codeword grammar: {0}")]
    Grammar(String),

    #[error("header cannot represent d={d} in ceil(log2 {n}) bits")]
    HeaderRange { d: u32, n: u32 },

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("not a two-level poset: {0}")]
    NotTwoLevel(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("search budget exceeded ({reason}); proven lower bound {lower_bound}")]
    Exceeded { lower_bound: u32, reason: String },
}
