use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the layer that raises them.
#[derive(Debug, Error)]
pub enum Error {
    // Structure construction and validation.
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("arity mismatch for `{symbol}`: declared {declared}, tuple has {found}")]
    ArityMismatch {
        symbol: String,
        declared: usize,
        found: usize,
    },
    #[error("element `{0}` not in universe")]
    UnknownElement(String),
    #[error("duplicate element `{0}` in universe")]
    DuplicateElement(String),
    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),

    // Homomorphism search.
    #[error("pinned element `{0}` is not in the source universe")]
    BadPinSource(String),
    #[error("pinned target `{0}` is not in the target universe")]
    BadPinTarget(String),
    #[error("map is not total: `{0}` unassigned")]
    MapNotTotal(String),

    // Path decompositions.
    #[error("tuple {tuple:?} of `{symbol}` is not contained in any bag")]
    UncoveredTuple { symbol: String, tuple: Vec<String> },
    #[error("element `{0}` does not appear in any bag")]
    UncoveredElement(String),
    #[error("element `{0}` leaves and re-enters the bag sequence")]
    IntervalViolation(String),
    #[error("decomposition is not canonical: {0}")]
    NotCanonical(String),

    // Logic.
    #[error("free variable `{0}` is unbound in the given assignment")]
    UnboundVariable(String),

    // Datalog.
    #[error("program is not linear: {0}")]
    NotLinear(String),
    #[error("rule is malformed: {0}")]
    BadRule(String),
    #[error("goal predicate `{0}` is not an IDB")]
    BadGoal(String),

    // SNP.
    #[error("sentence is not Krom: clause {0} has more than two SO literals")]
    NotKrom(usize),
    #[error("sentence is not restricted Krom: clause {0} {1}")]
    NotRestricted(usize, String),
    #[error("sentence is not monotone: clause {0} has a positive EDB literal")]
    NotMonotone(usize),
    #[error("sentence has an equality literal in clause {0}")]
    HasEquality(usize),

    // Games.
    #[error("illegal game move: {0}")]
    BadMove(String),
    #[error("play is not a winning play for the spoiler: {0}")]
    NotWinning(String),

    // Special-form solvers.
    #[error("structure is not implicational: {0}")]
    NotImplicational(String),
    #[error("instance is satisfiable; no obstruction exists")]
    NoObstruction,
    #[error("structure is not a boolean template: {0}")]
    NotBoolean(String),
    #[error("not expressible in the requested clause class: {0}")]
    NotExpressible(String),
    #[error("clause has {0} literals, expected 2")]
    NotTwoSat(usize),

    // Text formats.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    // Internal re-verification of emitted witnesses.
    #[error("witness failed re-verification: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
