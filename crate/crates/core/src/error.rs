use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("group axiom violated: {axiom} at indices {witness:?}")]
    GroupAxiom {
        axiom: &'static str,
        witness: Vec<usize>,
    },

    #[error("invalid group table: {0}")]
    BadTable(String),

    #[error("unknown group spec `{0}`")]
    UnknownSpec(String),

    #[error("group `{name}` has order {order}, above the cap {cap}")]
    OrderCap {
        name: String,
        order: usize,
        cap: usize,
    },

    #[error("element index {index} is out of range for group `{group}`")]
    BadElement { group: String, index: usize },

    #[error("`{0}` and `{1}` are not subgroups of the same group")]
    MismatchedParents(String, String),

    #[error("group `{0}` is not a direct product")]
    NotAProduct(String),

    #[error("set {members:?} is not a subgroup of `{group}`: {reason}")]
    NotASubgroup {
        group: String,
        members: Vec<usize>,
        reason: &'static str,
    },

    #[error("middle groups disagree: `{0}` vs `{1}`")]
    MiddleMismatch(String, String),

    #[error("composite undefined: the subcharacters do not match")]
    NotMatched,

    #[error("scalar {0} is not a unit")]
    NonUnit(String),

    #[error("no value assigned for the variable of prime {0}")]
    MissingVariable(u32),

    #[error("0 lies outside the multiplicative monoid of positive integers")]
    ZeroOutsideMonoid,

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error("morphism is not invariant under the two-sided action")]
    NotInvariant,
}
