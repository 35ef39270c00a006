use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("raise precision: {0}")]
    RaisePrecision(String),
    #[error("Hensel inapplicable: seed is not a simple root mod p")]
    HenselInapplicable,
    #[error("inconclusive truncation: maximum attained at the truncation boundary without a tail certificate")]
    InconclusiveTruncation,
    #[error("resolution failure: {0}")]
    Resolution(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("indeterminate point")]
    IndeterminatePoint,
    #[error("positive-dimensional fixed locus")]
    PositiveDimensionalFixedLocus,
    #[error("not a polydisk self-map")]
    NotPolydiskSelfMap,
    #[error("normal form required")]
    NormalFormRequired,
    #[error("iterate further: difference operator norm too large")]
    IterateFurther,
    #[error("not attracting/neutral at this place")]
    NotAttracting,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("insufficient sample: need more than {needed} points, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("no good prime in range: {}", format_reasons(.0))]
    NoGoodPrime(Vec<(u64, String)>),
    #[error("series terms not decaying")]
    NotDecaying,
    #[error("parse error: {0}")]
    Parse(String),
}

fn format_reasons(r: &[(u64, String)]) -> String {
    r.iter()
        .map(|(p, why)| format!("p={p}: {why}"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Short machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "precondition",
            Error::Indeterminate(_) => "indeterminate",
            Error::RaisePrecision(_) => "raise_precision",
            Error::HenselInapplicable => "hensel_inapplicable",
            Error::InconclusiveTruncation => "inconclusive_truncation",
            Error::Resolution(_) => "resolution_failure",
            Error::CapExceeded(_) => "cap_exceeded",
            Error::IndeterminatePoint => "indeterminate_point",
            Error::PositiveDimensionalFixedLocus => "positive_dimensional_fixed_locus",
            Error::NotPolydiskSelfMap => "not_polydisk_self_map",
            Error::NormalFormRequired => "normal_form_required",
            Error::IterateFurther => "iterate_further",
            Error::NotAttracting => "not_attracting",
            Error::HypothesisViolated(_) => "hypothesis_violated",
            Error::InsufficientSample { .. } => "insufficient_sample",
            Error::NoGoodPrime(_) => "no_good_prime",
            Error::NotDecaying => "not_decaying",
            Error::Parse(_) => "parse",
        }
    }
}
