use thiserror::Error;

use crate::poset::ElemId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element id {0} out of range (n = {1})")]
    IdOutOfRange(usize, usize),
    #[error("cover pair ({0}, {1}) listed more than once")]
    DuplicatePair(ElemId, ElemId),
    #[error("cover relation contains a cycle through element {0}")]
    CycleDetected(ElemId),
    #[error("pair ({0}, {1}) is implied by other covers and is not a cover relation")]
    RedundantCover(ElemId, ElemId),
    #[error("relation is not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("poset is not bounded")]
    NotBounded,
    #[error("elements {0} and {1} have no greatest lower bound")]
    NoMeet(ElemId, ElemId),
    #[error("elements {0} and {1} have no least upper bound")]
    NoJoin(ElemId, ElemId),
    #[error("elements {0} and {1} are not comparable (need {0} <= {1})")]
    NotComparable(ElemId, ElemId),
    #[error("element {0} is not a coatom")]
    NotACoatom(ElemId),
    #[error("not a maximal chain: {0}")]
    NotMaximalChain(String),
    #[error("interval [{0}, {1}] has no left-modular coatom")]
    NoLeftModularCoatom(ElemId, ElemId),
    #[error("edge ({0}, {1}) has no label")]
    MissingEdgeLabel(ElemId, ElemId),
    #[error("no label for chain-edge pair ending in chain {0:?}")]
    MissingLabel(Vec<ElemId>),
    #[error("chain prefix {0:?} is assigned two different labels")]
    InconsistentLabeling(Vec<ElemId>),
    #[error("atom ordering of element {0} is not a permutation of its upper covers")]
    NotAPermutation(ElemId),
    #[error("lattice is not comodernistic: interval [{0}, {1}] has no left-modular coatom")]
    NotComodernistic(ElemId, ElemId),
    #[error("size cap exceeded: {what} is {actual}, cap is {cap}")]
    SizeCapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
    #[error("refinement order is not a lattice: {0}")]
    NotALattice(Box<Error>),
    #[error("cover {0:?} -> {1:?} is not a merge of exactly two blocks")]
    NonBinaryMergeCover(Vec<Vec<ElemId>>, Vec<Vec<ElemId>>),
    #[error("invalid linear extension: {0}")]
    InvalidLinearExtension(String),
    #[error("invalid label poset: {0}")]
    InvalidLabelPoset(String),
    #[error("invalid simplicial complex: {0}")]
    InvalidComplex(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
