//! Edge labelings, chain-edge labelings, atom orderings and their verifiers,
//! plus the comodernistic labeling construction and its lift to an
//! EL-labeling with tuple labels.

mod comodernistic;
mod el;
mod rao;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Chain, Lattice};
use crate::poset::{BitMatrix, ElemId};

pub use comodernistic::{
    comodernistic_labeling, direct_integer_labeling, induced_cl_labels, lift_to_el_labeling,
    ComodernisticLabeling, SubMChainFamily,
};
pub use el::{
    search_el_labeling, verify_cl_labeling, verify_el_shelling, ChainEdgeLabeling, RisingMode,
};
pub use rao::{
    search_recursive_atom_ordering, verify_recursive_atom_ordering, AtomOrderingTable, SearchCaps,
};

/// One coordinate of a tuple label: a chain `r ∪ e` from `0̂` through the
/// edge, and the integer label that root induces on the edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LargeCoordinate {
    pub root: Chain,
    pub label: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TupleLabel {
    pub large: Vec<LargeCoordinate>,
    pub edge: [ElemId; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Tuple(TupleLabel),
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Int(v) => write!(f, "{v}"),
            Label::Tuple(t) => {
                write!(f, "(")?;
                for c in &t.large {
                    let root: Vec<String> = c.root.iter().map(|x| x.to_string()).collect();
                    write!(f, "([{}],{}),", root.join(" "), c.label)?;
                }
                write!(f, "({},{}))", t.edge[0], t.edge[1])
            }
        }
    }
}

/// A finite label set with a partial order and a fixed linear extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelPoset {
    labels: Vec<Label>,
    leq: BitMatrix,
    linext: Vec<usize>,
    rank: Vec<usize>,
}

impl LabelPoset {
    /// Validates the partial order axioms and that `linext` refines it.
    pub fn new(labels: Vec<Label>, leq: BitMatrix, linext: Vec<usize>) -> Result<LabelPoset> {
        let n = labels.len();
        if leq.len() != n {
            return Err(Error::InvalidLabelPoset("relation size mismatch".into()));
        }
        for a in 0..n {
            if !leq.get(a, a) {
                return Err(Error::InvalidLabelPoset(format!("not reflexive at {a}")));
            }
            for b in 0..n {
                if a != b && leq.get(a, b) && leq.get(b, a) {
                    return Err(Error::InvalidLabelPoset(format!(
                        "not antisymmetric at ({a}, {b})"
                    )));
                }
                if leq.get(a, b) {
                    if let Some(c) = (0..n).find(|&c| leq.get(b, c) && !leq.get(a, c)) {
                        return Err(Error::InvalidLabelPoset(format!(
                            "not transitive at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut rank = vec![usize::MAX; n];
        if linext.len() != n {
            return Err(Error::InvalidLabelPoset(
                "linear extension has wrong length".into(),
            ));
        }
        for (i, &a) in linext.iter().enumerate() {
            if a >= n || rank[a] != usize::MAX {
                return Err(Error::InvalidLabelPoset(
                    "linear extension is not a permutation".into(),
                ));
            }
            rank[a] = i;
        }
        for a in 0..n {
            for b in 0..n {
                if leq.get(a, b) && rank[a] > rank[b] {
                    return Err(Error::InvalidLabelPoset(format!(
                        "linear extension puts {b} before {a} although {a} <= {b}"
                    )));
                }
            }
        }
        Ok(LabelPoset {
            labels,
            leq,
            linext,
            rank,
        })
    }

    /// Distinct integers under their natural order.
    pub fn integers(values: impl IntoIterator<Item = i64>) -> LabelPoset {
        let mut vals: Vec<i64> = values.into_iter().collect();
        vals.sort_unstable();
        vals.dedup();
        let n = vals.len();
        let mut leq = BitMatrix::new(n);
        for a in 0..n {
            for b in a..n {
                leq.set(a, b, true);
            }
        }
        LabelPoset {
            labels: vals.into_iter().map(Label::Int).collect(),
            leq,
            linext: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &Label {
        &self.labels[id]
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq.get(a, b)
    }

    /// Position of label `a` in the fixed linear extension.
    #[inline]
    pub fn rank(&self, a: usize) -> usize {
        self.rank[a]
    }

    pub fn linext(&self) -> &[usize] {
        &self.linext
    }

    pub fn relation(&self) -> &BitMatrix {
        &self.leq
    }

    pub fn to_file(&self) -> LabelPosetFile {
        let mut relation = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if a != b && self.leq(a, b) {
                    relation.push([a, b]);
                }
            }
        }
        LabelPosetFile {
            labels: self.labels.clone(),
            relation,
            linext: self.linext.clone(),
        }
    }

    /// Rebuilds from the serialized strict relation (its reflexive-transitive
    /// closure is taken).
    pub fn from_file(file: &LabelPosetFile) -> Result<LabelPoset> {
        let n = file.labels.len();
        let mut leq = BitMatrix::new(n);
        for a in 0..n {
            leq.set(a, a, true);
        }
        for &[a, b] in &file.relation {
            if a >= n || b >= n {
                return Err(Error::InvalidLabelPoset(format!(
                    "pair ({a}, {b}) out of range"
                )));
            }
            leq.set(a, b, true);
        }
        for k in 0..n {
            for a in 0..n {
                if leq.get(a, k) {
                    for b in 0..n {
                        if leq.get(k, b) {
                            leq.set(a, b, true);
                        }
                    }
                }
            }
        }
        LabelPoset::new(file.labels.clone(), leq, file.linext.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPosetFile {
    pub labels: Vec<Label>,
    /// Strict pairs `[a, b]` with `a < b`.
    pub relation: Vec<[usize; 2]>,
    pub linext: Vec<usize>,
}

/// Labels on the Hasse edges of a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabeling {
    label_poset: LabelPoset,
    edges: BTreeMap<(ElemId, ElemId), usize>,
}

impl EdgeLabeling {
    pub fn new(label_poset: LabelPoset, edges: BTreeMap<(ElemId, ElemId), usize>) -> Result<Self> {
        if let Some((e, _)) = edges.iter().find(|(_, &id)| id >= label_poset.len()) {
            return Err(Error::Invalid(format!(
                "edge {e:?} has an unknown label id"
            )));
        }
        Ok(EdgeLabeling { label_poset, edges })
    }

    /// Integer labels under the natural order.
    pub fn from_integers(labels: &BTreeMap<(ElemId, ElemId), i64>) -> EdgeLabeling {
        let lp = LabelPoset::integers(labels.values().copied());
        let edges = labels
            .iter()
            .map(|(&e, v)| (e, lp.index_of(&Label::Int(*v)).unwrap()))
            .collect();
        EdgeLabeling {
            label_poset: lp,
            edges,
        }
    }

    pub fn label_poset(&self) -> &LabelPoset {
        &self.label_poset
    }

    pub fn edges(&self) -> &BTreeMap<(ElemId, ElemId), usize> {
        &self.edges
    }

    pub fn label_id(&self, x: ElemId, y: ElemId) -> Option<usize> {
        self.edges.get(&(x, y)).copied()
    }

    pub fn label(&self, x: ElemId, y: ElemId) -> Option<&Label> {
        self.label_id(x, y).map(|id| self.label_poset.label(id))
    }

    /// Linear-extension ranks along a chain.
    pub fn rank_sequence(&self, chain: &[ElemId]) -> Result<Vec<usize>> {
        chain
            .windows(2)
            .map(|w| {
                self.label_id(w[0], w[1])
                    .map(|id| self.label_poset.rank(id))
                    .ok_or(Error::MissingEdgeLabel(w[0], w[1]))
            })
            .collect()
    }

    pub fn check_total(&self, l: &Lattice) -> Result<()> {
        for &(x, y) in l.poset().covers() {
            if !self.edges.contains_key(&(x, y)) {
                return Err(Error::MissingEdgeLabel(x, y));
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> LabelingFile {
        LabelingFile {
            edges: self
                .edges
                .iter()
                .map(|(&(x, y), &id)| EdgeEntry {
                    edge: [x, y],
                    label: self.label_poset.label(id).clone(),
                })
                .collect(),
            label_poset: Some(self.label_poset.to_file()),
        }
    }

    /// Reads a labeling; without a label poset all labels must be integers
    /// and are ordered naturally.
    pub fn from_file(file: &LabelingFile) -> Result<EdgeLabeling> {
        match &file.label_poset {
            Some(lpf) => {
                let lp = LabelPoset::from_file(lpf)?;
                let mut edges = BTreeMap::new();
                for entry in &file.edges {
                    let id = lp.index_of(&entry.label).ok_or_else(|| {
                        Error::Invalid(format!("label of edge {:?} not in label poset", entry.edge))
                    })?;
                    edges.insert((entry.edge[0], entry.edge[1]), id);
                }
                EdgeLabeling::new(lp, edges)
            }
            None => {
                let mut ints = BTreeMap::new();
                for entry in &file.edges {
                    match entry.label {
                        Label::Int(v) => {
                            ints.insert((entry.edge[0], entry.edge[1]), v);
                        }
                        Label::Tuple(_) => {
                            return Err(Error::Invalid(
                                "tuple labels need an explicit label poset".into(),
                            ))
                        }
                    }
                }
                Ok(EdgeLabeling::from_integers(&ints))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub edge: [ElemId; 2],
    pub label: Label,
}

/// JSON form of an [`EdgeLabeling`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingFile {
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_poset: Option<LabelPosetFile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureReason {
    NoRisingChain,
    MultipleRisingChains {
        count: usize,
    },
    /// The unique rising chain does not strictly precede the witnessed chain.
    RisingChainNotLexFirst,
    /// Atoms of `[atom, 1̂]` covering earlier atoms of `x` are not a prefix
    /// of the ordering of `atom`.
    CoveringAtomsNotPrefix {
        x: ElemId,
        atom: ElemId,
    },
    /// No `k < j` and atom `z` of `[a_j, 1̂]` with `a_k < z ≤ y`.
    MissingConnectingAtom {
        x: ElemId,
        a_i: ElemId,
        a_j: ElemId,
        y: ElemId,
    },
    NotSubMChain {
        linext_index: usize,
        chain: Chain,
    },
    NotElShelling {
        linext_index: usize,
        failures: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub interval: Option<(ElemId, ElemId)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<Chain>,
    pub reason: FailureReason,
    pub chains: Vec<Chain>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub intervals_checked: usize,
    pub chains_enumerated: usize,
    pub linear_extensions_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifierReport {
    pub verdict: Outcome,
    pub failures: Vec<Failure>,
    pub stats: Stats,
}

impl VerifierReport {
    pub fn new(failures: Vec<Failure>, stats: Stats) -> Self {
        let verdict = if failures.is_empty() {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        VerifierReport {
            verdict,
            failures,
            stats,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Outcome::Pass
    }
}
