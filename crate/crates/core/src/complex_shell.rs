//! Order complexes and shelling orders of their facets.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::poset::{ElemId, Poset};
use crate::shelling::EdgeLabeling;

pub const DEFAULT_FACET_CAP: usize = 12;

/// A simplicial complex given by its facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub vertices: Vec<ElemId>,
    /// Sorted vertex sets; no facet contains another.
    pub facets: Vec<Vec<ElemId>>,
}

impl SimplicialComplex {
    pub fn new(vertices: Vec<ElemId>, facets: Vec<Vec<ElemId>>) -> Result<Self> {
        let facets: Vec<Vec<ElemId>> = facets
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        for (i, f) in facets.iter().enumerate() {
            if let Some(v) = f.iter().find(|v| !vertices.contains(v)) {
                return Err(Error::InvalidComplex(format!(
                    "facet {i} uses unknown vertex {v}"
                )));
            }
            for (j, g) in facets.iter().enumerate() {
                if i != j && is_subset(f, g) {
                    return Err(Error::InvalidComplex(format!(
                        "facet {i} is contained in facet {j}"
                    )));
                }
            }
        }
        Ok(SimplicialComplex { vertices, facets })
    }

    pub fn dim(&self) -> isize {
        self.facets
            .iter()
            .map(|f| f.len() as isize - 1)
            .max()
            .unwrap_or(-1)
    }
}

fn is_subset(a: &[ElemId], b: &[ElemId]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}

fn intersect(a: &[ElemId], b: &[ElemId]) -> Vec<ElemId> {
    a.iter()
        .copied()
        .filter(|v| b.binary_search(v).is_ok())
        .collect()
}

/// Facets are the maximal chains of `p`. The empty poset gives the complex
/// whose only face is the empty set.
pub fn order_complex(p: &Poset) -> SimplicialComplex {
    let mut facets = Vec::new();
    let mut stack: Vec<Vec<ElemId>> = p.minimal_elements().into_iter().map(|m| vec![m]).collect();
    stack.reverse();
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        let ups = p.upper_covers(last);
        if ups.is_empty() {
            facets.push(path);
            continue;
        }
        for &u in ups.iter().rev() {
            let mut next = path.clone();
            next.push(u);
            stack.push(next);
        }
    }
    if facets.is_empty() {
        facets.push(Vec::new());
    }
    SimplicialComplex::new((0..p.len()).collect(), facets).expect("maximal chains form a complex")
}

/// Order complex of the proper part `L ∖ {0̂, 1̂}`, in lattice ids.
pub fn lattice_order_complex(l: &Lattice) -> SimplicialComplex {
    let proper: Vec<ElemId> = (0..l.len())
        .filter(|&x| x != l.bottom() && x != l.top())
        .collect();
    let inner = order_complex(&l.poset().subposet(&proper));
    let facets = inner
        .facets
        .iter()
        .map(|f| f.iter().map(|&v| proper[v]).collect())
        .collect();
    SimplicialComplex::new(proper, facets).expect("relabeling keeps a complex valid")
}

/// Which dimension the intersection with earlier facets must have.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DimFormula {
    /// `dim(F_{k+1}) - 1`, the usual (nonpure) shelling condition.
    #[default]
    Standard,
    /// `dim(F_k) - 1`, measured against the previous facet.
    Paper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShellingVerdict {
    pub holds: bool,
    /// Position (0-based) of the first facet whose attachment fails.
    pub failed_position: Option<usize>,
    /// Maximal faces of the failing intersection.
    pub intersection: Vec<Vec<ElemId>>,
}

/// Maximal elements of `(F_1 ∪ … ∪ F_k) ∩ F` as a complex. The empty face
/// is always present once there is an earlier facet.
fn attachment(earlier: &[&Vec<ElemId>], f: &[ElemId]) -> Vec<Vec<ElemId>> {
    let mut parts: Vec<Vec<ElemId>> = earlier.iter().map(|g| intersect(g, f)).collect();
    parts.sort();
    parts.dedup();
    let maximal: Vec<Vec<ElemId>> = parts
        .iter()
        .filter(|a| !parts.iter().any(|b| b.len() > a.len() && is_subset(a, b)))
        .cloned()
        .collect();
    maximal
}

fn attaches(earlier: &[&Vec<ElemId>], f: &[ElemId], required_size: isize) -> bool {
    attachment(earlier, f)
        .iter()
        .all(|face| face.len() as isize == required_size)
}

fn required_size(formula: DimFormula, previous: &[ElemId], next: &[ElemId]) -> isize {
    match formula {
        DimFormula::Standard => next.len() as isize - 1,
        DimFormula::Paper => previous.len() as isize - 1,
    }
}

pub fn is_shelling_order(
    c: &SimplicialComplex,
    order: &[usize],
    formula: DimFormula,
) -> Result<ShellingVerdict> {
    let mut seen = vec![false; c.facets.len()];
    if order.len() != c.facets.len()
        || order
            .iter()
            .any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
    {
        return Err(Error::Invalid(format!(
            "{order:?} is not a permutation of the facets"
        )));
    }
    for k in 1..order.len() {
        let earlier: Vec<&Vec<ElemId>> = order[..k].iter().map(|&i| &c.facets[i]).collect();
        let f = &c.facets[order[k]];
        let need = required_size(formula, &c.facets[order[k - 1]], f);
        if !attaches(&earlier, f, need) {
            return Ok(ShellingVerdict {
                holds: false,
                failed_position: Some(k),
                intersection: attachment(&earlier, f),
            });
        }
    }
    Ok(ShellingVerdict {
        holds: true,
        failed_position: None,
        intersection: Vec::new(),
    })
}

/// Depth-first search for a shelling order, trying facets by ascending index.
/// Dead ends are memoized on the set of placed facets (and the last facet,
/// which matters for [`DimFormula::Paper`]).
pub fn find_shelling_order(
    c: &SimplicialComplex,
    cap: usize,
    formula: DimFormula,
) -> Result<Option<Vec<usize>>> {
    let t = c.facets.len();
    if t > cap || t > 63 {
        return Err(Error::SizeCapExceeded {
            what: "facets",
            actual: t,
            cap: cap.min(63),
        });
    }

    struct Search<'a> {
        c: &'a SimplicialComplex,
        formula: DimFormula,
        dead: HashSet<(u64, usize)>,
    }

    impl Search<'_> {
        fn extend(&mut self, order: &mut Vec<usize>, mask: u64) -> bool {
            let t = self.c.facets.len();
            if order.len() == t {
                return true;
            }
            let last = *order.last().unwrap();
            let key = match self.formula {
                DimFormula::Standard => (mask, 0),
                DimFormula::Paper => (mask, last),
            };
            if self.dead.contains(&key) {
                return false;
            }
            let earlier: Vec<&Vec<ElemId>> = order.iter().map(|&i| &self.c.facets[i]).collect();
            for next in 0..t {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let f = &self.c.facets[next];
                let need = required_size(self.formula, &self.c.facets[last], f);
                if !attaches(&earlier, f, need) {
                    continue;
                }
                order.push(next);
                if self.extend(order, mask | 1 << next) {
                    return true;
                }
                order.pop();
            }
            self.dead.insert(key);
            false
        }
    }

    if t == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut search = Search {
        c,
        formula,
        dead: HashSet::new(),
    };
    for first in 0..t {
        let mut order = vec![first];
        if search.extend(&mut order, 1 << first) {
            return Ok(Some(order));
        }
    }
    Ok(None)
}

/// Maximal chains of `L` in lexicographic order of their label ranks, as
/// facet indices of [`lattice_order_complex`].
pub fn el_to_facet_order(l: &Lattice, labeling: &EdgeLabeling) -> Result<Vec<usize>> {
    let complex = lattice_order_complex(l);
    let index: HashMap<&Vec<ElemId>, usize> = complex
        .facets
        .iter()
        .enumerate()
        .map(|(i, f)| (f, i))
        .collect();
    let mut chains = Vec::new();
    for chain in l.maximal_chains() {
        let ranks = labeling.rank_sequence(&chain)?;
        chains.push((ranks, chain));
    }
    chains.sort();
    chains
        .iter()
        .map(|(_, chain)| {
            let mut facet: Vec<ElemId> = chain
                .iter()
                .copied()
                .filter(|&x| x != l.bottom() && x != l.top())
                .collect();
            facet.sort_unstable();
            index
                .get(&facet)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("chain {chain:?} has no facet")))
        })
        .collect()
}
