use std::collections::{BTreeMap, HashMap};

use super::{Failure, FailureReason, Stats, VerifierReport};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::poset::ElemId;

/// One ordering of the atoms of `[x, 1̂]` per element `x ≠ 1̂`, shared by
/// every root.
pub type AtomOrderingTable = BTreeMap<ElemId, Vec<ElemId>>;

fn check_permutation(l: &Lattice, table: &AtomOrderingTable) -> Result<()> {
    for x in 0..l.len() {
        if x == l.top() {
            continue;
        }
        let mut got = table.get(&x).cloned().ok_or(Error::NotAPermutation(x))?;
        got.sort_unstable();
        if got != l.upper_covers(x) {
            return Err(Error::NotAPermutation(x));
        }
    }
    Ok(())
}

/// Condition 1 for position `j` of `atoms`: the upper covers of `atoms[j]`
/// that also cover an earlier atom lead the ordering of `atoms[j]`.
fn prefix_condition(l: &Lattice, table: &AtomOrderingTable, atoms: &[ElemId], j: usize) -> bool {
    let aj = atoms[j];
    if aj == l.top() {
        return true;
    }
    let order = &table[&aj];
    let covers_earlier = |b: ElemId| atoms[..j].iter().any(|&ai| l.covers_rel(ai, b));
    let count = order.iter().filter(|&&b| covers_earlier(b)).count();
    order[..count].iter().all(|&b| covers_earlier(b))
}

/// Condition 2 for the pair `i < j`: every common upper bound `y` of `a_i`
/// and `a_j` lies above some atom `z` of `[a_j, 1̂]` that is above some
/// `a_k`, `k < j`. Returns the first failing `y`.
fn connecting_atom_condition(l: &Lattice, atoms: &[ElemId], i: usize, j: usize) -> Option<ElemId> {
    let (ai, aj) = (atoms[i], atoms[j]);
    (0..l.len())
        .filter(|&y| l.lt(ai, y) && l.lt(aj, y))
        .find(|&y| {
            !l.upper_covers(aj)
                .iter()
                .any(|&z| l.leq(z, y) && atoms[..j].iter().any(|&ak| l.lt(ak, z)))
        })
}

/// Verifies a root-independent recursive atom ordering: for every `x` both
/// conditions are checked with `a_1..a_t = table[x]`.
pub fn verify_recursive_atom_ordering(
    l: &Lattice,
    table: &AtomOrderingTable,
) -> Result<VerifierReport> {
    check_permutation(l, table)?;
    let mut failures = Vec::new();
    let mut stats = Stats::default();
    for x in 0..l.len() {
        if x == l.top() {
            continue;
        }
        stats.intervals_checked += 1;
        let atoms = &table[&x];
        for j in 0..atoms.len() {
            if !prefix_condition(l, table, atoms, j) {
                failures.push(Failure {
                    interval: Some((x, l.top())),
                    root: None,
                    reason: FailureReason::CoveringAtomsNotPrefix { x, atom: atoms[j] },
                    chains: vec![table[&atoms[j]].clone()],
                });
            }
            for i in 0..j {
                if let Some(y) = connecting_atom_condition(l, atoms, i, j) {
                    failures.push(Failure {
                        interval: Some((x, l.top())),
                        root: None,
                        reason: FailureReason::MissingConnectingAtom {
                            x,
                            a_i: atoms[i],
                            a_j: atoms[j],
                            y,
                        },
                        chains: Vec::new(),
                    });
                }
            }
        }
    }
    Ok(VerifierReport::new(failures, stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_elements: usize,
    pub max_atoms: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_elements: 12,
            max_atoms: 10,
        }
    }
}

/// Backtracking search for a table accepted by
/// [`verify_recursive_atom_ordering`]. Elements are assigned from the top
/// down, so the orderings a candidate depends on are already fixed; the
/// admissible orderings of `x` are memoized on the orderings of its upper
/// covers.
pub fn search_recursive_atom_ordering(
    l: &Lattice,
    caps: SearchCaps,
) -> Result<Option<AtomOrderingTable>> {
    if l.len() > caps.max_elements {
        return Err(Error::SizeCapExceeded {
            what: "lattice elements",
            actual: l.len(),
            cap: caps.max_elements,
        });
    }
    let widest = (0..l.len())
        .map(|x| l.upper_covers(x).len())
        .max()
        .unwrap_or(0);
    if widest > caps.max_atoms {
        return Err(Error::SizeCapExceeded {
            what: "atoms in an interval",
            actual: widest,
            cap: caps.max_atoms,
        });
    }

    let mut order: Vec<ElemId> = l.poset().topological_order();
    order.reverse();
    order.retain(|&x| x != l.top());

    type MemoKey = (ElemId, Vec<Vec<ElemId>>);
    struct Search<'a> {
        l: &'a Lattice,
        order: Vec<ElemId>,
        table: AtomOrderingTable,
        memo: HashMap<MemoKey, Vec<Vec<ElemId>>>,
    }

    impl Search<'_> {
        fn candidates(&mut self, x: ElemId) -> Vec<Vec<ElemId>> {
            let l = self.l;
            let key: MemoKey = (
                x,
                l.upper_covers(x)
                    .iter()
                    .map(|a| self.table.get(a).cloned().unwrap_or_default())
                    .collect(),
            );
            if let Some(found) = self.memo.get(&key) {
                return found.clone();
            }
            let mut out = Vec::new();
            let mut prefix = Vec::new();
            let mut used = vec![false; l.len()];
            self.extend(x, &mut prefix, &mut used, &mut out);
            self.memo.insert(key, out.clone());
            out
        }

        fn extend(
            &self,
            x: ElemId,
            prefix: &mut Vec<ElemId>,
            used: &mut [bool],
            out: &mut Vec<Vec<ElemId>>,
        ) {
            let atoms = self.l.upper_covers(x);
            if prefix.len() == atoms.len() {
                out.push(prefix.clone());
                return;
            }
            for &a in atoms {
                if used[a] {
                    continue;
                }
                prefix.push(a);
                let j = prefix.len() - 1;
                let ok = prefix_condition(self.l, &self.table, prefix, j)
                    && (0..j).all(|i| connecting_atom_condition(self.l, prefix, i, j).is_none());
                if ok {
                    used[a] = true;
                    self.extend(x, prefix, used, out);
                    used[a] = false;
                }
                prefix.pop();
            }
        }

        fn assign(&mut self, depth: usize) -> bool {
            if depth == self.order.len() {
                return true;
            }
            let x = self.order[depth];
            for cand in self.candidates(x) {
                self.table.insert(x, cand);
                if self.assign(depth + 1) {
                    return true;
                }
            }
            self.table.remove(&x);
            false
        }
    }

    let mut search = Search {
        l,
        order,
        table: AtomOrderingTable::new(),
        memo: HashMap::new(),
    };
    if search.assign(0) {
        Ok(Some(search.table))
    } else {
        Ok(None)
    }
}
