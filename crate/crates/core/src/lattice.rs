//! Bounded finite lattices with precomputed meet and join tables.

use crate::error::{Error, Result};
use crate::poset::{ElemId, Poset};

/// A saturated chain, listed bottom to top.
pub type Chain = Vec<ElemId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    poset: Poset,
    bottom: ElemId,
    top: ElemId,
    meet: Vec<ElemId>,
    join: Vec<ElemId>,
}

/// Greatest element of `candidates` under `ge`, if one dominates all others.
fn extremum(candidates: &[ElemId], dominates: impl Fn(ElemId, ElemId) -> bool) -> Option<ElemId> {
    candidates
        .iter()
        .copied()
        .find(|&c| candidates.iter().all(|&d| dominates(c, d)))
}

impl Lattice {
    /// Checks the lattice axioms and tabulates meets and joins.
    ///
    /// Pairs are scanned in id order, join before meet. A pair without any
    /// common upper (lower) bound reports [`Error::NotBounded`]; a pair with
    /// bounds but no least (greatest) one reports `NoJoin` (`NoMeet`).
    pub fn from_poset(p: Poset) -> Result<Lattice> {
        let n = p.len();
        if n == 0 {
            return Err(Error::NotBounded);
        }
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in x..n {
                let ups: Vec<ElemId> = (0..n).filter(|&z| p.leq(x, z) && p.leq(y, z)).collect();
                if ups.is_empty() {
                    return Err(Error::NotBounded);
                }
                let j = extremum(&ups, |c, d| p.leq(c, d)).ok_or(Error::NoJoin(x, y))?;
                let downs: Vec<ElemId> = (0..n).filter(|&z| p.leq(z, x) && p.leq(z, y)).collect();
                if downs.is_empty() {
                    return Err(Error::NotBounded);
                }
                let m = extremum(&downs, |c, d| p.leq(d, c)).ok_or(Error::NoMeet(x, y))?;
                join[x * n + y] = j;
                join[y * n + x] = j;
                meet[x * n + y] = m;
                meet[y * n + x] = m;
            }
        }
        let bottom = (0..n).fold(0, |acc, x| meet[acc * n + x]);
        let top = (0..n).fold(0, |acc, x| join[acc * n + x]);
        Ok(Lattice {
            poset: p,
            bottom,
            top,
            meet,
            join,
        })
    }

    pub fn from_covers(names: Vec<String>, cover_pairs: &[(ElemId, ElemId)]) -> Result<Lattice> {
        Lattice::from_poset(Poset::from_covers(names, cover_pairs)?)
    }

    pub fn from_json(text: &str) -> Result<Lattice> {
        Lattice::from_poset(Poset::from_json(text)?)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn bottom(&self) -> ElemId {
        self.bottom
    }

    pub fn top(&self) -> ElemId {
        self.top
    }

    #[inline]
    pub fn meet(&self, x: ElemId, y: ElemId) -> ElemId {
        self.meet[x * self.len() + y]
    }

    #[inline]
    pub fn join(&self, x: ElemId, y: ElemId) -> ElemId {
        self.join[x * self.len() + y]
    }

    #[inline]
    pub fn leq(&self, x: ElemId, y: ElemId) -> bool {
        self.poset.leq(x, y)
    }

    #[inline]
    pub fn lt(&self, x: ElemId, y: ElemId) -> bool {
        self.poset.lt(x, y)
    }

    pub fn covers_rel(&self, x: ElemId, y: ElemId) -> bool {
        self.poset.covers_rel(x, y)
    }

    pub fn upper_covers(&self, x: ElemId) -> &[ElemId] {
        self.poset.upper_covers(x)
    }

    pub fn lower_covers(&self, x: ElemId) -> &[ElemId] {
        self.poset.lower_covers(x)
    }

    pub fn name(&self, x: ElemId) -> &str {
        self.poset.name(x)
    }

    pub fn atoms(&self) -> Vec<ElemId> {
        self.upper_covers(self.bottom).to_vec()
    }

    pub fn coatoms(&self) -> Vec<ElemId> {
        self.lower_covers(self.top).to_vec()
    }

    /// Elements of `[x, y]` in ascending id order.
    pub fn interval_elements(&self, x: ElemId, y: ElemId) -> Vec<ElemId> {
        (0..self.len())
            .filter(|&z| self.leq(x, z) && self.leq(z, y))
            .collect()
    }

    /// The interval `[x, y]` as a lattice in its own right.
    pub fn interval(&self, x: ElemId, y: ElemId) -> Result<Interval> {
        if !self.leq(x, y) {
            return Err(Error::NotComparable(x, y));
        }
        let elems = self.interval_elements(x, y);
        let mut local = vec![usize::MAX; self.len()];
        for (i, &z) in elems.iter().enumerate() {
            local[z] = i;
        }
        let k = elems.len();
        let mut meet = vec![0; k * k];
        let mut join = vec![0; k * k];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                meet[i * k + j] = local[self.meet(a, b)];
                join[i * k + j] = local[self.join(a, b)];
            }
        }
        let lattice = Lattice {
            poset: self.poset.subposet(&elems),
            bottom: local[x],
            top: local[y],
            meet,
            join,
        };
        Ok(Interval {
            lattice,
            embedding: elems,
        })
    }

    /// All saturated chains from `x` to `y`, depth first by ascending id.
    pub fn chains_between(&self, x: ElemId, y: ElemId) -> Vec<Chain> {
        let mut out = Vec::new();
        if !self.leq(x, y) {
            return out;
        }
        let mut path = vec![x];
        self.chains_dfs(y, &mut path, &mut out);
        out
    }

    fn chains_dfs(&self, y: ElemId, path: &mut Chain, out: &mut Vec<Chain>) {
        let last = *path.last().unwrap();
        if last == y {
            out.push(path.clone());
            return;
        }
        for &next in self.upper_covers(last) {
            if self.leq(next, y) {
                path.push(next);
                self.chains_dfs(y, path, out);
                path.pop();
            }
        }
    }

    /// All maximal chains `0̂ → 1̂`.
    pub fn maximal_chains(&self) -> Vec<Chain> {
        self.chains_between(self.bottom, self.top)
    }

    pub fn is_maximal_chain(&self, chain: &[ElemId]) -> bool {
        self.is_saturated_chain(chain, self.bottom, self.top)
    }

    pub fn is_saturated_chain(&self, chain: &[ElemId], from: ElemId, to: ElemId) -> bool {
        chain.first() == Some(&from)
            && chain.last() == Some(&to)
            && chain.iter().all(|&z| z < self.len())
            && chain.windows(2).all(|w| self.covers_rel(w[0], w[1]))
    }

    /// The order dual, with meet and join exchanged.
    pub fn dual(&self) -> Lattice {
        Lattice {
            poset: self.poset.dual(),
            bottom: self.top,
            top: self.bottom,
            meet: self.join.clone(),
            join: self.meet.clone(),
        }
    }
}

/// A materialized interval together with its embedding into the parent.
#[derive(Clone, Debug)]
pub struct Interval {
    pub lattice: Lattice,
    /// `embedding[local_id] = parent_id`, increasing.
    pub embedding: Vec<ElemId>,
}

impl Interval {
    pub fn to_parent(&self, local: ElemId) -> ElemId {
        self.embedding[local]
    }

    pub fn to_local(&self, parent: ElemId) -> Option<ElemId> {
        self.embedding.binary_search(&parent).ok()
    }
}
