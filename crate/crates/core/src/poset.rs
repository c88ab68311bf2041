//! Finite posets stored as a dense order relation plus the Hasse diagram.
//!
//! Elements are dense ids `0..n`. Every order this module produces breaks
//! ties by id so that results are reproducible.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ElemId = usize;

/// Square boolean matrix with bitset rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    /// `row[i] |= row[j]`
    fn or_row_into(&mut self, i: usize, j: usize) {
        for w in 0..self.words {
            let v = self.bits[j * self.words + w];
            self.bits[i * self.words + w] |= v;
        }
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.bits[i * self.words..(i + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if self.get(i, j) { '1' } else { '.' })
                    .collect()
            })
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

/// A finite partially ordered set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    leq: BitMatrix,
    covers: Vec<(ElemId, ElemId)>,
    upper: Vec<Vec<ElemId>>,
    lower: Vec<Vec<ElemId>>,
}

impl Poset {
    /// Builds a poset from its Hasse diagram.
    ///
    /// Every input pair must be a genuine cover: pairs implied by the others
    /// are rejected with [`Error::RedundantCover`] instead of being dropped.
    pub fn from_covers(names: Vec<String>, cover_pairs: &[(ElemId, ElemId)]) -> Result<Poset> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(x, y) in cover_pairs {
            if x >= n {
                return Err(Error::IdOutOfRange(x, n));
            }
            if y >= n {
                return Err(Error::IdOutOfRange(y, n));
            }
            if x == y {
                return Err(Error::CycleDetected(x));
            }
            if !seen.insert((x, y)) {
                return Err(Error::DuplicatePair(x, y));
            }
            succ[x].push(y);
            indeg[y] += 1;
        }

        // Kahn's algorithm; anything left over lies on a cycle.
        let mut order = Vec::with_capacity(n);
        let mut ready: BTreeSet<ElemId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
            return Err(Error::CycleDetected(stuck));
        }

        let mut leq = BitMatrix::new(n);
        for &v in order.iter().rev() {
            leq.set(v, v, true);
            for &w in &succ[v] {
                leq.or_row_into(v, w);
            }
        }

        let poset = Poset::with_relation(names, leq);
        for &(x, y) in cover_pairs {
            if !poset.covers_rel(x, y) {
                return Err(Error::RedundantCover(x, y));
            }
        }
        Ok(poset)
    }

    /// Builds a poset from a full order relation, checking the partial order
    /// axioms.
    pub fn from_relation(names: Vec<String>, leq: BitMatrix) -> Result<Poset> {
        let n = names.len();
        if leq.len() != n {
            return Err(Error::NotAPartialOrder(format!(
                "relation has size {} but there are {} names",
                leq.len(),
                n
            )));
        }
        for i in 0..n {
            if !leq.get(i, i) {
                return Err(Error::NotAPartialOrder(format!("not reflexive at {i}")));
            }
            for j in 0..n {
                if i != j && leq.get(i, j) && leq.get(j, i) {
                    return Err(Error::NotAPartialOrder(format!(
                        "not antisymmetric at ({i}, {j})"
                    )));
                }
                if leq.get(i, j) {
                    for k in 0..n {
                        if leq.get(j, k) && !leq.get(i, k) {
                            return Err(Error::NotAPartialOrder(format!(
                                "not transitive at ({i}, {j}, {k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Poset::with_relation(names, leq))
    }

    /// Computes the Hasse diagram of an already validated relation.
    fn with_relation(names: Vec<String>, leq: BitMatrix) -> Poset {
        let n = names.len();
        let mut covers = Vec::new();
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                if x == y || !leq.get(x, y) {
                    continue;
                }
                let between = (0..n).any(|z| z != x && z != y && leq.get(x, z) && leq.get(z, y));
                if !between {
                    covers.push((x, y));
                }
            }
        }
        for &(x, y) in &covers {
            upper[x].push(y);
            lower[y].push(x);
        }
        Poset {
            names,
            leq,
            covers,
            upper,
            lower,
        }
    }

    /// Poset with names `"0".."n-1"`.
    pub fn from_covers_unnamed(n: usize, cover_pairs: &[(ElemId, ElemId)]) -> Result<Poset> {
        Poset::from_covers((0..n).map(|i| i.to_string()).collect(), cover_pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: ElemId) -> &str {
        &self.names[x]
    }

    pub fn id_of(&self, name: &str) -> Option<ElemId> {
        self.names.iter().position(|s| s == name)
    }

    pub fn relation(&self) -> &BitMatrix {
        &self.leq
    }

    #[inline]
    pub fn leq(&self, x: ElemId, y: ElemId) -> bool {
        self.leq.get(x, y)
    }

    #[inline]
    pub fn lt(&self, x: ElemId, y: ElemId) -> bool {
        x != y && self.leq.get(x, y)
    }

    pub fn comparable(&self, x: ElemId, y: ElemId) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `x ⋖ y`
    pub fn covers_rel(&self, x: ElemId, y: ElemId) -> bool {
        self.upper[x].binary_search(&y).is_ok()
    }

    /// Hasse edges, sorted.
    pub fn covers(&self) -> &[(ElemId, ElemId)] {
        &self.covers
    }

    pub fn upper_covers(&self, x: ElemId) -> &[ElemId] {
        &self.upper[x]
    }

    pub fn lower_covers(&self, x: ElemId) -> &[ElemId] {
        &self.lower[x]
    }

    pub fn minimal_elements(&self) -> Vec<ElemId> {
        (0..self.len())
            .filter(|&x| self.lower[x].is_empty())
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<ElemId> {
        (0..self.len())
            .filter(|&x| self.upper[x].is_empty())
            .collect()
    }

    /// Number of elements strictly below `x`.
    pub fn down_count(&self, x: ElemId) -> usize {
        self.leq.transpose_row_count(x) - 1
    }

    /// Length of the longest chain ending at each element.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.len()];
        for x in self.topological_order() {
            for &y in &self.upper[x] {
                h[y] = h[y].max(h[x] + 1);
            }
        }
        h
    }

    /// Elements sorted by (number of elements below, id); a linear extension.
    pub fn topological_order(&self) -> Vec<ElemId> {
        let mut ids: Vec<ElemId> = (0..self.len()).collect();
        ids.sort_by_key(|&x| (self.down_count(x), x));
        ids
    }

    /// The order dual: same elements, reversed relation.
    pub fn dual(&self) -> Poset {
        Poset::with_relation(self.names.clone(), self.leq.transpose())
    }

    /// Induced subposet on `elems` (kept in the given order).
    pub fn subposet(&self, elems: &[ElemId]) -> Poset {
        let mut leq = BitMatrix::new(elems.len());
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate() {
                leq.set(i, j, self.leq(x, y));
            }
        }
        let names = elems.iter().map(|&x| self.names[x].clone()).collect();
        Poset::with_relation(names, leq)
    }

    /// All linear extensions, each once, in lexicographic order of id
    /// sequences.
    pub fn linear_extensions(&self) -> LinearExtensions<'_> {
        LinearExtensions {
            poset: self,
            current: None,
            done: false,
        }
    }

    /// True if `order` is a permutation of the elements refining the order.
    pub fn is_linear_extension(&self, order: &[ElemId]) -> bool {
        if order.len() != self.len() {
            return false;
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &x) in order.iter().enumerate() {
            if x >= self.len() || pos[x] != usize::MAX {
                return false;
            }
            pos[x] = i;
        }
        self.covers.iter().all(|&(x, y)| pos[x] < pos[y])
    }

    /// Sorted multiset of per-element invariants; equal for isomorphic posets.
    pub fn invariant_key(&self) -> Vec<(usize, usize, usize, usize, usize)> {
        let h = self.heights();
        let mut key: Vec<_> = (0..self.len()).map(|x| signature(self, &h, x)).collect();
        key.sort_unstable();
        key
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            elements: self.names.clone(),
            covers: self.covers.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }

    pub fn from_file(file: &PosetFile) -> Result<Poset> {
        let pairs: Vec<(ElemId, ElemId)> = file.covers.iter().map(|p| (p[0], p[1])).collect();
        Poset::from_covers(file.elements.clone(), &pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("poset serializes")
    }

    pub fn from_json(text: &str) -> Result<Poset> {
        let file: PosetFile =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("poset JSON: {e}")))?;
        Poset::from_file(&file)
    }
}

impl BitMatrix {
    fn transpose_row_count(&self, j: usize) -> usize {
        (0..self.n).filter(|&i| self.get(i, j)).count()
    }
}

/// The interchange format: element names plus cover pairs as indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub elements: Vec<String>,
    pub covers: Vec<[ElemId; 2]>,
}

/// Iterator over linear extensions in lexicographic order.
pub struct LinearExtensions<'a> {
    poset: &'a Poset,
    current: Option<Vec<ElemId>>,
    done: bool,
}

impl LinearExtensions<'_> {
    fn available(&self, placed: &[bool]) -> impl Iterator<Item = ElemId> + '_ {
        let p = self.poset;
        let placed = placed.to_vec();
        (0..p.len()).filter(move |&x| !placed[x] && p.lower[x].iter().all(|&l| placed[l]))
    }

    /// Greedily appends the smallest available element until complete.
    fn complete(&self, prefix: &mut Vec<ElemId>) {
        let mut placed = vec![false; self.poset.len()];
        for &x in prefix.iter() {
            placed[x] = true;
        }
        while prefix.len() < self.poset.len() {
            let next = self
                .available(&placed)
                .next()
                .expect("a finite poset always has a minimal remaining element");
            placed[next] = true;
            prefix.push(next);
        }
    }
}

impl Iterator for LinearExtensions<'_> {
    type Item = Vec<ElemId>;

    fn next(&mut self) -> Option<Vec<ElemId>> {
        if self.done {
            return None;
        }
        let next = match self.current.take() {
            None => {
                let mut v = Vec::new();
                self.complete(&mut v);
                Some(v)
            }
            Some(cur) => {
                let mut found = None;
                for i in (0..cur.len()).rev() {
                    let mut placed = vec![false; self.poset.len()];
                    for &x in &cur[..i] {
                        placed[x] = true;
                    }
                    if let Some(bigger) = self.available(&placed).find(|&x| x > cur[i]) {
                        let mut v = cur[..i].to_vec();
                        v.push(bigger);
                        self.complete(&mut v);
                        found = Some(v);
                        break;
                    }
                }
                found
            }
        };
        match next {
            Some(v) => {
                self.current = Some(v.clone());
                Some(v)
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

/// Per-element isomorphism invariant.
fn signature(p: &Poset, heights: &[usize], x: ElemId) -> (usize, usize, usize, usize, usize) {
    let below = p.down_count(x);
    let above = p.leq.row_count(x) - 1;
    (heights[x], below, above, p.lower[x].len(), p.upper[x].len())
}

/// Searches for an order isomorphism `p → q`, returned as `map[x_p] = x_q`.
pub fn is_isomorphic(p: &Poset, q: &Poset) -> Option<Vec<ElemId>> {
    if p.len() != q.len() || p.covers.len() != q.covers.len() {
        return None;
    }
    let hp = p.heights();
    let hq = q.heights();
    let sp: Vec<_> = (0..p.len()).map(|x| signature(p, &hp, x)).collect();
    let sq: Vec<_> = (0..q.len()).map(|x| signature(q, &hq, x)).collect();
    let mut a = sp.clone();
    let mut b = sq.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return None;
    }

    let order = p.topological_order();
    let mut map = vec![usize::MAX; p.len()];
    let mut used = vec![false; q.len()];

    fn extend(
        depth: usize,
        order: &[ElemId],
        p: &Poset,
        q: &Poset,
        sp: &[(usize, usize, usize, usize, usize)],
        sq: &[(usize, usize, usize, usize, usize)],
        map: &mut Vec<ElemId>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let x = order[depth];
        for y in 0..q.len() {
            if used[y] || sp[x] != sq[y] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&u| {
                let v = map[u];
                p.leq(u, x) == q.leq(v, y) && p.leq(x, u) == q.leq(y, v)
            });
            if !consistent {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if extend(depth + 1, order, p, q, sp, sq, map, used) {
                return true;
            }
            used[y] = false;
            map[x] = usize::MAX;
        }
        false
    }

    if extend(0, &order, p, q, &sp, &sq, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn n5() -> Poset {
        Poset::from_covers(
            names(&["0", "a", "b", "c", "1"]),
            &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        )
        .unwrap()
    }

    #[test]
    fn chain_closure() {
        let p = Poset::from_covers(names(&["a", "b", "c"]), &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
        assert_eq!(p.covers(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn two_cycle_rejected() {
        let err = Poset::from_covers(names(&["a", "b"]), &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::CycleDetected(_)));
    }

    #[test]
    fn redundant_cover_rejected() {
        let err =
            Poset::from_covers(names(&["a", "b", "c"]), &[(0, 1), (1, 2), (0, 2)]).unwrap_err();
        assert_eq!(err, Error::RedundantCover(0, 2));
    }

    #[test]
    fn bad_ids_and_duplicates() {
        assert_eq!(
            Poset::from_covers(names(&["a"]), &[(0, 3)]).unwrap_err(),
            Error::IdOutOfRange(3, 1)
        );
        assert_eq!(
            Poset::from_covers(names(&["a", "b"]), &[(0, 1), (0, 1)]).unwrap_err(),
            Error::DuplicatePair(0, 1)
        );
    }

    #[test]
    fn pentagon_structure() {
        let p = n5();
        assert!(p.leq(1, 2));
        assert!(!p.comparable(3, 1));
        assert!(!p.comparable(3, 2));
    }

    #[test]
    fn linear_extension_counts() {
        let chain = Poset::from_covers_unnamed(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.linear_extensions().count(), 1);
        let anti = Poset::from_covers_unnamed(3, &[]).unwrap();
        let all: Vec<_> = anti.linear_extensions().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[5], vec![2, 1, 0]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        let v = Poset::from_covers_unnamed(3, &[(0, 1), (0, 2)]).unwrap();
        let exts: Vec<_> = v.linear_extensions().collect();
        assert_eq!(exts, vec![vec![0, 1, 2], vec![0, 2, 1]]);
        assert!(exts.iter().all(|e| v.is_linear_extension(e)));
        let empty = Poset::from_covers_unnamed(0, &[]).unwrap();
        assert_eq!(empty.linear_extensions().count(), 1);
    }

    #[test]
    fn isomorphism() {
        let diamond = Poset::from_covers_unnamed(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let relabeled = Poset::from_covers_unnamed(4, &[(3, 0), (3, 2), (0, 1), (2, 1)]).unwrap();
        let map = is_isomorphic(&diamond, &relabeled).unwrap();
        for &(x, y) in diamond.covers() {
            assert!(relabeled.covers_rel(map[x], map[y]));
        }
        let chain5 = Poset::from_covers_unnamed(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(is_isomorphic(&n5(), &chain5).is_none());
    }

    #[test]
    fn duality() {
        let p = n5();
        assert!(is_isomorphic(&p.dual().dual(), &p).is_some());
        let chain = Poset::from_covers_unnamed(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(is_isomorphic(&chain.dual(), &chain).is_some());
        let v = Poset::from_covers_unnamed(3, &[(0, 1), (0, 2)]).unwrap();
        let lambda = Poset::from_covers_unnamed(3, &[(1, 0), (2, 0)]).unwrap();
        assert!(is_isomorphic(&v.dual(), &lambda).is_some());
        assert!(is_isomorphic(&v, &lambda).is_none());
    }

    #[test]
    fn json_round_trip() {
        let text =
            r#"{"elements": ["0","a","b","c","1"], "covers": [[0,1],[1,2],[2,4],[0,3],[3,4]]}"#;
        let p = Poset::from_json(text).unwrap();
        assert_eq!(p, n5());
        assert_eq!(Poset::from_json(&p.to_json()).unwrap(), p);
    }
}
