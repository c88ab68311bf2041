//! Order congruence lattices: partitions of a poset that arise as fibers of
//! weakly order-preserving maps to the integers, ordered by refinement.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Chain, Lattice};
use crate::lattice_props::is_sub_m_chain;
use crate::poset::{BitMatrix, ElemId, Poset, PosetFile};
use crate::shelling::{
    verify_el_shelling, EdgeLabeling, Failure, FailureReason, RisingMode, Stats, VerifierReport,
};

pub const MAX_GROUND_SIZE: usize = 8;
pub const MAX_PROP51_SIZE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderPartition {
    /// Blocks sorted by least element id, each sorted.
    pub blocks: Vec<Vec<ElemId>>,
    /// A weakly order-preserving map onto `1..=k` whose fibers are the blocks.
    pub witness: Vec<usize>,
}

impl OrderPartition {
    /// `block_of[z]` = position of z's block in `blocks`.
    pub fn block_of(&self) -> Vec<usize> {
        let n = self.blocks.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &z in block {
                out[z] = b;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &OrderPartition) -> bool {
        let theirs = other.block_of();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&z| theirs[z] == theirs[b[0]]))
    }
}

/// Canonical restricted-growth form of a map: blocks numbered by first
/// occurrence in id order.
fn canonical_blocks(values: &[usize]) -> Vec<usize> {
    let mut renumber = HashMap::new();
    values
        .iter()
        .map(|v| {
            let next = renumber.len();
            *renumber.entry(*v).or_insert(next)
        })
        .collect()
}

fn blocks_from_rgs(rgs: &[usize]) -> Vec<Vec<ElemId>> {
    let k = rgs.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); k];
    for (z, &b) in rgs.iter().enumerate() {
        blocks[b].push(z);
    }
    blocks
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexedPartition {
    /// Blocks in index order: `blocks[i]` has index `i + 1`.
    pub blocks: Vec<Vec<ElemId>>,
    /// Earliest element of each block in the linear extension.
    pub representatives: Vec<ElemId>,
    /// 1-based block index of every element.
    pub index_of: Vec<usize>,
}

/// Indexes blocks `1..=k` by the position of their earliest element in
/// `linext`.
pub fn index_blocks(op: &OrderPartition, linext: &[ElemId]) -> IndexedPartition {
    let mut pos = vec![usize::MAX; linext.len()];
    for (i, &z) in linext.iter().enumerate() {
        pos[z] = i;
    }
    let mut blocks: Vec<(usize, Vec<ElemId>)> = op
        .blocks
        .iter()
        .map(|b| {
            let rep_pos = b
                .iter()
                .map(|&z| pos[z])
                .min()
                .expect("blocks are nonempty");
            (rep_pos, b.clone())
        })
        .collect();
    blocks.sort();
    let mut index_of = vec![0; linext.len()];
    for (i, (_, b)) in blocks.iter().enumerate() {
        for &z in b {
            index_of[z] = i + 1;
        }
    }
    IndexedPartition {
        representatives: blocks.iter().map(|(p, _)| linext[*p]).collect(),
        blocks: blocks.into_iter().map(|(_, b)| b).collect(),
        index_of,
    }
}

/// `O(P)` together with the partition behind every lattice element.
#[derive(Clone, Debug)]
pub struct OrderCongruenceLattice {
    pub ground: Poset,
    pub lattice: Lattice,
    pub partitions: Vec<OrderPartition>,
    lookup: HashMap<Vec<usize>, ElemId>,
}

/// Enumerates every weakly order-preserving surjection `P → {1..k}` and
/// keeps one witness per fiber partition (the first found).
fn enumerate_congruences(p: &Poset) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let n = p.len();
    let order = p.topological_order();
    let mut found: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();

    fn assign(
        p: &Poset,
        order: &[ElemId],
        depth: usize,
        k: usize,
        values: &mut Vec<usize>,
        hit: &mut Vec<usize>,
        found: &mut BTreeMap<Vec<usize>, Vec<usize>>,
    ) {
        let missing = hit.iter().filter(|&&c| c == 0).count();
        if missing > order.len() - depth {
            return;
        }
        if depth == order.len() {
            found
                .entry(canonical_blocks(values))
                .or_insert_with(|| values.clone());
            return;
        }
        let z = order[depth];
        let floor = p
            .lower_covers(z)
            .iter()
            .map(|&u| values[u])
            .max()
            .unwrap_or(1);
        for v in floor..=k {
            values[z] = v;
            hit[v - 1] += 1;
            assign(p, order, depth + 1, k, values, hit, found);
            hit[v - 1] -= 1;
        }
        values[z] = 0;
    }

    for k in 1..=n {
        let mut values = vec![0; n];
        let mut hit = vec![0; k];
        assign(p, &order, 0, k, &mut values, &mut hit, &mut found);
    }
    if n == 0 {
        found.insert(Vec::new(), Vec::new());
    }
    found
}

/// Builds `O(P)`: 0̂ is the all-singletons partition, 1̂ the single block.
pub fn order_congruence_lattice(p: &Poset) -> Result<OrderCongruenceLattice> {
    if p.len() > MAX_GROUND_SIZE {
        return Err(Error::SizeCapExceeded {
            what: "ground poset",
            actual: p.len(),
            cap: MAX_GROUND_SIZE,
        });
    }
    let found = enumerate_congruences(p);
    let mut entries: Vec<(Vec<usize>, Vec<usize>)> = found.into_iter().collect();
    let count = |rgs: &[usize]| rgs.iter().max().map_or(0, |m| m + 1);
    entries.sort_by(|(a, _), (b, _)| count(b).cmp(&count(a)).then(a.cmp(b)));

    let partitions: Vec<OrderPartition> = entries
        .iter()
        .map(|(rgs, witness)| OrderPartition {
            blocks: blocks_from_rgs(rgs),
            witness: witness.clone(),
        })
        .collect();
    let names = partitions
        .iter()
        .map(|op| {
            op.blocks
                .iter()
                .map(|b| b.iter().map(|&z| p.name(z)).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    let m = partitions.len();
    let mut leq = BitMatrix::new(m);
    for i in 0..m {
        for j in 0..m {
            leq.set(i, j, partitions[i].refines(&partitions[j]));
        }
    }
    let poset = Poset::from_relation(names, leq)?;
    let lattice = Lattice::from_poset(poset).map_err(|e| Error::NotALattice(Box::new(e)))?;
    let lookup = entries
        .iter()
        .enumerate()
        .map(|(i, (rgs, _))| (rgs.clone(), i))
        .collect();
    Ok(OrderCongruenceLattice {
        ground: p.clone(),
        lattice,
        partitions,
        lookup,
    })
}

impl OrderCongruenceLattice {
    /// Lattice element whose partition has the given block assignment.
    pub fn element_of(&self, block_assignment: &[usize]) -> Option<ElemId> {
        self.lookup
            .get(&canonical_blocks(block_assignment))
            .copied()
    }

    fn check_linext(&self, linext: &[ElemId]) -> Result<()> {
        if self.ground.is_linear_extension(linext) {
            Ok(())
        } else {
            Err(Error::InvalidLinearExtension(format!("{linext:?}")))
        }
    }

    pub fn to_file(&self) -> OclFile {
        let base = self.lattice.poset().to_file();
        OclFile {
            elements: base.elements,
            covers: base.covers,
            partitions: self.partitions.iter().map(|p| p.blocks.clone()).collect(),
            ground: self.ground.to_file(),
        }
    }
}

/// JSON export of `O(P)`. Readable as a plain poset file as well.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OclFile {
    pub elements: Vec<String>,
    pub covers: Vec<[ElemId; 2]>,
    pub partitions: Vec<Vec<Vec<ElemId>>>,
    pub ground: PosetFile,
}

/// The chain `c_1 ⋖ … ⋖ c_n` where `c_k` merges the first `k` elements of
/// `linext` and leaves the rest as singletons.
pub fn canonical_chain(ocl: &OrderCongruenceLattice, linext: &[ElemId]) -> Result<Chain> {
    ocl.check_linext(linext)?;
    let n = linext.len();
    let mut chain = Vec::with_capacity(n);
    for k in 1..=n.max(1) {
        let mut assignment = vec![0; n];
        for (i, &z) in linext.iter().enumerate() {
            assignment[z] = if i < k { 0 } else { i };
        }
        let id = ocl.element_of(&assignment).ok_or_else(|| {
            Error::Invalid(format!("prefix partition c_{k} is not an order congruence"))
        })?;
        chain.push(id);
    }
    for w in chain.windows(2) {
        if !ocl.lattice.covers_rel(w[0], w[1]) {
            return Err(Error::Invalid(format!(
                "canonical chain step {} -> {} is not a cover",
                w[0], w[1]
            )));
        }
    }
    Ok(chain)
}

/// Labels a cover that merges blocks `i < j` (indexed by `linext`) with `j`.
pub fn ocl_edge_labeling(ocl: &OrderCongruenceLattice, linext: &[ElemId]) -> Result<EdgeLabeling> {
    ocl.check_linext(linext)?;
    let mut labels = BTreeMap::new();
    for &(x, y) in ocl.lattice.poset().covers() {
        let lower = &ocl.partitions[x];
        let upper = &ocl.partitions[y];
        if lower.len() != upper.len() + 1 {
            return Err(Error::NonBinaryMergeCover(
                lower.blocks.clone(),
                upper.blocks.clone(),
            ));
        }
        let indexed = index_blocks(lower, linext);
        let merged = upper
            .blocks
            .iter()
            .find(|b| {
                let first = indexed.index_of[b[0]];
                b.iter().any(|&z| indexed.index_of[z] != first)
            })
            .expect("one block of the upper partition joins two lower blocks");
        let j = merged.iter().map(|&z| indexed.index_of[z]).max().unwrap();
        labels.insert((x, y), j as i64);
    }
    Ok(EdgeLabeling::from_integers(&labels))
}

/// For every linear extension of `P`: the canonical chain is a sub-M-chain
/// of `O(P)` and the block-merge labeling is an EL-labeling.
pub fn verify_prop_5_1(p: &Poset) -> Result<VerifierReport> {
    if p.len() > MAX_PROP51_SIZE {
        return Err(Error::SizeCapExceeded {
            what: "ground poset",
            actual: p.len(),
            cap: MAX_PROP51_SIZE,
        });
    }
    let ocl = order_congruence_lattice(p)?;
    let linexts: Vec<Vec<ElemId>> = p.linear_extensions().collect();
    let results: Vec<Result<(Vec<Failure>, Stats)>> = linexts
        .par_iter()
        .enumerate()
        .map(|(index, linext)| {
            let mut failures = Vec::new();
            let chain = canonical_chain(&ocl, linext)?;
            if !is_sub_m_chain(&ocl.lattice, &chain)? {
                failures.push(Failure {
                    interval: Some((ocl.lattice.bottom(), ocl.lattice.top())),
                    root: None,
                    reason: FailureReason::NotSubMChain {
                        linext_index: index,
                        chain: chain.clone(),
                    },
                    chains: vec![chain],
                });
            }
            let labeling = ocl_edge_labeling(&ocl, linext)?;
            let report = verify_el_shelling(&ocl.lattice, &labeling, RisingMode::PartialOrder)?;
            if !report.passed() {
                let first = &report.failures[0];
                failures.push(Failure {
                    interval: first.interval,
                    root: None,
                    reason: FailureReason::NotElShelling {
                        linext_index: index,
                        failures: report.failures.len(),
                    },
                    chains: first.chains.clone(),
                });
            }
            Ok((failures, report.stats))
        })
        .collect();
    let mut failures = Vec::new();
    let mut stats = Stats::default();
    for r in results {
        let (f, s) = r?;
        failures.extend(f);
        stats.intervals_checked += s.intervals_checked;
        stats.chains_enumerated += s.chains_enumerated;
        stats.linear_extensions_checked += 1;
    }
    Ok(VerifierReport::new(failures, stats))
}

/// Meets in `O(P)` are common refinements.
pub fn meet_is_common_refinement_check(ocl: &OrderCongruenceLattice) -> bool {
    let l = &ocl.lattice;
    (0..l.len()).all(|x| {
        (0..l.len()).all(|y| {
            let bx = ocl.partitions[x].block_of();
            let by = ocl.partitions[y].block_of();
            let pairs: Vec<(usize, usize)> = bx.iter().copied().zip(by.iter().copied()).collect();
            let refinement = canonical_blocks(
                &pairs
                    .iter()
                    .map(|&(a, b)| a * bx.len().max(1) + b)
                    .collect::<Vec<_>>(),
            );
            ocl.element_of(&refinement) == Some(l.meet(x, y))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{antichain, chain_poset, v_poset};
    use crate::lattice_props::is_left_modular_in;

    #[test]
    fn small_counts() {
        assert_eq!(
            order_congruence_lattice(&chain_poset(3))
                .unwrap()
                .lattice
                .len(),
            4
        );
        assert_eq!(
            order_congruence_lattice(&antichain(3))
                .unwrap()
                .lattice
                .len(),
            5
        );
        let one = order_congruence_lattice(&chain_poset(1)).unwrap();
        assert_eq!(one.lattice.len(), 1);
        assert!(matches!(
            order_congruence_lattice(&antichain(9)),
            Err(Error::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn bottom_and_top() {
        let ocl = order_congruence_lattice(&v_poset()).unwrap();
        let l = &ocl.lattice;
        assert_eq!(ocl.partitions[l.bottom()].len(), 3);
        assert_eq!(ocl.partitions[l.top()].len(), 1);
    }

    #[test]
    fn witnesses_are_order_preserving() {
        let p = v_poset();
        let ocl = order_congruence_lattice(&p).unwrap();
        for op in &ocl.partitions {
            for &(x, y) in p.covers() {
                assert!(op.witness[x] <= op.witness[y]);
            }
            assert_eq!(canonical_blocks(&op.witness), op.block_of());
        }
    }

    #[test]
    fn block_indexing() {
        let op = OrderPartition {
            blocks: vec![vec![0, 2], vec![1]],
            witness: vec![1, 2, 1],
        };
        let ix = index_blocks(&op, &[0, 1, 2]);
        assert_eq!(ix.blocks, vec![vec![0, 2], vec![1]]);
        assert_eq!(ix.representatives, vec![0, 1]);
        assert_eq!(ix.index_of, vec![1, 2, 1]);
        let ix = index_blocks(&op, &[1, 0, 2]);
        assert_eq!(ix.blocks, vec![vec![1], vec![0, 2]]);
        let singletons = OrderPartition {
            blocks: vec![vec![0], vec![1], vec![2]],
            witness: vec![1, 2, 3],
        };
        assert_eq!(
            index_blocks(&singletons, &[0, 1, 2]).index_of,
            vec![1, 2, 3]
        );
        let one = OrderPartition {
            blocks: vec![vec![0, 1, 2]],
            witness: vec![1, 1, 1],
        };
        assert_eq!(index_blocks(&one, &[2, 1, 0]).index_of, vec![1, 1, 1]);
    }

    fn blocks_of(ocl: &OrderCongruenceLattice, chain: &[ElemId]) -> Vec<Vec<Vec<ElemId>>> {
        chain
            .iter()
            .map(|&c| ocl.partitions[c].blocks.clone())
            .collect()
    }

    #[test]
    fn canonical_chains() {
        let anti = order_congruence_lattice(&antichain(3)).unwrap();
        let c = canonical_chain(&anti, &[0, 1, 2]).unwrap();
        assert_eq!(
            blocks_of(&anti, &c),
            vec![
                vec![vec![0], vec![1], vec![2]],
                vec![vec![0, 1], vec![2]],
                vec![vec![0, 1, 2]]
            ]
        );
        let ch = order_congruence_lattice(&chain_poset(3)).unwrap();
        let c = canonical_chain(&ch, &[0, 1, 2]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(canonical_chain(&ch, &[1, 0, 2]).is_err());
        let one = order_congruence_lattice(&chain_poset(1)).unwrap();
        assert_eq!(canonical_chain(&one, &[0]).unwrap(), vec![0]);
    }

    #[test]
    fn merge_labels_on_pi3() {
        let ocl = order_congruence_lattice(&antichain(3)).unwrap();
        let el = ocl_edge_labeling(&ocl, &[0, 1, 2]).unwrap();
        let find = |rgs: &[usize]| ocl.element_of(rgs).unwrap();
        let bottom = find(&[0, 1, 2]);
        let label = |x, y| el.label(x, y).cloned();
        use crate::shelling::Label::Int;
        assert_eq!(label(bottom, find(&[0, 0, 1])), Some(Int(2)));
        assert_eq!(label(find(&[0, 0, 1]), find(&[0, 0, 0])), Some(Int(2)));
        assert_eq!(label(bottom, find(&[0, 1, 0])), Some(Int(3)));
        assert_eq!(label(bottom, find(&[0, 1, 1])), Some(Int(3)));
    }

    #[test]
    fn merge_labeling_passes_on_small_posets() {
        let r = verify_prop_5_1(&chain_poset(3)).unwrap();
        assert!(r.passed());
        assert_eq!(r.stats.linear_extensions_checked, 1);
        let r = verify_prop_5_1(&antichain(3)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.stats.linear_extensions_checked, 6);
        let r = verify_prop_5_1(&v_poset()).unwrap();
        assert!(r.passed());
        assert_eq!(r.stats.linear_extensions_checked, 2);
        assert!(verify_prop_5_1(&antichain(7)).is_err());
    }

    #[test]
    fn meets_are_common_refinements() {
        for p in [chain_poset(3), antichain(3), chain_poset(1), v_poset()] {
            assert!(meet_is_common_refinement_check(
                &order_congruence_lattice(&p).unwrap()
            ));
        }
    }

    /// For `x ≤ c_k` with `z_k` not a singleton in `x`, `x ∧ c_{k-1}` is `x`
    /// with `z_k` split off into its own block, and it is covered by `x`.
    fn isolation_steps_hold(ocl: &OrderCongruenceLattice, linext: &[ElemId]) -> bool {
        let l = &ocl.lattice;
        let chain = canonical_chain(ocl, linext).unwrap();
        for k in 1..chain.len() {
            let (ck, prev) = (chain[k], chain[k - 1]);
            let zk = linext[k];
            for x in l.interval_elements(l.bottom(), ck) {
                let bx = ocl.partitions[x].block_of();
                let alone = bx.iter().filter(|&&b| b == bx[zk]).count() == 1;
                if alone {
                    if !l.leq(x, prev) {
                        return false;
                    }
                    continue;
                }
                let mut isolated = bx.clone();
                isolated[zk] = usize::MAX;
                let m = l.meet(x, prev);
                if ocl.element_of(&isolated) != Some(m) || !l.covers_rel(m, x) {
                    return false;
                }
            }
            if !is_left_modular_in(l, l.bottom(), ck, prev) {
                return false;
            }
        }
        true
    }

    #[test]
    fn isolation_steps() {
        for p in [antichain(3), v_poset(), chain_poset(4), antichain(4)] {
            let ocl = order_congruence_lattice(&p).unwrap();
            for linext in p.linear_extensions() {
                assert!(isolation_steps_hold(&ocl, &linext), "{linext:?}");
            }
        }
    }
}
