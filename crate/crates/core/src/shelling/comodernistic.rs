use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    verify_recursive_atom_ordering, AtomOrderingTable, EdgeLabeling, Label, LabelPoset,
    LargeCoordinate, TupleLabel,
};
use crate::error::{Error, Result};
use crate::lattice::{Chain, Lattice};
use crate::lattice_props::{
    find_sub_m_chain, find_sub_m_chain_in, is_comodernistic, is_left_modular_in, SubMChain,
};
use crate::poset::{BitMatrix, ElemId};

/// Sub-M-chains `m_x` of `[x, 1̂]` for every `x ≠ 1̂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubMChainFamily {
    pub chains: BTreeMap<ElemId, SubMChain>,
    /// For `x ≠ 0̂`: the covered element `z` whose chain was spliced and the
    /// splice point `w` (least element of `m_z` above `x`).
    pub splices: BTreeMap<ElemId, (ElemId, ElemId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComodernisticLabeling {
    pub family: SubMChainFamily,
    /// Edge `x ⋖ y` gets the index in `m_x` of the least element above `y`.
    pub labels: BTreeMap<(ElemId, ElemId), i64>,
    pub atom_ordering: AtomOrderingTable,
}

/// Builds the sub-M-chain family bottom-up and labels every edge by its
/// index along the family chain of its lower endpoint.
pub fn comodernistic_labeling(l: &Lattice) -> Result<ComodernisticLabeling> {
    let verdict = is_comodernistic(l);
    if let Some((x, y)) = verdict.witness {
        return Err(Error::NotComodernistic(x, y));
    }

    let mut chains: BTreeMap<ElemId, SubMChain> = BTreeMap::new();
    let mut splices = BTreeMap::new();
    for x in l.poset().topological_order() {
        if x == l.top() {
            continue;
        }
        let chain: Chain = if x == l.bottom() {
            find_sub_m_chain(l)?.chain
        } else {
            // lower covers are listed by ascending id and all precede x
            let z = l.lower_covers(x)[0];
            let mz = &chains[&z].chain;
            let pos = mz
                .iter()
                .position(|&m| l.leq(x, m))
                .expect("the top of m_z lies above x");
            let w = mz[pos];
            splices.insert(x, (z, w));
            let mut c = find_sub_m_chain_in(l, x, w)?.chain;
            c.extend_from_slice(&mz[pos + 1..]);
            c
        };
        let certificates = chain
            .windows(2)
            .map(|win| is_left_modular_in(l, x, win[1], win[0]))
            .collect();
        chains.insert(
            x,
            SubMChain {
                chain,
                certificates,
            },
        );
    }

    let mut labels = BTreeMap::new();
    let mut atom_ordering = AtomOrderingTable::new();
    for (&x, m) in &chains {
        for &y in l.upper_covers(x) {
            let index = m
                .chain
                .iter()
                .position(|&mi| l.leq(y, mi))
                .expect("m_x ends at the top");
            labels.insert((x, y), index as i64);
        }
        let mut atoms = l.upper_covers(x).to_vec();
        atoms.sort_by_key(|&y| (labels[&(x, y)], y));
        atom_ordering.insert(x, atoms);
    }

    Ok(ComodernisticLabeling {
        family: SubMChainFamily { chains, splices },
        labels,
        atom_ordering,
    })
}

/// The integer labels on their own, over the integers.
pub fn direct_integer_labeling(c: &ComodernisticLabeling) -> EdgeLabeling {
    EdgeLabeling::from_integers(&c.labels)
}

/// Labels along the chain `c` in the CL-labeling induced by a
/// root-independent recursive atom ordering. The first edge gets the
/// 1-based position of `c[1]` among the atoms of `c[0]`. Afterwards, with
/// `F` the atoms of `[x, 1̂]` above an atom of `[x', 1̂]` that precedes `x`,
/// the `j`-th atom gets `ℓ - (|F| - j + 1)` when `j ≤ |F|` and `ℓ + (j - |F|)`
/// otherwise, where `ℓ` is the label of `x' ⋖ x`.
pub fn induced_cl_labels(l: &Lattice, table: &AtomOrderingTable, c: &[ElemId]) -> Vec<i64> {
    let position =
        |x: ElemId, y: ElemId| table[&x].iter().position(|&a| a == y).unwrap() as i64 + 1;
    let mut labels: Vec<i64> = Vec::with_capacity(c.len().saturating_sub(1));
    for (i, w) in c.windows(2).enumerate() {
        let (x, y) = (w[0], w[1]);
        let label = if i == 0 {
            position(x, y)
        } else {
            let prev = c[i - 1];
            let earlier = &table[&prev][..table[&prev].iter().position(|&a| a == x).unwrap()];
            let f = table[&x]
                .iter()
                .filter(|&&b| earlier.iter().any(|&a| l.lt(a, b)))
                .count() as i64;
            let j = position(x, y);
            let last = labels[i - 1];
            if j <= f {
                last - (f - j + 1)
            } else {
                last + (j - f)
            }
        };
        labels.push(label);
    }
    labels
}

/// Lifts the root-independent atom ordering to tuple labels.
///
/// Edge `e = [x, y]` gets one large coordinate per maximal chain `r` of
/// `[0̂, x]` (roots sorted by induced label sequence, then ids), holding
/// `r ∪ e` and the label of `e` under `r` from [`induced_cl_labels`],
/// followed by the edge itself.
/// `e ≤ e'` iff `e = e'`, `y < x'`, or `y = x'` and some large coordinate of
/// `e` is below some large coordinate of `e'` (root contained, label `≤`).
///
/// The linear extension lists edges by the position of their lower endpoint
/// in a linear extension of the lattice, then by the atom ordering at that
/// endpoint. Edges sharing a lower endpoint are incomparable, so this is a
/// valid linear extension, and lexicographic comparison of chains follows the
/// atom ordering.
pub fn lift_to_el_labeling(l: &Lattice, c: &ComodernisticLabeling) -> Result<EdgeLabeling> {
    let report = verify_recursive_atom_ordering(l, &c.atom_ordering)?;
    if !report.passed() {
        return Err(Error::Invalid(
            "atom ordering is not a recursive atom ordering; cannot lift".into(),
        ));
    }

    let table = &c.atom_ordering;
    let mut roots: Vec<Vec<Chain>> = Vec::with_capacity(l.len());
    for x in 0..l.len() {
        let mut rs = l.chains_between(l.bottom(), x);
        rs.sort_by_cached_key(|r| (induced_cl_labels(l, table, r), r.clone()));
        roots.push(rs);
    }

    let edges: Vec<(ElemId, ElemId)> = l.poset().covers().to_vec();
    let tuples: Vec<TupleLabel> = edges
        .iter()
        .map(|&(x, y)| TupleLabel {
            large: roots[x]
                .iter()
                .map(|r| {
                    let mut root = r.clone();
                    root.push(y);
                    let label = *induced_cl_labels(l, table, &root).last().unwrap();
                    LargeCoordinate { root, label }
                })
                .collect(),
            edge: [x, y],
        })
        .collect();

    let contained = |a: &[ElemId], b: &[ElemId]| a.iter().all(|z| b.contains(z));
    let n = edges.len();
    let mut leq = BitMatrix::new(n);
    for (i, &(_, y)) in edges.iter().enumerate() {
        for (j, &(x2, _)) in edges.iter().enumerate() {
            let below = i == j
                || l.lt(y, x2)
                || (y == x2
                    && tuples[i].large.iter().any(|em| {
                        tuples[j]
                            .large
                            .iter()
                            .any(|en| contained(&em.root, &en.root) && em.label <= en.label)
                    }));
            leq.set(i, j, below);
        }
    }

    let topo = l.poset().topological_order();
    let mut position = vec![0; l.len()];
    for (i, &x) in topo.iter().enumerate() {
        position[x] = i;
    }
    let mut linext: Vec<usize> = (0..n).collect();
    linext.sort_by_key(|&i| {
        let (x, y) = edges[i];
        let atom_pos = c.atom_ordering[&x].iter().position(|&a| a == y).unwrap();
        (position[x], atom_pos)
    });

    let lp = LabelPoset::new(tuples.into_iter().map(Label::Tuple).collect(), leq, linext)?;
    let map = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    EdgeLabeling::new(lp, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{boolean, chain, hexagon, n5};
    use crate::shelling::{verify_el_shelling, RisingMode};

    #[test]
    fn pentagon_labels() {
        let l = n5();
        // 0, a=1, b=2, c=3, 1=4
        let c = comodernistic_labeling(&l).unwrap();
        assert_eq!(c.family.chains[&0].chain, vec![0, 1, 2, 4]);
        assert_eq!(c.labels[&(0, 1)], 1);
        assert_eq!(c.labels[&(0, 3)], 3);
        assert_eq!(c.atom_ordering[&0], vec![1, 3]);
        assert!(c
            .family
            .chains
            .values()
            .all(|m| m.certificates.iter().all(|&ok| ok)));
        assert!(verify_recursive_atom_ordering(&l, &c.atom_ordering)
            .unwrap()
            .passed());
    }

    #[test]
    fn b2_labels() {
        let l = boolean(2);
        let c = comodernistic_labeling(&l).unwrap();
        assert_eq!(c.family.chains[&0].chain, vec![0, 1, 3]);
        assert_eq!(c.labels[&(0, 1)], 1);
        assert_eq!(c.labels[&(0, 2)], 2);
        assert_eq!(c.atom_ordering[&0], vec![1, 2]);
    }

    #[test]
    fn hexagon_rejected() {
        assert_eq!(
            comodernistic_labeling(&hexagon()).unwrap_err(),
            Error::NotComodernistic(0, 5)
        );
    }

    #[test]
    fn lift_on_small_lattices() {
        let two = chain(2);
        let c = comodernistic_labeling(&two).unwrap();
        let el = lift_to_el_labeling(&two, &c).unwrap();
        let Label::Tuple(t) = el.label(0, 1).unwrap() else {
            panic!("tuple label expected")
        };
        assert_eq!(
            t.large,
            vec![LargeCoordinate {
                root: vec![0, 1],
                label: 1
            }]
        );
        assert_eq!(t.edge, [0, 1]);
        assert!(verify_el_shelling(&two, &el, RisingMode::PartialOrder)
            .unwrap()
            .passed());

        for l in [boolean(2), n5(), boolean(3)] {
            let c = comodernistic_labeling(&l).unwrap();
            let el = lift_to_el_labeling(&l, &c).unwrap();
            assert_eq!(el.edges().len(), l.poset().covers().len());
            let r = verify_el_shelling(&l, &el, RisingMode::PartialOrder).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn lift_on_nonpure_lattice() {
        // 5 covers 2 and 3, and 4 lies only above 2
        let l = Lattice::from_covers(
            (0..7).map(|i| i.to_string()).collect(),
            &[
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 4),
                (2, 5),
                (3, 5),
                (4, 6),
                (5, 6),
            ],
        )
        .unwrap();
        let c = comodernistic_labeling(&l).unwrap();
        assert_eq!(c.atom_ordering[&2], vec![5, 4]);
        assert_eq!(
            induced_cl_labels(&l, &c.atom_ordering, &[0, 2, 4]),
            vec![2, 3]
        );
        assert_eq!(
            induced_cl_labels(&l, &c.atom_ordering, &[0, 2, 5, 6]),
            vec![2, 1, 2]
        );
        let el = lift_to_el_labeling(&l, &c).unwrap();
        assert!(verify_el_shelling(&l, &el, RisingMode::PartialOrder)
            .unwrap()
            .passed());
    }

    #[test]
    fn lifted_rising_chain_on_pentagon_is_the_sub_m_chain() {
        let l = n5();
        let c = comodernistic_labeling(&l).unwrap();
        let el = lift_to_el_labeling(&l, &c).unwrap();
        let lp = el.label_poset();
        let rising: Vec<Chain> = l
            .maximal_chains()
            .into_iter()
            .filter(|ch| {
                ch.windows(3).all(|w| {
                    lp.leq(
                        el.label_id(w[0], w[1]).unwrap(),
                        el.label_id(w[1], w[2]).unwrap(),
                    )
                })
            })
            .collect();
        assert_eq!(rising, vec![c.family.chains[&0].chain.clone()]);
    }

    #[test]
    fn direct_labels_on_chains_pass() {
        let l = chain(5);
        let c = comodernistic_labeling(&l).unwrap();
        let el = direct_integer_labeling(&c);
        assert!(verify_el_shelling(&l, &el, RisingMode::PartialOrder)
            .unwrap()
            .passed());
    }
}
