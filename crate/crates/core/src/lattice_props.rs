//! Left-modular elements, (co)modernistic lattices and sub-M-chains.
//!
//! Interval-restricted checks run on the parent lattice: meets and joins of
//! elements of `[lo, hi]` stay inside `[lo, hi]`, so quantifying over the
//! interval's elements gives the same verdict as materializing it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Chain, Lattice};
use crate::poset::ElemId;

/// `(x ∨ m) ∧ y = x ∨ (m ∧ y)` for all `x < y` in `L`.
pub fn is_left_modular(l: &Lattice, m: ElemId) -> bool {
    is_left_modular_in(l, l.bottom(), l.top(), m)
}

/// Left-modularity of `m` inside the interval `[lo, hi]`.
pub fn is_left_modular_in(l: &Lattice, lo: ElemId, hi: ElemId, m: ElemId) -> bool {
    let elems = l.interval_elements(lo, hi);
    for &x in &elems {
        for &y in &elems {
            if l.lt(x, y) && l.meet(l.join(x, m), y) != l.join(x, l.meet(m, y)) {
                return false;
            }
        }
    }
    true
}

/// Coatom criterion: `m ∧ y ⋖ y` for every `y ≰ m`.
pub fn left_modular_coatom_test(l: &Lattice, m: ElemId) -> Result<bool> {
    if !l.covers_rel(m, l.top()) {
        return Err(Error::NotACoatom(m));
    }
    Ok((0..l.len())
        .filter(|&y| !l.leq(y, m))
        .all(|y| l.covers_rel(l.meet(m, y), y)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// Smallest failing interval by `(bottom, top)` id pair.
    pub witness: Option<(ElemId, ElemId)>,
}

impl Verdict {
    fn from_witness(witness: Option<(ElemId, ElemId)>) -> Self {
        Verdict {
            holds: witness.is_none(),
            witness,
        }
    }
}

fn nontrivial_intervals(l: &Lattice) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
    (0..l.len()).flat_map(move |x| {
        (0..l.len())
            .filter(move |&y| l.lt(x, y))
            .map(move |y| (x, y))
    })
}

/// Every interval of positive length has a coatom that is left-modular in it.
pub fn is_comodernistic(l: &Lattice) -> Verdict {
    let witness = nontrivial_intervals(l).find(|&(x, y)| {
        !l.lower_covers(y)
            .iter()
            .any(|&m| l.leq(x, m) && is_left_modular_in(l, x, y, m))
    });
    Verdict::from_witness(witness)
}

/// Every interval of positive length has an atom that is left-modular in it.
pub fn is_modernistic(l: &Lattice) -> Verdict {
    let witness = nontrivial_intervals(l).find(|&(x, y)| {
        !l.upper_covers(x)
            .iter()
            .any(|&a| l.leq(a, y) && is_left_modular_in(l, x, y, a))
    });
    Verdict::from_witness(witness)
}

/// A maximal chain whose every element `m_i` is left-modular in
/// `[m_0, m_{i+1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubMChain {
    pub chain: Chain,
    /// `certificates[i]`: `chain[i]` is left-modular in `[chain[0], chain[i+1]]`.
    pub certificates: Vec<bool>,
}

impl SubMChain {
    pub fn len(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Greedy top-down construction: at each step take the smallest-id coatom of
/// `[0̂, current]` that is left-modular there.
pub fn find_sub_m_chain(l: &Lattice) -> Result<SubMChain> {
    find_sub_m_chain_in(l, l.bottom(), l.top())
}

/// [`find_sub_m_chain`] for the interval `[lo, hi]`, in parent ids.
pub fn find_sub_m_chain_in(l: &Lattice, lo: ElemId, hi: ElemId) -> Result<SubMChain> {
    if !l.leq(lo, hi) {
        return Err(Error::NotComparable(lo, hi));
    }
    let mut rev = vec![hi];
    let mut current = hi;
    while current != lo {
        let next = l
            .lower_covers(current)
            .iter()
            .copied()
            .find(|&m| l.leq(lo, m) && is_left_modular_in(l, lo, current, m))
            .ok_or(Error::NoLeftModularCoatom(lo, current))?;
        rev.push(next);
        current = next;
    }
    rev.reverse();
    let certificates = vec![true; rev.len() - 1];
    Ok(SubMChain {
        chain: rev,
        certificates,
    })
}

/// Evaluates the sub-M-chain definition on a given maximal chain.
pub fn is_sub_m_chain(l: &Lattice, chain: &[ElemId]) -> Result<bool> {
    is_sub_m_chain_in(l, l.bottom(), l.top(), chain)
}

pub fn is_sub_m_chain_in(l: &Lattice, lo: ElemId, hi: ElemId, chain: &[ElemId]) -> Result<bool> {
    if !l.is_saturated_chain(chain, lo, hi) {
        return Err(Error::NotMaximalChain(format!("{chain:?}")));
    }
    Ok(chain
        .windows(2)
        .all(|w| is_left_modular_in(l, lo, w[1], w[0])))
}

/// Length of the longest chain.
pub fn poset_length(l: &Lattice) -> usize {
    l.poset().heights()[l.top()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{boolean, chain, hexagon, n5};

    fn id(l: &Lattice, name: &str) -> ElemId {
        l.poset().id_of(name).unwrap()
    }

    #[test]
    fn bottom_is_left_modular() {
        for l in [n5(), hexagon(), boolean(3)] {
            assert!(is_left_modular(&l, l.bottom()));
            assert!(is_left_modular(&l, l.top()));
        }
    }

    #[test]
    fn pentagon_left_modular_elements() {
        let l = n5();
        assert!(!is_left_modular(&l, id(&l, "c")));
        assert!(is_left_modular(&l, id(&l, "b")));
        // witness for c: x = a, y = b
        let (a, b, c) = (id(&l, "a"), id(&l, "b"), id(&l, "c"));
        assert_eq!(l.meet(l.join(a, c), b), b);
        assert_eq!(l.join(a, l.meet(c, b)), a);
    }

    #[test]
    fn coatom_test() {
        let l = n5();
        assert!(left_modular_coatom_test(&l, id(&l, "b")).unwrap());
        assert_eq!(
            left_modular_coatom_test(&l, id(&l, "a")).unwrap_err(),
            Error::NotACoatom(id(&l, "a"))
        );
        let h = hexagon();
        assert!(!left_modular_coatom_test(&h, id(&h, "b")).unwrap());
        let b2 = boolean(2);
        assert!(left_modular_coatom_test(&b2, 1).unwrap());
        assert!(left_modular_coatom_test(&b2, 2).unwrap());
    }

    #[test]
    fn comodernistic_verdicts() {
        assert!(is_comodernistic(&n5()).holds);
        let h = hexagon();
        let v = is_comodernistic(&h);
        assert!(!v.holds);
        assert_eq!(v.witness, Some((h.bottom(), h.top())));
        for n in 0..=4 {
            assert!(is_comodernistic(&boolean(n)).holds);
        }
        assert!(is_modernistic(&n5()).holds);
        assert!(!is_modernistic(&h).holds);
        assert!(is_modernistic(&boolean(3)).holds);
    }

    #[test]
    fn greedy_sub_m_chains() {
        let c4 = chain(4);
        assert_eq!(find_sub_m_chain(&c4).unwrap().chain, vec![0, 1, 2, 3]);
        let l = n5();
        let m = find_sub_m_chain(&l).unwrap();
        assert_eq!(
            m.chain,
            vec![id(&l, "0"), id(&l, "a"), id(&l, "b"), id(&l, "1")]
        );
        let h = hexagon();
        assert_eq!(
            find_sub_m_chain(&h).unwrap_err(),
            Error::NoLeftModularCoatom(h.bottom(), h.top())
        );
    }

    #[test]
    fn sub_m_chain_check() {
        let l = n5();
        let chain_ab = vec![id(&l, "0"), id(&l, "a"), id(&l, "b"), id(&l, "1")];
        assert!(is_sub_m_chain(&l, &chain_ab).unwrap());
        let chain_c = vec![id(&l, "0"), id(&l, "c"), id(&l, "1")];
        assert!(!is_sub_m_chain(&l, &chain_c).unwrap());
        assert!(is_sub_m_chain(&l, &[id(&l, "0"), id(&l, "b"), id(&l, "1")]).is_err());
        assert!(is_sub_m_chain(&chain(2), &[0, 1]).unwrap());
    }

    #[test]
    fn lengths() {
        assert_eq!(poset_length(&n5()), 3);
        assert_eq!(poset_length(&boolean(3)), 3);
        assert_eq!(poset_length(&chain(1)), 0);
    }

    #[test]
    fn interval_restricted_check_matches_materialized_interval() {
        for l in [
            n5(),
            hexagon(),
            boolean(3),
            crate::generators::partition_lattice(4),
        ] {
            for x in 0..l.len() {
                for y in 0..l.len() {
                    if !l.leq(x, y) {
                        continue;
                    }
                    let iv = l.interval(x, y).unwrap();
                    for local in 0..iv.lattice.len() {
                        assert_eq!(
                            is_left_modular(&iv.lattice, local),
                            is_left_modular_in(&l, x, y, iv.to_parent(local))
                        );
                    }
                }
            }
        }
    }
}
