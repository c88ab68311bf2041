//! Exhaustive enumeration of small posets and lattices up to isomorphism,
//! and the per-lattice classification table.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex_shell::{
    el_to_facet_order, find_shelling_order, is_shelling_order, lattice_order_complex, DimFormula,
    DEFAULT_FACET_CAP,
};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::lattice_props::{is_comodernistic, is_modernistic};
use crate::poset::{is_isomorphic, BitMatrix, ElemId, Poset};
use crate::shelling::{
    comodernistic_labeling, lift_to_el_labeling, search_recursive_atom_ordering,
    verify_el_shelling, verify_recursive_atom_ordering, RisingMode, SearchCaps,
};

pub const MAX_CORPUS_SIZE: usize = 8;

/// Every naturally labeled poset on `m` elements (`i < j` in the order
/// implies `i < j` as integers). Each new element is placed above an order
/// ideal of the previous ones.
fn naturally_labeled(m: usize) -> Vec<BitMatrix> {
    let mut current = vec![BitMatrix::new(0)];
    for k in 0..m {
        let mut next = Vec::new();
        for rel in &current {
            for mask in 0u32..(1u32 << k) {
                let ideal = (0..k).all(|j| {
                    mask >> j & 1 == 0 || (0..k).all(|i| !rel.get(i, j) || mask >> i & 1 == 1)
                });
                if !ideal {
                    continue;
                }
                let mut grown = BitMatrix::new(k + 1);
                for i in 0..k {
                    for j in 0..k {
                        grown.set(i, j, rel.get(i, j));
                    }
                    grown.set(i, k, mask >> i & 1 == 1);
                }
                grown.set(k, k, true);
                next.push(grown);
            }
        }
        current = next;
    }
    current
}

type BucketKey = (usize, usize, Vec<(usize, usize, usize, usize, usize)>);

/// Keeps one representative of each isomorphism class, in input order.
pub fn dedup_isomorphic(items: Vec<Poset>) -> Vec<Poset> {
    let mut buckets: HashMap<BucketKey, Vec<usize>> = HashMap::new();
    let mut kept: Vec<Poset> = Vec::new();
    for p in items {
        let key = (p.len(), p.covers().len(), p.invariant_key());
        let bucket = buckets.entry(key).or_default();
        if bucket
            .iter()
            .any(|&i| is_isomorphic(&kept[i], &p).is_some())
        {
            continue;
        }
        bucket.push(kept.len());
        kept.push(p);
    }
    kept
}

/// All posets with exactly `m` elements, up to isomorphism.
pub fn posets_up_to_iso(m: usize) -> Vec<Poset> {
    let all = naturally_labeled(m)
        .into_iter()
        .map(|rel| {
            Poset::from_relation((0..m).map(|i| format!("p{i}")).collect(), rel)
                .expect("order ideals extend partial orders")
        })
        .collect();
    dedup_isomorphic(all)
}

/// All lattices with exactly `n` elements, up to isomorphism: bounds are
/// added to every poset on `n - 2` elements and the lattice axioms checked.
pub fn lattices_of_size(n: usize) -> Vec<Lattice> {
    match n {
        0 => Vec::new(),
        1 => vec![Lattice::from_poset(Poset::from_covers(vec!["0".into()], &[]).unwrap()).unwrap()],
        _ => posets_up_to_iso(n - 2)
            .into_iter()
            .filter_map(|q| Lattice::from_poset(with_bounds(&q)).ok())
            .collect(),
    }
}

/// `q` with a new bottom (id 0) and top (id n-1).
fn with_bounds(q: &Poset) -> Poset {
    let m = q.len();
    let mut rel = BitMatrix::new(m + 2);
    for i in 0..m + 2 {
        rel.set(0, i, true);
        rel.set(i, m + 1, true);
        rel.set(i, i, true);
    }
    for i in 0..m {
        for j in 0..m {
            rel.set(i + 1, j + 1, q.leq(i, j));
        }
    }
    let mut names = vec!["0".to_string()];
    names.extend((1..=m).map(|i| format!("x{i}")));
    names.push("1".to_string());
    Poset::from_relation(names, rel).unwrap()
}

/// All lattices with `1..=max_n` elements, by size.
pub fn corpus(max_n: usize) -> Result<Vec<Lattice>> {
    if max_n > MAX_CORPUS_SIZE {
        return Err(Error::SizeCapExceeded {
            what: "corpus size",
            actual: max_n,
            cap: MAX_CORPUS_SIZE,
        });
    }
    Ok((1..=max_n).flat_map(lattices_of_size).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusRow {
    pub index: usize,
    pub size: usize,
    pub covers: usize,
    pub comodernistic: bool,
    pub modernistic: bool,
    /// `None` when the search cap was exceeded.
    pub rao_found: Option<bool>,
    pub shellable: Option<bool>,
    /// `None` for lattices that are not comodernistic.
    pub construction_verified: Option<bool>,
}

pub const CSV_HEADER: &str =
    "index,size,covers,comodernistic,modernistic,rao_found,shellable,construction_verified";

fn cell(v: Option<bool>) -> String {
    v.map_or_else(|| "n/a".to_string(), |b| b.to_string())
}

impl CorpusRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.index,
            self.size,
            self.covers,
            self.comodernistic,
            self.modernistic,
            cell(self.rao_found),
            cell(self.shellable),
            cell(self.construction_verified)
        )
    }
}

/// Comodernistic labeling, its atom ordering, the lifted EL-labeling and
/// the induced facet order all verify.
pub fn construction_verifies(l: &Lattice) -> Result<bool> {
    let c = comodernistic_labeling(l)?;
    if !verify_recursive_atom_ordering(l, &c.atom_ordering)?.passed() {
        return Ok(false);
    }
    let el = lift_to_el_labeling(l, &c)?;
    if !verify_el_shelling(l, &el, RisingMode::PartialOrder)?.passed() {
        return Ok(false);
    }
    let order = el_to_facet_order(l, &el)?;
    Ok(is_shelling_order(&lattice_order_complex(l), &order, DimFormula::Standard)?.holds)
}

fn capped<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::SizeCapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn classify(index: usize, l: &Lattice) -> Result<CorpusRow> {
    let comodernistic = is_comodernistic(l).holds;
    let rao_found =
        capped(search_recursive_atom_ordering(l, SearchCaps::default()))?.map(|t| t.is_some());
    let complex = lattice_order_complex(l);
    let shellable = capped(find_shelling_order(
        &complex,
        DEFAULT_FACET_CAP,
        DimFormula::Standard,
    ))?
    .map(|o| o.is_some());
    let construction_verified = if comodernistic {
        Some(construction_verifies(l)?)
    } else {
        None
    };
    Ok(CorpusRow {
        index,
        size: l.len(),
        covers: l.poset().covers().len(),
        comodernistic,
        modernistic: is_modernistic(l).holds,
        rao_found,
        shellable,
        construction_verified,
    })
}

pub fn classify_all(lattices: &[Lattice]) -> Result<Vec<CorpusRow>> {
    lattices
        .par_iter()
        .enumerate()
        .map(|(i, l)| classify(i, l))
        .collect()
}

/// Lattice ids of the bounds added by [`lattices_of_size`].
pub fn bounds(n: usize) -> (ElemId, ElemId) {
    (0, n.saturating_sub(1))
}
