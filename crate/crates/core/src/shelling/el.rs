use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{EdgeLabeling, Failure, FailureReason, Label, LabelPoset, Stats, VerifierReport};
use crate::error::{Error, Result};
use crate::lattice::{Chain, Lattice};
use crate::poset::{BitMatrix, ElemId};

/// How "weakly increasing" is read for a pair of consecutive labels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RisingMode {
    /// `λ_i ≤ λ_{i+1}` in the label partial order.
    #[default]
    PartialOrder,
    /// `λ_i` does not come after `λ_{i+1}` in the fixed linear extension.
    LinearExtension,
}

impl RisingMode {
    fn rises(self, lp: &LabelPoset, a: usize, b: usize) -> bool {
        match self {
            RisingMode::PartialOrder => lp.leq(a, b),
            RisingMode::LinearExtension => lp.rank(a) <= lp.rank(b),
        }
    }
}

/// Running summary of the maximal chains of one interval `[x, y]`.
#[derive(Default)]
struct Tally {
    chains: usize,
    rising: Vec<Chain>,
    rising_count: usize,
    rising_ranks: Vec<usize>,
    best: Option<(Vec<usize>, Chain)>,
    /// Another chain whose rank sequence equals the current best.
    best_tie: Option<Chain>,
}

impl Tally {
    fn record(&mut self, ranks: &[usize], path: &[ElemId], rising: bool) {
        self.chains += 1;
        if rising {
            self.rising_count += 1;
            if self.rising.len() < 2 {
                self.rising.push(path.to_vec());
            }
            if self.rising_count == 1 {
                self.rising_ranks = ranks.to_vec();
            }
        }
        match &self.best {
            Some((b, _)) if ranks > b.as_slice() => {}
            Some((b, _)) if ranks == b.as_slice() => {
                if self.best_tie.is_none() {
                    self.best_tie = Some(path.to_vec());
                }
            }
            _ => {
                self.best = Some((ranks.to_vec(), path.to_vec()));
                self.best_tie = None;
            }
        }
    }

    fn judge(self, interval: (ElemId, ElemId), root: Option<&Chain>) -> Option<Failure> {
        let fail = |reason, chains| {
            Some(Failure {
                interval: Some(interval),
                root: root.cloned(),
                reason,
                chains,
            })
        };
        match self.rising_count {
            0 => {
                let lex_first = self.best.map(|(_, c)| vec![c]).unwrap_or_default();
                fail(FailureReason::NoRisingChain, lex_first)
            }
            1 => {
                let rising = self.rising.into_iter().next().unwrap();
                let (best_ranks, best_chain) = self.best.unwrap();
                if best_chain != rising {
                    fail(
                        FailureReason::RisingChainNotLexFirst,
                        vec![rising, best_chain],
                    )
                } else if let Some(tie) = self.best_tie {
                    debug_assert_eq!(best_ranks, self.rising_ranks);
                    fail(FailureReason::RisingChainNotLexFirst, vec![rising, tie])
                } else {
                    None
                }
            }
            count => fail(FailureReason::MultipleRisingChains { count }, self.rising),
        }
    }
}

/// Enumerates every saturated chain starting at `x`; each one is a maximal
/// chain of `[x, end]`. `label` gives the label id of the step
/// `path.last() ⋖ next`.
fn scan_from<F>(
    l: &Lattice,
    lp: &LabelPoset,
    mode: RisingMode,
    x: ElemId,
    label: &F,
) -> Result<Vec<Option<Tally>>>
where
    F: Fn(&[ElemId], ElemId) -> Result<usize>,
{
    struct Ctx<'a, F> {
        l: &'a Lattice,
        lp: &'a LabelPoset,
        mode: RisingMode,
        label: &'a F,
        tallies: Vec<Option<Tally>>,
    }

    fn dfs<F>(
        ctx: &mut Ctx<'_, F>,
        path: &mut Vec<ElemId>,
        ranks: &mut Vec<usize>,
        last_label: Option<usize>,
        rising: bool,
    ) -> Result<()>
    where
        F: Fn(&[ElemId], ElemId) -> Result<usize>,
    {
        let here = *path.last().unwrap();
        for &next in ctx.l.upper_covers(here) {
            let id = (ctx.label)(path, next)?;
            let still = rising && last_label.is_none_or(|prev| ctx.mode.rises(ctx.lp, prev, id));
            path.push(next);
            ranks.push(ctx.lp.rank(id));
            ctx.tallies[next]
                .get_or_insert_with(Tally::default)
                .record(ranks, path, still);
            dfs(ctx, path, ranks, Some(id), still)?;
            ranks.pop();
            path.pop();
        }
        Ok(())
    }

    let mut ctx = Ctx {
        l,
        lp,
        mode,
        label,
        tallies: (0..l.len()).map(|_| None).collect(),
    };
    dfs(&mut ctx, &mut vec![x], &mut Vec::new(), None, true)?;
    Ok(ctx.tallies)
}

fn judge_all(
    tallies: Vec<Option<Tally>>,
    x: ElemId,
    root: Option<&Chain>,
    stats: &mut Stats,
    failures: &mut Vec<Failure>,
) {
    for (y, t) in tallies.into_iter().enumerate() {
        if let Some(t) = t {
            stats.intervals_checked += 1;
            stats.chains_enumerated += t.chains;
            if let Some(f) = t.judge((x, y), root) {
                failures.push(f);
            }
        }
    }
}

/// Checks the EL condition on every interval of positive length: exactly one
/// weakly increasing maximal chain, strictly first in lexicographic order of
/// linear-extension ranks.
pub fn verify_el_shelling(
    l: &Lattice,
    labeling: &EdgeLabeling,
    mode: RisingMode,
) -> Result<VerifierReport> {
    labeling.check_total(l)?;
    let lp = labeling.label_poset();
    let label = |path: &[ElemId], next: ElemId| {
        let here = *path.last().unwrap();
        labeling
            .label_id(here, next)
            .ok_or(Error::MissingEdgeLabel(here, next))
    };
    let per_x: Vec<Result<Vec<Option<Tally>>>> = (0..l.len())
        .into_par_iter()
        .map(|x| scan_from(l, lp, mode, x, &label))
        .collect();
    let mut stats = Stats::default();
    let mut failures = Vec::new();
    for (x, tallies) in per_x.into_iter().enumerate() {
        judge_all(tallies?, x, None, &mut stats, &mut failures);
    }
    Ok(VerifierReport::new(failures, stats))
}

/// Labels for (maximal chain, edge) pairs, keyed by the chain prefix from
/// `0̂` up to and including the edge. Keying on the prefix makes labels
/// consistent for chains that agree up to the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainEdgeLabeling {
    label_poset: LabelPoset,
    labels: BTreeMap<Chain, usize>,
}

impl ChainEdgeLabeling {
    /// Builds from `(maximal chain, edge index, label id)` triples, where
    /// edge index `i` is the step `chain[i] ⋖ chain[i+1]`.
    pub fn from_assignments(
        l: &Lattice,
        label_poset: LabelPoset,
        assignments: &[(Chain, usize, usize)],
    ) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (chain, i, id) in assignments {
            if !l.is_maximal_chain(chain) {
                return Err(Error::NotMaximalChain(format!("{chain:?}")));
            }
            if *i + 1 >= chain.len() || *id >= label_poset.len() {
                return Err(Error::Invalid(format!(
                    "bad assignment ({chain:?}, {i}, {id})"
                )));
            }
            let key = chain[..=i + 1].to_vec();
            if let Some(prev) = labels.insert(key.clone(), *id) {
                if prev != *id {
                    return Err(Error::InconsistentLabeling(key));
                }
            }
        }
        Ok(ChainEdgeLabeling {
            label_poset,
            labels,
        })
    }

    /// Labels every prefix by `f(prefix)`, where the prefix ends with the edge.
    pub fn from_fn(l: &Lattice, label_poset: LabelPoset, f: impl Fn(&[ElemId]) -> usize) -> Self {
        let mut labels = BTreeMap::new();
        let mut stack = vec![vec![l.bottom()]];
        while let Some(path) = stack.pop() {
            let here = *path.last().unwrap();
            for &next in l.upper_covers(here) {
                let mut p = path.clone();
                p.push(next);
                labels.insert(p.clone(), f(&p));
                stack.push(p);
            }
        }
        ChainEdgeLabeling {
            label_poset,
            labels,
        }
    }

    /// The root-independent chain-edge labeling of an edge labeling.
    pub fn from_edge_labeling(l: &Lattice, el: &EdgeLabeling) -> Result<Self> {
        el.check_total(l)?;
        Ok(ChainEdgeLabeling::from_fn(
            l,
            el.label_poset().clone(),
            |p| el.label_id(p[p.len() - 2], p[p.len() - 1]).unwrap(),
        ))
    }

    pub fn label_poset(&self) -> &LabelPoset {
        &self.label_poset
    }

    pub fn label_id(&self, prefix: &[ElemId]) -> Option<usize> {
        self.labels.get(prefix).copied()
    }
}

/// Checks the CL condition on every rooted interval `[x, y]_r`.
pub fn verify_cl_labeling(
    l: &Lattice,
    cel: &ChainEdgeLabeling,
    mode: RisingMode,
) -> Result<VerifierReport> {
    let lp = cel.label_poset();
    let rooted: Vec<(ElemId, Chain)> = (0..l.len())
        .flat_map(|x| {
            l.chains_between(l.bottom(), x)
                .into_iter()
                .map(move |r| (x, r))
        })
        .collect();
    let per_root: Vec<Result<Vec<Option<Tally>>>> = rooted
        .par_iter()
        .map(|(x, root)| {
            let label = |path: &[ElemId], next: ElemId| {
                let mut key = root.clone();
                key.extend_from_slice(&path[1..]);
                key.push(next);
                cel.label_id(&key).ok_or(Error::MissingLabel(key))
            };
            scan_from(l, lp, mode, *x, &label)
        })
        .collect();
    let mut stats = Stats::default();
    let mut failures = Vec::new();
    for ((x, root), tallies) in rooted.iter().zip(per_root) {
        judge_all(tallies?, *x, Some(root), &mut stats, &mut failures);
    }
    Ok(VerifierReport::new(failures, stats))
}

/// All partial orders on `{0..k}` (as reflexive relations).
fn partial_orders(k: usize) -> Vec<BitMatrix> {
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut m = BitMatrix::new(k);
        for a in 0..k {
            m.set(a, a, true);
        }
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                m.set(a, b, true);
            }
        }
        let antisym = (0..k).all(|a| (0..k).all(|b| a == b || !(m.get(a, b) && m.get(b, a))));
        let trans = (0..k)
            .all(|a| (0..k).all(|b| !m.get(a, b) || (0..k).all(|c| !m.get(b, c) || m.get(a, c))));
        if antisym && trans {
            out.push(m);
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Exhaustive search for an EL-labeling over every label poset with at most
/// `alphabet` symbols (every partial order and every linear extension of
/// it). Returns the first labeling that verifies.
pub fn search_el_labeling(
    l: &Lattice,
    alphabet: usize,
    mode: RisingMode,
) -> Result<Option<EdgeLabeling>> {
    const CAP: usize = 1 << 20;
    let edges: Vec<(ElemId, ElemId)> = l.poset().covers().to_vec();
    if alphabet > 4 {
        return Err(Error::SizeCapExceeded {
            what: "label alphabet",
            actual: alphabet,
            cap: 4,
        });
    }
    let total = (alphabet as f64).powi(edges.len() as i32);
    if total > CAP as f64 {
        return Err(Error::SizeCapExceeded {
            what: "labelings to enumerate",
            actual: total.min(usize::MAX as f64) as usize,
            cap: CAP,
        });
    }
    for k in 1..=alphabet {
        for order in partial_orders(k) {
            for linext in permutations(k) {
                let labels = (0..k as i64).map(Label::Int).collect();
                let Ok(lp) = LabelPoset::new(labels, order.clone(), linext) else {
                    continue;
                };
                let count = k.pow(edges.len() as u32);
                for code in 0..count {
                    let mut c = code;
                    let mut map = BTreeMap::new();
                    for &e in &edges {
                        map.insert(e, c % k);
                        c /= k;
                    }
                    let el = EdgeLabeling::new(lp.clone(), map)?;
                    if verify_el_shelling(l, &el, mode)?.passed() {
                        return Ok(Some(el));
                    }
                }
            }
        }
    }
    Ok(None)
}
