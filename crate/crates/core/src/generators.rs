//! Named families of posets and lattices used by tests, the corpus and the CLI.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::poset::{BitMatrix, ElemId, Poset};

pub const GENERATORS: &[&str] = &[
    "chain",
    "antichain",
    "boolean",
    "partition-lattice",
    "n5",
    "hexagon",
    "v",
];

/// Builds a generator from the registry by name.
pub fn generate(name: &str, size: usize) -> Result<Poset> {
    match name {
        "chain" => Ok(chain_poset(size)),
        "antichain" => Ok(antichain(size)),
        "boolean" => Ok(boolean(size).poset().clone()),
        "partition-lattice" => Ok(partition_lattice(size).poset().clone()),
        "n5" => Ok(n5().poset().clone()),
        "hexagon" => Ok(hexagon().poset().clone()),
        "v" => Ok(v_poset()),
        other => Err(Error::Invalid(format!("unknown generator '{other}'"))),
    }
}

fn unwrap_lattice(r: Result<Lattice>) -> Lattice {
    r.expect("generator produces a lattice")
}

/// Totally ordered set with `n` elements.
pub fn chain_poset(n: usize) -> Poset {
    let covers: Vec<(ElemId, ElemId)> = (1..n).map(|i| (i - 1, i)).collect();
    Poset::from_covers_unnamed(n, &covers).unwrap()
}

/// Chain with `n ≥ 1` elements as a lattice.
pub fn chain(n: usize) -> Lattice {
    unwrap_lattice(Lattice::from_poset(chain_poset(n)))
}

pub fn antichain(n: usize) -> Poset {
    Poset::from_covers_unnamed(n, &[]).unwrap()
}

/// `a < b`, `a < c`.
pub fn v_poset() -> Poset {
    Poset::from_covers(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (0, 2)]).unwrap()
}

/// Boolean lattice of subsets of `{1..n}`; element id is the bitmask.
pub fn boolean(n: usize) -> Lattice {
    let size = 1usize << n;
    let names = (0..size)
        .map(|mask| {
            let inner: Vec<String> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (i + 1).to_string())
                .collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    let mut covers = Vec::new();
    for mask in 0..size {
        for i in 0..n {
            if mask >> i & 1 == 0 {
                covers.push((mask, mask | 1 << i));
            }
        }
    }
    unwrap_lattice(Lattice::from_covers(names, &covers))
}

/// The pentagon `0 < a < b < 1`, `0 < c < 1`.
pub fn n5() -> Lattice {
    unwrap_lattice(Lattice::from_covers(
        ["0", "a", "b", "c", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
    ))
}

/// Two disjoint two-element chains between a common bottom and top.
pub fn hexagon() -> Lattice {
    unwrap_lattice(Lattice::from_covers(
        ["0", "a", "b", "c", "d", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        &[(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)],
    ))
}

/// All set partitions of `{0..n}` as restricted growth strings, in
/// lexicographic order.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            cur.push(b);
            rec(n, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), 0, &mut out);
    out
}

fn block_count(rgs: &[usize]) -> usize {
    rgs.iter().max().map_or(0, |m| m + 1)
}

/// Blocks of a restricted growth string, each listing its elements.
pub fn rgs_blocks(rgs: &[usize]) -> Vec<Vec<ElemId>> {
    let mut blocks = vec![Vec::new(); block_count(rgs)];
    for (x, &b) in rgs.iter().enumerate() {
        blocks[b].push(x);
    }
    blocks
}

/// Partition lattice of an `n`-set ordered by refinement. Ids run from the
/// all-singletons partition to the one-block partition.
pub fn partition_lattice(n: usize) -> Lattice {
    let mut parts = set_partitions(n);
    parts.sort_by(|a, b| block_count(b).cmp(&block_count(a)).then(a.cmp(b)));
    let names = parts
        .iter()
        .map(|rgs| {
            let blocks: Vec<String> = rgs_blocks(rgs)
                .iter()
                .map(|b| b.iter().map(|x| (x + 1).to_string()).collect::<String>())
                .collect();
            if blocks.is_empty() {
                "{}".to_string()
            } else {
                blocks.join("|")
            }
        })
        .collect();
    let k = parts.len();
    let mut leq = BitMatrix::new(k);
    for (i, p) in parts.iter().enumerate() {
        for (j, q) in parts.iter().enumerate() {
            // p refines q: same p-block implies same q-block
            let refines = (0..n).all(|x| (0..n).all(|y| p[x] != p[y] || q[x] == q[y]));
            leq.set(i, j, refines);
        }
    }
    unwrap_lattice(Lattice::from_poset(
        Poset::from_relation(names, leq).expect("refinement is a partial order"),
    ))
}
