//! Finite posets, set partitions, partition lattices, isomorphism testing,
//! disjoint unions and Hasse-diagram DOT rendering.

use crate::{Error, Result};

/// Default cap on `n` for [`partition_lattice`].
pub const DEFAULT_PARTITION_CAP: usize = 7;
/// Default size cap for [`poset_iso`].
pub const DEFAULT_ISO_CAP: usize = 64;

/// A finite partially ordered set given by its full order relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    size: usize,
    le: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl Poset {
    /// Builds a poset from a row-major `size × size` relation matrix,
    /// checking reflexivity, antisymmetry and transitivity.
    pub fn new(size: usize, le: Vec<bool>) -> Result<Self> {
        if le.len() != size * size {
            return Err(Error::InvalidArgument(format!(
                "relation matrix has {} entries, expected {}",
                le.len(),
                size * size
            )));
        }
        let p = Poset { size, le, labels: None };
        for i in 0..size {
            if !p.le(i, i) {
                return Err(Error::InvalidArgument(format!("not reflexive at {i}")));
            }
            for j in 0..size {
                if i != j && p.le(i, j) && p.le(j, i) {
                    return Err(Error::InvalidArgument(format!(
                        "not antisymmetric at ({i}, {j})"
                    )));
                }
                for k in 0..size {
                    if p.le(i, j) && p.le(j, k) && !p.le(i, k) {
                        return Err(Error::InvalidArgument(format!(
                            "not transitive at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(p)
    }

    pub(crate) fn from_parts_unchecked(size: usize, le: Vec<bool>) -> Self {
        debug_assert_eq!(le.len(), size * size);
        Poset { size, le, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.size);
        self.labels = Some(labels);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i * self.size + j]
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le(i, j)
    }

    /// The order-dual poset. An involution.
    pub fn dual(&self) -> Poset {
        let mut le = vec![false; self.size * self.size];
        for i in 0..self.size {
            for j in 0..self.size {
                le[i * self.size + j] = self.le(j, i);
            }
        }
        Poset { size: self.size, le, labels: self.labels.clone() }
    }

    /// Covering pairs `(lower, upper)` via transitive reduction, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.size {
            'next: for j in 0..self.size {
                if !self.lt(i, j) {
                    continue;
                }
                for k in 0..self.size {
                    if self.lt(i, k) && self.lt(k, j) {
                        continue 'next;
                    }
                }
                out.push((i, j));
            }
        }
        out
    }

    /// Connected components of the comparability graph, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.size];
        let mut count = 0;
        for start in 0..self.size {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = count;
            while let Some(x) = stack.pop() {
                for y in 0..self.size {
                    if comp[y] == usize::MAX && (self.lt(x, y) || self.lt(y, x)) {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for (i, &c) in comp.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Elements below `p`, including `p` itself, as an induced subposet.
    pub fn ideal(&self, p: usize) -> (Poset, Vec<usize>) {
        let points: Vec<usize> = (0..self.size).filter(|&x| self.le(x, p)).collect();
        (self.restrict(&points), points)
    }

    /// Induced subposet on the given (sorted) points.
    pub fn restrict(&self, points: &[usize]) -> Poset {
        let n = points.len();
        let mut le = vec![false; n * n];
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                le[a * n + b] = self.le(i, j);
            }
        }
        let mut p = Poset::from_parts_unchecked(n, le);
        if let Some(labels) = &self.labels {
            p = p.with_labels(points.iter().map(|&i| labels[i].clone()).collect());
        }
        p
    }

    /// Maximal elements, ascending.
    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&i| (0..self.size).all(|j| !self.lt(i, j)))
            .collect()
    }
}

/// A partition of `{0, .., n-1}` into disjoint nonempty blocks.
///
/// Blocks are sorted internally and listed by least member, so equal
/// partitions compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            for &x in block {
                if x >= n || seen[x] {
                    return Err(Error::InvalidArgument(format!(
                        "element {x} out of range or repeated"
                    )));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidArgument("blocks do not cover the set".into()));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        Ok(Partition { blocks })
    }

    /// Partition encoded by a restricted-growth string.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        // RGS blocks are already ordered by least member.
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Block index of each element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.size()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x] = b;
            }
        }
        out
    }

    /// `self ≤ other` in refinement order: every block of `self` is
    /// contained in a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let mine = self.block_of();
        let theirs = other.block_of();
        debug_assert_eq!(mine.len(), theirs.len());
        let mut image = vec![usize::MAX; self.blocks.len()];
        for (x, &b) in mine.iter().enumerate() {
            if image[b] == usize::MAX {
                image[b] = theirs[x];
            } else if image[b] != theirs[x] {
                return false;
            }
        }
        true
    }
}

/// All partitions of `{0, .., n-1}` in restricted-growth-string order.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    if n == 0 {
        return vec![Partition { blocks: Vec::new() }];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        out.push(Partition::from_rgs(&rgs));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let max_prev = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= max_prev {
                rgs[i] += 1;
                rgs[i + 1..].fill(0);
                break;
            }
            i -= 1;
        }
    }
}

/// Bell number via the Bell triangle. Supported for `n <= 20`.
pub fn bell(n: usize) -> u64 {
    assert!(n <= 20, "bell({n}) exceeds the supported range");
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// The lattice of partitions of `{0, .., n-1}` under refinement.
pub fn partition_lattice(n: usize) -> Result<Poset> {
    partition_lattice_capped(n, DEFAULT_PARTITION_CAP)
}

pub fn partition_lattice_capped(n: usize, cap: usize) -> Result<Poset> {
    if n > cap {
        return Err(Error::PartitionTooLarge { n, cap });
    }
    let parts = partitions_of(n);
    let m = parts.len();
    let mut le = vec![false; m * m];
    for (i, p) in parts.iter().enumerate() {
        for (j, q) in parts.iter().enumerate() {
            le[i * m + j] = p.refines(q);
        }
    }
    Ok(Poset::from_parts_unchecked(m, le))
}

/// Side-by-side union with no cross relations. Errors on an empty family.
pub fn disjoint_union(parts: &[Poset]) -> Result<Poset> {
    if parts.is_empty() {
        return Err(Error::EmptyUnion);
    }
    let size: usize = parts.iter().map(|p| p.size()).sum();
    let mut le = vec![false; size * size];
    let mut off = 0;
    for p in parts {
        for i in 0..p.size() {
            for j in 0..p.size() {
                le[(off + i) * size + (off + j)] = p.le(i, j);
            }
        }
        off += p.size();
    }
    Ok(Poset::from_parts_unchecked(size, le))
}

/// Order isomorphism test with the default size cap.
pub fn poset_iso(p: &Poset, q: &Poset) -> Result<bool> {
    poset_iso_capped(p, q, DEFAULT_ISO_CAP)
}

/// Exact backtracking isomorphism test with invariant pruning.
pub fn poset_iso_capped(p: &Poset, q: &Poset, cap: usize) -> Result<bool> {
    if p.size() > cap || q.size() > cap {
        return Err(Error::PosetTooLarge { size: p.size().max(q.size()), cap });
    }
    if p.size() != q.size() {
        return Ok(false);
    }
    let n = p.size();
    if n == 0 {
        return Ok(true);
    }
    let inv_p = node_invariants(p);
    let inv_q = node_invariants(q);
    let mut sp = inv_p.clone();
    let mut sq = inv_q.clone();
    sp.sort_unstable();
    sq.sort_unstable();
    if sp != sq {
        return Ok(false);
    }

    // Most-constrained-first order: fewest candidates in q.
    let mut order: Vec<usize> = (0..n).collect();
    let candidate_count = |x: usize| inv_q.iter().filter(|&&i| i == inv_p[x]).count();
    order.sort_by_key(|&x| (candidate_count(x), x));

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(match_nodes(p, q, &inv_p, &inv_q, &order, 0, &mut map, &mut used))
}

type NodeInvariant = (usize, usize, usize, usize, usize);

fn node_invariants(p: &Poset) -> Vec<NodeInvariant> {
    let n = p.size();
    let comps = p.components();
    let mut comp_size = vec![0usize; n];
    for c in &comps {
        for &x in c {
            comp_size[x] = c.len();
        }
    }
    let mut height = vec![0usize; n];
    let mut depth = vec![0usize; n];
    // Longest chain strictly below / above; n is small, fixpoint iteration.
    for _ in 0..n {
        for i in 0..n {
            for j in 0..n {
                if p.lt(i, j) {
                    height[j] = height[j].max(height[i] + 1);
                    depth[i] = depth[i].max(depth[j] + 1);
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            let down = (0..n).filter(|&j| p.le(j, i)).count();
            let up = (0..n).filter(|&j| p.le(i, j)).count();
            (comp_size[i], down, up, height[i], depth[i])
        })
        .collect()
}

fn match_nodes(
    p: &Poset,
    q: &Poset,
    inv_p: &[NodeInvariant],
    inv_q: &[NodeInvariant],
    order: &[usize],
    k: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if k == order.len() {
        return true;
    }
    let x = order[k];
    for y in 0..q.size() {
        if used[y] || inv_q[y] != inv_p[x] {
            continue;
        }
        let consistent = order[..k].iter().all(|&z| {
            let w = map[z];
            p.le(x, z) == q.le(y, w) && p.le(z, x) == q.le(w, y)
        });
        if !consistent {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if match_nodes(p, q, inv_p, inv_q, order, k + 1, map, used) {
            return true;
        }
        map[x] = usize::MAX;
        used[y] = false;
    }
    false
}

/// Hasse diagram as a DOT digraph, edges pointing from lower to upper cover.
pub fn hasse_dot(p: &Poset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
    for i in 0..p.size() {
        let label = match p.labels() {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        };
        out.push_str(&format!("  n{} [label=\"{}\"];\n", i, label));
    }
    for (i, j) in p.covers() {
        out.push_str(&format!("  n{} -> n{};\n", i, j));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Poset {
        let mut le = vec![false; n * n];
        for i in 0..n {
            for j in i..n {
                le[i * n + j] = true;
            }
        }
        Poset::from_parts_unchecked(n, le)
    }

    fn antichain(n: usize) -> Poset {
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        Poset::from_parts_unchecked(n, le)
    }

    #[test]
    fn bell_values() {
        assert_eq!(bell(0), 1);
        assert_eq!(bell(1), 1);
        assert_eq!(bell(2), 2);
        assert_eq!(bell(3), 5);
        assert_eq!(bell(4), 15);
        assert_eq!(bell(5), 52);
        assert_eq!(bell(20), 51_724_158_235_372);
    }

    #[test]
    fn partition_lattice_sizes_match_bell() {
        for n in 0..=6 {
            assert_eq!(partition_lattice(n).unwrap().size() as u64, bell(n), "n = {n}");
        }
    }

    #[test]
    fn partition_lattice_zero_is_a_single_element() {
        let p = partition_lattice(0).unwrap();
        assert_eq!(p.size(), 1);
        assert_eq!(partitions_of(0).len(), 1);
        assert!(partitions_of(0)[0].blocks().is_empty());
    }

    #[test]
    fn partition_lattice_cap() {
        assert!(matches!(
            partition_lattice(8),
            Err(Error::PartitionTooLarge { n: 8, cap: 7 })
        ));
    }

    #[test]
    fn partition_refinement_order() {
        let parts = partitions_of(3);
        assert_eq!(parts.len(), 5);
        let bottom = Partition::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        let top = Partition::new(3, vec![vec![0, 1, 2]]).unwrap();
        for p in &parts {
            assert!(bottom.refines(p));
            assert!(p.refines(&top));
        }
        let p12 = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let p13 = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(!p12.refines(&p13));
        assert!(!p13.refines(&p12));
    }

    #[test]
    fn partition_lattice_three_has_six_covers() {
        // 3 atom covers above the bottom plus 3 covers below the top;
        // cross-check: sum over partitions of C(#blocks, 2) = 3 + 1 + 1 + 1 = 6.
        let p = partition_lattice(3).unwrap();
        assert_eq!(p.covers().len(), 6);
    }

    #[test]
    fn dual_is_an_involution() {
        let p = partition_lattice(3).unwrap();
        assert_eq!(p.dual().dual(), p);
        let c = chain(2);
        let d = c.dual();
        assert!(d.le(1, 0) && !d.le(0, 1));
    }

    #[test]
    fn dual_partition_lattice_swaps_bounds() {
        let p = partition_lattice(3).unwrap();
        let d = p.dual();
        let minimal = |q: &Poset| {
            (0..q.size())
                .filter(|&i| (0..q.size()).all(|j| !q.lt(j, i)))
                .count()
        };
        assert_eq!(minimal(&p), 1);
        assert_eq!(minimal(&d), 1);
        let bottom_p = (0..p.size()).find(|&i| (0..p.size()).all(|j| p.le(i, j))).unwrap();
        assert!((0..d.size()).all(|j| d.le(j, bottom_p)));
    }

    #[test]
    fn iso_basics() {
        assert!(poset_iso(&chain(2), &chain(2)).unwrap());
        assert!(!poset_iso(&chain(2), &antichain(2)).unwrap());
        let p = partition_lattice(4).unwrap();
        assert!(poset_iso(&p, &p).unwrap());
        assert!(poset_iso(&p.dual(), &p.dual()).unwrap());
    }

    #[test]
    fn iso_cap() {
        let p = antichain(65);
        assert!(matches!(poset_iso(&p, &p), Err(Error::PosetTooLarge { .. })));
        assert!(poset_iso_capped(&p, &p, 128).unwrap());
    }

    #[test]
    fn iso_is_label_independent() {
        // Relabeling (permuting elements) preserves isomorphism.
        let p = partition_lattice(3).unwrap();
        let perm = [4usize, 2, 0, 3, 1];
        let mut le = vec![false; 25];
        for i in 0..5 {
            for j in 0..5 {
                le[perm[i] * 5 + perm[j]] = p.le(i, j);
            }
        }
        let q = Poset::new(5, le).unwrap();
        assert!(poset_iso(&p, &q).unwrap());
    }

    #[test]
    fn disjoint_union_components() {
        let u = disjoint_union(&[chain(2), chain(2), antichain(1)]).unwrap();
        assert_eq!(u.size(), 5);
        assert_eq!(u.component_count(), 3);
        assert!(matches!(disjoint_union(&[]), Err(Error::EmptyUnion)));
        let singles = disjoint_union(&[antichain(1), antichain(1)]).unwrap();
        assert!(poset_iso(&singles, &antichain(2)).unwrap());
    }

    #[test]
    fn union_of_four_dual_pi2() {
        let d = partition_lattice(2).unwrap().dual();
        let u = disjoint_union(&[d.clone(), d.clone(), d.clone(), d]).unwrap();
        assert_eq!(u.size(), 8);
        assert_eq!(u.component_count(), 4);
    }

    #[test]
    fn hasse_dot_shapes() {
        let two = chain(2);
        let dot = hasse_dot(&two);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.starts_with("digraph poset {"));
        assert_eq!(hasse_dot(&antichain(3)).matches("->").count(), 0);
        assert_eq!(hasse_dot(&partition_lattice(3).unwrap()).matches("->").count(), 6);
    }

    #[test]
    fn poset_validation() {
        assert!(Poset::new(2, vec![true, false, false, false]).is_err());
        assert!(Poset::new(2, vec![true, true, true, true]).is_err());
        let le = vec![
            true, true, false, //
            false, true, true, //
            false, false, true,
        ];
        assert!(Poset::new(3, le).is_err()); // not transitive
    }

    #[test]
    fn ideal_restricts() {
        let p = partition_lattice(3).unwrap();
        let top = (0..5).find(|&i| (0..5).all(|j| p.le(j, i))).unwrap();
        let (ideal, points) = p.ideal(top);
        assert_eq!(points.len(), 5);
        assert!(poset_iso(&ideal, &p).unwrap());
    }
}
