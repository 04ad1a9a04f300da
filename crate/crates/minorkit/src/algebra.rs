//! Finite algebras with explicit operation tables: validation, products,
//! powers, argument-reindexing homomorphisms, and exhaustive homomorphism
//! enumeration by constraint-propagating backtracking.
//!
//! Carriers are the ranges `0..size`. Operation tables are flat and
//! row-major (the last argument varies fastest). Product carriers encode
//! tuples mixed-radix with factor 0 least significant.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::par::{map_branches, SearchMode};
use crate::{Error, Result};

/// Default cap on the carrier size of a power.
pub const DEFAULT_POWER_CAP: usize = 4096;
/// Default cap on the number of enumerated homomorphisms.
pub const DEFAULT_HOM_LIMIT: usize = 1_000_000;

/// An operation symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpSym {
    pub name: String,
    pub arity: usize,
}

/// An algebraic signature: a list of named operation symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<OpSym>,
}

impl Signature {
    pub fn new<S: Into<String>>(ops: Vec<(S, usize)>) -> Result<Self> {
        let ops: Vec<OpSym> = ops
            .into_iter()
            .map(|(name, arity)| OpSym { name: name.into(), arity })
            .collect();
        for (i, a) in ops.iter().enumerate() {
            for b in &ops[i + 1..] {
                if a.name == b.name {
                    return Err(Error::InvalidArgument(format!(
                        "duplicate operation name `{}`",
                        a.name
                    )));
                }
            }
        }
        Ok(Signature { ops })
    }

    pub fn ops(&self) -> &[OpSym] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }
}

/// A finite algebra: a carrier `0..size` with one total table per
/// operation symbol.
///
/// Cloning is cheap; tables are shared. `provenance` records the factor
/// sizes when the algebra was built as a product or power.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    size: usize,
    sig: Arc<Signature>,
    tables: Arc<[Vec<usize>]>,
    provenance: Option<Arc<[usize]>>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        // Provenance is construction metadata, not algebra identity.
        self.size == other.size && self.sig == other.sig && self.tables == other.tables
    }
}

impl Eq for FiniteAlgebra {}

impl FiniteAlgebra {
    /// Validates table shapes and entry ranges.
    pub fn new(size: usize, sig: Signature, tables: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(size, Arc::new(sig), tables, None)
    }

    fn build(
        size: usize,
        sig: Arc<Signature>,
        tables: Vec<Vec<usize>>,
        provenance: Option<Arc<[usize]>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("carrier must be nonempty".into()));
        }
        if tables.len() != sig.ops().len() {
            return Err(Error::MalformedTable {
                op: "<signature>".into(),
                detail: format!("{} tables for {} operations", tables.len(), sig.ops().len()),
            });
        }
        for (op, table) in sig.ops().iter().zip(&tables) {
            let expected = size.checked_pow(op.arity as u32).ok_or_else(|| {
                Error::SizeOverflow(format!("table of `{}` does not fit", op.name))
            })?;
            if table.len() != expected {
                return Err(Error::MalformedTable {
                    op: op.name.clone(),
                    detail: format!("length {} but expected {}", table.len(), expected),
                });
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= size) {
                return Err(Error::MalformedTable {
                    op: op.name.clone(),
                    detail: format!("entry {bad} outside carrier 0..{size}"),
                });
            }
        }
        Ok(FiniteAlgebra { size, sig, tables: tables.into(), provenance })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub(crate) fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn op_table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn provenance(&self) -> Option<&[usize]> {
        self.provenance.as_deref()
    }

    /// Applies operation `op` to an argument tuple.
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.sig.ops()[op].arity);
        let mut idx = 0;
        for &a in args {
            debug_assert!(a < self.size);
            idx = idx * self.size + a;
        }
        self.tables[op][idx]
    }
}

pub(crate) fn mixed_radix_decode(mut x: usize, sizes: &[usize], out: &mut Vec<usize>) {
    out.clear();
    for &s in sizes {
        out.push(x % s);
        x /= s;
    }
}

pub(crate) fn mixed_radix_encode(coords: &[usize], sizes: &[usize]) -> usize {
    let mut x = 0;
    for (&c, &s) in coords.iter().zip(sizes).rev() {
        x = x * s + c;
    }
    x
}

/// Direct product with coordinatewise operations.
///
/// The product carrier encodes tuples mixed-radix, factor 0 least
/// significant; provenance records the factor sizes.
pub fn product(factors: &[FiniteAlgebra]) -> Result<FiniteAlgebra> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
    for f in factors {
        if f.signature() != first.signature() {
            return Err(Error::SignatureMismatch(
                "product factors must share a signature".into(),
            ));
        }
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let size = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::SizeOverflow("product carrier does not fit".into()))?;

    let sig = first.signature_arc().clone();
    let nfac = factors.len();
    let max_arity = sig.ops().iter().map(|o| o.arity).max().unwrap_or(0);
    let mut tables = Vec::with_capacity(sig.ops().len());
    let mut coords = Vec::with_capacity(nfac);
    let mut fac_args = vec![0usize; max_arity];
    for (op_idx, op) in sig.ops().iter().enumerate() {
        let k = op.arity;
        let entries = size
            .checked_pow(k as u32)
            .ok_or_else(|| Error::SizeOverflow(format!("table of `{}` does not fit", op.name)))?;
        let mut table = Vec::with_capacity(entries);
        // Arguments as product elements, row-major odometer.
        let mut args = vec![0usize; k];
        let mut arg_coords: Vec<Vec<usize>> = vec![vec![0; nfac]; k];
        loop {
            for (a, &e) in args.iter().enumerate() {
                mixed_radix_decode(e, &sizes, &mut coords);
                arg_coords[a].copy_from_slice(&coords);
            }
            let mut out_coords = Vec::with_capacity(nfac);
            for (fi, factor) in factors.iter().enumerate() {
                for (a, ac) in arg_coords.iter().enumerate() {
                    fac_args[a] = ac[fi];
                }
                out_coords.push(factor.apply(op_idx, &fac_args[..k]));
            }
            table.push(mixed_radix_encode(&out_coords, &sizes));
            // next argument tuple
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                args[pos] += 1;
                if args[pos] < size {
                    break;
                }
                args[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if k == 0 || pos == usize::MAX {
                break;
            }
        }
        debug_assert_eq!(table.len(), entries);
        tables.push(table);
    }
    FiniteAlgebra::build(size, sig, tables, Some(sizes.into()))
}

/// `n`-th direct power under the default size cap.
pub fn power(base: &FiniteAlgebra, n: usize) -> Result<FiniteAlgebra> {
    power_capped(base, n, DEFAULT_POWER_CAP)
}

pub fn power_capped(base: &FiniteAlgebra, n: usize, cap: usize) -> Result<FiniteAlgebra> {
    if n == 0 {
        return Err(Error::InvalidArgument("power exponent must be positive".into()));
    }
    let size = base
        .size()
        .checked_pow(n as u32)
        .ok_or_else(|| Error::SizeOverflow(format!("{}^{n} does not fit", base.size())))?;
    if size > cap {
        return Err(Error::SizeOverflow(format!(
            "power carrier {size} exceeds cap {cap}"
        )));
    }
    product(&vec![base.clone(); n])
}

/// A function `[n] -> [m]` on 0-based positions. Used both for argument
/// reindexing on powers and for copy relabeling on copowers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMap {
    targets: Vec<usize>,
    codomain: usize,
}

impl IndexMap {
    pub fn new(targets: Vec<usize>, codomain: usize) -> Result<Self> {
        if let Some(&bad) = targets.iter().find(|&&t| t >= codomain) {
            return Err(Error::InvalidArgument(format!(
                "target {bad} outside codomain 0..{codomain}"
            )));
        }
        Ok(IndexMap { targets, codomain })
    }

    pub fn identity(n: usize) -> Self {
        IndexMap { targets: (0..n).collect(), codomain: n }
    }

    /// The merge `[n] -> [n-1]` identifying positions `i < j`: positions
    /// below `j` stay put, `j` goes to `i`, positions above `j` shift down.
    pub fn identification(n: usize, i: usize, j: usize) -> Result<Self> {
        if n < 2 || i >= j || j >= n {
            return Err(Error::ArityTooSmall(format!(
                "identification requires 0 <= i < j < n, got i={i}, j={j}, n={n}"
            )));
        }
        let targets = (0..n)
            .map(|k| {
                if k < j {
                    k
                } else if k == j {
                    i
                } else {
                    k - 1
                }
            })
            .collect();
        Ok(IndexMap { targets, codomain: n - 1 })
    }

    pub fn domain(&self) -> usize {
        self.targets.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn get(&self, i: usize) -> usize {
        self.targets[i]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_identity(&self) -> bool {
        self.domain() == self.codomain && self.targets.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &IndexMap) -> Result<IndexMap> {
        if outer.domain() != self.codomain {
            return Err(Error::InvalidArgument(format!(
                "cannot compose [{}]->[{}] with [{}]->[{}]",
                self.domain(),
                self.codomain,
                outer.domain(),
                outer.codomain
            )));
        }
        Ok(IndexMap {
            targets: self.targets.iter().map(|&t| outer.targets[t]).collect(),
            codomain: outer.codomain,
        })
    }

    /// All maps `[domain] -> [codomain]` in lexicographic order.
    pub fn all_maps(domain: usize, codomain: usize) -> Vec<IndexMap> {
        if codomain == 0 {
            return if domain == 0 {
                vec![IndexMap { targets: vec![], codomain }]
            } else {
                vec![]
            };
        }
        let mut out = Vec::new();
        let mut targets = vec![0usize; domain];
        loop {
            out.push(IndexMap { targets: targets.clone(), codomain });
            let mut pos = domain;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                targets[pos] += 1;
                if targets[pos] < codomain {
                    targets[pos + 1..].fill(0);
                    break;
                }
                targets[pos] = 0;
                if pos == 0 {
                    return out;
                }
            }
        }
    }

    /// All bijections `[n] -> [n]` in lexicographic order.
    pub fn permutations(n: usize) -> Vec<IndexMap> {
        IndexMap::all_maps(n, n)
            .into_iter()
            .filter(|m| {
                let mut seen = vec![false; n];
                m.targets.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
            })
            .collect()
    }

    /// The homomorphism `A^codomain -> A^domain` sending a tuple `a` to
    /// `(a[t_0], .., a[t_{n-1}])`.
    pub fn power_hom(&self, base: &FiniteAlgebra) -> Result<Hom> {
        self.power_hom_capped(base, DEFAULT_POWER_CAP)
    }

    pub fn power_hom_capped(&self, base: &FiniteAlgebra, cap: usize) -> Result<Hom> {
        let n = self.domain();
        let m = self.codomain();
        if n == 0 || m == 0 {
            return Err(Error::ArityTooSmall(
                "reindexing homomorphisms need positive arities".into(),
            ));
        }
        let source = power_capped(base, m, cap)?;
        let target = power_capped(base, n, cap)?;
        let s = base.size();
        let src_sizes = vec![s; m];
        let tgt_sizes = vec![s; n];
        let mut coords = Vec::with_capacity(m);
        let mut map = Vec::with_capacity(source.size());
        let mut out = vec![0usize; n];
        for e in 0..source.size() {
            mixed_radix_decode(e, &src_sizes, &mut coords);
            for (i, &t) in self.targets.iter().enumerate() {
                out[i] = coords[t];
            }
            map.push(mixed_radix_encode(&out, &tgt_sizes));
        }
        Ok(Hom { source, target, map })
    }
}

/// A homomorphism between finite algebras of the same signature, as a
/// total map on carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hom {
    source: FiniteAlgebra,
    target: FiniteAlgebra,
    map: Vec<usize>,
}

impl Hom {
    /// Checks the homomorphism property exhaustively.
    pub fn new(source: FiniteAlgebra, target: FiniteAlgebra, map: Vec<usize>) -> Result<Self> {
        let h = Hom { source, target, map };
        h.validate()?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(
        source: FiniteAlgebra,
        target: FiniteAlgebra,
        map: Vec<usize>,
    ) -> Self {
        let h = Hom { source, target, map };
        debug_assert!(h.validate().is_ok());
        h
    }

    pub fn validate(&self) -> Result<()> {
        if self.source.signature() != self.target.signature() {
            return Err(Error::SignatureMismatch(
                "homomorphism endpoints must share a signature".into(),
            ));
        }
        if self.map.len() != self.source.size() {
            return Err(Error::InvalidArgument(format!(
                "map has {} entries for a carrier of {}",
                self.map.len(),
                self.source.size()
            )));
        }
        if let Some(&bad) = self.map.iter().find(|&&v| v >= self.target.size()) {
            return Err(Error::InvalidArgument(format!(
                "image {bad} outside target carrier"
            )));
        }
        let s = self.source.size();
        for (op_idx, op) in self.source.signature().ops().iter().enumerate() {
            let k = op.arity;
            let mut args = vec![0usize; k];
            let mut mapped = vec![0usize; k];
            let table = self.source.op_table(op_idx);
            let mut flat = 0usize;
            loop {
                for (a, &x) in args.iter().enumerate() {
                    mapped[a] = self.map[x];
                }
                let lhs = self.map[table[flat]];
                let rhs = self.target.apply(op_idx, &mapped);
                if lhs != rhs {
                    return Err(Error::InvalidArgument(format!(
                        "not a homomorphism at `{}`{:?}",
                        op.name, args
                    )));
                }
                flat += 1;
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    args[pos] += 1;
                    if args[pos] < s {
                        break;
                    }
                    args[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if k == 0 || pos == usize::MAX {
                    break;
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &FiniteAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FiniteAlgebra {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Hom) -> Result<Hom> {
        if inner.target != self.source {
            return Err(Error::InvalidArgument(
                "composition endpoints do not match".into(),
            ));
        }
        Ok(Hom {
            source: inner.source.clone(),
            target: self.target.clone(),
            map: inner.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    pub fn is_constant(&self) -> bool {
        self.map.windows(2).all(|w| w[0] == w[1])
    }
}

const UNSET: u32 = u32::MAX;

struct OpInst {
    op: u32,
    args_start: u32,
    args_len: u32,
    result: u32,
}

/// Precomputed constraint network: one instance per operation application,
/// with incidence lists from each carrier element to the instances that
/// mention it as an argument.
struct HomSearch<'a> {
    source: &'a FiniteAlgebra,
    target: &'a FiniteAlgebra,
    insts: Vec<OpInst>,
    args: Vec<u32>,
    incidence: Vec<Vec<u32>>,
    preassign: Vec<(usize, usize)>,
    tsize: usize,
}

#[derive(Clone)]
struct SearchState {
    img: Vec<u32>,
    trail: Vec<u32>,
}

impl SearchState {
    fn fresh(n: usize) -> Self {
        SearchState { img: vec![UNSET; n], trail: Vec::new() }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().unwrap();
            self.img[x as usize] = UNSET;
        }
    }

    fn first_unassigned(&self, from: usize) -> Option<usize> {
        self.img[from..].iter().position(|&v| v == UNSET).map(|p| p + from)
    }
}

impl<'a> HomSearch<'a> {
    fn new(source: &'a FiniteAlgebra, target: &'a FiniteAlgebra) -> Self {
        let s = source.size();
        let mut insts = Vec::new();
        let mut args_buf: Vec<u32> = Vec::new();
        let mut incidence = vec![Vec::new(); s];
        let mut preassign = Vec::new();
        for (op_idx, op) in source.signature().ops().iter().enumerate() {
            let k = op.arity;
            let table = source.op_table(op_idx);
            if k == 0 {
                preassign.push((table[0], target.op_table(op_idx)[0]));
                continue;
            }
            let mut args = vec![0usize; k];
            for &result in table {
                let inst_id = insts.len() as u32;
                let args_start = args_buf.len() as u32;
                for &a in &args {
                    args_buf.push(a as u32);
                }
                insts.push(OpInst {
                    op: op_idx as u32,
                    args_start,
                    args_len: k as u32,
                    result: result as u32,
                });
                let mut prev = usize::MAX;
                let mut sorted = args.clone();
                sorted.sort_unstable();
                for &a in &sorted {
                    if a != prev {
                        incidence[a].push(inst_id);
                        prev = a;
                    }
                }
                // advance odometer, last argument fastest
                let mut pos = k;
                while pos > 0 {
                    pos -= 1;
                    args[pos] += 1;
                    if args[pos] < s {
                        break;
                    }
                    args[pos] = 0;
                }
            }
        }
        HomSearch {
            source,
            target,
            insts,
            args: args_buf,
            incidence,
            preassign,
            tsize: target.size(),
        }
    }

    /// Assigns `img[x] = v` and propagates through every operation instance
    /// whose arguments become fully assigned, forcing results. Returns
    /// false on conflict; the trail records everything set.
    fn try_assign(&self, st: &mut SearchState, x: usize, v: u32) -> bool {
        match st.img[x] {
            w if w == UNSET => {
                st.img[x] = v;
                st.trail.push(x as u32);
            }
            w => return w == v,
        }
        let mut queue = vec![x];
        while let Some(y) = queue.pop() {
            for &inst_id in &self.incidence[y] {
                let inst = &self.insts[inst_id as usize];
                let lo = inst.args_start as usize;
                let hi = lo + inst.args_len as usize;
                let mut idx = 0usize;
                let mut full = true;
                for &a in &self.args[lo..hi] {
                    let w = st.img[a as usize];
                    if w == UNSET {
                        full = false;
                        break;
                    }
                    idx = idx * self.tsize + w as usize;
                }
                if !full {
                    continue;
                }
                let want = self.target.op_table(inst.op as usize)[idx] as u32;
                let r = inst.result as usize;
                match st.img[r] {
                    w if w == UNSET => {
                        st.img[r] = want;
                        st.trail.push(r as u32);
                        queue.push(r);
                    }
                    w => {
                        if w != want {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn dfs(
        &self,
        st: &mut SearchState,
        from: usize,
        limit: usize,
        found: &AtomicUsize,
        out: &mut Vec<Hom>,
    ) -> Result<()> {
        let x = match st.first_unassigned(from) {
            None => {
                if found.fetch_add(1, Ordering::Relaxed) + 1 > limit {
                    return Err(Error::LimitExceeded { limit });
                }
                out.push(Hom::new_unchecked(
                    self.source.clone(),
                    self.target.clone(),
                    st.img.iter().map(|&v| v as usize).collect(),
                ));
                return Ok(());
            }
            Some(x) => x,
        };
        for v in 0..self.tsize as u32 {
            let mark = st.trail.len();
            if self.try_assign(st, x, v) {
                self.dfs(st, x + 1, limit, found, out)?;
            }
            st.undo_to(mark);
        }
        Ok(())
    }
}

/// Enumerates all homomorphisms `source -> target`, sorted lexicographically
/// by map table. Deterministic regardless of the search mode.
pub fn enumerate_homs(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    limit: usize,
) -> Result<Vec<Hom>> {
    enumerate_homs_with(source, target, limit, SearchMode::default())
}

pub fn enumerate_homs_with(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    limit: usize,
    mode: SearchMode,
) -> Result<Vec<Hom>> {
    if source.signature() != target.signature() {
        return Err(Error::SignatureMismatch(
            "homomorphism endpoints must share a signature".into(),
        ));
    }
    let search = HomSearch::new(source, target);
    let mut root = SearchState::fresh(source.size());
    for &(x, v) in &search.preassign {
        if !search.try_assign(&mut root, x, v as u32) {
            return Ok(Vec::new());
        }
    }
    let found = AtomicUsize::new(0);
    let x0 = match root.first_unassigned(0) {
        None => {
            let mut out = Vec::new();
            let mut st = root;
            // Re-run the leaf handling for the fully forced assignment.
            search.dfs(&mut st, source.size(), limit, &found, &mut out)?;
            return Ok(out);
        }
        Some(x) => x,
    };
    let branches: Vec<u32> = (0..search.tsize as u32).collect();
    let results = map_branches(mode, branches, |v| {
        let mut st = root.clone();
        if !search.try_assign(&mut st, x0, v) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        search.dfs(&mut st, x0 + 1, limit, &found, &mut out)?;
        Ok(out)
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    /// Brute-force oracle: filter all maps by the homomorphism property.
    fn brute_force_homs(source: &FiniteAlgebra, target: &FiniteAlgebra) -> Vec<Vec<usize>> {
        let s = source.size();
        let t = target.size();
        let total = t.checked_pow(s as u32).expect("oracle domain too large");
        let mut out = Vec::new();
        for code in 0..total {
            let mut map = Vec::with_capacity(s);
            let mut c = code;
            for _ in 0..s {
                map.push(c % t);
                c /= t;
            }
            if Hom::new(source.clone(), target.clone(), map.clone()).is_ok() {
                out.push(map);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn validates_boolean_algebra() {
        let b = builtins::boolean_algebra();
        assert_eq!(b.size(), 2);
        assert_eq!(b.apply(b.signature().op_index("and").unwrap(), &[1, 1]), 1);
        assert_eq!(b.apply(b.signature().op_index("not").unwrap(), &[0]), 1);
    }

    #[test]
    fn rejects_malformed_tables() {
        let sig = Signature::new(vec![("op", 2)]).unwrap();
        let err = FiniteAlgebra::new(2, sig, vec![vec![0, 0, 0]]).unwrap_err();
        assert!(matches!(err, Error::MalformedTable { .. }));
        let sig = Signature::new(vec![("op", 1)]).unwrap();
        let err = FiniteAlgebra::new(2, sig, vec![vec![0, 2]]).unwrap_err();
        assert!(matches!(err, Error::MalformedTable { .. }));
    }

    #[test]
    fn lukasiewicz_two_matches_direct_construction() {
        // x ⊕ y = min(1, x + y), x ⊙ y = max(0, x + y − 1), ¬x = 1 − x on
        // {0, 1/2, 1} encoded as {0, 1, 2} in halves.
        let l2 = builtins::lukasiewicz(2);
        assert_eq!(l2.size(), 3);
        let oplus = l2.signature().op_index("oplus").unwrap();
        let otimes = l2.signature().op_index("otimes").unwrap();
        let neg = l2.signature().op_index("neg").unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(l2.apply(oplus, &[x, y]), (x + y).min(2));
                assert_eq!(l2.apply(otimes, &[x, y]), (x + y).saturating_sub(2));
            }
            assert_eq!(l2.apply(neg, &[x]), 2 - x);
        }
    }

    #[test]
    fn product_of_two_boolean_algebras() {
        let b = builtins::boolean_algebra();
        let p = product(&[b.clone(), b.clone()]).unwrap();
        assert_eq!(p.size(), 4);
        assert_eq!(p.provenance(), Some(&[2, 2][..]));
        let and = p.signature().op_index("and").unwrap();
        // (1,0) ∧ (1,1) = (1,0): encodings 1, 3, 1.
        assert_eq!(p.apply(and, &[1, 3]), 1);
        let or = p.signature().op_index("or").unwrap();
        assert_eq!(p.apply(or, &[1, 2]), 3);
    }

    #[test]
    fn unary_product_is_the_same_algebra() {
        let b = builtins::boolean_algebra();
        let p = product(&[b.clone()]).unwrap();
        assert_eq!(p, b);
    }

    #[test]
    fn product_rejects_mixed_signatures() {
        let b = builtins::boolean_algebra();
        let d = builtins::distributive_lattice();
        assert!(matches!(
            product(&[b, d]),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn mv_product_size() {
        // Ł_m has m + 1 elements, so Ł_2 × Ł_4 × Ł_4 × Ł_6 has 3·5·5·7 = 525.
        let a = builtins::mv_chain_product(&[2, 4, 4, 6]).unwrap();
        assert_eq!(a.size(), 525);
    }

    #[test]
    fn power_equals_iterated_product() {
        let b = builtins::boolean_algebra();
        let p2 = power(&b, 2).unwrap();
        assert_eq!(p2, product(&[b.clone(), b.clone()]).unwrap());
        let p4 = power(&p2, 2).unwrap();
        assert_eq!(p4.size(), 16);
        assert!(matches!(power(&b, 13), Err(Error::SizeOverflow(_))));
        assert!(power_capped(&b, 13, 10_000).is_ok());
    }

    #[test]
    fn reindexing_homs() {
        let b = builtins::boolean_algebra();
        let id = IndexMap::identity(2).power_hom(&b).unwrap();
        assert_eq!(id.map(), (0..4).collect::<Vec<_>>());

        // Diagonal a -> (a, a).
        let diag = IndexMap::new(vec![0, 0], 1).unwrap().power_hom(&b).unwrap();
        assert_eq!(diag.map(), &[0, 3]);

        // delta_{0,2} on three positions: (a, b) -> (a, b, a).
        let delta = IndexMap::identification(3, 0, 2).unwrap();
        assert_eq!(delta.targets(), &[0, 1, 0]);
        let h = delta.power_hom(&b).unwrap();
        // (a,b) at index a + 2b maps to (a,b,a) at a + 2b + 4a.
        for a in 0..2 {
            for bb in 0..2 {
                assert_eq!(h.apply(a + 2 * bb), a + 2 * bb + 4 * a);
            }
        }
    }

    #[test]
    fn reindexing_composes_contravariantly() {
        let base = builtins::distributive_lattice();
        for n in 1..=3usize {
            for m in 1..=3usize {
                for k in 1..=3usize {
                    for tau in IndexMap::all_maps(n, m) {
                        for sigma in IndexMap::all_maps(m, k) {
                            let lhs = tau.then(&sigma).unwrap().power_hom(&base).unwrap();
                            let rhs = tau
                                .power_hom(&base)
                                .unwrap()
                                .compose(&sigma.power_hom(&base).unwrap())
                                .unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumerates_boolean_endomorphisms() {
        let b = builtins::boolean_algebra();
        let homs = enumerate_homs(&b, &b, 100).unwrap();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].map(), &[0, 1]);
    }

    #[test]
    fn enumerates_projections_from_the_square() {
        let b = builtins::boolean_algebra();
        let sq = power(&b, 2).unwrap();
        let homs = enumerate_homs(&sq, &b, 100).unwrap();
        assert_eq!(homs.len(), 2);
        // The two projections on the mixed-radix encoding.
        assert_eq!(homs[0].map(), &[0, 0, 1, 1]); // second coordinate
        assert_eq!(homs[1].map(), &[0, 1, 0, 1]); // first coordinate
    }

    #[test]
    fn no_homs_from_l4_to_l2() {
        let l4 = builtins::lukasiewicz(4);
        let l2 = builtins::lukasiewicz(2);
        assert!(enumerate_homs(&l4, &l2, 100).unwrap().is_empty());
    }

    #[test]
    fn matches_brute_force_on_small_algebras() {
        let cases = [
            (builtins::boolean_algebra(), builtins::boolean_algebra()),
            (
                power(&builtins::distributive_lattice(), 2).unwrap(),
                builtins::distributive_lattice(),
            ),
            (builtins::lukasiewicz(2), builtins::lukasiewicz(4)),
            (builtins::median_algebra(), builtins::median_algebra()),
            (builtins::fig1_lattice(), builtins::distributive_lattice()),
        ];
        for (src, tgt) in cases {
            let fast: Vec<Vec<usize>> = enumerate_homs(&src, &tgt, 1_000_000)
                .unwrap()
                .iter()
                .map(|h| h.map().to_vec())
                .collect();
            let slow = brute_force_homs(&src, &tgt);
            assert_eq!(fast, slow, "{} -> {}", src.size(), tgt.size());
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let l = builtins::fig1_lattice();
        let sq = power(&l, 2).unwrap();
        let seq = enumerate_homs_with(&sq, &l, 1_000_000, SearchMode::Sequential).unwrap();
        let par = enumerate_homs_with(&sq, &l, 1_000_000, SearchMode::Parallel).unwrap();
        assert_eq!(seq, par);
        assert!(seq.windows(2).all(|w| w[0].map() < w[1].map()), "sorted");
    }

    #[test]
    fn limit_is_enforced() {
        let d = builtins::distributive_lattice();
        let sq = power(&d, 2).unwrap();
        let err = enumerate_homs(&sq, &d, 3).unwrap_err();
        assert!(matches!(err, Error::LimitExceeded { limit: 3 }));
    }

    #[test]
    fn minors_of_homs_are_homs() {
        let a = builtins::distributive_lattice();
        let b = power(&a, 2).unwrap();
        for n in 1..=2usize {
            let pw = power(&a, n).unwrap();
            let homs = enumerate_homs(&pw, &b, 10_000).unwrap();
            for m in 1..=2usize {
                let all = enumerate_homs(&power(&a, m).unwrap(), &b, 10_000).unwrap();
                for tau in IndexMap::all_maps(n, m) {
                    let tau_hom = tau.power_hom(&a).unwrap();
                    for f in &homs {
                        let g = f.compose(&tau_hom).unwrap();
                        assert!(all.iter().any(|h| h.map() == g.map()));
                    }
                }
            }
        }
    }
}
