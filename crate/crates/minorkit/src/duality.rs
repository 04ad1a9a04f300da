//! Natural duals. An alter ego places discrete structure (constants, unary
//! and partial operations, relations) on the carrier of a generating
//! algebra `M`; the dual of an algebra `A` is the set of homomorphisms
//! `A -> M` with that structure induced pointwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{
    enumerate_homs, mixed_radix_decode, power, FiniteAlgebra, Hom,
};
use crate::builtins;
use crate::dualspace::{copower, copower_point_at, enumerate_morphisms, CopowerPoint, DualMorphism};
use crate::{Error, Result};

/// A named constant: a distinguished point together with the carrier value
/// of `M` it came from. Copowers amalgamate constants by value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constant {
    pub value: usize,
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryOp {
    pub name: String,
    pub table: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOp {
    pub name: String,
    pub table: Vec<Option<usize>>,
}

impl PartialOp {
    pub fn domain(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x].is_some()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
    }
}

/// A finite structured set: the shape shared by alter egos, duals of
/// algebras, copowers and their substructures.
#[derive(Clone, Debug)]
pub struct DualSpace {
    size: usize,
    constants: Vec<Constant>,
    unary_ops: Vec<UnaryOp>,
    partial_ops: Vec<PartialOp>,
    relations: Vec<Relation>,
    point_labels: Option<Vec<Hom>>,
    const_of: Vec<Option<usize>>,
}

impl PartialEq for DualSpace {
    fn eq(&self, other: &Self) -> bool {
        // Labels are provenance, not structure.
        self.size == other.size
            && self.constants == other.constants
            && self.unary_ops == other.unary_ops
            && self.partial_ops == other.partial_ops
            && self.relations == other.relations
    }
}

impl Eq for DualSpace {}

impl DualSpace {
    pub fn new(
        size: usize,
        mut constants: Vec<Constant>,
        unary_ops: Vec<UnaryOp>,
        partial_ops: Vec<PartialOp>,
        mut relations: Vec<Relation>,
    ) -> Result<Self> {
        constants.sort_by_key(|c| c.value);
        let mut const_of = vec![None; size];
        for w in constants.windows(2) {
            if w[0].value == w[1].value {
                return Err(Error::InvalidStructure(format!(
                    "duplicate constant value {}",
                    w[0].value
                )));
            }
        }
        for c in &constants {
            if c.point >= size {
                return Err(Error::InvalidStructure(format!(
                    "constant point {} outside carrier",
                    c.point
                )));
            }
            if const_of[c.point].is_some() {
                return Err(Error::InvalidStructure(format!(
                    "point {} carries two constants",
                    c.point
                )));
            }
            const_of[c.point] = Some(c.value);
        }
        for op in &unary_ops {
            if op.table.len() != size || op.table.iter().any(|&v| v >= size) {
                return Err(Error::InvalidStructure(format!(
                    "unary `{}` is not a total table on the carrier",
                    op.name
                )));
            }
            // Constants are permuted among themselves; direct unions
            // amalgamate by value, so images of constants must be constants.
            for c in &constants {
                if const_of[op.table[c.point]].is_none() {
                    return Err(Error::InvalidStructure(format!(
                        "unary `{}` moves constant {} off the constant set",
                        op.name, c.value
                    )));
                }
            }
        }
        for op in &partial_ops {
            if op.table.len() != size
                || op.table.iter().flatten().any(|&v| v >= size)
            {
                return Err(Error::InvalidStructure(format!(
                    "partial `{}` is not a table on the carrier",
                    op.name
                )));
            }
            if op.table.iter().all(|v| v.is_none()) {
                return Err(Error::InvalidStructure(format!(
                    "partial `{}` has empty domain",
                    op.name
                )));
            }
            for c in &constants {
                if let Some(img) = op.table[c.point] {
                    if const_of[img].is_none() {
                        return Err(Error::InvalidStructure(format!(
                            "partial `{}` moves constant {} off the constant set",
                            op.name, c.value
                        )));
                    }
                }
            }
        }
        for rel in &mut relations {
            if rel.arity == 0 {
                return Err(Error::InvalidStructure(format!(
                    "relation `{}` has arity 0",
                    rel.name
                )));
            }
            for t in &rel.tuples {
                if t.len() != rel.arity || t.iter().any(|&v| v >= size) {
                    return Err(Error::InvalidStructure(format!(
                        "relation `{}` has a malformed tuple",
                        rel.name
                    )));
                }
            }
            rel.tuples.sort();
            rel.tuples.dedup();
        }
        let mut names: Vec<&str> = unary_ops.iter().map(|o| o.name.as_str()).collect();
        names.extend(partial_ops.iter().map(|o| o.name.as_str()));
        names.extend(relations.iter().map(|r| r.name.as_str()));
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidStructure("duplicate structure name".into()));
        }
        Ok(DualSpace {
            size,
            constants,
            unary_ops,
            partial_ops,
            relations,
            point_labels: None,
            const_of,
        })
    }

    pub fn with_labels(mut self, labels: Vec<Hom>) -> Self {
        assert_eq!(labels.len(), self.size);
        self.point_labels = Some(labels);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn constants(&self) -> &[Constant] {
        &self.constants
    }

    pub fn unary_ops(&self) -> &[UnaryOp] {
        &self.unary_ops
    }

    pub fn partial_ops(&self) -> &[PartialOp] {
        &self.partial_ops
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn labels(&self) -> Option<&[Hom]> {
        self.point_labels.as_deref()
    }

    /// The constant value carried by a point, if any.
    pub fn constant_value(&self, point: usize) -> Option<usize> {
        self.const_of[point]
    }

    pub fn constant_point(&self, value: usize) -> Option<usize> {
        self.constants
            .binary_search_by_key(&value, |c| c.value)
            .ok()
            .map(|i| self.constants[i].point)
    }

    /// The non-constant points, ascending.
    pub fn non_constant_points(&self) -> Vec<usize> {
        (0..self.size).filter(|&p| self.const_of[p].is_none()).collect()
    }

    /// Carrier size minus the number of constants.
    pub fn flat_size(&self) -> usize {
        self.size - self.constants.len()
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn unary(&self, name: &str) -> Option<&UnaryOp> {
        self.unary_ops.iter().find(|o| o.name == name)
    }

    pub fn partial(&self, name: &str) -> Option<&PartialOp> {
        self.partial_ops.iter().find(|o| o.name == name)
    }
}

/// A structure-preserving map between dual spaces, given by a total table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMorphismFlat {
    pub source: Arc<DualSpace>,
    pub target: Arc<DualSpace>,
    pub map: Vec<usize>,
}

impl DualMorphismFlat {
    pub fn new(source: Arc<DualSpace>, target: Arc<DualSpace>, map: Vec<usize>) -> Result<Self> {
        validate_flat(&source, &target, &map)?;
        Ok(DualMorphismFlat { source, target, map })
    }

    pub(crate) fn new_unchecked(
        source: Arc<DualSpace>,
        target: Arc<DualSpace>,
        map: Vec<usize>,
    ) -> Self {
        debug_assert!(validate_flat(&source, &target, &map).is_ok());
        DualMorphismFlat { source, target, map }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// True when the image meets a non-constant point of the target.
    pub fn meets_flat(&self) -> bool {
        self.map.iter().any(|&v| self.target.constant_value(v).is_none())
    }
}

/// Checks constant, relation, unary and partial-operation preservation.
pub fn validate_flat(source: &DualSpace, target: &DualSpace, map: &[usize]) -> Result<()> {
    if map.len() != source.size() || map.iter().any(|&v| v >= target.size()) {
        return Err(Error::InvalidStructure("map is not a total table".into()));
    }
    for c in source.constants() {
        let t = target
            .constant_point(c.value)
            .ok_or_else(|| Error::InvalidStructure(format!("target lacks constant {}", c.value)))?;
        if map[c.point] != t {
            return Err(Error::InvalidStructure(format!(
                "constant {} not preserved",
                c.value
            )));
        }
    }
    for op in source.unary_ops() {
        let t = target
            .unary(&op.name)
            .ok_or_else(|| Error::InvalidStructure(format!("target lacks unary `{}`", op.name)))?;
        for x in 0..source.size() {
            if map[op.table[x]] != t.table[map[x]] {
                return Err(Error::InvalidStructure(format!(
                    "unary `{}` not preserved at {x}",
                    op.name
                )));
            }
        }
    }
    for op in source.partial_ops() {
        let t = target.partial(&op.name).ok_or_else(|| {
            Error::InvalidStructure(format!("target lacks partial `{}`", op.name))
        })?;
        for x in 0..source.size() {
            if let Some(hx) = op.table[x] {
                match t.table[map[x]] {
                    Some(thx) if thx == map[hx] => {}
                    _ => {
                        return Err(Error::InvalidStructure(format!(
                            "partial `{}` not preserved at {x}",
                            op.name
                        )))
                    }
                }
            }
        }
    }
    let mut image = Vec::new();
    for rel in source.relations() {
        let t = target.relation(&rel.name).ok_or_else(|| {
            Error::InvalidStructure(format!("target lacks relation `{}`", rel.name))
        })?;
        for tuple in &rel.tuples {
            image.clear();
            image.extend(tuple.iter().map(|&x| map[x]));
            if !t.contains(&image) {
                return Err(Error::InvalidStructure(format!(
                    "relation `{}` not preserved at {:?}",
                    rel.name, tuple
                )));
            }
        }
    }
    Ok(())
}

/// An alter ego: discrete structure on the carrier of a finite algebra `M`.
/// Constants must be one-element subalgebras; relations and the graphs of
/// (partial) operations must be subalgebras of the corresponding powers;
/// no non-constant (partial) operation may be constant-valued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlterEgo {
    base: FiniteAlgebra,
    constants: Vec<usize>,
    unary_ops: Vec<UnaryOp>,
    partial_ops: Vec<PartialOp>,
    relations: Vec<Relation>,
}

impl AlterEgo {
    pub fn new(
        base: FiniteAlgebra,
        mut constants: Vec<usize>,
        unary_ops: Vec<UnaryOp>,
        partial_ops: Vec<PartialOp>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        let m = base.size();
        constants.sort_unstable();
        constants.dedup();
        for &c in &constants {
            if c >= m {
                return Err(Error::InvalidAlterEgo(format!("constant {c} outside carrier")));
            }
            for (op_idx, op) in base.signature().ops().iter().enumerate() {
                let args = vec![c; op.arity];
                if base.apply(op_idx, &args) != c {
                    return Err(Error::InvalidAlterEgo(format!(
                        "{{{c}}} is not a one-element subalgebra (fails `{}`)",
                        op.name
                    )));
                }
            }
        }
        for op in &unary_ops {
            if op.table.len() != m || op.table.iter().any(|&v| v >= m) {
                return Err(Error::InvalidAlterEgo(format!("unary `{}` malformed", op.name)));
            }
            if !is_endomorphism(&base, |x| Some(op.table[x]), &(0..m).collect::<Vec<_>>()) {
                return Err(Error::InvalidAlterEgo(format!(
                    "graph of unary `{}` is not algebraic",
                    op.name
                )));
            }
            if m > 1 && op.table.iter().all(|&v| v == op.table[0]) {
                return Err(Error::InvalidAlterEgo(format!(
                    "unary `{}` is constant-valued",
                    op.name
                )));
            }
            for &c in &constants {
                if constants.binary_search(&op.table[c]).is_err() {
                    return Err(Error::InvalidAlterEgo(format!(
                        "unary `{}` moves constant {c} off the constant set",
                        op.name
                    )));
                }
            }
        }
        for op in &partial_ops {
            if op.table.len() != m || op.table.iter().flatten().any(|&v| v >= m) {
                return Err(Error::InvalidAlterEgo(format!("partial `{}` malformed", op.name)));
            }
            let dom = op.domain();
            if dom.is_empty() {
                return Err(Error::InvalidAlterEgo(format!(
                    "partial `{}` has empty domain",
                    op.name
                )));
            }
            if !is_endomorphism(&base, |x| op.table[x], &dom) {
                return Err(Error::InvalidAlterEgo(format!(
                    "graph of partial `{}` is not algebraic",
                    op.name
                )));
            }
            if m > 1 {
                let vals: Vec<usize> = dom.iter().map(|&x| op.table[x].unwrap()).collect();
                if vals.iter().all(|&v| v == vals[0]) {
                    return Err(Error::InvalidAlterEgo(format!(
                        "partial `{}` is constant-valued",
                        op.name
                    )));
                }
            }
            for &c in &constants {
                if let Some(img) = op.table[c] {
                    if constants.binary_search(&img).is_err() {
                        return Err(Error::InvalidAlterEgo(format!(
                            "partial `{}` moves constant {c} off the constant set",
                            op.name
                        )));
                    }
                }
            }
        }
        for rel in &relations {
            if rel.arity == 0 || rel.tuples.is_empty() {
                return Err(Error::InvalidAlterEgo(format!(
                    "relation `{}` must be nonempty of positive arity",
                    rel.name
                )));
            }
            for t in &rel.tuples {
                if t.len() != rel.arity || t.iter().any(|&v| v >= m) {
                    return Err(Error::InvalidAlterEgo(format!(
                        "relation `{}` has a malformed tuple",
                        rel.name
                    )));
                }
            }
            if !is_subalgebra_of_power(&base, rel.arity, &rel.tuples) {
                return Err(Error::InvalidAlterEgo(format!(
                    "relation `{}` is not algebraic",
                    rel.name
                )));
            }
        }
        let mut relations = relations;
        for rel in &mut relations {
            rel.tuples.sort();
            rel.tuples.dedup();
        }
        Ok(AlterEgo { base, constants, unary_ops, partial_ops, relations })
    }

    /// Stone-type ego on the two-element Boolean algebra: no structure.
    pub fn boolean() -> Self {
        AlterEgo::new(builtins::boolean_algebra(), vec![], vec![], vec![], vec![]).unwrap()
    }

    /// Priestley-type ego on the two-element lattice: constants 0, 1 and
    /// the order relation.
    pub fn distributive_lattice() -> Self {
        AlterEgo::new(
            builtins::distributive_lattice(),
            vec![0, 1],
            vec![],
            vec![],
            vec![le_relation()],
        )
        .unwrap()
    }

    /// Median ego: constants 0, 1, the order, and the swap involution.
    pub fn median() -> Self {
        AlterEgo::new(
            builtins::median_algebra(),
            vec![0, 1],
            vec![UnaryOp { name: "comp".into(), table: vec![1, 0] }],
            vec![],
            vec![le_relation()],
        )
        .unwrap()
    }

    /// Ego on the Łukasiewicz chain `Ł_m`: one unary relation per divisor
    /// `d` of `m`, holding the carrier of the subchain `Ł_d`.
    pub fn mv(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("mv ego needs m >= 1".into()));
        }
        let mut relations = Vec::new();
        for d in 1..=m {
            if m % d != 0 {
                continue;
            }
            let step = m / d;
            let tuples = (0..=d).map(|i| vec![i * step]).collect();
            relations.push(Relation { name: format!("r_{d}"), arity: 1, tuples });
        }
        AlterEgo::new(builtins::lukasiewicz(m), vec![], vec![], vec![], relations)
    }

    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn constants(&self) -> &[usize] {
        &self.constants
    }

    pub fn unary_ops(&self) -> &[UnaryOp] {
        &self.unary_ops
    }

    pub fn partial_ops(&self) -> &[PartialOp] {
        &self.partial_ops
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// The ego's carrier as a dual space (the dualizing object itself).
    pub fn as_dual_space(&self) -> DualSpace {
        DualSpace::new(
            self.base.size(),
            self.constants.iter().map(|&c| Constant { value: c, point: c }).collect(),
            self.unary_ops.clone(),
            self.partial_ops.clone(),
            self.relations.clone(),
        )
        .expect("validated ego structure")
    }

    /// Finite check that every relation of arity >= 2 avoids binary
    /// products of nontrivial subalgebras. Returns one diagnostic per
    /// failing projection; an empty result is a necessary condition for
    /// the ego to yield amalgamated (direct-union) coproducts.
    pub fn binary_product_warnings(&self) -> Vec<String> {
        let subs = nontrivial_subalgebras(&self.base);
        let mut out = Vec::new();
        for rel in &self.relations {
            if rel.arity < 2 {
                continue;
            }
            for i in 0..rel.arity {
                for j in i + 1..rel.arity {
                    let pairs: Vec<(usize, usize)> =
                        rel.tuples.iter().map(|t| (t[i], t[j])).collect();
                    for s1 in &subs {
                        for s2 in &subs {
                            let covered = s1
                                .iter()
                                .all(|&a| s2.iter().all(|&b| pairs.contains(&(a, b))));
                            if covered {
                                out.push(format!(
                                    "relation `{}` contains {:?} x {:?} at coordinates ({i}, {j})",
                                    rel.name, s1, s2
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn le_relation() -> Relation {
    Relation {
        name: "le".into(),
        arity: 2,
        tuples: vec![vec![0, 0], vec![0, 1], vec![1, 1]],
    }
}

fn is_endomorphism(
    base: &FiniteAlgebra,
    f: impl Fn(usize) -> Option<usize>,
    domain: &[usize],
) -> bool {
    // The graph of f (restricted to `domain`) is a subalgebra of base^2
    // iff the domain is closed under every operation and f commutes with it.
    let in_dom = |x: usize| f(x).is_some();
    for (op_idx, op) in base.signature().ops().iter().enumerate() {
        let k = op.arity;
        let mut idxs = vec![0usize; k];
        loop {
            let args: Vec<usize> = idxs.iter().map(|&i| domain[i]).collect();
            let result = base.apply(op_idx, &args);
            if !in_dom(result) {
                return false;
            }
            let mapped: Vec<usize> = args.iter().map(|&a| f(a).unwrap()).collect();
            if f(result).unwrap() != base.apply(op_idx, &mapped) {
                return false;
            }
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                idxs[pos] += 1;
                if idxs[pos] < domain.len() {
                    break;
                }
                idxs[pos] = 0;
            }
            if k == 0 || (pos == 0 && idxs[0] == 0) {
                break;
            }
        }
    }
    true
}

fn is_subalgebra_of_power(base: &FiniteAlgebra, arity: usize, tuples: &[Vec<usize>]) -> bool {
    for (op_idx, op) in base.signature().ops().iter().enumerate() {
        let k = op.arity;
        if k == 0 {
            let c = base.apply(op_idx, &[]);
            let diag = vec![c; arity];
            if !tuples.contains(&diag) {
                return false;
            }
            continue;
        }
        let mut idxs = vec![0usize; k];
        loop {
            let mut out = Vec::with_capacity(arity);
            for coord in 0..arity {
                let args: Vec<usize> = idxs.iter().map(|&i| tuples[i][coord]).collect();
                out.push(base.apply(op_idx, &args));
            }
            if !tuples.contains(&out) {
                return false;
            }
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                idxs[pos] += 1;
                if idxs[pos] < tuples.len() {
                    break;
                }
                idxs[pos] = 0;
            }
            if pos == 0 && idxs[0] == 0 {
                break;
            }
        }
    }
    true
}

fn nontrivial_subalgebras(base: &FiniteAlgebra) -> Vec<Vec<usize>> {
    let m = base.size();
    assert!(m <= 16, "subalgebra enumeration supported for carriers up to 16");
    let mut out = Vec::new();
    'subset: for mask in 1u32..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|&x| mask & (1 << x) != 0).collect();
        if subset.len() < 2 {
            continue;
        }
        for (op_idx, op) in base.signature().ops().iter().enumerate() {
            let k = op.arity;
            if k == 0 {
                if !subset.contains(&base.apply(op_idx, &[])) {
                    continue 'subset;
                }
                continue;
            }
            let mut idxs = vec![0usize; k];
            loop {
                let args: Vec<usize> = idxs.iter().map(|&i| subset[i]).collect();
                if !subset.contains(&base.apply(op_idx, &args)) {
                    continue 'subset;
                }
                let mut pos = k;
                while pos > 0 {
                    pos -= 1;
                    idxs[pos] += 1;
                    if idxs[pos] < subset.len() {
                        break;
                    }
                    idxs[pos] = 0;
                }
                if pos == 0 && idxs[0] == 0 {
                    break;
                }
            }
        }
        out.push(subset);
    }
    out
}

/// The natural dual of `algebra` under `ego`: the sorted homomorphism set
/// `Hom(algebra, M)` with constants, operations and relations induced
/// pointwise.
pub fn dualize(algebra: &FiniteAlgebra, ego: &AlterEgo, limit: usize) -> Result<DualSpace> {
    if algebra.signature() != ego.base().signature() {
        return Err(Error::SignatureMismatch(
            "algebra and ego base must share a signature".into(),
        ));
    }
    let homs = enumerate_homs(algebra, ego.base(), limit)?;
    let find = |table: &[usize]| -> Option<usize> {
        homs.binary_search_by(|h| h.map().cmp(table)).ok()
    };

    let mut constants = Vec::new();
    for &c in ego.constants() {
        let table = vec![c; algebra.size()];
        let point = find(&table).expect("constant map is a homomorphism");
        constants.push(Constant { value: c, point });
    }

    let mut unary_ops = Vec::new();
    for g in ego.unary_ops() {
        let mut table = Vec::with_capacity(homs.len());
        for u in &homs {
            let composed: Vec<usize> = u.map().iter().map(|&v| g.table[v]).collect();
            table.push(find(&composed).expect("pointwise image of a homomorphism"));
        }
        unary_ops.push(UnaryOp { name: g.name.clone(), table });
    }

    let mut partial_ops = Vec::new();
    for h in ego.partial_ops() {
        let mut table = Vec::with_capacity(homs.len());
        for u in &homs {
            if u.map().iter().all(|&v| h.table[v].is_some()) {
                let composed: Vec<usize> = u.map().iter().map(|&v| h.table[v].unwrap()).collect();
                table.push(Some(find(&composed).expect("pointwise image of a homomorphism")));
            } else {
                table.push(None);
            }
        }
        partial_ops.push(PartialOp { name: h.name.clone(), table });
    }

    let mut relations = Vec::new();
    for r in ego.relations() {
        let k = r.arity;
        let mut tuples = Vec::new();
        let mut idxs = vec![0usize; k];
        if !homs.is_empty() {
            loop {
                let ok = (0..algebra.size()).all(|a| {
                    let values: Vec<usize> = idxs.iter().map(|&i| homs[i].map()[a]).collect();
                    r.contains(&values)
                });
                if ok {
                    tuples.push(idxs.clone());
                }
                let mut pos = k;
                while pos > 0 {
                    pos -= 1;
                    idxs[pos] += 1;
                    if idxs[pos] < homs.len() {
                        break;
                    }
                    idxs[pos] = 0;
                }
                if pos == 0 && idxs[0] == 0 {
                    break;
                }
            }
        }
        relations.push(Relation { name: r.name.clone(), arity: k, tuples });
    }

    Ok(DualSpace::new(homs.len(), constants, unary_ops, partial_ops, relations)?
        .with_labels(homs))
}

/// The dual of a finite distributive lattice built from its join-irreducible
/// elements, with fresh bottom/top constants. Irreducibles are ordered the
/// way their principal-filter characteristic maps compare pointwise, so the
/// result is structure-isomorphic to `dualize(l, AlterEgo::distributive_lattice())`.
pub fn birkhoff_dual(l: &FiniteAlgebra) -> Result<DualSpace> {
    if l.signature() != &builtins::dl_signature() {
        return Err(Error::SignatureMismatch(
            "expected the meet/join lattice signature".into(),
        ));
    }
    let n = l.size();
    let meet = l.signature().op_index("meet").unwrap();
    let join = l.signature().op_index("join").unwrap();
    let ck = |name: &str, ok: bool| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::NotDistributiveLattice(name.into()))
        }
    };
    for x in 0..n {
        for y in 0..n {
            ck("meet not commutative", l.apply(meet, &[x, y]) == l.apply(meet, &[y, x]))?;
            ck("join not commutative", l.apply(join, &[x, y]) == l.apply(join, &[y, x]))?;
            ck(
                "absorption fails",
                l.apply(meet, &[x, l.apply(join, &[x, y])]) == x
                    && l.apply(join, &[x, l.apply(meet, &[x, y])]) == x,
            )?;
            for z in 0..n {
                ck(
                    "meet not associative",
                    l.apply(meet, &[x, l.apply(meet, &[y, z])])
                        == l.apply(meet, &[l.apply(meet, &[x, y]), z]),
                )?;
                ck(
                    "join not associative",
                    l.apply(join, &[x, l.apply(join, &[y, z])])
                        == l.apply(join, &[l.apply(join, &[x, y]), z]),
                )?;
                ck(
                    "distributivity fails",
                    l.apply(meet, &[x, l.apply(join, &[y, z])])
                        == l.apply(join, &[l.apply(meet, &[x, y]), l.apply(meet, &[x, z])]),
                )?;
            }
        }
    }
    let le = |x: usize, y: usize| l.apply(meet, &[x, y]) == x;
    let irreducibles: Vec<usize> = (0..n)
        .filter(|&j| {
            let lower_covers = (0..n)
                .filter(|&x| {
                    x != j && le(x, j) && !(0..n).any(|z| z != x && z != j && le(x, z) && le(z, j))
                })
                .count();
            lower_covers == 1
        })
        .collect();
    let t = irreducibles.len();
    let size = t + 2;
    let bottom = t;
    let top = t + 1;
    // Point order is the reverse of the lattice order on irreducibles.
    let point_le = |p: usize, q: usize| -> bool {
        if p == q || p == bottom || q == top {
            return true;
        }
        if p == top || q == bottom {
            return false;
        }
        le(irreducibles[q], irreducibles[p])
    };
    let mut tuples = Vec::new();
    for p in 0..size {
        for q in 0..size {
            if point_le(p, q) {
                tuples.push(vec![p, q]);
            }
        }
    }
    DualSpace::new(
        size,
        vec![Constant { value: 0, point: bottom }, Constant { value: 1, point: top }],
        vec![],
        vec![],
        vec![Relation { name: "le".into(), arity: 2, tuples }],
    )
}

/// Structure isomorphism of dual spaces: a bijection preserving constants
/// by value and all named structure in both directions.
pub fn dual_space_iso(x: &DualSpace, y: &DualSpace) -> bool {
    if x.size() != y.size()
        || x.constants().len() != y.constants().len()
        || x.relations().len() != y.relations().len()
        || x.unary_ops().len() != y.unary_ops().len()
        || x.partial_ops().len() != y.partial_ops().len()
    {
        return false;
    }
    for (a, b) in x.constants().iter().zip(y.constants()) {
        if a.value != b.value {
            return false;
        }
    }
    for r in x.relations() {
        match y.relation(&r.name) {
            Some(s) if s.arity == r.arity && s.tuples.len() == r.tuples.len() => {}
            _ => return false,
        }
    }
    for o in x.unary_ops() {
        if y.unary(&o.name).is_none() {
            return false;
        }
    }
    for o in x.partial_ops() {
        match y.partial(&o.name) {
            Some(p) if p.domain().len() == o.domain().len() => {}
            _ => return false,
        }
    }
    let n = x.size();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for c in x.constants() {
        let q = y.constant_point(c.value).unwrap();
        map[c.point] = q;
        used[q] = true;
    }
    fn extend(
        x: &DualSpace,
        y: &DualSpace,
        p: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = x.size();
        if p == n {
            return validate_flat(x, y, map).is_ok()
                && {
                    let mut inv = vec![0usize; n];
                    for (a, &b) in map.iter().enumerate() {
                        inv[b] = a;
                    }
                    validate_flat(y, x, &inv).is_ok()
                };
        }
        if map[p] != usize::MAX {
            return extend(x, y, p + 1, map, used);
        }
        for q in 0..n {
            if used[q] || y.constant_value(q).is_some() {
                continue;
            }
            map[p] = q;
            used[q] = true;
            if extend(x, y, p + 1, map, used) {
                return true;
            }
            map[p] = usize::MAX;
            used[q] = false;
        }
        false
    }
    extend(x, y, 0, &mut map, &mut used)
}

/// The canonical identification of the `n`-fold copower of `dualize(a)`
/// with the dual of `a^n`: a constant goes to the constant-valued
/// homomorphism, and the point `u` in copy `i` goes to `u ∘ pr_i`.
#[derive(Clone, Debug)]
pub struct CopowerIso {
    pub a_dual: Arc<DualSpace>,
    pub copower: Arc<DualSpace>,
    pub power_dual: Arc<DualSpace>,
    /// copower index -> power-dual index
    pub forward: Vec<usize>,
    /// power-dual index -> copower index
    pub backward: Vec<usize>,
}

pub fn copower_iso(
    a: &FiniteAlgebra,
    ego: &AlterEgo,
    n: usize,
    limit: usize,
) -> Result<CopowerIso> {
    let a_dual = Arc::new(dualize(a, ego, limit)?);
    copower_iso_from(a, &a_dual, ego, n, limit)
}

pub(crate) fn copower_iso_from(
    a: &FiniteAlgebra,
    a_dual: &Arc<DualSpace>,
    ego: &AlterEgo,
    n: usize,
    limit: usize,
) -> Result<CopowerIso> {
    let pw = power(a, n)?;
    let pw_dual = Arc::new(dualize(&pw, ego, limit)?);
    let cop = Arc::new(copower(a_dual, n)?);
    if cop.size() != pw_dual.size() {
        return Err(Error::DualityFailure(format!(
            "copower has {} points but the power dual has {}; the ego does not \
             amalgamate coproducts here",
            cop.size(),
            pw_dual.size()
        )));
    }
    let labels = a_dual.labels().expect("dualize attaches labels");
    let pw_labels = pw_dual.labels().expect("dualize attaches labels");
    let s = a.size();
    let sizes = vec![s; n];
    let mut coords = Vec::with_capacity(n);
    let mut forward = Vec::with_capacity(cop.size());
    for idx in 0..cop.size() {
        let table: Vec<usize> = match copower_point_at(a_dual, n, idx) {
            CopowerPoint::Const(c) => {
                let p = pw_dual.constant_point(c).ok_or_else(|| {
                    Error::DualityFailure(format!("power dual lacks constant {c}"))
                })?;
                forward.push(p);
                continue;
            }
            CopowerPoint::Pt { copy, point } => {
                let u = labels[point].map();
                (0..pw.size())
                    .map(|e| {
                        mixed_radix_decode(e, &sizes, &mut coords);
                        u[coords[copy]]
                    })
                    .collect()
            }
        };
        let p = pw_labels
            .binary_search_by(|h| h.map().cmp(&table))
            .map_err(|_| {
                Error::DualityFailure("composite with a projection is not a dual point".into())
            })?;
        forward.push(p);
    }
    let mut backward = vec![usize::MAX; forward.len()];
    for (i, &p) in forward.iter().enumerate() {
        if backward[p] != usize::MAX {
            return Err(Error::DualityFailure("canonical map is not injective".into()));
        }
        backward[p] = i;
    }
    validate_flat(&cop, &pw_dual, &forward)
        .map_err(|e| Error::DualityFailure(format!("canonical map not structural: {e}")))?;
    validate_flat(&pw_dual, &cop, &backward)
        .map_err(|e| Error::DualityFailure(format!("canonical inverse not structural: {e}")))?;
    Ok(CopowerIso {
        a_dual: a_dual.clone(),
        copower: cop,
        power_dual: pw_dual,
        forward,
        backward,
    })
}

/// Caches the duals of `algebra` and of its powers, so that many
/// homomorphisms can be dualized against one context.
pub struct DualContext {
    algebra: FiniteAlgebra,
    ego: AlterEgo,
    limit: usize,
    a_dual: Arc<DualSpace>,
    powers: BTreeMap<usize, CopowerIso>,
}

impl DualContext {
    pub fn new(algebra: FiniteAlgebra, ego: AlterEgo, limit: usize) -> Result<Self> {
        let a_dual = Arc::new(dualize(&algebra, &ego, limit)?);
        Ok(DualContext { algebra, ego, limit, a_dual, powers: BTreeMap::new() })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn ego(&self) -> &AlterEgo {
        &self.ego
    }

    pub fn a_dual(&self) -> &Arc<DualSpace> {
        &self.a_dual
    }

    pub fn power_iso(&mut self, n: usize) -> Result<&CopowerIso> {
        if !self.powers.contains_key(&n) {
            let iso = copower_iso_from(&self.algebra, &self.a_dual, &self.ego, n, self.limit)?;
            self.powers.insert(n, iso);
        }
        Ok(&self.powers[&n])
    }

    /// The dual of a homomorphism `f : algebra^copies -> B`, as a morphism
    /// from the dual of `B` into the `copies`-fold copower of the dual of
    /// `algebra`.
    pub fn dual_of_hom(&mut self, f: &Hom, copies: usize) -> Result<DualMorphism> {
        self.power_iso(copies)?;
        let iso = &self.powers[&copies];
        if f.source() != &power(&self.algebra, copies)? {
            return Err(Error::InvalidArgument(
                "homomorphism source is not the expected power".into(),
            ));
        }
        let b_dual = if f.target() == &self.algebra {
            self.a_dual.clone()
        } else if let Some(pd) = self.powers.values().find(|iso| {
            iso.power_dual
                .labels()
                .and_then(|ls| ls.first())
                .map(|h| h.source() == f.target())
                .unwrap_or(false)
        }) {
            pd.power_dual.clone()
        } else {
            Arc::new(dualize(f.target(), &self.ego, self.limit)?)
        };
        let iso = &self.powers[&copies];
        let pw_labels = iso.power_dual.labels().unwrap();
        let b_labels = b_dual.labels().unwrap();
        let mut map = Vec::with_capacity(b_dual.size());
        for u in b_labels {
            let composed: Vec<usize> = f.map().iter().map(|&x| u.map()[x]).collect();
            let p = pw_labels
                .binary_search_by(|h| h.map().cmp(&composed))
                .expect("u ∘ f is a dual point of the power");
            map.push(copower_point_at(&self.a_dual, copies, iso.backward[p]));
        }
        DualMorphism::new(b_dual, self.a_dual.clone(), copies, map)
    }
}

/// One-shot version of [`DualContext::dual_of_hom`].
pub fn dual_of_hom(
    f: &Hom,
    algebra: &FiniteAlgebra,
    copies: usize,
    ego: &AlterEgo,
    limit: usize,
) -> Result<DualMorphism> {
    let mut ctx = DualContext::new(algebra.clone(), ego.clone(), limit)?;
    ctx.dual_of_hom(f, copies)
}

/// Checks that evaluation `a -> (u -> u(a))` is a bijection from the
/// algebra onto the morphisms from its dual into the ego structure, and
/// a homomorphism for the pointwise operations. This is the finite-scale
/// certificate that the ego dualizes the algebra.
pub fn bidual_check(algebra: &FiniteAlgebra, ego: &AlterEgo, limit: usize) -> Result<bool> {
    let a_dual = Arc::new(dualize(algebra, ego, limit)?);
    let ego_space = Arc::new(ego.as_dual_space());
    let morphs = enumerate_morphisms(&a_dual, &ego_space, limit)?;
    if morphs.len() != algebra.size() {
        return Ok(false);
    }
    let labels = a_dual.labels().unwrap();
    let eval_table =
        |a: usize| -> Vec<usize> { labels.iter().map(|u| u.map()[a]).collect() };
    let mut eval_index = Vec::with_capacity(algebra.size());
    for a in 0..algebra.size() {
        let t = eval_table(a);
        match morphs.binary_search_by(|m| m.map.cmp(&t)) {
            Ok(i) => eval_index.push(i),
            Err(_) => return Ok(false),
        }
    }
    let mut seen = vec![false; morphs.len()];
    for &i in &eval_index {
        if std::mem::replace(&mut seen[i], true) {
            return Ok(false);
        }
    }
    // Homomorphism property for the pointwise algebra on the morphism set.
    let m_alg = ego.base();
    for (op_idx, op) in algebra.signature().ops().iter().enumerate() {
        let k = op.arity;
        let table = algebra.op_table(op_idx);
        let mut args = vec![0usize; k];
        for &result in table {
            for point in 0..a_dual.size() {
                let lhs = eval_table(result)[point];
                let vals: Vec<usize> = args.iter().map(|&x| eval_table(x)[point]).collect();
                let rhs = m_alg.apply(op_idx, &vals);
                if lhs != rhs {
                    return Ok(false);
                }
            }
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                args[pos] += 1;
                if args[pos] < algebra.size() {
                    break;
                }
                args[pos] = 0;
            }
        }
    }
    Ok(true)
}
