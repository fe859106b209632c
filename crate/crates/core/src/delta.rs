//! Generalized Kronecker delta contracted against operands.
//!
//! `δ^{j_1..j_N}_{i_1..i_N}` is expanded as a signed sum over the `N!`
//! permutations. Each permutation identifies lower slot `a` with upper slot
//! `σ(a)`; after union-find the term is an ordinary contraction [`Plan`].
//! Terms with equal plans are merged, and, when operand slot symmetries are
//! declared, terms related by those symmetries are merged up to sign.
//!
//! The free lower slots and the free upper slots each form an alternating
//! group, so only strictly increasing tuples in each group are evaluated.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::contract::{Plan, SlotRef, UnionFind};
use crate::exec;
use crate::scalar::Scalar;
use crate::tensor::{for_each_index, Tensor, MAX_RANK};

pub const MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("delta order {0} outside 1..={MAX_N}")]
    Order(usize),
    #[error("expected {n} lower and {n} upper slots, got {lower} and {upper}")]
    SlotCount { n: usize, lower: usize, upper: usize },
    #[error("operand slot ({0}, {1}) is used {2} times")]
    OperandSlot(usize, usize, usize),
    #[error("output position {0} is used {1} times")]
    Output(usize, usize),
    #[error("upper slot {0} traced {1} times")]
    Trace(usize, usize),
    #[error("operand dimensions differ: {0} vs {1}")]
    Dim(usize, usize),
    #[error("symmetry declared for operand {0} of rank {1}")]
    Symmetry(usize, usize),
    #[error("rank {0} result needs a dense layout above rank {MAX_RANK}")]
    DenseRank(usize),
    #[error("complement layout needs every free slot in a full alternating group of size dim-1")]
    Layout,
}

/// What a delta slot is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaSlot {
    /// Output position.
    Free(usize),
    /// An operand slot.
    Op(SlotRef),
    /// Lower slot summed against upper slot `k` (lower list only).
    TraceWith(usize),
    /// Upper slot consumed by a `TraceWith` (upper list only).
    Traced,
}

/// Slot symmetries of an operand that the engine may exploit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperandSymmetry {
    None,
    /// `X_{abcd} = -X_{bacd} = -X_{abdc} = X_{cdab}`.
    Curvature,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaSpec {
    pub n: usize,
    pub lower: Vec<DeltaSlot>,
    pub upper: Vec<DeltaSlot>,
    /// Operand slots that are output positions directly.
    pub operand_free: Vec<(SlotRef, usize)>,
    pub rank: usize,
}

/// Permutations of `0..n` in lexicographic order with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        out.push((p.clone(), if inv % 2 == 0 { 1 } else { -1 }));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// One merged term: `coef * plan`.
#[derive(Debug, Clone)]
pub struct Term {
    pub plan: Plan,
    pub coef: i64,
    pub grade: usize,
}

/// Expanded, merged permutation sum for one spec.
#[derive(Debug)]
pub struct DeltaPlan {
    pub terms: Vec<Term>,
    /// Raw permutation count before merging.
    pub expanded: usize,
    pub lower_group: Vec<usize>,
    pub upper_group: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    dim: usize,
    spec: DeltaSpec,
    ranks: Vec<usize>,
    sym: Vec<OperandSymmetry>,
    same: Vec<usize>,
}

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<DeltaPlan>>> {
    static C: OnceLock<Mutex<HashMap<CacheKey, Arc<DeltaPlan>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn validate(spec: &DeltaSpec, ranks: &[usize]) -> Result<(), DeltaError> {
    if spec.n == 0 || spec.n > MAX_N {
        return Err(DeltaError::Order(spec.n));
    }
    if spec.lower.len() != spec.n || spec.upper.len() != spec.n {
        return Err(DeltaError::SlotCount {
            n: spec.n,
            lower: spec.lower.len(),
            upper: spec.upper.len(),
        });
    }
    let mut op_use: Vec<Vec<usize>> = ranks.iter().map(|&r| vec![0; r]).collect();
    let mut out_use = vec![0usize; spec.rank];
    let mut traced = vec![0usize; spec.n];
    let mark_op = |s: SlotRef, op_use: &mut Vec<Vec<usize>>| -> Result<(), DeltaError> {
        let u = op_use
            .get_mut(s.operand)
            .and_then(|v| v.get_mut(s.slot))
            .ok_or(DeltaError::OperandSlot(s.operand, s.slot, 0))?;
        *u += 1;
        Ok(())
    };
    let mark_out = |p: usize, out_use: &mut Vec<usize>| -> Result<(), DeltaError> {
        *out_use.get_mut(p).ok_or(DeltaError::Output(p, 0))? += 1;
        Ok(())
    };
    for s in &spec.lower {
        match *s {
            DeltaSlot::Free(p) => mark_out(p, &mut out_use)?,
            DeltaSlot::Op(r) => mark_op(r, &mut op_use)?,
            DeltaSlot::TraceWith(k) => *traced.get_mut(k).ok_or(DeltaError::Trace(k, 0))? += 1,
            DeltaSlot::Traced => return Err(DeltaError::Trace(usize::MAX, 0)),
        }
    }
    for (k, s) in spec.upper.iter().enumerate() {
        match *s {
            DeltaSlot::Free(p) => mark_out(p, &mut out_use)?,
            DeltaSlot::Op(r) => mark_op(r, &mut op_use)?,
            DeltaSlot::Traced => {
                if traced[k] != 1 {
                    return Err(DeltaError::Trace(k, traced[k]));
                }
            }
            DeltaSlot::TraceWith(_) => return Err(DeltaError::Trace(k, 0)),
        }
    }
    for (k, s) in spec.upper.iter().enumerate() {
        if traced[k] > 0 && *s != DeltaSlot::Traced {
            return Err(DeltaError::Trace(k, traced[k]));
        }
    }
    for (s, p) in &spec.operand_free {
        mark_op(*s, &mut op_use)?;
        mark_out(*p, &mut out_use)?;
    }
    for (o, u) in op_use.iter().enumerate() {
        for (s, &n) in u.iter().enumerate() {
            if n != 1 {
                return Err(DeltaError::OperandSlot(o, s, n));
            }
        }
    }
    for (p, &n) in out_use.iter().enumerate() {
        if n != 1 {
            return Err(DeltaError::Output(p, n));
        }
    }
    Ok(())
}

const CURVATURE_GENERATORS: [([usize; 4], i64); 3] = [([1, 0, 2, 3], -1), ([0, 1, 3, 2], -1), ([2, 3, 0, 1], 1)];

fn renumber(plan: &Plan) -> Plan {
    let mut map = vec![usize::MAX; plan.n_classes];
    let mut next = 0;
    let mut name = |c: usize| {
        if map[c] == usize::MAX {
            map[c] = next;
            next += 1;
        }
        map[c]
    };
    let out = plan.out.iter().map(|&c| name(c)).collect();
    let slots = plan
        .slots
        .iter()
        .map(|s| s.iter().map(|&c| name(c)).collect())
        .collect();
    Plan {
        n_classes: plan.n_classes,
        slots,
        out,
        loops: 0,
    }
}

fn build(dim: usize, spec: &DeltaSpec, ranks: &[usize], sym: &[OperandSymmetry], same: &[usize]) -> DeltaPlan {
    let n = spec.n;
    let base: Vec<usize> = ranks
        .iter()
        .scan(spec.rank, |acc, r| {
            let b = *acc;
            *acc += r;
            Some(b)
        })
        .collect();
    let n_op_slots: usize = ranks.iter().sum();
    let lower0 = spec.rank + n_op_slots;
    let upper0 = lower0 + n;
    let n_vars = upper0 + n;
    let var = |s: SlotRef| base[s.operand] + s.slot;
    let mut uf0 = UnionFind::new(n_vars);
    for (a, s) in spec.lower.iter().enumerate() {
        match *s {
            DeltaSlot::Free(p) => uf0.union(lower0 + a, p),
            DeltaSlot::Op(r) => uf0.union(lower0 + a, var(r)),
            DeltaSlot::TraceWith(k) => uf0.union(lower0 + a, upper0 + k),
            DeltaSlot::Traced => {}
        }
    }
    for (b, s) in spec.upper.iter().enumerate() {
        match *s {
            DeltaSlot::Free(p) => uf0.union(upper0 + b, p),
            DeltaSlot::Op(r) => uf0.union(upper0 + b, var(r)),
            _ => {}
        }
    }
    for (s, p) in &spec.operand_free {
        uf0.union(var(*s), *p);
    }
    let out: Vec<usize> = (0..spec.rank).collect();
    let slots: Vec<Vec<usize>> = ranks
        .iter()
        .enumerate()
        .map(|(o, &r)| (0..r).map(|s| base[o] + s).collect())
        .collect();

    let perms = permutations(n);
    let expanded = perms.len();
    let mut raw: HashMap<Plan, i64> = HashMap::new();
    let mut order: Vec<Plan> = Vec::new();
    let dim_i = dim as i64;
    for (p, sign) in &perms {
        let mut uf = UnionFind(uf0.0.clone());
        for a in 0..n {
            uf.union(lower0 + a, upper0 + p[a]);
        }
        let plan = Plan::canonical(&mut uf, n_vars, &out, &slots);
        let w = sign * dim_i.pow(plan.loops);
        let key = Plan { loops: 0, ..plan };
        match raw.get_mut(&key) {
            Some(c) => *c += w,
            None => {
                order.push(key.clone());
                raw.insert(key, w);
            }
        }
    }

    // merge along symmetry orbits
    let mut gens: Vec<Box<dyn Fn(&Plan) -> (Plan, i64)>> = Vec::new();
    for (o, s) in sym.iter().enumerate() {
        if *s == OperandSymmetry::Curvature {
            for (perm, sg) in CURVATURE_GENERATORS {
                gens.push(Box::new(move |k: &Plan| {
                    let mut k2 = k.clone();
                    k2.slots[o] = perm.iter().map(|&j| k.slots[o][j]).collect();
                    (renumber(&k2), sg)
                }));
            }
        }
    }
    for o in 1..ranks.len() {
        if let Some(prev) = (0..o).rev().find(|&q| same[q] == same[o]) {
            if sym[prev] == sym[o] && ranks[prev] == ranks[o] {
                gens.push(Box::new(move |k: &Plan| {
                    let mut k2 = k.clone();
                    k2.slots.swap(prev, o);
                    (renumber(&k2), 1)
                }));
            }
        }
    }
    let mut class_of: HashMap<Plan, (usize, i64)> = HashMap::new();
    let mut reps: Vec<(Plan, i64, bool)> = Vec::new();
    for key in order {
        let c = raw[&key];
        if c == 0 {
            continue;
        }
        if !class_of.contains_key(&key) {
            let id = reps.len();
            let mut null = false;
            let mut queue = vec![key.clone()];
            class_of.insert(key.clone(), (id, 1));
            while let Some(k) = queue.pop() {
                let sk = class_of[&k].1;
                for g in &gens {
                    let (k2, s) = g(&k);
                    let s2 = sk * s;
                    match class_of.get(&k2) {
                        Some(&(_, prev)) => {
                            if prev != s2 {
                                null = true;
                            }
                        }
                        None => {
                            class_of.insert(k2.clone(), (id, s2));
                            queue.push(k2);
                        }
                    }
                }
            }
            reps.push((key.clone(), 0, null));
        }
        let (id, s) = class_of[&key];
        reps[id].1 += s * c;
    }
    let terms = reps
        .into_iter()
        .filter(|(_, c, null)| *c != 0 && !null)
        .map(|(plan, coef, _)| {
            let grade = plan.grade();
            Term { plan, coef, grade }
        })
        .collect();
    let group = |list: &[DeltaSlot]| -> Vec<usize> {
        list.iter()
            .filter_map(|s| if let DeltaSlot::Free(p) = s { Some(*p) } else { None })
            .collect()
    };
    DeltaPlan {
        terms,
        expanded,
        lower_group: group(&spec.lower),
        upper_group: group(&spec.upper),
    }
}

/// Builds (or fetches from the process-wide cache) the merged expansion.
pub fn plan(
    dim: usize,
    spec: &DeltaSpec,
    ranks: &[usize],
    sym: &[OperandSymmetry],
    same: &[usize],
) -> Result<Arc<DeltaPlan>, DeltaError> {
    validate(spec, ranks)?;
    for (o, s) in sym.iter().enumerate() {
        if *s == OperandSymmetry::Curvature && ranks[o] != 4 {
            return Err(DeltaError::Symmetry(o, ranks[o]));
        }
    }
    let key = CacheKey {
        dim,
        spec: spec.clone(),
        ranks: ranks.to_vec(),
        sym: sym.to_vec(),
        same: same.to_vec(),
    };
    if let Some(p) = cache().lock().unwrap().get(&key) {
        return Ok(p.clone());
    }
    let p = Arc::new(build(dim, spec, ranks, sym, same));
    cache().lock().unwrap().insert(key, p.clone());
    Ok(p)
}

/// Canonical values of a delta contraction, split by grade.
#[derive(Debug, Clone)]
pub struct DeltaResult {
    pub dim: usize,
    pub rank: usize,
    pub lower_group: Vec<usize>,
    pub upper_group: Vec<usize>,
    /// Output tuples with each alternating group strictly increasing.
    pub tuples: Vec<Vec<usize>>,
    /// Grade (number of output-only index classes) → value per tuple.
    pub by_grade: BTreeMap<usize, Vec<Scalar>>,
}

fn increasing(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(dim: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..dim {
            cur.push(v);
            rec(dim, k, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(dim, k, 0, &mut cur, &mut out);
    out
}

fn canonical_tuples(dim: usize, rank: usize, lg: &[usize], ug: &[usize]) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..rank).filter(|p| !lg.contains(p) && !ug.contains(p)).collect();
    let mut out = Vec::new();
    for l in increasing(dim, lg.len()) {
        for u in increasing(dim, ug.len()) {
            for_each_index(dim, others.len(), |o| {
                let mut t = vec![0; rank];
                for (p, v) in lg.iter().zip(&l) {
                    t[*p] = *v;
                }
                for (p, v) in ug.iter().zip(&u) {
                    t[*p] = *v;
                }
                for (p, v) in others.iter().zip(o) {
                    t[*p] = *v;
                }
                out.push(t);
            });
        }
    }
    out
}

/// Evaluates the delta contraction. `sym[k]` declares slot symmetries of
/// operand `k` that the caller guarantees; pass `OperandSymmetry::None` when
/// in doubt. Operands given as the same reference may be interchanged.
pub fn delta_contract(
    operands: &[&Tensor],
    sym: &[OperandSymmetry],
    spec: &DeltaSpec,
    dim: usize,
) -> Result<DeltaResult, DeltaError> {
    for t in operands {
        if t.dim() != dim {
            return Err(DeltaError::Dim(dim, t.dim()));
        }
    }
    assert_eq!(sym.len(), operands.len(), "one symmetry per operand");
    let ranks: Vec<usize> = operands.iter().map(|t| t.rank()).collect();
    let same: Vec<usize> = (0..operands.len())
        .map(|k| (0..=k).find(|&q| std::ptr::eq(operands[q], operands[k])).unwrap())
        .collect();
    let dp = plan(dim, spec, &ranks, sym, &same)?;
    let tuples = canonical_tuples(dim, spec.rank, &dp.lower_group, &dp.upper_group);
    let parts: Vec<(usize, Vec<Scalar>)> = exec::map_indexed(dp.terms.len(), |t| {
        let term = &dp.terms[t];
        let f = term.plan.evaluate(dim, operands);
        let c = Scalar::int(term.coef);
        let vals = tuples
            .iter()
            .map(|tu| match term.plan.value_at(&f, dim, tu) {
                Some(v) if !v.is_zero() => v * &c,
                _ => Scalar::ZERO,
            })
            .collect();
        (term.grade, vals)
    });
    let mut by_grade: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
    for (g, vals) in parts {
        let acc = by_grade.entry(g).or_insert_with(|| vec![Scalar::ZERO; tuples.len()]);
        for (a, v) in acc.iter_mut().zip(&vals) {
            *a += v;
        }
    }
    Ok(DeltaResult {
        dim,
        rank: spec.rank,
        lower_group: dp.lower_group.clone(),
        upper_group: dp.upper_group.clone(),
        tuples,
        by_grade,
    })
}

/// Result layout of a residual tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Ordinary dense tensor.
    Dense,
    /// Alternating groups of size `dim-1` indexed by the missing value:
    /// component `(a, b)` is the full tensor at the increasing complement of
    /// `a` in the lower group and of `b` in the upper group.
    Complement,
}

impl DeltaResult {
    pub fn total(&self) -> Vec<Scalar> {
        let mut acc = vec![Scalar::ZERO; self.tuples.len()];
        for vals in self.by_grade.values() {
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += v;
            }
        }
        acc
    }

    pub fn grade(&self, g: usize) -> Vec<Scalar> {
        self.by_grade
            .get(&g)
            .cloned()
            .unwrap_or_else(|| vec![Scalar::ZERO; self.tuples.len()])
    }

    pub fn is_zero(&self) -> bool {
        self.total().iter().all(Scalar::is_zero)
    }

    /// Expands canonical values into the full tensor.
    pub fn dense(&self, vals: &[Scalar]) -> Result<Tensor, DeltaError> {
        if self.rank > MAX_RANK {
            return Err(DeltaError::DenseRank(self.rank));
        }
        let mut t = Tensor::zeros(self.dim, self.rank);
        let lp = permutations(self.lower_group.len());
        let up = permutations(self.upper_group.len());
        let mut idx = vec![0; self.rank];
        for (tu, v) in self.tuples.iter().zip(vals) {
            if v.is_zero() {
                continue;
            }
            let neg = -v;
            for (pl, sl) in &lp {
                for (pu, su) in &up {
                    idx.copy_from_slice(tu);
                    for (k, &p) in self.lower_group.iter().enumerate() {
                        idx[p] = tu[self.lower_group[pl[k]]];
                    }
                    for (k, &p) in self.upper_group.iter().enumerate() {
                        idx[p] = tu[self.upper_group[pu[k]]];
                    }
                    t.set(&idx, if sl * su > 0 { v.clone() } else { neg.clone() });
                }
            }
        }
        Ok(t)
    }

    /// Rank-2 complement-indexed form; see [`Layout::Complement`].
    pub fn complement(&self, vals: &[Scalar]) -> Result<Tensor, DeltaError> {
        let d = self.dim;
        if self.lower_group.len() != d - 1 || self.upper_group.len() != d - 1 || self.rank != 2 * (d - 1) {
            return Err(DeltaError::Layout);
        }
        let mut t = Tensor::zeros(d, 2);
        for (tu, v) in self.tuples.iter().zip(vals) {
            let missing = |g: &[usize]| (0..d).find(|x| !g.iter().any(|&p| tu[p] == *x)).unwrap();
            t.set(&[missing(&self.lower_group), missing(&self.upper_group)], v.clone());
        }
        Ok(t)
    }

    /// Dense when the rank allows, complement layout otherwise.
    pub fn to_tensor(&self, vals: &[Scalar]) -> Result<(Tensor, Layout), DeltaError> {
        if self.rank <= MAX_RANK {
            Ok((self.dense(vals)?, Layout::Dense))
        } else {
            Ok((self.complement(vals)?, Layout::Complement))
        }
    }
}

/// `det[δ(lower_a, upper_b)]`: the sign of the permutation taking `lower`
/// to `upper`, or zero.
pub fn delta_det(lower: &[usize], upper: &[usize]) -> i64 {
    let n = lower.len();
    for a in 0..n {
        for b in a + 1..n {
            if lower[a] == lower[b] {
                return 0;
            }
        }
    }
    let mut perm = Vec::with_capacity(n);
    for u in upper {
        match lower.iter().position(|l| l == u) {
            Some(p) if !perm.contains(&p) => perm.push(p),
            _ => return 0,
        }
    }
    let mut seen = vec![false; n];
    let mut sign = 1;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            c = perm[c];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Definitional evaluation: for every output tuple, the sum over all bound
/// index values of the determinant times the operand product. Exponential;
/// used as a test oracle.
pub fn delta_bruteforce(operands: &[&Tensor], spec: &DeltaSpec, dim: usize) -> Result<Tensor, DeltaError> {
    let ranks: Vec<usize> = operands.iter().map(|t| t.rank()).collect();
    validate(spec, &ranks)?;
    if spec.rank > MAX_RANK {
        return Err(DeltaError::DenseRank(spec.rank));
    }
    let n = spec.n;
    // bound variables: operand slots reached from delta slots, plus traces
    let base: Vec<usize> = ranks
        .iter()
        .scan(0, |acc, r| {
            let b = *acc;
            *acc += r;
            Some(b)
        })
        .collect();
    let n_op: usize = ranks.iter().sum();
    let free_of: HashMap<SlotRef, usize> = spec.operand_free.iter().copied().collect();
    let mut trace_var = vec![usize::MAX; n];
    let mut n_bound = 0;
    // operand slots not free are summed; each gets its own variable
    let mut op_var = vec![usize::MAX; n_op];
    for (o, &r) in ranks.iter().enumerate() {
        for s in 0..r {
            if !free_of.contains_key(&SlotRef::new(o, s)) {
                op_var[base[o] + s] = n_bound;
                n_bound += 1;
            }
        }
    }
    for s in &spec.lower {
        if let DeltaSlot::TraceWith(k) = *s {
            trace_var[k] = n_bound;
            n_bound += 1;
        }
    }
    let mut out = Tensor::zeros(dim, spec.rank);
    let mut lower = vec![0; n];
    let mut upper = vec![0; n];
    let mut opv = vec![0; n_op];
    for_each_index(dim, spec.rank, |o| {
        let mut acc = Scalar::ZERO;
        for_each_index(dim, n_bound, |b| {
            for (o2, &r) in ranks.iter().enumerate() {
                for s in 0..r {
                    let v = op_var[base[o2] + s];
                    opv[base[o2] + s] = if v == usize::MAX {
                        o[free_of[&SlotRef::new(o2, s)]]
                    } else {
                        b[v]
                    };
                }
            }
            for (a, s) in spec.lower.iter().enumerate() {
                lower[a] = match *s {
                    DeltaSlot::Free(p) => o[p],
                    DeltaSlot::Op(r) => opv[base[r.operand] + r.slot],
                    DeltaSlot::TraceWith(k) => b[trace_var[k]],
                    DeltaSlot::Traced => unreachable!(),
                };
            }
            for (k, s) in spec.upper.iter().enumerate() {
                upper[k] = match *s {
                    DeltaSlot::Free(p) => o[p],
                    DeltaSlot::Op(r) => opv[base[r.operand] + r.slot],
                    DeltaSlot::Traced => b[trace_var[k]],
                    DeltaSlot::TraceWith(_) => unreachable!(),
                };
            }
            let d = delta_det(&lower, &upper);
            if d == 0 {
                return;
            }
            let mut prod = Scalar::int(d);
            for (o2, t) in operands.iter().enumerate() {
                let v = t.get(&opv[base[o2]..base[o2] + ranks[o2]]);
                if v.is_zero() {
                    return;
                }
                prod = &prod * v;
            }
            acc += &prod;
        });
        out.set(o, acc);
    });
    Ok(out)
}

/// Spec for an unbound delta of order `n`: output `(i_1..i_n, j_1..j_n)`.
pub fn free_delta_spec(n: usize) -> DeltaSpec {
    DeltaSpec {
        n,
        lower: (0..n).map(DeltaSlot::Free).collect(),
        upper: (0..n).map(|k| DeltaSlot::Free(n + k)).collect(),
        operand_free: Vec::new(),
        rank: 2 * n,
    }
}
