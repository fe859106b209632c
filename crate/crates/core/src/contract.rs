//! Exact tensor contraction.
//!
//! A contraction is lowered to a [`Plan`]: every operand slot and every
//! output position is assigned an index *class*. Metric operands do not hold
//! data; they merge the classes of their two slots. The plan is evaluated by
//! greedy pairwise contraction of the tensor operands.

use thiserror::Error;

use crate::exec;
use crate::scalar::Scalar;
use crate::tensor::{for_each_index, Tensor, MAX_RANK};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("operand count {got} does not match spec ({expected})")]
    OperandCount { expected: usize, got: usize },
    #[error("operand {op} has rank {got}, spec expects {expected}")]
    OperandRank { op: usize, expected: usize, got: usize },
    #[error("operand {0} is a metric but has {1} slots")]
    MetricRank(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    Dim(usize, usize),
    #[error("slot ({0}, {1}) is used {2} times")]
    SlotUse(usize, usize, usize),
    #[error("slot ({0}, {1}) does not exist")]
    NoSlot(usize, usize),
    #[error("label '{0}' appears {1} times; each label must appear exactly twice")]
    Label(char, usize),
    #[error("malformed contraction string {0:?}")]
    Syntax(String),
    #[error("output rank {0} exceeds {MAX_RANK}")]
    Rank(usize),
    #[error("no tensor operand to infer the dimension from")]
    NoDim,
}

/// One slot of one operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotRef {
    pub operand: usize,
    pub slot: usize,
}

impl SlotRef {
    pub fn new(operand: usize, slot: usize) -> SlotRef {
        SlotRef { operand, slot }
    }
}

/// Index bindings between operand slots plus the surviving free slots in
/// output order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractionSpec {
    pub bindings: Vec<(SlotRef, SlotRef)>,
    pub free: Vec<SlotRef>,
}

impl ContractionSpec {
    /// Parses einsum notation such as `"iabc,jabc->ij"`.
    pub fn parse(text: &str) -> Result<(Vec<Vec<char>>, Vec<char>), ContractError> {
        let bad = || ContractError::Syntax(text.to_string());
        let (lhs, rhs) = text.split_once("->").ok_or_else(bad)?;
        let ops: Vec<Vec<char>> = if lhs.is_empty() {
            Vec::new()
        } else {
            lhs.split(',').map(|s| s.chars().collect()).collect()
        };
        let out: Vec<char> = rhs.chars().collect();
        if ops.iter().flatten().chain(&out).any(|c| !c.is_ascii_alphanumeric()) {
            return Err(bad());
        }
        let mut counts = std::collections::BTreeMap::new();
        for c in ops.iter().flatten().chain(&out) {
            *counts.entry(*c).or_insert(0usize) += 1;
        }
        for (c, n) in counts {
            if n != 2 {
                return Err(ContractError::Label(c, n));
            }
        }
        if out.len() > MAX_RANK {
            return Err(ContractError::Rank(out.len()));
        }
        Ok((ops, out))
    }

    /// Spec equivalent to an einsum string.
    pub fn from_einsum(text: &str) -> Result<ContractionSpec, ContractError> {
        let (ops, out) = ContractionSpec::parse(text)?;
        let mut spec = ContractionSpec::default();
        let mut first: std::collections::HashMap<char, SlotRef> = Default::default();
        for (o, labels) in ops.iter().enumerate() {
            for (s, c) in labels.iter().enumerate() {
                let here = SlotRef::new(o, s);
                match first.remove(c) {
                    Some(prev) => spec.bindings.push((prev, here)),
                    None => {
                        first.insert(*c, here);
                    }
                }
            }
        }
        for c in &out {
            spec.free.push(first[c]);
        }
        Ok(spec)
    }
}

/// An operand of a contraction: tensor data or the identity metric.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    T(&'a Tensor),
    Metric,
}

impl<'a> From<&'a Tensor> for Operand<'a> {
    fn from(t: &'a Tensor) -> Operand<'a> {
        Operand::T(t)
    }
}

/// Shorthand for the metric operand.
pub const G: Operand<'static> = Operand::Metric;

/// Class structure of a contraction over tensor operands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Plan {
    pub n_classes: usize,
    /// Class of each slot of each tensor operand.
    pub slots: Vec<Vec<usize>>,
    /// Class of each output position.
    pub out: Vec<usize>,
    /// Classes touching neither an operand slot nor the output; each
    /// contributes a factor `dim`.
    pub loops: u32,
}

#[derive(Clone)]
pub(crate) struct UnionFind(pub(crate) Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl Plan {
    /// Builds a plan from labelled operands (`None` marks a metric).
    pub fn from_labels(ops: &[(Option<usize>, &[char])], out: &[char]) -> Plan {
        let mut names: Vec<char> = Vec::new();
        let id = |c: char, names: &mut Vec<char>| match names.iter().position(|&x| x == c) {
            Some(p) => p,
            None => {
                names.push(c);
                names.len() - 1
            }
        };
        let mut tensor_slots: Vec<Vec<usize>> = Vec::new();
        let mut metric_pairs = Vec::new();
        let out_ids: Vec<usize> = out.iter().map(|&c| id(c, &mut names)).collect();
        for (kind, labels) in ops {
            let ids: Vec<usize> = labels.iter().map(|&c| id(c, &mut names)).collect();
            match kind {
                Some(_) => tensor_slots.push(ids),
                None => metric_pairs.push((ids[0], ids[1])),
            }
        }
        let mut uf = UnionFind::new(names.len());
        for (a, b) in metric_pairs {
            uf.union(a, b);
        }
        Plan::canonical(&mut uf, names.len(), &out_ids, &tensor_slots)
    }

    /// Numbers classes by first appearance: outputs first, then operand slots.
    pub(crate) fn canonical(uf: &mut UnionFind, n_vars: usize, out: &[usize], slots: &[Vec<usize>]) -> Plan {
        let mut map = vec![usize::MAX; n_vars];
        let mut next = 0;
        let mut name = |v: usize, uf: &mut UnionFind| {
            let r = uf.find(v);
            if map[r] == usize::MAX {
                map[r] = next;
                next += 1;
            }
            map[r]
        };
        let out: Vec<usize> = out.iter().map(|&v| name(v, uf)).collect();
        let slots: Vec<Vec<usize>> = slots.iter().map(|s| s.iter().map(|&v| name(v, uf)).collect()).collect();
        let mut roots = std::collections::BTreeSet::new();
        for v in 0..n_vars {
            roots.insert(uf.find(v));
        }
        let loops = roots.iter().filter(|&&r| map[r] == usize::MAX).count() as u32;
        Plan {
            n_classes: next,
            slots,
            out,
            loops,
        }
    }

    /// Classes present both in the output and in some operand slot.
    pub fn kept(&self) -> Vec<usize> {
        let mut in_ops = vec![false; self.n_classes];
        for s in self.slots.iter().flatten() {
            in_ops[*s] = true;
        }
        let mut kept: Vec<usize> = self.out.iter().copied().filter(|&c| in_ops[c]).collect();
        kept.sort_unstable();
        kept.dedup();
        kept
    }

    /// Number of output classes not attached to any operand slot.
    pub fn grade(&self) -> usize {
        let mut in_ops = vec![false; self.n_classes];
        for s in self.slots.iter().flatten() {
            in_ops[*s] = true;
        }
        let mut free: Vec<usize> = self.out.iter().copied().filter(|&c| !in_ops[c]).collect();
        free.sort_unstable();
        free.dedup();
        free.len()
    }

    /// Evaluates the operand product, summing every class that is not kept.
    /// The result is indexed by [`Plan::kept`] in increasing class order and
    /// includes the `dim^loops` factor.
    pub fn evaluate(&self, dim: usize, tensors: &[&Tensor]) -> Factor {
        assert_eq!(tensors.len(), self.slots.len());
        let kept = self.kept();
        let mut keep = vec![false; self.n_classes];
        for &c in &kept {
            keep[c] = true;
        }
        let mut factors: Vec<Factor> = self
            .slots
            .iter()
            .zip(tensors)
            .map(|(s, t)| Factor::diagonal(t, s))
            .collect();
        let count = |factors: &[Factor], c: usize| factors.iter().filter(|f| f.classes.contains(&c)).count();
        // sum out classes private to one factor
        for i in 0..factors.len() {
            let private: Vec<usize> = factors[i]
                .classes
                .iter()
                .copied()
                .filter(|&c| !keep[c] && count(&factors, c) == 1)
                .collect();
            if !private.is_empty() {
                factors[i] = factors[i].sum_out(dim, &private);
            }
        }
        while factors.len() > 1 {
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for i in 0..factors.len() {
                for j in i + 1..factors.len() {
                    let union = union_classes(&factors[i].classes, &factors[j].classes);
                    let shared = factors[i].classes.iter().any(|c| factors[j].classes.contains(c));
                    let result = union
                        .iter()
                        .filter(|&&c| {
                            keep[c]
                                || factors
                                    .iter()
                                    .enumerate()
                                    .any(|(k, f)| k != i && k != j && f.classes.contains(&c))
                        })
                        .count();
                    // prefer pairs that share an index, then by loop work, then by result size
                    let work = union.len() + if shared { 0 } else { 64 };
                    if best.is_none_or(|(_, _, w, r)| (work, result) < (w, r)) {
                        best = Some((i, j, work, result));
                    }
                }
            }
            let (i, j, _, _) = best.expect("pair");
            let fj = factors.remove(j);
            let fi = factors.remove(i);
            let union = union_classes(&fi.classes, &fj.classes);
            let (res, sum): (Vec<usize>, Vec<usize>) = union
                .into_iter()
                .partition(|&c| keep[c] || factors.iter().any(|f| f.classes.contains(&c)));
            factors.push(Factor::pair(dim, &fi, &fj, &res, &sum));
        }
        let mut f = factors.pop().unwrap_or(Factor {
            classes: Vec::new(),
            data: vec![Scalar::ONE],
        });
        let extra: Vec<usize> = f.classes.iter().copied().filter(|&c| !keep[c]).collect();
        if !extra.is_empty() {
            f = f.sum_out(dim, &extra);
        }
        let f = f.reorder(dim, &kept);
        if self.loops > 0 {
            let s = Scalar::int((dim as i64).pow(self.loops));
            return Factor {
                classes: f.classes,
                data: f.data.iter().map(|v| v * &s).collect(),
            };
        }
        f
    }

    /// Adds `coef * value` of every output component to `acc`.
    pub fn scatter_add(&self, acc: &mut Tensor, coef: &Scalar, f: &Factor) {
        let dim = acc.dim();
        let mut distinct: Vec<usize> = self.out.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let pos_in_distinct: Vec<usize> = self
            .out
            .iter()
            .map(|c| distinct.binary_search(c).expect("class"))
            .collect();
        let kept_pos: Vec<usize> = f
            .classes
            .iter()
            .map(|c| distinct.binary_search(c).expect("kept"))
            .collect();
        let mut idx = vec![0; self.out.len()];
        for_each_index(dim, distinct.len(), |vals| {
            let mut off = 0;
            for &p in &kept_pos {
                off = off * dim + vals[p];
            }
            let v = &f.data[off];
            if v.is_zero() {
                return;
            }
            for (k, &p) in pos_in_distinct.iter().enumerate() {
                idx[k] = vals[p];
            }
            let o = acc.offset(&idx);
            acc.data_mut()[o].add_mul(coef, v);
        });
    }

    /// Value at one output tuple, or `None` when an equality constraint fails.
    pub fn value_at<'f>(&self, f: &'f Factor, dim: usize, idx: &[usize]) -> Option<&'f Scalar> {
        let mut vals = vec![usize::MAX; self.n_classes];
        for (&c, &i) in self.out.iter().zip(idx) {
            if vals[c] == usize::MAX {
                vals[c] = i;
            } else if vals[c] != i {
                return None;
            }
        }
        let off = f.classes.iter().fold(0, |acc, &c| acc * dim + vals[c]);
        Some(&f.data[off])
    }
}

fn union_classes(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Dense intermediate indexed by a list of distinct classes (row-major).
#[derive(Debug, Clone)]
pub struct Factor {
    pub classes: Vec<usize>,
    pub data: Vec<Scalar>,
}

impl Factor {
    /// Restricts a tensor to the diagonal implied by repeated slot classes.
    fn diagonal(t: &Tensor, slot_classes: &[usize]) -> Factor {
        let dim = t.dim();
        let mut classes = slot_classes.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let strides: Vec<usize> = {
            let r = slot_classes.len();
            let mut st = vec![0usize; classes.len()];
            for (k, c) in slot_classes.iter().enumerate() {
                let p = classes.binary_search(c).unwrap();
                st[p] += dim.pow((r - 1 - k) as u32);
            }
            st
        };
        if classes.len() == slot_classes.len() && classes == slot_classes {
            return Factor {
                classes,
                data: t.data().to_vec(),
            };
        }
        let mut data = Vec::with_capacity(dim.pow(classes.len() as u32));
        for_each_index(dim, classes.len(), |vals| {
            let off: usize = vals.iter().zip(&strides).map(|(v, s)| v * s).sum();
            data.push(t.data()[off].clone());
        });
        Factor { classes, data }
    }

    fn strides(&self, dim: usize) -> Vec<usize> {
        let r = self.classes.len();
        (0..r).map(|k| dim.pow((r - 1 - k) as u32)).collect()
    }

    fn stride_of(&self, dim: usize, c: usize) -> usize {
        match self.classes.iter().position(|&x| x == c) {
            Some(k) => self.strides(dim)[k],
            None => 0,
        }
    }

    fn sum_out(&self, dim: usize, drop: &[usize]) -> Factor {
        let res: Vec<usize> = self.classes.iter().copied().filter(|c| !drop.contains(c)).collect();
        let one = Factor {
            classes: Vec::new(),
            data: vec![Scalar::ONE],
        };
        Factor::pair(dim, self, &one, &res, drop)
    }

    fn reorder(self, dim: usize, order: &[usize]) -> Factor {
        if self.classes == order {
            return self;
        }
        let one = Factor {
            classes: Vec::new(),
            data: vec![Scalar::ONE],
        };
        Factor::pair(dim, &self, &one, order, &[])
    }

    /// `out[res] = sum over sum-classes of a * b`.
    fn pair(dim: usize, a: &Factor, b: &Factor, res: &[usize], sum: &[usize]) -> Factor {
        let ra: Vec<usize> = res.iter().map(|&c| a.stride_of(dim, c)).collect();
        let rb: Vec<usize> = res.iter().map(|&c| b.stride_of(dim, c)).collect();
        let sa: Vec<usize> = sum.iter().map(|&c| a.stride_of(dim, c)).collect();
        let sb: Vec<usize> = sum.iter().map(|&c| b.stride_of(dim, c)).collect();
        let n_out = dim.pow(res.len() as u32);
        let n_sum = dim.pow(sum.len() as u32);
        let b_trivial = b.classes.is_empty();
        let b0 = &b.data[0];
        let data = exec::map_indexed(n_out, |o| {
            let (mut oa, mut ob) = (0, 0);
            let mut rem = o;
            for k in (0..res.len()).rev() {
                let v = rem % dim;
                rem /= dim;
                oa += v * ra[k];
                ob += v * rb[k];
            }
            let mut acc = Scalar::ZERO;
            let mut idx = vec![0usize; sum.len()];
            let (mut ia, mut ib) = (oa, ob);
            for _ in 0..n_sum {
                let x = &a.data[ia];
                if !x.is_zero() {
                    if b_trivial {
                        acc.add_mul(x, b0);
                    } else {
                        acc.add_mul(x, &b.data[ib]);
                    }
                }
                // odometer step over summed classes
                let mut k = sum.len();
                while k > 0 {
                    k -= 1;
                    idx[k] += 1;
                    ia += sa[k];
                    ib += sb[k];
                    if idx[k] < dim {
                        break;
                    }
                    ia -= dim * sa[k];
                    ib -= dim * sb[k];
                    idx[k] = 0;
                }
            }
            acc
        });
        Factor {
            classes: res.to_vec(),
            data,
        }
    }
}

fn resolve<'a>(ops: &[Operand<'a>]) -> Result<(Option<usize>, Vec<&'a Tensor>), ContractError> {
    let mut dim = None;
    let mut ts = Vec::new();
    for op in ops {
        if let Operand::T(t) = op {
            match dim {
                None => dim = Some(t.dim()),
                Some(d) if d != t.dim() => return Err(ContractError::Dim(d, t.dim())),
                _ => {}
            }
            ts.push(*t);
        }
    }
    Ok((dim, ts))
}

fn plan_for(text: &str, ops: &[Operand]) -> Result<Plan, ContractError> {
    let (labels, out) = ContractionSpec::parse(text)?;
    if labels.len() != ops.len() {
        return Err(ContractError::OperandCount {
            expected: labels.len(),
            got: ops.len(),
        });
    }
    let mut spec = Vec::new();
    for (k, (l, op)) in labels.iter().zip(ops).enumerate() {
        match op {
            Operand::T(t) => {
                if t.rank() != l.len() {
                    return Err(ContractError::OperandRank {
                        op: k,
                        expected: l.len(),
                        got: t.rank(),
                    });
                }
                spec.push((Some(k), l.as_slice()));
            }
            Operand::Metric => {
                if l.len() != 2 {
                    return Err(ContractError::MetricRank(k, l.len()));
                }
                spec.push((None, l.as_slice()));
            }
        }
    }
    Ok(Plan::from_labels(&spec, &out))
}

/// Einstein-summation contraction, e.g. `einsum("iabc,jabc->ij", &[(&r).into(), (&r).into()])`.
pub fn einsum(text: &str, ops: &[Operand]) -> Result<Tensor, ContractError> {
    let (dim, _) = resolve(ops)?;
    let dim = dim.ok_or(ContractError::NoDim)?;
    let out_rank = ContractionSpec::parse(text)?.1.len();
    let mut acc = Tensor::zeros(dim, out_rank);
    einsum_into(&mut acc, &Scalar::ONE, text, ops)?;
    Ok(acc)
}

/// `acc += coef * einsum(text, ops)`.
pub fn einsum_into(acc: &mut Tensor, coef: &Scalar, text: &str, ops: &[Operand]) -> Result<(), ContractError> {
    let plan = plan_for(text, ops)?;
    let (dim, ts) = resolve(ops)?;
    if let Some(d) = dim {
        if d != acc.dim() {
            return Err(ContractError::Dim(acc.dim(), d));
        }
    }
    if plan.out.len() != acc.rank() {
        return Err(ContractError::OperandRank {
            op: usize::MAX,
            expected: plan.out.len(),
            got: acc.rank(),
        });
    }
    if coef.is_zero() {
        return Ok(());
    }
    let f = plan.evaluate(acc.dim(), &ts);
    plan.scatter_add(acc, coef, &f);
    Ok(())
}

/// Panicking wrapper for internal fixed strings.
pub fn ein(text: &str, ops: &[&Tensor]) -> Tensor {
    let ops: Vec<Operand> = ops.iter().map(|t| Operand::T(t)).collect();
    einsum(text, &ops).unwrap_or_else(|e| panic!("einsum {text}: {e}"))
}

/// Contracts operands according to a slot-level spec.
pub fn contract(operands: &[&Tensor], spec: &ContractionSpec) -> Result<Tensor, ContractError> {
    let dim = operands.first().map(|t| t.dim()).ok_or(ContractError::NoDim)?;
    for t in operands {
        if t.dim() != dim {
            return Err(ContractError::Dim(dim, t.dim()));
        }
    }
    let mut uses: Vec<Vec<usize>> = operands.iter().map(|t| vec![0; t.rank()]).collect();
    let mut touch = |s: SlotRef| -> Result<(), ContractError> {
        let slot = uses
            .get_mut(s.operand)
            .and_then(|u| u.get_mut(s.slot))
            .ok_or(ContractError::NoSlot(s.operand, s.slot))?;
        *slot += 1;
        Ok(())
    };
    for (a, b) in &spec.bindings {
        touch(*a)?;
        touch(*b)?;
    }
    for f in &spec.free {
        touch(*f)?;
    }
    for (o, u) in uses.iter().enumerate() {
        for (s, &n) in u.iter().enumerate() {
            if n != 1 {
                return Err(ContractError::SlotUse(o, s, n));
            }
        }
    }
    if spec.free.len() > MAX_RANK {
        return Err(ContractError::Rank(spec.free.len()));
    }
    let base: Vec<usize> = operands
        .iter()
        .scan(0, |acc, t| {
            let b = *acc;
            *acc += t.rank();
            Some(b)
        })
        .collect();
    let var = |s: SlotRef| base[s.operand] + s.slot;
    let n_slots: usize = operands.iter().map(|t| t.rank()).sum();
    let mut uf = UnionFind::new(n_slots);
    for (a, b) in &spec.bindings {
        uf.union(var(*a), var(*b));
    }
    let slots: Vec<Vec<usize>> = operands
        .iter()
        .enumerate()
        .map(|(o, t)| (0..t.rank()).map(|s| base[o] + s).collect())
        .collect();
    let out: Vec<usize> = spec.free.iter().map(|s| var(*s)).collect();
    let plan = Plan::canonical(&mut uf, n_slots, &out, &slots);
    let f = plan.evaluate(dim, operands);
    let mut acc = Tensor::zeros(dim, out.len());
    plan.scatter_add(&mut acc, &Scalar::ONE, &f);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_rank4(r: &Tensor) -> Tensor {
        // Ť_ij = R_iabc R_jabc by explicit loops
        let d = r.dim();
        let mut t = Tensor::zeros(d, 2);
        for i in 0..d {
            for j in 0..d {
                let mut s = Scalar::ZERO;
                for a in 0..d {
                    for b in 0..d {
                        for c in 0..d {
                            s.add_mul(r.get(&[i, a, b, c]), r.get(&[j, a, b, c]));
                        }
                    }
                }
                t.set(&[i, j], s);
            }
        }
        t
    }

    fn sample(dim: usize, rank: usize, seed: i64) -> Tensor {
        let mut t = Tensor::zeros(dim, rank);
        for (k, v) in t.data_mut().iter_mut().enumerate() {
            *v = Scalar::int(((k as i64 * 7 + seed * 13) % 11) - 5);
        }
        t
    }

    #[test]
    fn metric_traces() {
        let g = Tensor::metric(5);
        let v = einsum("ab,ab->", &[(&g).into(), (&g).into()]).unwrap();
        assert_eq!(v.value(), &Scalar::int(5));
        let v = einsum("ab,ab->", &[G, G]);
        assert!(v.is_err());
        let mut acc = Tensor::zeros(5, 0);
        einsum_into(&mut acc, &Scalar::ONE, "ab,ab->", &[G, G]).unwrap();
        assert_eq!(acc.value(), &Scalar::int(5));
    }

    #[test]
    fn matches_loops() {
        let r = sample(4, 4, 3);
        assert_eq!(ein("iabc,jabc->ij", &[&r, &r]), brute_rank4(&r));
        let spec = ContractionSpec::from_einsum("iabc,jabc->ij").unwrap();
        assert_eq!(contract(&[&r, &r], &spec).unwrap(), brute_rank4(&r));
    }

    #[test]
    fn repeated_label_in_operand_is_trace() {
        let r = sample(3, 4, 1);
        let rho = ein("iaaj->ij", &[&r]);
        for i in 0..3 {
            for j in 0..3 {
                let s: Scalar = (0..3).map(|a| r.get(&[i, a, a, j]).clone()).sum();
                assert_eq!(rho.get(&[i, j]), &s);
            }
        }
    }

    #[test]
    fn metric_operands_place_deltas() {
        let mut acc = Tensor::zeros(3, 4);
        einsum_into(&mut acc, &Scalar::ONE, "ik,jl->ijkl", &[G, G]).unwrap();
        let g = Tensor::metric(3);
        let direct = g.tensor_product(&g).unwrap().permute(&[0, 2, 1, 3]);
        assert_eq!(acc, direct);
        let t = sample(3, 2, 5);
        let mut acc = Tensor::zeros(3, 4);
        einsum_into(&mut acc, &Scalar::int(2), "ij,kl->ikjl", &[(&t).into(), G]).unwrap();
        let direct = t
            .tensor_product(&g)
            .unwrap()
            .permute(&[0, 2, 1, 3])
            .scale(&Scalar::int(2));
        assert_eq!(acc, direct);
    }

    #[test]
    fn spec_errors() {
        let r = sample(3, 4, 0);
        assert!(matches!(
            ContractionSpec::parse("iabc,jab->ij"),
            Err(ContractError::Label('c', 1))
        ));
        assert!(einsum("iab,jab->ij", &[(&r).into(), (&r).into()]).is_err());
        let spec = ContractionSpec {
            bindings: vec![],
            free: vec![SlotRef::new(0, 0)],
        };
        assert!(matches!(contract(&[&r], &spec), Err(ContractError::SlotUse(0, 1, 0))));
        let g4 = Tensor::metric(4);
        assert!(matches!(
            einsum("ab,ab->", &[(&r).into(), (&g4).into()]),
            Err(ContractError::OperandRank { .. }) | Err(ContractError::Dim(..))
        ));
    }
}
