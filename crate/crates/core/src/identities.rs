//! Residual evaluators for curvature identities in dimensions 4 to 6.
//!
//! Every evaluator assembles `LHS − RHS` as an exact tensor. Rank-6
//! residuals use the free index order `(i, h, j, k, l, m)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contract::{ein, einsum_into, Operand, SlotRef, G};
use crate::curvature::{invariants, weyl, CurvatureError, CurvatureTensor, InvariantReport};
use crate::delta::{delta_contract, DeltaError, DeltaResult, DeltaSlot, DeltaSpec, Layout, OperandSymmetry};
use crate::scalar::Scalar;
use crate::tensor::{Entry, Tensor};

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error("{identity} needs dimension {need}, got {got}")]
    Dim {
        identity: &'static str,
        need: usize,
        got: usize,
    },
    #[error("order r = {r} outside 1..={max} for dimension {dim}")]
    Order { r: usize, max: usize, dim: usize },
    #[error("{0}")]
    Delta(#[from] DeltaError),
    #[error("{0}")]
    Curvature(#[from] CurvatureError),
}

/// Condition under which an identity is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Universal,
    Einstein,
    SuperEinstein,
}

impl Hypothesis {
    pub fn holds(self, inv: &InvariantReport) -> bool {
        match self {
            Hypothesis::Universal => true,
            Hypothesis::Einstein => inv.einstein,
            Hypothesis::SuperEinstein => inv.super_einstein,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub identity: String,
    pub hypothesis: Hypothesis,
    pub hypothesis_holds: bool,
    pub rank: usize,
    pub layout: Layout,
    pub is_zero: bool,
    /// Largest component by absolute value (1-based index), when nonzero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub residual: Tensor,
}

impl ResidualReport {
    pub fn new(identity: &str, hypothesis: Hypothesis, holds: bool, residual: Tensor, layout: Layout) -> Self {
        let witness = residual.max_abs().map(|(idx, val)| Entry {
            idx: idx.iter().map(|i| i + 1).collect(),
            val,
        });
        ResidualReport {
            identity: identity.to_string(),
            hypothesis,
            hypothesis_holds: holds,
            rank: residual.rank(),
            layout,
            is_zero: witness.is_none(),
            witness,
            note: None,
            residual,
        }
    }

    fn dense(identity: &str, hypothesis: Hypothesis, inv: &InvariantReport, residual: Tensor) -> Self {
        ResidualReport::new(identity, hypothesis, hypothesis.holds(inv), residual, Layout::Dense)
    }
}

fn need_dim(identity: &'static str, rc: &CurvatureTensor, need: usize) -> Result<(), IdentityError> {
    if rc.dim() != need {
        return Err(IdentityError::Dim {
            identity,
            need,
            got: rc.dim(),
        });
    }
    Ok(())
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

fn int(n: i64) -> Scalar {
    Scalar::int(n)
}

fn add(acc: &mut Tensor, c: &Scalar, spec: &str, ops: &[Operand]) {
    einsum_into(acc, c, spec, ops).unwrap_or_else(|e| panic!("{spec}: {e}"));
}

fn t(x: &Tensor) -> Operand<'_> {
    Operand::T(x)
}

// ---------------------------------------------------------------------------
// Generalized Kronecker delta identity

/// Treatment of the delta index pairs not bound to curvature copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftoverMode {
    /// Leftover pairs are output indices.
    #[default]
    Free,
    /// Leftover lower/upper pairs are summed.
    Traced,
}

/// Largest admissible number of curvature copies.
pub fn max_order(dim: usize) -> usize {
    dim / 2
}

/// Delta of order `dim + 1` with `r` curvature copies. Copy `t` occupies
/// lower slots `2t+1, 2t+2` and upper slots `2t+1, 2t+2`. Free mode output
/// order is `(i, i_{2r+1}..i_m, j, j_{2r+1}..j_m)`.
pub fn patterson_spec(dim: usize, r: usize, mode: LeftoverMode) -> Result<DeltaSpec, IdentityError> {
    let max = max_order(dim);
    if r == 0 || r > max {
        return Err(IdentityError::Order { r, max, dim });
    }
    let n = dim + 1;
    let left = dim - 2 * r;
    let mut lower = vec![DeltaSlot::Free(0); n];
    let mut upper = vec![DeltaSlot::Free(0); n];
    let j0 = match mode {
        LeftoverMode::Free => left + 1,
        LeftoverMode::Traced => 1,
    };
    upper[0] = DeltaSlot::Free(j0);
    for c in 0..r {
        lower[2 * c + 1] = DeltaSlot::Op(SlotRef::new(c, 0));
        lower[2 * c + 2] = DeltaSlot::Op(SlotRef::new(c, 1));
        upper[2 * c + 1] = DeltaSlot::Op(SlotRef::new(c, 2));
        upper[2 * c + 2] = DeltaSlot::Op(SlotRef::new(c, 3));
    }
    for s in 1..=left {
        let k = 2 * r + s;
        match mode {
            LeftoverMode::Free => {
                lower[k] = DeltaSlot::Free(s);
                upper[k] = DeltaSlot::Free(left + 1 + s);
            }
            LeftoverMode::Traced => {
                lower[k] = DeltaSlot::TraceWith(k);
                upper[k] = DeltaSlot::Traced;
            }
        }
    }
    let rank = match mode {
        LeftoverMode::Free => 2 + 2 * left,
        LeftoverMode::Traced => 2,
    };
    Ok(DeltaSpec {
        n,
        lower,
        upper,
        operand_free: Vec::new(),
        rank,
    })
}

/// Graded delta evaluation of the identity on an arbitrary rank-4 operand
/// with curvature symmetries.
pub fn patterson_delta(r4: &Tensor, r: usize, mode: LeftoverMode) -> Result<DeltaResult, IdentityError> {
    let spec = patterson_spec(r4.dim(), r, mode)?;
    let ops = vec![r4; r];
    let sym = vec![OperandSymmetry::Curvature; r];
    Ok(delta_contract(&ops, &sym, &spec, r4.dim())?)
}

pub fn patterson_residual(rc: &CurvatureTensor, r: usize, mode: LeftoverMode) -> Result<ResidualReport, IdentityError> {
    let d = patterson_delta(rc.tensor(), r, mode)?;
    let (res, layout) = d.to_tensor(&d.total())?;
    Ok(ResidualReport::new(
        "patterson",
        Hypothesis::Universal,
        true,
        res,
        layout,
    ))
}

pub fn weyl_patterson_residual(
    rc: &CurvatureTensor,
    r: usize,
    mode: LeftoverMode,
) -> Result<ResidualReport, IdentityError> {
    let w = weyl(rc)?;
    let d = patterson_delta(w.tensor(), r, mode)?;
    let (res, layout) = d.to_tensor(&d.total())?;
    Ok(ResidualReport::new(
        "weyl-patterson",
        Hypothesis::Universal,
        true,
        res,
        layout,
    ))
}

// ---------------------------------------------------------------------------
// Explicit Weyl expansions

/// Term-by-term Weyl identity, compared with the graded delta evaluation.
#[derive(Debug, Clone)]
pub struct WeylExpansion {
    pub dim: usize,
    /// Named blocks; their sum is the identity.
    pub blocks: Vec<(&'static str, Tensor)>,
    pub sum: Tensor,
    /// For each grade: whether the delta part equals 4 × the matching blocks.
    pub grades: Vec<(usize, bool)>,
    /// Delta total equals 4 × `sum`.
    pub total_agrees: bool,
}

impl WeylExpansion {
    pub fn agrees(&self) -> bool {
        self.total_agrees && self.grades.iter().all(|g| g.1)
    }
}

fn g4_alt(dim: usize) -> Tensor {
    let mut x = Tensor::zeros(dim, 4);
    add(&mut x, &int(1), "ik,jl->ijkl", &[G, G]);
    add(&mut x, &int(-1), "il,jk->ijkl", &[G, G]);
    x
}

const G6: [(i64, &str, &str, &str); 6] = [
    (1, "ij", "hk", "lm"),
    (-1, "ij", "hm", "lk"),
    (-1, "ik", "hj", "lm"),
    (1, "ik", "hm", "lj"),
    (1, "im", "hj", "lk"),
    (-1, "im", "hk", "lj"),
];

fn g6_alt() -> Tensor {
    let mut x = Tensor::zeros(6, 6);
    for (s, a, b, c) in G6 {
        add(&mut x, &int(s), &format!("{a},{b},{c}->ihjklm"), &[G, G, G]);
    }
    x
}

fn weyl5_blocks(w: &Tensor) -> Vec<(&'static str, Tensor)> {
    let n = ein("abcd,abcd->", &[w, w]).value().clone();
    let norm = g4_alt(5).scale(&n);
    let tt = ein("abcj,abcl->jl", &[w, w]);
    let mut sq = Tensor::zeros(5, 4);
    for (s, spec) in [
        (1, "jl,ik->ijkl"),
        (-1, "jk,il->ijkl"),
        (1, "ik,jl->ijkl"),
        (-1, "il,jk->ijkl"),
    ] {
        add(&mut sq, &int(-4 * s), spec, &[t(&tt), G]);
    }
    let mut quad = Tensor::zeros(5, 4);
    add(&mut quad, &int(8), "iabl,kabj->ijkl", &[t(w), t(w)]);
    add(&mut quad, &int(-8), "iabk,labj->ijkl", &[t(w), t(w)]);
    add(&mut quad, &int(4), "abij,abkl->ijkl", &[t(w), t(w)]);
    vec![("norm", norm), ("ricci-square", sq), ("quadratic", quad)]
}

const W6_SQ: [(i64, &str, &str, &str); 18] = [
    (1, "ij", "hk", "lm"),
    (1, "ik", "hm", "lj"),
    (1, "im", "hj", "lk"),
    (-1, "ik", "hj", "lm"),
    (-1, "ij", "hm", "lk"),
    (-1, "im", "hk", "lj"),
    (-1, "hj", "ik", "lm"),
    (-1, "hk", "im", "lj"),
    (-1, "hm", "ij", "lk"),
    (1, "hk", "ij", "lm"),
    (1, "hj", "im", "lk"),
    (1, "hm", "ik", "lj"),
    (-1, "lj", "hk", "im"),
    (-1, "lk", "hm", "ij"),
    (-1, "lm", "hj", "ik"),
    (1, "lk", "hj", "im"),
    (1, "lj", "hm", "ik"),
    (1, "lm", "hk", "ij"),
];

const W6_T: [(i64, &str, &str, &str); 9] = [
    (1, "ijkh", "ikjh", "lm"),
    (-1, "ijmh", "imjh", "lk"),
    (1, "ikmh", "imkh", "lj"),
    (-1, "ijkl", "ikjl", "hm"),
    (1, "ijml", "imjl", "hk"),
    (-1, "ikml", "imkl", "hj"),
    (1, "hjkl", "hkjl", "im"),
    (-1, "hjml", "hmjl", "ik"),
    (1, "hkml", "hmkl", "ij"),
];

const W6_S: [(i64, &str, &str); 9] = [
    (1, "ihjk", "lm"),
    (-1, "ihjm", "lk"),
    (1, "ihkm", "lj"),
    (-1, "iljk", "hm"),
    (1, "iljm", "hk"),
    (-1, "ilkm", "hj"),
    (1, "hljk", "im"),
    (-1, "hljm", "ik"),
    (1, "hlkm", "ij"),
];

const W6_A: [(i64, &str); 9] = [
    (1, "hjkmil"),
    (-1, "ljkmih"),
    (-1, "jhlikm"),
    (-1, "ijkmhl"),
    (1, "jihlmk"),
    (1, "jilhkm"),
    (-1, "hjmkil"),
    (1, "ljmkih"),
    (1, "ijmkhl"),
];

/// `signs_l` multiplies the six rows of the squared block whose first
/// index is `l`; `1` is the consistent choice.
fn weyl6_blocks(w: &Tensor, signs_l: i64) -> Vec<(&'static str, Tensor)> {
    let n = ein("abcd,abcd->", &[w, w]).value().clone();
    let norm = g6_alt().scale(&n);
    let tt = ein("iabc,jabc->ij", &[w, w]);
    let mut sq = Tensor::zeros(6, 6);
    for (s, x, a, b) in W6_SQ {
        let s = if x.starts_with('l') { s * signs_l } else { s };
        add(&mut sq, &int(-4 * s), &format!("{x},{a},{b}->ihjklm"), &[t(&tt), G, G]);
    }
    let tq = ein("iabj,kabh->ijkh", &[w, w]);
    let mut tb = Tensor::zeros(6, 6);
    for (s, x, y, a) in W6_T {
        add(&mut tb, &int(-8 * s), &format!("{x},{a}->ihjklm"), &[t(&tq), G]);
        add(&mut tb, &int(8 * s), &format!("{y},{a}->ihjklm"), &[t(&tq), G]);
    }
    let ss = ein("abpq,abrs->pqrs", &[w, w]);
    let mut sb = Tensor::zeros(6, 6);
    for (s, x, a) in W6_S {
        add(&mut sb, &int(4 * s), &format!("{x},{a}->ihjklm"), &[t(&ss), G]);
    }
    let aa = ein("apqr,astu->pqrstu", &[w, w]);
    let mut ab = Tensor::zeros(6, 6);
    for (s, x) in W6_A {
        add(&mut ab, &int(8 * s), &format!("{x}->ihjklm"), &[t(&aa)]);
    }
    vec![
        ("norm", norm),
        ("ricci-square", sq),
        ("t-block", tb),
        ("s-block", sb),
        ("a-block", ab),
    ]
}

fn sum_blocks(blocks: &[(&'static str, Tensor)]) -> Tensor {
    let mut acc = Tensor::zeros(blocks[0].1.dim(), blocks[0].1.rank());
    for (_, b) in blocks {
        acc = acc.add(b);
    }
    acc
}

/// Expands the Weyl identity with two curvature copies term by term in
/// dimension 5 or 6 and checks it against the delta evaluation grade by
/// grade.
pub fn weyl_expansion(rc: &CurvatureTensor) -> Result<WeylExpansion, IdentityError> {
    let w = weyl(rc)?;
    let dim = rc.dim();
    let (blocks, grade_map, perm): (_, Vec<(usize, Vec<usize>)>, Option<[usize; 6]>) = match dim {
        5 => (
            weyl5_blocks(w.tensor()),
            vec![(2, vec![0]), (1, vec![1]), (0, vec![2])],
            None,
        ),
        6 => (
            weyl6_blocks(w.tensor(), 1),
            vec![(3, vec![0]), (2, vec![1]), (1, vec![2, 3]), (0, vec![4])],
            // delta output (i, h, l, j, k, m) -> (i, h, j, k, l, m)
            Some([0, 1, 3, 4, 2, 5]),
        ),
        _ => {
            return Err(IdentityError::Dim {
                identity: "weyl expansion",
                need: 5,
                got: dim,
            })
        }
    };
    let d = patterson_delta(w.tensor(), 2, LeftoverMode::Free)?;
    let arrange = |vals: &[Scalar]| -> Result<Tensor, IdentityError> {
        let x = d.dense(vals)?;
        Ok(match perm {
            Some(p) => x.permute(&p),
            None => x,
        })
    };
    let four = int(4);
    let mut grades = Vec::new();
    for (g, idx) in &grade_map {
        let mut want = Tensor::zeros(dim, blocks[0].1.rank());
        for &k in idx {
            want = want.add(&blocks[k].1);
        }
        grades.push((*g, arrange(&d.grade(*g))? == want.scale(&four)));
    }
    let extra = d
        .by_grade
        .keys()
        .any(|g| !grade_map.iter().any(|(h, _)| h == g) && !d.grade(*g).iter().all(Scalar::is_zero));
    if extra {
        grades.push((usize::MAX, false));
    }
    let sum = sum_blocks(&blocks);
    let total_agrees = arrange(&d.total())? == sum.scale(&four);
    Ok(WeylExpansion {
        dim,
        blocks,
        sum,
        grades,
        total_agrees,
    })
}

/// Dimension-6 term-by-term Weyl sum with the `l` rows of the squared
/// block taking the opposite sign; nonzero in general.
pub fn weyl6_sum_with_flipped_l_rows(rc: &CurvatureTensor) -> Result<Tensor, IdentityError> {
    need_dim("weyl expansion", rc, 6)?;
    let w = weyl(rc)?;
    Ok(sum_blocks(&weyl6_blocks(w.tensor(), -1)))
}

// ---------------------------------------------------------------------------
// Dimension 5

fn lemma5_blocks(rc: &CurvatureTensor, inv: &InvariantReport) -> Vec<(&'static str, Tensor)> {
    let r = rc.tensor();
    let tau = &inv.tau;
    let c0 = &inv.r_norm_sq + &(&(tau * tau) * &q(1, 5));
    let b1 = g4_alt(5).scale(&c0);
    let tc = &inv.t_check;
    let mut b2 = Tensor::zeros(5, 4);
    for (s, spec) in [
        (1, "ik,jl->ijkl"),
        (1, "jl,ik->ijkl"),
        (-1, "il,jk->ijkl"),
        (-1, "jk,il->ijkl"),
    ] {
        add(&mut b2, &int(-4 * s), spec, &[t(tc), G]);
    }
    let mut b3 = Tensor::zeros(5, 4);
    add(&mut b3, &int(8), "iabl,kabj->ijkl", &[t(r), t(r)]);
    add(&mut b3, &int(-8), "iabk,labj->ijkl", &[t(r), t(r)]);
    let b4 = ein("abij,abkl->ijkl", &[r, r]).scale(&int(4));
    let b5 = r.scale(&(tau * &q(12, 5)));
    vec![
        ("metric", b1),
        ("ricci-square", b2),
        ("quadratic", b3),
        ("s", b4),
        ("linear", b5),
    ]
}

/// Rank-4 Einstein identity in dimension 5.
pub fn lemma5_einstein_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("lemma5", rc, 5)?;
    let inv = invariants(rc);
    let res = sum_blocks(&lemma5_blocks(rc, &inv));
    Ok(ResidualReport::dense("lemma5", Hypothesis::Einstein, &inv, res))
}

fn thm_a_einstein(inv: &InvariantReport) -> Tensor {
    let tau = &inv.tau;
    let mut x = inv.t_check.scale(&(tau * &int(2)));
    x = x.add(&inv.r_check.scale(&int(4)));
    x = x.add(&inv.r_hat2.scale(&int(4)));
    x = x.add(&inv.r_ring2.scale(&int(-8)));
    let c = &(&(tau * &inv.r_norm_sq) * &q(1, 5)) + &(&tau.pow(3) * &q(1, 25));
    x.sub(&Tensor::metric(inv.dim).scale(&c))
}

/// `2τŤ + 4Ř + 4R̂ − 8R̊ − (τ|R|²/5 + τ³/25) g`.
pub fn thm_a_einstein_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("thmA-a", rc, 5)?;
    let inv = invariants(rc);
    Ok(ResidualReport::dense(
        "thmA-a",
        Hypothesis::Einstein,
        &inv,
        thm_a_einstein(&inv),
    ))
}

fn pa5_blocks(rc: &CurvatureTensor, inv: &InvariantReport) -> Vec<(&'static str, Tensor)> {
    let r = rc.tensor();
    let tau = &inv.tau;
    let b1 = ein("ijab,abkl->ijkl", &[r, r]);
    let b2 = ein("iabl,kabj->ijkl", &[r, r]).scale(&int(2));
    let b3 = ein("iabk,labj->ijkl", &[r, r]).scale(&int(-2));
    let b4 = r.scale(&(tau * &q(3, 5)));
    let c = &(&inv.r_norm_sq * &q(3, 20)) - &(&(tau * tau) * &q(1, 20));
    let b5 = g4_alt(5).scale(&-c);
    vec![("s", b1), ("t1", b2), ("t2", b3), ("linear", b4), ("metric", b5)]
}

/// Rank-4 super-Einstein identity in dimension 5.
pub fn pa5_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("pa5", rc, 5)?;
    let inv = invariants(rc);
    let res = sum_blocks(&pa5_blocks(rc, &inv));
    Ok(ResidualReport::dense("pa5", Hypothesis::SuperEinstein, &inv, res))
}

/// The four left-hand blocks of the rank-4 super-Einstein identity at one
/// index tuple (0-based).
pub fn pa5_block_values(rc: &CurvatureTensor, idx: [usize; 4]) -> Result<[Scalar; 4], IdentityError> {
    need_dim("pa5", rc, 5)?;
    let inv = invariants(rc);
    let b = pa5_blocks(rc, &inv);
    Ok([0, 1, 2, 3].map(|k| b[k].1.get(&idx).clone()))
}

fn thm_a_super(inv: &InvariantReport) -> Tensor {
    let tau = &inv.tau;
    let x = inv.r_ring2.scale(&int(4)).sub(&inv.r_hat2.scale(&int(2)));
    let c = &(&(tau * &inv.r_norm_sq) * &q(9, 50)) - &(&tau.pow(3) * &q(1, 50));
    x.sub(&Tensor::metric(inv.dim).scale(&c))
}

/// `4R̊ − 2R̂ − (9τ|R|²/50 − τ³/50) g`.
pub fn thm_a_super_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("thmA-b", rc, 5)?;
    let inv = invariants(rc);
    Ok(ResidualReport::dense(
        "thmA-b",
        Hypothesis::SuperEinstein,
        &inv,
        thm_a_super(&inv),
    ))
}

/// One transvected sub-identity: `lhs` is computed by contraction, `rhs`
/// is the closed form in terms of invariants.
#[derive(Debug, Clone)]
pub struct SubIdentity {
    pub label: String,
    pub lhs: Tensor,
    pub rhs: Tensor,
}

impl SubIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn sub(label: impl Into<String>, lhs: Tensor, rhs: Tensor) -> SubIdentity {
    SubIdentity {
        label: label.into(),
        lhs,
        rhs,
    }
}

/// Contracts each block of the rank-4 Einstein identity with `R_pjkl`
/// over `j, k, l`. The last entry compares the whole contraction with
/// twice the rank-2 Einstein residual.
pub fn lemma5_transvections(rc: &CurvatureTensor) -> Result<Vec<SubIdentity>, IdentityError> {
    need_dim("lemma5", rc, 5)?;
    let inv = invariants(rc);
    let r = rc.tensor();
    let tau = &inv.tau;
    let g = Tensor::metric(5);
    let blocks = lemma5_blocks(rc, &inv);
    let tv = |x: &Tensor| ein("ijkl,pjkl->ip", &[x, r]);
    let c0 = &inv.r_norm_sq + &(&(tau * tau) * &q(1, 5));
    let rhs = [
        g.scale(&(&(tau * &q(-2, 5)) * &c0)),
        inv.t_check
            .scale(&(tau * &q(-2, 5)))
            .sub(&inv.r_check.scale(&int(2)))
            .scale(&int(-4)),
        inv.r_ring2.scale(&int(-16)).add(&inv.r_hat2.scale(&int(4))),
        inv.r_hat2.scale(&int(4)),
        inv.t_check.scale(&(tau * &q(12, 5))),
    ];
    let mut out: Vec<SubIdentity> = blocks
        .iter()
        .zip(rhs)
        .map(|((name, b), rhs)| sub(*name, tv(b), rhs))
        .collect();
    out.push(sub(
        "total",
        tv(&sum_blocks(&blocks)),
        thm_a_einstein(&inv).scale(&int(2)),
    ));
    Ok(out)
}

/// Contracts each block of the rank-4 super-Einstein identity with
/// `R_pjkl`, using the super-Einstein closed forms.
pub fn pa5_transvections(rc: &CurvatureTensor) -> Result<Vec<SubIdentity>, IdentityError> {
    need_dim("pa5", rc, 5)?;
    let inv = invariants(rc);
    let r = rc.tensor();
    let tau = &inv.tau;
    let g = Tensor::metric(5);
    let tv = |x: &Tensor| ein("ijkl,pjkl->ip", &[x, r]);
    let ring_minus = inv.r_ring2.sub(&inv.r_hat2.scale(&q(1, 4))).scale(&int(-2));
    let b = pa5_blocks(rc, &inv);
    Ok(vec![
        sub("s", tv(&b[0].1), inv.r_hat2.clone()),
        sub("t1", tv(&b[1].1), ring_minus.clone()),
        sub("t2", tv(&b[2].1), ring_minus),
        sub("linear", tv(&b[3].1), g.scale(&(&(tau * &inv.r_norm_sq) * &q(3, 25)))),
        sub("metric", tv(&g4_alt(5)), g.scale(&(tau * &q(-2, 5)))),
    ])
}

// ---------------------------------------------------------------------------
// Dimension 6

/// `T_pqrs = R_pabq R_rabs`, `S_pqrs = R_abpq R_abrs`, `A_pqrstu = R_apqr R_astu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsaDecomposition {
    pub t: Tensor,
    pub s: Tensor,
    pub a: Tensor,
}

pub fn tsa(rc: &CurvatureTensor) -> TsaDecomposition {
    let r = rc.tensor();
    TsaDecomposition {
        t: ein("pabq,rabs->pqrs", &[r, r]),
        s: ein("abpq,abrs->pqrs", &[r, r]),
        a: ein("apqr,astu->pqrstu", &[r, r]),
    }
}

/// `(sign, Ť index, pair, pair, pair, pair)`: `s·Ť_x (g g − g g)`.
const SQ6: [(i64, &str, &str, &str, &str, &str); 9] = [
    (1, "ij", "hk", "lm", "hm", "lk"),
    (-1, "ik", "hj", "lm", "hm", "lj"),
    (1, "im", "hj", "lk", "hk", "lj"),
    (-1, "hj", "ik", "lm", "im", "lk"),
    (1, "hk", "ij", "lm", "im", "lj"),
    (-1, "hm", "ij", "lk", "ik", "lj"),
    (1, "lj", "ik", "hm", "im", "hk"),
    (-1, "lk", "ij", "hm", "im", "hj"),
    (1, "lm", "ij", "hk", "ik", "hj"),
];

/// `(sign, T index, T index, S/R index, pair)`:
/// `s·(−T_p + T_q + S_r/2 + τR_r/3) g_pair`.
const TSR6: [(i64, &str, &str, &str, &str); 9] = [
    (1, "ijkh", "ikjh", "ihjk", "lm"),
    (-1, "ijkl", "ikjl", "iljk", "hm"),
    (-1, "ijmh", "imjh", "ihjm", "lk"),
    (1, "ijml", "imjl", "iljm", "hk"),
    (1, "ikmh", "imkh", "ihkm", "lj"),
    (-1, "ikml", "imkl", "ilkm", "hj"),
    (-1, "hjml", "hmjl", "hljm", "ik"),
    (1, "hjkl", "hkjl", "hljk", "im"),
    (1, "hkml", "hmkl", "hlkm", "ij"),
];

const A6: [(i64, &str); 9] = [
    (1, "hjkmil"),
    (-1, "ljkmih"),
    (-1, "ijkmhl"),
    (1, "ijmkhl"),
    (-1, "hjmkil"),
    (1, "ljmkih"),
    (-1, "ikmjhl"),
    (1, "hkmjil"),
    (-1, "lkmjih"),
];

/// `(sign, R index, pair)` for the curvature-times-metric terms of the
/// last term group.
const RG6: [(i64, &str, &str); 9] = [
    (-1, "ilkm", "hj"),
    (1, "iljm", "hk"),
    (1, "hljk", "im"),
    (1, "ihjk", "lm"),
    (1, "ihkm", "lj"),
    (-1, "ihjm", "lk"),
    (-1, "iljk", "hm"),
    (1, "hlkm", "ij"),
    (-1, "hljm", "ik"),
];

struct Six<'a> {
    r: &'a Tensor,
    inv: InvariantReport,
    tsa: TsaDecomposition,
}

impl<'a> Six<'a> {
    fn new(rc: &'a CurvatureTensor) -> Self {
        Six {
            r: rc.tensor(),
            inv: invariants(rc),
            tsa: tsa(rc),
        }
    }

    fn zero() -> Tensor {
        Tensor::zeros(6, 6)
    }

    fn sq_item(&self, k: usize, coef: &Scalar) -> Tensor {
        let (s, x, a1, b1, a2, b2) = SQ6[k];
        let mut acc = Self::zero();
        let c = coef * &int(s);
        add(
            &mut acc,
            &c,
            &format!("{x},{a1},{b1}->ihjklm"),
            &[t(&self.inv.t_check), G, G],
        );
        add(
            &mut acc,
            &-&c,
            &format!("{x},{a2},{b2}->ihjklm"),
            &[t(&self.inv.t_check), G, G],
        );
        acc
    }

    fn tsr_item(&self, k: usize) -> Tensor {
        let (s, p, qq, r, pair) = TSR6[k];
        let s = int(s);
        let tt = t(&self.tsa.t);
        let mut acc = Self::zero();
        add(&mut acc, &-&s, &format!("{p},{pair}->ihjklm"), &[tt, G]);
        add(&mut acc, &s, &format!("{qq},{pair}->ihjklm"), &[tt, G]);
        add(
            &mut acc,
            &(&s * &q(1, 2)),
            &format!("{r},{pair}->ihjklm"),
            &[t(&self.tsa.s), G],
        );
        add(
            &mut acc,
            &(&(&s * &self.inv.tau) * &q(1, 3)),
            &format!("{r},{pair}->ihjklm"),
            &[t(self.r), G],
        );
        acc
    }

    fn a_block(&self) -> Tensor {
        let mut acc = Self::zero();
        for (s, x) in A6 {
            add(&mut acc, &int(s), &format!("{x}->ihjklm"), &[t(&self.tsa.a)]);
        }
        acc
    }

    fn metric_block(&self, c: &Scalar) -> Tensor {
        g6_alt().scale(c)
    }

    /// Blocks of the rank-6 Einstein identity.
    fn lemma6_blocks(&self) -> Vec<(&'static str, Tensor)> {
        let tau = &self.inv.tau;
        let c = &(&self.inv.r_norm_sq + &(&(tau * tau) * &q(1, 3))) * &q(1, 8);
        let mut sq = Self::zero();
        for k in 0..9 {
            sq = sq.add(&self.sq_item(k, &q(-1, 2)));
        }
        let mut tsr = Self::zero();
        for k in 0..9 {
            tsr = tsr.add(&self.tsr_item(k));
        }
        vec![
            ("metric", self.metric_block(&c)),
            ("ricci-square", sq),
            ("tsr", tsr),
            ("a-block", self.a_block()),
        ]
    }

    fn eq42_blocks(&self) -> Vec<(&'static str, Tensor)> {
        let tau = &self.inv.tau;
        let c = &(&self.inv.r_norm_sq - &(&(tau * tau) * &q(1, 3))) * &q(-1, 8);
        let mut tsr = Self::zero();
        for k in 0..9 {
            tsr = tsr.add(&self.tsr_item(k));
        }
        vec![
            ("metric", self.metric_block(&c)),
            ("tsr", tsr),
            ("a-block", self.a_block()),
        ]
    }

    fn thm_b_einstein(&self) -> Tensor {
        let i = &self.inv;
        let tau = &i.tau;
        let mut x = i.t_check.scale(&(tau * &int(4)));
        x = x.add(&i.r_check.scale(&int(12)));
        x = x.add(&i.r_hat2.scale(&int(12)));
        x = x.add(&i.r_ring2.scale(&int(-24)));
        let c = &(&(tau * &i.r_norm_sq) - &(&i.r_ring0 * &int(4))) + &(&i.r_hat0 * &int(2));
        x.sub(&Tensor::metric(6).scale(&c))
    }

    fn thm_b_einstein_alt(&self) -> Tensor {
        let i = &self.inv;
        let tau = &i.tau;
        let c = &(&(-&(tau * &i.r_norm_sq)) + &(&i.r_ring0 * &int(4))) - &(&i.r_hat0 * &int(2));
        let mut x = Tensor::metric(6).scale(&c);
        x = x.add(&i.r_check.scale(&int(12)));
        x = x.add(&i.r_hat2.scale(&int(12)));
        x = x.add(&i.r_ring2.scale(&int(-24)));
        x.add(&i.t_check.scale(&(tau * &int(4))))
    }

    fn thm_b_super(&self) -> Tensor {
        let i = &self.inv;
        let x = i.r_ring2.scale(&int(2)).sub(&i.r_hat2);
        let c = &(&(&i.r_ring0 * &int(2)) - &i.r_hat0) * &q(1, 6);
        x.sub(&Tensor::metric(6).scale(&c))
    }

    fn transvect(&self, x: &Tensor) -> Tensor {
        ein("ihjklm,ihjk->lm", &[x, self.r])
    }
}

/// Rank-6 Einstein identity in dimension 6, free order `(i,h,j,k,l,m)`.
pub fn lemma6_einstein_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("lemma6", rc, 6)?;
    let six = Six::new(rc);
    let res = sum_blocks(&six.lemma6_blocks());
    Ok(ResidualReport::dense("lemma6", Hypothesis::Einstein, &six.inv, res))
}

/// Named blocks of the rank-6 Einstein identity.
pub fn lemma6_blocks(rc: &CurvatureTensor) -> Result<Vec<(&'static str, Tensor)>, IdentityError> {
    need_dim("lemma6", rc, 6)?;
    Ok(Six::new(rc).lemma6_blocks())
}

/// Rank-6 super-Einstein identity in dimension 6.
pub fn super6_intermediate_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("eq42", rc, 6)?;
    let six = Six::new(rc);
    let res = sum_blocks(&six.eq42_blocks());
    Ok(ResidualReport::dense("eq42", Hypothesis::SuperEinstein, &six.inv, res))
}

/// `4τŤ + 12Ř + 12R̂ − 24R̊ − (τ|R|² − 4R̊ + 2R̂) g`.
pub fn thm_b_einstein_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("thmB-a", rc, 6)?;
    let six = Six::new(rc);
    Ok(ResidualReport::dense(
        "thmB-a",
        Hypothesis::Einstein,
        &six.inv,
        six.thm_b_einstein(),
    ))
}

/// Same identity arranged as `(−τ|R|² + 4R̊ − 2R̂) g + 12Ř + 12R̂ − 24R̊ + 4τŤ`.
pub fn thm_b_einstein_alt_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("thmB-a-alt", rc, 6)?;
    let six = Six::new(rc);
    Ok(ResidualReport::dense(
        "thmB-a-alt",
        Hypothesis::Einstein,
        &six.inv,
        six.thm_b_einstein_alt(),
    ))
}

/// `2R̊ − R̂ − (2R̊ − R̂) g / 6`.
pub fn thm_b_super_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    need_dim("thmB-b", rc, 6)?;
    let six = Six::new(rc);
    Ok(ResidualReport::dense(
        "thmB-b",
        Hypothesis::SuperEinstein,
        &six.inv,
        six.thm_b_super(),
    ))
}

/// Both sides of one of the 34 term groups produced by substituting the
/// Einstein Weyl tensor into the six-dimensional identity.
#[derive(Debug, Clone)]
pub struct TermGroup {
    /// 1-based position.
    pub item: usize,
    /// Expanded form with Ricci terms.
    pub lhs: Tensor,
    /// Einstein-simplified form.
    pub rhs: Tensor,
}

impl TermGroup {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone)]
pub struct TermGroups {
    pub groups: Vec<TermGroup>,
    /// Sum of simplified forms equals 8 × the rank-6 Einstein identity.
    pub rhs_sum_matches: bool,
    pub rhs_sum_gap: Tensor,
}

/// Evaluates all 34 term groups on both sides.
pub fn einstein6_term_groups(rc: &CurvatureTensor) -> Result<TermGroups, IdentityError> {
    need_dim("appendix34", rc, 6)?;
    let six = Six::new(rc);
    let r = six.r;
    let inv = &six.inv;
    let tau = &inv.tau;
    let rho = &inv.ricci;
    let g = Tensor::metric(6);
    let tau2 = tau * tau;
    let mut groups = Vec::with_capacity(34);

    // 1-6
    let lc = &(&inv.r_norm_sq - &(&inv.ricci_norm_sq * &int(4))) + &tau2;
    let rc6 = &inv.r_norm_sq + &(&tau2 * &q(1, 3));
    for (n, (s, a, b, c)) in G6.iter().enumerate() {
        let spec = format!("{a},{b},{c}->ihjklm");
        let mut lhs = Six::zero();
        add(&mut lhs, &(&lc * &int(*s)), &spec, &[G, G, G]);
        let mut rhs = Six::zero();
        add(&mut rhs, &(&rc6 * &int(*s)), &spec, &[G, G, G]);
        groups.push(TermGroup { item: n + 1, lhs, rhs });
    }

    // 7-24: rank-2 brackets on generic slots (x, y)
    let mut l2 = inv.t_check.scale(&int(-4));
    add(&mut l2, &int(8), "xa,ya->xy", &[t(rho), t(rho)]);
    add(&mut l2, &int(8), "xaby,ab->xy", &[t(r), t(rho)]);
    l2 = l2.sub(&rho.scale(&(tau * &int(4))));
    let r2 = inv.t_check.scale(&int(-4)).sub(&g.scale(&(&tau2 * &q(2, 9))));
    for (n, (s, x, a1, b1, a2, b2)) in SQ6.iter().enumerate() {
        for (k, (a, b, sign)) in [(a1, b1, *s), (a2, b2, -*s)].into_iter().enumerate() {
            let spec = format!("{x},{a},{b}->ihjklm");
            let mut lhs = Six::zero();
            add(&mut lhs, &int(sign), &spec, &[t(&l2), G, G]);
            let mut rhs = Six::zero();
            add(&mut rhs, &int(sign), &spec, &[t(&r2), G, G]);
            groups.push(TermGroup {
                item: 7 + 2 * n + k,
                lhs,
                rhs,
            });
        }
    }

    // 25-33: rank-4 brackets on generic slots (x, y, u, v)
    let (tt, ss) = (&six.tsa.t, &six.tsa.s);
    let mut common = Tensor::zeros(6, 4);
    add(&mut common, &int(-8), "xuvy->xyuv", &[t(tt)]);
    add(&mut common, &int(8), "xvuy->xyuv", &[t(tt)]);
    add(&mut common, &int(4), "xyuv->xyuv", &[t(ss)]);
    let mut l4 = common.clone();
    add(&mut l4, &int(-8), "axuv,ay->xyuv", &[t(r), t(rho)]);
    add(&mut l4, &int(8), "avxy,au->xyuv", &[t(r), t(rho)]);
    add(&mut l4, &int(-8), "auxy,av->xyuv", &[t(r), t(rho)]);
    add(&mut l4, &int(8), "ayuv,ax->xyuv", &[t(r), t(rho)]);
    add(&mut l4, &int(8), "xu,yv->xyuv", &[t(rho), t(rho)]);
    add(&mut l4, &int(-8), "xv,yu->xyuv", &[t(rho), t(rho)]);
    l4 = l4.sub(&r.scale(&(tau * &int(4))));
    let mut r4 = common;
    r4 = r4.add(&r.scale(&(tau * &q(4, 3))));
    add(&mut r4, &(&tau2 * &q(2, 9)), "xu,yv->xyuv", &[G, G]);
    add(&mut r4, &(&tau2 * &q(-2, 9)), "xv,yu->xyuv", &[G, G]);
    for (n, (s, _, _, x, pair)) in TSR6.iter().enumerate() {
        let spec = format!("{x},{pair}->ihjklm");
        let mut lhs = Six::zero();
        add(&mut lhs, &int(*s), &spec, &[t(&l4), G]);
        let mut rhs = Six::zero();
        add(&mut rhs, &int(*s), &spec, &[t(&r4), G]);
        groups.push(TermGroup { item: 25 + n, lhs, rhs });
    }

    // 34
    let a8 = six.a_block().scale(&int(8));
    let mut lhs = a8.clone();
    let mut rhs = a8;
    for (s, x, pair) in RG6 {
        let spec = format!("{x},{pair}->ihjklm");
        add(&mut lhs, &int(8 * s), &spec, &[t(r), t(rho)]);
        add(&mut rhs, &(&(tau * &q(4, 3)) * &int(s)), &spec, &[t(r), G]);
    }
    groups.push(TermGroup { item: 34, lhs, rhs });

    let mut total = Six::zero();
    for gr in &groups {
        total = total.add(&gr.rhs);
    }
    let gap = total.sub(&sum_blocks(&six.lemma6_blocks()).scale(&int(8)));
    Ok(TermGroups {
        groups,
        rhs_sum_matches: gap.is_zero(),
        rhs_sum_gap: gap,
    })
}

/// Residual of the first failing term group (or of the group-sum check);
/// zero when all 34 groups hold and sum correctly.
pub fn appendix34_residual(rc: &CurvatureTensor) -> Result<ResidualReport, IdentityError> {
    let groups = einstein6_term_groups(rc)?;
    let inv = invariants(rc);
    let failing = groups.groups.iter().find(|g| !g.holds());
    let (res, note) = match failing {
        Some(g) => (g.lhs.sub(&g.rhs), Some(format!("term group {} differs", g.item))),
        None if !groups.rhs_sum_matches => (groups.rhs_sum_gap.clone(), Some("group sum differs".to_string())),
        None => (Six::zero(), None),
    };
    let mut rep = ResidualReport::dense("appendix34", Hypothesis::Einstein, &inv, res);
    rep.note = note;
    Ok(rep)
}

/// Contracts each term of the rank-6 Einstein identity with `R_ihjk` over
/// `i, h, j, k` and compares with the closed forms valid for Einstein
/// tensors. The last entry compares the whole contraction with
/// `−½` × the rank-2 Einstein residual.
pub fn lemma6_transvections(rc: &CurvatureTensor) -> Result<Vec<SubIdentity>, IdentityError> {
    need_dim("lemma6", rc, 6)?;
    let six = Six::new(rc);
    let i = &six.inv;
    let tau = &i.tau;
    let g = Tensor::metric(6);
    let mut out = Vec::new();

    let c = &(&i.r_norm_sq + &(&(tau * tau) * &q(1, 3))) * &q(1, 8);
    let rhs = g.scale(&(&(&(tau * &i.r_norm_sq) + &(&tau.pow(3) * &q(1, 3))) * &q(-1, 6)));
    out.push(sub("metric", six.transvect(&six.metric_block(&c)), rhs));

    let x = g
        .scale(&(&(tau * &i.r_norm_sq) * &q(1, 12)))
        .sub(&i.r_check.scale(&q(1, 2)));
    let y = i.t_check.scale(&(tau * &q(-1, 6)));
    let z = i.t_check.scale(tau);
    let sq_rhs = [&x, &x, &y, &x, &x, &y, &y, &y, &z];
    for (k, rhs) in sq_rhs.into_iter().enumerate() {
        let item = six.sq_item(k, &q(-1, 2));
        out.push(sub(
            format!("ricci-square {}", k + 1),
            six.transvect(&item),
            rhs.clone(),
        ));
    }

    let first = g.scale(&(&(&(&i.r_ring0 * &int(-2)) + &i.r_hat0) + &(&(tau * &i.r_norm_sq) * &q(1, 3))));
    let b = i
        .r_ring2
        .scale(&int(2))
        .sub(&i.r_hat2)
        .sub(&i.t_check.scale(&(tau * &q(1, 3))));
    let cc = g
        .scale(&(&tau.pow(3) * &q(1, 72)))
        .sub(&i.t_check.scale(&(tau * &q(1, 4))));
    let tsr_rhs = [&first, &b, &b, &cc, &b, &cc, &cc, &b, &cc];
    for (k, rhs) in tsr_rhs.into_iter().enumerate() {
        out.push(sub(
            format!("tsr {}", k + 1),
            six.transvect(&six.tsr_item(k)),
            rhs.clone(),
        ));
    }

    let a_rhs = i
        .r_check
        .scale(&int(-4))
        .sub(&i.r_hat2.scale(&int(2)))
        .add(&i.r_ring2.scale(&int(4)));
    out.push(sub("a-block", six.transvect(&six.a_block()), a_rhs));

    let total = six.transvect(&sum_blocks(&six.lemma6_blocks()));
    out.push(sub("total", total, six.thm_b_einstein().scale(&q(-1, 2))));
    Ok(out)
}

/// Representative contractions of the rank-6 super-Einstein identity with
/// `R_ihjk`, using super-Einstein closed forms.
pub fn super6_transvections(rc: &CurvatureTensor) -> Result<Vec<SubIdentity>, IdentityError> {
    need_dim("eq42", rc, 6)?;
    let six = Six::new(rc);
    let i = &six.inv;
    let tau = &i.tau;
    let g = Tensor::metric(6);
    let blocks = six.eq42_blocks();
    let metric_rhs = g.scale(&(&(tau * &(&i.r_norm_sq - &(&(tau * tau) * &q(1, 3)))) * &q(1, 6)));
    let first = g.scale(&(&(&(&i.r_ring0 * &int(-2)) + &i.r_hat0) + &(&(tau * &i.r_norm_sq) * &q(1, 3))));
    let second = i
        .r_ring2
        .scale(&int(2))
        .sub(&i.r_hat2)
        .sub(&g.scale(&(&(tau * &i.r_norm_sq) * &q(1, 18))));
    let a_rhs = g
        .scale(&(&(tau * &i.r_norm_sq) * &q(-1, 9)))
        .sub(&i.r_hat2.scale(&int(2)))
        .add(&i.r_ring2.scale(&int(4)));
    Ok(vec![
        sub("metric", six.transvect(&blocks[0].1), metric_rhs),
        sub("tsr 1", six.transvect(&six.tsr_item(0)), first),
        sub("tsr 2", six.transvect(&six.tsr_item(1)), second),
        sub("a-block", six.transvect(&blocks[2].1), a_rhs),
    ])
}

// ---------------------------------------------------------------------------
// Gauss-Bonnet integrand

/// `τ³ − 12τ|ρ|² + 3τ|R|² + 16ρ_ab ρ_ac ρ_bc − 24ρ_ab ρ_cd R_acbd
///  − 24ρ_uv R_abcu R_abcv + 8R_abcd R_aucv R_bvdu − 2R_abcd R_abuv R_cduv`.
pub fn gauss_bonnet_integrand_6(rc: &CurvatureTensor) -> Result<Scalar, IdentityError> {
    need_dim("gauss-bonnet", rc, 6)?;
    let r = rc.tensor();
    let rho = rc.ricci();
    let tau = rho.trace();
    let s = |spec: &str, ops: &[&Tensor]| ein(spec, ops).value().clone();
    let rho2 = s("ab,ab->", &[&rho, &rho]);
    let rn = s("abcd,abcd->", &[r, r]);
    let terms = [
        tau.pow(3),
        &(&tau * &rho2) * &int(-12),
        &(&tau * &rn) * &int(3),
        &s("ab,ac,bc->", &[&rho, &rho, &rho]) * &int(16),
        &s("ab,cd,acbd->", &[&rho, &rho, r]) * &int(-24),
        &s("uv,abcu,abcv->", &[&rho, r, r]) * &int(-24),
        &s("abcd,aucv,bvdu->", &[r, r, r]) * &int(8),
        &s("abcd,abuv,cduv->", &[r, r, r]) * &int(-2),
    ];
    Ok(terms.into_iter().sum())
}

/// The same bracket rebuilt from an invariant report, using
/// `R_abcd R_aucv R_bvdu = R̊ − R̂/4`.
pub fn gauss_bonnet_from_invariants(rc: &CurvatureTensor, inv: &InvariantReport) -> Scalar {
    let tau = &inv.tau;
    let rho = &inv.ricci;
    let rho3 = ein("ab,bc,ca->", &[rho, rho, rho]).value().clone();
    let rrr = ein("ab,cd,acbd->", &[rho, rho, rc.tensor()]).value().clone();
    let rt = ein("uv,uv->", &[rho, &inv.t_check]).value().clone();
    let p3 = &inv.r_ring0 - &(&inv.r_hat0 * &q(1, 4));
    [
        tau.pow(3),
        &(tau * &inv.ricci_norm_sq) * &int(-12),
        &(tau * &inv.r_norm_sq) * &int(3),
        &rho3 * &int(16),
        &rrr * &int(-24),
        &rt * &int(-24),
        &p3 * &int(8),
        &inv.r_hat0 * &int(-2),
    ]
    .into_iter()
    .sum()
}

/// Volume of the unit sphere `S^n` for even `n` as `(c, k)` meaning `c·π^k`.
pub fn even_sphere_volume(n: usize) -> (Scalar, u32) {
    assert!(n.is_multiple_of(2) && n > 0, "even dimension expected");
    let k = (n / 2) as u32;
    let double_fact: i64 = (1..=(2 * k as i64 - 1)).step_by(2).product();
    (Scalar::frac(1 << (k + 1), double_fact), k)
}

/// `χ = bracket · Vol / (384 π³)` for a pointwise constant integrand.
/// The volume must carry exactly `π³` so the transcendental factors cancel.
pub fn euler_characteristic_6(bracket: &Scalar, volume: (Scalar, u32)) -> Option<Scalar> {
    (volume.1 == 3).then(|| &(bracket * &volume.0) * &q(1, 384))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::constant_curvature;

    #[test]
    fn spec_shapes() {
        let s = patterson_spec(5, 2, LeftoverMode::Free).unwrap();
        assert_eq!((s.n, s.rank), (6, 4));
        let s = patterson_spec(6, 1, LeftoverMode::Traced).unwrap();
        assert_eq!(s.rank, 2);
        assert!(matches!(
            patterson_spec(5, 3, LeftoverMode::Free),
            Err(IdentityError::Order { max: 2, .. })
        ));
        assert!(patterson_spec(4, 0, LeftoverMode::Free).is_err());
    }

    #[test]
    fn sphere_volume() {
        assert_eq!(even_sphere_volume(2), (Scalar::int(4), 1));
        assert_eq!(even_sphere_volume(6), (Scalar::frac(16, 15), 3));
    }

    #[test]
    fn space_form_residuals_vanish() {
        let r5 = constant_curvature(5, &Scalar::int(1)).unwrap();
        assert!(lemma5_einstein_residual(&r5).unwrap().is_zero);
        assert!(pa5_residual(&r5).unwrap().is_zero);
        let r6 = constant_curvature(6, &Scalar::int(1)).unwrap();
        assert!(lemma6_einstein_residual(&r6).unwrap().is_zero);
        assert!(thm_b_super_residual(&r6).unwrap().is_zero);
        assert_eq!(gauss_bonnet_integrand_6(&r6).unwrap(), Scalar::int(720));
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        let r5 = constant_curvature(5, &Scalar::int(1)).unwrap();
        assert!(matches!(
            super6_intermediate_residual(&r5),
            Err(IdentityError::Dim { need: 6, got: 5, .. })
        ));
    }
}
