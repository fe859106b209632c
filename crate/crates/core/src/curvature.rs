//! Algebraic curvature tensors and their invariants.
//!
//! Sign convention: `ρ_ij = Σ_a R_iaaj`, and constant sectional curvature `k`
//! is `R_ijkl = k (g_il g_jk − g_ik g_jl)`.

use serde::Serialize;
use thiserror::Error;

use crate::contract::{ein, einsum_into, Operand, G};
use crate::scalar::Scalar;
use crate::tensor::{Entry, Tensor, TensorError, MAX_DIM, MIN_DIM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error("curvature tensor must have rank 4, got {0}")]
    Rank(usize),
    #[error("dimension {0} outside {MIN_DIM}..={MAX_DIM}")]
    Dim(usize),
    #[error("{identity} violated at {idx:?}")]
    Symmetry { identity: &'static str, idx: [usize; 4] },
    #[error("component list conflicts with {identity} at {idx:?}")]
    Conflict { identity: &'static str, idx: [usize; 4] },
    #[error("{0}")]
    Tensor(#[from] TensorError),
    #[error("operation needs dimension {need}, got {got}")]
    NeedDim { need: &'static str, got: usize },
}

fn first_violation(r: &Tensor) -> Option<(&'static str, [usize; 4])> {
    let d = r.dim();
    let v = |i, j, k, l| r.get(&[i, j, k, l]);
    type Check<'a> = (&'static str, Box<dyn Fn(usize, usize, usize, usize) -> bool + 'a>);
    let checks: [Check; 4] = [
        (
            "antisymmetry R_ijkl = -R_jikl",
            Box::new(|i, j, k, l| *v(i, j, k, l) == -v(j, i, k, l)),
        ),
        (
            "antisymmetry R_ijkl = -R_ijlk",
            Box::new(|i, j, k, l| *v(i, j, k, l) == -v(i, j, l, k)),
        ),
        (
            "pair symmetry R_ijkl = R_klij",
            Box::new(|i, j, k, l| v(i, j, k, l) == v(k, l, i, j)),
        ),
        (
            "first Bianchi R_ijkl + R_jkil + R_kijl = 0",
            Box::new(|i, j, k, l| (v(i, j, k, l) + v(j, k, i, l) + v(k, i, j, l)).is_zero()),
        ),
    ];
    for (name, ok) in &checks {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        if !ok(i, j, k, l) {
                            return Some((name, one_based(i, j, k, l)));
                        }
                    }
                }
            }
        }
    }
    None
}

/// A rank-4 tensor with validated curvature symmetries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureTensor {
    r: Tensor,
}

fn one_based(i: usize, j: usize, k: usize, l: usize) -> [usize; 4] {
    [i + 1, j + 1, k + 1, l + 1]
}

impl CurvatureTensor {
    /// Checks both antisymmetries, pair symmetry and the first Bianchi
    /// identity, reporting the first violation (1-based indices).
    pub fn validate(r: Tensor) -> Result<CurvatureTensor, CurvatureError> {
        if r.rank() != 4 {
            return Err(CurvatureError::Rank(r.rank()));
        }
        let d = r.dim();
        if !(MIN_DIM..=MAX_DIM).contains(&d) {
            return Err(CurvatureError::Dim(d));
        }
        if let Some((identity, idx)) = first_violation(&r) {
            return Err(CurvatureError::Symmetry { identity, idx });
        }
        Ok(CurvatureTensor { r })
    }

    /// Skips validation; the caller guarantees the symmetries.
    pub(crate) fn trusted(r: Tensor) -> CurvatureTensor {
        debug_assert!(CurvatureTensor::validate(r.clone()).is_ok());
        CurvatureTensor { r }
    }

    /// Expands independent components under the two antisymmetries and the
    /// pair swap, then validates (first Bianchi is checked, not imposed).
    pub fn from_components(dim: usize, comps: &[([usize; 4], Scalar)]) -> Result<CurvatureTensor, CurvatureError> {
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return Err(CurvatureError::Dim(dim));
        }
        let mut r = Tensor::zeros(dim, 4);
        let mut set = vec![false; r.len()];
        for ([i, j, k, l], val) in comps {
            let (i, j, k, l) = (*i, *j, *k, *l);
            let images = [
                ([i, j, k, l], 1),
                ([j, i, k, l], -1),
                ([i, j, l, k], -1),
                ([j, i, l, k], 1),
                ([k, l, i, j], 1),
                ([l, k, i, j], -1),
                ([k, l, j, i], -1),
                ([l, k, j, i], 1),
            ];
            for (idx, s) in images {
                let v = if s > 0 { val.clone() } else { -val };
                let o = r.offset(&idx);
                if set[o] && r.data()[o] != v {
                    let identity = if idx == [i, j, k, l] {
                        "duplicate entry"
                    } else {
                        "antisymmetry/pair symmetry"
                    };
                    return Err(CurvatureError::Conflict {
                        identity,
                        idx: one_based(idx[0], idx[1], idx[2], idx[3]),
                    });
                }
                set[o] = true;
                r.data_mut()[o] = v;
            }
        }
        CurvatureTensor::validate(r)
    }

    /// Parses 1-based JSON entries into [`CurvatureTensor::from_components`].
    pub fn from_entries(dim: usize, entries: &[Entry]) -> Result<CurvatureTensor, CurvatureError> {
        let mut comps = Vec::with_capacity(entries.len());
        for e in entries {
            let idx = e.zero_based(dim, 4)?;
            comps.push(([idx[0], idx[1], idx[2], idx[3]], e.val.clone()));
        }
        CurvatureTensor::from_components(dim, &comps)
    }

    /// One representative per orbit of the symmetry group: `i<j`, `k<l`,
    /// `(i,j) <= (k,l)`, nonzero only.
    pub fn independent_components(&self) -> Vec<Entry> {
        let d = self.dim();
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in 0..d {
                    for l in k + 1..d {
                        if (i, j) > (k, l) {
                            continue;
                        }
                        let v = self.get(i, j, k, l);
                        if !v.is_zero() {
                            out.push(Entry {
                                idx: vec![i + 1, j + 1, k + 1, l + 1],
                                val: v.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn tensor(&self) -> &Tensor {
        &self.r
    }

    pub fn into_tensor(self) -> Tensor {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Scalar {
        self.r.get(&[i, j, k, l])
    }

    pub fn scale(&self, s: &Scalar) -> CurvatureTensor {
        CurvatureTensor { r: self.r.scale(s) }
    }

    pub fn add(&self, other: &CurvatureTensor) -> CurvatureTensor {
        CurvatureTensor {
            r: self.r.add(&other.r),
        }
    }

    pub fn ricci(&self) -> Tensor {
        ein("iaaj->ij", &[&self.r])
    }

    pub fn tau(&self) -> Scalar {
        self.ricci().trace()
    }

    pub fn is_einstein(&self) -> bool {
        let rho = self.ricci();
        let m = Scalar::int(self.dim() as i64);
        rho == Tensor::metric(self.dim()).scale(&(&rho.trace() / &m))
    }
}

/// `k (g_il g_jk − g_ik g_jl)`.
pub fn constant_curvature(dim: usize, k: &Scalar) -> Result<CurvatureTensor, CurvatureError> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(CurvatureError::Dim(dim));
    }
    let mut r = Tensor::zeros(dim, 4);
    einsum_into(&mut r, k, "il,jk->ijkl", &[G, G]).expect("fixed spec");
    einsum_into(&mut r, &-k, "ik,jl->ijkl", &[G, G]).expect("fixed spec");
    Ok(CurvatureTensor::trusted(r))
}

fn ser_matrix<S: serde::Serializer>(t: &Tensor, s: S) -> Result<S::Ok, S::Error> {
    t.to_matrix().serialize(s)
}

/// Scalar and rank-2 invariants of one curvature tensor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub dim: usize,
    pub tau: Scalar,
    #[serde(serialize_with = "ser_matrix")]
    pub ricci: Tensor,
    pub ricci_norm_sq: Scalar,
    pub r_norm_sq: Scalar,
    /// `Ť_ij = R_iabc R_jabc`.
    #[serde(serialize_with = "ser_matrix")]
    pub t_check: Tensor,
    /// `Ř_ij = R_iuvj R_abcu R_abcv`.
    #[serde(serialize_with = "ser_matrix")]
    pub r_check: Tensor,
    /// `R̂_ij = R_ibcd R_jbuv R_cduv`.
    #[serde(serialize_with = "ser_matrix")]
    pub r_hat2: Tensor,
    /// `R̊_ij = R_ibcd R_jucv R_budv`.
    #[serde(serialize_with = "ser_matrix")]
    pub r_ring2: Tensor,
    /// `R̂ = R_abcd R_abuv R_cduv`.
    pub r_hat0: Scalar,
    /// `R̊ = R_abcd R_aucv R_budv`.
    pub r_ring0: Scalar,
    pub einstein: bool,
    pub super_einstein: bool,
}

impl InvariantReport {
    /// `Ř` as displayed is not obviously symmetric; this reports it.
    pub fn r_check_symmetric(&self) -> bool {
        self.r_check.is_symmetric()
    }
}

pub fn invariants(rc: &CurvatureTensor) -> InvariantReport {
    let r = rc.tensor();
    let m = rc.dim();
    let ricci = rc.ricci();
    let tau = ricci.trace();
    let ricci_norm_sq = ein("ab,ab->", &[&ricci, &ricci]).value().clone();
    let r_norm_sq = ein("abcd,abcd->", &[r, r]).value().clone();
    let t_check = ein("iabc,jabc->ij", &[r, r]);
    let r_check = ein("iuvj,abcu,abcv->ij", &[r, r, r]);
    let r_hat2 = ein("ibcd,jbuv,cduv->ij", &[r, r, r]);
    let r_ring2 = ein("ibcd,jucv,budv->ij", &[r, r, r]);
    let r_hat0 = ein("abcd,abuv,cduv->", &[r, r, r]).value().clone();
    let r_ring0 = ein("abcd,aucv,budv->", &[r, r, r]).value().clone();
    let g = Tensor::metric(m);
    let mm = Scalar::int(m as i64);
    let einstein = ricci == g.scale(&(&tau / &mm));
    let super_einstein = einstein && t_check == g.scale(&(&r_norm_sq / &mm));
    InvariantReport {
        dim: m,
        tau,
        ricci,
        ricci_norm_sq,
        r_norm_sq,
        t_check,
        r_check,
        r_hat2,
        r_ring2,
        r_hat0,
        r_ring0,
        einstein,
        super_einstein,
    }
}

/// `W = R − (1/(m−2))(ρ_ps g_qr + ρ_qr g_ps − ρ_pr g_qs − ρ_qs g_pr)
///        + τ/((m−1)(m−2)) (g_ps g_qr − g_pr g_qs)`.
pub fn weyl(rc: &CurvatureTensor) -> Result<CurvatureTensor, CurvatureError> {
    let m = rc.dim();
    if m < 3 {
        return Err(CurvatureError::NeedDim { need: ">= 3", got: m });
    }
    let rho = rc.ricci();
    let tau = rho.trace();
    let c1 = Scalar::frac(-1, m as i64 - 2);
    let c2 = &tau * &Scalar::frac(1, (m as i64 - 1) * (m as i64 - 2));
    let mut w = rc.tensor().clone();
    let p = Operand::T(&rho);
    for (spec, s) in [
        ("ps,qr->pqrs", 1),
        ("qr,ps->pqrs", 1),
        ("pr,qs->pqrs", -1),
        ("qs,pr->pqrs", -1),
    ] {
        einsum_into(&mut w, &(&c1 * &Scalar::int(s)), spec, &[p, G]).expect("fixed spec");
    }
    einsum_into(&mut w, &c2, "ps,qr->pqrs", &[G, G]).expect("fixed spec");
    einsum_into(&mut w, &-&c2, "pr,qs->pqrs", &[G, G]).expect("fixed spec");
    Ok(CurvatureTensor::trusted(w))
}

/// `(P1, P2, P3)` with `P1_ij = R_ibcd R_jbuv R_cudv`,
/// `P2_ij = R_ibcd R_jubv R_cudv`, `P3_ij = R_ibcd R_jucv R_bvdu`.
pub fn triple_products(rc: &CurvatureTensor) -> (Tensor, Tensor, Tensor) {
    let r = rc.tensor();
    (
        ein("ibcd,jbuv,cudv->ij", &[r, r, r]),
        ein("ibcd,jubv,cudv->ij", &[r, r, r]),
        ein("ibcd,jucv,bvdu->ij", &[r, r, r]),
    )
}

/// Outcome of the 2-stein test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoSteinReport {
    pub is_two_stein: bool,
    /// `Tr R_X = μ1 |X|^2`, present when Einstein.
    pub mu1: Option<Scalar>,
    /// `Tr(R_X^2) = μ2 |X|^4`, present when the quartic condition holds.
    pub mu2: Option<Scalar>,
}

/// Jacobi operator matrix `J_ab = R(e_a, X, X, e_b)`.
pub fn jacobi_operator(rc: &CurvatureTensor, x: &[Scalar]) -> Tensor {
    let m = rc.dim();
    assert_eq!(x.len(), m);
    let mut j = Tensor::zeros(m, 2);
    for a in 0..m {
        for b in 0..m {
            let mut s = Scalar::ZERO;
            for (p, xp) in x.iter().enumerate() {
                for (q, xq) in x.iter().enumerate() {
                    let r = rc.get(a, p, q, b);
                    if !r.is_zero() {
                        s += &(&(r * xp) * xq);
                    }
                }
            }
            j.set(&[a, b], s);
        }
    }
    j
}

/// `Tr(R_X^2)`.
pub fn jacobi_trace_sq(rc: &CurvatureTensor, x: &[Scalar]) -> Scalar {
    let j = jacobi_operator(rc, x);
    ein("ab,ba->", &[&j, &j]).value().clone()
}

/// Full symmetrization over all slots of a rank-4 tensor.
fn symmetrize4(t: &Tensor) -> Tensor {
    let perms = crate::delta::permutations(4);
    let mut acc = Tensor::zeros(t.dim(), 4);
    for (p, _) in &perms {
        acc = acc.add(&t.permute(p));
    }
    acc.scale(&Scalar::frac(1, perms.len() as i64))
}

/// Compares the symmetrized quartic coefficient tensor of `Tr(R_X^2)` with
/// `μ2 · Sym(g⊗g)`; `μ1` comes from the Einstein condition.
pub fn two_stein_check(rc: &CurvatureTensor) -> TwoSteinReport {
    let m = rc.dim();
    let rho = rc.ricci();
    let g = Tensor::metric(m);
    let mu1_val = &rho.trace() / &Scalar::int(m as i64);
    let mu1 = (rho == g.scale(&mu1_val)).then_some(mu1_val);
    let c = ein("axyb,bzwa->xyzw", &[rc.tensor(), rc.tensor()]);
    let sym = symmetrize4(&c);
    let mut gg = Tensor::zeros(m, 4);
    let third = Scalar::frac(1, 3);
    for spec in ["xy,zw->xyzw", "xz,yw->xyzw", "xw,yz->xyzw"] {
        einsum_into(&mut gg, &third, spec, &[G, G]).expect("fixed spec");
    }
    let mu2_val = sym.get(&[0, 0, 0, 0]).clone();
    let mu2 = (sym == gg.scale(&mu2_val)).then_some(mu2_val);
    TwoSteinReport {
        is_two_stein: mu1.is_some() && mu2.is_some(),
        mu1,
        mu2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_curvature_sign() {
        let r = constant_curvature(3, &Scalar::int(2)).unwrap();
        assert_eq!(r.get(0, 1, 1, 0), &Scalar::int(2));
        assert_eq!(r.get(0, 1, 0, 1), &Scalar::int(-2));
        assert_eq!(r.tau(), Scalar::int(12));
    }

    #[test]
    fn antisymmetry_error() {
        let mut t = Tensor::zeros(3, 4);
        t.set(&[0, 1, 0, 1], Scalar::ONE);
        t.set(&[1, 0, 0, 1], Scalar::ONE);
        match CurvatureTensor::validate(t) {
            Err(CurvatureError::Symmetry { identity, idx }) => {
                assert!(identity.starts_with("antisymmetry"));
                assert_eq!(idx, [1, 2, 1, 2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bianchi_is_checked() {
        // R_1234 = 1 alone breaks the first Bianchi identity
        let e = CurvatureTensor::from_components(4, &[([0, 1, 2, 3], Scalar::ONE)]).unwrap_err();
        assert!(matches!(e, CurvatureError::Symmetry { identity, .. } if identity.starts_with("first Bianchi")));
    }

    #[test]
    fn conflicting_components() {
        let e = CurvatureTensor::from_components(3, &[([0, 1, 1, 0], Scalar::ONE), ([1, 0, 0, 1], Scalar::int(2))]);
        assert!(matches!(e, Err(CurvatureError::Conflict { .. })));
    }

    #[test]
    fn weyl_of_space_form_vanishes() {
        for m in 3..=6 {
            let r = constant_curvature(m, &Scalar::frac(-3, 2)).unwrap();
            assert!(weyl(&r).unwrap().tensor().is_zero());
        }
        assert!(weyl(&constant_curvature(2, &Scalar::ONE).unwrap()).is_err());
    }

    #[test]
    fn space_form_is_two_stein() {
        let r = constant_curvature(4, &Scalar::int(3)).unwrap();
        let t = two_stein_check(&r);
        assert!(t.is_two_stein);
        assert_eq!(t.mu1, Some(Scalar::int(9)));
        let x = vec![Scalar::ONE, Scalar::int(2), Scalar::ZERO, Scalar::int(-1)];
        let n2 = Scalar::int(6);
        assert_eq!(jacobi_trace_sq(&r, &x), &t.mu2.unwrap() * &(&n2 * &n2));
    }
}
