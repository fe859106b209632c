//! Loop-based oracles shared by the integration tests. Nothing here goes
//! through the contraction or delta engines.
#![allow(dead_code)]

use curvident::{CurvatureTensor, Scalar, Tensor};

pub fn s(n: i64) -> Scalar {
    Scalar::int(n)
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

pub fn add(a: &Scalar, b: &Scalar) -> Scalar {
    a + b
}

pub fn mul(a: &Scalar, b: &Scalar) -> Scalar {
    a * b
}

/// Calls `f` on every index tuple of length `k` over `0..dim`.
pub fn each(dim: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0; k];
    loop {
        f(&idx);
        let mut p = k;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < dim {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Sign of the permutation taking `lower` onto `upper`, zero when the
/// entries repeat or the sets differ.
pub fn delta(lower: &[usize], upper: &[usize]) -> i64 {
    let n = lower.len();
    let mut pos = Vec::with_capacity(n);
    for u in upper {
        match lower.iter().position(|l| l == u) {
            Some(p) if !pos.contains(&p) => pos.push(p),
            _ => return 0,
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if lower[a] == lower[b] {
                return 0;
            }
        }
    }
    let mut inversions = 0;
    for a in 0..n {
        for b in a + 1..n {
            if pos[a] > pos[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn r(rc: &CurvatureTensor, i: usize, j: usize, k: usize, l: usize) -> Scalar {
    rc.tensor().get(&[i, j, k, l]).clone()
}

pub fn ricci(rc: &CurvatureTensor) -> Vec<Vec<Scalar>> {
    let m = rc.dim();
    let mut out = vec![vec![Scalar::ZERO; m]; m];
    for i in 0..m {
        for j in 0..m {
            for a in 0..m {
                out[i][j] += r(rc, i, a, a, j);
            }
        }
    }
    out
}

pub fn matrix(t: &Tensor) -> Vec<Vec<Scalar>> {
    t.to_matrix()
}

pub fn diag(m: usize, vals: &[Scalar]) -> Vec<Vec<Scalar>> {
    let mut out = vec![vec![Scalar::ZERO; m]; m];
    for i in 0..m {
        out[i][i] = vals[i].clone();
    }
    out
}

pub fn scalar_id(m: usize, v: &Scalar) -> Vec<Vec<Scalar>> {
    diag(m, &vec![v.clone(); m])
}

/// Gauss-Bonnet bracket in dimension 6 by direct summation.
pub fn gauss_bonnet_loops(rc: &CurvatureTensor) -> Scalar {
    let m = rc.dim();
    let rho = ricci(rc);
    let tau: Scalar = (0..m).map(|i| rho[i][i].clone()).sum();
    let mut rho2 = Scalar::ZERO;
    let mut rho3 = Scalar::ZERO;
    for a in 0..m {
        for b in 0..m {
            rho2 += &rho[a][b] * &rho[a][b];
            for c in 0..m {
                rho3 += &(&rho[a][b] * &rho[a][c]) * &rho[b][c];
            }
        }
    }
    let mut rn = Scalar::ZERO;
    let mut rrr = Scalar::ZERO;
    each(m, 4, |x| {
        let v = r(rc, x[0], x[1], x[2], x[3]);
        rn += &v * &v;
        // rho_ab rho_cd R_acbd
        rrr += &(&rho[x[0]][x[1]] * &rho[x[2]][x[3]]) * &r(rc, x[0], x[2], x[1], x[3]);
    });
    let mut rt = Scalar::ZERO;
    each(m, 5, |x| {
        let (u, v, a, b, c) = (x[0], x[1], x[2], x[3], x[4]);
        if !rho[u][v].is_zero() {
            rt += &rho[u][v] * &(&r(rc, a, b, c, u) * &r(rc, a, b, c, v));
        }
    });
    let mut c1 = Scalar::ZERO;
    let mut c2 = Scalar::ZERO;
    each(m, 4, |x| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        let v = r(rc, a, b, c, d);
        if v.is_zero() {
            return;
        }
        for u in 0..m {
            for w in 0..m {
                // R_abcd R_aucw R_bwdu and R_abcd R_abuw R_cduw
                c1 += &v * &(&r(rc, a, u, c, w) * &r(rc, b, w, d, u));
                c2 += &v * &(&r(rc, a, b, u, w) * &r(rc, c, d, u, w));
            }
        }
    });
    [
        tau.pow(3),
        &(&tau * &rho2) * &s(-12),
        &(&tau * &rn) * &s(3),
        &rho3 * &s(16),
        &rrr * &s(-24),
        &rt * &s(-24),
        &c1 * &s(8),
        &c2 * &s(-2),
    ]
    .into_iter()
    .sum()
}
