//! Identity selection, run reports and randomized campaigns.

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{invariants, two_stein_check, CurvatureError, CurvatureTensor, InvariantReport, TwoSteinReport};
use crate::delta::Layout;
use crate::exec;
use crate::identities::{self as id, Hypothesis, IdentityError, LeftoverMode, ResidualReport};
use crate::models::{einsteinize, random_curvature, ModelError, ModelSpec};
use crate::scalar::Scalar;
use crate::tensor::Entry;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("{identity} does not apply in dimension {dim}")]
    NotApplicable { identity: &'static str, dim: usize },
    #[error("--expect-fail {0} names an identity that was not run")]
    ExpectFailNotRun(String),
    #[error("{0}")]
    Identity(#[from] IdentityError),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Curvature(#[from] CurvatureError),
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    Patterson,
    WeylPatterson,
    Lemma5,
    ThmAEinstein,
    Pa5,
    ThmASuper,
    Lemma6,
    Appendix34,
    ThmBEinstein,
    Eq42,
    ThmBSuper,
}

impl Identity {
    pub const ALL: [Identity; 11] = [
        Identity::Patterson,
        Identity::WeylPatterson,
        Identity::Lemma5,
        Identity::ThmAEinstein,
        Identity::Pa5,
        Identity::ThmASuper,
        Identity::Lemma6,
        Identity::Appendix34,
        Identity::ThmBEinstein,
        Identity::Eq42,
        Identity::ThmBSuper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Patterson => "patterson",
            Identity::WeylPatterson => "weyl-patterson",
            Identity::Lemma5 => "lemma5",
            Identity::ThmAEinstein => "thmA-a",
            Identity::Pa5 => "pa5",
            Identity::ThmASuper => "thmA-b",
            Identity::Lemma6 => "lemma6",
            Identity::Appendix34 => "appendix34",
            Identity::ThmBEinstein => "thmB-a",
            Identity::Eq42 => "eq42",
            Identity::ThmBSuper => "thmB-b",
        }
    }

    pub fn from_name(s: &str) -> Result<Identity, RunError> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| RunError::UnknownIdentity(s.to_string()))
    }

    pub fn hypothesis(self) -> Hypothesis {
        match self {
            Identity::Patterson | Identity::WeylPatterson => Hypothesis::Universal,
            Identity::Lemma5
            | Identity::ThmAEinstein
            | Identity::Lemma6
            | Identity::Appendix34
            | Identity::ThmBEinstein => Hypothesis::Einstein,
            Identity::Pa5 | Identity::ThmASuper | Identity::Eq42 | Identity::ThmBSuper => Hypothesis::SuperEinstein,
        }
    }

    pub fn applies(self, dim: usize) -> bool {
        match self {
            Identity::Patterson => dim >= 2,
            Identity::WeylPatterson => dim >= 3,
            Identity::Lemma5 | Identity::ThmAEinstein | Identity::Pa5 | Identity::ThmASuper => dim == 5,
            _ => dim == 6,
        }
    }

    /// Parses a comma-separated set; `all` selects everything applicable.
    pub fn parse_set(text: &str, dim: usize) -> Result<Vec<Identity>, RunError> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Identity::ALL.into_iter().filter(|i| i.applies(dim)));
                continue;
            }
            let i = Identity::from_name(part)?;
            if !i.applies(dim) {
                return Err(RunError::NotApplicable {
                    identity: i.name(),
                    dim,
                });
            }
            out.push(i);
        }
        if out.is_empty() {
            return Err(RunError::Input("empty identity set".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Runs one identity. Delta identities run for `order` or for every
/// admissible order when `None`.
pub fn evaluate(ident: Identity, rc: &CurvatureTensor, order: Option<usize>) -> Result<Vec<ResidualReport>, RunError> {
    let dim = rc.dim();
    if !ident.applies(dim) {
        return Err(RunError::NotApplicable {
            identity: ident.name(),
            dim,
        });
    }
    let orders: Vec<usize> = match order {
        Some(r) => vec![r],
        None => (1..=id::max_order(dim)).collect(),
    };
    let one = |r: Result<ResidualReport, IdentityError>| -> Result<Vec<ResidualReport>, RunError> { Ok(vec![r?]) };
    match ident {
        Identity::Patterson | Identity::WeylPatterson => {
            let mut out = Vec::new();
            for r in orders {
                let mut rep = if ident == Identity::Patterson {
                    id::patterson_residual(rc, r, LeftoverMode::Free)?
                } else {
                    id::weyl_patterson_residual(rc, r, LeftoverMode::Free)?
                };
                rep.note = Some(format!("r={r}"));
                out.push(rep);
            }
            if ident == Identity::WeylPatterson && (dim == 5 || dim == 6) && order.is_none_or(|r| r == 2) {
                out.push(weyl_expansion_report(rc)?);
            }
            Ok(out)
        }
        Identity::Lemma5 => one(id::lemma5_einstein_residual(rc)),
        Identity::ThmAEinstein => one(id::thm_a_einstein_residual(rc)),
        Identity::Pa5 => one(id::pa5_residual(rc)),
        Identity::ThmASuper => one(id::thm_a_super_residual(rc)),
        Identity::Lemma6 => one(id::lemma6_einstein_residual(rc)),
        Identity::Appendix34 => one(id::appendix34_residual(rc)),
        Identity::ThmBEinstein => one(id::thm_b_einstein_residual(rc)),
        Identity::Eq42 => one(id::super6_intermediate_residual(rc)),
        Identity::ThmBSuper => one(id::thm_b_super_residual(rc)),
    }
}

/// Term-by-term Weyl sum; flagged nonzero when it disagrees with the
/// delta evaluation in any grade.
fn weyl_expansion_report(rc: &CurvatureTensor) -> Result<ResidualReport, RunError> {
    let x = id::weyl_expansion(rc)?;
    let mut rep = ResidualReport::new(
        "weyl-patterson",
        Hypothesis::Universal,
        true,
        x.sum.clone(),
        Layout::Dense,
    );
    rep.note = Some("term-by-term expansion".into());
    if !x.agrees() {
        rep.is_zero = false;
        rep.note = Some("term-by-term expansion disagrees with delta evaluation".into());
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub model: ModelSpec,
    pub invariants: InvariantReport,
    pub two_stein: TwoSteinReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_bonnet: Option<Scalar>,
    pub residuals: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expect_fail: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report json")
    }
}

/// A residual passes when it is zero, or when its hypothesis fails, or
/// (for expected failures) when it is nonzero.
pub fn residual_passes(r: &ResidualReport, expect_fail: &[String]) -> bool {
    if expect_fail.iter().any(|e| e == &r.identity) {
        !r.is_zero
    } else {
        !r.hypothesis_holds || r.is_zero
    }
}

pub fn verdict(residuals: &[ResidualReport], expect_fail: &[String]) -> Verdict {
    if residuals.iter().all(|r| residual_passes(r, expect_fail)) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Builds the model, evaluates the identities and assembles a report.
/// Identities run in parallel; results keep `set` order.
pub fn run(model: &ModelSpec, set: &[Identity], expect_fail: &[String]) -> Result<RunReport, RunError> {
    let rc = model.build()?;
    run_tensor(model.clone(), &rc, set, expect_fail)
}

pub fn run_tensor(
    model: ModelSpec,
    rc: &CurvatureTensor,
    set: &[Identity],
    expect_fail: &[String],
) -> Result<RunReport, RunError> {
    for i in set {
        if !i.applies(rc.dim()) {
            return Err(RunError::NotApplicable {
                identity: i.name(),
                dim: rc.dim(),
            });
        }
    }
    for e in expect_fail {
        let known = Identity::from_name(e)?;
        if !set.contains(&known) {
            return Err(RunError::ExpectFailNotRun(e.clone()));
        }
    }
    let parts = exec::map_indexed(set.len(), |k| evaluate(set[k], rc, None));
    let mut residuals = Vec::new();
    for p in parts {
        residuals.extend(p?);
    }
    let inv = invariants(rc);
    let gauss_bonnet = (rc.dim() == 6).then(|| id::gauss_bonnet_integrand_6(rc)).transpose()?;
    let verdict = verdict(&residuals, expect_fail);
    Ok(RunReport {
        model,
        invariants: inv,
        two_stein: two_stein_check(rc),
        gauss_bonnet,
        residuals,
        expect_fail: expect_fail.to_vec(),
        verdict,
        elapsed_ms: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialFailure {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Entry>,
}

/// Outcome of a randomized campaign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomCheckSummary {
    pub identity: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// `raw` or `einstein`.
    pub inputs: &'static str,
    pub seed: u64,
    pub terms: usize,
    pub trials: usize,
    pub zero: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failing_seed: Option<u64>,
    pub failures: Vec<TrialFailure>,
}

impl RandomCheckSummary {
    pub fn all_zero(&self) -> bool {
        self.zero == self.trials
    }
}

/// Trial `t` uses seed `seed + t` (wrapping). Universal identities get raw
/// random tensors; all others get einsteinized ones with `k = 1`.
pub fn random_check(
    dim: usize,
    ident: Identity,
    order: Option<usize>,
    trials: usize,
    seed: u64,
    terms: usize,
) -> Result<RandomCheckSummary, RunError> {
    if !ident.applies(dim) {
        return Err(RunError::NotApplicable {
            identity: ident.name(),
            dim,
        });
    }
    if !(2..=6).contains(&dim) || terms == 0 {
        return Err(RunError::Input(format!(
            "need dimension 2..=6 and at least one term, got {dim} and {terms}"
        )));
    }
    let raw = ident.hypothesis() == Hypothesis::Universal;
    if !raw && dim < 4 {
        return Err(RunError::Input("einsteinized inputs need dimension >= 4".into()));
    }
    if let Some(r) = order {
        if r == 0 || r > id::max_order(dim) {
            return Err(IdentityError::Order {
                r,
                max: id::max_order(dim),
                dim,
            }
            .into());
        }
    }
    let results = exec::map_indexed(trials, |t| -> Result<Option<TrialFailure>, RunError> {
        let s = seed.wrapping_add(t as u64);
        let r = random_curvature(dim, s, terms);
        let r = if raw { r } else { einsteinize(&r, &Scalar::ONE)? };
        let reps = evaluate(ident, &r, order)?;
        Ok(reps.into_iter().find(|x| !x.is_zero).map(|x| TrialFailure {
            seed: s,
            note: x.note,
            witness: x.witness,
        }))
    });
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(RandomCheckSummary {
        identity: ident.name().to_string(),
        dim,
        order,
        inputs: if raw { "raw" } else { "einstein" },
        seed,
        terms,
        trials,
        zero: trials - failures.len(),
        first_failing_seed: failures.first().map(|f| f.seed),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_parsing() {
        let s = Identity::parse_set("all", 5).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(
            Identity::parse_set("thmB-b,patterson", 6).unwrap(),
            vec![Identity::Patterson, Identity::ThmBSuper]
        );
        assert!(matches!(
            Identity::parse_set("lemma6", 5),
            Err(RunError::NotApplicable { .. })
        ));
        assert!(matches!(
            Identity::parse_set("nope", 5),
            Err(RunError::UnknownIdentity(_))
        ));
    }

    #[test]
    fn expect_fail_inverts() {
        let model = ModelSpec::example_5d(&Scalar::ONE);
        let set = [Identity::ThmASuper];
        let plain = run(&model, &set, &[]).unwrap();
        // hypothesis fails, so the nonzero residual does not fail the run
        assert_eq!(plain.verdict, Verdict::Pass);
        assert!(!plain.residuals[0].is_zero);
        let inverted = run(&model, &set, &["thmA-b".to_string()]).unwrap();
        assert_eq!(inverted.verdict, Verdict::Pass);
        let wrong = run(&model, &[Identity::ThmAEinstein], &["thmA-a".to_string()]).unwrap();
        assert_eq!(wrong.verdict, Verdict::Fail);
    }
}
