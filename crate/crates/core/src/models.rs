//! Model spaces, random generators and the model JSON format.

use std::collections::BTreeMap;
use std::path::Path;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::contract::{einsum_into, Operand};
use crate::curvature::{constant_curvature, weyl, CurvatureError, CurvatureTensor};
use crate::scalar::Scalar;
use crate::tensor::{Entry, Tensor, MAX_DIM, MIN_DIM};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{0}")]
    Curvature(#[from] CurvatureError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(String),
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ConstantCurvature,
    Product,
    #[serde(rename = "example_5d")]
    Example5d,
    #[serde(rename = "example_6d")]
    Example6d,
    #[serde(rename = "sl3_so3")]
    Sl3So3,
    Nikolayevsky,
    Explicit,
    RandomEinstein,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::ConstantCurvature,
        ModelKind::Product,
        ModelKind::Example5d,
        ModelKind::Example6d,
        ModelKind::Sl3So3,
        ModelKind::Nikolayevsky,
        ModelKind::Explicit,
        ModelKind::RandomEinstein,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ConstantCurvature => "constant_curvature",
            ModelKind::Product => "product",
            ModelKind::Example5d => "example_5d",
            ModelKind::Example6d => "example_6d",
            ModelKind::Sl3So3 => "sl3_so3",
            ModelKind::Nikolayevsky => "nikolayevsky",
            ModelKind::Explicit => "explicit",
            ModelKind::RandomEinstein => "random_einstein",
        }
    }

    pub fn from_name(s: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Required parameters; each is either an integer or a scalar.
    fn params(self) -> &'static [(&'static str, ParamType)] {
        use ParamType::*;
        match self {
            ModelKind::ConstantCurvature => &[("dim", Int), ("k", Num)],
            ModelKind::Product => &[("dim1", Int), ("k1", Num), ("dim2", Int), ("k2", Num)],
            ModelKind::Example5d | ModelKind::Example6d => &[("k", Num)],
            ModelKind::Sl3So3 => &[],
            ModelKind::Nikolayevsky => &[("alpha", Num), ("beta", Num)],
            ModelKind::Explicit => &[("dim", Int)],
            ModelKind::RandomEinstein => &[("dim", Int), ("seed", Int), ("terms", Int), ("k", Num)],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ParamType {
    Int,
    Num,
}

/// Serializable model description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Entry>>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, params: &[(&str, String)]) -> ModelSpec {
        ModelSpec {
            kind,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            components: None,
        }
    }

    pub fn constant_curvature(dim: usize, k: &Scalar) -> ModelSpec {
        ModelSpec::new(
            ModelKind::ConstantCurvature,
            &[("dim", dim.to_string()), ("k", k.to_string())],
        )
    }

    pub fn example_5d(k: &Scalar) -> ModelSpec {
        ModelSpec::new(ModelKind::Example5d, &[("k", k.to_string())])
    }

    pub fn example_6d(k: &Scalar) -> ModelSpec {
        ModelSpec::new(ModelKind::Example6d, &[("k", k.to_string())])
    }

    pub fn sl3_so3() -> ModelSpec {
        ModelSpec::new(ModelKind::Sl3So3, &[])
    }

    pub fn nikolayevsky(alpha: &Scalar, beta: &Scalar) -> ModelSpec {
        ModelSpec::new(
            ModelKind::Nikolayevsky,
            &[("alpha", alpha.to_string()), ("beta", beta.to_string())],
        )
    }

    pub fn product(dim1: usize, k1: &Scalar, dim2: usize, k2: &Scalar) -> ModelSpec {
        ModelSpec::new(
            ModelKind::Product,
            &[
                ("dim1", dim1.to_string()),
                ("k1", k1.to_string()),
                ("dim2", dim2.to_string()),
                ("k2", k2.to_string()),
            ],
        )
    }

    pub fn random_einstein(dim: usize, seed: u64, terms: usize, k: &Scalar) -> ModelSpec {
        ModelSpec::new(
            ModelKind::RandomEinstein,
            &[
                ("dim", dim.to_string()),
                ("seed", seed.to_string()),
                ("terms", terms.to_string()),
                ("k", k.to_string()),
            ],
        )
    }

    /// Explicit spec carrying the independent components of `r`.
    pub fn explicit(r: &CurvatureTensor) -> ModelSpec {
        ModelSpec {
            kind: ModelKind::Explicit,
            params: [("dim".to_string(), r.dim().to_string())].into(),
            components: Some(r.independent_components()),
        }
    }

    fn num(&self, key: &str) -> Result<Scalar, ModelError> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| schema(format!("/params/{key}"), "missing parameter"))?;
        v.parse().map_err(|e| schema(format!("/params/{key}"), format!("{e}")))
    }

    fn int(&self, key: &str) -> Result<u64, ModelError> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| schema(format!("/params/{key}"), "missing parameter"))?;
        v.parse().map_err(|_| {
            schema(
                format!("/params/{key}"),
                format!("expected a non-negative integer, got {v:?}"),
            )
        })
    }

    fn dim(&self, key: &str) -> Result<usize, ModelError> {
        let d = self.int(key)? as usize;
        if !(MIN_DIM..=MAX_DIM).contains(&d) {
            return Err(schema(
                format!("/params/{key}"),
                format!("dimension {d} outside {MIN_DIM}..={MAX_DIM}"),
            ));
        }
        Ok(d)
    }

    /// Checks parameter names and types and the presence of components.
    pub fn check(&self) -> Result<(), ModelError> {
        let want = self.kind.params();
        for key in self.params.keys() {
            if !want.iter().any(|(k, _)| k == key) {
                return Err(schema(
                    format!("/params/{key}"),
                    format!("unknown parameter for {}", self.kind.name()),
                ));
            }
        }
        for (key, ty) in want {
            match ty {
                ParamType::Int if key.starts_with("dim") => {
                    self.dim(key)?;
                }
                ParamType::Int => {
                    self.int(key)?;
                }
                ParamType::Num => {
                    self.num(key)?;
                }
            }
        }
        match (self.kind, &self.components) {
            (ModelKind::Explicit, None) => Err(schema("/components", "explicit model requires components")),
            (ModelKind::Explicit, Some(comps)) => {
                let dim = self.dim("dim")?;
                for (n, e) in comps.iter().enumerate() {
                    e.zero_based(dim, 4)
                        .map_err(|err| schema(format!("/components/{n}/idx"), err.to_string()))?;
                }
                Ok(())
            }
            (_, None) => Ok(()),
            (_, Some(_)) => Err(schema(
                "/components",
                format!("{} takes no components", self.kind.name()),
            )),
        }
    }

    pub fn build(&self) -> Result<CurvatureTensor, ModelError> {
        self.check()?;
        Ok(match self.kind {
            ModelKind::ConstantCurvature => constant_curvature(self.dim("dim")?, &self.num("k")?)?,
            ModelKind::Product => {
                let (d1, d2) = (self.dim("dim1")?, self.dim("dim2")?);
                if d1 + d2 > MAX_DIM {
                    return Err(schema(
                        "/params/dim2",
                        format!("total dimension {} exceeds {MAX_DIM}", d1 + d2),
                    ));
                }
                let a = factor(d1, &self.num("k1")?);
                let b = factor(d2, &self.num("k2")?);
                product(&a, &b)?
            }
            ModelKind::Example5d => example_5d(&self.num("k")?),
            ModelKind::Example6d => example_6d(&self.num("k")?),
            ModelKind::Sl3So3 => sl3_so3(),
            ModelKind::Nikolayevsky => nikolayevsky(&self.num("alpha")?, &self.num("beta")?),
            ModelKind::Explicit => {
                let dim = self.dim("dim")?;
                CurvatureTensor::from_entries(dim, self.components.as_deref().unwrap_or_default())?
            }
            ModelKind::RandomEinstein => {
                let dim = self.dim("dim")?;
                if dim < 4 {
                    return Err(schema("/params/dim", "random_einstein needs dimension >= 4"));
                }
                let terms = self.int("terms")? as usize;
                if terms == 0 {
                    return Err(schema("/params/terms", "need at least one term"));
                }
                let r = random_curvature(dim, self.int("seed")?, terms);
                einsteinize(&r, &self.num("k")?)?
            }
        })
    }

    /// Parses and validates model JSON, reporting JSON-pointer locations.
    pub fn from_json_str(text: &str) -> Result<ModelSpec, ModelError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        ModelSpec::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<ModelSpec, ModelError> {
        let obj = v.as_object().ok_or_else(|| schema("", "expected an object"))?;
        for key in obj.keys() {
            if !["kind", "params", "components"].contains(&key.as_str()) {
                return Err(schema(format!("/{key}"), "unknown field"));
            }
        }
        let kind_s = obj.get("kind").ok_or_else(|| schema("/kind", "missing"))?;
        let kind_s = kind_s.as_str().ok_or_else(|| schema("/kind", "expected a string"))?;
        let kind =
            ModelKind::from_name(kind_s).ok_or_else(|| schema("/kind", format!("unknown model kind {kind_s:?}")))?;
        let mut params = BTreeMap::new();
        match obj.get("params") {
            None => {}
            Some(Value::Object(m)) => {
                for (k, val) in m {
                    let s = match val {
                        Value::String(s) => s.clone(),
                        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                        _ => return Err(schema(format!("/params/{k}"), "expected a string or integer")),
                    };
                    params.insert(k.clone(), s);
                }
            }
            Some(_) => return Err(schema("/params", "expected an object")),
        }
        let components = match obj.get("components") {
            None | Some(Value::Null) => None,
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (n, item) in items.iter().enumerate() {
                    let e = item
                        .as_object()
                        .ok_or_else(|| schema(format!("/components/{n}"), "expected an object"))?;
                    let idx = e
                        .get("idx")
                        .and_then(Value::as_array)
                        .ok_or_else(|| schema(format!("/components/{n}/idx"), "expected an index array"))?;
                    let idx: Option<Vec<usize>> = idx.iter().map(|i| i.as_u64().map(|i| i as usize)).collect();
                    let idx =
                        idx.ok_or_else(|| schema(format!("/components/{n}/idx"), "indices must be positive integers"))?;
                    let val = e
                        .get("val")
                        .and_then(Value::as_str)
                        .ok_or_else(|| schema(format!("/components/{n}/val"), "expected a scalar string"))?;
                    let val = val
                        .parse()
                        .map_err(|err| schema(format!("/components/{n}/val"), format!("{err}")))?;
                    out.push(Entry { idx, val });
                }
                Some(out)
            }
            Some(_) => return Err(schema("/components", "expected an array")),
        };
        let spec = ModelSpec {
            kind,
            params,
            components,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("model json")
    }
}

pub fn load_model(path: &Path) -> Result<ModelSpec, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ModelSpec::from_json_str(&text)
}

pub fn save_model(spec: &ModelSpec, path: &Path) -> Result<(), ModelError> {
    std::fs::write(path, spec.to_json_string() + "\n").map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn factor(dim: usize, k: &Scalar) -> CurvatureTensor {
    constant_curvature(dim, k).expect("dimension checked")
}

/// Block-diagonal sum on orthogonal index ranges; mixed components vanish.
pub fn product(a: &CurvatureTensor, b: &CurvatureTensor) -> Result<CurvatureTensor, CurvatureError> {
    let (d1, d2) = (a.dim(), b.dim());
    let dim = d1 + d2;
    if dim > MAX_DIM {
        return Err(CurvatureError::Dim(dim));
    }
    let mut r = Tensor::zeros(dim, 4);
    for (src, off) in [(a, 0), (b, d1)] {
        for (idx, v) in src.tensor().nonzero() {
            let shifted: Vec<usize> = idx.iter().map(|i| i + off).collect();
            r.set(&shifted, v.clone());
        }
    }
    CurvatureTensor::validate(r)
}

fn from_list(dim: usize, list: &[([usize; 4], Scalar)]) -> CurvatureTensor {
    let comps: Vec<([usize; 4], Scalar)> = list
        .iter()
        .map(|([i, j, k, l], v)| ([i - 1, j - 1, k - 1, l - 1], v.clone()))
        .collect();
    CurvatureTensor::from_components(dim, &comps).expect("catalog tensor")
}

/// `R_1221 = R_1331 = R_2332 = k`, `R_4554 = 2k`.
pub fn example_5d(k: &Scalar) -> CurvatureTensor {
    let k2 = k * &Scalar::int(2);
    from_list(
        5,
        &[
            ([1, 2, 2, 1], k.clone()),
            ([1, 3, 3, 1], k.clone()),
            ([2, 3, 3, 2], k.clone()),
            ([4, 5, 5, 4], k2),
        ],
    )
}

/// Product of two 3-dimensional space forms of curvature `k`.
pub fn example_6d(k: &Scalar) -> CurvatureTensor {
    let list: Vec<([usize; 4], Scalar)> = [
        [1, 2, 2, 1],
        [1, 3, 3, 1],
        [2, 3, 3, 2],
        [4, 5, 5, 4],
        [4, 6, 6, 4],
        [5, 6, 6, 5],
    ]
    .into_iter()
    .map(|i| (i, k.clone()))
    .collect();
    from_list(6, &list)
}

/// Curvature of SL(3)/SO(3) in the frame used by the 5-dimensional example.
pub fn sl3_so3() -> CurvatureTensor {
    let h = Scalar::frac(-1, 2);
    let s = &Scalar::sqrt3() * &Scalar::frac(1, 2);
    let list = [
        ([1, 2, 2, 1], h.clone()),
        ([1, 3, 3, 1], h.clone()),
        ([2, 3, 3, 2], h.clone()),
        ([2, 4, 4, 2], h.clone()),
        ([3, 4, 4, 3], h.clone()),
        ([1, 4, 4, 1], Scalar::int(-2)),
        ([2, 5, 5, 2], Scalar::frac(-3, 2)),
        ([3, 5, 5, 3], Scalar::frac(-3, 2)),
        ([1, 2, 3, 4], h.clone()),
        ([1, 2, 3, 5], -&s),
        ([1, 3, 2, 4], Scalar::frac(1, 2)),
        ([1, 3, 2, 5], -&s),
        ([1, 4, 2, 3], Scalar::ONE),
        ([2, 4, 2, 5], -&s),
        ([3, 4, 3, 5], s.clone()),
    ];
    from_list(5, &list)
}

/// Two-parameter normal form of a 5-dimensional 2-stein curvature tensor.
pub fn nikolayevsky(alpha: &Scalar, beta: &Scalar) -> CurvatureTensor {
    let ab = alpha - beta;
    let a4b = alpha - &(beta * &Scalar::int(4));
    let a3b = alpha - &(beta * &Scalar::int(3));
    let sb = &Scalar::sqrt3() * beta;
    let list = [
        ([1, 2, 1, 2], ab.clone()),
        ([1, 3, 1, 3], ab.clone()),
        ([2, 3, 2, 3], ab.clone()),
        ([2, 4, 2, 4], ab.clone()),
        ([3, 4, 3, 4], ab),
        ([1, 4, 1, 4], a4b),
        ([1, 5, 1, 5], alpha.clone()),
        ([4, 5, 4, 5], alpha.clone()),
        ([2, 5, 2, 5], a3b.clone()),
        ([3, 5, 3, 5], a3b),
        ([1, 2, 3, 4], beta.clone()),
        ([1, 2, 3, 5], sb.clone()),
        ([1, 3, 2, 4], -beta),
        ([1, 3, 2, 5], sb.clone()),
        ([1, 4, 2, 3], beta * &Scalar::int(-2)),
        ([2, 4, 2, 5], sb.clone()),
        ([3, 4, 3, 5], -&sb),
    ];
    from_list(5, &list)
}

/// `(h∧h)_ijkl = 2 (h_il h_jk − h_ik h_jl)`; `h = g` gives twice constant curvature 1.
pub fn kulkarni_nomizu_square(h: &Tensor) -> Tensor {
    let mut r = Tensor::zeros(h.dim(), 4);
    let op = Operand::T(h);
    einsum_into(&mut r, &Scalar::int(2), "il,jk->ijkl", &[op, op]).expect("fixed spec");
    einsum_into(&mut r, &Scalar::int(-2), "ik,jl->ijkl", &[op, op]).expect("fixed spec");
    r
}

/// Deterministic sampler: SplitMix64 (state = seed; Steele, Lea & Flood 2014).
///
/// Per term: one draw whose top bit selects ε = −1 (set) or +1, then the
/// upper triangle `h_ij`, `i <= j`, in row-major order, each entry
/// `(draw mod 7) − 3`.
pub struct Sampler(SplitMix64);

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn sign(&mut self) -> i64 {
        if self.next_u64() >> 63 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn small_int(&mut self) -> i64 {
        (self.next_u64() % 7) as i64 - 3
    }

    pub fn symmetric(&mut self, dim: usize) -> Tensor {
        let mut h = Tensor::zeros(dim, 2);
        for i in 0..dim {
            for j in i..dim {
                let v = Scalar::int(self.small_int());
                h.set(&[i, j], v.clone());
                h.set(&[j, i], v);
            }
        }
        h
    }
}

/// `Σ_t ε_t (h_t ∧ h_t)` with seeded random symmetric `h_t`.
pub fn random_curvature(dim: usize, seed: u64, n_terms: usize) -> CurvatureTensor {
    assert!((MIN_DIM..=MAX_DIM).contains(&dim), "dimension {dim}");
    let mut s = Sampler::new(seed);
    let mut r = Tensor::zeros(dim, 4);
    for _ in 0..n_terms {
        let eps = Scalar::int(s.sign());
        let h = s.symmetric(dim);
        r.axpy(&eps, &kulkarni_nomizu_square(&h));
    }
    CurvatureTensor::validate(r).expect("Kulkarni-Nomizu squares are curvature tensors")
}

/// `weyl(R) + k · const(1)`: Einstein with `ρ = (m−1) k g`.
pub fn einsteinize(r: &CurvatureTensor, k: &Scalar) -> Result<CurvatureTensor, CurvatureError> {
    if r.dim() < 4 {
        return Err(CurvatureError::NeedDim {
            need: ">= 4",
            got: r.dim(),
        });
    }
    Ok(weyl(r)?.add(&constant_curvature(r.dim(), k)?))
}
