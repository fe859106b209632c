use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use curvident::curvature::{invariants, two_stein_check, CurvatureTensor, InvariantReport, TwoSteinReport};
use curvident::exec::{self, ExecPolicy};
use curvident::identities::{gauss_bonnet_integrand_6, Hypothesis};
use curvident::models::ModelError;
use curvident::report::{self, Identity, RandomCheckSummary, RunReport, Verdict};
use curvident::{ModelSpec, Scalar, Tensor};

#[derive(Parser)]
#[command(name = "curvident", version, about = "Exact verification of curvature identities")]
struct Cli {
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true, env = "CURVIDENT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print curvature invariants of a model.
    Invariants {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate identities on a model.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate one identity on seeded random tensors.
    RandomCheck {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        identity: String,
        /// Delta order for patterson and weyl-patterson; all orders if omitted.
        #[arg(long)]
        r: Option<usize>,
        #[arg(short = 'n', default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of Kulkarni-Nomizu squares summed per tensor.
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write a run report as JSON.
    Export {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
        /// Record the model as its explicit independent components.
        #[arg(long)]
        as_explicit: bool,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// example5d, example6d, sl3so3, flat, constant, product, nikolayevsky, random-einstein
    #[arg(long, required_unless_present = "model_file", conflicts_with = "model_file")]
    model: Option<String>,
    /// A model JSON file, or a report JSON whose "model" field is used.
    #[arg(long)]
    model_file: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long)]
    dim1: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    k1: Option<String>,
    #[arg(long)]
    dim2: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    k2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    terms: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated identity names, or "all".
    #[arg(long, default_value = "all")]
    set: String,
    /// Identity whose residual is expected to be nonzero.
    #[arg(long)]
    expect_fail: Vec<String>,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn scalar(name: &str, v: &Option<String>, default: Option<&str>) -> Result<Scalar, Failure> {
    match (v.as_deref(), default) {
        (Some(t), _) | (None, Some(t)) => t.parse().map_err(|e| Failure(format!("--{name}: {e}"))),
        (None, None) => Err(Failure(format!("--{name} is required for this model"))),
    }
}

fn need<T: Copy>(name: &str, v: Option<T>) -> Result<T, Failure> {
    v.ok_or_else(|| Failure(format!("--{name} is required for this model")))
}

fn load_spec(path: &Path) -> Result<ModelSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure(format!("{}: invalid JSON: {e}", path.display())))?;
    let (v, prefix) = match v.get("model") {
        Some(m) if v.get("kind").is_none() => (m, "/model"),
        _ => (&v, ""),
    };
    ModelSpec::from_value(v).map_err(|e| match e {
        ModelError::Schema { pointer, message } => Failure(format!("{}: {prefix}{pointer}: {message}", path.display())),
        e => Failure(format!("{}: {e}", path.display())),
    })
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec, Failure> {
        if let Some(p) = &self.model_file {
            return load_spec(p);
        }
        let name = self.model.as_deref().unwrap_or_default();
        let spec = match name.replace('_', "-").as_str() {
            "example5d" | "example-5d" => ModelSpec::example_5d(&scalar("k", &self.k, Some("1"))?),
            "example6d" | "example-6d" => ModelSpec::example_6d(&scalar("k", &self.k, Some("1"))?),
            "sl3so3" | "sl3-so3" => ModelSpec::sl3_so3(),
            "flat" => ModelSpec::constant_curvature(need("dim", self.dim)?, &Scalar::ZERO),
            "constant" | "constant-curvature" => {
                ModelSpec::constant_curvature(need("dim", self.dim)?, &scalar("k", &self.k, Some("1"))?)
            }
            "product" => ModelSpec::product(
                need("dim1", self.dim1)?,
                &scalar("k1", &self.k1, None)?,
                need("dim2", self.dim2)?,
                &scalar("k2", &self.k2, None)?,
            ),
            "nikolayevsky" => {
                ModelSpec::nikolayevsky(&scalar("alpha", &self.alpha, None)?, &scalar("beta", &self.beta, None)?)
            }
            "random-einstein" => ModelSpec::random_einstein(
                need("dim", self.dim)?,
                self.seed.unwrap_or(0),
                self.terms.unwrap_or(3),
                &scalar("k", &self.k, Some("1"))?,
            ),
            _ => return Err(Failure(format!("unknown model {name:?}"))),
        };
        spec.check()?;
        Ok(spec)
    }
}

#[derive(Serialize)]
struct InvariantsOut {
    model: ModelSpec,
    invariants: InvariantReport,
    two_stein: TwoSteinReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    gauss_bonnet: Option<Scalar>,
}

fn matrix(out: &mut String, name: &str, t: &Tensor) {
    let rows: Vec<Vec<String>> = t
        .to_matrix()
        .iter()
        .map(|r| r.iter().map(Scalar::to_string).collect())
        .collect();
    let w = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    let _ = writeln!(out, "{name}:");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

fn opt(v: &Option<Scalar>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), Scalar::to_string)
}

fn invariants_table(o: &InvariantsOut) -> String {
    let inv = &o.invariants;
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(s, "{k:<16}{v}");
    };
    line("model", o.model.kind.name().to_string());
    line("dim", inv.dim.to_string());
    line("tau", inv.tau.to_string());
    line("|rho|^2", inv.ricci_norm_sq.to_string());
    line("|R|^2", inv.r_norm_sq.to_string());
    line("R-hat", inv.r_hat0.to_string());
    line("R-ring", inv.r_ring0.to_string());
    line("einstein", inv.einstein.to_string());
    line("super-einstein", inv.super_einstein.to_string());
    line("2-stein", o.two_stein.is_two_stein.to_string());
    line("mu1", opt(&o.two_stein.mu1));
    line("mu2", opt(&o.two_stein.mu2));
    if let Some(gb) = &o.gauss_bonnet {
        line("gauss-bonnet", gb.to_string());
    }
    matrix(&mut s, "rho", &inv.ricci);
    matrix(&mut s, "T-check", &inv.t_check);
    matrix(&mut s, "R-check", &inv.r_check);
    matrix(&mut s, "R-hat_ij", &inv.r_hat2);
    matrix(&mut s, "R-ring_ij", &inv.r_ring2);
    s
}

fn report_table(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model {} (dim {})", r.model.kind.name(), r.invariants.dim);
    let w = r.residuals.iter().map(|x| x.identity.len()).max().unwrap_or(0);
    for x in &r.residuals {
        let hyp = if x.hypothesis_holds { "holds" } else { "fails" };
        let kind = match x.hypothesis {
            Hypothesis::Universal => "universal",
            Hypothesis::Einstein => "einstein",
            Hypothesis::SuperEinstein => "super-einstein",
        };
        let status = match &x.witness {
            None => "zero".to_string(),
            Some(e) => format!(
                "nonzero at [{}] = {}",
                e.idx.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
                e.val
            ),
        };
        let note = x.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default();
        let ok = if report::residual_passes(x, &r.expect_fail) {
            "ok  "
        } else {
            "FAIL"
        };
        let _ = writeln!(s, "{ok} {:<w$}  {kind:<14} {hyp:<5}  {status}{note}", x.identity);
    }
    if let Some(ms) = r.elapsed_ms {
        let _ = writeln!(s, "elapsed {ms} ms");
    }
    let _ = writeln!(
        s,
        "verdict: {}",
        if r.verdict == Verdict::Pass { "pass" } else { "fail" }
    );
    s
}

fn summary_table(x: &RandomCheckSummary) -> String {
    let mut s = String::new();
    let order = x.order.map(|r| format!(" r={r}")).unwrap_or_default();
    let last = x.seed.wrapping_add(x.trials.saturating_sub(1) as u64);
    let _ = writeln!(
        s,
        "{} dim {}{order}, {} inputs, seeds {}..={last}: {}/{} zero",
        x.identity, x.dim, x.inputs, x.seed, x.zero, x.trials
    );
    if let Some(f) = x.first_failing_seed {
        let _ = writeln!(s, "first failing seed {f}");
    }
    for f in &x.failures {
        let w = f
            .witness
            .as_ref()
            .map(|e| {
                format!(
                    " at [{}] = {}",
                    e.idx.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
                    e.val
                )
            })
            .unwrap_or_default();
        let note = f.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
        let _ = writeln!(s, "  seed {}: nonzero{w}{note}", f.seed);
    }
    s
}

fn build_report(spec: ModelSpec, run: &RunArgs, as_explicit: bool) -> Result<RunReport, Failure> {
    let start = Instant::now();
    let rc: CurvatureTensor = spec.build()?;
    let spec = if as_explicit { ModelSpec::explicit(&rc) } else { spec };
    let set = Identity::parse_set(&run.set, rc.dim())?;
    let mut rep = report::run_tensor(spec, &rc, &set, &run.expect_fail)?;
    if run.timing {
        rep.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(rep)
}

fn pass(v: Verdict) -> ExitCode {
    if v == Verdict::Pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cmd: Cmd) -> Result<ExitCode, Failure> {
    match cmd {
        Cmd::Invariants { model, json } => {
            let spec = model.spec()?;
            let rc = spec.build()?;
            let gauss_bonnet = if rc.dim() == 6 {
                Some(gauss_bonnet_integrand_6(&rc)?)
            } else {
                None
            };
            let o = InvariantsOut {
                model: spec,
                invariants: invariants(&rc),
                two_stein: two_stein_check(&rc),
                gauss_bonnet,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&o)?);
            } else {
                print!("{}", invariants_table(&o));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { model, run, json } => {
            let rep = build_report(model.spec()?, &run, false)?;
            if json {
                println!("{}", rep.to_json());
            } else {
                print!("{}", report_table(&rep));
            }
            Ok(pass(rep.verdict))
        }
        Cmd::RandomCheck {
            dim,
            identity,
            r,
            n,
            seed,
            terms,
            json,
        } => {
            let ident = Identity::from_name(&identity)?;
            let x = report::random_check(dim, ident, r, n, seed, terms)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&x)?);
            } else {
                print!("{}", summary_table(&x));
            }
            Ok(if x.all_zero() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Export {
            model,
            run,
            out,
            as_explicit,
        } => {
            let rep = build_report(model.spec()?, &run, as_explicit)?;
            let mut text = rep.to_json();
            text.push('\n');
            std::fs::write(&out, text).map_err(|e| Failure(format!("{}: {e}", out.display())))?;
            eprintln!("wrote {}", out.display());
            Ok(pass(rep.verdict))
        }
    }
}

fn configure_threads(n: Option<usize>) -> Result<(), Failure> {
    match n {
        Some(0) => Err(Failure("--threads must be at least 1".into())),
        Some(1) => {
            exec::set_policy(ExecPolicy::Sequential);
            Ok(())
        }
        Some(n) => {
            exec::set_policy(ExecPolicy::Parallel);
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
            #[cfg(not(feature = "parallel"))]
            let _ = n;
            Ok(())
        }
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| execute(cli.cmd));
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
