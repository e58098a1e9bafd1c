//! End-to-end runs: reduced program, solver, explicit comb, verification
//! and the figure data, with JSON/CSV output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::{json, Map, Value};

use crate::builder::{
    build_optimal_comb, fidelity_block_exact, fidelity_haar, random_comb_bound_check, verify_ansatz_normalization,
    AnsatzBlocks, FidelityMethod, Task,
};
use crate::circuits::{average_clone_fidelity, clone_circuit_channel, comb_inserted_channel, isometry_realization_channel};
use crate::combs::decompose_parallel;
use crate::error::{Error, Result};
use crate::groups::{haar_nodes, Quadrature};
use crate::reduced::{
    irrep_transform_fidelity, irrep_transform_problem, phase_clone_chain, phase_clone_problem, phi, solve,
    su2_clone_problem, sud_clone_problem, ReducedProblem, SolveReport,
};

pub const THREADS_ENV: &str = "COMB_OPT_THREADS";

/// Largest accepted N for the cloning families.
pub const MAX_COPIES: usize = 40;
pub const MAX_SUD: usize = 12;
pub const MAX_SPIN: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    IrrepTransform { beta: f64, a: f64 },
    CloneSu2 { n: usize },
    ClonePhase { n: usize },
    CloneSud { d: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::IrrepTransform { .. } => "irrep-transform",
            Family::CloneSu2 { .. } => "clone-su2",
            Family::ClonePhase { .. } => "clone-phase",
            Family::CloneSud { .. } => "clone-sud",
        }
    }

    pub fn params(&self) -> Map<String, Value> {
        let v = match *self {
            Family::IrrepTransform { beta, a } => json!({ "beta": beta, "a": a }),
            Family::CloneSu2 { n } | Family::ClonePhase { n } => json!({ "n": n }),
            Family::CloneSud { d } => json!({ "d": d }),
        };
        match v {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let half = |x: f64, what: &str| -> Result<u32> {
            let two = 2.0 * x;
            if !x.is_finite() || two.fract() != 0.0 || !(0.5..=MAX_SPIN).contains(&x) {
                return Err(Error::InvalidConfig(format!("{what} must be a half-integer in [1/2, {MAX_SPIN}], got {x}")));
            }
            Ok(two as u32)
        };
        match *self {
            Family::IrrepTransform { beta, a } => {
                half(beta, "beta")?;
                half(a, "a")?;
            }
            Family::CloneSu2 { n } | Family::ClonePhase { n } if n == 0 || n > MAX_COPIES => {
                return Err(Error::InvalidConfig(format!("n must be in 1..={MAX_COPIES}, got {n}")));
            }
            Family::CloneSud { d } if !(2..=MAX_SUD).contains(&d) => {
                return Err(Error::InvalidConfig(format!("d must be in 2..={MAX_SUD}, got {d}")));
            }
            _ => {}
        }
        Ok(())
    }

    fn two_spins(&self) -> (u32, u32) {
        match *self {
            Family::IrrepTransform { beta, a } => ((2.0 * beta) as u32, (2.0 * a) as u32),
            _ => (0, 0),
        }
    }

    pub fn problem(&self) -> Result<ReducedProblem> {
        self.validate()?;
        match *self {
            Family::IrrepTransform { .. } => {
                let (b, a) = self.two_spins();
                irrep_transform_problem(b, a)
            }
            Family::CloneSu2 { n } => su2_clone_problem(n),
            Family::ClonePhase { n } => phase_clone_problem(n),
            Family::CloneSud { d } => sud_clone_problem(d),
        }
    }

    pub fn task(&self) -> Result<Task> {
        self.validate()?;
        match *self {
            Family::IrrepTransform { .. } => {
                let (b, a) = self.two_spins();
                Task::irrep_transform(b, a)
            }
            Family::CloneSu2 { n } => Task::su2_clone(n),
            Family::ClonePhase { n } => Task::phase_clone(n),
            Family::CloneSud { d } => Task::sud_clone(d),
        }
    }
}

/// Total dimension `(d0 · d_U)²` of the explicit comb.
pub fn comb_dim(prob: &ReducedProblem) -> usize {
    let d0: usize = prob.a_list.iter().map(|a| a.m * a.d).sum();
    let du: usize = prob.betas.iter().map(|b| b.dim()).sum();
    (d0 * du).pow(2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TaskConfig {
    Solve(Family),
    /// Solve plus the parallel decomposition and the random-comb bound.
    Verify(Family),
    ReproduceFigures,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub solver: f64,
    pub comb: f64,
    pub circuit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { solver: 1e-10, comb: 1e-9, circuit: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: TaskConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub format: OutputFormat,
    /// Result file, or the directory for figure data.
    pub output: Option<PathBuf>,
    pub verify_circuit: bool,
    /// Monte Carlo samples where no exact Haar rule exists.
    pub haar_samples: usize,
    /// Random combs drawn by `verify`.
    pub trials: usize,
    /// Explicit combs above this dimension are not built.
    pub explicit_max_dim: usize,
    pub max_iter: usize,
    /// Record wall time; off by default so outputs are reproducible.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(task: TaskConfig) -> Self {
        Self {
            task,
            tolerances: Tolerances::default(),
            seed: 0,
            format: OutputFormat::Json,
            output: None,
            verify_circuit: false,
            haar_samples: 2000,
            trials: 100,
            explicit_max_dim: 1024,
            max_iter: 200_000,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.task {
            TaskConfig::Solve(f) | TaskConfig::Verify(f) => f.validate()?,
            TaskConfig::ReproduceFigures => {}
        }
        let t = &self.tolerances;
        for (name, v) in [("solver", t.solver), ("comb", t.comb), ("circuit", t.circuit)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} tolerance must be positive, got {v}")));
            }
        }
        if self.haar_samples < 2 {
            return Err(Error::InvalidConfig("haar_samples must be at least 2".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if self.verify_circuit && !matches!(self.task, TaskConfig::Solve(Family::ClonePhase { n: 2 }) | TaskConfig::Verify(Family::ClonePhase { n: 2 })) {
            return Err(Error::InvalidConfig("circuit verification exists only for clone-phase with n = 2".into()));
        }
        Ok(())
    }
}

/// Floats with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

struct Sig17(f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite value {}", self.0)));
        }
        RawValue::from_string(sig17(self.0)).map_err(S::Error::custom)?.serialize(s)
    }
}

fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Sig17(*x).serialize(s)
}

fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => Sig17(*v).serialize(s),
        None => s.serialize_none(),
    }
}

fn ser_map_f64<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k, Sig17(*v))))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    #[serde(serialize_with = "ser_f64")]
    pub kkt: f64,
    pub solver_iterations: usize,
    #[serde(serialize_with = "ser_f64")]
    pub ansatz_link: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ansatz_normalization: f64,
    pub ansatz_positive: bool,
    #[serde(serialize_with = "ser_opt_f64")]
    pub comb: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub comb_min_eigenvalue: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub block_exact: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub parallel: Option<f64>,
    pub parallel_memory_dim: Option<usize>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub bound_excess: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub circuit: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub circuit_fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarCheck {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub stderr: f64,
    pub method: FidelityMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRecord {
    pub task: String,
    pub params: Map<String, Value>,
    #[serde(serialize_with = "ser_f64")]
    pub phi_star: f64,
    /// Keyed `"a→K"`.
    #[serde(serialize_with = "ser_map_f64")]
    pub p_star: BTreeMap<String, f64>,
    pub residuals: Residuals,
    pub haar_check: Option<HaarCheck>,
    pub seed: u64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub runtime_s: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl ResultRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::VerificationFailed(e.to_string()))
    }

    /// `param,value` rows.
    pub fn to_csv(&self) -> Result<String> {
        let v: Value = serde_json::from_str(&self.to_json()?).map_err(|e| Error::Io(e.to_string()))?;
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        csv_text(&rows)
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => out.push((prefix.to_string(), match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => sig17(f),
            _ => n.to_string(),
        })),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
    }
}

fn csv_text(rows: &[(String, String)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["param", "value"]).map_err(io)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::InvalidConfig(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Caps the global thread pool from `COMB_OPT_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A pool that already exists keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn p_star_map(prob: &ReducedProblem, report: &SolveReport) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for (ia, a) in prob.a_list.iter().enumerate() {
        for (ik, k) in prob.k_list.iter().enumerate() {
            if prob.q[ia][ik] > 0.0 {
                m.insert(format!("{}→{}", a.irrep, k), report.p_star.p[ia][ik]);
            }
        }
    }
    m
}

/// Quadrature for the Haar cross-check: exact where available.
fn haar_rule(task: &Task, cfg: &RunConfig) -> Quadrature {
    match task.action.exact_degree() {
        Some(degree) => Quadrature::Exact { degree },
        None => Quadrature::MonteCarlo { samples: cfg.haar_samples, seed: cfg.seed },
    }
}

const PARALLEL_SAMPLES: usize = 20;
const CIRCUIT_ANGLES: usize = 50;
const CIRCUIT_QUADRATURE: usize = 64;

/// Solves one family and verifies the result.
pub fn run_family(family: Family, cfg: &RunConfig, full: bool) -> Result<ResultRecord> {
    let start = Instant::now();
    let tol = cfg.tolerances;
    let prob = family.problem()?;
    let report = solve(&prob, tol.solver, cfg.max_iter)?;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut check = |ok: bool, msg: String| {
        if !ok {
            failures.push(msg);
        }
    };

    let blocks = AnsatzBlocks::new(&prob, &report.p_star)?;
    let ans = verify_ansatz_normalization(&blocks, &prob);
    let mut residuals = Residuals {
        kkt: report.kkt_residual,
        solver_iterations: report.iterations,
        ansatz_link: ans.link_residual,
        ansatz_normalization: ans.normalization_residual,
        ansatz_positive: ans.positive,
        ..Default::default()
    };
    check(ans.max() <= tol.comb, format!("ansatz residual {:.3e}", ans.max()));
    check(ans.positive, "ansatz blocks are not positive".into());

    let dim = comb_dim(&prob);
    let mut haar_check = None;
    if dim <= cfg.explicit_max_dim {
        let task = family.task()?;
        let comb = build_optimal_comb(&task, &report.p_star)?;
        let res = comb.verify(&task)?;
        residuals.comb = Some(res.max_residual());
        residuals.comb_min_eigenvalue = Some(res.min_eigenvalue);
        check(res.passes(tol.comb), format!("comb residual {:.3e}", res.max_residual()));
        let block = fidelity_block_exact(&comb).value;
        residuals.block_exact = Some((block - report.phi_star).abs());
        check((block - report.phi_star).abs() <= tol.comb, format!("block-exact fidelity {block} vs {}", report.phi_star));
        let rule = haar_rule(&task, cfg);
        let h = fidelity_haar(&task, &comb.r, rule)?;
        let allowed = tol.comb.max(3.0 * h.std_error);
        check((h.value - report.phi_star).abs() <= allowed, format!("Haar check {} ± {} vs {}", h.value, h.std_error, report.phi_star));
        haar_check = Some(HaarCheck { value: h.value, stderr: h.std_error, method: h.method });

        if full {
            let par = decompose_parallel(&comb.r, &task.action)?;
            let nodes = haar_nodes(task.action.group(), Quadrature::MonteCarlo { samples: PARALLEL_SAMPLES, seed: cfg.seed });
            let mut worst = 0.0_f64;
            for node in &nodes {
                let u = task.action.input.matrix(&node.element)?;
                let want = crate::combs::insert_gate(&comb.r, &u)?;
                worst = worst.max(par.apply(&u)?.op.distance(&want.op)?);
            }
            residuals.parallel = Some(worst);
            residuals.parallel_memory_dim = Some(par.memory_dim);
            check(worst <= tol.comb, format!("parallel realization residual {worst:.3e}"));

            let bound = random_comb_bound_check(&task, cfg.trials, cfg.seed, rule)?;
            residuals.bound_excess = Some(bound.worst_excess);
            check(bound.worst_excess <= tol.comb, format!("random comb exceeds the optimum by {:.3e}", bound.worst_excess));
        }
    } else {
        notes.push(format!("explicit comb not built: dimension {dim} exceeds {}", cfg.explicit_max_dim));
    }

    if cfg.verify_circuit || (full && family == (Family::ClonePhase { n: 2 })) {
        let comb = build_optimal_comb(&family.task()?, &report.p_star)?;
        let mut worst = 0.0_f64;
        for k in 0..CIRCUIT_ANGLES {
            let phi = std::f64::consts::TAU * (k as f64 + 0.5) / CIRCUIT_ANGLES as f64;
            let a = clone_circuit_channel(phi)?;
            let b = comb_inserted_channel(&comb, phi)?;
            let c = isometry_realization_channel(phi)?;
            worst = worst.max(a.op.distance(&b.op)?).max(a.op.distance(&c.op)?).max(b.op.distance(&c.op)?);
        }
        let f = average_clone_fidelity(CIRCUIT_QUADRATURE, clone_circuit_channel)?;
        residuals.circuit = Some(worst);
        residuals.circuit_fidelity = Some((f - report.phi_star).abs());
        check(worst <= tol.circuit, format!("circuit channels differ by {worst:.3e}"));
        check((f - report.phi_star).abs() <= tol.circuit, format!("circuit fidelity {f} vs {}", report.phi_star));
    }

    Ok(ResultRecord {
        task: family.name().into(),
        params: family.params(),
        phi_star: report.phi_star,
        p_star: p_star_map(&prob, &report),
        residuals,
        haar_check,
        seed: cfg.seed,
        runtime_s: cfg.timing.then(|| start.elapsed().as_secs_f64()),
        passed: failures.is_empty(),
        failures,
        notes,
    })
}

/// One figure curve: `(param, value)` rows written to `<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub rows: Vec<(f64, f64)>,
}

impl Curve {
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<(String, String)> = self.rows.iter().map(|&(p, v)| (p.to_string(), sig17(v))).collect();
        csv_text(&rows)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureSet {
    pub curves: Vec<Curve>,
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl FigureSet {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn curve(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name)
    }
}

pub const FIG1_BETAS: [u32; 3] = [1, 2, 3];
pub const FIG1_MAX_TWO_A: u32 = 12;
pub const FIG2_MAX_N: usize = 12;

fn spin_label(two: u32) -> String {
    if two.is_multiple_of(2) {
        format!("{}", two / 2)
    } else {
        format!("{two}_2")
    }
}

/// `Σ_K (C(N,K)√x_K + C(N,K+1)√(1−x_{K+1}))² + (1 − x_0) + x_N`, divided by `4^N`.
pub fn phase_chain_fidelity(x: &[f64]) -> f64 {
    let n = x.len() - 1;
    let binom = |k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let mut f = (1.0 - x[0]) + x[n];
    for k in 0..n {
        f += (binom(k) * x[k].max(0.0).sqrt() + binom(k + 1) * (1.0 - x[k + 1]).max(0.0).sqrt()).powi(2);
    }
    f / 4f64.powi(n as i32)
}

/// Figure data: irrep transformation over `a` for each `β`, and SU(2) and
/// phase cloning over `N`. Every row is cross-checked.
pub fn reproduce_figures(cfg: &RunConfig) -> Result<FigureSet> {
    let tol = cfg.tolerances;
    let fig1: Vec<Result<(Curve, Vec<String>)>> = FIG1_BETAS
        .par_iter()
        .map(|&two_beta| {
            let mut rows = Vec::new();
            let mut fails = Vec::new();
            for two_a in 1..=FIG1_MAX_TWO_A {
                let r = solve(&irrep_transform_problem(two_beta, two_a)?, tol.solver, cfg.max_iter)?;
                let want = irrep_transform_fidelity(two_beta as f64 / 2.0, two_a as f64 / 2.0);
                if (r.phi_star - want).abs() > tol.comb {
                    fails.push(format!("irrep transform {two_beta}/2 → {two_a}/2: {} vs {want}", r.phi_star));
                }
                rows.push((two_a as f64 / 2.0, r.phi_star));
            }
            Ok((Curve { name: format!("fig1_beta_{}", spin_label(two_beta)), rows }, fails))
        })
        .collect();
    let fig2: Vec<Result<(usize, SolveReport, SolveReport, ReducedProblem, ReducedProblem)>> = (1..=FIG2_MAX_N)
        .into_par_iter()
        .map(|n| {
            let (ps, pp) = (su2_clone_problem(n)?, phase_clone_problem(n)?);
            let rs = solve(&ps, tol.solver, cfg.max_iter)?;
            let rp = solve(&pp, tol.solver, cfg.max_iter)?;
            Ok((n, rs, rp, ps, pp))
        })
        .collect();

    let mut curves = Vec::new();
    let mut failures = Vec::new();
    for r in fig1 {
        let (c, f) = r?;
        curves.push(c);
        failures.extend(f);
    }
    let (mut su2, mut phase) = (Vec::new(), Vec::new());
    for r in fig2 {
        let (n, rs, rp, ps, pp) = r?;
        let again = phi(&rs.p_star, &ps)?;
        if (again - rs.phi_star).abs() > tol.comb || rs.kkt_residual > tol.solver {
            failures.push(format!("su2 N={n}: Φ {} (recomputed {again}), KKT {:.3e}", rs.phi_star, rs.kkt_residual));
        }
        let chain = phase_chain_fidelity(&phase_clone_chain(&pp, &rp.p_star));
        if (chain - rp.phi_star).abs() > tol.comb {
            failures.push(format!("phase N={n}: Φ {} vs chain formula {chain}", rp.phi_star));
        }
        su2.push((n as f64, rs.phi_star));
        phase.push((n as f64, rp.phi_star));
    }
    for w in su2.windows(2).chain(phase.windows(2)) {
        if w[1].1 > w[0].1 + tol.comb {
            failures.push(format!("fidelity increases from N={} to N={}", w[0].0, w[1].0));
        }
    }
    for (s, p) in su2.iter().zip(&phase) {
        if p.1 + tol.comb < s.1 {
            failures.push(format!("phase below su2 at N={}", s.0));
        }
    }
    curves.push(Curve { name: "fig2_su2".into(), rows: su2 });
    curves.push(Curve { name: "fig2_phase".into(), rows: phase });

    let mut files = Vec::new();
    if let Some(dir) = &cfg.output {
        for c in &curves {
            let path = dir.join(format!("{}.csv", c.name));
            write_atomic(&path, &c.to_csv()?)?;
            files.push(path);
        }
    }
    Ok(FigureSet { curves, failures, files })
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput {
    Record(ResultRecord),
    Figures(FigureSet),
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        match self {
            RunOutput::Record(r) => r.passed,
            RunOutput::Figures(f) => f.passed(),
        }
    }
}

/// Runs the configured task and writes the result file when an output
/// path is set.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.task {
        TaskConfig::ReproduceFigures => Ok(RunOutput::Figures(reproduce_figures(cfg)?)),
        TaskConfig::Solve(f) | TaskConfig::Verify(f) => {
            let rec = run_family(f, cfg, matches!(cfg.task, TaskConfig::Verify(_)))?;
            if let Some(path) = &cfg.output {
                write_atomic(path, &render(&rec, cfg.format)?)?;
            }
            Ok(RunOutput::Record(rec))
        }
    }
}

pub fn render(rec: &ResultRecord, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => rec.to_json().map(|s| s + "\n"),
        OutputFormat::Csv => rec.to_csv(),
    }
}

/// Process exit code for a run: 0 success, 2 invalid configuration,
/// 3 solver failure, 4 verification failure, 1 anything else.
pub fn exit_code(result: &Result<RunOutput>) -> i32 {
    match result {
        Ok(out) if out.passed() => 0,
        Ok(_) => 4,
        Err(Error::InvalidConfig(_)) => 2,
        Err(Error::NoConvergence { .. }) => 3,
        Err(Error::VerificationFailed(_) | Error::NotAComb(_) | Error::NotCovariant(_) | Error::Infeasible(_)) => 4,
        Err(_) => 1,
    }
}
