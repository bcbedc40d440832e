use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use rescomp::analysis::{
    critical_points, decompose_error, error_closed_form, error_curve, optimize_lambda,
    write_decomposition_csv, PriorCovariance, DEFAULT_LAMBDA_TOL,
};
use rescomp::dynamics::{compare_dynamics, Scenario};
use rescomp::graphkit::{apply_malicious, OperatedWeights, WeightMatrix};
use rescomp::netopt::{
    degree_sweep, greedy_edge_removal, matching_prune, worst_case_lambda, worst_case_node,
    write_sweep_csv, MetricKind, DEFAULT_SUBSET_LIMIT,
};
use rescomp::validate::run_suite;

use crate::config::{
    near_regular, Adversaries, ExperimentConfig, FixedCount, LambdaChoice, MetricChoice,
};
use crate::failure::{config_err, Failure, Outcome};

const CRITICAL_GRID: usize = 128;

/// Output directory of one run.
pub struct RunDir {
    path: PathBuf,
    written: Vec<String>,
}

impl RunDir {
    pub fn create(path: &Path) -> Outcome<Self> {
        fs::create_dir_all(path)?;
        Ok(RunDir {
            path: path.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> rescomp::Result<()>,
    ) -> Outcome<()> {
        let mut out = BufWriter::new(File::create(self.path.join(name))?);
        body(&mut out)?;
        out.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Outcome<()> {
        fs::write(self.path.join(name), text)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

pub struct Run<'a> {
    pub cfg: &'a ExperimentConfig,
    pub seed: u64,
    pub dir: &'a mut RunDir,
}

fn labels(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|m| m + 1).collect()
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Resolves the adversary set; `"worst"` takes the maximizing set of the
/// min-max lambda design at noise `d`.
fn adversaries(cfg: &ExperimentConfig, w: &WeightMatrix, d: f64) -> Outcome<Vec<usize>> {
    match cfg.adversaries(w.n())? {
        Adversaries::Nodes(nodes) => Ok(nodes),
        Adversaries::Worst(m) => Ok(worst_case_lambda(w, m, d, DEFAULT_SUBSET_LIMIT)?.worst_subset),
    }
}

fn covariance(cfg: &ExperimentConfig, d: f64, n: usize) -> Outcome<PriorCovariance> {
    match &cfg.variances {
        Some(v) if v.len() != n => Err(config_err(format!(
            "expected {n} variances, got {}",
            v.len()
        ))),
        Some(v) => Ok(PriorCovariance::new(d, v.clone())),
        None => Ok(PriorCovariance::unit(d)),
    }
}

fn lambda_star_entry(
    op: &OperatedWeights,
    cov: &PriorCovariance,
    grid_size: usize,
) -> Outcome<(f64, f64, Vec<f64>)> {
    let (star, _) = optimize_lambda(op, cov, grid_size, DEFAULT_LAMBDA_TOL)?;
    let err = error_closed_form(op, star, cov)?;
    let crit = critical_points(op, cov, CRITICAL_GRID.max(grid_size))?;
    Ok((star, err, crit))
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|p| p[1] >= p[0])
}

pub fn curve(run: Run) -> Outcome<Value> {
    let cfg = run.cfg;
    let w = cfg.graph(run.seed)?;
    let ds = cfg.d_values()?;
    let d_max = ds.iter().copied().fold(0.0, f64::max);
    let mal = adversaries(cfg, &w, d_max)?;
    let op = apply_malicious(&w, &mal)?;
    let grid = cfg.lambda_grid()?;
    let mut stars = Vec::new();
    for &d in &ds {
        let cov = covariance(cfg, d, w.n())?;
        let curve = error_curve(&op, &cov, &grid)?;
        run.dir
            .write(&format!("curve_d{}.csv", fmt_num(d)), |out| {
                curve.write_csv(out)
            })?;
        stars.push((d, lambda_star_entry(&op, &cov, cfg.grid_size())?));
    }
    run.dir.write("lambda_star.csv", |out| {
        writeln!(out, "d,lambda_star,error_at_star,n_critical")?;
        for (d, (star, err, crit)) in &stars {
            writeln!(out, "{d},{star},{err},{}", crit.len())?;
        }
        Ok(())
    })?;
    let star_values: Vec<f64> = stars.iter().map(|s| s.1 .0).collect();
    Ok(json!({
        "malicious": labels(&mal),
        "n": w.n(),
        "lambda_star": stars.iter().map(|(d, (s, e, c))| json!({"d": d, "lambda_star": s, "error": e, "critical_points": c})).collect::<Vec<_>>(),
        "lambda_star_nondecreasing": nondecreasing(&star_values),
    }))
}

pub fn sweep_m(run: Run) -> Outcome<Value> {
    let cfg = run.cfg;
    let spec = cfg.regular_spec()?;
    let m_values = cfg.required(&cfg.m_values, "m_values")?;
    let fixed = cfg.fixed.unwrap_or(FixedCount::N);
    let d = cfg.d()?;
    let grid = cfg.lambda_grid()?;
    let graph_seed = spec.seed.unwrap_or(run.seed);
    let mut rows = Vec::new();
    for &m in &m_values {
        let n = match fixed {
            FixedCount::N => spec.n,
            FixedCount::R => spec.n + m,
        };
        if m == 0 || m >= n {
            return Err(config_err(format!(
                "m = {m} leaves no regular nodes on {n} nodes"
            )));
        }
        let w = match fixed {
            FixedCount::N => cfg.graph(run.seed)?,
            FixedCount::R => near_regular(n, spec.degree, graph_seed)?,
        };
        // spread the adversaries evenly over the labels
        let mal: Vec<usize> = (0..m).map(|k| k * n / m).collect();
        let op = apply_malicious(&w, &mal)?;
        let cov = PriorCovariance::unit(d);
        let curve = error_curve(&op, &cov, &grid)?;
        run.dir
            .write(&format!("curve_m{m}.csv"), |out| curve.write_csv(out))?;
        let (star, err, _) = lambda_star_entry(&op, &cov, cfg.grid_size())?;
        rows.push((m, n, star, err));
    }
    run.dir.write("lambda_star.csv", |out| {
        writeln!(out, "m,n,r,lambda_star,error_at_star")?;
        for (m, n, star, err) in &rows {
            writeln!(out, "{m},{n},{},{star},{err}", n - m)?;
        }
        Ok(())
    })?;
    Ok(json!({
        "fixed": match fixed { FixedCount::N => "n", FixedCount::R => "r" },
        "d": d,
        "lambda_star": rows.iter().map(|(m, n, s, e)| json!({"m": m, "n": n, "lambda_star": s, "error": e})).collect::<Vec<_>>(),
    }))
}

pub fn decompose(run: Run) -> Outcome<Value> {
    let cfg = run.cfg;
    let w = cfg.graph(run.seed)?;
    let d = cfg.d()?;
    let mal = adversaries(cfg, &w, d)?;
    let op = apply_malicious(&w, &mal)?;
    let cov = covariance(cfg, d, w.n())?;
    let rows = cfg
        .lambda_grid()?
        .iter()
        .map(|&l| decompose_error(&op, l, &cov))
        .collect::<rescomp::Result<Vec<_>>>()?;
    run.dir.write("decomposition.csv", |out| {
        write_decomposition_csv(&rows, out)
    })?;
    let competition: Vec<f64> = rows.iter().map(|r| r.competition).collect();
    let k_min = competition
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Ok(json!({
        "malicious": labels(&mal),
        "d": d,
        "competition_argmin_lambda": rows.get(k_min).map(|r| r.lambda),
        "collaboration_decreasing": rows.windows(2).all(|p| p[1].collaboration < p[0].collaboration),
    }))
}

pub fn degree_sweep_cmd(run: Run) -> Outcome<Value> {
    let cfg = run.cfg;
    let n = match (cfg.n, &cfg.graph) {
        (Some(n), _) => n,
        (None, Some(_)) => cfg.regular_spec()?.n,
        (None, None) => return Err(config_err("missing `n`")),
    };
    let degrees = cfg.required(&cfg.degrees, "degrees")?;
    let trials = cfg.trials.unwrap_or(50);
    let lambda = cfg.fixed_lambda()?;
    let d = cfg.d()?;
    let rows = degree_sweep(n, &degrees, trials, lambda, d, cfg.k_horizon, run.seed)?;
    run.dir
        .write("degree_sweep.csv", |out| write_sweep_csv(&rows, out))?;
    let err: Vec<f64> = rows.iter().map(|r| r.avg_worst_error).collect();
    let idx: Vec<f64> = rows.iter().map(|r| r.avg_worst_contr_index).collect();
    let decreasing = |v: &[f64]| v.windows(2).all(|p| p[1] < p[0]);
    Ok(json!({
        "n": n,
        "trials": trials,
        "error_decreasing": decreasing(&err),
        "contr_index_decreasing": decreasing(&idx),
    }))
}

pub fn greedy(run: Run) -> Outcome<Value> {
    let cfg = run.cfg;
    let w = cfg.graph(run.seed)?;
    let e_rm = cfg.required(&cfg.e_rm, "e_rm")?;
    let lambda = cfg.fixed_lambda()?;
    let d = cfg.d()?;
    let metrics = match cfg.metric.unwrap_or(MetricChoice::Both) {
        MetricChoice::ConsensusError => vec![MetricKind::ConsensusError { lambda, d }],
        MetricChoice::ControllabilityIndex => vec![MetricKind::ControllabilityIndex {
            lambda,
            horizon: cfg.k_horizon,
        }],
        MetricChoice::Both => vec![
            MetricKind::ConsensusError { lambda, d },
            MetricKind::ControllabilityIndex {
                lambda,
                horizon: cfg.k_horizon,
            },
        ],
    };
    let pruned = matching_prune(&w);
    let mut prune_rows = Vec::new();
    let mut summary = serde_json::Map::new();
    for metric in metrics {
        let trace = greedy_edge_removal(&w, e_rm, metric)?;
        run.dir
            .write(&format!("greedy_{}.csv", metric.name()), |out| {
                trace.write_csv(out)
            })?;
        let last = trace
            .steps
            .last()
            .map(|s| s.metric_value)
            .unwrap_or(trace.initial_worst.1);
        let prune = match &pruned {
            Ok(p) => {
                let (node, value) = worst_case_node(p, metric)?;
                prune_rows.push((metric.name(), node, value, p.topology().edge_count()));
                json!({"worst_node": node + 1, "metric_value": value, "n_edges": p.topology().edge_count()})
            }
            Err(e) => json!({"error": e.to_string()}),
        };
        summary.insert(
            metric.name().to_string(),
            json!({
                "initial": trace.initial_worst.1,
                "final": last,
                "removed": trace.steps.len(),
                "skipped": trace.skipped.len(),
                "matching_prune": prune,
            }),
        );
    }
    run.dir.write("prune.csv", |out| {
        writeln!(out, "metric,worst_node,metric_value,n_edges")?;
        for (name, node, value, edges) in &prune_rows {
            writeln!(out, "{name},{},{value},{edges}", node + 1)?;
        }
        Ok(())
    })?;
    Ok(Value::Object(summary))
}

pub fn compare(run: Run) -> Outcome<Value> {
    let cfg = run.cfg;
    let w = cfg.graph(run.seed)?;
    let d = cfg.d()?;
    let mal = adversaries(cfg, &w, d)?;
    let variances = cfg.variances.clone().unwrap_or_else(|| vec![1.0; w.n()]);
    let sc = Scenario::with_variances(variances, &mal, d, run.seed)?;
    let op = apply_malicious(&w, &mal)?;
    let lambda = match cfg.lambda()? {
        None | Some(LambdaChoice::Optimize) => {
            optimize_lambda(&op, &sc.covariance(), cfg.grid_size(), DEFAULT_LAMBDA_TOL)?.0
        }
        Some(LambdaChoice::Fixed(l)) => l,
        Some(LambdaChoice::Grid(_)) => {
            return Err(config_err(
                "`compare` needs a numeric lambda or \"optimize\"",
            ))
        }
    };
    let f = cfg.f.unwrap_or(mal.len());
    let trials = cfg.trials.unwrap_or(20);
    let steps = cfg.steps.unwrap_or(1000);
    let cmp = compare_dynamics(&w, &sc, lambda, f, steps, trials)?;
    run.dir.write("compare.csv", |out| cmp.write_csv(out))?;
    let t = cmp.terminal();
    let finite = cmp.steps.iter().all(|s| {
        [s.consensus_error, s.fj_error, s.wmsr_error]
            .iter()
            .all(|v| v.is_finite())
    });
    Ok(json!({
        "malicious": labels(&mal),
        "lambda": lambda,
        "f": f,
        "trials": trials,
        "steps": steps,
        "terminal_error": {"consensus": t.consensus_error, "fj": t.fj_error, "wmsr": t.wmsr_error},
        "terminal_cost": {"consensus": t.consensus_cost, "fj": t.fj_cost, "wmsr": t.wmsr_cost},
        "fj_lowest": t.fj_error < t.wmsr_error && t.fj_error < t.consensus_error,
        "finite": finite,
    }))
}

pub fn validate(run: Run) -> Outcome<Value> {
    let checks = run_suite(run.seed);
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    run.dir.write("validate.csv", |out| {
        writeln!(out, "check,passed,detail")?;
        for c in &checks {
            writeln!(
                out,
                "{},{},\"{}\"",
                c.name,
                c.passed,
                c.detail.replace('"', "'")
            )?;
        }
        Ok(())
    })?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if !failed.is_empty() {
        return Err(Failure::Checks(format!(
            "failed checks: {}",
            failed.join(", ")
        )));
    }
    Ok(json!({ "checks": checks.len(), "failed": 0 }))
}
