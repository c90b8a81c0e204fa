use anyhow::{bail, Context, Result};
use log::info;
use rayon::prelude::*;
use serde_json::{json, Value};

use linesearch_core::mrays::{default_horizon, feasible_b_interval, mray_ratio_profile, ratio_bound};
use linesearch_core::simulate::{baseline, grid_sweep_ratio, worst_case_ratio};
use linesearch_core::{
    maximal_reach, optimize, optimize_log2, Baseline, RatioSolution, RayFamilyParams, ReachQuery,
    SearchProblem, SolveMode, SolveResult, StrategyReport,
};

use crate::output::{cell, cells, OutputRecord};

/// A finished command: the record plus its flat rows, and whether every
/// self-check passed.
pub struct Report {
    pub record: OutputRecord,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    pub rho_min: f64,
    pub rho_max: f64,
    pub points: usize,
}

impl Sweep {
    pub fn rhos(&self) -> Result<Vec<f64>> {
        if !(self.rho_min >= 1.0 && self.rho_max >= self.rho_min && self.rho_max.is_finite()) {
            bail!("sweep needs 1 <= rho-min <= rho-max, got [{}, {}]", self.rho_min, self.rho_max);
        }
        if self.points == 0 {
            bail!("sweep needs at least one point");
        }
        if self.points == 1 {
            return Ok(vec![self.rho_min]);
        }
        let (lo, hi) = (self.rho_min.ln(), self.rho_max.ln());
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| match k {
                0 => self.rho_min,
                k if k == self.points - 1 => self.rho_max,
                k => (lo + (hi - lo) * k as f64 / last).exp(),
            })
            .collect())
    }

    fn echo(&self) -> Value {
        json!({"rho_min": self.rho_min, "rho_max": self.rho_max, "points": self.points})
    }
}

fn solve_diagnostics(mode: SolveMode, cr_error_bound: f64, solve: &SolveResult) -> Value {
    json!({
        "mode": mode.as_str(),
        "cr_error_bound": cr_error_bound,
        "residual": solve.residual,
        "rel_residual": solve.rel_residual,
        "bracket": [solve.bracket.0, solve.bracket.1],
        "bracket_width": solve.bracket_width,
        "iterations": solve.iterations,
    })
}

fn turns_with_terminal(report: &StrategyReport) -> Vec<f64> {
    report.strategy.with_terminal()
}

const OPTIMAL_HEADER: [&str; 11] = [
    "rho", "lambda", "Lambda", "n", "a0", "cr", "mode", "cr_error_bound", "residual", "rel_residual", "turns",
];

fn optimal_row(rho: f64, lambda: f64, r: &StrategyReport) -> Vec<String> {
    vec![
        cell(rho),
        cell(lambda),
        cell(r.strategy.terminal()),
        r.n.to_string(),
        cell(r.a0),
        cell(r.cr),
        r.mode.as_str().to_string(),
        cell(r.cr_error_bound),
        cell(r.solve.residual),
        cell(r.solve.rel_residual),
        cells(&turns_with_terminal(r)),
    ]
}

fn solve_problem(lambda: f64, upper: f64, eps: f64) -> Result<StrategyReport> {
    let problem = SearchProblem::new(lambda, upper, eps)?;
    info!("optimizing lambda = {lambda}, Lambda = {upper}, eps = {eps}");
    Ok(optimize(&problem)?)
}

pub fn optimal(lambda: f64, upper: f64, eps: f64) -> Result<Report> {
    let r = solve_problem(lambda, upper, eps)?;
    let rho = upper / lambda;
    let record = OutputRecord::new(
        "optimal",
        json!({"lambda": lambda, "Lambda": upper, "eps": eps}),
        json!({
            "rho": rho,
            "n": r.n,
            "a0": r.a0,
            "cr": r.cr,
            "turns": turns_with_terminal(&r),
            "terminal": r.strategy.terminal(),
        }),
        solve_diagnostics(r.mode, r.cr_error_bound, &r.solve),
    );
    Ok(Report {
        record,
        header: OPTIMAL_HEADER.to_vec(),
        rows: vec![optimal_row(rho, lambda, &r)],
        ok: true,
    })
}

fn ratio_row(log2_rho: f64, s: &RatioSolution) -> Vec<String> {
    vec![
        cell(log2_rho),
        s.n.to_string(),
        cell(s.a0),
        cell(s.cr),
        s.mode.as_str().to_string(),
        cell(s.cr_error_bound),
        cell(s.solve.rel_residual),
    ]
}

/// Ratio-only optimum for `rho = 2^log2_rho`; the turns are not expanded.
pub fn optimal_log2(log2_rho: f64, eps: f64) -> Result<Report> {
    let s = optimize_log2(log2_rho, eps)?;
    let record = OutputRecord::new(
        "optimal",
        json!({"log2_rho": log2_rho, "eps": eps}),
        json!({"log2_rho": log2_rho, "n": s.n, "a0": s.a0, "cr": s.cr}),
        solve_diagnostics(s.mode, s.cr_error_bound, &s.solve),
    );
    Ok(Report {
        record,
        header: vec!["log2_rho", "n", "a0", "cr", "mode", "cr_error_bound", "rel_residual"],
        rows: vec![ratio_row(log2_rho, &s)],
        ok: true,
    })
}

pub fn optimal_sweep(lambda: f64, eps: f64, sweep: Sweep) -> Result<Report> {
    let rhos = sweep.rhos()?;
    let reports: Vec<StrategyReport> = rhos
        .par_iter()
        .map(|&rho| solve_problem(lambda, rho * lambda, eps))
        .collect::<Result<_>>()?;
    let rows = rhos.iter().zip(&reports).map(|(&rho, r)| optimal_row(rho, lambda, r)).collect();
    let results: Vec<Value> = rhos
        .iter()
        .zip(&reports)
        .map(|(&rho, r)| {
            json!({
                "rho": rho,
                "n": r.n,
                "a0": r.a0,
                "cr": r.cr,
                "mode": r.mode.as_str(),
                "cr_error_bound": r.cr_error_bound,
                "rel_residual": r.solve.rel_residual,
                "turns": turns_with_terminal(r),
            })
        })
        .collect();
    let record = OutputRecord::new(
        "optimal",
        json!({"lambda": lambda, "eps": eps, "sweep": sweep.echo()}),
        json!({"rows": results}),
        json!({"points": rhos.len()}),
    );
    Ok(Report {
        record,
        header: OPTIMAL_HEADER.to_vec(),
        rows,
        ok: true,
    })
}

pub fn reach(ratio: f64, lambda: f64) -> Result<Report> {
    let query = ReachQuery::new(ratio, lambda)?;
    let r = maximal_reach(&query)?;
    let turns = r.strategy.with_terminal();
    let witness = worst_case_ratio(&r.strategy, lambda, r.upper)?.sup_ratio;
    let record = OutputRecord::new(
        "reach",
        json!({"ratio": ratio, "lambda": lambda}),
        json!({"Lambda": r.upper, "n": r.n, "a0": r.a0, "turns": turns}),
        json!({"witness_ratio": witness, "witness_error": (witness - ratio).abs()}),
    );
    Ok(Report {
        record,
        header: vec!["ratio", "lambda", "Lambda", "n", "a0", "witness_ratio", "turns"],
        rows: vec![vec![
            cell(ratio),
            cell(lambda),
            cell(r.upper),
            r.n.to_string(),
            cell(r.a0),
            cell(witness),
            cells(&turns),
        ]],
        ok: true,
    })
}

struct Verification {
    rho: f64,
    report: StrategyReport,
    sup_ratio: f64,
    spread: f64,
    per_interval: Value,
    grid_ratio: f64,
    baselines: Vec<(Baseline, f64)>,
    checks: Vec<(&'static str, bool)>,
}

impl Verification {
    fn passed(&self) -> bool {
        self.checks.iter().all(|&(_, ok)| ok)
    }
}

fn verify_one(lambda: f64, upper: f64, eps: f64, grid_points: usize) -> Result<Verification> {
    let report = solve_problem(lambda, upper, eps)?;
    let exact = worst_case_ratio(&report.strategy, lambda, upper)?;
    let grid_ratio = grid_sweep_ratio(&report.strategy, lambda, upper, grid_points)?;
    let baselines = Baseline::ALL
        .into_iter()
        .map(|b| {
            let s = baseline(b, lambda, upper)?;
            Ok((b, worst_case_ratio(&s, lambda, upper)?.sup_ratio))
        })
        .collect::<Result<Vec<_>>>()?;

    // Only the last piece depends on how closely a_n hits rho; its ratio moves
    // by 2 |a_n - rho| / a_{n-1}.
    let last_turn = report.strategy.turns().last().map_or(lambda, |&t| t) / lambda;
    let tol = 1e-9 + 2.0 * report.solve.residual / last_turn;
    let min_sup = exact.per_interval.iter().map(|p| p.sup).fold(f64::INFINITY, f64::min);
    let spread = exact.sup_ratio - min_sup;
    let mut checks = vec![
        ("sup_matches_cr", (exact.sup_ratio - report.cr).abs() <= tol),
        ("grid_below_exact", grid_ratio <= exact.sup_ratio * (1.0 + 1e-12)),
        (
            "beats_baselines",
            baselines.iter().all(|&(_, r)| report.cr <= r + tol),
        ),
    ];
    // a limit-mode first turn overshoots, so only the final piece is shorter
    if report.mode != SolveMode::LimitApprox {
        checks.push(("equalized", spread <= tol));
    }
    let per_interval = exact
        .per_interval
        .iter()
        .map(|p| json!({"index": p.index, "lower": p.lower, "upper": p.upper, "sup": p.sup, "attained": p.attained}))
        .collect();
    Ok(Verification {
        rho: upper / lambda,
        report,
        sup_ratio: exact.sup_ratio,
        spread,
        per_interval: Value::Array(per_interval),
        grid_ratio,
        baselines,
        checks,
    })
}

impl Verification {
    fn results(&self) -> Value {
        let baselines: serde_json::Map<String, Value> =
            self.baselines.iter().map(|(b, r)| (b.name().to_string(), json!(r))).collect();
        let checks: serde_json::Map<String, Value> =
            self.checks.iter().map(|&(name, ok)| (name.to_string(), json!(ok))).collect();
        json!({
            "rho": self.rho,
            "n": self.report.n,
            "a0": self.report.a0,
            "cr": self.report.cr,
            "turns": turns_with_terminal(&self.report),
            "worst_case_ratio": self.sup_ratio,
            "interval_spread": self.spread,
            "per_interval": self.per_interval,
            "grid_ratio": self.grid_ratio,
            "baselines": baselines,
            "checks": checks,
            "passed": self.passed(),
        })
    }

    fn row(&self) -> Vec<String> {
        let mut row = vec![
            cell(self.rho),
            self.report.n.to_string(),
            cell(self.report.cr),
            self.report.mode.as_str().to_string(),
            cell(self.sup_ratio),
            cell(self.spread),
            cell(self.grid_ratio),
        ];
        row.extend(self.baselines.iter().map(|&(_, r)| cell(r)));
        row.push(self.passed().to_string());
        row
    }
}

const VERIFY_HEADER: [&str; 12] = [
    "rho",
    "n",
    "cr",
    "mode",
    "worst_case_ratio",
    "interval_spread",
    "grid_ratio",
    "power_of_two",
    "f_infinity",
    "los_sqrt",
    "single_shot",
    "passed",
];

pub fn verify(lambda: f64, upper: f64, eps: f64, grid_points: usize) -> Result<Report> {
    let v = verify_one(lambda, upper, eps, grid_points)?;
    let ok = v.passed();
    let record = OutputRecord::new(
        "verify",
        json!({"lambda": lambda, "Lambda": upper, "eps": eps, "grid_points": grid_points}),
        v.results(),
        solve_diagnostics(v.report.mode, v.report.cr_error_bound, &v.report.solve),
    );
    Ok(Report {
        record,
        header: VERIFY_HEADER.to_vec(),
        rows: vec![v.row()],
        ok,
    })
}

pub fn verify_sweep(lambda: f64, eps: f64, grid_points: usize, sweep: Sweep) -> Result<Report> {
    let rhos = sweep.rhos()?;
    let all: Vec<Verification> = rhos
        .par_iter()
        .map(|&rho| verify_one(lambda, rho * lambda, eps, grid_points))
        .collect::<Result<_>>()?;
    let ok = all.iter().all(Verification::passed);
    let record = OutputRecord::new(
        "verify",
        json!({"lambda": lambda, "eps": eps, "grid_points": grid_points, "sweep": sweep.echo()}),
        json!({"rows": all.iter().map(Verification::results).collect::<Vec<_>>(), "passed": ok}),
        json!({"points": all.len(), "failed": all.iter().filter(|v| !v.passed()).count()}),
    );
    Ok(Report {
        record,
        header: VERIFY_HEADER.to_vec(),
        rows: all.iter().map(Verification::row).collect(),
        ok,
    })
}

pub fn mray(m: usize, a: f64, b: f64, lambda: f64, horizon: Option<usize>) -> Result<Report> {
    let (lo, hi) = feasible_b_interval(m, a)?;
    let params = RayFamilyParams::new(m, a, b, lambda);
    let validation = params.validate();
    let horizon = horizon.unwrap_or_else(|| default_horizon(m));
    if horizon < m {
        bail!("horizon {horizon} must be at least m = {m}");
    }
    let inputs = json!({"m": m, "a": a, "b": b, "lambda": lambda, "horizon": horizon});
    let header = vec!["m", "a", "b", "feasible", "b_min", "b_max", "sup_ratio", "bound", "residual"];
    if let Err(e) = validation {
        // an infeasible b has no worst-case ratio to report
        if !matches!(e, linesearch_core::Error::InfeasibleParams { .. }) {
            return Err(e).context("invalid ray-family parameters");
        }
        let record = OutputRecord::new(
            "mray",
            inputs,
            json!({"feasible": false, "b_interval": [lo, hi], "bound": ratio_bound(m)}),
            json!({"error": e.to_string()}),
        );
        let row = vec![
            m.to_string(),
            cell(a),
            cell(b),
            "false".into(),
            cell(lo),
            cell(hi),
            String::new(),
            cell(ratio_bound(m)),
            String::new(),
        ];
        return Ok(Report { record, header, rows: vec![row], ok: false });
    }
    let r = mray_ratio_profile(&params, horizon);
    let record = OutputRecord::new(
        "mray",
        inputs,
        json!({
            "feasible": true,
            "b_interval": [lo, hi],
            "sup_ratio": r.sup_ratio,
            "bound": r.bound,
            "lower_bound": r.lower_bound,
            "within_bounds": r.within_bounds(1e-9),
        }),
        json!({"residual": r.residual, "horizon": r.horizon}),
    );
    let row = vec![
        m.to_string(),
        cell(a),
        cell(b),
        "true".into(),
        cell(lo),
        cell(hi),
        cell(r.sup_ratio),
        cell(r.bound),
        cell(r.residual),
    ];
    Ok(Report {
        record,
        header,
        rows: vec![row],
        ok: r.within_bounds(1e-9),
    })
}
