//! Subcommand execution: reads a config, runs one task, writes artifacts,
//! and reports an exit code. Exit code 0 means the task ran and every check
//! it makes passed; 1 means a numerical failure or a failed verdict; 2 means
//! the invocation or configuration was unusable.

use crate::analysis::{
    amplitude_sweep, bump_datum, classify, ordering_audit, road_effect, ClassifyConfig,
    DynamicsProbe,
};
use crate::artifacts::ArtifactSink;
use crate::config::{config_sha256, parse_config, Resolved};
use crate::dynamics::Stepper;
use crate::eigen::{principal_eigenpair, truncation_sweep};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::model::validate_hypotheses;
use crate::operator::assemble;
use crate::util::fmt17;
use serde::Serialize;
use std::fmt::Display;
use std::fs;
use std::path::Path;

/// The eight CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Eigen,
    Sweep,
    Evolve,
    Classify,
    RoadEffect,
    Amplitude,
    Audit,
    Validate,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Eigen => "eigen",
            Task::Sweep => "sweep",
            Task::Evolve => "evolve",
            Task::Classify => "classify",
            Task::RoadEffect => "road-effect",
            Task::Amplitude => "amplitude",
            Task::Audit => "audit",
            Task::Validate => "validate",
        }
    }

    pub fn from_name(name: &str) -> Option<Task> {
        Some(match name {
            "eigen" => Task::Eigen,
            "sweep" => Task::Sweep,
            "evolve" => Task::Evolve,
            "classify" => Task::Classify,
            "road-effect" => Task::RoadEffect,
            "amplitude" => Task::Amplitude,
            "audit" => Task::Audit,
            "validate" => Task::Validate,
            _ => return None,
        })
    }
}

fn say(quiet: bool, msg: impl Display) {
    if !quiet {
        println!("{msg}");
    }
}

/// Runs `task` against the config at `config_path`, writing artifacts under
/// `out_dir`. Never panics on bad input; returns the process exit code.
pub fn run(task: Task, config_path: &Path, out_dir: &Path, quiet: bool) -> i32 {
    let text = match fs::read_to_string(config_path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", config_path.display());
            return 2;
        }
    };
    run_with_text(task, &text, out_dir, quiet)
}

/// Same as [`run`], but takes the configuration JSON directly (used by
/// embedders that do not have the config on disk).
pub fn run_with_text(task: Task, config_text: &str, out_dir: &Path, quiet: bool) -> i32 {
    match run_inner(task, config_text, out_dir, quiet) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(task: Task, text: &str, out_dir: &Path, quiet: bool) -> Result<i32> {
    let cfg = parse_config(text)?;
    let sha = config_sha256(&cfg);
    let resolved = cfg.resolve()?;

    let mut sink = ArtifactSink::new(out_dir)?;
    let code = match dispatch(task, &resolved, &mut sink, quiet) {
        Ok(code) => code,
        Err(e) => {
            // An aborted run leaves no partial artifacts behind.
            sink.discard();
            return Err(e);
        }
    };
    let artifact_count = sink.count();
    sink.finish(task.name(), &sha)?;
    say(
        quiet,
        format_args!(
            "{}: wrote {artifact_count} artifact(s) and manifest.json to {}",
            task.name(),
            out_dir.display()
        ),
    );
    Ok(code)
}

fn dispatch(task: Task, res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    match task {
        Task::Eigen => run_eigen(res, sink, quiet),
        Task::Sweep => run_sweep(res, sink, quiet),
        Task::Evolve => run_evolve(res, sink, quiet),
        Task::Classify => run_classify(res, sink, quiet),
        Task::RoadEffect => run_road_effect(res, sink, quiet),
        Task::Amplitude => run_amplitude(res, sink, quiet),
        Task::Audit => run_audit(res, sink, quiet),
        Task::Validate => run_validate(res, sink, quiet),
    }
}

#[derive(Serialize)]
struct EigenReport {
    family: &'static str,
    r: f64,
    height: f64,
    dim: usize,
    dim_road: usize,
    lambda: f64,
    residual: f64,
    iters: usize,
    factorizations: usize,
}

fn run_eigen(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let geom = res.single_geometry()?;
    let op = assemble(&geom, &res.params, Some(&res.reaction))?;
    let pair = principal_eigenpair(&op, &res.solve)?;
    say(
        quiet,
        format_args!(
            "lambda = {} on {} (r = {}, height = {}, {} unknowns, residual {:.3e}, {} iterations)",
            fmt17(pair.lambda),
            res.family.name(),
            res.r,
            res.height,
            geom.dim(),
            pair.residual,
            pair.iters
        ),
    );
    sink.write_json(
        "eigen.json",
        "eigen-report",
        &EigenReport {
            family: res.family.name(),
            r: res.r,
            height: res.height,
            dim: geom.dim(),
            dim_road: geom.dim_road(),
            lambda: pair.lambda,
            residual: pair.residual,
            iters: pair.iters,
            factorizations: pair.factorizations,
        },
    )?;
    if res.write_vectors {
        if !pair.vec_road.is_empty() {
            sink.write_road_csv("eigenvector_road.csv", &geom, &pair.vec_road)?;
        }
        sink.write_field_csv("eigenvector_field.csv", &geom, &pair.vec_field)?;
    }
    Ok(0)
}

fn run_sweep(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let family = res.family.sweep_family().ok_or_else(|| {
        Error::config(
            "/numerics/family",
            format!(
                "sweeps run on \"coupled\", \"dirichlet-rect\", or \"neumann-rect\", not \"{}\"",
                res.family.name()
            ),
        )
    })?;
    let sweep =
        truncation_sweep(family, &res.params, Some(&res.reaction), &res.sizes, res.grid, &res.solve)?;
    sink.write_text("sweep.csv", "sweep", &ArtifactSink::sweep_csv(&sweep.points))?;
    sink.write_json("sweep.json", "sweep-report", &sweep)?;
    say(
        quiet,
        format_args!(
            "limit estimate {} over {} sizes on {} (monotone: {})",
            fmt17(sweep.limit_estimate),
            sweep.points.len(),
            res.family.name(),
            sweep.monotone
        ),
    );
    if sweep.monotone {
        Ok(0)
    } else {
        say(quiet, "eigenvalues did not decrease monotonically with domain size");
        Ok(1)
    }
}

#[derive(Serialize)]
struct EvolveReport {
    kind: crate::dynamics::OutcomeKind,
    steps: usize,
    t_final: f64,
    decay_time: Option<f64>,
    sup_road: f64,
    sup_field: f64,
}

fn run_evolve(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let geom = Geometry::periodic_half_strip(
        res.dyn_height,
        res.params.ell,
        res.periods,
        res.grid.hx,
        res.grid.hy,
    )?;
    let mut stepper =
        Stepper::new(&geom, &res.params, &res.reaction, res.evolve.dt, res.reaction.saturation)?;
    let initial = bump_datum(&geom, &res.reaction);
    let outcome = stepper.evolve(initial, &res.evolve)?;
    sink.write_text("trajectory.csv", "trajectory", &ArtifactSink::trajectory_csv(&outcome.history))?;
    if res.write_vectors {
        sink.write_state("final", &geom, &outcome.final_state)?;
    }
    let report = EvolveReport {
        kind: outcome.kind,
        steps: outcome.steps,
        t_final: outcome.final_state.t,
        decay_time: outcome.decay_time,
        sup_road: outcome.final_state.sup_road(),
        sup_field: outcome.final_state.sup_field(),
    };
    sink.write_json("evolve.json", "evolve-report", &report)?;
    say(
        quiet,
        format_args!(
            "dynamics: {:?} after {} steps (t = {}, sup road {:.6e}, sup field {:.6e})",
            report.kind, report.steps, report.t_final, report.sup_road, report.sup_field
        ),
    );
    Ok(0)
}

fn run_classify(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let cfg = ClassifyConfig {
        sizes: res.sizes.clone(),
        grid: res.grid,
        solve: res.solve.clone(),
        delta_sign: res.delta_sign,
        dynamics: res.run_dynamics.then(|| DynamicsProbe {
            height: res.dyn_height,
            periods: res.periods,
            evolve: res.evolve.clone(),
        }),
    };
    let verdict = classify(&res.params, &res.reaction, &cfg)?;
    sink.write_text("sweep.csv", "sweep", &ArtifactSink::sweep_csv(&verdict.lambda_points))?;
    sink.write_json("classify.json", "classification", &verdict)?;
    let dynamics = match verdict.dynamics_kind {
        Some(kind) => format!("{kind:?}"),
        None => "skipped".to_string(),
    };
    let agreement = match verdict.agreement {
        Some(ok) => ok.to_string(),
        None => "n/a".to_string(),
    };
    say(
        quiet,
        format_args!(
            "lambda ~ {:.6} -> sign {}, prediction {:?}; dynamics {}; agreement {}",
            verdict.lambda_estimate,
            verdict.sign.as_str(),
            verdict.predicted,
            dynamics,
            agreement
        ),
    );
    if verdict.agreement == Some(false) {
        say(quiet, "prediction and dynamics disagree");
        Ok(1)
    } else {
        Ok(0)
    }
}

fn run_road_effect(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let report = road_effect(
        &res.params,
        &res.reaction,
        &res.sizes,
        res.grid,
        &res.solve,
        res.delta_sign,
    )?;
    sink.write_text("coupled_sweep.csv", "sweep", &ArtifactSink::sweep_csv(&report.coupled_points))?;
    sink.write_json("road_effect.json", "road-effect-report", &report)?;
    let signs = match report.signs_agree {
        Some(ok) => ok.to_string(),
        None => "indeterminate".to_string(),
    };
    say(
        quiet,
        format_args!(
            "roadless cell {:.6} vs coupled limit {:.6}; ordered {}, below mu {}, signs agree {}",
            report.lambda_cell, report.lambda_coupled, report.ordering_ok, report.mu_bound_ok, signs
        ),
    );
    let ok = report.ordering_ok && report.mu_bound_ok && report.signs_agree != Some(false);
    Ok(if ok { 0 } else { 1 })
}

fn run_amplitude(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let report = amplitude_sweep(
        &res.params,
        &res.reaction,
        &res.alphas,
        &res.sizes,
        res.grid,
        &res.solve,
        res.delta_sign,
    )?;
    let mut csv = String::from("alpha,lambda,sign\n");
    for ((&alpha, &lambda), sign) in report.alphas.iter().zip(&report.lambdas).zip(&report.signs) {
        csv.push_str(&format!("{alpha},{},{}\n", fmt17(lambda), sign.as_str()));
    }
    sink.write_text("amplitude.csv", "amplitude-sweep", &csv)?;
    sink.write_json("amplitude.json", "amplitude-report", &report)?;
    let bracket = match report.transition_bracket {
        Some((lo, hi)) => format!("({lo}, {hi})"),
        None => "none".to_string(),
    };
    say(
        quiet,
        format_args!(
            "amplitude ladder over {:?}: single transition {}, bracket {}",
            report.alphas, report.single_transition, bracket
        ),
    );
    Ok(if report.single_transition { 0 } else { 1 })
}

fn run_audit(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let audit =
        ordering_audit(&res.params, &res.reaction, res.audit_r, res.grid, &res.solve)?;
    sink.write_json("audit.json", "ordering-audit", &audit)?;
    for item in &audit.items {
        say(
            quiet,
            format_args!(
                "[{}] {}: {} vs {} (tol {:.1e})",
                if item.passed { "pass" } else { "FAIL" },
                item.name,
                fmt17(item.lhs),
                fmt17(item.rhs),
                item.tol
            ),
        );
    }
    Ok(if audit.all_passed { 0 } else { 1 })
}

fn run_validate(res: &Resolved, sink: &mut ArtifactSink, quiet: bool) -> Result<i32> {
    let report = validate_hypotheses(&res.reaction, 64)?;
    sink.write_json("validate.json", "hypothesis-report", &report)?;
    for check in &report.checks {
        say(
            quiet,
            format_args!("[{}] {}", if check.passed { "pass" } else { "FAIL" }, check.name),
        );
    }
    if report.all_passed {
        Ok(0)
    } else {
        say(quiet, "one or more model hypotheses failed; see validate.json");
        Ok(1)
    }
}
