//! Long-time integration of the nonlinear road-field dynamics.
//!
//! Time stepping is IMEX: the transport-exchange part (diffusion, drift,
//! road coupling — everything linear and stiff) is implicit, the reaction is
//! explicit:
//!
//! ```text
//!   (I + dt A) z_{n+1} = z_n + dt F(z_n)
//! ```
//!
//! where `A` is the assembly with `a = 0` and `F` applies `f(x, v)` to field
//! entries. `(I + dt A)^{-1}` is entrywise non-negative (M-matrix), and the
//! explicit map `v -> v + dt f(x, v)` is non-decreasing whenever
//! `dt * Lip(f) <= 1`; the stepper enforces `<= 1/2`. The composed step map
//! is therefore monotone, which turns the comparison principle into an exact
//! property of the scheme: ordered states stay ordered, discrete sub- and
//! supersolutions really do sandwich every trajectory between them.

use crate::banded::BandedLu;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::model::{ModelParams, ReactionSpec};
use crate::operator::{assemble, DiscreteOperator};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Time slice of the coupled state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub road: Vec<f64>,
    pub field: Vec<f64>,
}

impl State {
    pub fn zeros(geom: &Geometry) -> Self {
        State { t: 0.0, road: vec![0.0; geom.dim_road()], field: vec![0.0; geom.dim_field()] }
    }

    pub fn constant(geom: &Geometry, u: f64, v: f64) -> Self {
        State { t: 0.0, road: vec![u; geom.dim_road()], field: vec![v; geom.dim_field()] }
    }

    pub fn sup(&self) -> f64 {
        self.road.iter().chain(&self.field).cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.road.iter().chain(&self.field).cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_road(&self) -> f64 {
        self.road.iter().cloned().fold(0.0f64, f64::max)
    }

    pub fn sup_field(&self) -> f64 {
        self.field.iter().cloned().fold(0.0f64, f64::max)
    }

    fn dims_match(&self, geom: &Geometry) -> bool {
        self.road.len() == geom.dim_road() && self.field.len() == geom.dim_field()
    }
}

/// Integration controls. Tolerances are relative to the comparison ceiling
/// the stepper was built with.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvolveOpts {
    pub dt: f64,
    pub t_max: f64,
    /// Steady when `||z_{n+1} - z_n||_inf / dt < steady_rel * ceiling`.
    pub steady_rel: f64,
    /// Extinct when `sup z < decay_rel * ceiling`.
    pub decay_rel: f64,
    /// Record one history sample every this many steps.
    pub record_every: usize,
}

impl Default for EvolveOpts {
    fn default() -> Self {
        EvolveOpts { dt: 0.01, t_max: 1000.0, steady_rel: 1e-8, decay_rel: 1e-6, record_every: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeKind {
    /// Settled onto a positive steady state.
    ConvergedPositive,
    /// Sup norm fell below the extinction threshold.
    DecayedToZero,
    /// Reached `t_max` without either verdict.
    Undecided,
}

/// One recorded trajectory sample.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SupSample {
    pub t: f64,
    pub sup_road: f64,
    pub sup_field: f64,
    pub min_road: f64,
    pub min_field: f64,
    /// `||z_{n+1} - z_n||_inf / dt` at this sample.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveOutcome {
    pub kind: OutcomeKind,
    pub final_state: State,
    pub history: Vec<SupSample>,
    /// First time the sup norm crossed the extinction threshold.
    pub decay_time: Option<f64>,
    pub steps: usize,
}

/// IMEX stepper bound to one geometry, parameter set, and reaction.
#[derive(Debug)]
pub struct Stepper {
    linear: DiscreteOperator,
    reaction: ReactionSpec,
    xs: Vec<f64>,
    /// Comparison ceiling: states are expected to live in `[0, ceiling]`
    /// (road scaled by `nu/mu`); used for Lipschitz and tolerance scaling.
    ceiling: f64,
    base_dt: f64,
    factors: HashMap<u64, BandedLu>,
}

impl Stepper {
    /// Builds the stepper and factors the implicit matrix for `dt`.
    ///
    /// `ceiling` must dominate the initial data and the carrying capacity;
    /// the constructor enforces `dt * Lip(f on [0, 2*ceiling]) <= 1/2` so the
    /// explicit half-step is monotone with room to spare.
    pub fn new(
        geom: &Geometry,
        params: &ModelParams,
        reaction: &ReactionSpec,
        dt: f64,
        ceiling: f64,
    ) -> Result<Self> {
        if geom.is_1d() {
            return Err(Error::GeometryMismatch(
                "dynamics needs a two-dimensional geometry".into(),
            ));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::ParameterDomain(format!("dt must be positive, got {dt}")));
        }
        if !ceiling.is_finite() || ceiling <= 0.0 {
            return Err(Error::ParameterDomain(format!(
                "comparison ceiling must be positive, got {ceiling}"
            )));
        }
        let lip = reaction.lipschitz_bound(2.0 * ceiling);
        if dt * lip > 0.5 {
            return Err(Error::ParameterDomain(format!(
                "dt = {dt} too large: dt * Lip(f) = {:.3e} exceeds 1/2 (reduce dt below {:.3e})",
                dt * lip,
                0.5 / lip
            )));
        }
        let linear = assemble(geom, params, None)?;
        let xs: Vec<f64> = (0..geom.nx).map(|i| geom.x(i)).collect();
        let mut stepper = Stepper {
            linear,
            reaction: reaction.clone(),
            xs,
            ceiling,
            base_dt: dt,
            factors: HashMap::new(),
        };
        stepper.factor_for(dt)?;
        Ok(stepper)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.linear.geometry
    }

    pub fn ceiling(&self) -> f64 {
        self.ceiling
    }

    fn factor_for(&mut self, dt: f64) -> Result<&BandedLu> {
        let key = dt.to_bits();
        if !self.factors.contains_key(&key) {
            // (I + dt A) x = b  <=>  (A + I/dt) x = b / dt.
            let lu = BandedLu::factor_shifted(&self.linear.matrix, -1.0 / dt)?;
            self.factors.insert(key, lu);
        }
        Ok(&self.factors[&key])
    }

    /// Reaction term stacked like the state vector (zero on road entries).
    fn reaction_term(&self, field: &[f64]) -> Vec<f64> {
        let nx = self.linear.geometry.nx;
        field
            .iter()
            .enumerate()
            .map(|(k, &v)| self.reaction.f(self.xs[k % nx], v))
            .collect()
    }

    /// One IMEX step of size `dt`, splitting into half steps (up to depth 4)
    /// if roundoff drives entries meaningfully negative.
    fn step_sized(&mut self, state: &State, dt: f64, depth: usize) -> Result<State> {
        let nroad = self.linear.dim_road();
        let n = self.linear.dim();
        let mut rhs = vec![0.0; n];
        rhs[..nroad].copy_from_slice(&state.road);
        rhs[nroad..].copy_from_slice(&state.field);
        let f = self.reaction_term(&state.field);
        for (k, fv) in f.iter().enumerate() {
            rhs[nroad + k] += dt * fv;
        }
        // Scale for the shifted factorization: x = (1/dt) * (A + I/dt)^{-1} b.
        let lu = self.factor_for(dt)?;
        let mut z = lu.solve(&rhs)?;
        for v in &mut z {
            *v /= dt;
        }

        let floor = -1e-12 * self.ceiling.max(1.0);
        let min = z.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < floor {
            if depth >= 4 {
                return Err(Error::StepRejected { retries: depth });
            }
            let half = self.step_sized(state, dt / 2.0, depth + 1)?;
            return self.step_sized(&half, dt / 2.0, depth + 1);
        }
        for v in &mut z {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(State {
            t: state.t + dt,
            road: z[..nroad].to_vec(),
            field: z[nroad..].to_vec(),
        })
    }

    /// One full step of the configured size.
    pub fn step(&mut self, state: &State) -> Result<State> {
        if !state.dims_match(&self.linear.geometry) {
            return Err(Error::DimensionMismatch {
                expected: self.linear.dim(),
                got: state.road.len() + state.field.len(),
            });
        }
        self.step_sized(state, self.base_dt, 0)
    }

    /// Residual of the discrete subsolution inequality `F(z) - A z >= 0`
    /// (its minimum over all rows). Non-negative (up to roundoff) means the
    /// step map can only push `z` upward; for supersolutions pass the state
    /// to [`Stepper::supersolution_residual`] instead.
    pub fn subsolution_residual(&self, state: &State) -> Result<f64> {
        let r = self.inequality_residual(state)?;
        Ok(r.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Minimum of `A z - F(z)` over rows; non-negative means `z` is a
    /// discrete supersolution (the flow from `z` is non-increasing).
    pub fn supersolution_residual(&self, state: &State) -> Result<f64> {
        let r = self.inequality_residual(state)?;
        Ok(r.into_iter().map(|v| -v).fold(f64::INFINITY, f64::min))
    }

    /// Rows of `F(z) - A z`.
    fn inequality_residual(&self, state: &State) -> Result<Vec<f64>> {
        if !state.dims_match(&self.linear.geometry) {
            return Err(Error::DimensionMismatch {
                expected: self.linear.dim(),
                got: state.road.len() + state.field.len(),
            });
        }
        let nroad = self.linear.dim_road();
        let mut z = vec![0.0; self.linear.dim()];
        z[..nroad].copy_from_slice(&state.road);
        z[nroad..].copy_from_slice(&state.field);
        let az = self.linear.matrix.apply(&z)?;
        let f = self.reaction_term(&state.field);
        let mut rows = vec![0.0; self.linear.dim()];
        for k in 0..self.linear.dim() {
            let fk = if k >= nroad { f[k - nroad] } else { 0.0 };
            rows[k] = fk - az[k];
        }
        Ok(rows)
    }

    /// Integrates from `initial` until steady, extinct, or `t_max`.
    pub fn evolve(&mut self, initial: State, opts: &EvolveOpts) -> Result<EvolveOutcome> {
        if opts.dt != self.base_dt {
            // Respect the Lipschitz constraint for a changed step size.
            let lip = self.reaction.lipschitz_bound(2.0 * self.ceiling);
            if opts.dt * lip > 0.5 || opts.dt <= 0.0 {
                return Err(Error::ParameterDomain(format!(
                    "dt = {} violates the explicit stability bound",
                    opts.dt
                )));
            }
            self.base_dt = opts.dt;
        }
        let scale = self.ceiling;
        let steady_abs = opts.steady_rel * scale;
        let decay_abs = opts.decay_rel * scale;
        let record_every = opts.record_every.max(1);

        let mut state = initial;
        let mut history = Vec::new();
        let mut decay_time = None;
        let mut steps = 0usize;
        let total_steps = (opts.t_max / opts.dt).ceil() as usize;

        let record = |state: &State, residual: f64, history: &mut Vec<SupSample>| {
            history.push(SupSample {
                t: state.t,
                sup_road: state.sup_road(),
                sup_field: state.sup_field(),
                min_road: state.road.iter().cloned().fold(f64::INFINITY, f64::min),
                min_field: state.field.iter().cloned().fold(f64::INFINITY, f64::min),
                residual,
            });
        };
        record(&state, f64::NAN, &mut history);

        while steps < total_steps {
            let next = self.step(&state)?;
            steps += 1;
            let mut delta = 0.0f64;
            for (a, b) in next.road.iter().zip(&state.road) {
                delta = delta.max((a - b).abs());
            }
            for (a, b) in next.field.iter().zip(&state.field) {
                delta = delta.max((a - b).abs());
            }
            let residual = delta / self.base_dt;
            state = next;

            let sup = state.sup();
            if sup < decay_abs && decay_time.is_none() {
                decay_time = Some(state.t);
            }
            if steps % record_every == 0 {
                record(&state, residual, &mut history);
            }
            if sup < decay_abs {
                if steps % record_every != 0 {
                    record(&state, residual, &mut history);
                }
                return Ok(EvolveOutcome {
                    kind: OutcomeKind::DecayedToZero,
                    final_state: state,
                    history,
                    decay_time,
                    steps,
                });
            }
            if residual < steady_abs {
                if steps % record_every != 0 {
                    record(&state, residual, &mut history);
                }
                return Ok(EvolveOutcome {
                    kind: OutcomeKind::ConvergedPositive,
                    final_state: state,
                    history,
                    decay_time,
                    steps,
                });
            }
        }
        Ok(EvolveOutcome {
            kind: OutcomeKind::Undecided,
            final_state: state,
            history,
            decay_time,
            steps,
        })
    }
}

/// Constant supersolution `(nu/mu V, V)` with
/// `V = max(M, sup v0, (mu/nu) sup u0)`. Exact at the discrete level: the
/// construction is verified against the assembled operator before returning.
pub fn build_supersolution(
    stepper: &Stepper,
    initial: &State,
) -> Result<State> {
    let p = &stepper.linear.params;
    let m = stepper.reaction.saturation;
    let v = m
        .max(initial.field.iter().cloned().fold(0.0, f64::max))
        .max(p.mu / p.nu * initial.road.iter().cloned().fold(0.0, f64::max));
    let geom = stepper.geometry().clone();
    let sup = State::constant(&geom, p.nu / p.mu * v, v);
    let resid = stepper.supersolution_residual(&sup)?;
    if resid < -1e-12 * v.max(1.0) {
        return Err(Error::ParameterDomain(format!(
            "constant supersolution violated its inequality by {resid:.3e}; \
             saturation bound M is inconsistent with the reaction"
        )));
    }
    Ok(sup)
}

/// Small positive subsolution: `eps` times the principal eigenvector of the
/// road-field box `(-r, r) x (0, r)`, zero-extended into the periodic
/// dynamics domain. Fails with [`Error::NoSubsolution`] when the box
/// eigenvalue is non-negative (no persistence certificate at this size).
///
/// Returns the subsolution state, the box eigenvalue, and the amplitude.
pub fn build_subsolution(
    stepper: &Stepper,
    r_sub: f64,
    opts: &crate::eigen::SolveOpts,
) -> Result<(State, f64, f64)> {
    let geom = stepper.geometry().clone();
    let p = stepper.linear.params;
    let reaction = stepper.reaction.clone();
    if !geom.has_road() {
        return Err(Error::GeometryMismatch(
            "subsolution embedding needs a road-bearing periodic domain".into(),
        ));
    }
    let (hx, hy) = (geom.hx, geom.hy);
    // Alignment: the box grid must be a sub-lattice of the dynamics grid and
    // the embedding offset a whole number of periods.
    let r_cols = {
        let q = r_sub / hx;
        if (q - q.round()).abs() > 1e-9 || q.round() < 1.0 {
            return Err(Error::GeometryMismatch(format!(
                "subsolution half-width {r_sub} is not a multiple of hx = {hx}"
            )));
        }
        q.round() as usize
    };
    let ell_cols = {
        let q = p.ell / hx;
        if (q - q.round()).abs() > 1e-9 || q.round() < 1.0 {
            return Err(Error::GeometryMismatch(format!(
                "period {} is not a multiple of hx = {hx}",
                p.ell
            )));
        }
        q.round() as usize
    };
    if 2.0 * r_sub > geom.width + 1e-12 {
        return Err(Error::GeometryMismatch(format!(
            "subsolution box of half-width {r_sub} does not fit in a domain of width {}",
            geom.width
        )));
    }
    let box_h = r_sub;
    let h_dom = match geom.kind {
        crate::geometry::GeometryKind::PeriodicHalfStrip { h } => h,
        _ => {
            return Err(Error::GeometryMismatch(
                "subsolution embedding expects a periodic half-strip".into(),
            ))
        }
    };
    if box_h > h_dom + 1e-12 {
        return Err(Error::GeometryMismatch(format!(
            "subsolution box height {box_h} exceeds the domain height {h_dom}"
        )));
    }

    let box_geom = Geometry::truncated_road_field(r_sub, box_h, hx, hy)?;
    let box_op = assemble(&box_geom, &p, Some(&reaction))?;
    let eig = crate::eigen::principal_eigenpair(&box_op, opts)?;
    if eig.lambda >= 0.0 {
        return Err(Error::NoSubsolution(format!(
            "box eigenvalue {:.6e} at half-width {r_sub} is non-negative; \
             no persistence certificate at this truncation",
            eig.lambda
        )));
    }

    // Embedding offset: the largest whole number of periods at most half the
    // domain, so the box sits near the middle and wraps cleanly.
    let offset_cols = (geom.nx / 2 / ell_cols) * ell_cols;

    // Curvature bound K with f(x, v) >= a(x) v - K v^2 on (0, ceiling].
    let mut curv: f64 = 0.0;
    for i in 0..geom.nx {
        let x = geom.x(i);
        let a = reaction.linearization(x);
        for lvl in 1..=64 {
            let v = stepper.ceiling * lvl as f64 / 64.0;
            curv = curv.max((a * v - reaction.f(x, v)) / (v * v));
        }
    }
    let mut eps = if curv > 0.0 {
        (-eig.lambda / (2.0 * curv)).min(reaction.saturation / 2.0)
    } else {
        reaction.saturation / 2.0
    };

    let embed = |eps: f64| -> State {
        let mut s = State::zeros(&geom);
        for bi in 0..box_geom.nx {
            // Box column bi sits at x = -r + (bi + 1) hx; map through the
            // offset and wrap periodically.
            let gi = (offset_cols + bi + 1 + geom.nx - r_cols) % geom.nx;
            s.road[gi] = eps * eig.vec_road[bi];
            for bj in 0..box_geom.ny {
                s.field[bj * geom.nx + gi] = eps * eig.vec_field[bj * box_geom.nx + bi];
            }
        }
        s
    };

    // Verify the discrete subsolution inequality, shrinking eps on roundoff.
    for _ in 0..60 {
        let cand = embed(eps);
        let resid = stepper.subsolution_residual(&cand)?;
        if resid >= -1e-12 * (1.0 + eps) {
            return Ok((cand, eig.lambda, eps));
        }
        eps *= 0.5;
    }
    Err(Error::NoSubsolution(
        "could not verify the subsolution inequality at any amplitude".into(),
    ))
}

/// Outcome of a trajectory monitored against fixed lower and upper bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Largest violation of `sub <= z` seen at any recorded step (0 = never).
    pub max_sub_violation: f64,
    /// Largest violation of `z <= sup` seen at any recorded step (0 = never).
    pub max_sup_violation: f64,
    /// Both violations stayed within `1e-10 * ceiling`.
    pub ordered: bool,
    pub outcome: EvolveOutcome,
}

/// Evolves `initial` while checking the sandwich `sub <= z <= sup` after
/// every step.
pub fn evolve_with_bounds(
    stepper: &mut Stepper,
    initial: State,
    sub: &State,
    sup: &State,
    opts: &EvolveOpts,
) -> Result<ComparisonReport> {
    let scale = stepper.ceiling();
    let steady_abs = opts.steady_rel * scale;
    let decay_abs = opts.decay_rel * scale;
    let record_every = opts.record_every.max(1);
    let total_steps = (opts.t_max / opts.dt).ceil() as usize;

    let mut state = initial;
    let mut history = Vec::new();
    let mut decay_time = None;
    let mut steps = 0usize;
    let mut max_sub_violation = 0.0f64;
    let mut max_sup_violation = 0.0f64;

    let check = |state: &State, lo: &mut f64, hi: &mut f64| {
        for (z, s) in state.road.iter().zip(&sub.road) {
            *lo = lo.max(s - z);
        }
        for (z, s) in state.field.iter().zip(&sub.field) {
            *lo = lo.max(s - z);
        }
        for (z, s) in state.road.iter().zip(&sup.road) {
            *hi = hi.max(z - s);
        }
        for (z, s) in state.field.iter().zip(&sup.field) {
            *hi = hi.max(z - s);
        }
    };
    check(&state, &mut max_sub_violation, &mut max_sup_violation);
    history.push(SupSample {
        t: state.t,
        sup_road: state.sup_road(),
        sup_field: state.sup_field(),
        min_road: state.road.iter().cloned().fold(f64::INFINITY, f64::min),
        min_field: state.field.iter().cloned().fold(f64::INFINITY, f64::min),
        residual: f64::NAN,
    });

    let mut kind = OutcomeKind::Undecided;
    while steps < total_steps {
        let next = stepper.step(&state)?;
        steps += 1;
        let mut delta = 0.0f64;
        for (a, b) in next.road.iter().zip(&state.road) {
            delta = delta.max((a - b).abs());
        }
        for (a, b) in next.field.iter().zip(&state.field) {
            delta = delta.max((a - b).abs());
        }
        let residual = delta / opts.dt;
        state = next;
        check(&state, &mut max_sub_violation, &mut max_sup_violation);

        let sup_now = state.sup();
        if sup_now < decay_abs && decay_time.is_none() {
            decay_time = Some(state.t);
        }
        let should_record = steps % record_every == 0;
        let decayed = sup_now < decay_abs;
        let steady = residual < steady_abs;
        if should_record || decayed || steady {
            history.push(SupSample {
                t: state.t,
                sup_road: state.sup_road(),
                sup_field: state.sup_field(),
                min_road: state.road.iter().cloned().fold(f64::INFINITY, f64::min),
                min_field: state.field.iter().cloned().fold(f64::INFINITY, f64::min),
                residual,
            });
        }
        if decayed {
            kind = OutcomeKind::DecayedToZero;
            break;
        }
        if steady {
            kind = OutcomeKind::ConvergedPositive;
            break;
        }
    }
    let ordered = max_sub_violation <= 1e-10 * scale && max_sup_violation <= 1e-10 * scale;
    Ok(ComparisonReport {
        max_sub_violation,
        max_sup_violation,
        ordered,
        outcome: EvolveOutcome { kind, final_state: state, history, decay_time, steps },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::SolveOpts;

    fn setup(a0: f64) -> (Geometry, ModelParams, ReactionSpec) {
        let params = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let reaction = ReactionSpec::logistic(a0, 0.0, 1.0, a0.abs().max(0.5), 1.0).unwrap();
        let geom = Geometry::periodic_half_strip(4.0, 1.0, 1, 0.25, 0.25).unwrap();
        (geom, params, reaction)
    }

    #[test]
    fn stepper_rejects_unstable_dt() {
        let (geom, params, reaction) = setup(1.0);
        // Lip(f) on [0, 2] is about 1 + 2*2 = 5, so dt = 0.2 gives dt*Lip = 1.
        let err = Stepper::new(&geom, &params, &reaction, 0.2, 1.0).unwrap_err();
        assert!(matches!(err, Error::ParameterDomain(_)));
    }

    #[test]
    fn hostile_environment_drives_extinction() {
        let (geom, params, reaction) = setup(-1.0);
        let mut stepper = Stepper::new(&geom, &params, &reaction, 0.01, 1.0).unwrap();
        let initial = State::constant(&geom, 0.5, 0.5);
        let out = stepper
            .evolve(initial, &EvolveOpts { t_max: 100.0, ..EvolveOpts::default() })
            .unwrap();
        assert_eq!(out.kind, OutcomeKind::DecayedToZero);
        let tdec = out.decay_time.unwrap();
        // The coupled decay rate here is about 0.43 (the road slows the
        // field down), so the 1e-6 threshold is reached near t = 31.
        assert!(tdec < 60.0, "decay took {tdec}");
        assert!(out.final_state.sup() < 1e-6);
    }

    #[test]
    fn favorable_environment_reaches_positive_steady_state() {
        let (geom, params, reaction) = setup(1.0);
        let mut stepper = Stepper::new(&geom, &params, &reaction, 0.01, 1.0).unwrap();
        let initial = State::constant(&geom, 0.1, 0.1);
        let out = stepper
            .evolve(initial, &EvolveOpts { t_max: 300.0, ..EvolveOpts::default() })
            .unwrap();
        assert_eq!(out.kind, OutcomeKind::ConvergedPositive);
        // Away from the absorbing lid the state approaches (nu/mu, 1) = (1, 1).
        let nx = geom.nx;
        let mid_row = geom.ny / 4; // y = 1/4 of the height: deep in the bulk
        let v_mid = out.final_state.field[mid_row * nx];
        assert!((v_mid - 1.0).abs() < 0.1, "bulk field level {v_mid}");
        let u_mid = out.final_state.road[0];
        assert!((u_mid - 1.0).abs() < 0.1, "road level {u_mid}");
    }

    #[test]
    fn step_map_is_monotone() {
        let (geom, params, reaction) = setup(0.8);
        let mut stepper = Stepper::new(&geom, &params, &reaction, 0.02, 2.0).unwrap();
        // Two ordered states; order must survive stepping (drift included).
        let mut lo = State::zeros(&geom);
        let mut hi = State::zeros(&geom);
        let mut seed = 7u64;
        let mut rnd = move || {
            seed ^= seed >> 12;
            seed ^= seed << 25;
            seed ^= seed >> 27;
            (seed.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        for v in lo.road.iter_mut().chain(lo.field.iter_mut()) {
            *v = 0.3 * rnd();
        }
        for (h, l) in hi.road.iter_mut().zip(&lo.road) {
            *h = l + 0.3 * rnd();
        }
        let lo_field: Vec<f64> = lo.field.clone();
        for (k, h) in hi.field.iter_mut().enumerate() {
            *h = lo_field[k] + 0.3 * rnd();
        }
        for _ in 0..25 {
            let lo2 = stepper.step(&lo).unwrap();
            let hi2 = stepper.step(&hi).unwrap();
            for (a, b) in lo2.road.iter().zip(&hi2.road) {
                assert!(a <= &(b + 1e-12), "road order broken: {a} > {b}");
            }
            for (a, b) in lo2.field.iter().zip(&hi2.field) {
                assert!(a <= &(b + 1e-12), "field order broken: {a} > {b}");
            }
            lo = lo2;
            hi = hi2;
        }
    }

    #[test]
    fn supersolution_is_verified_and_decreasing() {
        let (geom, params, reaction) = setup(1.0);
        let mut stepper = Stepper::new(&geom, &params, &reaction, 0.01, 2.0).unwrap();
        let initial = State::constant(&geom, 0.4, 1.5);
        let sup = build_supersolution(&stepper, &initial).unwrap();
        assert!(sup.field[0] >= 1.5);
        // One step from the supersolution must not increase anywhere.
        let next = stepper.step(&sup).unwrap();
        for (a, b) in next.road.iter().zip(&sup.road) {
            assert!(a <= &(b + 1e-12));
        }
        for (a, b) in next.field.iter().zip(&sup.field) {
            assert!(a <= &(b + 1e-12));
        }
    }

    #[test]
    fn subsolution_is_verified_and_increasing() {
        let params = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let reaction = ReactionSpec::logistic(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let geom = Geometry::periodic_half_strip(8.0, 1.0, 8, 0.25, 0.25).unwrap();
        let mut stepper = Stepper::new(&geom, &params, &reaction, 0.01, 1.0).unwrap();
        let (sub, lambda_r, eps) =
            build_subsolution(&stepper, 4.0, &SolveOpts::default()).unwrap();
        assert!(lambda_r < 0.0, "box eigenvalue {lambda_r}");
        assert!(eps > 0.0);
        assert!(sub.sup() > 0.0);
        let next = stepper.step(&sub).unwrap();
        for (a, b) in next.road.iter().zip(&sub.road) {
            assert!(a >= &(b - 1e-12), "road decreased: {a} < {b}");
        }
        for (a, b) in next.field.iter().zip(&sub.field) {
            assert!(a >= &(b - 1e-12), "field decreased: {a} < {b}");
        }
    }

    #[test]
    fn hostile_box_yields_no_subsolution() {
        let params = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let reaction = ReactionSpec::logistic(-0.5, 0.0, 1.0, 0.5, 1.0).unwrap();
        let geom = Geometry::periodic_half_strip(8.0, 1.0, 8, 0.25, 0.25).unwrap();
        let stepper = Stepper::new(&geom, &params, &reaction, 0.01, 1.0).unwrap();
        let err = build_subsolution(&stepper, 4.0, &SolveOpts::default()).unwrap_err();
        assert!(matches!(err, Error::NoSubsolution(_)));
    }

    #[test]
    fn sandwiched_trajectory_stays_ordered() {
        let params = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let reaction = ReactionSpec::logistic(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let geom = Geometry::periodic_half_strip(8.0, 1.0, 8, 0.25, 0.25).unwrap();
        let mut stepper = Stepper::new(&geom, &params, &reaction, 0.01, 1.5).unwrap();
        let (sub, _, _) = build_subsolution(&stepper, 4.0, &SolveOpts::default()).unwrap();
        // Initial datum: the subsolution plus a bit, capped by the ceiling.
        let mut initial = sub.clone();
        for v in initial.road.iter_mut().chain(initial.field.iter_mut()) {
            *v = (*v + 0.2).min(1.2);
        }
        let sup = build_supersolution(&stepper, &initial).unwrap();
        let report = evolve_with_bounds(
            &mut stepper,
            initial,
            &sub,
            &sup,
            &EvolveOpts { t_max: 30.0, ..EvolveOpts::default() },
        )
        .unwrap();
        assert!(report.ordered, "sub violation {:.3e}, sup violation {:.3e}",
            report.max_sub_violation, report.max_sup_violation);
    }
}
