//! Higher-level studies built from the eigensolver and the dynamics:
//! persistence/extinction classification, the effect of the road on the
//! principal eigenvalue, amplitude transitions, and ordering audits between
//! the different domain families.

use crate::dynamics::{EvolveOpts, OutcomeKind, State, Stepper};
use crate::eigen::{
    aitken_limit, periodic_cell_eigen, principal_eigenpair, truncation_sweep, GridSpec, SolveOpts,
    SweepFamily, SweepPoint,
};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::model::{ModelParams, ReactionSpec};
use crate::operator::assemble;
use serde::{Deserialize, Serialize};

/// Sign of an eigenvalue estimate, with a dead band of width `delta` around
/// zero where no claim is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    Negative,
    Positive,
    Indeterminate,
}

impl SignClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SignClass::Negative => "negative",
            SignClass::Positive => "positive",
            SignClass::Indeterminate => "indeterminate",
        }
    }

    pub fn from_lambda(lambda: f64, delta: f64) -> Self {
        if lambda < -delta {
            SignClass::Negative
        } else if lambda > delta {
            SignClass::Positive
        } else {
            SignClass::Indeterminate
        }
    }
}

/// What the eigenvalue sign predicts for the long-time dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Persistence,
    Extinction,
    Indeterminate,
}

impl Prediction {
    fn from_sign(sign: SignClass) -> Self {
        match sign {
            SignClass::Negative => Prediction::Persistence,
            SignClass::Positive => Prediction::Extinction,
            SignClass::Indeterminate => Prediction::Indeterminate,
        }
    }
}

/// Optional dynamics probe attached to a classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsProbe {
    /// Height of the periodic half-strip the dynamics runs on.
    pub height: f64,
    /// Number of periods in the x-direction.
    pub periods: usize,
    pub evolve: EvolveOpts,
}

/// Controls for [`classify`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Half-widths of the truncated eigenvalue sweep.
    pub sizes: Vec<f64>,
    pub grid: GridSpec,
    pub solve: SolveOpts,
    /// Dead band for sign calls.
    pub delta_sign: f64,
    /// When set, also integrate the nonlinear dynamics from a compact bump
    /// and compare the outcome with the prediction.
    pub dynamics: Option<DynamicsProbe>,
}

/// Outcome of the eigenvalue-sign classification, optionally confronted
/// with a long-time simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub lambda_estimate: f64,
    pub lambda_points: Vec<SweepPoint>,
    pub monotone: bool,
    pub sign: SignClass,
    pub predicted: Prediction,
    pub dynamics_kind: Option<OutcomeKind>,
    /// `Some(true)` when prediction and dynamics agree, `Some(false)` when
    /// they conflict, `None` when either side is inconclusive or the
    /// dynamics was not run.
    pub agreement: Option<bool>,
}

/// Compactly supported initial bump: one period wide, `min(4 ell, H)` tall,
/// amplitude half the saturation bound, nothing on the road.
pub fn bump_datum(geom: &Geometry, reaction: &ReactionSpec) -> State {
    let ell = reaction.ell;
    let m = reaction.saturation;
    let h = match geom.kind {
        crate::geometry::GeometryKind::PeriodicHalfStrip { h }
        | crate::geometry::GeometryKind::RoadlessHalfStrip { h } => h,
        _ => geom.ny as f64 * geom.hy,
    };
    let y_extent = (4.0 * ell).min(h);
    let mut s = State::zeros(geom);
    for j in 0..geom.ny {
        let y = geom.y(j);
        if y <= 0.0 || y >= y_extent {
            continue;
        }
        let wy = (std::f64::consts::PI * y / y_extent).sin();
        for i in 0..geom.nx {
            let x = geom.x(i);
            if x <= 0.0 || x >= ell {
                continue;
            }
            let wx = (std::f64::consts::PI * x / ell).sin();
            s.field[j * geom.nx + i] = 0.5 * m * wx * wy;
        }
    }
    s
}

/// Classifies the medium by the sign of the coupled principal eigenvalue
/// (extrapolated over growing truncations), optionally cross-checking with
/// the nonlinear dynamics.
pub fn classify(
    params: &ModelParams,
    reaction: &ReactionSpec,
    cfg: &ClassifyConfig,
) -> Result<DichotomyVerdict> {
    let sweep = truncation_sweep(
        SweepFamily::Coupled,
        params,
        Some(reaction),
        &cfg.sizes,
        cfg.grid,
        &cfg.solve,
    )?;
    let sign = SignClass::from_lambda(sweep.limit_estimate, cfg.delta_sign);
    let predicted = Prediction::from_sign(sign);

    let mut dynamics_kind = None;
    if let Some(probe) = &cfg.dynamics {
        let geom = Geometry::periodic_half_strip(
            probe.height,
            params.ell,
            probe.periods,
            cfg.grid.hx,
            cfg.grid.hy,
        )?;
        let ceiling = reaction.saturation;
        let mut stepper = Stepper::new(&geom, params, reaction, probe.evolve.dt, ceiling)?;
        let initial = bump_datum(&geom, reaction);
        let outcome = stepper.evolve(initial, &probe.evolve)?;
        dynamics_kind = Some(outcome.kind);
    }

    let agreement = match (predicted, dynamics_kind) {
        (_, None) | (Prediction::Indeterminate, _) | (_, Some(OutcomeKind::Undecided)) => None,
        (Prediction::Persistence, Some(OutcomeKind::ConvergedPositive)) => Some(true),
        (Prediction::Extinction, Some(OutcomeKind::DecayedToZero)) => Some(true),
        _ => Some(false),
    };

    Ok(DichotomyVerdict {
        lambda_estimate: sweep.limit_estimate,
        lambda_points: sweep.points,
        monotone: sweep.monotone,
        sign,
        predicted,
        dynamics_kind,
        agreement,
    })
}

/// Comparison between the roadless periodic eigenvalue and the coupled
/// road-field limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoadEffectReport {
    /// Periodic principal eigenvalue of the 1D cell (the roadless medium).
    pub lambda_cell: f64,
    /// Extrapolated coupled limit over growing truncations.
    pub lambda_coupled: f64,
    pub coupled_points: Vec<SweepPoint>,
    /// Signs of the two eigenvalues agree; `None` when either sits in the
    /// dead band.
    pub signs_agree: Option<bool>,
    /// The road never hurts: `lambda_coupled <= lambda_cell + tol`.
    pub ordering_ok: bool,
    pub ordering_tol: f64,
    /// `lambda_coupled <= mu + 1e-6` (road-concentrated test function bound).
    pub mu_bound_ok: bool,
    pub delta_sign: f64,
}

/// Quantifies how the road moves the principal eigenvalue relative to the
/// roadless periodic medium.
pub fn road_effect(
    params: &ModelParams,
    reaction: &ReactionSpec,
    sizes: &[f64],
    grid: GridSpec,
    solve: &SolveOpts,
    delta_sign: f64,
) -> Result<RoadEffectReport> {
    let cell = periodic_cell_eigen(params, Some(reaction), grid, solve)?;
    let sweep =
        truncation_sweep(SweepFamily::Coupled, params, Some(reaction), sizes, grid, solve)?;
    let lambda_cell = cell.lambda;
    let lambda_coupled = sweep.limit_estimate;

    // The extrapolation is only good to roughly the size of the increments
    // it removed; near-equality cases need that slack.
    let last_inc = match sweep.points.len() {
        0 | 1 => 0.0,
        n => (sweep.points[n - 1].lambda - sweep.points[n - 2].lambda).abs(),
    };
    let ordering_tol = (2.0 * last_inc).max(1e-6);
    let ordering_ok = lambda_coupled <= lambda_cell + ordering_tol;
    let mu_bound_ok = lambda_coupled <= params.mu + 1e-6;

    let s_cell = SignClass::from_lambda(lambda_cell, delta_sign);
    let s_coupled = SignClass::from_lambda(lambda_coupled, delta_sign);
    let signs_agree = match (s_cell, s_coupled) {
        (SignClass::Indeterminate, _) | (_, SignClass::Indeterminate) => None,
        (a, b) => Some(a == b),
    };

    Ok(RoadEffectReport {
        lambda_cell,
        lambda_coupled,
        coupled_points: sweep.points,
        signs_agree,
        ordering_ok,
        ordering_tol,
        mu_bound_ok,
        delta_sign,
    })
}

/// Eigenvalue signs along an amplitude ladder `alpha -> alpha * f`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub signs: Vec<SignClass>,
    /// Period average of `a(x)` at unit amplitude.
    pub mean_a: f64,
    /// Maximum of `a(x)` at unit amplitude.
    pub max_a: f64,
    /// A sign change can only occur when `max a > 0`.
    pub expected_transition: bool,
    /// Decisive signs are positive up to a point and negative afterwards,
    /// with at most one change.
    pub single_transition: bool,
    /// Consecutive decisive amplitudes between which the sign flipped.
    pub transition_bracket: Option<(f64, f64)>,
}

/// Sweeps the reaction amplitude and reports where the persistence
/// transition happens. Requires a mean-negative `a(x)` at unit amplitude
/// (otherwise every amplitude persists and there is nothing to scan).
pub fn amplitude_sweep(
    params: &ModelParams,
    reaction: &ReactionSpec,
    alphas: &[f64],
    sizes: &[f64],
    grid: GridSpec,
    solve: &SolveOpts,
    delta_sign: f64,
) -> Result<AmplitudeReport> {
    if alphas.is_empty() {
        return Err(Error::ParameterDomain("amplitude sweep needs at least one alpha".into()));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ParameterDomain("amplitudes must be strictly increasing".into()));
    }
    let unit = reaction.with_alpha(1.0)?;
    const SAMPLES: usize = 1024;
    let mut mean_a = 0.0;
    let mut max_a = f64::NEG_INFINITY;
    for i in 0..SAMPLES {
        let a = unit.linearization(params.ell * i as f64 / SAMPLES as f64);
        mean_a += a;
        max_a = max_a.max(a);
    }
    mean_a /= SAMPLES as f64;
    if mean_a >= 0.0 {
        return Err(Error::ParameterDomain(format!(
            "amplitude sweep requires a mean-negative growth rate; period average is {mean_a:.6e}"
        )));
    }
    let expected_transition = max_a > 0.0;

    let mut lambdas = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let scaled = reaction.with_alpha(alpha)?;
        let sweep =
            truncation_sweep(SweepFamily::Coupled, params, Some(&scaled), sizes, grid, solve)?;
        lambdas.push(sweep.limit_estimate);
    }
    let signs: Vec<SignClass> =
        lambdas.iter().map(|&l| SignClass::from_lambda(l, delta_sign)).collect();

    // Walk the decisive signs: a valid ladder is positive (extinction at
    // small amplitude), then negative for good, with one flip at most.
    let decisive: Vec<(f64, SignClass)> = alphas
        .iter()
        .zip(&signs)
        .filter(|(_, s)| **s != SignClass::Indeterminate)
        .map(|(a, s)| (*a, *s))
        .collect();
    let mut flips = 0usize;
    let mut transition_bracket = None;
    let mut ordered = true;
    for w in decisive.windows(2) {
        if w[0].1 != w[1].1 {
            flips += 1;
            if w[0].1 == SignClass::Positive && w[1].1 == SignClass::Negative {
                transition_bracket = Some((w[0].0, w[1].0));
            } else {
                ordered = false;
            }
        }
    }
    let single_transition = flips <= 1 && ordered;

    Ok(AmplitudeReport {
        alphas: alphas.to_vec(),
        lambdas,
        signs,
        mean_a,
        max_a,
        expected_transition,
        single_transition,
        transition_bracket,
    })
}

/// One named inequality or agreement check inside an [`OrderingAudit`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditItem {
    pub name: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub detail: String,
}

/// Ordering relations between the domain families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingAudit {
    pub items: Vec<AuditItem>,
    pub all_passed: bool,
}

/// Audits the eigenvalue orderings that the different geometries must obey:
///
/// 1. the absorbing rectangle of half-width `r` dominates the coupled box of
///    half-width `3r` (domain inclusion via zero extension, exact on nested
///    grids);
/// 2. the periodic cell lies below the periodic strip of half-width `r`
///    (tensor separability), which lies below the absorbing rectangle of the
///    same size (again zero extension);
/// 3. the strip and reflecting-rectangle sweeps both extrapolate to the cell
///    eigenvalue.
///
/// `r` must be a whole multiple of the period.
pub fn ordering_audit(
    params: &ModelParams,
    reaction: &ReactionSpec,
    r: f64,
    grid: GridSpec,
    solve: &SolveOpts,
) -> Result<OrderingAudit> {
    let periods = r / params.ell;
    if (periods - periods.round()).abs() > 1e-9 || periods.round() < 1.0 {
        return Err(Error::GeometryMismatch(format!(
            "audit half-width {r} must be a whole multiple of the period {}",
            params.ell
        )));
    }
    let k2r = (2.0 * periods.round()) as usize;

    let mut items = Vec::new();

    // Item 1: coupled(3r) <= rect(r) + tol, from zero extension.
    let rect = {
        let g = Geometry::dirichlet_rect(r, r, grid.hx, grid.hy)?;
        principal_eigenpair(&assemble(&g, params, Some(reaction))?, solve)?
    };
    let coupled3 = {
        let g = Geometry::truncated_road_field(3.0 * r, 3.0 * r, grid.hx, grid.hy)?;
        principal_eigenpair(&assemble(&g, params, Some(reaction))?, solve)?
    };
    items.push(AuditItem {
        name: "rectangle-dominates-coupled".into(),
        passed: coupled3.lambda <= rect.lambda + 1e-6,
        lhs: coupled3.lambda,
        rhs: rect.lambda,
        tol: 1e-6,
        detail: format!(
            "coupled box at 3r = {} vs absorbing rectangle at r = {r}",
            3.0 * r
        ),
    });

    // Item 2: cell <= strip(r) <= rect(r), both exact on nested grids.
    let cell = periodic_cell_eigen(params, Some(reaction), grid, solve)?;
    let strip = {
        let g = Geometry::periodic_strip(r, params.ell, k2r, grid.hx, grid.hy)?;
        principal_eigenpair(&assemble(&g, params, Some(reaction))?, solve)?
    };
    items.push(AuditItem {
        name: "cell-below-strip".into(),
        passed: cell.lambda <= strip.lambda + 1e-8,
        lhs: cell.lambda,
        rhs: strip.lambda,
        tol: 1e-8,
        detail: "tensor separability of the strip".into(),
    });
    items.push(AuditItem {
        name: "strip-below-rectangle".into(),
        passed: strip.lambda <= rect.lambda + 1e-8,
        lhs: strip.lambda,
        rhs: rect.lambda,
        tol: 1e-8,
        detail: "zero extension of the rectangle eigenvector into the strip".into(),
    });

    // Item 3: strip and reflecting-rectangle sweeps both limit to the cell.
    let strip_sizes = [r / 2.0, r, 2.0 * r];
    let mut strip_lams = Vec::new();
    for &rr in &strip_sizes {
        let g = Geometry::periodic_strip(rr, params.ell, 1, grid.hx, grid.hy)?;
        strip_lams.push(principal_eigenpair(&assemble(&g, params, Some(reaction))?, solve)?.lambda);
    }
    let strip_limit = aitken_limit(&strip_lams);
    let strip_inc = (strip_lams[2] - strip_lams[1]).abs();
    let strip_tol = (2.0 * strip_inc).max(1e-3);
    items.push(AuditItem {
        name: "strip-limit-is-cell".into(),
        passed: (strip_limit - cell.lambda).abs() <= strip_tol,
        lhs: strip_limit,
        rhs: cell.lambda,
        tol: strip_tol,
        detail: format!("strip sweep over half-widths {strip_sizes:?}"),
    });

    let neum = truncation_sweep(
        SweepFamily::NeumannRect,
        params,
        Some(reaction),
        &strip_sizes,
        grid,
        solve,
    )?;
    let neum_inc = {
        let n = neum.points.len();
        (neum.points[n - 1].lambda - neum.points[n - 2].lambda).abs()
    };
    let neum_tol = (2.0 * neum_inc).max(1e-3);
    items.push(AuditItem {
        name: "reflecting-limit-is-cell".into(),
        passed: (neum.limit_estimate - cell.lambda).abs() <= neum_tol,
        lhs: neum.limit_estimate,
        rhs: cell.lambda,
        tol: neum_tol,
        detail: "reflecting rectangles forget their walls in the limit".into(),
    });

    let all_passed = items.iter().all(|i| i.passed);
    Ok(OrderingAudit { items, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_params() -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap()
    }

    fn quick_cfg(dynamics: bool) -> ClassifyConfig {
        ClassifyConfig {
            sizes: vec![2.0, 4.0, 8.0],
            grid: GridSpec { hx: 0.25, hy: 0.25 },
            solve: SolveOpts::default(),
            delta_sign: 1e-3,
            dynamics: dynamics.then(|| DynamicsProbe {
                height: 4.0,
                periods: 4,
                evolve: EvolveOpts { t_max: 200.0, ..EvolveOpts::default() },
            }),
        }
    }

    #[test]
    fn favorable_medium_classifies_as_persistence_and_dynamics_agrees() {
        let p = unit_params();
        let r = ReactionSpec::logistic(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let v = classify(&p, &r, &quick_cfg(true)).unwrap();
        assert_eq!(v.sign, SignClass::Negative);
        assert_eq!(v.predicted, Prediction::Persistence);
        assert_eq!(v.dynamics_kind, Some(OutcomeKind::ConvergedPositive));
        assert_eq!(v.agreement, Some(true));
        assert!(v.monotone);
    }

    #[test]
    fn hostile_medium_classifies_as_extinction_and_dynamics_agrees() {
        let p = unit_params();
        let r = ReactionSpec::logistic(-1.0, 0.0, 1.0, 0.5, 1.0).unwrap();
        let v = classify(&p, &r, &quick_cfg(true)).unwrap();
        assert_eq!(v.sign, SignClass::Positive);
        assert_eq!(v.predicted, Prediction::Extinction);
        assert_eq!(v.dynamics_kind, Some(OutcomeKind::DecayedToZero));
        assert_eq!(v.agreement, Some(true));
    }

    #[test]
    fn classification_without_dynamics_reports_no_agreement() {
        let p = unit_params();
        let r = ReactionSpec::logistic(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let v = classify(&p, &r, &quick_cfg(false)).unwrap();
        assert_eq!(v.dynamics_kind, None);
        assert_eq!(v.agreement, None);
    }

    #[test]
    fn road_effect_orders_hostile_homogeneous_medium() {
        let p = unit_params();
        let r = ReactionSpec::logistic(-1.0, 0.0, 1.0, 0.5, 1.0).unwrap();
        let rep = road_effect(
            &p,
            &r,
            &[2.0, 4.0, 8.0],
            GridSpec { hx: 0.25, hy: 0.25 },
            &SolveOpts::default(),
            1e-3,
        )
        .unwrap();
        // Cell value is exactly +1; the coupled value is the dispersion
        // level, around 0.43: both positive, ordered, below mu.
        assert!((rep.lambda_cell - 1.0).abs() < 1e-9, "cell {}", rep.lambda_cell);
        assert!(rep.lambda_coupled > 0.0 && rep.lambda_coupled < rep.lambda_cell);
        assert_eq!(rep.signs_agree, Some(true));
        assert!(rep.ordering_ok);
        assert!(rep.mu_bound_ok);
    }

    #[test]
    fn amplitude_sweep_requires_mean_negative_growth() {
        let p = unit_params();
        let r = ReactionSpec::logistic(0.5, 0.5, 1.0, 1.0, 1.0).unwrap();
        let err = amplitude_sweep(
            &p,
            &r,
            &[0.1, 1.0],
            &[2.0, 4.0],
            GridSpec { hx: 0.25, hy: 0.25 },
            &SolveOpts::default(),
            1e-3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ParameterDomain(_)));
    }

    #[test]
    fn amplitude_sweep_finds_the_transition_ends() {
        let p = unit_params();
        // a(x) = -0.5 + cos(2 pi x): mean -0.5, max +0.5.
        let r = ReactionSpec::logistic(-0.5, 1.0, 1.0, 0.5, 1.0).unwrap();
        let rep = amplitude_sweep(
            &p,
            &r,
            &[0.1, 100.0],
            &[2.0, 4.0],
            GridSpec { hx: 0.125, hy: 0.125 },
            &SolveOpts::default(),
            1e-3,
        )
        .unwrap();
        assert!(rep.mean_a < 0.0 && rep.max_a > 0.0);
        assert!(rep.expected_transition);
        assert_eq!(rep.signs[0], SignClass::Positive, "lambda = {}", rep.lambdas[0]);
        assert_eq!(rep.signs[1], SignClass::Negative, "lambda = {}", rep.lambdas[1]);
        assert!(rep.single_transition);
        assert_eq!(rep.transition_bracket, Some((0.1, 100.0)));
    }

    #[test]
    fn ordering_audit_passes_on_a_periodic_medium() {
        let p = unit_params();
        let r = ReactionSpec::logistic(0.3, 1.0, 1.0, 1.3, 1.0).unwrap();
        let audit = ordering_audit(
            &p,
            &r,
            4.0,
            GridSpec { hx: 0.25, hy: 0.25 },
            &SolveOpts::default(),
        )
        .unwrap();
        for item in &audit.items {
            assert!(
                item.passed,
                "{}: lhs {} rhs {} tol {}",
                item.name, item.lhs, item.rhs, item.tol
            );
        }
        assert!(audit.all_passed);
    }

    #[test]
    fn bump_datum_is_one_period_wide_and_capped() {
        let geom = Geometry::periodic_half_strip(8.0, 1.0, 4, 0.125, 0.125).unwrap();
        let r = ReactionSpec::logistic(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let s = bump_datum(&geom, &r);
        assert!(s.road.iter().all(|&u| u == 0.0));
        let sup = s.sup_field();
        assert!(sup <= 0.5 && sup > 0.45, "sup = {sup}");
        // Support: x in (0, 1), y in (0, 4).
        for j in 0..geom.ny {
            for i in 0..geom.nx {
                let v = s.field[j * geom.nx + i];
                let (x, y) = (geom.x(i), geom.y(j));
                if x >= 1.0 || y >= 4.0 || x == 0.0 || y == 0.0 {
                    assert_eq!(v, 0.0, "support leak at ({x}, {y})");
                } else {
                    assert!(v > 0.0, "hole at ({x}, {y})");
                }
            }
        }
    }
}
