//! Principal eigenpairs of the assembled operators.
//!
//! The workhorse is shifted inverse power iteration: factor `A - sigma I`
//! once with the banded LU, start from the all-ones vector, and iterate
//! solves. A first shift strictly below the spectrum (Gershgorin bound
//! minus one) makes `A - sigma I` an irreducible M-matrix, so every iterate
//! stays entrywise positive and the iteration converges to the Perron
//! eigenpair — the principal eigenvalue and its positive eigenvector.
//!
//! When the spectral gap is small (large truncated domains) the fixed-shift
//! ratio approaches 1, so after a burn-in the solver re-factors at a shift
//! just below the current eigenvalue estimate, keeping a safety margin based
//! on an Aitken extrapolation of the remaining error. A converged but
//! sign-changing vector means the shift overshot the principal eigenvalue;
//! the solver then retreats the shift and, as a last resort, falls back to
//! the original conservative shift for the remaining iterations.

use crate::banded::BandedLu;
use crate::error::{Error, Result};
use crate::geometry::{BottomBc, Geometry, XBc};
use crate::model::{ModelParams, ReactionSpec};
use crate::operator::{assemble, DiscreteOperator};
use crate::util::parallel_map;
use serde::{Deserialize, Serialize};

/// Iteration controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOpts {
    /// Residual target: converged when `||A v - lambda v||_inf <= tol * (1 + |lambda|)`
    /// with `v` sup-normalized.
    pub tol: f64,
    pub maxiter: usize,
    /// Disable shift refinement and keep the conservative first shift.
    pub fixed_shift_only: bool,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts { tol: 1e-10, maxiter: 10_000, fixed_shift_only: false }
    }
}

/// Converged principal eigenpair. The eigenvector is sup-normalized with its
/// largest-magnitude entry equal to `+1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda: f64,
    pub vec_road: Vec<f64>,
    pub vec_field: Vec<f64>,
    /// `||A v - lambda v||_inf` at exit.
    pub residual: f64,
    pub iters: usize,
    pub factorizations: usize,
}

/// Computes the principal eigenpair of `op`.
pub fn principal_eigenpair(op: &DiscreteOperator, opts: &SolveOpts) -> Result<EigenResult> {
    let a = &op.matrix;
    let n = a.n();
    let sigma0 = a.gershgorin_lower() - 1.0;

    let mut sigma = sigma0;
    let mut lu = match BandedLu::factor_shifted(a, sigma) {
        Ok(lu) => lu,
        Err(Error::SingularFactorization) => {
            sigma -= 1.0;
            BandedLu::factor_shifted(a, sigma)?
        }
        Err(e) => return Err(e),
    };
    let mut factorizations = 1usize;
    const MAX_FACTORIZATIONS: usize = 5;

    let mut w = vec![1.0f64; n];
    let mut aw = vec![0.0f64; n];
    let mut lambda_hist: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;
    let mut residual_at_refactor = f64::INFINITY;
    let mut last_refactor_iter = 0usize;
    let mut fallback = opts.fixed_shift_only;

    for iter in 1..=opts.maxiter {
        let mut y = lu.solve(&w)?;
        // Sup-normalize with the dominant entry positive.
        let mut idx = 0usize;
        let mut mag = 0.0f64;
        for (k, &v) in y.iter().enumerate() {
            if v.abs() > mag {
                mag = v.abs();
                idx = k;
            }
        }
        if mag == 0.0 || !mag.is_finite() {
            return Err(Error::IterativeFailure { residual, iters: iter });
        }
        let s = y[idx];
        for v in &mut y {
            *v /= s;
        }
        w = y;

        a.apply_into(&w, &mut aw)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..n {
            num += w[k] * aw[k];
            den += w[k] * w[k];
        }
        let lambda = num / den;
        residual = 0.0;
        for k in 0..n {
            residual = residual.max((aw[k] - lambda * w[k]).abs());
        }
        lambda_hist.push(lambda);

        if residual <= opts.tol * (1.0 + lambda.abs()) {
            let min_entry = w.iter().cloned().fold(f64::INFINITY, f64::min);
            if min_entry >= -1e-12 {
                let (road, field) = op.split(&w);
                return Ok(EigenResult {
                    lambda,
                    vec_road: road.to_vec(),
                    vec_field: field.to_vec(),
                    residual,
                    iters: iter,
                    factorizations,
                });
            }
            // Sign-changing vector: the shift overshot the principal
            // eigenvalue and the iteration locked onto a higher mode.
            if fallback || factorizations >= MAX_FACTORIZATIONS {
                return Err(Error::NonPositiveEigenvector);
            }
            sigma = 0.5 * (sigma + sigma0);
            if factorizations + 1 == MAX_FACTORIZATIONS {
                // Last budgeted factorization: play it safe.
                sigma = sigma0;
                fallback = true;
            }
            lu = BandedLu::factor_shifted(a, sigma)?;
            factorizations += 1;
            last_refactor_iter = iter;
            residual_at_refactor = f64::INFINITY;
            w.iter_mut().for_each(|v| *v = 1.0);
            lambda_hist.clear();
            continue;
        }

        if fallback || factorizations >= MAX_FACTORIZATIONS {
            continue;
        }

        let since = iter - last_refactor_iter;
        let h = lambda_hist.len();
        // Shift refinement: once the eigenvalue sequence shows steady slow
        // geometric convergence, move the shift next to the limit.
        if since >= 20 && h >= 3 {
            let d1 = lambda_hist[h - 2] - lambda_hist[h - 3];
            let d2 = lambda_hist[h - 1] - lambda_hist[h - 2];
            if d1 != 0.0 && d2 != 0.0 {
                let r = d2 / d1;
                if r > 0.5 && r < 0.9999 {
                    let err_est = (d2 * r / (1.0 - r)).abs();
                    let margin = (10.0 * err_est).max(1e-3 * (1.0 + lambda.abs()));
                    let proposal = lambda - margin;
                    if proposal > sigma + 0.25 * (lambda - sigma) {
                        sigma = proposal;
                        lu = BandedLu::factor_shifted(a, sigma)?;
                        factorizations += 1;
                        last_refactor_iter = iter;
                        residual_at_refactor = residual;
                        lambda_hist.clear();
                        continue;
                    }
                }
            }
        }
        // Stall detection: no meaningful progress long after a refactor
        // suggests the shift landed badly; retreat halfway to the safe one.
        if since >= 300 && residual > 0.1 * residual_at_refactor {
            sigma = 0.5 * (sigma + sigma0);
            if factorizations + 1 == MAX_FACTORIZATIONS {
                sigma = sigma0;
                fallback = true;
            }
            lu = BandedLu::factor_shifted(a, sigma)?;
            factorizations += 1;
            last_refactor_iter = iter;
            residual_at_refactor = f64::INFINITY;
            w.iter_mut().for_each(|v| *v = 1.0);
            lambda_hist.clear();
        }
    }
    Err(Error::IterativeFailure { residual, iters: opts.maxiter })
}

/// All eigenvalues (or real parts) through dense linear algebra, sorted
/// ascending. Intended as an independent cross-check for small operators;
/// orders above 4096 are refused.
pub fn dense_oracle(op: &DiscreteOperator) -> Result<Vec<f64>> {
    let dense = op.matrix.to_dense()?;
    let n = op.dim();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    if op.params.c == 0.0 {
        // Similarity transform with sqrt(weights) turns the weighted
        // self-adjointness into plain symmetry.
        for i in 0..n {
            for j in 0..n {
                if dense[i][j] != 0.0 {
                    m[(i, j)] = dense[i][j] * (op.weights[i] / op.weights[j]).sqrt();
                }
            }
        }
        let sym = (&m + m.transpose()) * 0.5;
        let eig = nalgebra::SymmetricEigen::new(sym);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(vals)
    } else {
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = dense[i][j];
            }
        }
        let mut vals: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(vals)
    }
}

/// Energy-form Rayleigh quotient, written as explicit sums of squares.
///
/// For drift-free operators this equals `<z, W A z> / <z, W z>` identically,
/// hence it is minimized exactly by the principal eigenvalue over all
/// nonzero vectors. The terms: road gradient, field gradients in x and y
/// (trapezoidal row weights on boundary bottom rows), the potential, and the
/// exchange penalty `hx * sum_i (mu u_i - nu v_{i,0})^2`.
pub fn rayleigh_quotient(op: &DiscreteOperator, road: &[f64], field: &[f64]) -> Result<f64> {
    let p = &op.params;
    if p.c != 0.0 {
        return Err(Error::NotSelfAdjoint { c: p.c });
    }
    let geom = &op.geometry;
    if road.len() != op.dim_road() || field.len() != op.dim_field() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: road.len() + field.len(),
        });
    }
    let (nu, mu, dd, df) = (p.nu, p.mu, p.d_road, p.d_field);
    let (hx, hy) = (geom.hx, geom.hy);
    let nx = geom.nx;

    let mut den = 0.0;
    for (k, w) in op.weights.iter().enumerate() {
        let z = if k < road.len() { road[k] } else { field[k - road.len()] };
        den += w * z * z;
    }
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }

    if geom.is_1d() {
        let mut grad = 0.0;
        let mut pot = 0.0;
        for i in 0..nx {
            let dpsi = field[(i + 1) % nx] - field[i];
            grad += dpsi * dpsi;
            pot += op.a_x[i] * field[i] * field[i];
        }
        let q = nu * df / hx * grad - nu * hx * pot;
        return Ok(q / den);
    }

    let ny = geom.ny;
    let at = |i: usize, j: usize| field[j * nx + i];
    let mut q = 0.0;

    // Road gradient and exchange penalty.
    if geom.has_road() {
        let mut grad = 0.0;
        match geom.x_bc() {
            XBc::Dirichlet => {
                grad += road[0] * road[0] + road[nx - 1] * road[nx - 1];
                for i in 0..nx - 1 {
                    let d = road[i + 1] - road[i];
                    grad += d * d;
                }
            }
            XBc::Periodic => {
                for i in 0..nx {
                    let d = road[(i + 1) % nx] - road[i];
                    grad += d * d;
                }
            }
        }
        q += mu * dd / hx * grad;
        for i in 0..nx {
            let mismatch = mu * road[i] - nu * at(i, 0);
            q += hx * mismatch * mismatch;
        }
    }

    let boundary_bottom = geom.bottom_bc() != BottomBc::Dirichlet;

    // Field x-gradients, row by row (half weight on a boundary bottom row).
    for j in 0..ny {
        let mut grad = 0.0;
        match geom.x_bc() {
            XBc::Dirichlet => {
                grad += at(0, j) * at(0, j) + at(nx - 1, j) * at(nx - 1, j);
                for i in 0..nx - 1 {
                    let d = at(i + 1, j) - at(i, j);
                    grad += d * d;
                }
            }
            XBc::Periodic => {
                for i in 0..nx {
                    let d = at((i + 1) % nx, j) - at(i, j);
                    grad += d * d;
                }
            }
        }
        let rho = if j == 0 && boundary_bottom { 0.5 } else { 1.0 };
        q += rho * nu * df * hy / hx * grad;
    }

    // Field y-gradients, column by column. The top is always Dirichlet; the
    // bottom edge exists only for a Dirichlet bottom.
    for i in 0..nx {
        let mut grad = 0.0;
        if geom.bottom_bc() == BottomBc::Dirichlet {
            grad += at(i, 0) * at(i, 0);
        }
        for j in 0..ny - 1 {
            let d = at(i, j + 1) - at(i, j);
            grad += d * d;
        }
        grad += at(i, ny - 1) * at(i, ny - 1);
        q += nu * df * hx / hy * grad;
    }

    // Potential.
    for j in 0..ny {
        let rho = if j == 0 && boundary_bottom { 0.5 } else { 1.0 };
        for i in 0..nx {
            q -= rho * nu * hx * hy * op.a_x[i] * at(i, j) * at(i, j);
        }
    }

    Ok(q / den)
}

/// Uniform grid spacings shared across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub hx: f64,
    pub hy: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { hx: 0.125, hy: 0.125 }
    }
}

/// Family of truncated domains a sweep walks through (height = half-width).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepFamily {
    /// Road-field boxes `(-R, R) x (0, R)` with exchange bottom.
    Coupled,
    /// Fully absorbing boxes.
    DirichletRect,
    /// Reflecting bottom, absorbing sides and top.
    NeumannRect,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepPoint {
    pub r: f64,
    pub h: f64,
    pub lambda: f64,
    pub residual: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: SweepFamily,
    pub points: Vec<SweepPoint>,
    /// Aitken-extrapolated limit of the eigenvalue sequence (falls back to
    /// the last point when extrapolation is not justified).
    pub limit_estimate: f64,
    /// Whether the sequence was non-increasing to within `1e-9`.
    pub monotone: bool,
}

/// Builds the geometry of one sweep member.
pub fn sweep_geometry(family: SweepFamily, r: f64, grid: GridSpec) -> Result<Geometry> {
    match family {
        SweepFamily::Coupled => Geometry::truncated_road_field(r, r, grid.hx, grid.hy),
        SweepFamily::DirichletRect => Geometry::dirichlet_rect(r, r, grid.hx, grid.hy),
        SweepFamily::NeumannRect => Geometry::neumann_rect(r, r, grid.hx, grid.hy),
    }
}

/// Principal eigenvalues over a family of growing truncated domains at fixed
/// grid spacing, with an extrapolated limit.
pub fn truncation_sweep(
    family: SweepFamily,
    params: &ModelParams,
    reaction: Option<&ReactionSpec>,
    sizes: &[f64],
    grid: GridSpec,
    opts: &SolveOpts,
) -> Result<SweepResult> {
    if sizes.is_empty() {
        return Err(Error::ParameterDomain("truncation sweep needs at least one size".into()));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ParameterDomain(
            "truncation sweep sizes must be strictly increasing".into(),
        ));
    }
    let outcomes = parallel_map(sizes.to_vec(), |r| -> Result<SweepPoint> {
        let geom = sweep_geometry(family, r, grid)?;
        let op = assemble(&geom, params, reaction)?;
        let eig = principal_eigenpair(&op, opts)?;
        Ok(SweepPoint { r, h: r, lambda: eig.lambda, residual: eig.residual, iters: eig.iters })
    });
    let mut points = Vec::with_capacity(sizes.len());
    for o in outcomes {
        points.push(o?);
    }
    let lambdas: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let monotone = lambdas.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let limit_estimate = aitken_limit(&lambdas);
    Ok(SweepResult { family, points, limit_estimate, monotone })
}

/// Aitken delta-squared extrapolation from the last three terms, applied
/// only when the increments share a sign and shrink; otherwise the last
/// term is returned unchanged.
pub fn aitken_limit(seq: &[f64]) -> f64 {
    let n = seq.len();
    if n < 3 {
        return seq[n - 1];
    }
    let d1 = seq[n - 2] - seq[n - 3];
    let d2 = seq[n - 1] - seq[n - 2];
    if d1 == 0.0 || d2 == 0.0 {
        return seq[n - 1];
    }
    let r = d2 / d1;
    if r <= 0.0 || r >= 1.0 {
        return seq[n - 1];
    }
    seq[n - 1] + d2 * r / (1.0 - r)
}

/// Principal eigenpair on the 1D periodic cell (the `y`-independent
/// reduction of the roadless problem).
pub fn periodic_cell_eigen(
    params: &ModelParams,
    reaction: Option<&ReactionSpec>,
    grid: GridSpec,
    opts: &SolveOpts,
) -> Result<EigenResult> {
    let geom = Geometry::periodic_cell(params.ell, grid.hx)?;
    let op = assemble(&geom, params, reaction)?;
    principal_eigenpair(&op, opts)
}

/// Principal eigenpair on a geometry assembled on the fly.
pub fn eigen_on(
    geom: &Geometry,
    params: &ModelParams,
    reaction: Option<&ReactionSpec>,
    opts: &SolveOpts,
) -> Result<EigenResult> {
    let op = assemble(geom, params, reaction)?;
    principal_eigenpair(&op, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use crate::model::{ModelParams, ReactionSpec};

    fn params_basic(c: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, 1.0, c, 1.0).unwrap()
    }

    #[test]
    fn homogeneous_cell_eigenvalue_is_minus_a0() {
        // Constant eigenvector: the eigenvalue is exactly -alpha * a0.
        let p = params_basic(0.0);
        let r = ReactionSpec::homogeneous(0.7, 1.3, 1.0, 1.0).unwrap();
        let eig =
            periodic_cell_eigen(&p, Some(&r), GridSpec { hx: 0.125, hy: 0.125 }, &SolveOpts::default())
                .unwrap();
        assert!((eig.lambda + 1.3 * 0.7).abs() < 1e-11, "lambda = {}", eig.lambda);
        for v in &eig.vec_field {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn advection_does_not_move_the_cell_eigenvalue() {
        // Circulant spectrum: drift only adds imaginary parts.
        let p = params_basic(0.5);
        let r = ReactionSpec::homogeneous(0.4, 1.0, 1.0, 1.0).unwrap();
        let eig =
            periodic_cell_eigen(&p, Some(&r), GridSpec { hx: 0.0625, hy: 0.0625 }, &SolveOpts::default())
                .unwrap();
        assert!((eig.lambda + 0.4).abs() < 1e-10, "lambda = {}", eig.lambda);
    }

    #[test]
    fn dirichlet_rect_matches_discrete_tensor_formula() {
        // Separable problem: the discrete eigenvalue is known in closed form.
        let p = params_basic(0.0);
        let geom = Geometry::dirichlet_rect(1.0, 1.0, 0.125, 0.0625).unwrap();
        let op = assemble(&geom, &p, None).unwrap();
        let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let (nx, ny) = (geom.nx, geom.ny);
        let expect = 2.0 / (0.125 * 0.125)
            * (1.0 - (std::f64::consts::PI / (nx as f64 + 1.0)).cos())
            + 2.0 / (0.0625 * 0.0625)
                * (1.0 - (std::f64::consts::PI / (ny as f64 + 1.0)).cos());
        assert!(
            (eig.lambda - expect).abs() < 1e-9 * expect,
            "lambda = {}, tensor formula = {expect}",
            eig.lambda
        );
    }

    #[test]
    fn strip_eigenvalue_approaches_quarter_pi_squared() {
        // Strip (-1, 1), no reaction: continuum value pi^2 / 4.
        let p = params_basic(0.0);
        let geom = Geometry::periodic_strip(1.0, 1.0, 1, 0.25, 1.0 / 64.0).unwrap();
        let op = assemble(&geom, &p, None).unwrap();
        let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let target = std::f64::consts::PI.powi(2) / 4.0;
        assert!(
            (eig.lambda - target).abs() < 0.01 * target,
            "lambda = {}, target = {target}",
            eig.lambda
        );
    }

    #[test]
    fn roadless_half_strip_gives_quarter_wave_mode() {
        // Neumann bottom, Dirichlet top at h = 1: continuum value (pi/2)^2.
        let p = params_basic(0.0);
        let geom = Geometry::roadless_half_strip(1.0, 1.0, 1, 0.25, 1.0 / 64.0).unwrap();
        let op = assemble(&geom, &p, None).unwrap();
        let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let target = (std::f64::consts::PI / 2.0).powi(2);
        assert!(
            (eig.lambda - target).abs() < 0.01 * target,
            "lambda = {}, target = {target}",
            eig.lambda
        );
    }

    #[test]
    fn iterative_matches_dense_oracle_on_coupled_operator() {
        let p = ModelParams::new(2.0, 0.8, 1.1, 0.9, 0.0, 1.0).unwrap();
        let r = ReactionSpec::logistic(0.4, 1.0, 1.0, 1.4, 1.0).unwrap();
        let geom = Geometry::truncated_road_field(2.0, 2.0, 0.25, 0.25).unwrap();
        let op = assemble(&geom, &p, Some(&r)).unwrap();
        let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let dense = dense_oracle(&op).unwrap();
        assert!(
            (eig.lambda - dense[0]).abs() < 1e-9,
            "iterative {} vs dense {}",
            eig.lambda,
            dense[0]
        );
        assert!(eig.residual <= 1e-10 * (1.0 + eig.lambda.abs()));
        assert!(eig.vec_road.iter().chain(&eig.vec_field).all(|&v| v >= -1e-12));
    }

    #[test]
    fn iterative_matches_dense_oracle_with_drift() {
        let p = ModelParams::new(1.5, 1.0, 0.7, 1.2, 0.6, 1.0).unwrap();
        let r = ReactionSpec::logistic(0.2, 0.8, 1.0, 1.2, 1.0).unwrap();
        let geom = Geometry::truncated_road_field(2.0, 2.0, 0.25, 0.25).unwrap();
        let op = assemble(&geom, &p, Some(&r)).unwrap();
        let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let dense = dense_oracle(&op).unwrap();
        assert!(
            (eig.lambda - dense[0]).abs() < 1e-8,
            "iterative {} vs dense {}",
            eig.lambda,
            dense[0]
        );
    }

    #[test]
    fn rayleigh_quotient_equals_matrix_form_and_eigenvalue() {
        let p = ModelParams::new(1.7, 0.6, 1.4, 0.8, 0.0, 1.0).unwrap();
        let r = ReactionSpec::logistic(0.5, 0.9, 1.1, 1.4, 1.0).unwrap();
        for geom in [
            Geometry::truncated_road_field(2.0, 2.0, 0.25, 0.25).unwrap(),
            Geometry::periodic_half_strip(2.0, 1.0, 2, 0.25, 0.25).unwrap(),
            Geometry::roadless_half_strip(2.0, 1.0, 1, 0.25, 0.25).unwrap(),
            Geometry::dirichlet_rect(1.0, 1.0, 0.25, 0.25).unwrap(),
            Geometry::periodic_strip(1.0, 1.0, 1, 0.25, 0.25).unwrap(),
            Geometry::periodic_cell(1.0, 0.125).unwrap(),
        ] {
            let op = assemble(&geom, &p, Some(&r)).unwrap();

            // Identity with the weighted matrix quadratic form on a generic vector.
            let n = op.dim();
            let z: Vec<f64> = (0..n).map(|k| 0.3 + ((k * 37 + 11) % 17) as f64 / 17.0).collect();
            let az = op.matrix.apply(&z).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for k in 0..n {
                num += op.weights[k] * z[k] * az[k];
                den += op.weights[k] * z[k] * z[k];
            }
            let (road, field) = op.split(&z);
            let q = rayleigh_quotient(&op, road, field).unwrap();
            assert!(
                (q - num / den).abs() <= 1e-12 * (1.0 + (num / den).abs()),
                "{:?}: explicit {q} vs matrix {}",
                geom.kind,
                num / den
            );

            // Equals the eigenvalue on the eigenvector.
            let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
            let q1 = rayleigh_quotient(&op, &eig.vec_road, &eig.vec_field).unwrap();
            assert!(
                (q1 - eig.lambda).abs() <= 1e-9 * (1.0 + eig.lambda.abs()),
                "{:?}: rayleigh {q1} vs lambda {}",
                geom.kind,
                eig.lambda
            );
        }
    }

    #[test]
    fn rayleigh_quotient_bounds_the_principal_eigenvalue_below() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let r = ReactionSpec::logistic(0.3, 1.0, 1.0, 1.3, 1.0).unwrap();
        let geom = Geometry::truncated_road_field(2.0, 2.0, 0.25, 0.25).unwrap();
        let op = assemble(&geom, &p, Some(&r)).unwrap();
        let eig = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let n = op.dim();
        let mut state = 42u64;
        let mut next = move || {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..50 {
            let z: Vec<f64> = (0..n).map(|_| next()).collect();
            let (road, field) = op.split(&z);
            let q = rayleigh_quotient(&op, road, field).unwrap();
            assert!(q >= eig.lambda - 1e-8, "quotient {q} below lambda {}", eig.lambda);
        }
    }

    #[test]
    fn rayleigh_quotient_rejects_drift_and_zero_vectors() {
        let p = params_basic(0.5);
        let geom = Geometry::periodic_cell(1.0, 0.125).unwrap();
        let op = assemble(&geom, &p, None).unwrap();
        assert!(matches!(
            rayleigh_quotient(&op, &[], &vec![1.0; 8]),
            Err(Error::NotSelfAdjoint { .. })
        ));
        let p0 = params_basic(0.0);
        let op0 = assemble(&geom, &p0, None).unwrap();
        assert!(matches!(
            rayleigh_quotient(&op0, &[], &vec![0.0; 8]),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn sweep_is_monotone_and_extrapolates() {
        let p = params_basic(0.0);
        let r = ReactionSpec::logistic(0.5, 0.5, 1.0, 1.0, 1.0).unwrap();
        let sweep = truncation_sweep(
            SweepFamily::Coupled,
            &p,
            Some(&r),
            &[2.0, 4.0, 8.0],
            GridSpec { hx: 0.25, hy: 0.25 },
            &SolveOpts::default(),
        )
        .unwrap();
        assert!(sweep.monotone, "{:?}", sweep.points);
        assert_eq!(sweep.points.len(), 3);
        // The limit estimate extends the decreasing trend.
        let last = sweep.points.last().unwrap().lambda;
        assert!(sweep.limit_estimate <= last + 1e-12);
    }

    #[test]
    fn fixed_shift_agrees_with_refined_shift() {
        let p = params_basic(0.0);
        let r = ReactionSpec::logistic(1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        let geom = Geometry::truncated_road_field(4.0, 4.0, 0.25, 0.25).unwrap();
        let op = assemble(&geom, &p, Some(&r)).unwrap();
        let fast = principal_eigenpair(&op, &SolveOpts::default()).unwrap();
        let slow = principal_eigenpair(
            &op,
            &SolveOpts { fixed_shift_only: true, ..SolveOpts::default() },
        )
        .unwrap();
        assert!(
            (fast.lambda - slow.lambda).abs() <= 1e-8 * (1.0 + fast.lambda.abs()),
            "fast {} vs fixed {}",
            fast.lambda,
            slow.lambda
        );
    }

    #[test]
    fn aitken_is_exact_for_geometric_tails() {
        // lambda_k = L + C * q^k: the extrapolation recovers L exactly.
        let (l, c, q): (f64, f64, f64) = (-0.75, 0.9, 0.25);
        let seq: Vec<f64> = (0..4).map(|k| l + c * q.powi(k)).collect();
        let est = aitken_limit(&seq);
        assert!((est - l).abs() < 1e-12, "est = {est}");
    }
}
