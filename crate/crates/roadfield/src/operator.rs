//! Finite-difference assembly of the eigenvalue operator.
//!
//! The assembled matrix `A` acts on the stacked vector `z = (u, v)` (road
//! block first, field block row-major) and represents the *negated*
//! linearized generator, so the principal eigenvalue of `A` is the
//! generalized principal eigenvalue of the underlying elliptic system:
//!
//! * field rows: `-(d Lap v + c v_x + a(x) v)` with a 5-point Laplacian and
//!   central advection;
//! * road rows: `-(D u'' + c u' + nu v|_{y=0} - mu u)`;
//! * exchange bottom rows eliminate the ghost value through the flux
//!   condition `-d v_y + nu v - mu u = 0`, which adds `2 nu / hy` to the
//!   diagonal, `-2 mu / hy` towards the road, and doubles the coupling to
//!   the first interior row;
//! * Neumann bottom rows use the mirror ghost (doubled coupling upward);
//! * Dirichlet neighbours are dropped.
//!
//! With drift `c = 0` the matrix is self-adjoint in the weighted inner
//! product `<z, w>_W = sum_i W_i z_i w_i` where `W` carries `mu hx` on road
//! rows, `nu hx hy` on interior field rows, and `nu hx hy / 2` on boundary
//! rows that sit on `y = 0` (trapezoidal weight). This exact discrete
//! self-adjointness is what the Rayleigh-quotient routines rely on.

use crate::error::{Error, Result};
use crate::geometry::{BottomBc, Geometry, XBc};
use crate::model::{ModelParams, ReactionSpec};
use crate::sparse::{CsrBuilder, CsrMatrix};

/// Assembled operator with the metadata needed by eigensolvers, Rayleigh
/// quotients, and dynamics.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: CsrMatrix,
    pub geometry: Geometry,
    pub params: ModelParams,
    /// Linearization samples `a(x_i)` per column (zeros when assembled
    /// without a reaction).
    pub a_x: Vec<f64>,
    /// Per-row weights of the symmetrizing inner product.
    pub weights: Vec<f64>,
    /// FNV-1a hash of the matrix entries; equal inputs must produce equal
    /// fingerprints (determinism check).
    pub fingerprint: u64,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.matrix.n()
    }

    pub fn dim_road(&self) -> usize {
        self.geometry.dim_road()
    }

    pub fn dim_field(&self) -> usize {
        self.geometry.dim_field()
    }

    /// Splits a stacked vector into `(road, field)` views.
    pub fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        z.split_at(self.dim_road())
    }

    /// Largest violation of weighted symmetry `W A = A^T W`, relative to the
    /// largest weighted entry. Zero drift should give roundoff-level values.
    pub fn weighted_symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for i in 0..n {
            for (j, v) in self.matrix.row(i) {
                let lhs = self.weights[i] * v;
                let rhs = self.weights[j] * self.matrix.entry(j, i);
                scale = scale.max(lhs.abs());
                worst = worst.max((lhs - rhs).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Checks the mesh Peclet number `|c| hx / (2 min(D, d)) < 1` so that central
/// advection keeps the off-diagonal sign pattern of an M-matrix.
fn check_peclet(geom: &Geometry, params: &ModelParams) -> Result<()> {
    if params.c == 0.0 {
        return Ok(());
    }
    let diff_min = if geom.has_road() {
        params.d_road.min(params.d_field)
    } else {
        params.d_field
    };
    let peclet = params.c.abs() * geom.hx / (2.0 * diff_min);
    if peclet >= 1.0 {
        return Err(Error::PecletViolation { peclet });
    }
    Ok(())
}

/// Assembles the operator on `geom`. `reaction = None` assembles the pure
/// transport-exchange part (`a = 0`), which is the implicit matrix used by
/// the dynamics stepper.
pub fn assemble(
    geom: &Geometry,
    params: &ModelParams,
    reaction: Option<&ReactionSpec>,
) -> Result<DiscreteOperator> {
    params.validate()?;
    check_peclet(geom, params)?;
    if let Some(r) = reaction {
        r.validate_params()?;
        if (r.ell - params.ell).abs() > 1e-12 * params.ell {
            return Err(Error::GeometryMismatch(format!(
                "reaction period {} disagrees with model period {}",
                r.ell, params.ell
            )));
        }
    }
    if geom.x_bc() == XBc::Periodic {
        let periods = geom.width / params.ell;
        if (periods - periods.round()).abs() > 1e-9 * periods.max(1.0) || periods.round() < 1.0 {
            return Err(Error::GeometryMismatch(format!(
                "periodic domain width {} must be a whole number of periods {}",
                geom.width, params.ell
            )));
        }
    }

    let a_x: Vec<f64> = (0..geom.nx)
        .map(|i| reaction.map_or(0.0, |r| r.linearization(geom.x(i))))
        .collect();

    let op = if geom.is_1d() {
        assemble_cell_1d(geom, params, &a_x)
    } else {
        assemble_2d(geom, params, &a_x)
    }?;
    Ok(op)
}

fn assemble_cell_1d(
    geom: &Geometry,
    params: &ModelParams,
    a_x: &[f64],
) -> Result<DiscreteOperator> {
    let nx = geom.nx;
    let (d, c, hx) = (params.d_field, params.c, geom.hx);
    let mut b = CsrBuilder::new(nx);
    for i in 0..nx {
        b.add(i, i, 2.0 * d / (hx * hx) - a_x[i]);
        let east = (i + 1) % nx;
        let west = (i + nx - 1) % nx;
        b.add(i, east, -d / (hx * hx) - c / (2.0 * hx));
        b.add(i, west, -d / (hx * hx) + c / (2.0 * hx));
    }
    let matrix = b.build();
    let weights = vec![params.nu * hx; nx];
    let fingerprint = fingerprint_matrix(&matrix);
    Ok(DiscreteOperator {
        matrix,
        geometry: geom.clone(),
        params: *params,
        a_x: a_x.to_vec(),
        weights,
        fingerprint,
    })
}

fn assemble_2d(geom: &Geometry, params: &ModelParams, a_x: &[f64]) -> Result<DiscreteOperator> {
    let (nx, ny) = (geom.nx, geom.ny);
    let (hx, hy) = (geom.hx, geom.hy);
    let (dd, df, nu, mu, c) = (params.d_road, params.d_field, params.nu, params.mu, params.c);
    let n = geom.dim();
    let nroad = geom.dim_road();
    let mut b = CsrBuilder::new(n);

    // Horizontal neighbours of column i, or None across a Dirichlet wall.
    let x_neighbors = |i: usize| -> (Option<usize>, Option<usize>) {
        match geom.x_bc() {
            XBc::Dirichlet => (
                if i > 0 { Some(i - 1) } else { None },
                if i + 1 < nx { Some(i + 1) } else { None },
            ),
            XBc::Periodic => (Some((i + nx - 1) % nx), Some((i + 1) % nx)),
        }
    };

    // Road rows: -(D u'' + c u' + nu v(., 0) - mu u).
    if geom.has_road() {
        for i in 0..nx {
            let (west, east) = x_neighbors(i);
            b.add(i, i, 2.0 * dd / (hx * hx) + mu);
            if let Some(w) = west {
                b.add(i, w, -dd / (hx * hx) + c / (2.0 * hx));
            }
            if let Some(e) = east {
                b.add(i, e, -dd / (hx * hx) - c / (2.0 * hx));
            }
            b.add(i, geom.field_index(i, 0), -nu);
        }
    }

    // Field rows: -(d Lap v + c v_x + a v) with the bottom row specialised.
    for j in 0..ny {
        for i in 0..nx {
            let row = geom.field_index(i, j);
            let (west, east) = x_neighbors(i);
            let mut diag = 2.0 * df / (hx * hx) + 2.0 * df / (hy * hy) - a_x[i];
            if let Some(w) = west {
                b.add(row, geom.field_index(w, j), -df / (hx * hx) + c / (2.0 * hx));
            }
            if let Some(e) = east {
                b.add(row, geom.field_index(e, j), -df / (hx * hx) - c / (2.0 * hx));
            }
            if j + 1 < ny {
                let up = -df / (hy * hy);
                let up = if j == 0 && geom.bottom_bc() != BottomBc::Dirichlet {
                    2.0 * up // ghost elimination doubles the upward coupling
                } else {
                    up
                };
                b.add(row, geom.field_index(i, j + 1), up);
            }
            if j == 0 {
                match geom.bottom_bc() {
                    BottomBc::Exchange => {
                        diag += 2.0 * nu / hy;
                        b.add(row, i, -2.0 * mu / hy);
                    }
                    BottomBc::Neumann => {
                        // Mirror ghost: no extra diagonal term.
                    }
                    BottomBc::Dirichlet => {
                        // South neighbour is the zero boundary value.
                    }
                }
            } else {
                b.add(row, geom.field_index(i, j - 1), -df / (hy * hy));
            }
            b.add(row, row, diag);
        }
    }

    let matrix = b.build();
    let mut weights = vec![0.0; n];
    for w in weights.iter_mut().take(nroad) {
        *w = mu * hx;
    }
    let boundary_bottom = geom.bottom_bc() != BottomBc::Dirichlet;
    for j in 0..ny {
        let row_weight = if j == 0 && boundary_bottom {
            nu * hx * hy / 2.0
        } else {
            nu * hx * hy
        };
        for i in 0..nx {
            weights[geom.field_index(i, j)] = row_weight;
        }
    }
    let fingerprint = fingerprint_matrix(&matrix);
    Ok(DiscreteOperator {
        matrix,
        geometry: geom.clone(),
        params: *params,
        a_x: a_x.to_vec(),
        weights,
        fingerprint,
    })
}

/// FNV-1a over the bit patterns of every stored entry, row by row.
fn fingerprint_matrix(m: &CsrMatrix) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(m.n() as u64);
    for i in 0..m.n() {
        for (j, v) in m.row(i) {
            eat(i as u64);
            eat(j as u64);
            eat(v.to_bits());
        }
    }
    h
}
