//! Computational domains and their uniform grids.
//!
//! Every 2D geometry places field nodes on a uniform `hx x hy` lattice. The
//! bottom boundary is where the variants differ:
//!
//! * exchange bottom: the field touches a road along `y = 0`; nodes sit on
//!   the boundary row `y = 0` and the flux condition couples them to road
//!   unknowns;
//! * Neumann bottom: no-flux wall at `y = 0`, nodes on the boundary row;
//! * Dirichlet bottom: absorbing wall, nodes start one spacing inside.
//!
//! The top boundary is always Dirichlet (truncation of an unbounded domain),
//! and the x-direction is either Dirichlet (truncated box) or periodic.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Boundary condition along the bottom edge of the field domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BottomBc {
    /// Flux exchange with the road: `-d v_y + nu v - mu u = 0`.
    Exchange,
    /// No-flux wall: `v_y = 0`.
    Neumann,
    /// Absorbing wall: `v = 0`.
    Dirichlet,
}

/// Boundary condition in the x-direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XBc {
    Dirichlet,
    Periodic,
}

/// The supported domain shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GeometryKind {
    /// Box `(-r, r) x (0, h)` with a road segment on `y = 0`: exchange
    /// bottom, Dirichlet sides and top, road unknowns on the bottom lattice.
    TruncatedRoadField { r: f64, h: f64 },
    /// Box `(-r, r) x (0, h)`, Dirichlet on all four sides, no road.
    DirichletRect { r: f64, h: f64 },
    /// Box `(-r, r) x (0, h)`, Neumann bottom, Dirichlet elsewhere, no road.
    NeumannRect { r: f64, h: f64 },
    /// One-dimensional periodic cell `[0, width)`.
    PeriodicCell1D,
    /// Strip `R x (-r, r)`, periodic in x, Dirichlet at `y = +-r`, no road.
    PeriodicStrip { r: f64 },
    /// Half-strip `R x (0, h)`, periodic in x, exchange bottom with a
    /// periodic road, Dirichlet top.
    PeriodicHalfStrip { h: f64 },
    /// Half-strip `R x (0, h)`, periodic in x, Neumann bottom (no road),
    /// Dirichlet top.
    RoadlessHalfStrip { h: f64 },
}

/// A concrete grid over one of the [`GeometryKind`] shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    /// Interior nodes per row (Dirichlet x) or nodes per period row
    /// (periodic x).
    pub nx: usize,
    /// Field rows; zero for the 1D cell.
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// Left end of the x-range.
    pub x0: f64,
    /// Total x-extent of the domain.
    pub width: f64,
}

/// Divides `len` by `h`, requiring the quotient to be an integer (up to
/// roundoff) of at least 1.
fn div_exact(len: f64, h: f64, what: &str) -> Result<usize> {
    if !len.is_finite() || len <= 0.0 || !h.is_finite() || h <= 0.0 {
        return Err(Error::GeometryMismatch(format!(
            "{what}: lengths must be positive and finite, got {len} and {h}"
        )));
    }
    let q = len / h;
    let n = q.round();
    if n < 1.0 || (q - n).abs() > 1e-9 * q.max(1.0) {
        return Err(Error::GeometryMismatch(format!(
            "{what}: {len} is not an integer multiple of the spacing {h}"
        )));
    }
    Ok(n as usize)
}

impl Geometry {
    /// Road-field box `(-r, r) x (0, h)`.
    pub fn truncated_road_field(r: f64, h: f64, hx: f64, hy: f64) -> Result<Self> {
        let nx_edges = div_exact(2.0 * r, hx, "truncated road-field x-extent")?;
        let ny = div_exact(h, hy, "truncated road-field height")?;
        if nx_edges < 4 || ny < 2 {
            return Err(Error::GeometryMismatch(format!(
                "truncated road-field grid too coarse: {nx_edges} x-intervals, {ny} rows"
            )));
        }
        Ok(Geometry {
            kind: GeometryKind::TruncatedRoadField { r, h },
            nx: nx_edges - 1,
            ny,
            hx,
            hy,
            x0: -r,
            width: 2.0 * r,
        })
    }

    /// Fully absorbing box `(-r, r) x (0, h)`.
    pub fn dirichlet_rect(r: f64, h: f64, hx: f64, hy: f64) -> Result<Self> {
        let nx_edges = div_exact(2.0 * r, hx, "rectangle x-extent")?;
        let ny_edges = div_exact(h, hy, "rectangle height")?;
        if nx_edges < 2 || ny_edges < 2 {
            return Err(Error::GeometryMismatch(
                "rectangle grid needs at least 2 intervals per direction".into(),
            ));
        }
        Ok(Geometry {
            kind: GeometryKind::DirichletRect { r, h },
            nx: nx_edges - 1,
            ny: ny_edges - 1,
            hx,
            hy,
            x0: -r,
            width: 2.0 * r,
        })
    }

    /// Box `(-r, r) x (0, h)` with a reflecting bottom wall.
    pub fn neumann_rect(r: f64, h: f64, hx: f64, hy: f64) -> Result<Self> {
        let nx_edges = div_exact(2.0 * r, hx, "rectangle x-extent")?;
        let ny = div_exact(h, hy, "rectangle height")?;
        if nx_edges < 2 || ny < 2 {
            return Err(Error::GeometryMismatch(
                "rectangle grid needs at least 2 intervals per direction".into(),
            ));
        }
        Ok(Geometry {
            kind: GeometryKind::NeumannRect { r, h },
            nx: nx_edges - 1,
            ny,
            hx,
            hy,
            x0: -r,
            width: 2.0 * r,
        })
    }

    /// One-dimensional periodic cell of length `ell`.
    pub fn periodic_cell(ell: f64, hx: f64) -> Result<Self> {
        let nx = div_exact(ell, hx, "periodic cell")?;
        if nx < 4 {
            return Err(Error::GeometryMismatch(format!(
                "periodic cell needs at least 4 nodes, got {nx}"
            )));
        }
        Ok(Geometry {
            kind: GeometryKind::PeriodicCell1D,
            nx,
            ny: 0,
            hx,
            hy: f64::NAN,
            x0: 0.0,
            width: ell,
        })
    }

    /// Periodic strip of `k` periods of length `ell`, `y` in `(-r, r)` with
    /// Dirichlet walls.
    pub fn periodic_strip(r: f64, ell: f64, k: usize, hx: f64, hy: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::GeometryMismatch("period count k must be at least 1".into()));
        }
        let width = ell * k as f64;
        let nx = div_exact(width, hx, "periodic strip x-extent")?;
        let ny_edges = div_exact(2.0 * r, hy, "periodic strip width")?;
        if nx < 4 || ny_edges < 2 {
            return Err(Error::GeometryMismatch(
                "periodic strip grid too coarse".into(),
            ));
        }
        Ok(Geometry {
            kind: GeometryKind::PeriodicStrip { r },
            nx,
            ny: ny_edges - 1,
            hx,
            hy,
            x0: 0.0,
            width,
        })
    }

    /// Periodic half-strip of `k` periods with a road along `y = 0` and a
    /// Dirichlet lid at `y = h`.
    pub fn periodic_half_strip(h: f64, ell: f64, k: usize, hx: f64, hy: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::GeometryMismatch("period count k must be at least 1".into()));
        }
        let width = ell * k as f64;
        let nx = div_exact(width, hx, "periodic half-strip x-extent")?;
        let ny = div_exact(h, hy, "periodic half-strip height")?;
        if nx < 4 || ny < 2 {
            return Err(Error::GeometryMismatch(
                "periodic half-strip grid too coarse".into(),
            ));
        }
        Ok(Geometry {
            kind: GeometryKind::PeriodicHalfStrip { h },
            nx,
            ny,
            hx,
            hy,
            x0: 0.0,
            width,
        })
    }

    /// Periodic half-strip with a reflecting bottom instead of a road.
    pub fn roadless_half_strip(h: f64, ell: f64, k: usize, hx: f64, hy: f64) -> Result<Self> {
        let g = Self::periodic_half_strip(h, ell, k, hx, hy)?;
        Ok(Geometry { kind: GeometryKind::RoadlessHalfStrip { h }, ..g })
    }

    pub fn is_1d(&self) -> bool {
        matches!(self.kind, GeometryKind::PeriodicCell1D)
    }

    pub fn has_road(&self) -> bool {
        matches!(
            self.kind,
            GeometryKind::TruncatedRoadField { .. } | GeometryKind::PeriodicHalfStrip { .. }
        )
    }

    pub fn x_bc(&self) -> XBc {
        match self.kind {
            GeometryKind::TruncatedRoadField { .. }
            | GeometryKind::DirichletRect { .. }
            | GeometryKind::NeumannRect { .. } => XBc::Dirichlet,
            _ => XBc::Periodic,
        }
    }

    /// Bottom boundary condition of the field block; meaningless for the 1D
    /// cell (returns Neumann by convention).
    pub fn bottom_bc(&self) -> BottomBc {
        match self.kind {
            GeometryKind::TruncatedRoadField { .. } | GeometryKind::PeriodicHalfStrip { .. } => {
                BottomBc::Exchange
            }
            GeometryKind::NeumannRect { .. }
            | GeometryKind::RoadlessHalfStrip { .. }
            | GeometryKind::PeriodicCell1D => BottomBc::Neumann,
            GeometryKind::DirichletRect { .. } | GeometryKind::PeriodicStrip { .. } => {
                BottomBc::Dirichlet
            }
        }
    }

    /// x-coordinate of column `i`.
    pub fn x(&self, i: usize) -> f64 {
        match self.x_bc() {
            // Interior nodes: boundary columns sit on x0 and x0 + width.
            XBc::Dirichlet => self.x0 + (i as f64 + 1.0) * self.hx,
            XBc::Periodic => self.x0 + i as f64 * self.hx,
        }
    }

    /// y-coordinate of row `j`.
    pub fn y(&self, j: usize) -> f64 {
        let y0 = match self.kind {
            GeometryKind::PeriodicStrip { r } => -r,
            _ => 0.0,
        };
        match self.bottom_bc() {
            BottomBc::Dirichlet => y0 + (j as f64 + 1.0) * self.hy,
            BottomBc::Exchange | BottomBc::Neumann => y0 + j as f64 * self.hy,
        }
    }

    pub fn dim_road(&self) -> usize {
        if self.has_road() {
            self.nx
        } else {
            0
        }
    }

    pub fn dim_field(&self) -> usize {
        if self.is_1d() {
            self.nx
        } else {
            self.nx * self.ny
        }
    }

    /// Total unknown count: road block first, then the field row-major.
    pub fn dim(&self) -> usize {
        self.dim_road() + self.dim_field()
    }

    /// Global index of field node `(i, j)`.
    pub fn field_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && (self.is_1d() || j < self.ny));
        self.dim_road() + j * self.nx + i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_road_field_dimensions_and_coordinates() {
        let g = Geometry::truncated_road_field(2.0, 2.0, 0.25, 0.25).unwrap();
        assert_eq!(g.nx, 15); // 16 intervals across (-2, 2)
        assert_eq!(g.ny, 8); // rows y = 0, 0.25, ..., 1.75; lid at y = 2
        assert_eq!(g.x(0), -1.75);
        assert_eq!(g.x(14), 1.75);
        assert_eq!(g.y(0), 0.0);
        assert_eq!(g.y(7), 1.75);
        assert_eq!(g.dim_road(), 15);
        assert_eq!(g.dim(), 15 + 15 * 8);
        assert_eq!(g.field_index(0, 0), 15);
        assert_eq!(g.field_index(3, 2), 15 + 2 * 15 + 3);
        assert_eq!(g.bottom_bc(), BottomBc::Exchange);
        assert_eq!(g.x_bc(), XBc::Dirichlet);
    }

    #[test]
    fn dirichlet_rect_offsets_bottom_row() {
        let g = Geometry::dirichlet_rect(1.0, 1.0, 0.25, 0.25).unwrap();
        assert_eq!(g.nx, 7);
        assert_eq!(g.ny, 3);
        assert_eq!(g.y(0), 0.25);
        assert_eq!(g.y(2), 0.75);
        assert_eq!(g.dim_road(), 0);
        assert_eq!(g.bottom_bc(), BottomBc::Dirichlet);
    }

    #[test]
    fn neumann_rect_keeps_bottom_row() {
        let g = Geometry::neumann_rect(1.0, 1.0, 0.25, 0.25).unwrap();
        assert_eq!(g.nx, 7);
        assert_eq!(g.ny, 4);
        assert_eq!(g.y(0), 0.0);
        assert_eq!(g.bottom_bc(), BottomBc::Neumann);
    }

    #[test]
    fn periodic_cell_is_one_dimensional() {
        let g = Geometry::periodic_cell(1.0, 0.125).unwrap();
        assert_eq!(g.nx, 8);
        assert_eq!(g.ny, 0);
        assert!(g.is_1d());
        assert_eq!(g.x(0), 0.0);
        assert_eq!(g.x(7), 0.875);
        assert_eq!(g.dim(), 8);
    }

    #[test]
    fn periodic_strip_centers_on_the_road_line() {
        let g = Geometry::periodic_strip(1.0, 1.0, 2, 0.25, 0.25).unwrap();
        assert_eq!(g.nx, 8);
        assert_eq!(g.ny, 7);
        assert_eq!(g.y(0), -0.75);
        assert_eq!(g.y(3), 0.0);
        assert_eq!(g.y(6), 0.75);
        assert_eq!(g.x_bc(), XBc::Periodic);
        assert_eq!(g.bottom_bc(), BottomBc::Dirichlet);
    }

    #[test]
    fn half_strips_share_dimensions_but_not_bottom_conditions() {
        let with_road = Geometry::periodic_half_strip(2.0, 1.0, 1, 0.25, 0.25).unwrap();
        let without = Geometry::roadless_half_strip(2.0, 1.0, 1, 0.25, 0.25).unwrap();
        assert_eq!(with_road.nx, 4);
        assert_eq!(with_road.ny, 8);
        assert_eq!(without.nx, 4);
        assert_eq!(without.ny, 8);
        assert!(with_road.has_road());
        assert!(!without.has_road());
        assert_eq!(with_road.dim(), 4 + 32);
        assert_eq!(without.dim(), 32);
        assert_eq!(without.bottom_bc(), BottomBc::Neumann);
    }

    #[test]
    fn misaligned_spacing_is_rejected() {
        assert!(Geometry::truncated_road_field(1.0, 1.0, 0.3, 0.25).is_err());
        assert!(Geometry::periodic_cell(1.0, 0.3).is_err());
        assert!(Geometry::periodic_strip(1.0, 1.0, 0, 0.25, 0.25).is_err());
        assert!(Geometry::dirichlet_rect(-1.0, 1.0, 0.25, 0.25).is_err());
    }
}
