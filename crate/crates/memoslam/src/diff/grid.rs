//! Dense 3-D feature lattices with trilinear interpolation and exact gradients.

use crate::error::{Error, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Axis-aligned box in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn new(min: Vector3<f64>, max: Vector3<f64>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn center(&self) -> Vector3<f64> {
        0.5 * (self.min + self.max)
    }

    /// Grows the box by `fraction` of its extent on every side.
    pub fn inflated(&self, fraction: f64) -> Self {
        let pad = self.extent() * fraction;
        Self {
            min: self.min - pad,
            max: self.max + pad,
        }
    }

    /// Entry/exit distances of a ray against the box, if it intersects.
    pub fn ray_span(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<(f64, f64)> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for a in 0..3 {
            if dir[a].abs() < 1e-15 {
                if origin[a] < self.min[a] || origin[a] > self.max[a] {
                    return None;
                }
            } else {
                let inv = 1.0 / dir[a];
                let (mut ta, mut tb) = ((self.min[a] - origin[a]) * inv, (self.max[a] - origin[a]) * inv);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
            }
        }
        (t0 <= t1).then_some((t0, t1))
    }
}

/// One dense grid level: `cells + 1` vertices per axis, `features` values per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGrid {
    cells: usize,
    features: usize,
    bounds: Aabb,
    values: Vec<f64>,
}

/// The 8 enclosing vertices of a query point with their trilinear weights,
/// plus the per-axis fractions needed for point gradients.
#[derive(Debug, Clone, Copy)]
pub struct CellCorners {
    /// (flat vertex index scaled by feature count, weight)
    pub corners: [(usize, f64); 8],
    /// d(weight)/d(world point) for each corner.
    pub d_weight: [[f64; 3]; 8],
}

impl FeatureGrid {
    pub fn zeros(cells: usize, features: usize, bounds: Aabb) -> Self {
        let verts = (cells + 1).pow(3);
        Self {
            cells,
            features,
            bounds,
            values: vec![0.0; verts * features],
        }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn vertex_count(&self) -> usize {
        (self.cells + 1).pow(3)
    }

    #[inline]
    pub fn vertex_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * (self.cells + 1) + iy) * (self.cells + 1) + iz
    }

    pub fn vertex_value(&self, ix: usize, iy: usize, iz: usize, f: usize) -> f64 {
        self.values[self.vertex_index(ix, iy, iz) * self.features + f]
    }

    pub fn set_vertex_value(&mut self, ix: usize, iy: usize, iz: usize, f: usize, v: f64) {
        let idx = self.vertex_index(ix, iy, iz) * self.features + f;
        self.values[idx] = v;
    }

    /// Locates the cell containing `p` and computes corner weights and their
    /// point derivatives. Errors if `p` is outside the bounding box.
    pub fn locate(&self, p: &Vector3<f64>) -> Result<CellCorners> {
        if !self.bounds.contains(p) {
            return Err(Error::OutOfDomain(p.x, p.y, p.z));
        }
        let ext = self.bounds.extent();
        let n = self.cells as f64;
        let mut cell = [0usize; 3];
        let mut frac = [0f64; 3];
        let mut dfrac = [0f64; 3]; // d(frac)/d(world coordinate)
        for a in 0..3 {
            let u = (p[a] - self.bounds.min[a]) / ext[a] * n;
            let c = (u.floor() as usize).min(self.cells - 1);
            cell[a] = c;
            frac[a] = u - c as f64;
            dfrac[a] = n / ext[a];
        }
        let (fx, fy, fz) = (frac[0], frac[1], frac[2]);
        let wx = [1.0 - fx, fx];
        let wy = [1.0 - fy, fy];
        let wz = [1.0 - fz, fz];
        let sx = [-1.0, 1.0];
        let mut corners = [(0usize, 0f64); 8];
        let mut d_weight = [[0f64; 3]; 8];
        let mut k = 0;
        for dx in 0..2 {
            for dy in 0..2 {
                for dz in 0..2 {
                    let vi = self.vertex_index(cell[0] + dx, cell[1] + dy, cell[2] + dz);
                    let w = wx[dx] * wy[dy] * wz[dz];
                    corners[k] = (vi * self.features, w);
                    d_weight[k] = [
                        sx[dx] * wy[dy] * wz[dz] * dfrac[0],
                        wx[dx] * sx[dy] * wz[dz] * dfrac[1],
                        wx[dx] * wy[dy] * sx[dz] * dfrac[2],
                    ];
                    k += 1;
                }
            }
        }
        Ok(CellCorners { corners, d_weight })
    }

    /// Trilinear interpolation at `p`, writing the feature vector into `out`.
    pub fn interpolate_into(&self, cell: &CellCorners, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.features);
        out.fill(0.0);
        for (base, w) in cell.corners {
            for f in 0..self.features {
                out[f] = w.mul_add(self.values[base + f], out[f]);
            }
        }
    }

    /// Convenience wrapper returning the interpolated feature vector.
    pub fn interpolate(&self, p: &Vector3<f64>) -> Result<Vec<f64>> {
        let cell = self.locate(p)?;
        let mut out = vec![0.0; self.features];
        self.interpolate_into(&cell, &mut out);
        Ok(out)
    }

    /// d(feature)/d(point): a `features x 3` Jacobian.
    pub fn point_jacobian(&self, cell: &CellCorners) -> Vec<[f64; 3]> {
        let mut jac = vec![[0.0; 3]; self.features];
        for (k, (base, _)) in cell.corners.iter().enumerate() {
            for f in 0..self.features {
                let v = self.values[base + f];
                for a in 0..3 {
                    jac[f][a] += cell.d_weight[k][a] * v;
                }
            }
        }
        jac
    }

    /// Accumulates `d<loss>/d<grid values>` for a query: sparse over the 8 corners.
    pub fn accumulate_value_grad(&self, cell: &CellCorners, d_feature: &[f64], grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.values.len());
        for (base, w) in cell.corners {
            for f in 0..self.features {
                grad[base + f] = w.mul_add(d_feature[f], grad[base + f]);
            }
        }
    }

    /// Accumulates `d<loss>/d<point>` given upstream feature gradients.
    pub fn accumulate_point_grad(
        &self,
        cell: &CellCorners,
        d_feature: &[f64],
        d_point: &mut Vector3<f64>,
    ) {
        for (k, (base, _)) in cell.corners.iter().enumerate() {
            let mut dot = 0.0;
            for f in 0..self.features {
                dot = d_feature[f].mul_add(self.values[base + f], dot);
            }
            for a in 0..3 {
                d_point[a] += cell.d_weight[k][a] * dot;
            }
        }
    }
}
