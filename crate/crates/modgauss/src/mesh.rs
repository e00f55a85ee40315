//! Hypercubic facet meshes on spheres S^{d-1}(b): radial projections of a
//! regular grid on the boundary of [-1,1]^d, their surface measures, cone
//! over/under-approximations, and surface integrals.

use crate::numeric::quad::gauss_legendre;
use crate::{Error, Result};
use rayon::prelude::*;

/// Radial projection onto S^{d-1}(b) of one rectangular cell sitting on a
/// face of the cube [-1,1]^d.
#[derive(Clone, Debug)]
pub struct HypercubicFacet {
    pub d: usize,
    pub b: f64,
    /// coordinate axis normal to the cube face
    pub axis: usize,
    /// +1.0 or -1.0
    pub sign: f64,
    /// cell bounds on the remaining d-1 coordinates, each within [-1,1]
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl HypercubicFacet {
    /// Point of the cube face from cell-local coordinates.
    fn face_point(&self, t: &[f64]) -> Vec<f64> {
        let mut u = Vec::with_capacity(self.d);
        let mut k = 0;
        for i in 0..self.d {
            if i == self.axis {
                u.push(self.sign);
            } else {
                u.push(t[k]);
                k += 1;
            }
        }
        u
    }

    fn project(&self, u: &[f64]) -> Vec<f64> {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter().map(|x| self.b * x / norm).collect()
    }

    /// The 2^{d-1} projected corner points, all of norm b.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let m = self.d - 1;
        (0..(1usize << m))
            .map(|mask| {
                let t: Vec<f64> = (0..m)
                    .map(|k| if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] })
                    .collect();
                self.project(&self.face_point(&t))
            })
            .collect()
    }

    /// Projection of the cell midpoint.
    pub fn center(&self) -> Vec<f64> {
        let t: Vec<f64> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| 0.5 * (a + b))
            .collect();
        self.project(&self.face_point(&t))
    }

    /// Surface measure via the radial-projection Jacobian:
    /// d mu = b^{d-1} ||u||^{-d} du over the flat cell.
    pub fn measure(&self, order: usize) -> f64 {
        let m = self.d - 1;
        if m == 0 {
            return 1.0;
        }
        let (x, w) = gauss_legendre(order);
        let mut idx = vec![0usize; m];
        let mut acc = 0.0;
        loop {
            let mut weight = 1.0;
            let mut t = Vec::with_capacity(m);
            for k in 0..m {
                let c = 0.5 * (self.lo[k] + self.hi[k]);
                let h = 0.5 * (self.hi[k] - self.lo[k]);
                t.push(c + h * x[idx[k]]);
                weight *= w[idx[k]] * h;
            }
            let u = self.face_point(&t);
            let norm2: f64 = u.iter().map(|v| v * v).sum();
            acc += weight * norm2.powf(-(self.d as f64) / 2.0);
            if !incr(&mut idx, order) {
                break;
            }
        }
        acc * self.b.powi(self.d as i32 - 1)
    }

    /// Whether the ray of x passes through this facet (boundary inclusive).
    pub fn ray_contains(&self, x: &[f64]) -> bool {
        let xa = x[self.axis] * self.sign;
        if xa <= 0.0 {
            return false;
        }
        let mut k = 0;
        for i in 0..self.d {
            if i == self.axis {
                continue;
            }
            let t = x[i] / xa;
            if t < self.lo[k] - 1e-12 || t > self.hi[k] + 1e-12 {
                return false;
            }
            k += 1;
        }
        // the facet's face must be the one the ray exits through
        let amax = x
            .iter()
            .map(|v| v.abs())
            .fold(0.0f64, f64::max);
        xa >= amax - 1e-12
    }
}

/// Complete mesh of S^{d-1}(b): 2d faces, m^{d-1} cells per face.
#[derive(Clone, Debug)]
pub struct FacetMesh {
    pub d: usize,
    pub b: f64,
    pub m: usize,
    pub facets: Vec<HypercubicFacet>,
}

/// Canonical facet ordering: face-major (axis, then sign -1 before +1),
/// cells in lexicographic order of their integer grid coordinates.
pub fn build_mesh(d: usize, b: f64, m: usize) -> Result<FacetMesh> {
    if !(2..=4).contains(&d) {
        return Err(Error::domain("mesh dimension must be 2, 3 or 4"));
    }
    if m == 0 || m > 256 {
        return Err(Error::domain("resolution must be in 1..=256"));
    }
    if b <= 0.0 {
        return Err(Error::domain("radius must be positive"));
    }
    let cells = m.pow(d as u32 - 1);
    let mut facets = Vec::with_capacity(2 * d * cells);
    let h = 2.0 / m as f64;
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            for cell in 0..cells {
                let mut rem = cell;
                let mut lo = Vec::with_capacity(d - 1);
                let mut hi = Vec::with_capacity(d - 1);
                for _ in 0..d - 1 {
                    let i = rem % m;
                    rem /= m;
                    lo.push(-1.0 + h * i as f64);
                    hi.push(-1.0 + h * (i + 1) as f64);
                }
                facets.push(HypercubicFacet {
                    d,
                    b,
                    axis,
                    sign,
                    lo,
                    hi,
                });
            }
        }
    }
    Ok(FacetMesh { d, b, m, facets })
}

impl FacetMesh {
    pub fn total_measure(&self, order: usize) -> f64 {
        let parts: Vec<f64> = self
            .facets
            .par_iter()
            .map(|f| f.measure(order))
            .collect();
        parts.iter().sum()
    }

    /// Index of the facet whose radial cone contains x.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let amax = x.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if amax == 0.0 {
            return None;
        }
        let axis = (0..self.d)
            .max_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap())
            .unwrap();
        let sign = if x[axis] >= 0.0 { 1.0 } else { -1.0 };
        let side = if sign > 0.0 { 1 } else { 0 };
        let cells = self.m.pow(self.d as u32 - 1);
        let mut cell = 0usize;
        let mut stride = 1usize;
        for i in 0..self.d {
            if i == axis {
                continue;
            }
            let t = x[i] / (sign * x[axis]);
            let j = (((t + 1.0) / 2.0 * self.m as f64).floor() as isize)
                .clamp(0, self.m as isize - 1) as usize;
            cell += j * stride;
            stride *= self.m;
        }
        Some((axis * 2 + side) * cells + cell)
    }

    /// Same mesh with each cell split into 2^{d-1} children.
    pub fn refine(&self) -> Result<FacetMesh> {
        build_mesh(self.d, self.b, self.m * 2)
    }

    /// Riemann-type surface integral: sum over facets whose center lies in
    /// the region of psi(center) * measure(facet).
    pub fn surface_integral(
        &self,
        psi: &(dyn Fn(&[f64]) -> f64 + Sync),
        region: &(dyn Fn(&[f64]) -> bool + Sync),
        order: usize,
    ) -> f64 {
        let parts: Vec<f64> = self
            .facets
            .par_iter()
            .map(|f| {
                let c = f.center();
                if region(&c) {
                    psi(&c) * f.measure(order)
                } else {
                    0.0
                }
            })
            .collect();
        parts.iter().sum()
    }
}

/// Cone under/over-approximations of the spherical sector over a facet.
/// Both cones share the facet's radial cone of rays; they differ by the
/// truncating hyperplane level along the barycenter direction:
/// C_-(B) truncates at r_minus <= b (contains the sector),
/// C_+(B) truncates at b (contained in the sector).
#[derive(Clone, Debug)]
pub struct ConePair {
    pub facet: HypercubicFacet,
    /// Euclidean barycenter of the projected corners, ||h|| <= b
    pub h: Vec<f64>,
    /// level of the negative cone: min over corners of <v_i, h/||h||>
    pub r_minus: f64,
    pub b: f64,
}

pub fn cone_pair(facet: &HypercubicFacet) -> Result<ConePair> {
    let corners = facet.corners();
    let d = facet.d;
    let mut h = vec![0.0; d];
    for c in &corners {
        for i in 0..d {
            h[i] += c[i] / corners.len() as f64;
        }
    }
    let hn = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    if hn < 1e-12 {
        return Err(Error::domain("degenerate facet: zero barycenter"));
    }
    let hdir: Vec<f64> = h.iter().map(|x| x / hn).collect();
    let r_minus = corners
        .iter()
        .map(|c| c.iter().zip(&hdir).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(ConePair {
        facet: facet.clone(),
        h,
        r_minus,
        b: facet.b,
    })
}

impl ConePair {
    fn along_h(&self, x: &[f64]) -> f64 {
        let hn = self.h.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter().zip(&self.h).map(|(a, b)| a * b).sum::<f64>() / hn
    }

    /// Membership in the negative (outer) cone.
    pub fn contains_minus(&self, x: &[f64]) -> bool {
        self.facet.ray_contains(x) && self.along_h(x) >= self.r_minus - 1e-12
    }

    /// Membership in the positive (inner) cone.
    pub fn contains_plus(&self, x: &[f64]) -> bool {
        self.facet.ray_contains(x) && self.along_h(x) >= self.b - 1e-12
    }

    /// Membership in the spherical sector B itself.
    pub fn sector_contains(&self, x: &[f64]) -> bool {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.facet.ray_contains(x) && n >= self.b - 1e-12
    }

    /// Level gap b - b_minus of the under-approximation.
    pub fn level_gap(&self) -> f64 {
        self.b - self.r_minus
    }
}

fn incr(idx: &mut [usize], base: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < base {
            return true;
        }
        idx[i] = 0;
    }
    false
}
