use crate::fields::SphericalField;
use crate::harmonics::{gauss_legendre, legendre_all};
use crate::operators::apply_h;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Default Gauss-Legendre node count; exact for polynomial kernels of
/// degree below `2 * DEFAULT_NODES - L`.
pub const DEFAULT_NODES: usize = 64;

/// Per-order response coefficients `c_j = int_{-1}^{1} h(t) P_j(t) dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberResponse {
    pub c: Vec<f64>,
}

impl FiberResponse {
    pub fn l(&self) -> usize {
        self.c.len().saturating_sub(1)
    }
}

/// Axially symmetric single-fiber kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ResponseModel {
    /// `h(t) = exp(-bD t^2)`: no diffusion across the fiber.
    ExpBd {
        #[serde(rename = "bD")]
        bd: f64,
    },
}

impl Default for ResponseModel {
    fn default() -> Self {
        ResponseModel::ExpBd { bd: 1.0 }
    }
}

impl ResponseModel {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ResponseModel::ExpBd { bd } => (-bd * t * t).exp(),
        }
    }

    pub fn coeffs(&self, l: usize) -> FiberResponse {
        response_coeffs(|t| self.eval(t), l)
    }
}

pub fn response_coeffs(h: impl Fn(f64) -> f64, l: usize) -> FiberResponse {
    response_coeffs_with(h, l, DEFAULT_NODES.max(l + 1))
}

pub fn response_coeffs_with(h: impl Fn(f64) -> f64, l: usize, nodes: usize) -> FiberResponse {
    let (t, w) = gauss_legendre(nodes);
    let mut c = vec![0.0; l + 1];
    for (ti, wi) in t.iter().zip(&w) {
        let hv = h(*ti) * wi;
        for (cj, p) in c.iter_mut().zip(legendre_all(l, *ti)) {
            *cj += hv * p;
        }
    }
    FiberResponse { c }
}

/// Diagonal action `(H f)^j = c_j f^j`.
pub fn apply_response(f: &SphericalField, resp: &FiberResponse) -> Result<SphericalField> {
    apply_h(f, &resp.c)
}
