//! PAPR of frequency-mapped BMOCZ symbols. The instantaneous power of such a
//! symbol is `A(e^{jω})`, so the PAPR is fixed by the constellation alone.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::zeros::{eta_j, jutted_spectrum, ConstellationParams};
use crate::{Error, Result};

pub const MIN_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaprMethod {
    ClosedForm,
    Numeric,
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// `10 log₁₀(1 + 2η_H)`.
pub fn papr_fm_huffman(params: &ConstellationParams) -> Result<f64> {
    if !params.is_huffman() {
        return Err(Error::InvalidArgument("Huffman PAPR needs zeta = 1"));
    }
    Ok(to_db(1.0 + 2.0 * params.eta_h()))
}

/// Sufficient condition under which the template peak sits at `ω = 0`.
pub fn prop1_condition(params: &ConstellationParams) -> bool {
    let k = params.k() as f64;
    let (a, b) = (params.a(), params.b());
    let eh = params.eta_h();
    let c = 2.0 * (PI / k).cos();
    let rhs = (a - b) * (1.0 - 2.0 * eh) / (eh * (a - c) * (b - c));
    k * k < rhs
}

/// Linear closed form `(η_J/η_H) (a-2)/(b-2) (1-2η_H)`.
pub fn papr_jutted_closed_form(params: &ConstellationParams) -> f64 {
    let eh = params.eta_h();
    eta_j(params) / eh * (params.a() - 2.0) / (params.b() - 2.0) * (1.0 - 2.0 * eh)
}

/// Linear `max_n A_J(2πn/grid) / (K+1)`.
pub fn template_papr(params: &ConstellationParams, grid: usize) -> f64 {
    let peak = (0..grid)
        .map(|i| jutted_spectrum(params, 2.0 * PI * i as f64 / grid as f64))
        .fold(0.0, f64::max);
    peak / (params.k() + 1) as f64
}

/// JBMOCZ template PAPR in dB: closed form when the sufficient condition
/// holds, numeric maximum otherwise.
pub fn papr_fm_jutted(params: &ConstellationParams, grid: usize) -> Result<(f64, PaprMethod)> {
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(
            "PAPR grid must have at least 4096 points",
        ));
    }
    if params.zeta() > 1.0 && prop1_condition(params) {
        Ok((
            to_db(papr_jutted_closed_form(params)),
            PaprMethod::ClosedForm,
        ))
    } else {
        Ok((to_db(template_papr(params, grid)), PaprMethod::Numeric))
    }
}

/// `max |s|² / mean |s|²` of a sample block, linear.
pub fn measured_papr(samples: &[Complex64]) -> f64 {
    let (mut peak, mut sum) = (0.0f64, 0.0);
    for s in samples {
        let p = s.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return 0.0;
    }
    peak * samples.len() as f64 / sum
}
