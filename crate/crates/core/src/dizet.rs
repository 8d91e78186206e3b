//! Direct zero-testing (DiZeT): hard decisions and pseudo-LLRs.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::check_len;
use crate::zeros::ConstellationParams;
use crate::{poly, Bit, Error, Result};

/// Received coefficients `y_0..y_{L_t-1}` with `L_t = K + L_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSequence {
    coeffs: Vec<Complex64>,
    l_e: usize,
}

impl ReceivedSequence {
    pub fn new(coeffs: Vec<Complex64>, l_e: usize) -> Result<Self> {
        if l_e == 0 {
            return Err(Error::InvalidArgument(
                "effective channel length must be at least 1",
            ));
        }
        if coeffs.len() < l_e + 1 {
            return Err(Error::InvalidArgument("sequence shorter than the channel"));
        }
        Ok(Self { coeffs, l_e })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn l_e(&self) -> usize {
        self.l_e
    }

    /// `L_t`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Pseudo-LLRs, positive for bit 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftOutput {
    pub pllrs: Vec<f64>,
}

impl SoftOutput {
    pub fn hard_decisions(&self) -> Vec<Bit> {
        self.pllrs.iter().map(|&v| Bit::from(v > 0.0)).collect()
    }
}

// (|Y(α_k^{(1)})|, ρ_k^{L_t-1} |Y(α_k^{(0)})|) for every k.
fn test_points<'a>(
    y: &'a [Complex64],
    params: &'a ConstellationParams,
) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    let exp = (y.len() - 1) as i32;
    (0..params.k()).map(move |k| {
        let rho = params.rho(k);
        let scale = rho.powi(exp);
        let one = poly::eval(y, params.zero(k, 1)).norm();
        let zero = poly::eval(y, params.zero(k, 0)).norm();
        (one, scale * zero, scale)
    })
}

fn check(y: &ReceivedSequence, params: &ConstellationParams) -> Result<()> {
    check_len(params.k() + y.l_e, y.len())
}

pub fn dizet_hard(y: &ReceivedSequence, params: &ConstellationParams) -> Result<Vec<Bit>> {
    check(y, params)?;
    Ok(test_points(&y.coeffs, params)
        .map(|(one, zero, _)| Bit::from(one < zero))
        .collect())
}

/// `PLLR_k = ρ^{L_t-1}|Y(α^{(0)})|² - ρ^{-(L_t-1)}|Y(α^{(1)})|²` on the
/// unit-energy normalized sequence.
pub fn pllr(y: &ReceivedSequence, params: &ConstellationParams) -> Result<SoftOutput> {
    check(y, params)?;
    let e = poly::energy(&y.coeffs);
    if !(e > 0.0) {
        return Err(Error::InvalidArgument(
            "cannot normalize an all-zero sequence",
        ));
    }
    let inv = e.recip();
    let pllrs = test_points(&y.coeffs, params)
        .map(|(one, zero, scale)| (zero * zero - one * one) * inv / scale)
        .collect();
    Ok(SoftOutput { pllrs })
}
