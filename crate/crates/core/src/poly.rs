//! Dense complex polynomial helpers. Coefficients are stored in ascending
//! order, `c[l]` multiplying `z^l`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

// The unit-norm Wilkinson polynomial has |x_K| ≈ 4e-19, which must still be
// accepted.
const DEGENERATE_LEAD: f64 = 1e-24;

/// Horner evaluation.
#[inline]
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Full linear convolution, i.e. the product polynomial.
pub fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Monic expansion of `∏ (z - r_i)` by repeated multiplication, in root order.
pub fn expand_roots_direct(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![ONE];
    for &r in roots {
        let mut next = vec![ZERO; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c
}

pub fn energy(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm_sqr()).sum()
}

/// Divides `coeffs` by `(z - root)` and returns the quotient together with the
/// residual `|X(root)|` relative to `Σ |x_l| |root|^l`.
///
/// Roots inside the unit disk are divided out from the leading end, roots
/// outside from the constant end, so rounding errors are never amplified by
/// `|root|`.
pub fn divide_root(coeffs: &[Complex64], root: Complex64) -> (Vec<Complex64>, f64) {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return (Vec::new(), 0.0);
    }
    let mut q = vec![ZERO; deg];
    if root.norm() <= 1.0 {
        q[deg - 1] = coeffs[deg];
        for i in (1..deg).rev() {
            q[i - 1] = coeffs[i] + root * q[i];
        }
    } else {
        let inv = root.inv();
        q[0] = -coeffs[0] * inv;
        for i in 1..deg {
            q[i] = (q[i - 1] - coeffs[i]) * inv;
        }
    }
    let r = root.norm();
    let (mut scale, mut p) = (0.0, 1.0);
    for c in coeffs {
        scale += c.norm() * p;
        p *= r;
    }
    let resid = eval(coeffs, root).norm();
    let rel = if scale > 0.0 { resid / scale } else { 0.0 };
    (q, rel)
}

/// Roots of `Σ c_l z^l` as eigenvalues of the balanced companion matrix.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = energy(coeffs).sqrt();
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    if !(norm > 0.0) || lead.norm() < DEGENERATE_LEAD * norm {
        return Err(Error::Numerical("degenerate leading coefficient"));
    }
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 1000 * deg.max(10))
        .ok_or(Error::Numerical("eigenvalue iteration did not converge"))?;
    let ev = schur
        .eigenvalues()
        .ok_or(Error::Numerical("eigenvalues unavailable"))?;
    Ok(ev.iter().map(|&z| polish(coeffs, z)).collect())
}

// Double-double arithmetic, enough for an accurate residual in Newton steps.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from(v: f64) -> Self {
        Dd(v, 0.0)
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.0 + o.0;
        let bb = s - self.0;
        let e = (self.0 - (s - bb)) + (o.0 - bb) + self.1 + o.1;
        let hi = s + e;
        Dd(hi, e - (hi - s))
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.0 * b;
        let e = self.0.mul_add(b, -p) + self.1 * b;
        let hi = p + e;
        Dd(hi, e - (hi - p))
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

fn eval_dd(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let (mut re, mut im) = (Dd::from(0.0), Dd::from(0.0));
    for c in coeffs.iter().rev() {
        let nr = re.mul_f(z.re).add(im.mul_f(z.im).neg()).add(Dd::from(c.re));
        let ni = re.mul_f(z.im).add(im.mul_f(z.re)).add(Dd::from(c.im));
        re = nr;
        im = ni;
    }
    Complex64::new(re.value(), im.value())
}

fn derivative_at(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(ZERO, |acc, (i, &c)| acc * z + c * i as f64)
}

/// Newton refinement of an eigenvalue estimate against the original
/// coefficients, with the residual evaluated in double-double precision.
fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut res = eval_dd(coeffs, z).norm();
    for _ in 0..16 {
        if res == 0.0 {
            break;
        }
        let d = derivative_at(coeffs, z);
        if d.norm() == 0.0 {
            break;
        }
        let mut step = eval_dd(coeffs, z) / d;
        let mut accepted = false;
        for _ in 0..6 {
            let next = z - step;
            let r = eval_dd(coeffs, next).norm();
            if r < res {
                z = next;
                res = r;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    z
}

// Parlett-Reinsch diagonal similarity scaling with radix 2.
fn balance(m: &mut DMatrix<Complex64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= inv;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}
