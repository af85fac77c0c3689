//! Zeros of J_ν and J′_ν.
//!
//! Write J_ν = M cos θ, Y_ν = M sin θ with θ continuous and θ(0+) = −π/2.
//! θ is increasing, and the k-th zero of J_ν sits at θ = (k − ½)π. For
//! x ≥ max(2ν, 10) the leading Debye phase √(x²−ν²) − ν·arccos(ν/x) − π/4 is
//! within a small fraction of π of θ, which pins the branch of atan2(Y, J)
//! and therefore the index of any zero found there. Below that point zeros
//! are counted directly by a unit-step sign scan (consecutive zeros are more
//! than 2.4 apart for every supported order).

use std::f64::consts::PI;

use super::bessel;
use crate::{Error, Result};

pub const MAX_ORDER: f64 = 60.0;
pub const MAX_ZERO_INDEX: usize = 10_000;
pub const MAX_DERIVATIVE_ZERO_INDEX: usize = 1_000;

const BISECT_WIDTH: f64 = 1e-8;
const NEWTON_CAP: usize = 50;

fn j_jp(nu: f64, x: f64) -> Result<(f64, f64)> {
    bessel::j_jp(nu, x).ok_or_else(|| Error::NonConvergence(format!("J_{nu}({x})")))
}

fn debye_phase(nu: f64, x: f64) -> f64 {
    (x * x - nu * nu).sqrt() - nu * (nu / x).acos() - PI / 4.0
}

fn phase_floor(nu: f64) -> f64 {
    (2.0 * nu).max(10.0)
}

/// Continuous phase θ(x); requires x ≥ [`phase_floor`].
fn phase(nu: f64, x: f64) -> Result<f64> {
    let (j, y) = bessel::jy(nu, x).ok_or_else(|| Error::NonConvergence(format!("phase at {x}")))?;
    let raw = y.atan2(j);
    let turns = ((debye_phase(nu, x) - raw) / (2.0 * PI)).round();
    Ok(raw + 2.0 * PI * turns)
}

/// Number of zeros of J_ν in (0, x] for x ≥ [`phase_floor`].
fn zero_count(nu: f64, x: f64) -> Result<usize> {
    Ok((phase(nu, x)? / PI + 0.5).floor().max(0.0) as usize)
}

fn check_range(nu: f64, k: usize, k_max: usize) -> Result<()> {
    if nu > MAX_ORDER || k > k_max {
        return Err(Error::Range(format!(
            "zero (nu = {nu}, k = {k}) outside nu <= {MAX_ORDER}, k <= {k_max}"
        )));
    }
    Ok(())
}

/// Safeguarded root refinement on a sign-change bracket: bisection down to
/// width 1e−8, Newton with the analytic derivative, bisection fallback.
fn refine<F>(f: F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let mut fa = f(a)?.0;
    let fb = f(b)?.0;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NonConvergence(format!("no sign change on [{a}, {b}]")));
    }
    while b - a > BISECT_WIDTH {
        let m = 0.5 * (a + b);
        let fm = f(m)?.0;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..NEWTON_CAP {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        let next = x - fx / dfx;
        if !next.is_finite() || next < a || next > b {
            break;
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
    }

    // Newton misbehaved; finish by bisection.
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?.0;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bracket of the k-th sign change of `f` scanning upward from `start` in
/// unit steps.
fn scan_bracket<F>(f: F, start: f64, k: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut a = start;
    let mut fa = f(a)?;
    let mut found = 0;
    loop {
        let b = a + 1.0;
        let fb = f(b)?;
        if fb == 0.0 || fa.signum() != fb.signum() {
            found += 1;
            if found == k {
                return Ok((a, b));
            }
        }
        a = b;
        fa = if fb == 0.0 { -fa } else { fb };
    }
}

/// Solves debye_phase(x) = target for x > ν by Newton from the McMahon guess.
fn debye_inverse(nu: f64, target: f64, guess: f64) -> f64 {
    let mut x = guess.max(nu + 1.0);
    for _ in 0..100 {
        let g = debye_phase(nu, x) - target;
        let dg = (x * x - nu * nu).sqrt() / x;
        let next = (x - g / dg).max(0.5 * (x + nu));
        if (next - x).abs() <= 1e-14 * x {
            return next;
        }
        x = next;
    }
    x
}

pub(super) fn j_zero(nu: f64, k: usize) -> Result<f64> {
    check_range(nu, k, MAX_ZERO_INDEX)?;
    let fj = |x: f64| j_jp(nu, x);
    let floor = phase_floor(nu);
    let below = zero_count(nu, floor)?;
    if k <= below {
        // J_ν > 0 on (0, ν], so the scan may start at ν.
        let (a, b) = scan_bracket(|x| Ok(j_jp(nu, x)?.0), nu, k)?;
        return refine(fj, a, b);
    }

    let mcmahon = (k as f64 + 0.5 * nu - 0.25) * PI;
    let est = debye_inverse(nu, (k as f64 - 0.5) * PI, mcmahon);
    let mut half_width = 0.5;
    let (a, b) = loop {
        let (a, b) = (est - half_width, est + half_width);
        let (fa, fb) = (j_jp(nu, a)?.0, j_jp(nu, b)?.0);
        if fa.signum() != fb.signum() || fa == 0.0 || fb == 0.0 {
            break (a, b);
        }
        half_width += 0.25;
        if half_width > 1.5 {
            return Err(Error::NonConvergence(format!(
                "no bracket near Debye estimate {est} for j_{{{nu},{k}}}"
            )));
        }
    };
    let z = refine(fj, a, b)?;
    let index = (phase(nu, z)? / PI + 0.5).round() as usize;
    if index != k {
        return Err(Error::NonConvergence(format!(
            "zero near {z} has index {index}, wanted {k} (nu = {nu})"
        )));
    }
    Ok(z)
}

pub(super) fn j_prime_zero(nu: f64, k: usize) -> Result<f64> {
    check_range(nu, k, MAX_DERIVATIVE_ZERO_INDEX)?;
    if nu == 0.0 {
        // J′₀ = −J₁.
        return j_zero(1.0, k);
    }
    // Interlacing: ν < j′_{ν,1} < j_{ν,1} < j′_{ν,2} < j_{ν,2} < …
    let lo = if k == 1 { nu } else { j_zero(nu, k - 1)? };
    let hi = j_zero(nu, k)?;
    let f = |x: f64| {
        let (j, jp) = j_jp(nu, x)?;
        let jpp = -jp / x - (1.0 - nu * nu / (x * x)) * j;
        Ok((jp, jpp))
    };
    refine(f, lo, hi)
}
