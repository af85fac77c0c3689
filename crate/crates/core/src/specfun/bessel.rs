//! J_ν on the real half-line.
//!
//! Small arguments use the ascending series. Larger arguments use Steed's
//! method: the continued fraction for J'/J at order ν, downward recurrence to
//! an order μ ∈ [ν−⌊ν⌋..] with μ ≤ x, the complex continued fraction for
//! (J' + iY')/(J + iY) at μ, and the Wronskian to fix normalization. The
//! continued fraction needs ~x terms and its error grows with x, so very large
//! arguments switch to Hankel's asymptotic expansion.

use std::f64::consts::PI;

/// Largest argument handled by the power series.
pub(crate) const SERIES_MAX: f64 = 4.0;
/// Smallest argument for which the continued-fraction method is accurate.
pub(crate) const STEED_MIN: f64 = 2.0;

const EPS: f64 = 1e-16;
// One or two ulps around 1.
const CF_EPS: f64 = 4e-16;
const FPMIN: f64 = 1e-300;
const MAX_CF_ITER: usize = 10_000_000;

/// Values of J, J′, Y, Y′ at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cylinder {
    pub j: f64,
    pub jp: f64,
    pub y: f64,
    // Only the Wronskian check reads Y′.
    #[allow(dead_code)]
    pub yp: f64,
}

/// (J_ν(x), J′_ν(x)) from the ascending series.
pub(crate) fn series(nu: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        let j = if nu == 0.0 { 1.0 } else { 0.0 };
        let jp = if nu == 1.0 {
            0.5
        } else if nu > 0.0 && nu < 1.0 {
            f64::INFINITY
        } else {
            0.0
        };
        return (j, jp);
    }
    let half = 0.5 * x;
    let lead = if nu == 0.0 {
        1.0
    } else {
        half.powf(nu) / libm::tgamma(nu + 1.0)
    };
    let q = -half * half;
    let mut term = lead;
    let mut sum = term;
    let mut dsum = term * nu;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (nu + m));
        sum += term;
        dsum += term * (nu + 2.0 * m);
        if term.abs() <= EPS * 0.25 * sum.abs().max(FPMIN) && m > 2.0 {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    (sum, dsum / x)
}

/// Steed's method; requires x ≥ [`STEED_MIN`]. Returns `None` if a continued
/// fraction fails to converge (only for absurdly large x).
pub(crate) fn steed(nu: f64, x: f64) -> Option<Cylinder> {
    debug_assert!(x >= STEED_MIN);
    let nl = (nu - x + 1.5).floor().max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_ν / J_ν, modified Lentz.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAX_CF_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < CF_EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }

    // Downward recurrence from ν to μ on unnormalized values.
    let mut rjl = isign * 1e-30;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > 1e250 {
            rjl *= 1e-250;
            rjpl *= 1e-250;
            rjl1 *= 1e-250;
            rjp1 *= 1e-250;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq = (J' + iY')/(J + iY) at order μ, complex Lentz.
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    let mut converged = false;
    for i in 2..MAX_CF_ITER {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        let temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < CF_EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }

    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let mut rymu = rjmu * gam;
    // Y'_μ = Y_μ p + J_μ q avoids dividing by γ when Y_μ vanishes.
    let rymup = rymu * p + rjmu * q;
    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;

    let mut ry1 = xmu * xi * rymu - rymup;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Some(Cylinder {
        j,
        jp,
        y: rymu,
        yp: nu * xi * rymu - ry1,
    })
}

/// Arguments from which Hankel's expansion is used: its terms then shrink by
/// a factor ≥ 4 at first and reach 1e−17 well before they start to grow.
pub(crate) fn hankel_min(nu: f64) -> f64 {
    (2.0 * nu * nu).max(1000.0)
}

/// (J_ν(x), Y_ν(x)) from Hankel's expansion; accurate for x ≥ [`hankel_min`].
pub(crate) fn hankel(nu: f64, x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let (mut p, mut q) = (1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let t = term.abs();
        if t > prev {
            break;
        }
        prev = t;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if t < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// (J_ν(x), Y_ν(x)) for x ≥ [`STEED_MIN`].
pub(crate) fn jy(nu: f64, x: f64) -> Option<(f64, f64)> {
    if x >= hankel_min(nu) {
        Some(hankel(nu, x))
    } else {
        steed(nu, x).map(|c| (c.j, c.y))
    }
}

/// (J_ν(x), J′_ν(x)) picking the method by argument size.
pub(crate) fn j_jp(nu: f64, x: f64) -> Option<(f64, f64)> {
    if x <= SERIES_MAX {
        Some(series(nu, x))
    } else if x >= hankel_min(nu + 1.0) {
        let j = hankel(nu, x).0;
        let jp = if nu >= 1.0 {
            hankel(nu - 1.0, x).0 - nu / x * j
        } else {
            nu / x * j - hankel(nu + 1.0, x).0
        };
        Some((j, jp))
    } else {
        steed(nu, x).map(|c| (c.j, c.jp))
    }
}
