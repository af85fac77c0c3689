//! Closed-form bounds on the monotonicity constant α_{k,d} and on Neumann
//! eigenvalues of convex domains.
//!
//! Ratios are dimensionless. `kroger_upper` and `payne_weinberger_lower`
//! bound eigenvalues directly and therefore take the diameter `D`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::specfun::bessel_j_zero;
use crate::{Error, Result};

pub const MAX_DIMENSION: usize = 120;
/// Largest k accepted for the d = 2 lower bound.
pub const MAX_K_PLANAR_LOWER: usize = 1_000;

const PI2: f64 = PI * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantName {
    #[serde(rename = "alpha1_sharp")]
    Alpha1Sharp,
    #[serde(rename = "alpha1_simple")]
    Alpha1Simple,
    FunanoLower,
    KrogerUpper,
    CUpper,
    #[serde(rename = "alpha_k2_lower")]
    AlphaK2Lower,
    #[serde(rename = "alpha_2d_lower")]
    Alpha2dLower,
    PolyaBound,
    PayneWeinbergerLower,
}

impl ConstantName {
    pub const ALL: [ConstantName; 9] = [
        Self::Alpha1Sharp,
        Self::Alpha1Simple,
        Self::FunanoLower,
        Self::KrogerUpper,
        Self::CUpper,
        Self::AlphaK2Lower,
        Self::Alpha2dLower,
        Self::PolyaBound,
        Self::PayneWeinbergerLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Alpha1Sharp => "alpha1_sharp",
            Self::Alpha1Simple => "alpha1_simple",
            Self::FunanoLower => "funano_lower",
            Self::KrogerUpper => "kroger_upper",
            Self::CUpper => "c_upper",
            Self::AlphaK2Lower => "alpha_k2_lower",
            Self::Alpha2dLower => "alpha_2d_lower",
            Self::PolyaBound => "polya_bound",
            Self::PayneWeinbergerLower => "payne_weinberger_lower",
        }
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One named bound with its indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRecord {
    pub name: ConstantName,
    pub k: usize,
    pub d: usize,
    pub value: f64,
    pub formula: String,
}

fn check_dimension(d: usize) -> Result<()> {
    if !(2..=MAX_DIMENSION).contains(&d) {
        return Err(Error::Range(format!("dimension {d} outside [2, {MAX_DIMENSION}]")));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Range("eigenvalue index k must be >= 1".into()));
    }
    Ok(())
}

fn check_length(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

/// Bessel order ν = d/2 − 1 attached to dimension d.
pub fn bessel_order(d: usize) -> f64 {
    d as f64 / 2.0 - 1.0
}

/// π²/(4 j²_{d/2−1,1}), the sharp value of α_{1,d}.
pub fn alpha1_sharp(d: usize) -> Result<f64> {
    check_dimension(d)?;
    let j = bessel_j_zero(bessel_order(d), 1)?;
    Ok(PI2 / (4.0 * j * j))
}

/// π²/(2d(d+4)).
pub fn alpha1_simple(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Range(format!("dimension {d} < 2")));
    }
    let d = d as f64;
    Ok(PI2 / (2.0 * d * (d + 4.0)))
}

/// Universal constant 1/92² divided by d².
pub fn funano_lower(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Range(format!("dimension {d} < 2")));
    }
    let d = d as f64;
    Ok(1.0 / (92.0 * 92.0) / (d * d))
}

/// π²/D², the lower bound on μ₁ of a convex domain of diameter D.
pub fn payne_weinberger_lower(diameter: f64) -> Result<f64> {
    check_length("diameter", diameter)?;
    Ok(PI2 / (diameter * diameter))
}

/// Upper bound on μ_k for a convex domain of diameter D in dimension d.
pub fn kroger_upper(k: usize, d: usize, diameter: f64) -> Result<f64> {
    check_k(k)?;
    check_dimension(d)?;
    check_length("diameter", diameter)?;
    let nu = bessel_order(d);
    let root = if d == 2 {
        2.0 * bessel_j_zero(0.0, 1)? + PI * (k as f64 - 1.0)
    } else if k % 2 == 1 {
        2.0 * bessel_j_zero(nu, k.div_ceil(2))?
    } else {
        bessel_j_zero(nu, k / 2)? + bessel_j_zero(nu, k / 2 + 1)?
    };
    Ok(root * root / (diameter * diameter))
}

/// c(k,d) = (π²k²/D²)/kroger_upper(k,d,D), the upper bound on α_{k,d}.
pub fn c_upper(k: usize, d: usize) -> Result<f64> {
    let k2 = (k * k) as f64;
    Ok(PI2 * k2 / kroger_upper(k, d, 1.0)?)
}

/// The two non-sharp lower bounds: α_{k,2} for any k ≤ 10³ and α_{2,d} for
/// d ≥ 3. Other (k, d) have no formula.
pub fn alpha_lower_nonsharp(k: usize, d: usize) -> Result<f64> {
    check_k(k)?;
    check_dimension(d)?;
    if d == 2 {
        if k > MAX_K_PLANAR_LOWER {
            return Err(Error::Range(format!("k = {k} > {MAX_K_PLANAR_LOWER}")));
        }
        let s = 2.0 * bessel_j_zero(0.0, 1)? + (k as f64 - 1.0) * PI;
        Ok(PI2 / (s * s))
    } else if k == 2 {
        let nu = bessel_order(d);
        let s = bessel_j_zero(nu, 1)? + bessel_j_zero(nu, 2)?;
        Ok(PI2 / (s * s))
    } else {
        Err(Error::Unsupported(format!(
            "no lower bound for alpha_{{{k},{d}}}: only d = 2 or k = 2"
        )))
    }
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    (half * PI.ln() - libm::lgamma(half + 1.0)).exp()
}

/// 4π² k^{2/d} / ω_d^{2/d}.
pub fn polya_bound(k: usize, d: usize) -> Result<f64> {
    check_k(k)?;
    if d < 2 {
        return Err(Error::Range(format!("dimension {d} < 2")));
    }
    let e = 2.0 / d as f64;
    let omega = if d == 2 { PI } else { unit_ball_volume(d) };
    Ok(4.0 * PI2 * (k as f64).powf(e) / omega.powf(e))
}

/// Uniform-in-d envelope for c(k,d)·d² over d ∈ [3, 120]:
/// max_d (πk·d / (d − 3 + (k+1)π))².
pub fn c_upper_d2_envelope(k: usize) -> f64 {
    let kf = k as f64;
    (3..=MAX_DIMENSION)
        .map(|d| {
            let df = d as f64;
            let r = PI * kf * df / (df - 3.0 + (kf + 1.0) * PI);
            r * r
        })
        .fold(0.0, f64::max)
}

/// Every constant on the grid k ≤ k_max, 2 ≤ d ≤ d_max, sorted by
/// (name, k, d). Diameter-carrying bounds are evaluated at D = 2.
pub fn emit_constant_table(k_max: usize, d_max: usize) -> Result<Vec<ConstantRecord>> {
    check_k(k_max)?;
    check_dimension(d_max)?;
    const D: f64 = 2.0;
    let mut out = Vec::new();
    let mut push = |name, k, d, value, formula: &str| {
        out.push(ConstantRecord { name, k, d, value, formula: formula.to_string() })
    };
    for d in 2..=d_max {
        push(ConstantName::Alpha1Sharp, 1, d, alpha1_sharp(d)?, "pi^2/(4 j_{d/2-1,1}^2)");
        push(ConstantName::Alpha1Simple, 1, d, alpha1_simple(d)?, "pi^2/(2 d (d+4))");
        push(ConstantName::FunanoLower, 1, d, funano_lower(d)?, "(1/92^2)/d^2");
        push(ConstantName::PayneWeinbergerLower, 1, d, payne_weinberger_lower(D)?, "pi^2/D^2, D=2");
        for k in 1..=k_max {
            let kroger = if d == 2 {
                "(2 j_{0,1} + pi (k-1))^2/D^2, D=2"
            } else if k % 2 == 1 {
                "4 j_{d/2-1,(k+1)/2}^2/D^2, D=2"
            } else {
                "(j_{d/2-1,k/2} + j_{d/2-1,k/2+1})^2/D^2, D=2"
            };
            push(ConstantName::KrogerUpper, k, d, kroger_upper(k, d, D)?, kroger);
            push(ConstantName::CUpper, k, d, c_upper(k, d)?, "pi^2 k^2 / (D^2 kroger_upper)");
            push(ConstantName::PolyaBound, k, d, polya_bound(k, d)?, "4 pi^2 k^(2/d) / omega_d^(2/d)");
            if d == 2 {
                push(ConstantName::AlphaK2Lower, k, d, alpha_lower_nonsharp(k, d)?, "pi^2/(2 j_{0,1} + (k-1) pi)^2");
            }
            if k == 2 && d >= 3 {
                push(ConstantName::Alpha2dLower, k, d, alpha_lower_nonsharp(k, d)?, "pi^2/(j_{(d-2)/2,1} + j_{(d-2)/2,2})^2");
            }
        }
    }
    out.sort_by(|a, b| (a.name.as_str(), a.k, a.d).cmp(&(b.name.as_str(), b.k, b.d)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha1_examples() {
        let a2 = alpha1_sharp(2).unwrap();
        assert!((a2 - 0.427).abs() < 0.001);
        assert!((alpha1_sharp(3).unwrap() - 0.25).abs() < 1e-12);
        let d = 100.0;
        let a = alpha1_sharp(100).unwrap();
        assert!((a - PI2 / (d * d)).abs() <= 5e3 / (d * d * d));
        assert!(matches!(alpha1_sharp(1), Err(Error::Range(_))));
    }

    #[test]
    fn simple_and_funano() {
        assert!((alpha1_simple(2).unwrap() - PI2 / 24.0).abs() < 1e-15);
        assert!((alpha1_simple(3).unwrap() - PI2 / 42.0).abs() < 1e-15);
        assert!((funano_lower(2).unwrap() * 33856.0 - 1.0).abs() < 1e-15);
        assert!((funano_lower(3).unwrap() * 76176.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn payne_weinberger_examples() {
        assert!((payne_weinberger_lower(2.0).unwrap() - 2.4674011002723395).abs() < 1e-15);
        assert_eq!(payne_weinberger_lower(1.0).unwrap(), PI2);
        assert!((payne_weinberger_lower(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!(payne_weinberger_lower(0.0).is_err());
    }

    #[test]
    fn kroger_examples() {
        let j = bessel_j_zero(0.0, 1).unwrap();
        assert!((kroger_upper(1, 2, 2.0).unwrap() - j * j).abs() < 1e-14);
        for k in (1..=15).step_by(2) {
            let want = PI2 * ((k + 1) * (k + 1)) as f64 / 9.0;
            let got = kroger_upper(k, 3, 3.0).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "k={k}");
        }
        for d in 2..=12 {
            let lhs = alpha1_sharp(d).unwrap();
            let rhs = PI2 / (1.7 * 1.7 * kroger_upper(1, d, 1.7).unwrap());
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn c_upper_examples() {
        for k in 1..=20 {
            let want = (k * k) as f64 / ((k + 1) * (k + 1)) as f64;
            assert!((c_upper(k, 3).unwrap() - want).abs() < 1e-12);
        }
        assert!((c_upper(1, 2).unwrap() - alpha1_sharp(2).unwrap()).abs() < 1e-15);
        assert!(c_upper(7, 5).unwrap() < 1.0);
    }

    #[test]
    fn nonsharp_examples() {
        assert!((alpha_lower_nonsharp(1, 2).unwrap() - alpha1_sharp(2).unwrap()).abs() < 1e-15);
        assert!((alpha_lower_nonsharp(2, 3).unwrap() - 1.0 / 9.0).abs() < 1e-14);
        let v = alpha_lower_nonsharp(5, 2).unwrap();
        assert!((v - 0.0327).abs() < 1e-4);
        let j = bessel_j_zero(0.0, 1).unwrap();
        assert!((v - PI2 / (2.0 * j + 4.0 * PI).powi(2)).abs() < 1e-15);
        assert!(matches!(alpha_lower_nonsharp(3, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn polya_examples() {
        for k in 1..50 {
            let v = polya_bound(k, 2).unwrap();
            assert!((v - 4.0 * PI * k as f64).abs() < 1e-12 * v);
            assert!((polya_bound(2 * k, 2).unwrap() - 2.0 * v).abs() < 1e-12 * v);
        }
        let want = 4.0 * PI2 / (4.0 * PI / 3.0f64).powf(2.0 / 3.0);
        assert!((polya_bound(1, 3).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn table_examples() {
        let t = emit_constant_table(1, 3).unwrap();
        let r = t
            .iter()
            .find(|r| r.name == ConstantName::Alpha1Sharp && r.k == 1 && r.d == 3)
            .unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
        let r = t
            .iter()
            .find(|r| r.name == ConstantName::Alpha1Sharp && r.d == 2)
            .unwrap();
        assert!((r.value - 0.427).abs() < 1e-3);
        let t = emit_constant_table(2, 2).unwrap();
        assert!(t.iter().filter(|r| r.name == ConstantName::CUpper).all(|r| r.value < 1.0));
        let keys: Vec<_> = t.iter().map(|r| (r.name.as_str(), r.k, r.d)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
