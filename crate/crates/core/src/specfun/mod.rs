//! Bessel functions of the first kind and their zeros.

mod bessel;
mod zeros;

use crate::{Error, Result};

pub use zeros::{MAX_DERIVATIVE_ZERO_INDEX, MAX_ORDER, MAX_ZERO_INDEX};

/// Order ν of a Bessel function; finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!("Bessel order must be finite and >= 0, got {nu}")));
        }
        Ok(Self(nu))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Index k ≥ 1 of a positive zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ZeroIndex(usize);

impl ZeroIndex {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Range("zero index starts at 1".into()));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("argument must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// J_ν(x).
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    let nu = BesselOrder::new(nu)?.get();
    check_argument(x)?;
    bessel::j_jp(nu, x)
        .map(|(j, _)| j)
        .ok_or_else(|| Error::NonConvergence(format!("J_{nu}({x}) continued fraction")))
}

/// J′_ν(x). At x = 0 the value is +∞ for 0 < ν < 1.
pub fn bessel_j_derivative(nu: f64, x: f64) -> Result<f64> {
    let nu = BesselOrder::new(nu)?.get();
    check_argument(x)?;
    bessel::j_jp(nu, x)
        .map(|(_, jp)| jp)
        .ok_or_else(|| Error::NonConvergence(format!("J'_{nu}({x}) continued fraction")))
}

/// j_{ν,k}, the k-th positive zero of J_ν. Supported: ν ≤ 60, k ≤ 10⁴.
pub fn bessel_j_zero(nu: f64, k: usize) -> Result<f64> {
    let nu = BesselOrder::new(nu)?;
    let k = ZeroIndex::new(k)?;
    zeros::j_zero(nu.get(), k.get())
}

/// j′_{ν,k}, the k-th positive zero of J′_ν (x = 0 never counted).
/// Supported: ν ≤ 60, k ≤ 10³.
pub fn bessel_j_prime_zero(nu: f64, k: usize) -> Result<f64> {
    let nu = BesselOrder::new(nu)?;
    let k = ZeroIndex::new(k)?;
    zeros::j_prime_zero(nu.get(), k.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Reference values from mpmath at 40 digits.
    const J_TABLE: &[(f64, f64, f64)] = &[
        (0.0, 1.0, 0.76519768655796655145),
        (0.0, 10.0, -0.2459357644513483352),
        (1.0, 10.0, 0.04347274616886143667),
        (0.0, 50.5, 0.095519891549700567084),
        (2.5, 3.7, 0.45685188411295336234),
        (0.5, 100.0, -0.040402132716252123744),
        (1.899, 7.3, -0.24435262014403498649),
        (10.0, 12.0, 0.30047603527126931073),
        (29.0, 45.0, -0.067267518002785445702),
        (59.0, 70.0, -0.12714878428315493243),
        (59.0, 200.0, -0.034285847980027841762),
        (60.0, 150.0, -0.027145903685787337656),
        (3.3, 199.9, 0.038454631478897244571),
        (0.001, 0.02, 0.99587983209694067265),
        (20.0, 3.0, 1.2275946737992986496e-15),
        (7.25, 30.0, 0.14625884619145923729),
        (0.0, 29.99, -0.087551353531463157109),
        (0.0, 30.01, -0.08517637273429246103),
        (45.0, 2.5, 1.8551607101524053396e-52),
        (1.0, 0.5, 0.24226845767487388638),
    ];

    #[test]
    fn matches_reference_values() {
        for &(nu, x, expect) in J_TABLE {
            let got = bessel_j(nu, x).unwrap();
            assert!((got - expect).abs() <= 1e-13, "J_{nu}({x}) = {got}, want {expect}");
        }
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-12);
        assert!(bessel_j(0.0, 2.404825557695773).unwrap().abs() < 1e-12);
    }

    #[test]
    fn half_integer_closed_form() {
        for i in 1..200 {
            let x = 0.37 * i as f64;
            let exact = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((bessel_j(0.5, x).unwrap() - exact).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn derivative_identity() {
        // J′_1 = J_0 − J_1/x and J′_0 = −J_1.
        for i in 1..120 {
            let x = 0.41 * i as f64;
            let j0 = bessel_j(0.0, x).unwrap();
            let j1 = bessel_j(1.0, x).unwrap();
            assert!((bessel_j_derivative(1.0, x).unwrap() - (j0 - j1 / x)).abs() < 1e-13);
            assert!((bessel_j_derivative(0.0, x).unwrap() + j1).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_negative_inputs() {
        assert!(matches!(bessel_j(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(f64::NAN, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j_zero(0.0, 0), Err(Error::Range(_))));
    }
}
