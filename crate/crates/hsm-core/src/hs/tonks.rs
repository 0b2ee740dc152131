//! Closed-form partition function of the one-dimensional gas.

use crate::error::{Error, Result};

/// Exact grand-canonical partition function of hard rods of unit length
/// with fugacity `lambda` in a segment of length `ell`:
///
/// `Z = 1 + sum_k lambda^k (ell - (k-1))^k / k!`
///
/// summed while `ell - (k-1) > 0`. Serves as the ground truth the
/// one-dimensional grid estimates converge to.
pub fn tonks_gas_z(ell: f64, lambda: f64) -> Result<f64> {
    if !(ell.is_finite() && ell > 0.0) {
        return Err(Error::Validation(format!(
            "segment length must be positive, got {ell}"
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Validation(format!(
            "fugacity must be positive, got {lambda}"
        )));
    }
    let mut z = 1.0;
    let mut k = 1u32;
    let mut factorial = 1.0;
    loop {
        let free = ell - (k - 1) as f64;
        if free <= 0.0 {
            break;
        }
        factorial *= k as f64;
        z += lambda.powi(k as i32) * free.powi(k as i32) / factorial;
        if !z.is_finite() {
            return Err(Error::Overflow("rod-gas partition function"));
        }
        k += 1;
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_segments() {
        // ell <= 1: at most one rod fits, Z = 1 + lambda ell.
        assert_eq!(tonks_gas_z(1.0, 2.0).unwrap(), 3.0);
        assert!((tonks_gas_z(0.5, 1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn unit_fugacity_length_four() {
        // 1 + 4 + 9/2 + 8/6 + 1/24 = 10.875.
        let z = tonks_gas_z(4.0, 1.0).unwrap();
        assert!((z - 10.875).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_lambda_and_length() {
        assert!(tonks_gas_z(4.0, 1.1).unwrap() > tonks_gas_z(4.0, 1.0).unwrap());
        assert!(tonks_gas_z(5.0, 1.0).unwrap() > tonks_gas_z(4.0, 1.0).unwrap());
        assert!(tonks_gas_z(-1.0, 1.0).is_err());
    }
}
