//! Causal emitter signals `λ(t)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Signal {
    /// Periodic pulse train with `periods` pulses over `base_period`. Within
    /// one period `[0, T/N)`: `sin(10Nt) exp(-15N²(t - T/(3N))²)`.
    LambdaN { periods: u32, base_period: f64 },
    /// Unit-area Gaussian `exp(-(t-center)²/(2 width²)) / (width √(2π))`,
    /// truncated to zero for `t < 0`.
    GaussianPulse { center: f64, width: f64 },
    Zero,
}

impl Signal {
    pub fn lambda_n(periods: u32, base_period: f64) -> Self {
        Signal::LambdaN {
            periods,
            base_period,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Signal::LambdaN {
                periods,
                base_period,
            } => {
                if *periods == 0 {
                    return Err(Error::field("signal.periods", "must be a positive integer"));
                }
                if !(*base_period > 0.0) {
                    return Err(Error::field("signal.base_period", "must be positive"));
                }
                Ok(())
            }
            Signal::GaussianPulse { width, .. } => {
                if *width > 0.0 {
                    Ok(())
                } else {
                    Err(Error::field("signal.width", "must be positive"))
                }
            }
            Signal::Zero => Ok(()),
        }
    }

    /// All supported signals vanish for `t < 0`.
    pub fn is_causal(&self) -> bool {
        true
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Signal::Zero)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Signal::LambdaN {
                periods,
                base_period,
            } => {
                let n = periods as f64;
                let period = base_period / n;
                let mut s = t % period;
                if s >= period {
                    s -= period;
                }
                let d = s - base_period / (3.0 * n);
                let envelope = (-15.0 * n * n * d * d).exp();
                if envelope == 0.0 {
                    return 0.0;
                }
                (10.0 * n * s).sin() * envelope
            }
            Signal::GaussianPulse { center, width } => {
                let d = (t - center) / width;
                (-0.5 * d * d).exp() / (width * (2.0 * PI).sqrt())
            }
            Signal::Zero => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn causal() {
        assert_eq!(Signal::lambda_n(1, 14.0).eval(-1.0), 0.0);
        assert_eq!(
            Signal::GaussianPulse {
                center: 0.0,
                width: 1.0
            }
            .eval(-1e-9),
            0.0
        );
    }

    #[test]
    fn lambda1_at_gaussian_peak() {
        let v = Signal::lambda_n(1, 14.0).eval(14.0 / 3.0);
        // 10·(14/3) and 140/3 differ in the last bit.
        assert!((v - (140.0f64 / 3.0).sin()).abs() < 1e-13);
    }

    #[test]
    fn lambda10_is_periodic() {
        let sig = Signal::lambda_n(10, 14.0);
        for k in 0..140 {
            let s = k as f64 * 0.01;
            let a = sig.eval(s);
            let b = sig.eval(s + 1.4);
            assert!((a - b).abs() < 1e-9, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Signal::lambda_n(0, 14.0).validate().is_err());
        assert!(Signal::lambda_n(3, -1.0).validate().is_err());
    }

    proptest! {
        #[test]
        fn lambda_n_bounded_by_one(n in 1u32..20, t in 0.0f64..50.0) {
            prop_assert!(Signal::lambda_n(n, 14.0).eval(t).abs() <= 1.0);
        }
    }
}
