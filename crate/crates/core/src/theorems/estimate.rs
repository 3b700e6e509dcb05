use std::ops::{Add, Div, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A value with an absolute error bound, propagated to first order plus the
/// cross term for products.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self {
            value,
            error: error.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn powi(self, n: i32) -> Self {
        (1..n).fold(self, |acc, _| acc * self)
    }
}

impl From<f64> for Estimate {
    fn from(value: f64) -> Self {
        Self::exact(value)
    }
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error + o.error)
    }
}

impl Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate::new(self.value - o.value, self.error + o.error)
    }
}

impl Mul for Estimate {
    type Output = Estimate;
    fn mul(self, o: Estimate) -> Estimate {
        Estimate::new(
            self.value * o.value,
            self.value.abs() * o.error + o.value.abs() * self.error + self.error * o.error,
        )
    }
}

impl Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, c: f64) -> Estimate {
        Estimate::new(self.value * c, self.error * c.abs())
    }
}

impl Mul<Estimate> for f64 {
    type Output = Estimate;
    fn mul(self, e: Estimate) -> Estimate {
        e * self
    }
}

impl Div<f64> for Estimate {
    type Output = Estimate;
    fn div(self, c: f64) -> Estimate {
        Estimate::new(self.value / c, self.error / c.abs())
    }
}
