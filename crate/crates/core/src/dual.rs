//! Forward-mode dual numbers carrying two partial derivatives.

use std::ops::{Add, Mul, Sub};

pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn constant(v: f64) -> Self;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dual2 {
    pub v: f64,
    pub d: [f64; 2],
}

impl Dual2 {
    pub fn variable(v: f64, slot: usize) -> Self {
        let mut d = [0.0; 2];
        d[slot] = 1.0;
        Self { v, d }
    }
}

impl Add for Dual2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1]],
        }
    }
}

impl Sub for Dual2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            v: self.v - o.v,
            d: [self.d[0] - o.d[0], self.d[1] - o.d[1]],
        }
    }
}

impl Mul for Dual2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
            ],
        }
    }
}

impl Mul<f64> for Dual2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            v: self.v * s,
            d: [self.d[0] * s, self.d[1] * s],
        }
    }
}

impl Scalar for Dual2 {
    fn constant(v: f64) -> Self {
        Self { v, d: [0.0; 2] }
    }

    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        let k = 0.5 / r;
        Self {
            v: r,
            d: [self.d[0] * k, self.d[1] * k],
        }
    }
}
