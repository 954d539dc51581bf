//! Small float helpers shared across modules (`no_std`, so math goes
//! through `libm`).

/// Exact power of two as a float. Exact for `e <= 1023`.
pub fn pow2(e: u32) -> f64 {
    libm::exp2(e as f64)
}

pub fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

pub fn fabs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Compensated (Kahan) summation accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
