//! Small numerical kernels shared by the geometry modules: adaptive
//! Gauss-Kronrod quadrature, Gauss-Legendre rules, an embedded Runge-Kutta
//! integrator with event landing, bracketed root finding and weighted least
//! squares.

pub mod fd;
pub mod lstsq;
pub mod ode;
pub mod quadrature;
pub mod roots;

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, p: usize) -> f64 {
    if p > n {
        return 0.0;
    }
    let p = p.min(n - p);
    let mut acc = 1.0;
    for i in 0..p {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Deterministic splitmix64 stream used for sample directions.
#[derive(Debug, Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
