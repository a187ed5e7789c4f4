//! Dormand-Prince 5(4) integrator with embedded error control and
//! landing on level sets of a monotone event function.

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use crate::{GeoError, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, x: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Zero selects the step automatically.
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rel_tol: 1e-10, abs_tol: 1e-12, initial_step: 0.0, max_step: f64::INFINITY, max_steps: 200_000 }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(GeoError::domain("integrator tolerances must be positive"));
        }
        if !(self.max_step > 0.0) || self.initial_step < 0.0 || self.max_steps == 0 {
            return Err(GeoError::domain("invalid step limits"));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Trial<const N: usize> {
    y: [f64; N],
    dy: [f64; N],
    err: f64,
}

pub struct DormandPrince<'a, S, const N: usize> {
    sys: &'a S,
    ctrl: StepControl,
    x: f64,
    y: [f64; N],
    dy: [f64; N],
    h: f64,
    steps: usize,
}

impl<'a, S: OdeSystem<N>, const N: usize> DormandPrince<'a, S, N> {
    pub fn new(sys: &'a S, x0: f64, y0: [f64; N], ctrl: StepControl) -> Result<Self> {
        ctrl.validate()?;
        let dy = sys.rhs(x0, &y0)?;
        let mut me = DormandPrince { sys, ctrl, x: x0, y: y0, dy, h: ctrl.initial_step, steps: 0 };
        if me.h == 0.0 {
            me.h = me.initial_step()?;
        }
        me.h = me.h.min(ctrl.max_step);
        Ok(me)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn dy(&self) -> &[f64; N] {
        &self.dy
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.ctrl.abs_tol + self.ctrl.rel_tol * a.abs().max(b.abs())
    }

    fn norm(&self, v: &[f64; N], reference: &[f64; N]) -> f64 {
        let sum: f64 = v
            .iter()
            .zip(reference)
            .map(|(v, r)| {
                let q = v / self.scale(*r, *r);
                q * q
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    // Hairer-Norsett-Wanner starting step heuristic.
    fn initial_step(&self) -> Result<f64> {
        let d0 = self.norm(&self.y, &self.y);
        let d1 = self.norm(&self.dy, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let mut y1 = self.y;
        for i in 0..N {
            y1[i] += h0 * self.dy[i];
        }
        let f1 = self.sys.rhs(self.x + h0, &y1)?;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.dy[i];
        }
        let d2 = self.norm(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        Ok((100.0 * h0).min(h1))
    }

    fn trial(&self, h: f64) -> Result<Trial<N>> {
        let mut k = [[0.0; N]; 7];
        k[0] = self.dy;
        for s in 1..7 {
            let mut ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = self.sys.rhs(self.x + C[s] * h, &ys)?;
        }
        // Stage 7 is evaluated at the fifth-order solution (FSAL).
        let mut y_new = self.y;
        for (j, kj) in k.iter().enumerate().take(6) {
            for i in 0..N {
                y_new[i] += h * A[6][j] * kj[i];
            }
        }
        let mut err_vec = [0.0; N];
        for (j, kj) in k.iter().enumerate() {
            for i in 0..N {
                err_vec[i] += h * E[j] * kj[i];
            }
        }
        let mut sum = 0.0;
        for i in 0..N {
            let q = err_vec[i] / self.scale(self.y[i], y_new[i]);
            sum += q * q;
        }
        Ok(Trial { y: y_new, dy: k[6], err: (sum / N as f64).sqrt() })
    }

    /// Takes one accepted step that does not pass `x_limit`. Returns the step size used.
    pub fn step(&mut self, x_limit: f64) -> Result<f64> {
        if self.x >= x_limit {
            return Ok(0.0);
        }
        if x_limit - self.x <= 16.0 * f64::EPSILON * self.x.abs().max(1.0) {
            self.x = x_limit;
            return Ok(0.0);
        }
        loop {
            self.steps += 1;
            if self.steps > self.ctrl.max_steps {
                return Err(GeoError::Integration { tau: self.x, reason: "step budget exhausted" });
            }
            let h = self.h.min(x_limit - self.x).min(self.ctrl.max_step);
            if h <= 16.0 * f64::EPSILON * self.x.abs().max(1.0) {
                return Err(GeoError::Integration { tau: self.x, reason: "step size underflow" });
            }
            let trial = match self.trial(h) {
                Ok(t) if t.err.is_finite() && t.y.iter().all(|v| v.is_finite()) => t,
                // A rejected evaluation (e.g. leaving the state domain) shrinks the step.
                _ => {
                    self.h = 0.25 * h;
                    continue;
                }
            };
            let factor = if trial.err == 0.0 { 5.0 } else { (0.9 * trial.err.powf(-0.2)).clamp(0.2, 5.0) };
            if trial.err <= 1.0 {
                self.x += h;
                self.y = trial.y;
                self.dy = trial.dy;
                if h == self.h.min(self.ctrl.max_step) || factor < 1.0 {
                    self.h = h * factor;
                }
                return Ok(h);
            }
            self.h = h * factor.min(1.0);
        }
    }

    /// Integrates until the monotone event function `g` reaches `target`, landing
    /// on it to within `tol`; fails if `x_limit` is reached first.
    pub fn advance_to_level<G>(&mut self, g: G, target: f64, tol: f64, x_limit: f64) -> Result<()>
    where
        G: Fn(f64, &[f64; N]) -> f64,
    {
        let mut g0 = g(self.x, &self.y) - target;
        if g0.abs() <= tol {
            return Ok(());
        }
        if g0 > 0.0 {
            return Err(GeoError::domain("event level already passed"));
        }
        loop {
            let (x_prev, y_prev, dy_prev) = (self.x, self.y, self.dy);
            let h = self.step(x_limit)?;
            if h == 0.0 {
                return Err(GeoError::Integration { tau: self.x, reason: "event level not reached" });
            }
            let g1 = g(self.x, &self.y) - target;
            if g1.abs() <= tol {
                return Ok(());
            }
            if g1 < 0.0 {
                g0 = g1;
                continue;
            }
            // Bracketed: Illinois iteration on the step length from the previous state.
            self.x = x_prev;
            self.y = y_prev;
            self.dy = dy_prev;
            let (mut lo, mut glo, mut hi, mut ghi) = (0.0, g0, h, g1);
            let mut side = 0i8;
            let mut best = None;
            for _ in 0..200 {
                let hm = if glo != ghi { lo - glo * (hi - lo) / (ghi - glo) } else { 0.5 * (lo + hi) };
                let hm = if hm <= lo || hm >= hi { 0.5 * (lo + hi) } else { hm };
                let t = self.trial(hm)?;
                let gm = g(x_prev + hm, &t.y) - target;
                best = Some((hm, t));
                if gm.abs() <= tol || (hi - lo) <= 4.0 * f64::EPSILON * hi {
                    break;
                }
                if gm < 0.0 {
                    lo = hm;
                    glo = gm;
                    if side == -1 {
                        ghi *= 0.5;
                    }
                    side = -1;
                } else {
                    hi = hm;
                    ghi = gm;
                    if side == 1 {
                        glo *= 0.5;
                    }
                    side = 1;
                }
            }
            let (hm, t) = best.ok_or(GeoError::Root("event landing"))?;
            self.x = x_prev + hm;
            self.y = t.y;
            self.dy = t.dy;
            return Ok(());
        }
    }
}
