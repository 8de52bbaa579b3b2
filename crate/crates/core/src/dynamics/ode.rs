//! Dormand–Prince 5(4) explicit Runge–Kutta with adaptive step size.
//!
//! Only autonomous systems `y' = f(y)` are needed here. The integrator stops
//! either at `t_max` or when the step callback asks it to.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub t: f64,
    pub y: Vec<f64>,
    /// `f(y)` at the final state.
    pub dydt: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// The step callback requested the stop (as opposed to reaching `t_max`).
    pub stopped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUnderflow {
    pub t: f64,
}

impl Dopri5 {
    /// Integrates from `t = 0`. `on_step(t, y, f(y))` runs once for the
    /// initial state and after every accepted step.
    pub fn integrate<F, C>(&self, y0: &[f64], t_max: f64, mut f: F, mut on_step: C) -> Result<Integration, StepUnderflow>
    where
        F: FnMut(&[f64], &mut [f64]),
        C: FnMut(f64, &[f64], &[f64]) -> StepControl,
    {
        let n = y0.len();
        let mut y = y0.to_vec();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut k5 = vec![0.0; n];
        let mut k6 = vec![0.0; n];
        let mut k7 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];

        let mut evaluations = 1;
        f(&y, &mut k1);
        let mut out = Integration {
            t: 0.0,
            y: Vec::new(),
            dydt: Vec::new(),
            accepted: 0,
            rejected: 0,
            evaluations: 0,
            stopped: false,
        };
        if on_step(0.0, &y, &k1) == StepControl::Stop {
            out.y = y;
            out.dydt = k1;
            out.evaluations = evaluations;
            out.stopped = true;
            return Ok(out);
        }

        let mut t = 0.0;
        let mut h = self.initial_step(&y, &k1).min(self.max_step).min(t_max.max(0.0));
        while t < t_max {
            let remaining = t_max - t;
            if remaining <= self.min_step {
                break;
            }
            h = h.min(remaining);
            if h < self.min_step {
                return Err(StepUnderflow { t });
            }

            for i in 0..n {
                tmp[i] = y[i] + h * A21 * k1[i];
            }
            f(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            f(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(&tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(&tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(&tmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            f(&y_new, &mut k7);
            evaluations += 6;

            let mut err = 0.0;
            for i in 0..n {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
                err += (e / scale) * (e / scale);
            }
            let err = (err / n.max(1) as f64).sqrt();

            if err <= 1.0 {
                t += h;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                out.accepted += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * factor).min(self.max_step);
                if on_step(t, &y, &k1) == StepControl::Stop {
                    out.stopped = true;
                    break;
                }
            } else {
                out.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }

        out.t = t;
        out.y = y;
        out.dydt = k1;
        out.evaluations = evaluations;
        Ok(out)
    }

    fn initial_step(&self, y: &[f64], f0: &[f64]) -> f64 {
        let scale = |i: usize| self.abs_tol + self.rel_tol * y[i].abs();
        let n = y.len().max(1) as f64;
        let d0 = (y.iter().enumerate().map(|(i, v)| (v / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (f0.iter().enumerate().map(|(i, v)| (v / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
        if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            (0.01 * d0 / d1).max(1e-6)
        }
    }
}
