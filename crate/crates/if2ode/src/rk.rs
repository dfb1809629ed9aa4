//! Adaptive embedded Runge-Kutta 4(5) stepper with dense output.
//!
//! One stepper core serves two independent right-hand sides: the scalar
//! Riccati equation driving the general factor route, and the first-order
//! system used by the reference integrator in [`crate::verify`]. State is a
//! small fixed-size array of complex numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 200_000;
const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Stepper options. `guard` aborts with `SingularityDetected` as soon as any
/// state component exceeds it in magnitude.
#[derive(Debug, Clone, Copy)]
pub struct StepperOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub guard: Option<f64>,
}

impl Default for StepperOptions {
    fn default() -> Self {
        StepperOptions { abs_tol: 1e-10, rel_tol: 1e-10, guard: None }
    }
}

/// Accepted-step trajectory with cubic Hermite interpolation between knots.
#[derive(Debug, Clone)]
pub struct DenseOutput<const N: usize> {
    ts: Vec<f64>,
    ys: Vec<[Complex64; N]>,
    derivs: Vec<[Complex64; N]>,
}

impl<const N: usize> DenseOutput<N> {
    pub fn start(&self) -> f64 {
        self.ts[0]
    }

    pub fn end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// Interpolate the trajectory at `t` (clamped to the covered span).
    pub fn eval(&self, t: f64) -> [Complex64; N] {
        let (lo, hi) = if self.start() <= self.end() {
            (self.start(), self.end())
        } else {
            (self.end(), self.start())
        };
        let t = t.clamp(lo, hi);
        let forward = self.start() <= self.end();
        // locate the knot segment containing t
        let idx = if forward {
            self.ts.partition_point(|&ti| ti <= t)
        } else {
            self.ts.partition_point(|&ti| ti >= t)
        };
        if idx > 0 && self.ts[idx - 1] == t {
            return self.ys[idx - 1];
        }
        let seg = idx - 1;
        let (t0, t1) = (self.ts[seg], self.ts[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            out[i] = h00 * self.ys[seg][i]
                + h10 * h * self.derivs[seg][i]
                + h01 * self.ys[seg + 1][i]
                + h11 * h * self.derivs[seg + 1][i];
        }
        out
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end` (either direction),
/// recording every accepted step for dense evaluation.
pub fn integrate_dense<const N: usize, F>(
    f: F,
    t0: f64,
    t_end: f64,
    y0: [Complex64; N],
    opts: StepperOptions,
) -> Result<DenseOutput<N>>
where
    F: Fn(f64, &[Complex64; N]) -> Result<[Complex64; N]>,
{
    let mut ts = vec![t0];
    let mut ys = vec![y0];
    let mut derivs = vec![f(t0, &y0)?];
    if t_end == t0 {
        return Ok(DenseOutput { ts, ys, derivs });
    }

    let span = t_end - t0;
    let direction = span.signum();
    let mut h = span.abs().min(span.abs() * 1e-2 + 1e-6) * direction;
    let mut t = t0;
    let mut y = y0;
    let mut dy = derivs[0];

    for _ in 0..MAX_STEPS {
        if let Some(limit) = opts.guard {
            if y.iter().any(|c| c.norm() > limit) {
                return Err(Error::SingularityDetected { x: t });
            }
        }
        if (t_end - t) * direction <= 0.0 {
            return Ok(DenseOutput { ts, ys, derivs });
        }
        if (t + h - t_end) * direction > 0.0 {
            h = t_end - t;
        }

        let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
        k[0] = dy;
        let mut failed_eval = None;
        for stage in 1..7 {
            let mut arg = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        arg[i] += h * a * kj[i];
                    }
                }
            }
            match f(t + C[stage] * h, &arg) {
                Ok(v) => k[stage] = v,
                Err(e) => {
                    failed_eval = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed_eval {
            // shrink and retry; the step may have probed past a singularity
            h *= 0.5;
            if h.abs() < 1e-14 * (1.0 + t.abs()) {
                return Err(e);
            }
            continue;
        }

        let mut y5 = y;
        let mut err_norm = 0.0f64;
        let mut y4 = y;
        for i in 0..N {
            let mut acc5 = Complex64::new(0.0, 0.0);
            let mut acc4 = Complex64::new(0.0, 0.0);
            for stage in 0..7 {
                acc5 += B5[stage] * k[stage][i];
                acc4 += B4[stage] * k[stage][i];
            }
            y5[i] += h * acc5;
            y4[i] += h * acc4;
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y5[i].norm());
            err_norm = err_norm.max((y5[i] - y4[i]).norm() / scale);
        }

        if err_norm <= 1.0 || h.abs() < 1e-14 * (1.0 + t.abs()) {
            t += h;
            y = y5;
            dy = f(t, &y)?;
            ts.push(t);
            ys.push(y);
            derivs.push(dy);
            if let Some(limit) = opts.guard {
                if y.iter().any(|c| c.norm() > limit) {
                    return Err(Error::SingularityDetected { x: t });
                }
            }
        }

        let scale = if err_norm == 0.0 {
            MAX_SCALE
        } else {
            (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
        };
        h *= scale;
    }
    Err(Error::StepFailure { x: t })
}
