//! Entropy density `g_0(s) = s log s - s + 1` and its quadratic
//! regularization below `epsilon`.

use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyFns {
    epsilon: f64,
}

impl EntropyFns {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(alloc::format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(EntropyFns { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g_eps(&self, s: f64) -> f64 {
        let e = self.epsilon;
        if s > e {
            s * math::ln(s) - s + 1.0
        } else {
            (s * s - e * e) / (2.0 * e) + (math::ln(e) - 1.0) * s + 1.0
        }
    }

    pub fn dg_eps(&self, s: f64) -> f64 {
        let e = self.epsilon;
        if s > e {
            math::ln(s)
        } else {
            s / e + math::ln(e) - 1.0
        }
    }

    /// `g_eps'(b) - g_eps'(a)`, evaluated without cancellation when `a` and
    /// `b` are close.
    pub fn dg_eps_diff(&self, a: f64, b: f64) -> f64 {
        let e = self.epsilon;
        match (a > e, b > e) {
            (true, true) => math::ln_1p((b - a) / a),
            (false, false) => (b - a) / e,
            (false, true) => math::ln_1p((b - e) / e) + (e - a) / e,
            (true, false) => -(math::ln_1p((a - e) / e) + (e - b) / e),
        }
    }

    /// Secant slope `tau = (b - a) / (g_eps'(b) - g_eps'(a))`, or
    /// `max(a, epsilon)` when `a == b`. Symmetric in its arguments.
    pub fn tau(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return a.max(self.epsilon);
        }
        let e = self.epsilon;
        if a > e && b > e {
            // Logarithmic mean, written in the ordered pair so tau(a, b) == tau(b, a).
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            (hi - lo) / math::ln_1p((hi - lo) / lo)
        } else if a <= e && b <= e {
            e
        } else {
            (b - a) / self.dg_eps_diff(a, b)
        }
    }

    /// `1 / (g_eps'(b) - g_eps'(a)) - max(a, epsilon) / (b - a)` for `a != b`.
    pub fn secant_bracket(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a != b);
        let e = self.epsilon;
        if a > e && b > e {
            let u = (b - a) / a;
            if u.abs() < 1e-3 {
                // 1/log(1+u) - 1/u expanded with Gregory coefficients.
                0.5 + u * (-1.0 / 12.0 + u * (1.0 / 24.0 + u * (-19.0 / 720.0 + u * (3.0 / 160.0))))
            } else {
                1.0 / math::ln_1p(u) - 1.0 / u
            }
        } else if a <= e && b <= e {
            0.0
        } else {
            1.0 / self.dg_eps_diff(a, b) - a.max(e) / (b - a)
        }
    }

    pub fn g0(s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::Domain { what: "g0", value: s });
        }
        Ok(if s == 0.0 { 1.0 } else { s * math::ln(s) - s + 1.0 })
    }

    pub fn dg0(s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::Domain { what: "g0'", value: s });
        }
        Ok(math::ln(s))
    }

    pub fn d2g0(s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::Domain { what: "g0''", value: s });
        }
        Ok(1.0 / s)
    }
}
