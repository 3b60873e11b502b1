//! Reference arclength parametrization of an analytic curve by composite
//! Gauss-Legendre quadrature of the speed and Newton root-finding.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use super::examples::ExampleCurve;

const GL_ORDER: usize = 24;
const PANELS_PER_INTERVAL: usize = 4;

/// Compensated running sum.
#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    carry: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Arclength `s(p)` tabulated at `p_i = 2πi/n`, measured from `p = 0`.
pub struct ArclengthTruth {
    curve: ExampleCurve<f64>,
    rule: GaussLegendre,
    params: Vec<f64>,
    s: Vec<f64>,
}

impl ArclengthTruth {
    pub fn new(curve: &ExampleCurve<f64>, n: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("nonzero order"));
        let h = std::f64::consts::TAU / n as f64;
        let params: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let panels = n * PANELS_PER_INTERVAL;
        let edge = |m: usize| std::f64::consts::TAU * m as f64 / panels as f64;
        let mut s = Vec::with_capacity(n + 1);
        let mut acc = NeumaierSum::default();
        s.push(0.0);
        for i in 0..n {
            for q in 0..PANELS_PER_INTERVAL {
                let m = i * PANELS_PER_INTERVAL + q;
                acc.add(rule.integrate(edge(m), edge(m + 1), |p| curve.speed(p)));
            }
            s.push(acc.value());
        }
        Self {
            curve: *curve,
            rule,
            params,
            s,
        }
    }

    pub fn length(&self) -> f64 {
        *self.s.last().expect("nonempty table")
    }

    /// Tabulated `(p_i, s(p_i))` for `i < n`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.params.len() - 1;
        self.params[..n].iter().copied().zip(self.s[..n].iter().copied())
    }

    /// `s(p)` for `p ∈ [0, 2π]`.
    pub fn arclength(&self, p: f64) -> f64 {
        let n = self.params.len() - 1;
        let h = self.params[1];
        let i = ((p / h).floor().max(0.0) as usize).min(n - 1);
        let a = self.params[i];
        if p == a {
            return self.s[i];
        }
        let steps = (((p - a).abs() / h) * PANELS_PER_INTERVAL as f64).ceil().max(1.0) as usize;
        let d = (p - a) / steps as f64;
        self.s[i]
            + (0..steps)
                .map(|q| {
                    let lo = a + q as f64 * d;
                    self.rule.integrate(lo, lo + d, |t| self.curve.speed(t))
                })
                .sum::<f64>()
    }

    /// The parameter `p` with `s(p) = s`, by safeguarded Newton iteration.
    pub fn locate(&self, s: f64) -> f64 {
        let i = self.s.partition_point(|&v| v <= s).clamp(1, self.s.len() - 1) - 1;
        let (mut lo, mut hi) = (self.params[i], self.params[i + 1]);
        let mut p = lo + (hi - lo) * (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
        for _ in 0..60 {
            let f = self.arclength(p) - s;
            if f > 0.0 {
                hi = p;
            } else {
                lo = p;
            }
            let step = f / self.curve.speed(p);
            let mut next = p - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - p).abs() <= 1e-16 * (1.0 + p.abs()) {
                return next;
            }
            p = next;
        }
        p
    }

    pub fn curve(&self) -> &ExampleCurve<f64> {
        &self.curve
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn circle_arclength_is_parameter() {
        let t = ArclengthTruth::new(&ExampleCurve::Circle, 64);
        assert!((t.length() - TAU).abs() < 1e-13);
        assert!((t.arclength(1.234) - 1.234).abs() < 1e-14);
        assert!((t.locate(2.5) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn ellipse_like_droplet_round_trip() {
        let ex = ExampleCurve::droplet(1.0).unwrap();
        let t = ArclengthTruth::new(&ex, 128);
        for p in [0.0, 0.3, 2.0, 5.9] {
            let s = t.arclength(p);
            assert!((t.locate(s) - p).abs() < 1e-13);
        }
        let fine = ArclengthTruth::new(&ex, 1024);
        assert!((fine.length() - t.length()).abs() < 1e-13 * t.length());
    }
}
