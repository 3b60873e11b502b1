//! Step 2: evolve the local spacing `s_α` from the unit circle to the
//! equidistributing spacing of a normalized monitor.
//!
//! The curvature `κ(s, t) = (1 - t)κ₀ + tκ₁` moves an open curve of length
//! `2π` anchored at `s = 0`. With the tangential velocity `V = -U_s/κ` the
//! product `s_α κ(s(α), t)` stays constant, so at `t = 1` the spacing
//! satisfies `s_α φ* = 1`.
//!
//! `U`, `U_s`, `U_ss` and the tangent displacements are not periodic in `s`;
//! they are carried as `q(s) + s·r(s)` with periodic `q`, `r`.

use log::warn;

use crate::error::{Error, Result};
use crate::monitor::NormalizedMonitor;
use crate::nufft::NufftPlan;
use crate::scalar::{Complex, Real};
use crate::spectral::{FourierPlan, FourierSeries, SemiPeriodicField, UniformGrid};

/// Drift of `mean(s_α)` above which a warning is logged.
pub const MEAN_DRIFT_WARN: f64 = 1e-8;

/// Curve fields at one interpolation time on the uniform `s`-grid.
#[derive(Clone, Debug)]
pub struct EvolutionFields<T: Real> {
    pub t: T,
    pub kappa: FourierSeries<T>,
    pub kappa_s: FourierSeries<T>,
    pub kappa_t: FourierSeries<T>,
    pub theta: SemiPeriodicField<T>,
    pub theta_t: FourierSeries<T>,
    pub x_s: FourierSeries<T>,
    pub y_s: FourierSeries<T>,
    pub x_t: SemiPeriodicField<T>,
    pub y_t: SemiPeriodicField<T>,
    pub u: SemiPeriodicField<T>,
    pub u_s: SemiPeriodicField<T>,
    pub u_ss: SemiPeriodicField<T>,
    /// `κ + iκ_s`, `U.q + iU.r`, `U_s.q + iU_s.r`, `U_ss.q + iU_ss.r`.
    packed: [FourierSeries<T>; 4],
    plan: FourierPlan<T>,
}

impl<T: Real> EvolutionFields<T> {
    pub fn modes(&self) -> usize {
        self.kappa.modes()
    }
}

/// Builds [`EvolutionFields`] for the interpolation between two curvatures.
///
/// Everything linear in `t` (curvature, its derivatives, `θ`, `θ_t`) is
/// sampled once at both ends and blended per call.
#[derive(Clone, Debug)]
pub struct FieldBuilder<T: Real> {
    plan: FourierPlan<T>,
    kappa0: FourierSeries<T>,
    kappa1: FourierSeries<T>,
    kappa_t: FourierSeries<T>,
    theta_t: FourierSeries<T>,
    /// Grid samples of `κ`, `κ_s` and `θ` at both ends.
    ends: [[Vec<T>; 3]; 2],
    kt: Vec<T>,
    tht: Vec<T>,
}

impl<T: Real> FieldBuilder<T> {
    /// Interpolate from the unit circle to `phi_star` on `n2` points.
    pub fn new(phi_star: &NormalizedMonitor<T>, n2: usize) -> Result<Self> {
        let kappa0 = FourierSeries::constant(n2, T::one())?;
        Self::between(kappa0, phi_star.phi_star().with_modes(n2)?)
    }

    /// Interpolate between two curvatures of mean one, both positive.
    pub fn between(kappa0: FourierSeries<T>, kappa1: FourierSeries<T>) -> Result<Self> {
        let n = kappa0.modes();
        if kappa1.modes() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: kappa1.modes(),
            });
        }
        let tol = T::lit(1e-12);
        for k in [&kappa0, &kappa1] {
            let mean = k.mean();
            if (mean.re - T::one()).abs() > tol || mean.im.abs() > tol {
                return Err(Error::Parameter(format!("curvature mean {} is not one", mean.re)));
            }
        }
        let plan = FourierPlan::new(n)?;
        let kappa0 = kappa0.without_nyquist();
        let kappa1 = kappa1.without_nyquist();
        let sample_end = |k: &FourierSeries<T>| -> Result<[Vec<T>; 3]> {
            let (v, vs) = unpack_samples(&plan, &pack(k, &k.differentiate())?)?;
            Ok([v, vs, k.antiderivative().samples(&plan)?])
        };
        let ends = [sample_end(&kappa0)?, sample_end(&kappa1)?];
        let kappa_t = kappa1.sub(&kappa0)?;
        let theta_t = kappa_t.antiderivative().periodic;
        let (kt, tht) = unpack_samples(&plan, &pack(&kappa_t, &theta_t)?)?;
        Ok(Self {
            plan,
            kappa0,
            kappa1,
            kappa_t,
            theta_t,
            ends,
            kt,
            tht,
        })
    }

    pub fn modes(&self) -> usize {
        self.plan.len()
    }

    pub fn kappa0(&self) -> &FourierSeries<T> {
        &self.kappa0
    }

    pub fn kappa1(&self) -> &FourierSeries<T> {
        &self.kappa1
    }

    pub fn build(&self, t: T) -> Result<EvolutionFields<T>> {
        let plan = &self.plan;
        let a = T::one() - t;
        let blend = |i: usize| -> Vec<T> {
            self.ends[0][i]
                .iter()
                .zip(&self.ends[1][i])
                .map(|(&x, &y)| a * x + t * y)
                .collect()
        };
        let (k, ks, th) = (blend(0), blend(1), blend(2));
        let min = k.iter().fold(T::infinity(), |m, &v| m.min(v));
        if !(min > T::zero()) {
            return Err(Error::Positivity { min: min.as_f64() });
        }
        let kappa = self.kappa0.scaled(a).add(&self.kappa1.scaled(t))?;
        let kappa_s = kappa.differentiate();
        let (kt, tht) = (&self.kt, &self.tht);

        let xs: Vec<T> = th.iter().map(|a| a.cos()).collect();
        let ys: Vec<T> = th.iter().map(|a| a.sin()).collect();
        let (x_s, y_s) = split(&forward_pair(plan, &xs, &ys)?);

        let gx: Vec<T> = tht.iter().zip(&ys).map(|(&a, &s)| -a * s).collect();
        let gy: Vec<T> = tht.iter().zip(&xs).map(|(&a, &c)| a * c).collect();
        let (gx, gy) = split(&forward_pair(plan, &gx, &gy)?);
        let x_t = gx.antiderivative();
        let y_t = gy.antiderivative();
        let (rx, ry) = (x_t.slope.mean().re, y_t.slope.mean().re);
        let (qx, qy) = unpack_samples(plan, &pack(&x_t.periodic, &y_t.periodic)?)?;

        let n = plan.len();
        let mut u = (vec![T::zero(); n], vec![T::zero(); n]);
        let mut us = u.clone();
        let mut uss = u.clone();
        for j in 0..n {
            let (c, s, kj) = (xs[j], ys[j], k[j]);
            u.0[j] = -s * qx[j] + c * qy[j];
            u.1[j] = -s * rx + c * ry;
            us.0[j] = -kj * (c * qx[j] + s * qy[j]) + tht[j];
            us.1[j] = -kj * (c * rx + s * ry);
            let ratio = ks[j] / kj;
            uss.0[j] = -kj * kj * u.0[j] + ratio * (us.0[j] - tht[j]) + kt[j];
            uss.1[j] = -kj * kj * u.1[j] + ratio * us.1[j];
        }
        let field = |(q, r): &(Vec<T>, Vec<T>)| -> Result<(SemiPeriodicField<T>, FourierSeries<T>)> {
            let packed = forward_pair(plan, q, r)?;
            let (q, r) = split(&packed);
            Ok((SemiPeriodicField::new(q, r)?, packed))
        };
        let (u, pu) = field(&u)?;
        let (u_s, pus) = field(&us)?;
        let (u_ss, puss) = field(&uss)?;
        Ok(EvolutionFields {
            t,
            packed: [pack(&kappa, &kappa_s)?, pu, pus, puss],
            theta: kappa.antiderivative(),
            kappa,
            kappa_s,
            kappa_t: self.kappa_t.clone(),
            theta_t: self.theta_t.clone(),
            x_s,
            y_s,
            x_t,
            y_t,
            u,
            u_s,
            u_ss,
            plan: plan.clone(),
        })
    }
}

/// `a + i b` coefficientwise; evaluates to `a(s) + i b(s)` for real `a`, `b`.
fn pack<T: Real>(a: &FourierSeries<T>, b: &FourierSeries<T>) -> Result<FourierSeries<T>> {
    let i = Complex::new(T::zero(), T::one());
    let out = a.add(&b.map_coeffs(|_, c| c * i))?;
    Ok(out.without_nyquist())
}

/// Inverse of [`pack`]: the series of the real and imaginary parts.
fn split<T: Real>(p: &FourierSeries<T>) -> (FourierSeries<T>, FourierSeries<T>) {
    let half = T::lit(0.5);
    let p = p.without_nyquist();
    let a = p.map_coeffs(|k, c| (c + p.coeff(-k).conj()) * half);
    let b = p.map_coeffs(|k, c| {
        let d = (c - p.coeff(-k).conj()) * half;
        Complex::new(d.im, -d.re)
    });
    (a, b)
}

/// Series of `a + i b` from two real sample vectors, Nyquist mode dropped.
fn forward_pair<T: Real>(plan: &FourierPlan<T>, a: &[T], b: &[T]) -> Result<FourierSeries<T>> {
    let z: Vec<Complex<T>> = a.iter().zip(b).map(|(&a, &b)| Complex::new(a, b)).collect();
    Ok(plan.forward_complex(&z)?.without_nyquist())
}

/// Grid samples of the real and imaginary parts of a packed series.
fn unpack_samples<T: Real>(plan: &FourierPlan<T>, p: &FourierSeries<T>) -> Result<(Vec<T>, Vec<T>)> {
    let z = plan.inverse_complex(p)?;
    Ok(z.iter().map(|z| (z.re, z.im)).unzip())
}

/// Fields at time `t` for the interpolation from the circle to `phi_star`.
pub fn build_fields<T: Real>(phi_star: &NormalizedMonitor<T>, t: T, n2: usize) -> Result<EvolutionFields<T>> {
    FieldBuilder::new(phi_star, n2)?.build(t)
}

/// Evaluates several Fourier series at a common set of nonuniform nodes.
pub trait SeriesEvaluator<T: Real> {
    fn eval(&self, nodes: &[T], series: &[&FourierSeries<T>]) -> Result<Vec<Vec<Complex<T>>>>;
}

impl<T: Real> SeriesEvaluator<T> for NufftPlan<T> {
    fn eval(&self, nodes: &[T], series: &[&FourierSeries<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        self.type2_batch(nodes, series)
    }
}

/// Direct `O(NM)` summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectEvaluator;

impl<T: Real> SeriesEvaluator<T> for DirectEvaluator {
    fn eval(&self, nodes: &[T], series: &[&FourierSeries<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        Ok(series
            .iter()
            .map(|f| nodes.iter().map(|&x| f.eval(x)).collect())
            .collect())
    }
}

/// Local spacing on the uniform `α`-grid at interpolation time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingState<T> {
    pub t: T,
    pub s_alpha: Vec<T>,
}

impl<T: Real> SpacingState<T> {
    /// `s_α ≡ 1` at `t = 0`.
    pub fn uniform(n2: usize) -> Result<Self> {
        UniformGrid::new(n2)?;
        Ok(Self {
            t: T::zero(),
            s_alpha: vec![T::one(); n2],
        })
    }

    pub fn new(t: T, s_alpha: Vec<T>) -> Result<Self> {
        UniformGrid::new(s_alpha.len())?;
        Ok(Self { t, s_alpha })
    }

    pub fn len(&self) -> usize {
        self.s_alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_alpha.is_empty()
    }

    /// `(1/2π)∫ s_α dα`.
    pub fn mean(&self) -> T {
        self.s_alpha.iter().copied().sum::<T>() / T::from_usize_lossy(self.len())
    }

    pub fn min(&self) -> T {
        self.s_alpha.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    /// `s(α_j)` with `s(0) = 0`.
    pub fn s_of_alpha(&self) -> Result<Vec<T>> {
        s_of_alpha(&FourierPlan::new(self.len())?, &self.s_alpha)
    }
}

fn s_of_alpha<T: Real>(plan: &FourierPlan<T>, s_alpha: &[T]) -> Result<Vec<T>> {
    if s_alpha.len() != plan.len() {
        return Err(Error::LengthMismatch {
            expected: plan.len(),
            got: s_alpha.len(),
        });
    }
    let mut s = plan.forward(s_alpha)?.antiderivative().samples(plan)?;
    // Exact by construction; the FFT leaves roundoff of either sign.
    s[0] = T::zero();
    Ok(s)
}

/// `ds_α/dt` at the fields' time.
pub fn rhs<T: Real>(s_alpha: &[T], fields: &EvolutionFields<T>, evaluator: &impl SeriesEvaluator<T>) -> Result<Vec<T>> {
    let s = s_of_alpha(&fields.plan, s_alpha)?;
    check_nodes(&s, s_alpha, fields.t)?;
    let p = &fields.packed;
    let vals = evaluator.eval(&s, &[&p[0], &p[1], &p[2], &p[3]])?;
    Ok((0..s.len())
        .map(|j| {
            let sj = s[j];
            let (k, ks) = (vals[0][j].re, vals[0][j].im);
            let u = vals[1][j].re + sj * vals[1][j].im;
            let us = vals[2][j].re + sj * vals[2][j].im;
            let uss = vals[3][j].re + sj * vals[3][j].im;
            let sa = s_alpha[j];
            let v = -us / k;
            let v_alpha = -sa * (ks / k) * v - (sa / k) * uss;
            v_alpha - sa * k * u
        })
        .collect())
}

fn check_nodes<T: Real>(s: &[T], s_alpha: &[T], t: T) -> Result<()> {
    let fail = |detail: String| Error::MonotonicityLoss { t: t.as_f64(), detail };
    if let Some(j) = s_alpha.iter().position(|&v| !(v > T::zero())) {
        return Err(fail(format!("s_alpha = {:e} at node {j}", s_alpha[j].as_f64())));
    }
    let tau = T::two_pi();
    for (j, w) in s.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(fail(format!("s(alpha) not increasing at node {}", j + 1)));
        }
    }
    let last = s[s.len() - 1];
    if !(last < tau) {
        return Err(fail(format!("node {:e} outside [0, 2pi)", last.as_f64())));
    }
    Ok(())
}

/// Options for [`evolve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions<T> {
    pub n2: usize,
    pub dt: T,
    pub eps: T,
}

impl<T: Real> EvolveOptions<T> {
    pub fn new(n2: usize, dt: T, eps: T) -> Self {
        Self { n2, dt, eps }
    }

    fn steps(&self) -> Result<usize> {
        let dt = self.dt.as_f64();
        if !(dt > 0.0 && dt <= 0.25) {
            return Err(Error::Parameter(format!("dt = {dt} outside (0, 0.25]")));
        }
        Ok(((1.0 / dt) - 1e-9).ceil().max(1.0) as usize)
    }
}

/// Result of a full evolution.
#[derive(Clone, Debug)]
pub struct EvolutionRun<T> {
    pub state: SpacingState<T>,
    pub steps: usize,
    /// `max_t |mean(s_α) - 1|`.
    pub max_mean_drift: T,
    /// `min_t min_α s_α`.
    pub min_s_alpha: T,
}

/// RK4 from the unit circle at `t = 0` to `t = 1`.
pub fn evolve<T: Real>(phi_star: &NormalizedMonitor<T>, opts: &EvolveOptions<T>) -> Result<EvolutionRun<T>> {
    let builder = FieldBuilder::new(phi_star, opts.n2)?;
    run(&builder, SpacingState::uniform(opts.n2)?, opts)
}

/// RK4 from `initial` (the spacing equidistributing `kappa0`) to the spacing
/// equidistributing `kappa1`.
pub fn evolve_from<T: Real>(
    kappa0: FourierSeries<T>,
    kappa1: FourierSeries<T>,
    initial: SpacingState<T>,
    opts: &EvolveOptions<T>,
) -> Result<EvolutionRun<T>> {
    let builder = FieldBuilder::between(kappa0.with_modes(opts.n2)?, kappa1.with_modes(opts.n2)?)?;
    if initial.len() != opts.n2 {
        return Err(Error::LengthMismatch {
            expected: opts.n2,
            got: initial.len(),
        });
    }
    run(
        &builder,
        SpacingState {
            t: T::zero(),
            ..initial
        },
        opts,
    )
}

fn run<T: Real>(
    builder: &FieldBuilder<T>,
    initial: SpacingState<T>,
    opts: &EvolveOptions<T>,
) -> Result<EvolutionRun<T>> {
    let steps = opts.steps()?;
    let plan = NufftPlan::new(opts.n2, opts.eps)?;
    let dt = opts.dt;
    let half = T::lit(0.5);
    let time = |k: usize| (T::from_usize_lossy(k) * dt).min(T::one());
    let mut s = initial.s_alpha;
    let mut max_drift = (mean_of(&s) - T::one()).abs();
    let mut min_sa = s.iter().fold(T::infinity(), |m, &v| m.min(v));
    let mut start = builder.build(T::zero())?;
    for step in 0..steps {
        let (t0, t1) = (time(step), time(step + 1));
        let h = t1 - t0;
        let mid = builder.build(t0 + half * h)?;
        let end = builder.build(t1)?;
        let k1 = rhs(&s, &start, &plan)?;
        let k2 = rhs(&axpy(&s, half * h, &k1), &mid, &plan)?;
        let k3 = rhs(&axpy(&s, half * h, &k2), &mid, &plan)?;
        let k4 = rhs(&axpy(&s, h, &k3), &end, &plan)?;
        let sixth = h / T::lit(6.0);
        for j in 0..s.len() {
            s[j] += sixth * (k1[j] + T::lit(2.0) * (k2[j] + k3[j]) + k4[j]);
        }
        let min = s.iter().fold(T::infinity(), |m, &v| m.min(v));
        if !(min > T::zero()) {
            return Err(Error::MonotonicityLoss {
                t: t1.as_f64(),
                detail: format!("min s_alpha = {:e}", min.as_f64()),
            });
        }
        min_sa = min_sa.min(min);
        max_drift = max_drift.max((mean_of(&s) - T::one()).abs());
        start = end;
    }
    if max_drift.as_f64() > MEAN_DRIFT_WARN {
        warn!("mean(s_alpha) drifted by {:e} during the evolution", max_drift.as_f64());
    }
    Ok(EvolutionRun {
        state: SpacingState {
            t: T::one(),
            s_alpha: s,
        },
        steps,
        max_mean_drift: max_drift,
        min_s_alpha: min_sa,
    })
}

fn mean_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
}

fn axpy<T: Real>(x: &[T], a: T, y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&x, &y)| x + a * y).collect()
}

/// `max_j |s_α φ*(s(α_j)) - m| / m` with `m` the trapezoid mean of the
/// product.
pub fn equidistribution_residual<T: Real>(state: &SpacingState<T>, phi_star: &NormalizedMonitor<T>) -> Result<T> {
    let s = state.s_of_alpha()?;
    let prod: Vec<T> = s
        .iter()
        .zip(&state.s_alpha)
        .map(|(&s, &sa)| sa * phi_star.eval(s))
        .collect();
    let m = mean_of(&prod);
    Ok(prod.iter().fold(T::zero(), |acc, &p| acc.max((p - m).abs())) / m)
}
