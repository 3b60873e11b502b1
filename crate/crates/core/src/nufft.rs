//! Type-1 and Type-2 nonuniform FFTs on the torus `[0, 2π)`.
//!
//! Nodes are spread onto (or interpolated from) a grid oversampled by
//! `σ = 2` with a truncated periodized Gaussian
//! `ψ(x) = Σ_j exp(-(x - 2πj)² / 4τ)`, whose Fourier transform is known in
//! closed form, so the gridded data is deconvolved exactly on the retained
//! modes. The kernel width `τ` and the half-width of the stencil follow the
//! classical Gaussian gridding analysis: `w` cells on either side give
//! roughly `w` correct digits at `σ = 2`.

use crate::error::{Error, Result};
use crate::scalar::{wrap_two_pi, Complex, Real};
use crate::spectral::{FourierPlan, FourierSeries};

/// Oversampling factor of the fine grid.
pub const OVERSAMPLING: usize = 2;

pub const MIN_EPS: f64 = 1e-15;
pub const MAX_EPS: f64 = 1e-2;

/// Stencil half-width (in fine-grid cells) for a requested accuracy.
///
/// At `σ = 2` the aliased kernel tail at the band edge decays like
/// `10^(-0.91 w)` and the truncation error like `10^(-1.02 w)`.
pub fn half_width_for(eps: f64) -> usize {
    (1.1 * -eps.log10()).ceil() as usize + 1
}

/// Immutable NUFFT plan for a fixed number of modes and accuracy.
#[derive(Clone, Debug)]
pub struct NufftPlan<T: Real> {
    eps: T,
    modes: usize,
    half_width: usize,
    tau: T,
    fine: FourierPlan<T>,
    /// `sqrt(π/τ) e^{k²τ} / n_fine` for `k = -m/2 ..= m/2-1`.
    deconv: Vec<T>,
    /// `exp(-(p h)² / 4τ)` for `p = -w+1 ..= w`.
    gauss: Vec<T>,
}

impl<T: Real> NufftPlan<T> {
    pub fn new(modes: usize, eps: T) -> Result<Self> {
        let e = eps.as_f64();
        if !(MIN_EPS..=MAX_EPS).contains(&e) {
            return Err(Error::Plan(format!(
                "eps_rel = {e:e} outside [{MIN_EPS:e}, {MAX_EPS:e}]"
            )));
        }
        if modes == 0 || !modes.is_multiple_of(2) {
            return Err(Error::InvalidModes(modes));
        }
        let half_width = half_width_for(e);
        let n_fine = OVERSAMPLING * modes;
        let sigma = OVERSAMPLING as f64;
        let m = modes as f64;
        let tau_f = std::f64::consts::PI * half_width as f64 / (m * m * sigma * (sigma - 0.5));
        let tau = T::lit(tau_f);
        let fine = FourierPlan::new(n_fine)?;
        let norm = (T::PI() / tau).sqrt() / T::from_usize_lossy(n_fine);
        let k_min = -((modes / 2) as isize);
        let deconv: Vec<T> = (0..modes as isize)
            .map(|i| {
                let k = T::from_isize_lossy(k_min + i);
                norm * (k * k * tau).exp()
            })
            .collect();
        if deconv.iter().any(|d| !d.is_finite()) {
            return Err(Error::Plan("kernel symbol vanishes on retained modes".into()));
        }
        let h = T::two_pi() / T::from_usize_lossy(n_fine);
        let four_tau = T::lit(4.0) * tau;
        let gauss = (-(half_width as isize) + 1..=half_width as isize)
            .map(|p| {
                let d = T::from_isize_lossy(p) * h;
                (-(d * d) / four_tau).exp()
            })
            .collect();
        Ok(Self {
            eps,
            modes,
            half_width,
            tau,
            fine,
            deconv,
            gauss,
        })
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn fine_len(&self) -> usize {
        self.fine.len()
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Stencil start index and the `2w` kernel weights for a node.
    fn stencil(&self, x: T, weights: &mut [T]) -> isize {
        let n_fine = self.fine.len();
        let h = T::two_pi() / T::from_usize_lossy(n_fine);
        let x = wrap_two_pi(x);
        let l0 = (x / h).floor();
        let d = x - l0 * h;
        let l0 = l0.to_isize().unwrap_or(0);
        let w = self.half_width as isize;
        let four_tau = T::lit(4.0) * self.tau;
        // exp(-(p h - d)²/4τ) = exp(-d²/4τ) · exp(p h d / 2τ) · exp(-(p h)²/4τ)
        let step = (h * d / (T::lit(2.0) * self.tau)).exp();
        let mut pow = (T::from_isize_lossy(-w + 1) * h * d / (T::lit(2.0) * self.tau)).exp();
        let base = (-(d * d) / four_tau).exp();
        for (wt, g) in weights.iter_mut().zip(&self.gauss) {
            *wt = base * pow * *g;
            pow *= step;
        }
        l0 - w + 1
    }

    /// `f̂_k ≈ Σ_j f_j e^{-ik x_j}` for `k = -m/2 ..= m/2-1`.
    pub fn type1(&self, nodes: &[T], weights: &[Complex<T>]) -> Result<FourierSeries<T>> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: weights.len(),
            });
        }
        let n_fine = self.fine.len();
        let nf = n_fine as isize;
        let mut grid = vec![Complex::new(T::zero(), T::zero()); n_fine];
        let mut wts = vec![T::zero(); 2 * self.half_width];
        for (&x, &f) in nodes.iter().zip(weights) {
            let start = self.stencil(x, &mut wts);
            if start >= 0 && start + wts.len() as isize <= nf {
                let lo = start as usize;
                for (g, &wt) in grid[lo..lo + wts.len()].iter_mut().zip(&wts) {
                    *g += f * wt;
                }
                continue;
            }
            for (p, &wt) in wts.iter().enumerate() {
                let l = (start + p as isize).rem_euclid(nf) as usize;
                grid[l] += f * wt;
            }
        }
        self.fine.fft_forward(&mut grid);
        let k_min = -((self.modes / 2) as isize);
        let coeffs = self
            .deconv
            .iter()
            .enumerate()
            .map(|(i, &d)| grid[(k_min + i as isize).rem_euclid(nf) as usize] * d)
            .collect();
        FourierSeries::new(coeffs)
    }

    fn fine_values(&self, series: &FourierSeries<T>) -> Result<Vec<Complex<T>>> {
        if series.modes() != self.modes {
            return Err(Error::LengthMismatch {
                expected: self.modes,
                got: series.modes(),
            });
        }
        let nf = self.fine.len() as isize;
        let mut grid = vec![Complex::new(T::zero(), T::zero()); self.fine.len()];
        for ((k, c), &d) in series.iter().zip(&self.deconv) {
            grid[k.rem_euclid(nf) as usize] = c * d;
        }
        self.fine.fft_inverse(&mut grid);
        Ok(grid)
    }

    /// `f_j ≈ Σ_k c_k e^{ik x_j}`.
    pub fn type2(&self, nodes: &[T], series: &FourierSeries<T>) -> Result<Vec<Complex<T>>> {
        Ok(self.type2_batch(nodes, &[series])?.pop().expect("one series"))
    }

    /// Type-2 evaluation of several series at the same nodes; the kernel
    /// weights are computed once.
    pub fn type2_batch(&self, nodes: &[T], series: &[&FourierSeries<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        let fine: Vec<Vec<Complex<T>>> = series.iter().map(|s| self.fine_values(s)).collect::<Result<_>>()?;
        let stencil_len = 2 * self.half_width;
        let nf = self.fine.len() as isize;
        let mut out = vec![Vec::with_capacity(nodes.len()); series.len()];
        let mut wts = vec![T::zero(); stencil_len];
        let mut idx = vec![0usize; stencil_len];
        for &x in nodes {
            let start = self.stencil(x, &mut wts);
            if start >= 0 && start + stencil_len as isize <= nf {
                let lo = start as usize;
                for (g, o) in fine.iter().zip(out.iter_mut()) {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (v, &wt) in g[lo..lo + stencil_len].iter().zip(&wts) {
                        acc += *v * wt;
                    }
                    o.push(acc);
                }
                continue;
            }
            for (p, i) in idx.iter_mut().enumerate() {
                *i = (start + p as isize).rem_euclid(nf) as usize;
            }
            for (g, o) in fine.iter().zip(out.iter_mut()) {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (&i, &wt) in idx.iter().zip(&wts) {
                    acc += g[i] * wt;
                }
                o.push(acc);
            }
        }
        Ok(out)
    }
}

/// Type-1 transform with a plan built for the call.
pub fn nufft_type1<T: Real>(nodes: &[T], weights: &[Complex<T>], modes: usize, eps: T) -> Result<FourierSeries<T>> {
    NufftPlan::new(modes, eps)?.type1(nodes, weights)
}

/// Type-2 transform with a plan built for the call.
pub fn nufft_type2<T: Real>(nodes: &[T], series: &FourierSeries<T>, eps: T) -> Result<Vec<Complex<T>>> {
    NufftPlan::new(series.modes(), eps)?.type2(nodes, series)
}
