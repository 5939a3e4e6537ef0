//! Second-order two-time kernel of the three-wave interaction and its
//! reduction to a bivariate Gaussian in the two interaction times.
//!
//! The kernel K(t₁, t₂; ν_s, ν_i) is the amplitude for the input photon pair
//! to up-convert at t₁ and down-convert back at t₂ into detunings
//! (ν_s, ν_i). Its three internal frequency integrals are Gaussian once the
//! sinc envelope is approximated, so they reduce exactly to
//!
//! ```text
//! K(t₁,t₂) = κ · exp(−½ τᵀΘτ + λᵀτ + μ),   τ = (t₁, t₂)
//! ```
//!
//! computed here with a branch-safe complex Gaussian integral. From this one
//! object come: the unordered (full-plane) time integral in closed form, the
//! time-ordered wedge by explicit double quadrature, the single-integral
//! error-function form of the ordered amplitude, and the quadratic/linear
//! coefficient set that the closed-form display is checked against.
//!
//! Spectral phases are referenced to the slice center, which is the
//! convention the closed-form coefficient display and the conversion-closure
//! identities hold in; `entrance_phase` switches to entrance-referenced
//! phases for comparison studies.

use nalgebra::{Cholesky, Matrix2, Matrix3, SymmetricEigen, Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, QuadratureSpec};
use crate::spectral::{gamma_fwhm, DispersionProfile};

type C64 = Complex64;

/// Periodic-poling envelope parameters entering the kernel: segment count and
/// the matched-spacer phase scale η = L(k'_s + k'_i).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolingFactors {
    pub segments: u32,
    pub eta: f64,
}

/// Builder for the reduced two-time kernel at fixed physical parameters.
#[derive(Debug, Clone)]
pub struct SecondOrderKernel {
    pub profile: DispersionProfile,
    pub length: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub poling: Option<PolingFactors>,
    pub entrance_phase: bool,
}

/// K(t₁,t₂) = κ·exp(−½τᵀΘτ + λᵀτ + μ) at one detuning point.
#[derive(Debug, Clone)]
pub struct TimeGaussian {
    pub kappa: C64,
    pub theta: Matrix2<C64>,
    pub lambda: Vector2<C64>,
    pub mu: C64,
}

/// Coefficients of the single-time form of the second-order amplitudes: the
/// unordered time integral is amp·exp(−(a·t² + b·t + c)) integrated over t,
/// and the ordered one carries the extra weight (1 + erf(d·t + i·g))/2.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderCoefficients {
    /// Quadratic-in-time coefficient (1/s²), positive away from degeneracy.
    pub a: f64,
    /// Linear coefficient (1/s); purely imaginary in the centered convention.
    pub b: C64,
    /// Constant term; its detuning-independent part is a normalization.
    pub c: C64,
    /// Erf slope (1/s).
    pub d: f64,
    /// Erf offset: the argument is d·t + i·g.
    pub g: C64,
    /// Prefactor multiplying exp(−(a t² + b t + c)).
    pub amp: C64,
}

/// Principal square root of det(M) for complex symmetric M = A + iB with
/// positive-definite A, on the branch analytically continued from B = 0:
/// det M = det A · ∏(1 + i w_k) with w_k the eigenvalues of L⁻¹BL⁻ᵀ, each
/// factor lying in the right half-plane.
fn sqrt_det3(m: &Matrix3<C64>) -> Result<C64> {
    let a = m.map(|z| z.re);
    let b = m.map(|z| z.im);
    let chol = Cholesky::new(a).ok_or_else(|| {
        Error::InvalidInput("frequency quadratic form lost positive-definiteness".into())
    })?;
    let l = chol.l();
    let linv = l.try_inverse().expect("cholesky factor invertible");
    let w = linv * b * linv.transpose();
    let eig = SymmetricEigen::new(0.5 * (w + w.transpose()));
    let mut out = C64::from(l.diagonal().iter().product::<f64>());
    for &wk in eig.eigenvalues.iter() {
        out *= C64::new(1.0, wk).sqrt();
    }
    Ok(out)
}

fn sqrt_det2(m: &Matrix2<C64>) -> Result<C64> {
    let a = m.map(|z| z.re);
    let b = m.map(|z| z.im);
    let chol =
        Cholesky::new(a).ok_or(Error::DegenerateDispersion { gap: 0.0, floor: 0.0 })?;
    let l = chol.l();
    let linv = l.try_inverse().expect("cholesky factor invertible");
    let w = linv * b * linv.transpose();
    let eig = SymmetricEigen::new(0.5 * (w + w.transpose()));
    let mut out = C64::from(l.diagonal().iter().product::<f64>());
    for &wk in eig.eigenvalues.iter() {
        out *= C64::new(1.0, wk).sqrt();
    }
    Ok(out)
}

impl SecondOrderKernel {
    pub fn new(profile: DispersionProfile, length: f64, sigma: f64) -> Self {
        Self {
            profile,
            length,
            sigma,
            gamma: gamma_fwhm(),
            poling: None,
            entrance_phase: false,
        }
    }

    pub fn with_poling(mut self, segments: u32, eta: f64) -> Self {
        self.poling = Some(PolingFactors { segments, eta });
        self
    }

    pub fn with_entrance_phase(mut self, on: bool) -> Self {
        self.entrance_phase = on;
        self
    }

    fn poling_terms(&self) -> (f64, f64, f64) {
        match self.poling {
            Some(PolingFactors { segments, eta }) => {
                let n = f64::from(segments);
                (self.gamma * (n * n - 1.0) * eta * eta / 4.0, (n - 1.0) * eta / 2.0, n)
            }
            None => (0.0, 0.0, 1.0),
        }
    }

    /// Reduce the three internal frequency integrals at one output detuning.
    ///
    /// Integration vector y = (ν'_s, ν'_i, ν_p); the exponent is assembled as
    /// −½yᵀMy + J(τ)ᵀy + c₀(τ) with J linear in τ = (t₁, t₂), then closed
    /// with the multivariate Gaussian formula.
    pub fn reduce(&self, nu_s: f64, nu_i: f64) -> Result<TimeGaussian> {
        let p = &self.profile;
        let (g, z, sig) = (self.gamma, 0.5 * self.length, self.sigma);
        let (q, fq, n) = self.poling_terms();

        // mismatch and detuning as linear forms in y
        let u = Vector3::new(-p.kp_s, -p.kp_i, p.kp_p);
        let w = Vector3::new(-1.0, -1.0, 1.0);

        let mut m_re = Matrix3::zeros();
        m_re += 2.0 * g * z * z * u * u.transpose();
        m_re += 2.0 * q * w * w.transpose();
        m_re[(0, 0)] += 1.0 / (2.0 * sig * sig);
        m_re[(1, 1)] += 1.0 / (2.0 * sig * sig);
        m_re[(2, 2)] += 2.0 * g * z * z * p.kp_p * p.kp_p + 2.0 * q;
        let m = m_re.map(C64::from);

        // down-leg constants at the fixed output detunings
        let dn_k = -p.kp_s * nu_s - p.kp_i * nu_i;
        let dn_w = -(nu_s + nu_i);

        let i = C64::new(0.0, 1.0);
        let mut j0: Vector3<C64> = w.map(C64::from) * (i * fq);
        j0[2] += C64::from(-2.0 * g * z * z * p.kp_p * dn_k - 2.0 * q * dn_w) - i * fq;
        let mut c0 =
            C64::from(-g * z * z * dn_k * dn_k - q * dn_w * dn_w) - i * fq * dn_w;
        if self.entrance_phase {
            j0 += u.map(C64::from) * (i * z);
            j0[2] -= i * z * p.kp_p;
            c0 -= i * z * dn_k;
        }

        // time couplings: exponent has −i(w·y)t₁ + i(y₂ + dn_w)t₂
        let a1: Vector3<C64> = w.map(C64::from) * (-i);
        let a2: Vector3<C64> = Vector3::new(C64::default(), C64::default(), i);

        let lu = m.lu();
        let minv_j0 = lu.solve(&j0).ok_or_else(|| {
            Error::InvalidInput("singular frequency quadratic form".into())
        })?;
        let minv_a1 = lu.solve(&a1).expect("solvable");
        let minv_a2 = lu.solve(&a2).expect("solvable");

        let theta = Matrix2::new(
            -a1.dot(&minv_a1),
            -a1.dot(&minv_a2),
            -a2.dot(&minv_a1),
            -a2.dot(&minv_a2),
        );
        let lambda = Vector2::new(
            a1.dot(&minv_j0),
            a2.dot(&minv_j0) + i * dn_w,
        );
        let mu = 0.5 * j0.dot(&minv_j0) + c0;

        let sqrt_det = sqrt_det3(&m)?;
        let two_pi = 2.0 * std::f64::consts::PI;
        let kappa = C64::from(n * n * g * std::f64::consts::PI / (sig * two_pi.sqrt()))
            * two_pi.powf(1.5)
            / sqrt_det;

        Ok(TimeGaussian { kappa, theta, lambda, mu })
    }
}

impl TimeGaussian {
    /// Kernel value at the two interaction times.
    pub fn eval(&self, t1: f64, t2: f64) -> C64 {
        let tau = Vector2::new(C64::from(t1), C64::from(t2));
        let quad_form = tau.dot(&(self.theta * tau));
        let lin = self.lambda[0] * t1 + self.lambda[1] * t2;
        self.kappa * (-0.5 * quad_form + lin + self.mu).exp()
    }

    /// Unordered amplitude: the time integral over the whole (t₁, t₂) plane,
    /// in closed form.
    pub fn plane_integral(&self) -> Result<C64> {
        let lu = self.theta.lu();
        let tinv_l = lu
            .solve(&self.lambda)
            .ok_or_else(|| Error::InvalidInput("singular time quadratic form".into()))?;
        let sqrt_det = sqrt_det2(&self.theta)?;
        let quad_form = self.lambda.dot(&tinv_l);
        Ok(self.kappa * (2.0 * std::f64::consts::PI) / sqrt_det
            * (0.5 * quad_form + self.mu).exp())
    }

    /// Complete the square in t₁: the inner-time line integral equals
    /// amp·exp(−(a t₂² + b t₂ + c)), and the half-line version carries the
    /// extra factor (1 + erf(d t₂ + i g))/2.
    pub fn coefficients(&self) -> Result<SecondOrderCoefficients> {
        let t11 = self.theta[(0, 0)];
        let t12 = self.theta[(0, 1)];
        let t22 = self.theta[(1, 1)];
        if !(t11.re > 0.0) {
            return Err(Error::DegenerateDispersion { gap: t11.re, floor: 0.0 });
        }
        let a_c = 0.5 * t22 - t12 * t12 / (2.0 * t11);
        // catastrophic cancellation of the two terms is the degenerate limit
        let a_scale = (0.5 * t22).norm() + (t12 * t12 / (2.0 * t11)).norm();
        if !(a_c.re > 1e-10 * a_scale) || a_c.re.is_nan() {
            return Err(Error::DegenerateDispersion { gap: a_c.re, floor: 1e-10 * a_scale });
        }
        let l1 = self.lambda[0];
        let l2 = self.lambda[1];
        let b = -(l2 - l1 * t12 / t11);
        let c = -(self.mu + l1 * l1 / (2.0 * t11));
        let sq = (0.5 * t11).sqrt();
        let d_c = sq + t12 / (2.0 * sq);
        let g = (-l1 / (2.0 * sq)) * C64::new(0.0, -1.0); // erf offset i·g
        let amp = self.kappa * (2.0 * std::f64::consts::PI / t11).sqrt();
        Ok(SecondOrderCoefficients { a: a_c.re, b, c, d: d_c.re, g, amp })
    }

    /// Integration window for the outer time: center and decay scale taken
    /// from the real part of the quadratic form.
    pub fn time_window(&self, widths: f64) -> (f64, f64, f64) {
        let a_re = self.theta.map(|z| z.re);
        let l_re = Vector2::new(self.lambda[0].re, self.lambda[1].re);
        let center = a_re.lu().solve(&l_re).unwrap_or_else(Vector2::zeros);
        let eig = SymmetricEigen::new(0.5 * (a_re + a_re.transpose()));
        let min_ev = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = if min_ev > 0.0 { min_ev.sqrt().recip() } else { f64::NAN };
        let lo = center.min() - widths * scale;
        let hi = center.max() + widths * scale;
        (lo, hi, scale)
    }

    /// Time-ordered amplitude by explicit outer-adaptive, inner-cumulative
    /// double quadrature over the wedge t₁ ≤ t₂.
    pub fn ordered_wedge(&self, spec: &QuadratureSpec) -> Result<C64> {
        let (lo, hi, scale) = self.time_window(spec.window);
        if !scale.is_finite() {
            return Err(Error::DegenerateDispersion { gap: 0.0, floor: 0.0 });
        }
        let floor = lo - spec.window * scale;
        let r = quad::ordered_double_integral(|t1, t2| self.eval(t1, t2), lo, hi, floor, spec)?;
        Ok(r.value)
    }

    /// Time-ordered amplitude via the single-integral error-function form.
    pub fn ordered_erf_form(&self, spec: &QuadratureSpec) -> Result<C64> {
        use errorfunctions::ComplexErrorFunctions;
        let co = self.coefficients()?;
        let center = -co.b.re / (2.0 * co.a);
        let width = co.a.sqrt().recip();
        let (lo, hi) = (center - spec.window * width, center + spec.window * width);
        let ig = co.g * C64::new(0.0, 1.0);
        let r = quad::integrate_complex(
            |t| {
                let gauss = (-(co.a * t * t + co.b * t + co.c)).exp();
                let erf = (C64::from(co.d * t) + ig).erf();
                gauss * 0.5 * (1.0 + erf)
            },
            lo,
            hi,
            spec,
        )?;
        Ok(co.amp * r.value)
    }
}
