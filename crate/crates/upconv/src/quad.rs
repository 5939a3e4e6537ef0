//! Brute-force numerical machinery: globally adaptive Gauss–Kronrod
//! quadrature (scalar, complex, and small fixed-size vector integrands with a
//! shared subdivision tree), the ordered two-time wedge integral, and
//! trapezoid grids for sampled joint amplitudes.
//!
//! Everything here is deterministic for a fixed [`QuadratureSpec`]: intervals
//! are split in a fixed order (worst error first, ties by insertion age) and
//! sums are accumulated in interval-creation order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of auto-generated integration windows, in units of the
    /// integrand's decay scale.
    pub window: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 4000, window: 14.0 }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("rel_tol must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidInput("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Converged value with its error estimate and evaluation count.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Clone, Copy)]
struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: f64,
    age: u64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.age == other.age
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; older panel wins ties so splitting order is fixed
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.age.cmp(&self.age))
    }
}

fn gk15<const K: usize>(f: &mut impl FnMut(f64) -> [f64; K], a: f64, b: f64) -> ([f64; K], f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; K];
    let mut gauss = [0.0; K];
    let mut res_abs = 0.0;
    for k in 0..K {
        kron[k] = fc[k] * WGK[7];
        res_abs += (fc[k] * WGK[7]).abs();
    }
    for (j, w) in WG.iter().enumerate().take(3) {
        let jt = 2 * j + 1;
        let x = half * XGK[jt];
        let f1 = f(center - x);
        let f2 = f(center + x);
        for k in 0..K {
            gauss[k] += w * (f1[k] + f2[k]);
            kron[k] += WGK[jt] * (f1[k] + f2[k]);
            res_abs += WGK[jt] * (f1[k].abs() + f2[k].abs());
        }
    }
    for k in 0..K {
        gauss[k] += fc[k] * WG[3];
    }
    for j in 0..4 {
        let jt = 2 * j;
        let x = half * XGK[jt];
        let f1 = f(center - x);
        let f2 = f(center + x);
        for k in 0..K {
            kron[k] += WGK[jt] * (f1[k] + f2[k]);
            res_abs += WGK[jt] * (f1[k].abs() + f2[k].abs());
        }
    }
    let mut err2 = 0.0;
    for k in 0..K {
        let d = (kron[k] - gauss[k]) * half;
        err2 += d * d;
        kron[k] *= half;
    }
    // conservative rescale in the style of QUADPACK
    let err = err2.sqrt().abs();
    let res_abs = res_abs * half.abs();
    let scaled = if res_abs > 0.0 && err > 0.0 {
        let r = (200.0 * err / res_abs).powf(1.5);
        if r < 1.0 { res_abs * r } else { err }
    } else {
        err
    };
    (kron, scaled.max(err * 1e-2))
}

fn vec_norm<const K: usize>(v: &[f64; K]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Globally adaptive quadrature of a `K`-component integrand over `[a, b]`.
/// All components share one subdivision tree so coupled quantities (real and
/// imaginary parts, overlaps and norms) stay phase-coherent.
pub fn integrate_vec<const K: usize>(
    mut f: impl FnMut(f64) -> [f64; K],
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<[f64; K]>> {
    spec.validate()?;
    let mut evals = 0usize;
    let mut call = |x: f64| {
        evals += 1;
        f(x)
    };
    let (v0, e0) = gk15(&mut call, a, b);
    let mut heap: BinaryHeap<Panel<K>> = BinaryHeap::new();
    let mut age = 0u64;
    heap.push(Panel { a, b, value: v0, error: e0, age });
    let mut total_err = e0;
    let mut total_val = v0;
    let mut splits = 0usize;
    while splits < spec.max_subdivisions {
        let tol = spec.abs_tol.max(spec.rel_tol * vec_norm(&total_val));
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep its estimate
            heap.push(worst);
            break;
        }
        let (vl, el) = gk15(&mut call, worst.a, mid);
        let (vr, er) = gk15(&mut call, mid, worst.b);
        total_err += el + er - worst.error;
        for k in 0..K {
            total_val[k] += vl[k] + vr[k] - worst.value[k];
        }
        age += 1;
        heap.push(Panel { a: worst.a, b: mid, value: vl, error: el, age });
        age += 1;
        heap.push(Panel { a: mid, b: worst.b, value: vr, error: er, age });
        splits += 1;
    }
    // deterministic re-sum in panel order for reproducibility
    let mut panels: Vec<Panel<K>> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = [0.0; K];
    let mut error = 0.0;
    for p in &panels {
        for k in 0..K {
            value[k] += p.value[k];
        }
        error += p.error;
    }
    let tol = spec.abs_tol.max(spec.rel_tol * vec_norm(&value));
    if error > tol {
        return Err(Error::NonConvergence { error, tolerance: tol, subdivisions: splits });
    }
    Ok(QuadResult { value, error, evaluations: evals })
}

/// Adaptive quadrature of a real integrand.
pub fn integrate_1d(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<f64>> {
    let r = integrate_vec(|x| [f(x)], a, b, spec)?;
    Ok(QuadResult { value: r.value[0], error: r.error, evaluations: r.evaluations })
}

/// Adaptive quadrature of a complex integrand (coupled re/im subdivision).
pub fn integrate_complex(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<Complex64>> {
    let r = integrate_vec(
        |x| {
            let v = f(x);
            [v.re, v.im]
        },
        a,
        b,
        spec,
    )?;
    Ok(QuadResult {
        value: Complex64::new(r.value[0], r.value[1]),
        error: r.error,
        evaluations: r.evaluations,
    })
}

/// Ordered two-time wedge integral ∫dt₂ ∫_{t1_floor}^{t₂} dt₁ K(t₁, t₂) by
/// outer-adaptive, inner-cumulative quadrature. The caller supplies the outer
/// window `[t2_lo, t2_hi]` and the inner floor, chosen so the kernel has
/// decayed below target accuracy outside them.
pub fn ordered_double_integral(
    kernel: impl Fn(f64, f64) -> Complex64,
    t2_lo: f64,
    t2_hi: f64,
    t1_floor: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<Complex64>> {
    // inner tolerance tightened so inner noise stays under the outer estimate
    let inner_spec = QuadratureSpec {
        rel_tol: (spec.rel_tol * 0.1).max(1e-13),
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    let mut inner_evals = 0usize;
    let mut failed: Option<Error> = None;
    let outer = integrate_vec(
        |t2| {
            if failed.is_some() || t2 <= t1_floor {
                return [0.0, 0.0];
            }
            match integrate_complex(|t1| kernel(t1, t2), t1_floor, t2, &inner_spec) {
                Ok(r) => {
                    inner_evals += r.evaluations;
                    [r.value.re, r.value.im]
                }
                Err(e) => {
                    failed = Some(e);
                    [0.0, 0.0]
                }
            }
        },
        t2_lo.max(t1_floor),
        t2_hi,
        spec,
    )?;
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(QuadResult {
        value: Complex64::new(outer.value[0], outer.value[1]),
        error: outer.error,
        evaluations: outer.evaluations + inner_evals,
    })
}

/// Complex samples of a joint amplitude on a uniform square grid over
/// (ν_s, ν_i) ∈ [−extent·σ, extent·σ]², row-major in ν_s.
#[derive(Debug, Clone)]
pub struct GridState {
    pub sigma: f64,
    pub extent_sigmas: f64,
    pub points: usize,
    pub samples: Vec<Complex64>,
}

impl GridState {
    pub fn sample(
        sigma: f64,
        extent_sigmas: f64,
        points: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        assert!(points >= 2, "grid needs at least 2 points per axis");
        let axis = Self::axis_of(sigma, extent_sigmas, points);
        let mut samples = Vec::with_capacity(points * points);
        for &ns in &axis {
            for &ni in &axis {
                samples.push(f(ns, ni));
            }
        }
        Self { sigma, extent_sigmas, points, samples }
    }

    fn axis_of(sigma: f64, extent_sigmas: f64, points: usize) -> Vec<f64> {
        let half = extent_sigmas * sigma;
        let step = 2.0 * half / (points - 1) as f64;
        (0..points).map(|k| -half + step * k as f64).collect()
    }

    pub fn axis(&self) -> Vec<f64> {
        Self::axis_of(self.sigma, self.extent_sigmas, self.points)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.extent_sigmas * self.sigma / (self.points - 1) as f64
    }

    fn same_axes(&self, other: &Self) -> bool {
        self.points == other.points
            && self.sigma == other.sigma
            && self.extent_sigmas == other.extent_sigmas
    }

    /// Sesquilinear trapezoid inner product ⟨self|other⟩ (conjugate-linear in
    /// `self`).
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if !self.same_axes(other) {
            return Err(Error::AxisMismatch(format!(
                "{}x{} over ±{}σ vs {}x{} over ±{}σ",
                self.points, self.points, self.extent_sigmas, other.points, other.points,
                other.extent_sigmas
            )));
        }
        let n = self.points;
        let h = self.step();
        let w = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let weight = w(i) * w(j);
                acc += weight * self.samples[i * n + j].conj() * other.samples[i * n + j];
            }
        }
        Ok(acc * h * h)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner_product(self).expect("same axes").re
    }

    /// Largest boundary magnitude relative to the peak; small values mean the
    /// grid window captures the state.
    pub fn boundary_to_peak_ratio(&self) -> f64 {
        let n = self.points;
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for k in 0..n {
            for idx in [k, (n - 1) * n + k, k * n, k * n + (n - 1)] {
                worst = worst.max(self.samples[idx].norm());
            }
        }
        worst / peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use errorfunctions::RealErrorFunctions;
    use proptest::prelude::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn gaussian_integral() {
        let spec = QuadratureSpec::default();
        let r = integrate_1d(|x| (-x * x).exp(), -8.0, 8.0, &spec).unwrap();
        assert_relative_eq!(r.value, SQRT_PI, max_relative = 1e-10);
        assert!(r.error < 1e-8);
    }

    #[test]
    fn dirichlet_integral_with_tail_correction() {
        // ∫sinc over ±W plus the analytic tail 2(cos W/W − sin W/W²) ≈ π
        let w = 1.0e4;
        let spec = QuadratureSpec { max_subdivisions: 60_000, rel_tol: 1e-9, ..Default::default() };
        let r = integrate_1d(crate::spectral::sinc, -w, w, &spec).unwrap();
        let tail = 2.0 * (w.cos() / w - w.sin() / (w * w));
        assert!((r.value + tail - std::f64::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn erf_weighted_half_gaussian() {
        // the ordered-half identity in 1-D: the erf weight halves the total
        let spec = QuadratureSpec::default();
        let r = integrate_1d(
            |x| (-x * x).exp() * 0.5 * (1.0 + RealErrorFunctions::erf(x)),
            -9.0,
            9.0,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(r.value, SQRT_PI / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn halving_rel_tol_stays_within_prior_error() {
        let spec = QuadratureSpec { rel_tol: 1e-6, ..Default::default() };
        let f = |x: f64| (-(x * x)).exp() * (5.0 * x).cos();
        let coarse = integrate_1d(f, -8.0, 8.0, &spec).unwrap();
        let fine =
            integrate_1d(f, -8.0, 8.0, &QuadratureSpec { rel_tol: 5e-7, ..spec }).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.error.max(1e-14));
    }

    #[test]
    fn complex_integrand_phase() {
        // ∫ exp(−x² + ix) dx = √π e^{−1/4}
        let spec = QuadratureSpec::default();
        let r = integrate_complex(
            |x| Complex64::new(-x * x, x).exp(),
            -9.0,
            9.0,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(r.value.re, SQRT_PI * (-0.25_f64).exp(), max_relative = 1e-10);
        assert!(r.value.im.abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_reports_error() {
        let spec = QuadratureSpec { max_subdivisions: 2, rel_tol: 1e-14, ..Default::default() };
        let r = integrate_1d(|x: f64| (100.0 * x).cos() * x.exp(), -1.0, 1.0, &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn ordered_wedge_of_separable_gaussian_is_half_square() {
        let spec = QuadratureSpec::default();
        let g = |t: f64| (-t * t).exp();
        let r = ordered_double_integral(|t1, t2| Complex64::from(g(t1) * g(t2)), -9.0, 9.0, -9.0, &spec)
            .unwrap();
        assert_relative_eq!(r.value.re, 0.5 * SQRT_PI * SQRT_PI, max_relative = 1e-9);
        assert!(r.value.im.abs() < 1e-12);
    }

    #[test]
    fn ordered_wedge_of_backward_supported_kernel_vanishes() {
        // kernel lives only where t1 > t2 + 3: the wedge never sees it
        let spec = QuadratureSpec { abs_tol: 1e-12, ..Default::default() };
        let f = |t1: f64, t2: f64| {
            if t1 > t2 + 3.0 {
                Complex64::from((-(t1 * t1) - t2 * t2).exp())
            } else {
                Complex64::default()
            }
        };
        let r = ordered_double_integral(f, -8.0, 8.0, -8.0, &spec).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn grid_inner_product_norm_nonnegative() {
        let g = GridState::sample(1.0, 6.0, 64, |x, y| {
            Complex64::new((-0.25 * (x * x + y * y)).exp(), 0.1 * x)
        });
        let n = g.inner_product(&g).unwrap();
        assert!(n.re > 0.0);
        assert!(n.im.abs() < 1e-14 * n.re);
    }

    #[test]
    fn grid_axis_mismatch_rejected() {
        let a = GridState::sample(1.0, 6.0, 32, |_, _| Complex64::from(1.0));
        let b = GridState::sample(1.0, 6.0, 33, |_, _| Complex64::from(1.0));
        assert!(matches!(a.inner_product(&b), Err(Error::AxisMismatch(_))));
    }

    #[test]
    fn grid_norm_second_order_convergence() {
        // truncated-domain Gaussian: boundary terms make trapezoid cleanly
        // second order, so halving the step shrinks the error fourfold
        let f = |x: f64, y: f64| Complex64::from((-0.5 * (x * x + y * y)).exp());
        let exact = {
            use errorfunctions::RealErrorFunctions;
            let e = RealErrorFunctions::erf(2.0);
            std::f64::consts::PI * e * e // square box [-2, 2]^2
        };
        let err_at = |n: usize| (GridState::sample(1.0, 2.0, n, f).norm_sqr() - exact).abs();
        let ratio = err_at(21) / err_at(41);
        assert!((3.0..5.0).contains(&ratio), "refinement ratio {ratio}");
        assert!(err_at(41) < 1e-3);
    }

    proptest! {
        #[test]
        fn inner_product_conjugate_symmetry(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 12;
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| GridState {
                sigma: 1.0,
                extent_sigmas: 4.0,
                points: n,
                samples: (0..n * n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let ab = a.inner_product(&b).unwrap();
            let ba = b.inner_product(&a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-12 * (1.0 + ab.norm()));
        }

        #[test]
        fn gaussian_scale_invariance(s in 0.5f64..4.0) {
            // ∫ e^{-(x/s)²} dx = s√π at any width
            let spec = QuadratureSpec::default();
            let r = integrate_1d(|x| (-(x / s) * (x / s)).exp(), -10.0 * s, 10.0 * s, &spec).unwrap();
            prop_assert!((r.value - s * SQRT_PI).abs() < 1e-9 * s);
        }
    }
}
