//! Reference computations independent of the quadrature: globally adaptive
//! Gauss–Kronrod integration of the GH density and of the mixture
//! representation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::distribution::{gh_summary_stats, GHParams, GhDensity};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::special::{ln_bessel_k_scaled, normal_cdf, normal_sf};

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss
// weights (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_507_855,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_SEGMENTS: usize = 20_000;
const MIN_TOL: f64 = 1e-14;

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    at_floor: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_sum = WGK[10] * fc.abs();
    let mut values = [(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        values[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((values[j].0 - mean).abs() + (values[j].1 - mean).abs());
    }
    let value = kronrod * half;
    let resabs = abs_sum * half.abs();
    let resasc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let at_floor = error <= floor;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Segment {
        a,
        b,
        value,
        error,
        at_floor,
    }
}

/// Globally adaptive GK21 integration on `[a, b]` with `pieces` initial
/// subintervals; stops once the summed error is below
/// `max(abs_tol, rel_tol |value|)`, or when every remaining segment is at the
/// rounding floor.
fn integrate_finite<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    pieces: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment> = Vec::new();
    let mut evaluations = 0;
    for i in 0..pieces {
        let lo = a + (b - a) * i as f64 / pieces as f64;
        let hi = if i + 1 == pieces {
            b
        } else {
            a + (b - a) * (i + 1) as f64 / pieces as f64
        };
        heap.push(gauss_kronrod(f, lo, hi));
        evaluations += 21;
    }
    loop {
        let mut value = NeumaierSum::new();
        let mut error = 0.0;
        for s in heap.iter().chain(done.iter()) {
            value.add(s.value);
            error += s.error;
        }
        let value = value.value();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Domain(format!(
                "integrand is not finite on [{a}, {b}]"
            )));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) || heap.is_empty() {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() + done.len() >= MAX_SEGMENTS {
            return Err(Error::Convergence {
                message: format!(
                    "integration on [{a}, {b}] exceeded {MAX_SEGMENTS} segments (error {error:e})"
                ),
                partial: value,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.at_floor || mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            done.push(worst);
            continue;
        }
        heap.push(gauss_kronrod(f, worst.a, mid));
        heap.push(gauss_kronrod(f, mid, worst.b));
        evaluations += 42;
    }
}

/// Integrates over an interval that may have infinite ends. Half-lines are
/// mapped to `[0, 1)` by `x = a + s t / (1 - t)` with scale `s`, and the full
/// line is split at `center`.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    center: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    integrate_range(&f, a, b, center, scale, abs_tol, rel_tol)
}

fn integrate_range(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    center: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    if a.is_nan() || b.is_nan() || !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!(
            "invalid integration range [{a}, {b}] or scale {scale}"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = integrate_range(f, b, a, center, scale, abs_tol, rel_tol)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    const PIECES: usize = 8;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, PIECES, abs_tol, rel_tol),
        (true, false) => {
            let g = |t: f64| {
                let u = 1.0 - t;
                let x = a + scale * t / u;
                if x.is_finite() {
                    f(x) * scale / (u * u)
                } else {
                    0.0
                }
            };
            integrate_finite(&g, 0.0, 1.0, PIECES, abs_tol, rel_tol)
        }
        (false, true) => {
            let g = |t: f64| {
                let u = 1.0 - t;
                let x = b - scale * t / u;
                if x.is_finite() {
                    f(x) * scale / (u * u)
                } else {
                    0.0
                }
            };
            integrate_finite(&g, 0.0, 1.0, PIECES, abs_tol, rel_tol)
        }
        (false, false) => {
            let c = if center.is_finite() { center } else { 0.0 };
            let lower = integrate_range(f, f64::NEG_INFINITY, c, c, scale, 0.5 * abs_tol, rel_tol)?;
            let upper = integrate_range(f, c, f64::INFINITY, c, scale, 0.5 * abs_tol, rel_tol)?;
            Ok(Integral {
                value: lower.value + upper.value,
                error: lower.error + upper.error,
                evaluations: lower.evaluations + upper.evaluations,
            })
        }
    }
}

/// `int_a^b f` with `|error| <= max(tol |value|, tol)`. Either limit may be
/// infinite.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    check_tol(tol)?;
    integrate_with(f, a, b, 0.0, 1.0, tol, tol)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= MIN_TOL && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "tolerance must be finite and >= {MIN_TOL:e}, got {tol}"
        )))
    }
}

/// Reference GH distribution function obtained by integrating the density.
///
/// The tail nearer to `y` is integrated directly, so tail probabilities carry
/// a relative rather than an absolute error.
#[derive(Debug, Clone, Copy)]
pub struct DensityOracle {
    density: GhDensity,
    params: GHParams,
    mean: f64,
    sd: f64,
}

impl DensityOracle {
    pub fn new(params: &GHParams) -> Result<Self> {
        let stats = gh_summary_stats(params)?;
        Ok(DensityOracle {
            density: GhDensity::new(params)?,
            params: *params,
            mean: stats.mean,
            sd: stats.variance.sqrt(),
        })
    }

    pub fn params(&self) -> &GHParams {
        &self.params
    }

    fn lower(&self, y: f64, tol: f64) -> Result<f64> {
        let d = self.density;
        Ok(integrate_with(|x| d.pdf(x), f64::NEG_INFINITY, y, y, self.sd, 0.0, tol)?.value)
    }

    fn upper(&self, y: f64, tol: f64) -> Result<f64> {
        let d = self.density;
        Ok(integrate_with(|x| d.pdf(x), y, f64::INFINITY, y, self.sd, 0.0, tol)?.value)
    }

    pub fn cdf(&self, y: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        check_point(y)?;
        if y <= self.mean {
            self.lower(y, tol)
        } else {
            Ok(1.0 - self.upper(y, tol)?)
        }
    }

    pub fn sf(&self, y: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        check_point(y)?;
        if y > self.mean {
            self.upper(y, tol)
        } else {
            Ok(1.0 - self.lower(y, tol)?)
        }
    }

    /// Safeguarded Newton iteration on the integrated CDF (or survival
    /// function for `q > 1/2`) inside an expanding bracket.
    pub fn quantile(&self, q: f64, tol: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {q}"
            )));
        }
        let upper = q > 0.5;
        let target = if upper { 1.0 - q } else { q };
        // residual is increasing in y
        let residual = |y: f64| -> Result<f64> {
            if upper {
                Ok(target - self.sf(y, tol)?)
            } else {
                Ok(self.cdf(y, tol)? - target)
            }
        };
        let (mut lo, mut hi) = (self.mean - self.sd, self.mean + self.sd);
        let mut step = self.sd;
        let mut r_hi = residual(hi)?;
        while r_hi < 0.0 {
            lo = hi;
            step *= 2.0;
            hi = self.mean + step;
            r_hi = residual(hi)?;
            if !hi.is_finite() || step > 1e6 * self.sd {
                return Err(Error::Convergence {
                    message: format!("no upper bracket for q = {q}"),
                    partial: lo,
                });
            }
        }
        step = self.sd;
        let mut r_lo = residual(lo)?;
        while r_lo > 0.0 {
            hi = lo;
            step *= 2.0;
            lo = self.mean - step;
            r_lo = residual(lo)?;
            if !lo.is_finite() || step > 1e6 * self.sd {
                return Err(Error::Convergence {
                    message: format!("no lower bracket for q = {q}"),
                    partial: hi,
                });
            }
        }
        let mut y = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = residual(y)?;
            if r == 0.0 {
                return Ok(y);
            }
            if r < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let slope = self.density.pdf(y);
            let newton = y - r / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - y).abs() <= 4.0 * f64::EPSILON * y.abs().max(self.sd * 1e-6)
                || next <= lo
                || next >= hi
            {
                return Ok(next.clamp(lo, hi));
            }
            y = next;
        }
        Err(Error::Convergence {
            message: format!("quantile iteration for q = {q} did not settle"),
            partial: y,
        })
    }
}

fn check_point(y: f64) -> Result<()> {
    if y.is_nan() {
        Err(Error::Domain("evaluation point is NaN".into()))
    } else {
        Ok(())
    }
}

/// Reference CDF by adaptive integration of the GH density.
pub fn cdf_by_integration(params: &GHParams, y: f64, tol: f64) -> Result<f64> {
    DensityOracle::new(params)?.cdf(y, tol)
}

/// Reference survival function by adaptive integration of the GH density.
pub fn sf_by_integration(params: &GHParams, y: f64, tol: f64) -> Result<f64> {
    DensityOracle::new(params)?.sf(y, tol)
}

/// Reference quantile from the integrated density.
pub fn quantile_by_integration(params: &GHParams, q: f64, tol: f64) -> Result<f64> {
    DensityOracle::new(params)?.quantile(q, tol)
}

/// `P(Y <= y)` from the mixture representation,
/// `int_0^inf N((y - mu - beta x)/sqrt(x)) f_GIG(x) dx`.
///
/// The mixing variable is integrated in `u = ln(x gamma / delta)`, where the
/// GIG density times the Jacobian is
/// `exp(p u - 2 sigma^2 sinh^2(u/2)) / (2 K_p(sigma^2))`.
pub fn mixture_cdf_bruteforce(params: &GHParams, y: f64, tol: f64) -> Result<f64> {
    let mean = gh_summary_stats(params)?.mean;
    if y <= mean {
        mixture_tail(params, y, tol, false)
    } else {
        Ok(1.0 - mixture_tail(params, y, tol, true)?)
    }
}

/// Survival counterpart of [`mixture_cdf_bruteforce`].
pub fn mixture_sf_bruteforce(params: &GHParams, y: f64, tol: f64) -> Result<f64> {
    let mean = gh_summary_stats(params)?.mean;
    if y > mean {
        mixture_tail(params, y, tol, true)
    } else {
        Ok(1.0 - mixture_tail(params, y, tol, false)?)
    }
}

fn mixture_tail(params: &GHParams, y: f64, tol: f64, upper: bool) -> Result<f64> {
    check_tol(tol)?;
    check_point(y)?;
    params.validate()?;
    let GHParams { mu, beta, p, .. } = *params;
    let sigma2 = params.gamma * params.delta;
    let scale = params.delta / params.gamma;
    let ln_norm = std::f64::consts::LN_2 + ln_bessel_k_scaled(p, sigma2)?;
    let integrand = |u: f64| {
        let half_sinh = (0.5 * u).sinh();
        let ln_g = p * u - 2.0 * sigma2 * half_sinh * half_sinh - ln_norm;
        if !(ln_g > -745.0) {
            return 0.0;
        }
        let x = scale * u.exp();
        let s = x.sqrt();
        let d = (y - mu - beta * x) / s;
        let tail = if upper { normal_sf(d) } else { normal_cdf(d) };
        tail * ln_g.exp()
    };
    let mode = (p / sigma2).asinh();
    let width = 1.0 + 1.0 / sigma2.sqrt();
    Ok(integrate_with(
        integrand,
        f64::NEG_INFINITY,
        f64::INFINITY,
        mode,
        width,
        0.0,
        tol,
    )?
    .value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{from_alpha_parameterization, ig_density, GHParamsAlpha};
    use crate::quadrature::IGParams;
    use crate::special::normal_pdf;
    use approx::assert_relative_eq;

    fn set(i: usize) -> GHParams {
        let q = match i {
            1 => GHParamsAlpha {
                mu: 0.0,
                alpha: 1.0,
                beta: 0.0,
                delta: 1.0,
                p: -0.5,
            },
            2 => GHParamsAlpha {
                mu: 0.00029,
                alpha: 138.78464,
                beta: -4.90461,
                delta: 0.00646,
                p: -0.5,
            },
            3 => GHParamsAlpha {
                mu: 0.000666,
                alpha: 214.4,
                beta: -6.17,
                delta: 0.0022,
                p: 0.8357,
            },
            4 => GHParamsAlpha {
                mu: 0.000048,
                alpha: 9.0,
                beta: 2.73,
                delta: 0.0161,
                p: -1.663,
            },
            _ => unreachable!(),
        };
        from_alpha_parameterization(&q).unwrap()
    }

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        let weight_sum: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((weight_sum - 2.0).abs() <= 1e-15);
        assert!((2.0 * WG.iter().sum::<f64>() - 2.0).abs() <= 1e-15);
        for k in 0..=31 {
            let s = gauss_kronrod(&|x: f64| x.powi(k), 0.0, 1.0);
            assert!(
                (s.value - 1.0 / (k as f64 + 1.0)).abs() <= 2e-16,
                "degree {k}"
            );
        }
        let s = gauss_kronrod(&|x: f64| x.powi(19), -1.0, 1.0);
        assert!(s.value.abs() <= 1e-16);
    }

    #[test]
    fn densities_normalize() {
        let ig = IGParams::new(1.0, 1.0).unwrap();
        let r = adaptive_integrate(
            |x| ig_density(&ig, x).unwrap_or(0.0),
            0.0,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12, "{}", r.value);
        let r = adaptive_integrate(normal_pdf, f64::NEG_INFINITY, f64::INFINITY, 1e-13).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn finite_and_reversed_ranges() {
        let r = adaptive_integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-14);
        let r = adaptive_integrate(f64::exp, 1.0, 0.0, 1e-14).unwrap();
        assert_relative_eq!(r.value, 1.0 - 1f64.exp(), max_relative = 1e-14);
        let r = adaptive_integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn integrator_errors() {
        assert!(matches!(
            adaptive_integrate(|x| x, 0.0, 1.0, 1e-16),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            adaptive_integrate(|_| f64::NAN, 0.0, 1.0, 1e-8),
            Err(Error::Domain(_))
        ));
        let r = adaptive_integrate(|x| (1.0 / x).sin() / x, 1e-12, 1.0, 1e-14);
        match r {
            Err(Error::Convergence { partial, .. }) => assert!(partial.is_finite()),
            other => panic!("expected a convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_median_is_half() {
        let s1 = set(1);
        assert!((cdf_by_integration(&s1, 0.0, 1e-14).unwrap() - 0.5).abs() <= 1e-12);
        assert!((mixture_cdf_bruteforce(&s1, 0.0, 1e-14).unwrap() - 0.5).abs() <= 1e-12);
        let r = adaptive_integrate(
            |y| crate::distribution::gh_density(&s1, y).unwrap(),
            f64::NEG_INFINITY,
            0.0,
            1e-13,
        )
        .unwrap();
        assert!((r.value - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn routes_agree_at_medians() {
        for i in 1..=4 {
            let oracle = DensityOracle::new(&set(i)).unwrap();
            let y = oracle.quantile(0.5, 1e-14).unwrap();
            let a = oracle.cdf(y, 1e-14).unwrap();
            let b = mixture_cdf_bruteforce(&set(i), y, 1e-14).unwrap();
            assert!((a - 0.5).abs() <= 1e-12, "set {i}: {a}");
            assert!((a - b).abs() <= 1e-10, "set {i}: {a} vs {b}");
        }
    }

    #[test]
    fn tails_are_relatively_accurate() {
        let oracle = DensityOracle::new(&set(2)).unwrap();
        for q in [1e-9, 1e-6] {
            let lo = oracle.quantile(q, 1e-14).unwrap();
            assert_relative_eq!(oracle.cdf(lo, 1e-14).unwrap(), q, max_relative = 1e-8);
            let hi = oracle.quantile(1.0 - q, 1e-14).unwrap();
            assert_relative_eq!(
                oracle.sf(hi, 1e-14).unwrap(),
                1.0 - (1.0 - q),
                max_relative = 1e-8
            );
            assert_relative_eq!(
                mixture_sf_bruteforce(&set(2), hi, 1e-14).unwrap(),
                oracle.sf(hi, 1e-14).unwrap(),
                max_relative = 1e-8
            );
        }
    }
}
