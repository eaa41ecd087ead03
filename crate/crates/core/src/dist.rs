//! Equidistribution statistics over rigorously evaluated sequences mod 1:
//! Weyl sums, star discrepancy, box-count discrepancy, windowed
//! well-distribution tests, densities, and histograms.

use crate::error::EvalError;
use crate::gp::{GPExpr, GPValue};
use crate::real::{PrecisionConfig, RealConst};
use num_rational::BigRational;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complex64 {
    pub re: f64,
    pub im: f64,
}

impl Complex64 {
    pub fn zero() -> Self {
        Complex64 { re: 0.0, im: 0.0 }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn sub(&self, o: &Complex64) -> Complex64 {
        Complex64 { re: self.re - o.re, im: self.im - o.im }
    }
}

/// `e(x) = exp(2 pi i x)`.
pub fn e_of(x: f64) -> Complex64 {
    let t = std::f64::consts::TAU * x;
    Complex64 { re: t.cos(), im: t.sin() }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylEntry {
    pub h: i64,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowSpec {
    pub length: usize,
    pub stride: usize,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct Histogram {
    pub bins: usize,
    pub counts: Vec<u64>,
}

/// Distribution statistics for a finite sample of a sequence mod 1.
#[derive(Clone, Debug, Serialize, Default)]
pub struct DistReport {
    pub n_points: usize,
    pub range_lo: i64,
    pub range_hi: i64,
    pub window: Option<WindowSpec>,
    pub weyl_sums: Vec<WeylEntry>,
    pub star_discrepancy: Option<f64>,
    pub max_window_discrepancy: Option<f64>,
    pub box_discrepancy: Option<f64>,
    pub histogram: Option<Histogram>,
}

/// Compensated (Kahan) summation in a fixed reduction order.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `(1/N) sum e(h x_n)` with compensated summation; modulus <= 1.
pub fn weyl_sum(points: &[f64], h: i64) -> Complex64 {
    assert!(!points.is_empty(), "weyl_sum needs a nonempty sample");
    assert!(h != 0, "weyl_sum frequency must be nonzero");
    let n = points.len() as f64;
    let re = kahan_sum(points.iter().map(|&x| (std::f64::consts::TAU * h as f64 * x).cos())) / n;
    let im = kahan_sum(points.iter().map(|&x| (std::f64::consts::TAU * h as f64 * x).sin())) / n;
    let z = Complex64 { re, im };
    debug_assert!(z.modulus() <= 1.0 + 1e-9);
    z
}

/// Exact star discrepancy D*_N via the sort formula
/// `max_i max(i/N - x_(i), x_(i) - (i-1)/N)`.
pub fn star_discrepancy_1d(points: &[f64]) -> f64 {
    assert!(!points.is_empty());
    let mut xs: Vec<f64> = points.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let up = (i as f64 + 1.0) / n - x;
        let down = x - i as f64 / n;
        d = d.max(up).max(down);
    }
    d.clamp(0.0, 1.0)
}

/// Box-count discrepancy over anchored grid boxes: the points are bucketed
/// on a `cells`-per-axis grid and the deviation |count/N - volume| is
/// maximized over all grid-corner-anchored boxes.
pub fn box_discrepancy_kd(points: &[Vec<f64>], cells: usize) -> f64 {
    assert!(!points.is_empty());
    let k = points[0].len();
    assert!(k >= 1 && k <= 4, "box discrepancy supports 1..=4 dimensions");
    assert!(cells >= 2);
    let mut counts = vec![0u64; cells.pow(k as u32)];
    for p in points {
        let mut idx = 0usize;
        for (axis, &x) in p.iter().enumerate() {
            let c = ((x * cells as f64) as usize).min(cells - 1);
            idx += c * cells.pow(axis as u32);
        }
        counts[idx] += 1;
    }
    // prefix sums along each axis turn cell counts into anchored-box counts
    let stride = |axis: usize| cells.pow(axis as u32);
    let mut cum = counts;
    for axis in 0..k {
        let s = stride(axis);
        for i in 0..cum.len() {
            let coord = (i / s) % cells;
            if coord > 0 {
                cum[i] += cum[i - s];
            }
        }
    }
    let n = points.len() as f64;
    let mut worst = 0.0f64;
    for (i, &c) in cum.iter().enumerate() {
        let mut vol = 1.0f64;
        for axis in 0..k {
            let coord = (i / stride(axis)) % cells;
            vol *= (coord + 1) as f64 / cells as f64;
        }
        worst = worst.max((c as f64 / n - vol).abs());
    }
    worst.clamp(0.0, 1.0)
}

pub fn histogram(points: &[f64], bins: usize) -> Histogram {
    let mut counts = vec![0u64; bins];
    for &x in points {
        let b = ((x * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Histogram { bins, counts }
}

/// Fractional parts of `q(n) * lambda` for n in lo..=hi, as f64 midpoints of
/// certified values.
pub fn frac_points(
    q: &GPExpr,
    lambda: Option<&RealConst>,
    lo: i64,
    hi: i64,
    cfg: &PrecisionConfig,
) -> Result<Vec<f64>, EvalError> {
    let expr = match lambda {
        Some(l) => GPExpr::frac_part(GPExpr::mul(vec![q.clone(), GPExpr::Const(l.clone())])),
        None => GPExpr::frac_part(q.clone()),
    };
    Ok(expr
        .eval_range(lo, hi, cfg)?
        .into_iter()
        .map(|v| v.to_f64().clamp(0.0, 1.0 - f64::EPSILON))
        .collect())
}

/// Uniform-distribution statistics of `{q(n) lambda}` over `[lo, hi]`.
pub fn ud_report(
    q: &GPExpr,
    lambda: Option<&RealConst>,
    lo: i64,
    hi: i64,
    h_max: i64,
    bins: usize,
    cfg: &PrecisionConfig,
) -> Result<DistReport, EvalError> {
    let pts = frac_points(q, lambda, lo, hi, cfg)?;
    let weyl = (1..=h_max)
        .map(|h| {
            let z = weyl_sum(&pts, h);
            WeylEntry { h, re: z.re, im: z.im, modulus: z.modulus() }
        })
        .collect();
    Ok(DistReport {
        n_points: pts.len(),
        range_lo: lo,
        range_hi: hi,
        window: None,
        weyl_sums: weyl,
        star_discrepancy: Some(star_discrepancy_1d(&pts)),
        max_window_discrepancy: None,
        box_discrepancy: None,
        histogram: Some(histogram(&pts, bins)),
    })
}

/// Windowed well-distribution test: max star discrepancy over all windows of
/// `window_len` points inside `[-n_range, n_range]`, scanned at stride
/// `window_len / 10`.
pub fn wd_test(
    q: &GPExpr,
    lambda: &RealConst,
    n_range: i64,
    window_len: usize,
    cfg: &PrecisionConfig,
) -> Result<DistReport, EvalError> {
    let pts = frac_points(q, Some(lambda), -n_range, n_range, cfg)?;
    let stride = (window_len / 10).max(1);
    let mut worst = 0.0f64;
    let mut start = 0usize;
    while start + window_len <= pts.len() {
        worst = worst.max(star_discrepancy_1d(&pts[start..start + window_len]));
        start += stride;
    }
    // always include the final (right-aligned) window
    if pts.len() >= window_len {
        worst = worst.max(star_discrepancy_1d(&pts[pts.len() - window_len..]));
    }
    let z = weyl_sum(&pts, 1);
    Ok(DistReport {
        n_points: pts.len(),
        range_lo: -n_range,
        range_hi: n_range,
        window: Some(WindowSpec { length: window_len, stride }),
        weyl_sums: vec![WeylEntry { h: 1, re: z.re, im: z.im, modulus: z.modulus() }],
        star_discrepancy: Some(star_discrepancy_1d(&pts)),
        max_window_discrepancy: Some(worst),
        box_discrepancy: None,
        histogram: None,
    })
}

/// Windowed well-distribution test for a tuple of sequences in `[0,1]^k`,
/// using the box-count discrepancy per window.
pub fn wd_test_kd(
    qs: &[(GPExpr, Option<RealConst>)],
    n_range: i64,
    window_len: usize,
    cells: usize,
    cfg: &PrecisionConfig,
) -> Result<DistReport, EvalError> {
    let mut columns = Vec::with_capacity(qs.len());
    for (q, lambda) in qs {
        columns.push(frac_points(q, lambda.as_ref(), -n_range, n_range, cfg)?);
    }
    let n = columns[0].len();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let stride = (window_len / 10).max(1);
    let mut worst = 0.0f64;
    let mut start = 0usize;
    while start + window_len <= n {
        worst = worst.max(box_discrepancy_kd(&points[start..start + window_len], cells));
        start += stride;
    }
    if n >= window_len {
        worst = worst.max(box_discrepancy_kd(&points[n - window_len..], cells));
    }
    Ok(DistReport {
        n_points: n,
        range_lo: -n_range,
        range_hi: n_range,
        window: Some(WindowSpec { length: window_len, stride }),
        weyl_sums: vec![],
        star_discrepancy: None,
        max_window_discrepancy: Some(worst),
        box_discrepancy: Some(box_discrepancy_kd(&points, cells)),
        histogram: None,
    })
}

/// A density estimate with a finite-sample confidence radius.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Density {
    pub value: f64,
    pub radius: f64,
    pub count: u64,
    pub total: u64,
}

impl Density {
    pub fn from_counts(count: u64, total: u64) -> Self {
        let value = count as f64 / total as f64;
        // finite-sample heuristic: one lattice step plus a 1/sqrt(N) term
        let radius = 1.0 / total as f64 + 1.0 / (total as f64).sqrt();
        Density { value, radius, count, total }
    }

    pub fn straddles_zero(&self) -> bool {
        self.value - self.radius <= 0.0
    }
}

/// Natural density of `{n in [-N, N] : pred(q(n))}`: count / (2N+1).
pub fn natural_density(
    q: &GPExpr,
    n_range: i64,
    cfg: &PrecisionConfig,
    pred: impl Fn(&GPValue) -> bool + Sync,
) -> Result<Density, EvalError> {
    let vals = q.eval_range(-n_range, n_range, cfg)?;
    let count = vals.iter().filter(|v| pred(v)).count() as u64;
    Ok(Density::from_counts(count, (2 * n_range + 1) as u64))
}

/// Max window frequency over windows of length L in [-N, N]: a lower bound
/// for the upper Banach density of the predicate set.
pub fn banach_density_lower(
    q: &GPExpr,
    n_range: i64,
    window_len: usize,
    cfg: &PrecisionConfig,
    pred: impl Fn(&GPValue) -> bool + Sync,
) -> Result<f64, EvalError> {
    let vals = q.eval_range(-n_range, n_range, cfg)?;
    let hits: Vec<u8> = vals.iter().map(|v| pred(v) as u8).collect();
    if hits.len() < window_len {
        return Ok(0.0);
    }
    let mut window_count: u64 = hits[..window_len].iter().map(|&b| b as u64).sum();
    let mut best = window_count;
    for i in window_len..hits.len() {
        window_count += hits[i] as u64;
        window_count -= hits[i - window_len] as u64;
        best = best.max(window_count);
    }
    Ok(best as f64 / window_len as f64)
}

/// Certified test `|q(n)| < a`; counts only when the comparison is decided.
pub fn abs_below(v: &GPValue, a: &BigRational) -> bool {
    matches!(v.abs().lt_rational(a), crate::value::Resolved::Done(true))
}

/// Per-threshold densities of `{n : |q(n)| < A}` over `[-N, N]` — the
/// executable form of the "tends to infinity off a null set" probe.
pub fn adequacy_test(
    q: &GPExpr,
    thresholds: &[BigRational],
    n_range: i64,
    cfg: &PrecisionConfig,
) -> Result<Vec<(f64, Density)>, EvalError> {
    let vals = q.eval_range(-n_range, n_range, cfg)?;
    let total = (2 * n_range + 1) as u64;
    Ok(thresholds
        .iter()
        .map(|a| {
            let count = vals.iter().filter(|v| abs_below(v, a)).count() as u64;
            (
                a.to_f64_lossy(),
                Density::from_counts(count, total),
            )
        })
        .collect())
}

trait ToF64Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64Lossy for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn weyl_two_point_cancellation() {
        // x_n = n/2 mod 1 for n = 1, 2: e(0.5) + e(1.0) = -1 + 1 = 0
        let z = weyl_sum(&[0.5, 0.0], 1);
        assert!(z.modulus() < 1e-15);
        // constant zero sequence sums to 1
        let z = weyl_sum(&[0.0; 10], 1);
        assert!((z.re - 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    #[test]
    fn star_discrepancy_hand_values() {
        assert!((star_discrepancy_1d(&[0.0]) - 1.0).abs() < 1e-15);
        assert!((star_discrepancy_1d(&[0.0, 0.5]) - 0.5).abs() < 1e-15);
        // equally spaced (2i-1)/(2N) attains the optimum 1/(2N)
        let n = 40;
        let pts: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
        assert!((star_discrepancy_1d(&pts) - 1.0 / (2.0 * n as f64)).abs() < 1e-12);
    }

    #[test]
    fn box_discrepancy_uniform_grid() {
        // a full regular grid has small box discrepancy
        let mut pts = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                pts.push(vec![(i as f64 + 0.5) / 20.0, (j as f64 + 0.5) / 20.0]);
            }
        }
        let d = box_discrepancy_kd(&pts, 10);
        assert!(d < 0.06, "grid discrepancy {}", d);
        // a point mass has discrepancy near 1
        let d = box_discrepancy_kd(&[vec![0.0, 0.0]], 10);
        assert!(d > 0.9);
    }

    #[test]
    fn wd_two_point_orbit_fails() {
        // q(n) = n, lambda = 1/2: orbit {0, 1/2}, max window D* >= 0.5
        let q = GPExpr::Var;
        let lambda = RealConst::ratio(1, 2);
        let rep = wd_test(&q, &lambda, 500, 100, &PrecisionConfig::default()).unwrap();
        assert!(rep.max_window_discrepancy.unwrap() >= 0.5);
    }

    #[test]
    fn natural_density_even_integers() {
        // predicate: q(n) = n even
        let q = GPExpr::Var;
        let cfg = PrecisionConfig::default();
        let d = natural_density(&q, 1000, &cfg, |v| {
            v.as_integer().map_or(false, |k| &k % 2 == BigInt::from(0))
        })
        .unwrap();
        assert!((d.value - 0.5).abs() < 1e-3);
        // squares have density -> 0
        let q2 = GPExpr::pow(GPExpr::Var, 2);
        let d = adequacy_test(&q2, &[rat(50, 1)], 1000, &cfg).unwrap();
        assert!(d[0].1.value < 0.01);
    }

    #[test]
    fn complementary_densities_sum_to_one() {
        let q = GPExpr::frac_part(GPExpr::mul(vec![
            GPExpr::Const(RealConst::sqrt_int(2)),
            GPExpr::Var,
        ]));
        let cfg = PrecisionConfig::default();
        let n = 500i64;
        let d1 = natural_density(&q, n, &cfg, |v| {
            matches!(v.lt_rational(&rat(1, 10)), crate::value::Resolved::Done(true))
        })
        .unwrap();
        let d2 = natural_density(&q, n, &cfg, |v| {
            !matches!(v.lt_rational(&rat(1, 10)), crate::value::Resolved::Done(true))
        })
        .unwrap();
        let total = d1.value + d2.value;
        assert!((total - 1.0).abs() < 1e-9);
        // {sqrt2 n} < 0.1 has density about 0.1
        assert!((d1.value - 0.1).abs() < 0.05);
    }

    #[test]
    fn banach_lower_bound_finds_dense_window() {
        // predicate true exactly on [100, 199]: window of length 50 inside
        // that block is full
        let q = GPExpr::Var;
        let cfg = PrecisionConfig::default();
        let b = banach_density_lower(&q, 500, 50, &cfg, |v| {
            v.as_integer()
                .map_or(false, |k| k >= BigInt::from(100) && k < BigInt::from(200))
        })
        .unwrap();
        assert!((b - 1.0).abs() < 1e-12);
    }
}
