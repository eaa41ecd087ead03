//! Prime machinery: segmented sieve, prime counting, modified von Mangoldt
//! weights, coprime residues, primorials, and the prime-average comparison
//! experiments.

use crate::dist::{self, Complex64, DistReport};
use crate::error::EvalError;
use crate::gp::{ConstCache, GPExpr};
use crate::real::{PrecisionConfig, RealConst};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

/// Hard cap on sieve limits (desk-scale memory).
pub const SIEVE_LIMIT_CAP: u64 = 100_000_000;

const SEGMENT: usize = 1 << 20;

/// Bit-set primality table for 0..=limit with prefix counts per block.
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    /// number of primes among 0..(64*i)
    prefix: Vec<u64>,
}

/// Segmented Eratosthenes sieve up to `limit` inclusive.
pub fn sieve(limit: u64) -> PrimeTable {
    assert!(limit <= SIEVE_LIMIT_CAP, "sieve limit exceeds desk-scale cap");
    let n = (limit + 1) as usize;
    let words = n.div_ceil(64);
    let mut bits = vec![u64::MAX; words];
    let clear = |bits: &mut Vec<u64>, i: usize| bits[i / 64] &= !(1u64 << (i % 64));
    clear(&mut bits, 0);
    if n > 1 {
        clear(&mut bits, 1);
    }
    // base primes up to sqrt(limit)
    let root = (limit as f64).sqrt() as usize + 1;
    let mut base = vec![true; root + 1];
    let mut base_primes = Vec::new();
    for p in 2..=root {
        if base[p] {
            base_primes.push(p);
            let mut q = p * p;
            while q <= root {
                base[q] = false;
                q += p;
            }
        }
    }
    // sieve in cache-sized segments
    let mut lo = 2usize;
    while lo < n {
        let hi = (lo + SEGMENT).min(n);
        for &p in &base_primes {
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut q = start;
            while q < hi {
                clear(&mut bits, q);
                q += p;
            }
        }
        lo = hi;
    }
    // mask tail bits beyond limit
    let tail = n % 64;
    if tail != 0 {
        let last = bits.len() - 1;
        bits[last] &= (1u64 << tail) - 1;
    }
    let mut prefix = Vec::with_capacity(words + 1);
    let mut acc = 0u64;
    prefix.push(0);
    for w in &bits {
        acc += w.count_ones() as u64;
        prefix.push(acc);
    }
    PrimeTable { limit, bits, prefix }
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n > self.limit {
            panic!("primality query {} beyond table limit {}", n, self.limit);
        }
        let i = n as usize;
        self.bits[i / 64] & (1u64 << (i % 64)) != 0
    }

    /// pi(x): the number of primes <= x.
    pub fn count_up_to(&self, x: u64) -> u64 {
        assert!(x <= self.limit);
        let i = x as usize;
        let word = i / 64;
        let mut c = self.prefix[word];
        let mask = if i % 64 == 63 { u64::MAX } else { (1u64 << (i % 64 + 1)) - 1 };
        c += (self.bits[word] & mask).count_ones() as u64;
        c
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }
}

/// Modified von Mangoldt weight: `log n` on primes, 0 elsewhere. The log is
/// taken from the rigorous kernel at 64-bit working precision.
pub fn lambda_prime(n: u64, table: &PrimeTable) -> f64 {
    if n >= 2 && table.is_prime(n) {
        log_f64(n)
    } else {
        0.0
    }
}

fn log_f64(n: u64) -> f64 {
    RealConst::log(BigRational::from(BigInt::from(n)))
        .expect("positive")
        .eval_interval(64)
        .expect("log enclosure")
        .midpoint_f64()
}

/// Coprime residues `R(w) = {r in 1..=w : gcd(r, w) = 1}` and phi(w).
pub fn residues_coprime(w: u64) -> (Vec<u64>, u64) {
    assert!(w >= 1);
    let rs: Vec<u64> = (1..=w).filter(|&r| r.gcd(&w) == 1).collect();
    let phi = rs.len() as u64;
    (rs, phi)
}

/// Primorial `W = prod of primes <= max(m, 2)`; the smallest member of the
/// primorial family is 2, so m = 1 is clamped up.
pub fn primorial(m: u64) -> u64 {
    let m = m.max(2);
    let table = sieve(m);
    table.primes().product()
}

/// `Lambda'_{W,r}(n) = (phi(W)/W) Lambda'(Wn + r)`.
pub fn lambda_w_trick(w: u64, r: u64, n: u64, table: &PrimeTable) -> f64 {
    let (_, phi) = residues_coprime(w);
    (phi as f64 / w as f64) * lambda_prime(w * n + r, table)
}

/// Evaluates an expression already wrapped in a fractional part, returning
/// the certified value as f64 in [0, 1).
fn unit_frac(
    fexpr: &GPExpr,
    n: i64,
    cfg: &PrecisionConfig,
    cache: &mut ConstCache,
) -> Result<f64, EvalError> {
    Ok(fexpr
        .eval_ctx(n, cfg, cache)?
        .to_f64()
        .clamp(0.0, 1.0 - f64::EPSILON))
}

#[derive(Clone, Debug, Serialize)]
pub struct AverageComparison {
    pub n: u64,
    pub prime_average: Complex64,
    pub weighted_average: Complex64,
    pub gap: f64,
}

/// Compares `(1/pi(N)) sum_{p<=N} e(q(p))` with
/// `(1/N) sum_{n<=N} Lambda'(n) e(q(n))`; their distance tends to zero for
/// bounded sequences.
pub fn prime_avg_vs_lambda_avg(
    q: &GPExpr,
    n: u64,
    cfg: &PrecisionConfig,
) -> Result<AverageComparison, EvalError> {
    let table = sieve(n);
    let fexpr = GPExpr::frac_part(q.clone());
    let mut cache = ConstCache::default();
    let mut sp = Complex64::zero();
    let mut sl = Complex64::zero();
    let mut count = 0u64;
    for p in table.primes() {
        let x = unit_frac(&fexpr, p as i64, cfg, &mut cache)?;
        let z = dist::e_of(x);
        let w = log_f64(p);
        sp.re += z.re;
        sp.im += z.im;
        sl.re += w * z.re;
        sl.im += w * z.im;
        count += 1;
    }
    let prime_average = Complex64 { re: sp.re / count as f64, im: sp.im / count as f64 };
    let weighted_average = Complex64 { re: sl.re / n as f64, im: sl.im / n as f64 };
    let gap = prime_average.sub(&weighted_average).modulus();
    Ok(AverageComparison { n, prime_average, weighted_average, gap })
}

#[derive(Clone, Debug, Serialize)]
pub struct WTrickReport {
    pub w: u64,
    pub n: u64,
    pub weighted_side: Complex64,
    pub residue_side: Complex64,
    pub gap: f64,
}

/// The W-trick comparison: `(1/(NW)) sum_{n<=NW} Lambda'(n) e(q(n))` against
/// `(1/phi(W)) sum_{r in R(W)} (1/N) sum_{n<=N} e(q(Wn+r))`.
pub fn w_trick_compare(
    q: &GPExpr,
    w: u64,
    n: u64,
    cfg: &PrecisionConfig,
) -> Result<WTrickReport, EvalError> {
    let table = sieve(w * n);
    let fexpr = GPExpr::frac_part(q.clone());
    let mut cache = ConstCache::default();
    let mut lhs = Complex64::zero();
    for p in table.primes() {
        let x = unit_frac(&fexpr, p as i64, cfg, &mut cache)?;
        let z = dist::e_of(x);
        let wgt = log_f64(p);
        lhs.re += wgt * z.re;
        lhs.im += wgt * z.im;
    }
    lhs.re /= (n * w) as f64;
    lhs.im /= (n * w) as f64;
    let (rs, phi) = residues_coprime(w);
    let mut rhs = Complex64::zero();
    for &r in &rs {
        let mut inner = Complex64::zero();
        for m in 1..=n {
            let x = unit_frac(&fexpr, (w * m + r) as i64, cfg, &mut cache)?;
            let z = dist::e_of(x);
            inner.re += z.re;
            inner.im += z.im;
        }
        rhs.re += inner.re / n as f64;
        rhs.im += inner.im / n as f64;
    }
    rhs.re /= phi as f64;
    rhs.im /= phi as f64;
    let gap = lhs.sub(&rhs).modulus();
    Ok(WTrickReport { w, n, weighted_side: lhs, residue_side: rhs, gap })
}

/// Scans primorial moduli `W` (from prime bounds 2..=m_max) and reports the
/// comparison gap for each: the statement is existential in W, so the
/// witness is reported rather than asserted a priori.
pub fn w_trick_scan(
    q: &GPExpr,
    m_max: u64,
    n: u64,
    cfg: &PrecisionConfig,
) -> Result<Vec<WTrickReport>, EvalError> {
    let mut ws: Vec<u64> = (2..=m_max.max(2)).map(primorial).collect();
    ws.dedup();
    ws.into_iter().map(|w| w_trick_compare(q, w, n, cfg)).collect()
}

/// Uniform-distribution statistics of `{q(p) lambda}` over primes p <= N.
pub fn prime_seq_stats(
    q: &GPExpr,
    lambda: Option<&RealConst>,
    n: u64,
    bins: usize,
    cfg: &PrecisionConfig,
) -> Result<DistReport, EvalError> {
    let table = sieve(n);
    let expr = match lambda {
        Some(l) => GPExpr::mul(vec![q.clone(), GPExpr::Const(l.clone())]),
        None => q.clone(),
    };
    let fexpr = GPExpr::frac_part(expr);
    let mut cache = ConstCache::default();
    let mut pts = Vec::new();
    for p in table.primes() {
        pts.push(unit_frac(&fexpr, p as i64, cfg, &mut cache)?);
    }
    let weyl = (1..=3)
        .map(|h| {
            let z = dist::weyl_sum(&pts, h);
            dist::WeylEntry { h, re: z.re, im: z.im, modulus: z.modulus() }
        })
        .collect();
    Ok(DistReport {
        n_points: pts.len(),
        range_lo: 2,
        range_hi: n as i64,
        window: None,
        weyl_sums: weyl,
        star_discrepancy: Some(dist::star_discrepancy_1d(&pts)),
        max_window_discrepancy: None,
        box_discrepancy: None,
        histogram: Some(dist::histogram(&pts, bins)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub averages: Vec<(u64, Complex64)>,
    pub gaps: Vec<f64>,
    /// Successive gaps non-increasing within a 2x slack factor.
    pub monotone_within_2x: bool,
}

/// Successive-difference decay of the prime averages along an N-ladder: the
/// averages form a Cauchy sequence, so the gaps should shrink.
pub fn cauchy_check_prime_avg(
    q: &GPExpr,
    n_list: &[u64],
    cfg: &PrecisionConfig,
) -> Result<CauchyReport, EvalError> {
    assert!(n_list.len() >= 2);
    let max_n = *n_list.iter().max().unwrap();
    let table = sieve(max_n);
    let fexpr = GPExpr::frac_part(q.clone());
    let mut cache = ConstCache::default();
    let mut sorted: Vec<u64> = n_list.to_vec();
    sorted.sort_unstable();
    let mut averages = Vec::new();
    let mut sum = Complex64::zero();
    let mut count = 0u64;
    let mut targets = sorted.iter().copied().peekable();
    for p in table.primes() {
        while let Some(&t) = targets.peek() {
            if p > t {
                averages.push((t, Complex64 { re: sum.re / count as f64, im: sum.im / count as f64 }));
                targets.next();
            } else {
                break;
            }
        }
        let x = unit_frac(&fexpr, p as i64, cfg, &mut cache)?;
        let z = dist::e_of(x);
        sum.re += z.re;
        sum.im += z.im;
        count += 1;
    }
    for t in targets {
        averages.push((t, Complex64 { re: sum.re / count as f64, im: sum.im / count as f64 }));
    }
    let gaps: Vec<f64> = averages
        .windows(2)
        .map(|w| w[1].1.sub(&w[0].1).modulus())
        .collect();
    let monotone_within_2x = gaps.windows(2).all(|g| g[1] <= 2.0 * g[0]);
    Ok(CauchyReport { averages, gaps, monotone_within_2x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_counts() {
        let t = sieve(100);
        assert_eq!(t.count_up_to(10), 4); // 2, 3, 5, 7
        assert_eq!(t.count_up_to(100), 25);
        assert_eq!(t.count_up_to(1), 0);
        assert_eq!(t.count_up_to(2), 1);
    }

    #[test]
    fn sieve_matches_trial_division() {
        let t = sieve(1000);
        for n in 0..=1000u64 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(t.is_prime(n), trial, "mismatch at {}", n);
        }
    }

    #[test]
    fn lambda_prime_values() {
        let t = sieve(10);
        assert_eq!(lambda_prime(4, &t), 0.0);
        assert!((lambda_prime(2, &t) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((lambda_prime(7, &t) - (7.0f64).ln()).abs() < 1e-12);
        assert_eq!(lambda_prime(1, &t), 0.0);
    }

    #[test]
    fn coprime_residues() {
        let (rs, phi) = residues_coprime(6);
        assert_eq!(rs, vec![1, 5]);
        assert_eq!(phi, 2);
        let (rs, phi) = residues_coprime(2);
        assert_eq!(rs, vec![1]);
        assert_eq!(phi, 1);
        let (_, phi) = residues_coprime(30);
        assert_eq!(phi, 8);
    }

    #[test]
    fn primorial_values() {
        assert_eq!(primorial(1), 2);
        assert_eq!(primorial(2), 2);
        assert_eq!(primorial(3), 6);
        assert_eq!(primorial(5), 30);
        assert_eq!(primorial(7), 210);
    }

    #[test]
    fn w_trick_weight_supported_on_coprime_residues() {
        // Lambda'(Wn + r) != 0 forces gcd(r, W) = 1 once Wn + r > W
        for w in [2u64, 6, 30] {
            let t = sieve(w * 1000 + w);
            for n in 1..=1000u64 {
                for r in 1..=w {
                    if lambda_prime(w * n + r, &t) != 0.0 {
                        assert_eq!(r.gcd(&w), 1, "w={} n={} r={}", w, n, r);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_polynomial_average_structure() {
        // q = 0: prime average is exactly 1, weighted average is theta(N)/N
        let q = GPExpr::int(0);
        let cfg = PrecisionConfig::default();
        let rep = prime_avg_vs_lambda_avg(&q, 10_000, &cfg).unwrap();
        assert!((rep.prime_average.re - 1.0).abs() < 1e-12);
        assert!(rep.prime_average.im.abs() < 1e-12);
        // theta(10^4)/10^4 is about 0.98; the gap reflects it
        assert!(rep.gap < 0.1, "gap {}", rep.gap);
        assert!((rep.gap - (1.0 - rep.weighted_average.re)).abs() < 1e-12);
    }

    #[test]
    fn constant_half_symmetry() {
        // q = 1/2: e(q(p)/1) = -1 for every p; both averages land near -1
        let q = GPExpr::Const(RealConst::ratio(1, 2));
        let cfg = PrecisionConfig::default();
        let rep = prime_avg_vs_lambda_avg(&q, 5_000, &cfg).unwrap();
        assert!((rep.prime_average.re + 1.0).abs() < 1e-12);
        assert!(rep.weighted_average.re < -0.8);
    }
}
