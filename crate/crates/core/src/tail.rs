//! Binomial tail bounds and an exact CDF to check them against.

use crate::error::{invalid, Error, Result};
use crate::graph::check_probability;

/// Largest trial count accepted by [`exact_binom_cdf`] and
/// [`exact_binom_sf`].
pub const EXACT_CDF_MAX_N: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinomialSpec {
    pub n: u64,
    pub p: f64,
}

impl BinomialSpec {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(BinomialSpec { n, p })
    }

    pub fn mu(&self) -> f64 {
        self.n as f64 * self.p
    }
}

/// `P[X ≤ t] ≤ exp(−μ + t (1 + ln(μ / t)))` for `0 ≤ t ≤ μ`; the `t = 0`
/// value is the limit `exp(−μ)`.
pub fn lower_tail_bound(mu: f64, t: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(t >= 0.0) {
        return Err(invalid(
            "t",
            format!("need 0 ≤ t and 0 ≤ μ, got t = {t}, μ = {mu}"),
        ));
    }
    if t > mu {
        return Err(invalid("t", format!("t = {t} exceeds μ = {mu}")));
    }
    if t == 0.0 {
        return Ok((-mu).exp());
    }
    Ok((-mu + t * (1.0 + (mu / t).ln())).exp())
}

/// `P[X ≥ t μ] ≤ exp(−t μ ln(t) / 3)` for `t > 4`.
pub fn upper_tail_bound(mu: f64, t: f64) -> Result<f64> {
    if !(t > 4.0) {
        return Err(invalid("t", format!("ratio must exceed 4, got {t}")));
    }
    if !(mu >= 0.0) {
        return Err(invalid("mu", format!("must be non-negative, got {mu}")));
    }
    Ok((-t * mu * t.ln() / 3.0).exp())
}

fn check_size(spec: &BinomialSpec) -> Result<()> {
    if spec.n > EXACT_CDF_MAX_N {
        return Err(Error::SizeCap(format!(
            "exact binomial CDF supports n ≤ {EXACT_CDF_MAX_N}, got {}",
            spec.n
        )));
    }
    Ok(())
}

/// `P[X ≤ k]` for `X ~ Binom(n, p)`.
pub fn exact_binom_cdf(spec: &BinomialSpec, k: u64) -> Result<f64> {
    check_size(spec)?;
    Ok(binom_cdf_unchecked(spec, k))
}

/// `P[X ≥ k]`, summed directly over the upper tail.
pub fn exact_binom_sf(spec: &BinomialSpec, k: u64) -> Result<f64> {
    check_size(spec)?;
    Ok(binom_sf_unchecked(spec, k))
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
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

/// Log-pmf values for `j = lo..=hi`, via the ratio recurrence with a
/// compensated log accumulator.
fn log_pmf_range(spec: &BinomialSpec, lo: u64, hi: u64, mut visit: impl FnMut(f64)) {
    let (n, p) = (spec.n, spec.p);
    let log_odds = p.ln() - (-p).ln_1p();
    let mut log_pmf = CompensatedSum::default();
    log_pmf.add(n as f64 * (-p).ln_1p());
    for j in 0..=hi {
        if j >= lo {
            visit(log_pmf.value());
        }
        if j < n {
            log_pmf.add(((n - j) as f64 / (j + 1) as f64).ln());
            log_pmf.add(log_odds);
        }
    }
}

fn degenerate(spec: &BinomialSpec, k: u64, upper: bool) -> Option<f64> {
    // Point masses at 0 (p = 0) and n (p = 1).
    let atom = if spec.p == 0.0 {
        0
    } else if spec.p == 1.0 {
        spec.n
    } else {
        return None;
    };
    let hit = if upper { atom >= k } else { atom <= k };
    Some(if hit { 1.0 } else { 0.0 })
}

pub(crate) fn binom_cdf_unchecked(spec: &BinomialSpec, k: u64) -> f64 {
    if let Some(v) = degenerate(spec, k, false) {
        return v;
    }
    if k >= spec.n {
        return 1.0;
    }
    let mut acc = CompensatedSum::default();
    log_pmf_range(spec, 0, k, |lp| acc.add(lp.exp()));
    acc.value().min(1.0)
}

pub(crate) fn binom_sf_unchecked(spec: &BinomialSpec, k: u64) -> f64 {
    if let Some(v) = degenerate(spec, k, true) {
        return v;
    }
    if k == 0 {
        return 1.0;
    }
    if k > spec.n {
        return 0.0;
    }
    let mut acc = CompensatedSum::default();
    log_pmf_range(spec, k, spec.n, |lp| acc.add(lp.exp()));
    acc.value().min(1.0)
}

pub(crate) const SOUNDNESS_N: [u64; 3] = [50, 200, 1000];
pub(crate) const SOUNDNESS_P: [f64; 3] = [0.01, 0.05, 0.2];
pub(crate) const SOUNDNESS_POINTS: usize = 20;

/// One violated grid point of the tail-bound soundness check.
#[derive(Clone, Debug, PartialEq)]
pub struct TailViolation {
    pub n: u64,
    pub p: f64,
    pub t: f64,
    pub exact: f64,
    pub bound: f64,
    pub upper: bool,
}

/// Result of the tail-bound soundness sweep.
#[derive(Clone, Debug, Default)]
pub struct TailCheck {
    pub points: usize,
    pub violations: Vec<TailViolation>,
}

impl TailCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks both bounds against the exact distribution for every
/// `(n, p) ∈ {50, 200, 1000} × {0.01, 0.05, 0.2}` on a 20-point grid of
/// `t`: `t = μ·k/19` for the lower tail and `t = 4 + (k + 1)/2` for the
/// upper tail. The comparison is an exact `≤`.
pub fn soundness_grid() -> TailCheck {
    let mut check = TailCheck::default();
    for &n in &SOUNDNESS_N {
        for &p in &SOUNDNESS_P {
            let spec = BinomialSpec { n, p };
            let mu = spec.mu();
            for k in 0..SOUNDNESS_POINTS {
                let t = mu * k as f64 / (SOUNDNESS_POINTS - 1) as f64;
                let t = t.min(mu);
                let exact = binom_cdf_unchecked(&spec, t.floor() as u64);
                let bound = lower_tail_bound(mu, t).expect("grid point is valid");
                check.points += 1;
                if !(exact <= bound) {
                    check.violations.push(TailViolation {
                        n,
                        p,
                        t,
                        exact,
                        bound,
                        upper: false,
                    });
                }

                let ratio = 4.0 + (k + 1) as f64 / 2.0;
                let threshold = (ratio * mu).ceil() as u64;
                let exact = binom_sf_unchecked(&spec, threshold);
                let bound = upper_tail_bound(mu, ratio).expect("grid point is valid");
                check.points += 1;
                if !(exact <= bound) {
                    check.violations.push(TailViolation {
                        n,
                        p,
                        t: ratio,
                        exact,
                        bound,
                        upper: true,
                    });
                }
            }
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::{One, ToPrimitive, Zero};

    /// P[Binom(n, 1/10) ≤ k] as an exact rational, converted at the end.
    fn rational_cdf_tenth(n: u32, k: u32) -> f64 {
        let mut num = BigUint::zero();
        let mut binom = BigUint::one();
        for j in 0..=k {
            if j > 0 {
                binom = binom * BigUint::from(n - j + 1) / BigUint::from(j);
            }
            num += &binom * BigUint::from(9u32).pow(n - j);
        }
        let den = BigUint::from(10u32).pow(n);
        num.to_f64().unwrap() / den.to_f64().unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_tail_bound(5.0, 5.0).unwrap(), 1.0);
        assert_eq!(lower_tail_bound(5.0, 0.0).unwrap(), (-5.0f64).exp());
        let b = lower_tail_bound(10.0, 5.0).unwrap();
        let want = (-10.0 + 5.0 * (1.0 + 2.0f64.ln())).exp();
        assert!((b - want).abs() < 1e-15);
        assert!((b - 0.2156).abs() < 1e-4);
        let spec = BinomialSpec::new(100, 0.1).unwrap();
        assert!(exact_binom_cdf(&spec, 5).unwrap() <= b);
        assert!(lower_tail_bound(5.0, 5.0001).is_err());
    }

    #[test]
    fn upper_bound_examples() {
        let e3 = 3.0f64.exp();
        let b = upper_tail_bound(1.0, e3).unwrap();
        assert!((b - (-e3).exp()).abs() < 1e-18);
        let b = upper_tail_bound(2.0, 5.0).unwrap();
        assert!((b - (-10.0 * 5.0f64.ln() / 3.0).exp()).abs() < 1e-18);
        let spec = BinomialSpec::new(200, 0.01).unwrap();
        assert!(exact_binom_sf(&spec, 10).unwrap() <= b);
        assert!(upper_tail_bound(3.0, 4.0).is_err());
    }

    #[test]
    fn exact_cdf_examples() {
        let s = BinomialSpec::new(1, 0.3).unwrap();
        assert!((exact_binom_cdf(&s, 0).unwrap() - 0.7).abs() < 1e-15);
        let s = BinomialSpec::new(2, 0.5).unwrap();
        assert!((exact_binom_cdf(&s, 1).unwrap() - 0.75).abs() < 1e-15);
        let s = BinomialSpec::new(100, 0.1).unwrap();
        for k in [0u32, 1, 5, 10, 20, 60] {
            let want = rational_cdf_tenth(100, k);
            let got = exact_binom_cdf(&s, k as u64).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-10,
                "k={k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn exact_cdf_size_cap() {
        let s = BinomialSpec::new(EXACT_CDF_MAX_N + 1, 0.1).unwrap();
        assert!(matches!(exact_binom_cdf(&s, 3), Err(Error::SizeCap(_))));
    }

    #[test]
    fn cdf_and_sf_are_complementary() {
        let s = BinomialSpec::new(300, 0.07).unwrap();
        for k in [0u64, 5, 21, 40, 300] {
            let total = binom_cdf_unchecked(&s, k) + binom_sf_unchecked(&s, k + 1);
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let s = BinomialSpec::new(10, 0.0).unwrap();
        assert_eq!(exact_binom_cdf(&s, 0).unwrap(), 1.0);
        let s = BinomialSpec::new(10, 1.0).unwrap();
        assert_eq!(exact_binom_cdf(&s, 9).unwrap(), 0.0);
        assert_eq!(exact_binom_sf(&s, 10).unwrap(), 1.0);
    }

    #[test]
    fn lower_bound_monotone_in_t() {
        for mu in [0.5, 3.0, 40.0] {
            let mut prev = 0.0;
            for k in 0..=50 {
                let b = lower_tail_bound(mu, mu * k as f64 / 50.0).unwrap();
                assert!(b >= prev);
                prev = b;
            }
        }
    }

    #[test]
    fn soundness_grid_passes() {
        let check = soundness_grid();
        assert_eq!(check.points, 2 * 9 * SOUNDNESS_POINTS);
        assert!(check.passed(), "{:?}", check.violations);
    }
}
