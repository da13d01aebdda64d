//! Independent oracles for the verification suites. Everything here is
//! deliberately built on different numerics than the library: compensated
//! double-double arithmetic for binomial tails and direct Simpson
//! integration of the Beta density for distribution checks.

// shared across test targets; each target uses its own subset
#![allow(dead_code)]

/// Double-double value: hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

pub fn dd_add(a: Dd, b: Dd) -> Dd {
    let (s, e) = two_sum(a.hi, b.hi);
    let e = e + a.lo + b.lo;
    let (hi, lo) = two_sum(s, e);
    Dd { hi, lo }
}

pub fn dd_mul(a: Dd, b: Dd) -> Dd {
    let (p, e) = two_prod(a.hi, b.hi);
    let e = e + a.hi * b.lo + a.lo * b.hi;
    let (hi, lo) = two_sum(p, e);
    Dd { hi, lo }
}

pub fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi / b.hi;
    let r = dd_add(a, dd_neg(dd_mul(b, Dd::from(q1))));
    let q2 = (r.hi + r.lo) / b.hi;
    let (hi, lo) = two_sum(q1, q2);
    Dd { hi, lo }
}

fn dd_neg(a: Dd) -> Dd {
    Dd {
        hi: -a.hi,
        lo: -a.lo,
    }
}

/// (1 - r) in double-double, exact when r <= 1.
pub fn dd_one_minus(r: f64) -> Dd {
    let (hi, lo) = two_sum(1.0, -r);
    Dd { hi, lo }
}

/// High-precision binomial survival ℙ(Y >= k) for Y ~ Binomial(n, r):
/// the pmf recurrence and the summation both run in double-double, with
/// pmf(0) = (1-r)^n raised by compensated squaring.
pub fn oracle_binom_sf(n: u64, r: f64, k: u64) -> f64 {
    assert!(n >= 1 && (0.0..1.0).contains(&r) && r > 0.0);
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    // pmf(0) = (1-r)^n by square-and-multiply in double-double
    let mut base = dd_one_minus(r);
    let mut exp = n;
    let mut pmf = Dd::from(1.0);
    while exp > 0 {
        if exp & 1 == 1 {
            pmf = dd_mul(pmf, base);
        }
        base = dd_mul(base, base);
        exp >>= 1;
    }
    assert!(
        pmf.hi > 1e-290,
        "oracle underflow: choose a smaller n*|ln(1-r)|"
    );

    let r_dd = Dd::from(r);
    let q_dd = dd_one_minus(r);
    let mut sum = Dd::from(0.0);
    let mut term = pmf;
    for y in 0..=n {
        if y >= k {
            sum = dd_add(sum, term);
        }
        if y < n {
            // pmf(y+1) = pmf(y) * (n-y) r / ((y+1)(1-r))
            let num = dd_mul(Dd::from((n - y) as f64), r_dd);
            let den = dd_mul(Dd::from((y + 1) as f64), q_dd);
            term = dd_div(dd_mul(term, num), den);
        }
    }
    sum.to_f64()
}

/// Beta(a, b) density, in log space to survive b ~ 10^4.
pub fn beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let ln_b = ln_beta_fn(a, b);
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp()
}

/// ln B(a, b) from Stirling's series with argument shifting; an
/// implementation path distinct from the library's Lanczos fit.
pub fn ln_beta_fn(a: f64, b: f64) -> f64 {
    ln_gamma_stirling(a) + ln_gamma_stirling(b) - ln_gamma_stirling(a + b)
}

fn ln_gamma_stirling(x: f64) -> f64 {
    // shift to z >= 12 where the series is accurate, then divide back out
    let mut z = x;
    let mut shift = 0.0;
    while z < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    // Stirling series with Bernoulli terms through z^-9
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0
        + inv * inv2 * inv2 * inv2 * inv2 / 1188.0;
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// ∫_0^x Beta(a,b) pdf via composite Simpson on a uniform grid.
pub fn beta_cdf_by_simpson(x: f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels.is_multiple_of(2));
    let h = x / panels as f64;
    let mut acc = beta_pdf(0.0, a, b) + beta_pdf(x, a, b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * beta_pdf(i as f64 * h, a, b);
    }
    acc * h / 3.0
}

/// Quantile by bisection over the Simpson CDF oracle.
pub fn beta_quantile_by_simpson(q: f64, a: f64, b: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if beta_cdf_by_simpson(mid, a, b, 40_000) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
