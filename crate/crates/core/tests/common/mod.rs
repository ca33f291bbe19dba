//! Shared test oracles, independent of the library's evaluation paths.
//!
//! - `kummer`: reference eigenvalues of −u″ + (l(l+1)/x² + x²)u = λu on
//!   (0, π] through the confluent-hypergeometric closed form of the regular
//!   solution, evaluated in fixed-point big-integer arithmetic so the
//!   violently cancelling series keeps hundreds of working digits.
//! - `bessel_zero`: zeros of J_ν through the integral representation,
//!   refined by bisection.

#![allow(dead_code)]

use num_bigint::BigInt;

// ---------------------------------------------------------------------------
// fixed-point arithmetic
// ---------------------------------------------------------------------------

/// Value = int / 10^digits.
#[derive(Clone, Debug)]
pub struct Fx {
    int: BigInt,
}

pub struct FxCtx {
    pub digits: u32,
    scale: BigInt,
}

impl FxCtx {
    pub fn new(digits: u32) -> Self {
        FxCtx { digits, scale: BigInt::from(10u8).pow(digits) }
    }

    pub fn from_f64(&self, v: f64) -> Fx {
        // exact: v = m·2^e with integer m
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        if v == 0.0 {
            return Fx { int: BigInt::from(0) };
        }
        let (m, e) = if exp_bits == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mut int = BigInt::from(m) * &self.scale * BigInt::from(sign);
        if e >= 0 {
            int <<= e as u32;
        } else {
            int >>= (-e) as u32; // truncation ≤ 1 ulp of the fixed point
        }
        Fx { int }
    }

    /// Parse a decimal string d.ddd… exactly (truncating beyond the scale).
    pub fn from_decimal(&self, text: &str) -> Fx {
        let (ip, fp) = match text.split_once('.') {
            Some((a, b)) => (a, b),
            None => (text, ""),
        };
        let mut int: BigInt = ip.parse::<BigInt>().unwrap() * &self.scale;
        let take = fp.len().min(self.digits as usize);
        if take > 0 {
            let frac: BigInt = fp[..take].parse().unwrap();
            int += frac * BigInt::from(10u8).pow(self.digits - take as u32);
        }
        Fx { int }
    }

    pub fn add(&self, a: &Fx, b: &Fx) -> Fx {
        Fx { int: &a.int + &b.int }
    }

    pub fn sub(&self, a: &Fx, b: &Fx) -> Fx {
        Fx { int: &a.int - &b.int }
    }

    pub fn mul(&self, a: &Fx, b: &Fx) -> Fx {
        Fx { int: (&a.int * &b.int) / &self.scale }
    }

    pub fn div(&self, a: &Fx, b: &Fx) -> Fx {
        Fx { int: (&a.int * &self.scale) / &b.int }
    }

    pub fn div_u64(&self, a: &Fx, d: u64) -> Fx {
        Fx { int: &a.int / BigInt::from(d) }
    }

    pub fn is_negative(&self, a: &Fx) -> bool {
        a.int.sign() == num_bigint::Sign::Minus
    }

    pub fn abs_lt_pow10(&self, a: &Fx, neg_exp: u32) -> bool {
        // |a| < 10^{-neg_exp}
        let thresh = BigInt::from(10u8).pow(self.digits.saturating_sub(neg_exp));
        a.int.magnitude() < thresh.magnitude()
    }

    pub fn to_f64(&self, a: &Fx) -> f64 {
        // good to ~15 digits, plenty for sign decisions and spot checks
        let s = a.int.to_string();
        let neg = s.starts_with('-');
        let digits = if neg { &s[1..] } else { &s[..] };
        let mantissa: f64 = digits[..digits.len().min(17)].parse().unwrap_or(0.0);
        let exp = digits.len() as i32 - digits.len().min(17) as i32 - self.digits as i32;
        let v = mantissa * 10f64.powi(exp);
        if neg {
            -v
        } else {
            v
        }
    }
}

const PI_400: &str = "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679821480865132823066470938446095505822317253594081284811174502841027019385211055596446229489549303819644288109756659334461284756482337867831652712019091456485669234603486104543266482133936072602491412737245870066063155881748815209209628292540917153643678925903600113305305488204665213841469519415116094";

/// M(a, b, z) in fixed point; a, b are exact f64 values, z is passed as Fx.
fn kummer_m(ctx: &FxCtx, a: f64, b: f64, z: &Fx, max_terms: usize) -> Fx {
    let mut term = ctx.from_f64(1.0);
    let mut sum = term.clone();
    let mut quiet = 0usize;
    for n in 0..max_terms {
        // term *= (a+n) z / ((b+n)(n+1))
        let an = ctx.from_f64(a + n as f64);
        let bn = ctx.from_f64(b + n as f64);
        term = ctx.mul(&term, &an);
        term = ctx.mul(&term, z);
        term = ctx.div(&term, &bn);
        term = ctx.div_u64(&term, (n + 1) as u64);
        sum = ctx.add(&sum, &term);
        if ctx.abs_lt_pow10(&term, 40) {
            quiet += 1;
            if quiet >= 4 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    sum
}

/// Exact characteristic value of the oscillator-type problem at the endpoint
/// b = π: the regular solution is x^{l+1} e^{−x²/2} M((2l+3−λ)/4, l+3/2, x²).
/// Returns the Dirichlet trace M(a,b,π²) or the Neumann trace
/// (l+1−π²) M(a,b,π²) + 2π² (a/b) M(a+1,b+1,π²), both up to positive factors.
fn characteristic_exact(l: f64, lambda: f64, neumann: bool) -> f64 {
    let a = (2.0 * l + 3.0 - lambda) / 4.0;
    let b = l + 1.5;
    let z_mag = a.abs().max(1.0) * 9.87;
    let digits = 60 + (2.0 * z_mag.sqrt() / std::f64::consts::LN_10).ceil() as u32;
    let ctx = FxCtx::new(digits);
    let pi = ctx.from_decimal(PI_400);
    let z = ctx.mul(&pi, &pi);
    let max_terms = 600 + 2 * a.abs() as usize;
    let m0 = kummer_m(&ctx, a, b, &z, max_terms);
    if !neumann {
        return ctx.to_f64(&m0);
    }
    let m1 = kummer_m(&ctx, a + 1.0, b + 1.0, &z, max_terms);
    let c0 = ctx.sub(&ctx.from_f64(l + 1.0), &z);
    let t0 = ctx.mul(&c0, &m0);
    let two_z = ctx.add(&z, &z);
    let a_over_b = ctx.div(&ctx.from_f64(a), &ctx.from_f64(b));
    let t1 = ctx.mul(&ctx.mul(&two_z, &a_over_b), &m1);
    ctx.to_f64(&ctx.add(&t0, &t1))
}

/// Sign probe of the exact characteristic (test diagnostics).
pub fn kummer_sign_probe(l: f64, neumann: bool, lambda: f64) -> f64 {
    characteristic_exact(l, lambda, neumann)
}

/// Reference eigenvalue nearest `approx`: bisection of the exact
/// characteristic function over [approx − radius, approx + radius].
pub fn kummer_eigenvalue_near(l: f64, neumann: bool, approx: f64, radius: f64) -> f64 {
    let mut lo = approx - radius;
    let mut hi = approx + radius;
    let mut flo = characteristic_exact(l, lo, neumann);
    let mut fhi = characteristic_exact(l, hi, neumann);
    let mut widen = 0;
    while flo.signum() == fhi.signum() {
        lo -= radius;
        hi += radius;
        flo = characteristic_exact(l, lo, neumann);
        fhi = characteristic_exact(l, hi, neumann);
        widen += 1;
        assert!(widen < 6, "no sign change near λ ≈ {approx} (l = {l}, neumann = {neumann})");
    }
    let _ = fhi;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // f64 resolution reached
        }
        let fm = characteristic_exact(l, mid, neumann);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Bessel zeros by the integral representation
// ---------------------------------------------------------------------------

/// J_ν(x) = (1/π)∫₀^π cos(νθ − x sin θ) dθ − (sin νπ/π)∫₀^∞ e^{−x sinh t − νt} dt.
fn bessel_j_integral(nu: f64, x: f64) -> f64 {
    let n = 40_000usize;
    let h = std::f64::consts::PI / n as f64;
    let f = |theta: f64| (nu * theta - x * theta.sin()).cos();
    let mut acc = f(0.0) + f(std::f64::consts::PI);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    let mut val = acc * h / 3.0 / std::f64::consts::PI;

    let s = (nu * std::f64::consts::PI).sin();
    if s.abs() > 1e-14 {
        // decaying tail; integrate to where the integrand is ~e^{-60}
        let t_max = (60.0f64 / x.max(1.0)).asinh() + 1.0;
        let m = 4000usize;
        let ht = t_max / m as f64;
        let g = |t: f64| (-x * t.sinh() - nu * t).exp();
        let mut tail = g(0.0) + g(t_max);
        for i in 1..m {
            tail += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * ht);
        }
        val -= s / std::f64::consts::PI * tail * ht / 3.0;
    }
    val
}

/// n-th positive zero of J_ν, located independently of the library.
pub fn bessel_zero_oracle(nu: f64, n: usize) -> f64 {
    let guess = (n as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
    let mut lo = (guess - 1.3).max(0.1);
    let mut hi = guess + 1.3;
    let mut flo = bessel_j_integral(nu, lo);
    let mut tries = 0;
    while bessel_j_integral(nu, hi).signum() == flo.signum() {
        lo -= 0.4;
        hi += 0.4;
        flo = bessel_j_integral(nu, lo);
        tries += 1;
        assert!(tries < 8, "no bracket for j_{nu},{n}");
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = bessel_j_integral(nu, mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// paper reference values (Example 7.1 tables)
// ---------------------------------------------------------------------------

pub const DIRICHLET_L_NEG_HALF: [(usize, f64); 8] = [
    (1, 2.001805251890),
    (2, 6.103446111613),
    (3, 10.956972252829),
    (5, 25.937702288545),
    (10, 98.393217235689),
    (20, 393.38152313544),
    (50, 2478.3783027695),
    (100, 9953.3778488114),
];

pub const DIRICHLET_L_POS_HALF: [(usize, f64); 8] = [
    (1, 4.015495482801),
    (2, 8.347478350031),
    (3, 13.920779935452),
    (5, 30.849480217032),
    (10, 108.29669952501),
    (20, 413.28164218574),
    (50, 2528.2772347906),
    (100, 10053.276592794),
];

pub const NEUMANN_L_NEG_HALF: [(usize, f64); 8] = [
    (1, 1.997907144139),
    (2, 5.868682400048),
    (3, 9.324466618141),
    (5, 21.551367196747),
    (10, 88.908090757514),
    (20, 373.884502196653),
    (50, 2428.87873010418),
    (100, 9853.87795220908),
];

pub const NEUMANN_L_POS_HALF: [(usize, f64); 8] = [
    (1, 3.980969145691),
    (2, 7.612337613278),
    (3, 11.447054658026),
    (5, 25.935713162142),
    (10, 98.310440283471),
    (20, 393.284522228857),
    (50, 2478.27765466469),
    (100, 9754.77670125413),
];

pub const LISTED_INDICES: [usize; 8] = [1, 2, 3, 5, 10, 20, 50, 100];
