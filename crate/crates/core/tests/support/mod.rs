//! High-precision fixed-point oracle for the ACO_R rank weights.

use num_bigint::BigInt;

const DIGITS: u32 = 60;

fn scale() -> BigInt {
    BigInt::from(10).pow(DIGITS)
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    a * b / scale()
}

fn div(a: &BigInt, b: &BigInt) -> BigInt {
    a * scale() / b
}

/// `atan(1/n)` by its alternating series.
fn atan_inv(n: u64) -> BigInt {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = scale() / &n;
    let mut sum = BigInt::from(0);
    let mut k = 0u64;
    while power != BigInt::from(0) {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

fn pi() -> BigInt {
    BigInt::from(16) * atan_inv(5) - BigInt::from(4) * atan_inv(239)
}

/// `exp(x)` for a fixed-point `x ≥ 0` of moderate size.
fn exp(x: &BigInt) -> BigInt {
    let mut term = scale();
    let mut sum = scale();
    let mut k = 1u64;
    while term != BigInt::from(0) {
        term = mul(&term, x) / BigInt::from(k);
        sum += &term;
        k += 1;
    }
    sum
}

fn sqrt(x: &BigInt) -> BigInt {
    (x * scale()).sqrt()
}

fn to_f64(x: &BigInt) -> f64 {
    let s = x.to_string();
    let digits = DIGITS as usize;
    let padded = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = padded.split_at(padded.len() - digits);
    format!("{int}.{frac}").parse().unwrap()
}

/// Weights `exp(-(r-1)² / (2 (qQ)²)) / (qQ √(2π))` for `q = num/den`.
pub fn precise_weights(archive_size: u64, q_num: u64, q_den: u64) -> Vec<f64> {
    // qQ as a fixed-point number.
    let qq = BigInt::from(q_num * archive_size) * scale() / BigInt::from(q_den);
    let norm_den = mul(&qq, &sqrt(&(BigInt::from(2) * pi())));
    let two_qq2 = BigInt::from(2) * mul(&qq, &qq);
    (0..archive_size)
        .map(|r| {
            let r2 = BigInt::from(r * r) * scale();
            let e = exp(&div(&r2, &two_qq2));
            to_f64(&div(&scale(), &mul(&e, &norm_den)))
        })
        .collect()
}

/// Probabilities from the precise weights, normalized in fixed point.
#[allow(dead_code)]
pub fn precise_probabilities(archive_size: u64, q_num: u64, q_den: u64) -> Vec<f64> {
    let qq = BigInt::from(q_num * archive_size) * scale() / BigInt::from(q_den);
    let two_qq2 = BigInt::from(2) * mul(&qq, &qq);
    // The common factor cancels; normalize exp terms directly.
    let terms: Vec<BigInt> = (0..archive_size)
        .map(|r| {
            let r2 = BigInt::from(r * r) * scale();
            div(&scale(), &exp(&div(&r2, &two_qq2)))
        })
        .collect();
    let total: BigInt = terms.iter().sum();
    terms.iter().map(|t| to_f64(&div(t, &total))).collect()
}

#[allow(dead_code)]
pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sanity check of the oracle's own building blocks.
#[allow(dead_code)]
pub fn check_constants() {
    assert_eq!(to_f64(&pi()), std::f64::consts::PI);
    assert_eq!(to_f64(&exp(&scale())), std::f64::consts::E);
}
