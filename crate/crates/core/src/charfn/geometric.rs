//! Telescoped geometric sums in `z = Ψ(t)`:
//!
//! ```text
//! F(z, n)  = Σ_{k=1}^{n−1} (z^k − 1)
//! S₁(z, n) = Σ_{j=1}^{n−1} j z^{j−1}        (so F′ = Ψ′ · S₁)
//! ```
//!
//! Near `z = 1` the textbook closed forms cancel to first and second order
//! respectively. With `u = z − 1` and `L = log(1+u)` they are rewritten as
//!
//! ```text
//! F  = [expm1mx(nL) + n·log1pmx(u)] / u
//! S₁ = [(n−1)·u·expm1((n−1)L) − expm1mx((n−1)L) − (n−1)·log1pmx(u)] / u²
//! ```
//!
//! where `expm1mx(w) = eʷ − 1 − w` and `log1pmx(u) = log(1+u) − u` are
//! evaluated by their power series for small arguments.

use num_complex::Complex64;

/// Below this `|Ψ − 1|` the sums are accumulated term by term.
pub const DIRECT_THRESHOLD: f64 = 1e-8;
/// Above this `|u|` the plain closed forms are already well conditioned.
const PLAIN_THRESHOLD: f64 = 0.5;

/// Returns `(F, S₁)`.
pub fn telescoped_sums(z: Complex64, n: u64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    if n <= 1 {
        return (zero, zero);
    }
    let u = z - 1.0;
    let au = u.norm();
    if au <= DIRECT_THRESHOLD {
        direct_sums(z, n)
    } else if au >= PLAIN_THRESHOLD {
        plain_sums(z, n)
    } else {
        stable_sums(u, n)
    }
}

/// Term-by-term accumulation; `z^k − 1 = z(z^{k−1} − 1) + u` avoids the
/// cancellation of forming `z^k` first.
pub fn direct_sums(z: Complex64, n: u64) -> (Complex64, Complex64) {
    let u = z - 1.0;
    let mut d = Complex64::new(0.0, 0.0); // z^k − 1
    let mut pow = Complex64::new(1.0, 0.0); // z^{j−1}
    let mut f = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    for j in 1..n {
        d = d * z + u;
        f += d;
        s1 += pow * j as f64;
        pow *= z;
    }
    (f, s1)
}

fn plain_sums(z: Complex64, n: u64) -> (Complex64, Complex64) {
    let u = z - 1.0;
    let nf = n as f64;
    let zn1 = z.powu((n - 1) as u32);
    let zn = zn1 * z;
    let f = (zn - 1.0 - u * nf) / u;
    let s1 = (zn * (nf - 1.0) - zn1 * nf + 1.0) / (u * u);
    (f, s1)
}

fn stable_sums(u: Complex64, n: u64) -> (Complex64, Complex64) {
    let nf = n as f64;
    let l = log1p(u);
    let lm = log1pmx(u);
    let f = (expm1mx(l * nf) + lm * nf) / u;
    let w = l * (nf - 1.0);
    let num = u * (nf - 1.0) * expm1(w) - expm1mx(w) - lm * (nf - 1.0);
    (f, num / (u * u))
}

pub fn expm1(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    let em1 = w.re.exp_m1();
    // e^a(cos b + i sin b) − 1 = expm1(a) cos b − 2 sin²(b/2) + i e^a sin b
    Complex64::new(em1 * c - 2.0 * half * half, w.re.exp() * s)
}

pub fn expm1mx(w: Complex64) -> Complex64 {
    if w.norm() < 0.7 {
        let mut term = w * w * 0.5;
        let mut sum = term;
        for k in 3..40 {
            term = term * w / k as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        expm1(w) - w
    }
}

pub fn log1p(u: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p();
    Complex64::new(re, u.im.atan2(1.0 + u.re))
}

pub fn log1pmx(u: Complex64) -> Complex64 {
    if u.norm() < 0.5 {
        // Σ_{k≥2} (−1)^{k+1} u^k / k
        let mut pow = u * u;
        let mut sum = -pow * 0.5;
        for k in 3..80 {
            pow *= -u;
            let term = -pow / k as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        log1p(u) - u
    }
}
