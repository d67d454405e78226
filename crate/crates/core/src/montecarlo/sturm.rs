//! Exact real-root counting with Sturm sequences over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ensemble::{EnsembleKind, RecurrenceTable};
use crate::error::{Error, Result};

/// Highest degree [`sturm_count`] accepts.
pub const STURM_DEGREE_CAP: usize = 30;

/// Integer polynomial, lowest degree first, no trailing zeros (the zero
/// polynomial is empty). Everything here only needs polynomials up to a
/// positive constant factor, which keeps the arithmetic in integers.
type Poly = Vec<BigInt>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Positive multiple with coprime coefficients.
fn primitive(p: Poly) -> Poly {
    let g = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

fn from_rationals(p: &[BigRational]) -> Poly {
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    primitive(trim(
        p.iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect(),
    ))
}

fn derivative(p: &Poly) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect(),
    )
}

/// Pseudo-division of a by b with positive multipliers: returns (q, r) with
/// m a = q b + r for some m > 0 and deg r < deg b.
fn pseudo_divide(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = b.len() - 1;
    let lead = &b[db];
    let (scale, sign) = (lead.abs(), lead.signum());
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        // r <- |lead| r - sign(lead) lr x^shift b cancels the top term
        for c in r.iter_mut() {
            *c *= &scale;
        }
        for c in q.iter_mut() {
            *c *= &scale;
        }
        let factor = &sign * &lr;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &factor * bc;
        }
        q[shift] += factor;
        r = trim(r);
    }
    (trim(q), r)
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (primitive(a.clone()), primitive(b.clone()));
    while !y.is_empty() {
        let r = primitive(pseudo_divide(&x, &y).1);
        x = y;
        y = r;
    }
    x
}

/// Sign of p(num / den) for den > 0.
fn sign_at(p: &Poly, num: &BigInt, den: &BigInt) -> i8 {
    let Some(top) = p.last() else {
        return 0;
    };
    // den^d p(num/den) by homogeneous Horner
    let mut acc = top.clone();
    let mut den_pow = BigInt::one();
    for c in p.iter().rev().skip(1) {
        den_pow *= den;
        acc = acc * num + c * &den_pow;
    }
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

fn sign_variations(chain: &[Poly], x: &BigRational) -> usize {
    let (num, den) = (x.numer(), x.denom());
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let s = sign_at(p, num, den);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in (a, b] of the polynomial with monomial
/// coefficients `coeffs` (lowest degree first).
pub fn sturm_count(coeffs: &[BigRational], a: &BigRational, b: &BigRational) -> Result<usize> {
    if a >= b {
        return Err(Error::domain("sturm_count needs a < b"));
    }
    let p = from_rationals(coeffs);
    match p.len().checked_sub(1) {
        None => return Err(Error::domain("the zero polynomial has no isolated roots")),
        Some(d) if d > STURM_DEGREE_CAP => {
            return Err(Error::domain(format!(
                "degree {d} exceeds the Sturm cap of {STURM_DEGREE_CAP}"
            )))
        }
        Some(0) => return Ok(0),
        _ => {}
    }
    // square-free part
    let mut q = primitive(pseudo_divide(&p, &gcd(&p, &derivative(&p))).0);
    // a root at a itself lies outside (a, b]
    if sign_at(&q, a.numer(), a.denom()) == 0 {
        q = primitive(pseudo_divide(&q, &vec![-a.numer().clone(), a.denom().clone()]).0);
        if q.len() <= 1 {
            return Ok(0);
        }
    }
    let dq = primitive(derivative(&q));
    let mut chain = vec![q, dq];
    loop {
        let n = chain.len();
        let r = pseudo_divide(&chain[n - 2], &chain[n - 1]).1;
        if r.is_empty() {
            break;
        }
        chain.push(primitive(r.into_iter().map(|c| -c).collect()));
    }
    Ok(sign_variations(&chain, a) - sign_variations(&chain, b))
}

/// Monomial coefficients of sum_j coeffs[j] p_j for a Jacobi ensemble.
///
/// The monic Jacobi polynomials P_j have rational recurrence coefficients
/// whenever alpha and beta are (every f64 is), so they are generated
/// exactly; p_j = gamma_j P_j with gamma_j the leading coefficient, and each
/// weight coeffs[j] * gamma_j is rounded once in f64 before being taken as
/// an exact rational.
pub fn monomial_from_orthonormal(table: &RecurrenceTable, coeffs: &[f64]) -> Result<Vec<BigRational>> {
    let EnsembleKind::Jacobi { alpha, beta } = table.kind() else {
        return Err(Error::Unsupported(
            "monomial conversion needs a Jacobi ensemble".into(),
        ));
    };
    let n = coeffs.len().checked_sub(1).ok_or_else(|| Error::domain("no coefficients"))?;
    if n > STURM_DEGREE_CAP {
        return Err(Error::domain(format!(
            "degree {n} exceeds the Sturm cap of {STURM_DEGREE_CAP}"
        )));
    }
    let rat = |v: f64| BigRational::from_float(v).expect("finite");
    let (al, be) = (rat(alpha), rat(beta));
    let int = |k: usize| BigRational::from_integer(BigInt::from(k));
    let s = &al + &be;
    let two = int(2);
    let four = int(4);
    // monic recurrence P_{k+1} = (x - a_k) P_k - beta_k P_{k-1}
    let a_k = |k: usize| -> BigRational {
        if k == 0 {
            (&be - &al) / (&s + &two)
        } else {
            let t = &two * int(k) + &s;
            (&be * &be - &al * &al) / (&t * (&t + &two))
        }
    };
    let beta_k = |k: usize| -> BigRational {
        let one = BigRational::one();
        if k == 1 {
            &four * (&one + &al) * (&one + &be) / ((&s + &two) * (&s + &two) * (&s + int(3)))
        } else {
            let kk = int(k);
            let t = &two * &kk + &s;
            &four * &kk * (&kk + &al) * (&kk + &be) * (&kk + &s) / (&t * &t * (&t + &one) * (&t - &one))
        }
    };

    let mut out = vec![BigRational::zero(); n + 1];
    let mut prev: Vec<BigRational> = Vec::new();
    let mut cur: Vec<BigRational> = vec![BigRational::one()];
    let mut gamma = table.p0();
    for (j, &c) in coeffs.iter().enumerate() {
        if j > 0 {
            gamma /= table.b(j);
            let mut next = vec![BigRational::zero(); j + 1];
            let ak = a_k(j - 1);
            for (i, ci) in cur.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= &ak * ci;
            }
            if j >= 2 {
                let bk = beta_k(j - 1);
                for (i, pi) in prev.iter().enumerate() {
                    next[i] -= &bk * pi;
                }
            }
            prev = std::mem::replace(&mut cur, next);
        }
        let w = rat(c * gamma);
        for (i, ci) in cur.iter().enumerate() {
            out[i] += &w * ci;
        }
    }
    Ok(out)
}
