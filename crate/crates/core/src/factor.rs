//! Integer factorization: trial division to 2^20, then Brent's variant of
//! Pollard rho with a hard iteration budget. Primality is Miller-Rabin with
//! the first thirteen prime bases (deterministic below 3.3e24) and, above
//! that, an additional strong Lucas test (Baillie-PSW).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1 << 20;
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
/// Smallest strong pseudoprime to all of `MR_BASES`.
const MR_DETERMINISTIC_BELOW: u128 = 3_317_044_064_679_887_385_961_981;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

#[derive(Clone, Debug)]
pub struct FactorConfig {
    /// Inputs with `|n| > 2^bound_bits` are rejected.
    pub bound_bits: u32,
    /// Total rho iterations allowed per composite cofactor.
    pub rho_budget: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            bound_bits: 128,
            rho_budget: 1 << 22,
        }
    }
}

/// Prime factorization of `|n|` in ascending prime order.
pub fn factor(n: &BigInt) -> Result<BTreeMap<BigUint, u32>> {
    factor_with(n, &FactorConfig::default())
}

pub fn factor_with(n: &BigInt, cfg: &FactorConfig) -> Result<BTreeMap<BigUint, u32>> {
    if n.is_zero() {
        return Err(Error::FactorZero);
    }
    let mut m = n.magnitude().clone();
    if m > (BigUint::one() << cfg.bound_bits) {
        return Err(Error::FactorizationBound {
            n: m,
            bound_bits: cfg.bound_bits,
        });
    }
    let mut out = BTreeMap::new();

    if let Some(small) = m.to_u64() {
        let (rest, done) = trial_divide_u64(small, &mut out);
        if done {
            return Ok(out);
        }
        m = BigUint::from(rest);
    } else {
        let (rest, done) = trial_divide_big(m, &mut out);
        if done {
            return Ok(out);
        }
        m = rest;
    }

    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            *out.entry(c).or_insert(0) += 1;
            continue;
        }
        let d = find_factor(&c, cfg.rho_budget).ok_or_else(|| Error::FactorizationBound {
            n: c.clone(),
            bound_bits: cfg.bound_bits,
        })?;
        let e = &c / &d;
        stack.push(d);
        stack.push(e);
    }
    Ok(out)
}

/// Returns the unfactored cofactor and whether it is known to be 1 or prime
/// (in which case it has already been recorded).
fn trial_divide_u64(mut m: u64, out: &mut BTreeMap<BigUint, u32>) -> (u64, bool) {
    for &p in small_primes() {
        let p = p as u64;
        if p * p > m {
            if m > 1 {
                *out.entry(BigUint::from(m)).or_insert(0) += 1;
            }
            return (1, true);
        }
        while m.is_multiple_of(p) {
            *out.entry(BigUint::from(p)).or_insert(0) += 1;
            m /= p;
        }
    }
    if m == 1 {
        return (1, true);
    }
    let limit = TRIAL_LIMIT as u64;
    if m < limit * limit {
        *out.entry(BigUint::from(m)).or_insert(0) += 1;
        return (1, true);
    }
    (m, false)
}

fn trial_divide_big(mut m: BigUint, out: &mut BTreeMap<BigUint, u32>) -> (BigUint, bool) {
    for &p in small_primes() {
        if let Some(small) = m.to_u64() {
            let (rest, done) = trial_divide_u64(small, out);
            return (BigUint::from(rest), done);
        }
        let pb = BigUint::from(p);
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            *out.entry(pb.clone()).or_insert(0) += 1;
            m = q;
        }
    }
    if m.is_one() {
        return (m, true);
    }
    (m, false)
}

fn find_factor(n: &BigUint, budget: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    if let Some(small) = n.to_u64() {
        let mut spent = 0;
        for c in 1.. {
            if spent >= budget {
                return None;
            }
            let (found, used) = rho_u64(small, c, budget - spent);
            spent += used;
            if let Some(d) = found {
                return Some(BigUint::from(d));
            }
        }
        None
    } else {
        let mut spent = 0;
        for c in 1u64.. {
            if spent >= budget {
                return None;
            }
            let (found, used) = rho_big(n, c, budget - spent);
            spent += used;
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

fn mulmod64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod64(r, b, n);
        }
        b = mulmod64(b, b, n);
        e >>= 1;
    }
    r
}

fn gcd64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

// Brent cycle detection on x -> x^2 + c; returns (factor, iterations used).
fn rho_u64(n: u64, c: u64, budget: u64) -> (Option<u64>, u64) {
    let f = |x: u64| (mulmod64(x, x, n) + c) % n;
    let m = 128u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    let mut used = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        used += r;
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mulmod64(q, x.abs_diff(y), n);
            }
            used += steps;
            g = gcd64(q, n);
            k += m;
        }
        r *= 2;
        if used > budget {
            return (None, used);
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            used += 1;
            g = gcd64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        (None, used)
    } else {
        (Some(g), used)
    }
}

fn rho_big(n: &BigUint, c: u64, budget: u64) -> (Option<BigUint>, u64) {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let m = 128u64;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = BigUint::zero();
    let mut ys = BigUint::zero();
    let mut used = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        used += r;
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = (&q * diff(&x, &y)) % n;
            }
            used += steps;
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if used > budget {
            return (None, used);
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            used += 1;
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        (None, used)
    } else {
        (Some(g), used)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = powmod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&BigInt::from(4)) == three && n.mod_floor(&BigInt::from(4)) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let nb = BigInt::from_biguint(Sign::Plus, n.clone());
    let root = n.sqrt();
    if &(&root * &root) == n {
        return false;
    }
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, &nb) {
            -1 => break,
            0
                if d.magnitude() != n => {
                    return false;
                }
            _ => {}
        }
        d = if d.sign() == Sign::Plus {
            -(d + 2i32)
        } else {
            -(d - 2i32)
        };
    }
    let p = BigInt::one();
    let q: BigInt = (BigInt::one() - &d) / 4i32;
    let half = |x: BigInt| -> BigInt {
        let x: BigInt = if x.is_odd() { x + &nb } else { x };
        let y: BigInt = x >> 1usize;
        y.mod_floor(&nb)
    };
    let np1: BigInt = &nb + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(&nb);
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(&nb);
        v = (&v * &v - &qk * 2u32).mod_floor(&nb);
        qk = (&qk * &qk).mod_floor(&nb);
        if k.bit(i) {
            let u1 = half(&p * &u + &v);
            let v1 = half(&d * &u + &p * &v);
            u = u1;
            v = v1;
            qk = (&qk * &q).mod_floor(&nb);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk * 2u32).mod_floor(&nb);
        qk = (&qk * &qk).mod_floor(&nb);
        if v.is_zero() {
            return true;
        }
    }
    false
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &small_primes()[..200] {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !miller_rabin_big(n) {
        return false;
    }
    if *n < BigUint::from(MR_DETERMINISTIC_BELOW) {
        return true;
    }
    strong_lucas(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: i128) -> Vec<(u128, u32)> {
        factor(&BigInt::from(n))
            .unwrap()
            .into_iter()
            .map(|(p, e)| (p.to_u128().unwrap(), e))
            .collect()
    }

    fn brute_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_examples() {
        assert_eq!(fac(60), vec![(2, 2), (3, 1), (5, 1)]);
        assert_eq!(fac(-7), vec![(7, 1)]);
        assert_eq!(fac(1), vec![]);
        assert!(brute_is_prime(1_000_000_007));
        assert_eq!(fac(1_000_000_007), vec![(1_000_000_007, 1)]);
    }

    #[test]
    fn zero_is_an_error() {
        assert!(matches!(factor(&BigInt::zero()), Err(Error::FactorZero)));
    }

    #[test]
    fn bound_is_enforced() {
        let too_big = BigInt::one() << 129;
        assert!(matches!(
            factor(&too_big),
            Err(Error::FactorizationBound { .. })
        ));
        let at_bound = BigInt::one() << 128;
        assert_eq!(factor(&at_bound).unwrap().values().sum::<u32>(), 128);
    }

    #[test]
    fn exhausted_budget_is_loud() {
        // Product of two primes near 2^40, beyond a tiny rho budget.
        let p = 1_099_511_627_791u64;
        let q = 1_099_511_628_401u64;
        assert!(is_prime(&BigUint::from(p)) && is_prime(&BigUint::from(q)));
        let n = BigInt::from(p as u128 * q as u128);
        let cfg = FactorConfig {
            bound_bits: 128,
            rho_budget: 10,
        };
        assert!(matches!(
            factor_with(&n, &cfg),
            Err(Error::FactorizationBound { .. })
        ));
        let f = factor(&n).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn semiprimes_split() {
        let p = 4_294_967_311u64; // next prime after 2^32
        let q = 1_000_000_007u64;
        let n = BigInt::from(p as u128 * q as u128 * q as u128);
        let f = factor(&n).unwrap();
        assert_eq!(f[&BigUint::from(p)], 1);
        assert_eq!(f[&BigUint::from(q)], 2);
    }

    #[test]
    fn primality_agrees_with_brute_force() {
        for n in 0..5000u64 {
            assert_eq!(is_prime(&BigUint::from(n)), brute_is_prime(n), "n = {n}");
        }
        // Strong pseudoprimes to several small bases.
        for n in [2047u64, 1_373_653, 25_326_001, 3_215_031_751, 3_825_123_056_546_413_051] {
            assert!(!is_prime(&BigUint::from(n)));
        }
    }

    #[test]
    fn large_primes_use_lucas_path() {
        let m89 = (BigUint::one() << 89) - 1u32;
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_prime(&m89));
        assert!(is_prime(&m127));
        assert!(strong_lucas(&m127));
        let comp = &m89 * BigUint::from(1_000_000_007u64);
        assert!(!is_prime(&comp));
        assert!(!is_prime(&(&m89 * &m89)));
        // 2^101 - 1 = 7432339208719 * 341117531003194129
        let m101 = (BigUint::one() << 101) - 1u32;
        assert!(!is_prime(&m101));
        assert!(!strong_lucas(&BigUint::from(7432339208719u64 * 3)));
    }

    #[test]
    fn reassembly_is_exact() {
        for n in [2u128 * 3 * 5 * 7 * 11 * 13 * 1_048_583, 999_999_999_989 * 97, 1 << 100] {
            let f = factor(&BigInt::from(n)).unwrap();
            let prod = f
                .iter()
                .fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e));
            assert_eq!(prod, BigUint::from(n));
        }
    }
}
