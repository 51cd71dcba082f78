//! Beta constants: closed forms, truncated-sum estimators and the
//! intersection-number lower bound built from `g`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, pow, rat_string, sqrt_interval, Interval, Rat};
use crate::blowup::{config_classes, intersect_powers, BlowupConfig};
use crate::error::{Error, Result};

/// `x^3/3` on `(0, 1]`, `x - 2/3` on `[1, inf)`.
pub fn g_aut(x: &Rat) -> Result<Rat> {
    if !x.is_positive() {
        return Err(Error::OutOfRange(format!("g requires x > 0, got {x}")));
    }
    Ok(if *x <= Rat::one() {
        pow(x, 3) / int(3)
    } else {
        x - Rat::new(2.into(), 3.into())
    })
}

fn factorial(n: u32) -> Rat {
    (1..=n as i64).map(int).product()
}

/// Intersection numbers `A^n`, `A^{n-1}.B`, `A^{n-2}.B^2` feeding the lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutissierInput {
    pub n: u32,
    #[serde(with = "rat_string")]
    pub a_n: Rat,
    #[serde(with = "rat_string")]
    pub a_n1_b: Rat,
    #[serde(with = "rat_string")]
    pub a_n2_b2: Rat,
}

impl AutissierInput {
    pub fn new(n: u32, a_n: Rat, a_n1_b: Rat, a_n2_b2: Rat) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("n must be >= 2, got {n}")));
        }
        if !a_n.is_positive() {
            return Err(Error::OutOfRange("A^n must be positive".into()));
        }
        if a_n1_b.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if a_n1_b.is_negative() {
            return Err(Error::OutOfRange("A^{n-1}.B must be positive".into()));
        }
        Ok(AutissierInput {
            n,
            a_n,
            a_n1_b,
            a_n2_b2,
        })
    }

    /// `A = l*sum_{i<=n} H~_i + H~_{n+1}` and `B = H~_index` on the marked configuration.
    pub fn marked(n: u32, ell: u64, index: usize) -> Result<Self> {
        let cfg = BlowupConfig::marked(n)?;
        if index >= cfg.num_hyperplanes() {
            return Err(Error::OutOfRange(format!("hyperplane index {index} >= {}", cfg.num_hyperplanes())));
        }
        let cc = config_classes(&cfg, Some(ell))?;
        let b = &cc.tilde[index];
        Self::new(
            n,
            intersect_powers(&[(&cc.main, n)])?,
            intersect_powers(&[(&cc.main, n - 1), (b, 1)])?,
            intersect_powers(&[(&cc.main, n - 2), (b, 2)])?,
        )
    }

    /// `b = A^n / (n A^{n-1}.B)`.
    pub fn b(&self) -> Rat {
        &self.a_n / (int(self.n as i64) * &self.a_n1_b)
    }

    /// `a = (n-1) A^{n-2}.B^2`.
    pub fn a(&self) -> Rat {
        int(self.n as i64 - 1) * &self.a_n2_b2
    }
}

/// `b/2 + (a/A^n) g(b)`.
pub fn beta_autissier_lower(input: &AutissierInput) -> Result<Rat> {
    let b = input.b();
    Ok(&b / int(2) + input.a() / &input.a_n * g_aut(&b)?)
}

/// Three-term lower bound for `h^0(NA - mB)`; the `O(N^{n-1})` remainder is
/// reported by order only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H0Lower {
    #[serde(with = "rat_string")]
    pub value: Rat,
    pub error_order: u32,
}

pub fn autissier_h0_lower(input: &AutissierInput, big_n: u64, m: u64, delta: &Rat) -> Result<H0Lower> {
    if big_n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    if int(m as i64) > delta * int(big_n as i64) {
        return Err(Error::OutOfRange(format!("m = {m} exceeds delta*N")));
    }
    Ok(H0Lower {
        value: h0_lower_value(input, big_n, m),
        error_order: input.n - 1,
    })
}

fn h0_lower_value(input: &AutissierInput, big_n: u64, m: u64) -> Rat {
    let n = input.n;
    let nn = int(big_n as i64);
    let mm = int(m as i64);
    let min_sq = if m <= big_n { &mm * &mm } else { &nn * &nn };
    &input.a_n / factorial(n) * pow(&nn, n) - &input.a_n1_b / factorial(n - 1) * pow(&nn, n - 1) * &mm
        + input.a() / factorial(n) * pow(&nn, n - 2) * min_sq
}

/// Sum of the three-term bound over `1 <= m <= floor(bN)`, normalized by
/// `N * (A^n/n!) N^n`. Tends to [`beta_autissier_lower`] as `N` grows.
pub fn beta_autissier_numeric(input: &AutissierInput, big_n: u64) -> Result<Rat> {
    if big_n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    let top = (input.b() * int(big_n as i64)).floor().to_integer();
    let top: u64 = top
        .try_into()
        .map_err(|_| Error::OutOfRange("b*N too large".into()))?;
    let sum: Rat = (1..=top).map(|m| h0_lower_value(input, big_n, m)).sum();
    let nn = int(big_n as i64);
    Ok(sum / (&nn * &input.a_n / factorial(input.n) * pow(&nn, input.n)))
}

fn check_cyclic(n: u32, q: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be >= 2, got {n}")));
    }
    if q < 3 * n as u64 {
        return Err(Error::OutOfRange(format!("q must be >= 3n, got q={q}, n={n}")));
    }
    Ok(())
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

fn volume_cyclic(n: u32, q: u64) -> BigInt {
    big(q).pow(n) - big(n as u64).pow(n) * big(q)
}

/// Closed-form beta for the cyclic configuration.
pub fn beta_exact_cyclic(n: u32, q: u64) -> Result<Rat> {
    check_cyclic(n, q)?;
    let (nb, qb) = (big(n as u64), big(q));
    let num = qb.pow(n + 1) - (&qb - &nb).pow(n + 1) - nb.pow(n + 2) - nb.pow(n + 1) * (&nb + 1) * (&qb - &nb);
    let den = (&nb + 1) * volume_cyclic(n, q);
    Ok(Rat::new(num, den))
}

/// `f(q) = (beta - 1)(n+1)(q^n - n^n q)` in expanded form.
pub fn f_poly(n: u32, q: i64) -> Result<Rat> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be >= 2, got {n}")));
    }
    let nb = big(n as u64);
    let qb = BigInt::from(q);
    let v = qb.pow(n + 1) - (&qb - &nb).pow(n + 1) - (&nb + 1) * qb.pow(n)
        - (&nb * &nb - 1) * nb.pow(n) * (&qb - &nb)
        + nb.pow(n + 1);
    Ok(Rat::from_integer(v))
}

/// `(qN - m)^n - n(nN - m)^n - n^n(q-n)N^n`, the leading part of `n! h^0(ND - mH~_i)`.
pub fn cyclic_section_count(n: u32, q: u64, big_n: u64, m: u64) -> BigInt {
    let (nb, qb, nn, mb) = (big(n as u64), big(q), big(big_n), big(m));
    (&qb * &nn - &mb).pow(n) - &nb * (&nb * &nn - &mb).pow(n) - nb.pow(n) * (&qb - &nb) * nn.pow(n)
}

/// Truncated-sum estimate of the cyclic beta at cutoff `N`. The value does
/// not depend on the hyperplane index, which is only range checked.
pub fn beta_numeric_cyclic(n: u32, q: u64, index: usize, big_n: u64) -> Result<Rat> {
    check_cyclic(n, q)?;
    if index as u64 >= q {
        return Err(Error::OutOfRange(format!("hyperplane index {index} >= q = {q}")));
    }
    if big_n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    let mut sum = BigInt::zero();
    for m in 1..=n as u64 * big_n {
        let t = cyclic_section_count(n, q, big_n, m);
        if t.is_positive() {
            sum += t;
        }
    }
    let den = big(big_n) * volume_cyclic(n, q) * big(big_n).pow(n);
    Ok(Rat::new(sum, den))
}

/// Enclosure of `(1/l)(1 + 1/(l sqrt l))` of width at most about `1/scale`.
pub fn countinglambda_rhs(ell: u64, scale: &BigInt) -> Result<Interval> {
    if ell == 0 {
        return Err(Error::OutOfRange("ell must be >= 1".into()));
    }
    let l = int(ell as i64);
    let s = sqrt_interval(&l, scale);
    let at = |root: &Rat| (Rat::one() + (&l * root).recip()) / &l;
    Ok(Interval {
        lo: at(&s.hi),
        hi: at(&s.lo),
    })
}

/// Right-hand sides the marked-configuration bounds are compared against.
pub fn marked_target(n: u32, ell: u64, index: usize) -> Rat {
    let nn = int(n as i64);
    let l = int(ell as i64);
    let base = (&nn + Rat::one()) * &l / (int(2) * &nn);
    if index <= n as usize {
        base
    } else {
        base - &l / (int(2) * &nn * pow(&(&nn + Rat::one()), n - 2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaReport {
    pub config: String,
    #[serde(with = "crate::arith::opt_rat_string")]
    pub exact: Option<Rat>,
    #[serde(with = "crate::arith::opt_rat_string")]
    pub lower_bound: Option<Rat>,
    pub cutoff: u64,
    #[serde(with = "rat_string")]
    pub numeric: Rat,
    pub claim: String,
    pub holds: bool,
}

impl BetaReport {
    pub fn cyclic(n: u32, q: u64, big_n: u64) -> Result<Self> {
        let exact = beta_exact_cyclic(n, q)?;
        let numeric = beta_numeric_cyclic(n, q, 0, big_n)?;
        Ok(BetaReport {
            config: format!("cyclic n={n} q={q}"),
            holds: exact > Rat::one(),
            exact: Some(exact),
            lower_bound: None,
            cutoff: big_n,
            numeric,
            claim: "beta > 1".into(),
        })
    }

    pub fn marked(n: u32, ell: u64, index: usize, big_n: u64) -> Result<Self> {
        let input = AutissierInput::marked(n, ell, index)?;
        let bound = beta_autissier_lower(&input)?;
        let target = marked_target(n, ell, index);
        Ok(BetaReport {
            config: format!("marked n={n} ell={ell} i={}", index + 1),
            exact: None,
            holds: bound > target,
            claim: format!("lower bound > {}", crate::arith::fmt_rat(&target)),
            lower_bound: Some(bound),
            cutoff: big_n,
            numeric: beta_autissier_numeric(&input, big_n)?,
        })
    }
}
