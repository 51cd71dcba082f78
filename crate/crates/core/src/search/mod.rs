//! S-integer divisibility predicates and exhaustive box searches.
//!
//! Projective searches enumerate coprime integer representatives with first
//! nonzero coordinate positive; any two representatives of a point over the
//! S-integers differ by an S-unit, which leaves every predicate unchanged.
//! Affine searches enumerate S-integers `a/d` with `|a| <= B` and `d` a
//! product of S-primes with exponents at most the denominator cap.

mod degeneracy;
mod solution;

pub use degeneracy::{
    degeneracy_report, growth_series, monomials, vanishing_forms, DegeneracyReport, DegreeRow, GrowthPoint,
    LineComponent,
};
pub use solution::{Predicate, SolutionRecord, SolutionSet};

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{vp_int, Rat};
use crate::error::{Error, Result};
use crate::factor::is_prime;
use crate::heights::{support_primes, ConditionMode, PlaceSet};
use crate::linalg::hyperplanes_general_position;
use crate::poly::MultiPoly;

/// Candidate tuples above this count are refused.
pub const MAX_TUPLES: u128 = 1_000_000_000;

/// The finite part of `S`; `O_S` is the ring of rationals whose denominators
/// only involve these primes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct SRing {
    primes: Vec<u64>,
}

impl SRing {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        primes.sort_unstable();
        primes.dedup();
        for &p in &primes {
            if !is_prime(&BigUint::from(p)) {
                return Err(Error::NotPrime(BigUint::from(p)));
            }
        }
        Ok(SRing { primes })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Comma-separated primes; `inf` entries are ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty() && !p.eq_ignore_ascii_case("inf")) {
            out.push(part.parse().map_err(|_| Error::Parse(format!("bad prime `{part}`")))?);
        }
        Self::new(out)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn places(&self) -> PlaceSet {
        PlaceSet::with_primes(self.primes.iter().map(|&p| BigUint::from(p))).expect("validated primes")
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.strip(x.denom()).is_one()
    }

    /// `n` with every S-prime factor removed.
    pub fn strip(&self, n: &BigInt) -> BigInt {
        let mut m = n.clone();
        for &p in &self.primes {
            let p = BigInt::from(p);
            while !m.is_zero() && m.is_multiple_of(&p) {
                m /= &p;
            }
        }
        m
    }

    fn strip_i128(&self, mut n: i128) -> i128 {
        for &p in &self.primes {
            let p = p as i128;
            while n != 0 && n % p == 0 {
                n /= p;
            }
        }
        n
    }

    fn is_s_prime(&self, p: &BigUint) -> bool {
        p.to_u64().is_some_and(|q| self.primes.binary_search(&q).is_ok())
    }

    fn denominators(&self, cap: u32) -> Vec<i64> {
        let mut ds = vec![1i64];
        for &p in &self.primes {
            let mut next = Vec::new();
            for &d in &ds {
                let mut v = d;
                for _ in 0..=cap {
                    next.push(v);
                    v = v.saturating_mul(p as i64);
                }
            }
            ds = next;
        }
        ds.sort_unstable();
        ds
    }
}

impl TryFrom<Vec<u64>> for SRing {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        SRing::new(v)
    }
}

impl From<SRing> for Vec<u64> {
    fn from(s: SRing) -> Self {
        s.primes
    }
}

/// Whether `b/a` lies in `O_S`.
pub fn divides_in_os(a: &Rat, b: &Rat, s: &SRing) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    for x in [a, b] {
        if !s.contains(x) {
            return Err(Error::NotSInteger(crate::arith::fmt_rat(x)));
        }
    }
    Ok(s.contains(&(b / a)))
}

fn divides_big(a: &BigInt, b: &BigInt, s: &SRing) -> bool {
    let g = a.gcd(b);
    s.strip(&(a / g)).abs().is_one()
}

fn divides_i128(a: i128, b: i128, s: &SRing) -> bool {
    let g = gcd_i128(a, b);
    s.strip_i128(a / g).abs() == 1
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBox {
    /// Affine dimension, or projective dimension for projective searches.
    pub n: usize,
    pub bound: u64,
    pub denom_cap: u32,
}

impl SearchBox {
    pub fn new(n: usize, bound: u64, denom_cap: u32) -> Self {
        SearchBox { n, bound, denom_cap }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Progress file recording finished slices; the search resumes from it.
    pub checkpoint: Option<PathBuf>,
    /// Slices processed between checkpoint writes.
    pub batch: usize,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    descriptor: String,
    completed: usize,
    records: Vec<SolutionRecord>,
}

fn run_slices(
    slices: usize,
    descriptor: &str,
    opts: &SearchOptions,
    f: impl Fn(usize) -> Result<Vec<SolutionRecord>> + Sync + Send,
) -> Result<Vec<SolutionRecord>> {
    let mut done = 0;
    let mut records = Vec::new();
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if cp.descriptor != descriptor {
                return Err(Error::InvalidConfig(format!(
                    "checkpoint {} belongs to a different search",
                    path.display()
                )));
            }
            done = cp.completed.min(slices);
            records = cp.records;
        }
    }
    let batch = if opts.batch == 0 { 64 } else { opts.batch };
    while done < slices {
        let end = (done + batch).min(slices);
        let ids: Vec<usize> = (done..end).collect();
        for part in crate::par::map(&ids, |_, &k| f(k)) {
            records.extend(part?);
        }
        done = end;
        if let Some(path) = &opts.checkpoint {
            let cp = Checkpoint {
                descriptor: descriptor.to_string(),
                completed: done,
                records: records.clone(),
            };
            write_atomic(path, serde_json::to_string(&cp)?.as_bytes())?;
        }
    }
    Ok(records)
}

/// Write through a sibling temporary file and rename into place.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn check_count(count: u128) -> Result<()> {
    if count > MAX_TUPLES {
        return Err(Error::BoxTooLarge(count));
    }
    Ok(())
}

/// Multiply a form by the lcm of its coefficient denominators, which must be S-units.
fn integral_form(f: &MultiPoly, s: &SRing) -> Result<MultiPoly> {
    let l = f.terms().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    if !s.strip(&l).is_one() {
        return Err(Error::NotSInteger(format!("coefficients of {f}")));
    }
    Ok(f.scale(&Rat::from_integer(l)))
}

fn eval_big(f: &MultiPoly, x: &[i64]) -> BigInt {
    let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
    f.eval_int(&xs).expect("dimension checked").to_integer()
}

fn eval_both(f: &MultiPoly, x: &[i64]) -> (Option<i128>, BigInt) {
    match f.eval_i128(x) {
        Some(v) => (Some(v), BigInt::from(v)),
        None => (None, eval_big(f, x)),
    }
}

/// Normalized integer points of projective n-space with `max |x_i| = h`
/// exactly, in lexicographic order, for a fixed first coordinate.
fn projective_slice(n: usize, bound: u64, x0: i64, mut visit: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let b = bound as i64;
    let mut x = vec![0i64; n + 1];
    x[0] = x0;
    let mut rest = vec![-b; n];
    loop {
        x[1..].copy_from_slice(&rest);
        let normalized = match x.iter().find(|v| **v != 0) {
            Some(&v) => v > 0,
            None => false,
        };
        if normalized && x.iter().fold(0i64, |g, &v| g.gcd(&v)) == 1 {
            visit(&x)?;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if rest[i] < b {
                rest[i] += 1;
                break;
            }
            rest[i] = -b;
        }
    }
}

fn proj_key(x: &[Rat]) -> (Rat, Vec<Rat>) {
    let m = x.iter().map(|v| v.numer().abs()).max().unwrap_or_default();
    (Rat::from_integer(m), x.to_vec())
}

fn sort_records(records: &mut [SolutionRecord]) {
    records.sort_by_cached_key(|r| proj_key(&r.point));
}

/// `{p: [v_p(values)...]}` over primes outside `S` dividing some value.
fn witnesses(values: &[BigInt], s: &SRing) -> Result<BTreeMap<String, Vec<i64>>> {
    let rats: Vec<Rat> = values.iter().filter(|v| !v.is_zero()).cloned().map(Rat::from_integer).collect();
    let mut out = BTreeMap::new();
    for p in support_primes(&rats)? {
        if s.is_s_prime(&p) {
            continue;
        }
        let vals = values.iter().map(|v| if v.is_zero() { i64::MAX } else { vp_int(v, &p) as i64 }).collect();
        out.insert(p.to_string(), vals);
    }
    Ok(out)
}

pub(crate) fn check_thm11_forms(forms: &[MultiPoly], g: &MultiPoly, assert_gp: bool) -> Result<(u32, u32)> {
    let first = forms.first().ok_or_else(|| Error::Degenerate("no forms".into()))?;
    let nvars = first.nvars();
    for f in forms.iter().chain([g]) {
        if f.nvars() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: f.nvars(),
            });
        }
        if f.is_zero() || !f.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
    }
    let d = first.degree().unwrap_or(0);
    if d == 0 || forms.iter().any(|f| f.degree() != Some(d)) {
        return Err(Error::DegenerateDegrees("the forms F_i must share one positive degree".into()));
    }
    let dg = g.degree().unwrap_or(0);
    if dg > d {
        return Err(Error::DegenerateDegrees(format!("deg G = {dg} exceeds deg F_i = {d}")));
    }
    let mut family: Vec<MultiPoly> = forms.to_vec();
    if dg > 0 {
        family.push(g.clone());
    }
    if family.iter().all(|f| f.linear_coefficients().is_some()) {
        if !hyperplanes_general_position(&family)? {
            return Err(Error::NotGeneralPosition);
        }
    } else if !assert_gp {
        return Err(Error::NotGeneralPosition);
    }
    Ok((d, dg))
}

pub(crate) struct Thm11 {
    forms: Vec<MultiPoly>,
    g: MultiPoly,
    mode: ConditionMode,
    s: SRing,
}

impl Thm11 {
    pub(crate) fn new(forms: &[MultiPoly], g: &MultiPoly, mode: ConditionMode, s: &SRing) -> Result<Self> {
        Ok(Thm11 {
            forms: forms.iter().map(|f| integral_form(f, s)).collect::<Result<_>>()?,
            g: integral_form(g, s)?,
            mode,
            s: s.clone(),
        })
    }

    pub(crate) fn holds(&self, x: &[i64]) -> bool {
        let (gs, gb) = eval_both(&self.g, x);
        if gb.is_zero() {
            return false;
        }
        let vals: Vec<(Option<i128>, BigInt)> = self.forms.iter().map(|f| eval_both(f, x)).collect();
        if vals.iter().any(|(_, b)| b.is_zero()) {
            return false;
        }
        match self.mode {
            ConditionMode::I => vals.iter().all(|(small, big)| match (small, gs) {
                (Some(a), Some(b)) => divides_i128(*a, b, &self.s),
                _ => divides_big(big, &gb, &self.s),
            }),
            ConditionMode::Ii => {
                let prod: BigInt = vals.iter().map(|(_, b)| b.clone()).product();
                divides_big(&prod, &gb, &self.s)
            }
        }
    }

    pub(crate) fn witnesses(&self, x: &[i64]) -> Result<BTreeMap<String, Vec<i64>>> {
        let mut values: Vec<BigInt> = self.forms.iter().map(|f| eval_big(f, x)).collect();
        values.push(eval_big(&self.g, x));
        witnesses(&values, &self.s)
    }
}

fn to_rats(x: &[i64]) -> Vec<Rat> {
    x.iter().map(|&v| Rat::from_integer(v.into())).collect()
}

fn projective_search(
    n: usize,
    bx: &SearchBox,
    descriptor: &str,
    opts: &SearchOptions,
    tag: &str,
    holds: impl Fn(&[i64]) -> bool + Sync + Send,
    wit: impl Fn(&[i64]) -> Result<BTreeMap<String, Vec<i64>>> + Sync + Send,
) -> Result<Vec<SolutionRecord>> {
    if bx.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bx.n,
        });
    }
    if bx.bound == 0 {
        return Ok(Vec::new());
    }
    let side = 2 * bx.bound as u128 + 1;
    check_count((bx.bound as u128 + 1) * side.pow(n as u32))?;
    let mut records = run_slices(bx.bound as usize + 1, descriptor, opts, |k| {
        let mut out = Vec::new();
        projective_slice(n, bx.bound, k as i64, |x| {
            if holds(x) {
                out.push(SolutionRecord {
                    point: to_rats(x),
                    witnesses: wit(x)?,
                    predicate: tag.to_string(),
                });
            }
            Ok(())
        })?;
        Ok(out)
    })?;
    sort_records(&mut records);
    Ok(records)
}

/// Points where every `F_i` (mode i) or the product (mode ii) divides `G` in `O_S`.
pub fn search_thm11(
    forms: &[MultiPoly],
    g: &MultiPoly,
    mode: ConditionMode,
    bx: &SearchBox,
    s: &SRing,
    assert_general_position: bool,
    opts: &SearchOptions,
) -> Result<SolutionSet> {
    check_thm11_forms(forms, g, assert_general_position)?;
    let pred = Predicate::thm11(forms, g, mode, s);
    let compiled = Thm11::new(forms, g, mode, s)?;
    let n = forms[0].nvars() - 1;
    let records = projective_search(
        n,
        bx,
        &pred.descriptor(bx),
        opts,
        &pred.tag(),
        |x| compiled.holds(x),
        |x| compiled.witnesses(x),
    )?;
    Ok(SolutionSet::new(pred, bx.clone(), records))
}

pub(crate) struct Cor12 {
    /// Integer coefficients of `M g`, constant term first, for an S-unit `M`.
    coeffs: Vec<BigInt>,
    s: SRing,
}

impl Cor12 {
    pub(crate) fn new(g: &MultiPoly, s: &SRing, check_degenerate: bool) -> Result<Self> {
        let n = g.nvars();
        if g.is_zero() || g.degree().unwrap_or(0) > 1 {
            return Err(Error::Degenerate("g must be nonzero of degree <= 1".into()));
        }
        let zero = vec![Rat::zero(); n];
        let mut coeffs = vec![g.eval(&zero)?];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            coeffs.push(g.coefficient(&e));
        }
        if check_degenerate {
            if coeffs[0].is_zero() {
                return Err(Error::Degenerate("g vanishes at the origin".into()));
            }
            for i in 1..=n {
                if (&coeffs[0] + &coeffs[i]).is_zero() {
                    return Err(Error::Degenerate(format!("g vanishes at unit vector {i}")));
                }
            }
        }
        let l = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        if !s.strip(&l).is_one() {
            return Err(Error::NotSInteger(format!("coefficients of {g}")));
        }
        Ok(Cor12 {
            coeffs: coeffs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect(),
            s: s.clone(),
        })
    }

    /// Integer values `(L - sum a_i L/d_i, a_1..a_n, G')` where the affine
    /// point is `a_i/d_i` and `L = lcm(d_i)`; each differs from the true
    /// factor by an S-unit.
    fn scaled(&self, x: &[Rat]) -> (BigInt, Vec<BigInt>, BigInt) {
        let l = x.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let lifted: Vec<BigInt> = x.iter().map(|v| v.numer() * (&l / v.denom())).collect();
        let last = &l - lifted.iter().sum::<BigInt>();
        let g = &self.coeffs[0] * &l + self.coeffs[1..].iter().zip(&lifted).map(|(c, a)| c * a).sum::<BigInt>();
        (last, x.iter().map(|v| v.numer().clone()).collect(), g)
    }

    pub(crate) fn holds(&self, x: &[Rat]) -> bool {
        let (last, nums, g) = self.scaled(x);
        if last.is_zero() || nums.iter().any(Zero::is_zero) {
            return false;
        }
        let small = || -> Option<bool> {
            let mut p = last.to_i128()?;
            for a in &nums {
                p = p.checked_mul(a.to_i128()?)?;
            }
            Some(divides_i128(p, g.to_i128()?, &self.s))
        };
        small().unwrap_or_else(|| {
            let p: BigInt = nums.iter().product::<BigInt>() * &last;
            divides_big(&p, &g, &self.s)
        })
    }

    pub(crate) fn witnesses(&self, x: &[Rat]) -> Result<BTreeMap<String, Vec<i64>>> {
        let (last, mut nums, g) = self.scaled(x);
        nums.push(last);
        nums.push(g);
        witnesses(&nums, &self.s)
    }
}

/// The divisibility `(1 - sum x_i) prod x_i | g(x)` at one affine point of `O_S^n`.
/// Points where the left side vanishes do not satisfy it.
pub fn cor12_predicate(g: &MultiPoly, x: &[Rat], s: &SRing) -> Result<bool> {
    if x.len() != g.nvars() {
        return Err(Error::DimensionMismatch {
            expected: g.nvars(),
            got: x.len(),
        });
    }
    if let Some(v) = x.iter().find(|v| !s.contains(v)) {
        return Err(Error::NotSInteger(crate::arith::fmt_rat(v)));
    }
    Ok(Cor12::new(g, s, false)?.holds(x))
}

/// Projective form of the affine divisibility: `G` is `g` homogenized to
/// degree one and the forms are `x0, x1, .., xn, x0 - x1 - .. - xn`, so an
/// affine solution `x` gives `prod F_i(1, x) | G(1, x)`.
pub fn cor12_projective(g: &MultiPoly) -> Result<(MultiPoly, Vec<MultiPoly>)> {
    let n = g.nvars();
    if g.degree().unwrap_or(0) > 1 {
        return Err(Error::Degenerate("g must have degree <= 1".into()));
    }
    let vars = MultiPoly::standard_vars(n + 1);
    let mut coeffs = vec![g.eval(&vec![Rat::zero(); n])?];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        coeffs.push(g.coefficient(&e));
    }
    let big_g = MultiPoly::linear(vars.clone(), &coeffs);
    let mut forms: Vec<MultiPoly> = (0..=n).map(|i| MultiPoly::var(vars.clone(), i)).collect();
    let mut last = vec![-Rat::one(); n + 1];
    last[0] = Rat::one();
    forms.push(MultiPoly::linear(vars, &last));
    Ok((big_g, forms))
}

/// Admissible affine coordinate values, ordered by `(|numerator|, value)`.
pub fn affine_values(bound: u64, s: &SRing, cap: u32) -> Vec<Rat> {
    let b = bound as i64;
    let mut out = Vec::new();
    for d in s.denominators(cap) {
        for a in -b..=b {
            if (a == 0 && d != 1) || a.gcd(&d) != 1 {
                continue;
            }
            out.push(Rat::new(a.into(), d.into()));
        }
    }
    out.sort_by(|x, y| x.numer().abs().cmp(&y.numer().abs()).then(x.cmp(y)));
    out
}

/// Affine tuples in `O_S^n` within the box satisfying the divisibility
/// `(1 - sum x_i) prod x_i | g(x)`. The affine variables are `x1..xn`.
pub fn search_cor12(g: &MultiPoly, bx: &SearchBox, s: &SRing, opts: &SearchOptions) -> Result<SolutionSet> {
    let n = g.nvars();
    if bx.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bx.n,
        });
    }
    let compiled = Cor12::new(g, s, true)?;
    let pred = Predicate::cor12(g, s);
    let values = affine_values(bx.bound, s, bx.denom_cap);
    check_count((values.len() as u128).pow(n as u32))?;
    let tag = pred.tag();
    let mut records = if bx.bound == 0 {
        Vec::new()
    } else {
        run_slices(values.len(), &pred.descriptor(bx), opts, |k| {
            let mut out = Vec::new();
            let mut idx = vec![0usize; n];
            idx[0] = k;
            let mut x: Vec<Rat> = idx.iter().map(|&i| values[i].clone()).collect();
            loop {
                if compiled.holds(&x) {
                    out.push(SolutionRecord {
                        point: x.clone(),
                        witnesses: compiled.witnesses(&x)?,
                        predicate: tag.clone(),
                    });
                }
                let mut i = n;
                loop {
                    if i == 1 {
                        return Ok(out);
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < values.len() {
                        x[i] = values[idx[i]].clone();
                        break;
                    }
                    idx[i] = 0;
                    x[i] = values[0].clone();
                }
            }
        })?
    };
    sort_records(&mut records);
    Ok(SolutionSet::new(pred, bx.clone(), records))
}

/// Ideal equality check from a table of valuations at one prime:
/// `vals[j] = v_p(F_j(x))`, `min_x = min_j v_p(x_j)`. Returns one verdict per
/// index `i` of `Z/q`, comparing `v(F_i) + min_x` with
/// `sum_{j=i-n+1}^{i} min_{0<=t<n} v(F_{j+t})`.
pub fn ideal_equality_table(vals: &[i64], min_x: i64, n: usize) -> Vec<bool> {
    let q = vals.len();
    (0..q)
        .map(|i| {
            let lhs = vals[i] + min_x;
            let rhs: i64 = (0..n)
                .map(|back| {
                    let j = (i + q * n - back) % q;
                    (0..n).map(|t| vals[(j + t) % q]).min().expect("n >= 1")
                })
                .sum();
            lhs == rhs
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealEquality {
    pub per_index: Vec<bool>,
    pub holds: bool,
    /// Valuation rows per prime outside `S` that divides some value.
    pub valuations: BTreeMap<String, Vec<i64>>,
}

pub(crate) fn check_thm16_forms(forms: &[MultiPoly]) -> Result<usize> {
    let first = forms.first().ok_or_else(|| Error::Degenerate("no forms".into()))?;
    let n = first.nvars().saturating_sub(1);
    if n < 2 {
        return Err(Error::OutOfRange("need n >= 2".into()));
    }
    if forms.len() < 3 * n {
        return Err(Error::OutOfRange(format!("need q >= 3n, got q={}, n={n}", forms.len())));
    }
    if !hyperplanes_general_position(forms)? {
        return Err(Error::NotGeneralPosition);
    }
    Ok(n)
}

fn ideal_equality_values(values: &[BigInt], coords: &[BigInt], n: usize, s: &SRing) -> Result<IdealEquality> {
    if values.iter().any(Zero::is_zero) {
        return Err(Error::PointOnSupport);
    }
    let wit = witnesses(values, s)?;
    let mut per_index = vec![true; values.len()];
    for (p, vals) in &wit {
        let p: BigUint = p.parse().expect("prime key");
        let min_x = coords
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| vp_int(c, &p) as i64)
            .min()
            .unwrap_or(0);
        for (slot, ok) in per_index.iter_mut().zip(ideal_equality_table(vals, min_x, n)) {
            *slot &= ok;
        }
    }
    Ok(IdealEquality {
        holds: per_index.iter().all(|&b| b),
        per_index,
        valuations: wit,
    })
}

/// Ideal equality `F_i(x)(x_0..x_n) = prod_j (F_j(x),..,F_{j+n-1}(x))` at
/// every prime outside `S`, for every index.
pub fn ideal_equality_thm16(x: &crate::heights::ProjPoint, forms: &[MultiPoly], s: &SRing) -> Result<IdealEquality> {
    let n = check_thm16_forms(forms)?;
    let scaled: Vec<MultiPoly> = forms.iter().map(|f| integral_form(f, s)).collect::<Result<_>>()?;
    let values: Vec<BigInt> = scaled
        .iter()
        .map(|f| Ok(f.eval_int(x.coords())?.to_integer()))
        .collect::<Result<_>>()?;
    ideal_equality_values(&values, x.coords(), n, s)
}

/// Points in the box, off every hyperplane, satisfying the ideal equality.
pub fn search_thm16(forms: &[MultiPoly], bx: &SearchBox, s: &SRing, opts: &SearchOptions) -> Result<SolutionSet> {
    let n = check_thm16_forms(forms)?;
    let scaled: Vec<MultiPoly> = forms.iter().map(|f| integral_form(f, s)).collect::<Result<_>>()?;
    let pred = Predicate::thm16(forms, s);
    let eval = |x: &[i64]| -> Vec<BigInt> { scaled.iter().map(|f| eval_both(f, x).1).collect() };
    let check = |x: &[i64]| -> Result<Option<BTreeMap<String, Vec<i64>>>> {
        let values = eval(x);
        if values.iter().any(Zero::is_zero) {
            return Ok(None);
        }
        let coords: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let r = ideal_equality_values(&values, &coords, n, s)?;
        Ok(r.holds.then_some(r.valuations))
    };
    let records = projective_search(
        n,
        bx,
        &pred.descriptor(bx),
        opts,
        &pred.tag(),
        |x| matches!(check(x), Ok(Some(_))),
        |x| check(x).map(|w| w.unwrap_or_default()),
    )?;
    Ok(SolutionSet::new(pred, bx.clone(), records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::heights::{theoremkey_condition, MkConstant, ProjPoint};
    use proptest::prelude::*;

    fn forms(list: &[&str], nvars: usize) -> Vec<MultiPoly> {
        list.iter().map(|s| MultiPoly::parse(s, nvars).unwrap()).collect()
    }

    fn s(p: &[u64]) -> SRing {
        SRing::new(p.to_vec()).unwrap()
    }

    fn affine(text: &str, n: usize) -> MultiPoly {
        MultiPoly::parse_with_vars(text, (1..=n).map(|i| format!("x{i}")).collect()).unwrap()
    }

    #[test]
    fn divisibility_examples() {
        assert!(divides_in_os(&int(6), &int(12), &s(&[])).unwrap());
        assert!(divides_in_os(&int(4), &int(6), &s(&[2])).unwrap());
        assert!(!divides_in_os(&int(4), &int(6), &s(&[])).unwrap());
        assert!(matches!(divides_in_os(&int(0), &int(6), &s(&[])), Err(Error::ZeroDivisor)));
        assert!(matches!(divides_in_os(&rat(1, 3), &int(6), &s(&[2])), Err(Error::NotSInteger(_))));
        assert!(SRing::new(vec![4]).is_err());
        assert_eq!(SRing::parse("inf,3,2").unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn cor12_examples() {
        let g = affine("1", 2);
        let sol = search_cor12(&g, &SearchBox::new(2, 100, 0), &s(&[]), &SearchOptions::default()).unwrap();
        let pts: Vec<Vec<Rat>> = sol.records.iter().map(|r| r.point.clone()).collect();
        assert_eq!(pts, vec![vec![int(-1), int(1)], vec![int(1), int(-1)], vec![int(1), int(1)]]);
        assert!(!cor12_predicate(&g, &[int(-1), int(-1)], &s(&[])).unwrap());
        let empty = search_cor12(&g, &SearchBox::new(2, 0, 0), &s(&[]), &SearchOptions::default()).unwrap();
        assert!(empty.records.is_empty());
    }

    #[test]
    fn cor12_degenerate_g() {
        let g = affine("x1", 2);
        assert!(matches!(
            search_cor12(&g, &SearchBox::new(2, 5, 0), &s(&[]), &SearchOptions::default()),
            Err(Error::Degenerate(_))
        ));
        // Per point: x2(1 - x1 - x2) x1 | x1 means x2(1 - x1 - x2) is a unit.
        let oracle = |x1: i64, x2: i64| {
            let p = x1 * x2 * (1 - x1 - x2);
            p != 0 && x1 % p == 0
        };
        for x1 in -6..=6 {
            for x2 in -6..=6 {
                let got = cor12_predicate(&g, &[int(x1), int(x2)], &s(&[])).unwrap();
                assert_eq!(got, oracle(x1, x2), "({x1},{x2})");
            }
        }
    }

    #[test]
    fn cor12_with_denominators() {
        // With S = {2} and cap 1, halves are allowed; brute force over the same values.
        let g = affine("1", 2);
        let ring = s(&[2]);
        let bx = SearchBox::new(2, 4, 1);
        let sol = search_cor12(&g, &bx, &ring, &SearchOptions::default()).unwrap();
        let vals = affine_values(4, &ring, 1);
        let mut expected = Vec::new();
        for a in &vals {
            for b in &vals {
                let p = a * b * (int(1) - a - b);
                if !p.is_zero() && divides_in_os(&p, &int(1), &ring).unwrap() {
                    expected.push(vec![a.clone(), b.clone()]);
                }
            }
        }
        expected.sort_by_cached_key(|x| proj_key(x));
        let got: Vec<Vec<Rat>> = sol.records.iter().map(|r| r.point.clone()).collect();
        assert_eq!(got, expected);
        assert!(got.contains(&vec![rat(1, 2), rat(1, 2)]) || got.contains(&vec![int(2), int(-2)]));
    }

    #[test]
    fn thm11_unit_coordinates() {
        let fs = forms(&["x0", "x1", "x2"], 3);
        let g = MultiPoly::parse("1", 3).unwrap();
        let sol = search_thm11(&fs, &g, ConditionMode::I, &SearchBox::new(2, 4, 0), &s(&[]), false, &SearchOptions::default())
            .unwrap();
        let expected: Vec<Vec<Rat>> = [[1, -1, -1], [1, -1, 1], [1, 1, -1], [1, 1, 1]]
            .iter()
            .map(|p| p.iter().map(|&v| int(v)).collect())
            .collect();
        let got: Vec<Vec<Rat>> = sol.records.iter().map(|r| r.point.clone()).collect();
        assert_eq!(got, expected);
        // S = {2} admits powers of two as units.
        let sol2 = search_thm11(&fs, &g, ConditionMode::I, &SearchBox::new(2, 4, 0), &s(&[2]), false, &SearchOptions::default())
            .unwrap();
        assert!(sol2.records.iter().any(|r| r.point == vec![int(4), int(1), int(-2)]));
        let none = search_thm11(&fs, &g, ConditionMode::I, &SearchBox::new(2, 0, 0), &s(&[]), false, &SearchOptions::default())
            .unwrap();
        assert!(none.records.is_empty());
    }

    #[test]
    fn thm11_rejects_bad_degrees() {
        let fs = forms(&["x0", "x1^2"], 3);
        let g = MultiPoly::parse("x0", 3).unwrap();
        assert!(matches!(
            search_thm11(&fs, &g, ConditionMode::I, &SearchBox::new(2, 3, 0), &s(&[]), true, &SearchOptions::default()),
            Err(Error::DegenerateDegrees(_))
        ));
        let fs = forms(&["x0", "x1"], 3);
        let g = MultiPoly::parse("x0^2", 3).unwrap();
        assert!(matches!(
            search_thm11(&fs, &g, ConditionMode::I, &SearchBox::new(2, 3, 0), &s(&[]), true, &SearchOptions::default()),
            Err(Error::DegenerateDegrees(_))
        ));
    }

    #[test]
    fn thm11_mode_ii_brute_force() {
        let fs = forms(&["x0", "x1", "x2", "x0 + x1 + x2"], 3);
        let g = MultiPoly::parse("x0 + 2*x1 + 3*x2", 3).unwrap();
        let bx = SearchBox::new(2, 6, 0);
        let sol = search_thm11(&fs, &g, ConditionMode::Ii, &bx, &s(&[]), false, &SearchOptions::default()).unwrap();
        let mut expected = Vec::new();
        for x0 in 0..=6i64 {
            for x1 in -6..=6i64 {
                for x2 in -6..=6i64 {
                    let Ok(p) = ProjPoint::from_i64(&[x0, x1, x2]) else { continue };
                    if p.coords() != [x0.into(), x1.into(), x2.into()] {
                        continue;
                    }
                    let prod = x0 * x1 * x2 * (x0 + x1 + x2);
                    let gv = x0 + 2 * x1 + 3 * x2;
                    if prod != 0 && gv != 0 && gv % prod == 0 {
                        expected.push(vec![int(x0), int(x1), int(x2)]);
                    }
                }
            }
        }
        expected.sort_by_cached_key(|x| proj_key(x));
        let got: Vec<Vec<Rat>> = sol.records.iter().map(|r| r.point.clone()).collect();
        assert_eq!(got, expected);
        for r in &sol.records {
            let prod: Rat = fs.iter().map(|f| f.eval(&r.point).unwrap()).product();
            assert!(divides_in_os(&prod, &g.eval(&r.point).unwrap(), &s(&[])).unwrap());
        }
    }

    #[test]
    fn thm11_solutions_meet_condition() {
        let fs = forms(&["x0 + x1 + x2", "x0 + 2*x1 + 4*x2", "x0 + 3*x1 + 9*x2", "x0 + 4*x1 + 16*x2", "x0 + 5*x1 + 25*x2"], 3);
        let g = MultiPoly::parse("x0", 3).unwrap();
        let ring = s(&[2]);
        let sol = search_thm11(&fs, &g, ConditionMode::I, &SearchBox::new(2, 12, 0), &ring, false, &SearchOptions::default())
            .unwrap();
        assert!(!sol.records.is_empty());
        let mut all = vec![g.clone()];
        all.extend(fs.iter().cloned());
        for r in &sol.records {
            let p = ProjPoint::from_rationals(&r.point).unwrap();
            let rep = theoremkey_condition(&p, &all, &ring.places(), &MkConstant::trivial(), ConditionMode::I).unwrap();
            assert!(rep.holds, "{p}");
        }
    }

    #[test]
    fn ideal_table_by_hand() {
        assert_eq!(ideal_equality_table(&[1, 0, 0, 0], 0, 2), vec![false, true, true, true]);
        assert_eq!(ideal_equality_table(&[0; 6], 0, 2), vec![true; 6]);
        // Consecutive forms share a window, so the window minimum absorbs them.
        assert_eq!(ideal_equality_table(&[1, 1, 0, 0, 0, 0], 0, 2), vec![true; 6]);
        assert_eq!(ideal_equality_table(&[2, 1, 0, 0, 0, 0], 0, 2), vec![false, true, true, true, true, true]);
    }

    #[test]
    fn ideal_equality_units() {
        let fs = forms(&["x0", "x1", "x2", "x0 + x1 + x2", "x0 + 2*x1 + 4*x2", "x0 + 3*x1 + 9*x2"], 3);
        // Every value is +-1 or a power of 2 or 3; with S = {2, 3} all valuations vanish.
        let p = ProjPoint::from_i64(&[1, 1, 1]).unwrap();
        let r = ideal_equality_thm16(&p, &fs, &s(&[2, 3, 7, 13])).unwrap();
        assert!(r.holds && r.valuations.is_empty());
        let on = ProjPoint::from_i64(&[0, 1, 1]).unwrap();
        assert!(matches!(ideal_equality_thm16(&on, &fs, &s(&[])), Err(Error::PointOnSupport)));
        assert!(matches!(ideal_equality_thm16(&p, &fs[..5], &s(&[])), Err(Error::OutOfRange(_))));
        let sol = search_thm16(&fs, &SearchBox::new(2, 4, 0), &s(&[]), &SearchOptions::default()).unwrap();
        for r in &sol.records {
            let p = ProjPoint::from_rationals(&r.point).unwrap();
            assert!(ideal_equality_thm16(&p, &fs, &s(&[])).unwrap().holds);
        }
    }

    #[test]
    fn box_too_large() {
        let g = affine("1", 3);
        assert!(matches!(
            search_cor12(&g, &SearchBox::new(3, 1000, 0), &s(&[]), &SearchOptions::default()),
            Err(Error::BoxTooLarge(_))
        ));
    }

    #[test]
    fn checkpoint_resume_matches_fresh_run() {
        let dir = std::env::temp_dir().join(format!("arithdeg-cp-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cp = dir.join("cp.json");
        let _ = std::fs::remove_file(&cp);
        let g = affine("1", 2);
        let bx = SearchBox::new(2, 30, 0);
        let fresh = search_cor12(&g, &bx, &s(&[]), &SearchOptions::default()).unwrap();
        let opts = SearchOptions {
            checkpoint: Some(cp.clone()),
            batch: 7,
        };
        let first = search_cor12(&g, &bx, &s(&[]), &opts).unwrap();
        assert!(cp.exists());
        // A finished checkpoint resumes to the same result without rework.
        let again = search_cor12(&g, &bx, &s(&[]), &opts).unwrap();
        assert_eq!(first.records, fresh.records);
        assert_eq!(again.records, fresh.records);
        // Mismatched descriptor is refused.
        assert!(search_cor12(&affine("2", 2), &bx, &s(&[]), &opts).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn divisibility_transitive(a in 1i64..200, b in -200i64..200, c in -200i64..200, pick in 0usize..3) {
            let ring = [s(&[]), s(&[2]), s(&[3, 5])][pick].clone();
            let (a, b, c) = (int(a), int(b), int(c));
            prop_assume!(!b.is_zero());
            if divides_in_os(&a, &b, &ring).unwrap() && divides_in_os(&b, &c, &ring).unwrap() {
                prop_assert!(divides_in_os(&a, &c, &ring).unwrap());
            }
        }

        #[test]
        fn enlarging_s_keeps_solutions(c0 in 1i64..5, c1 in -3i64..4) {
            prop_assume!(c0 + c1 != 0);
            let g = affine(&format!("{c0} + ({c1})*x1"), 2);
            let bx = SearchBox::new(2, 8, 0);
            let small = search_cor12(&g, &bx, &s(&[]), &SearchOptions::default()).unwrap();
            let large = search_cor12(&g, &bx, &s(&[2, 3]), &SearchOptions::default()).unwrap();
            for r in &small.records {
                prop_assert!(large.records.iter().any(|q| q.point == r.point));
            }
        }
    }
}
