//! Places of Q, normalized projective points and exact local Weil functions.
//!
//! Local heights are stored multiplicatively: the logarithmic value is
//! `ln(value) / scale`. The standard representative for a form `F` of degree
//! `d` at a place `v` is `max_j |x_j|_v^d / |F(x)|_v`.

mod audit;

pub use audit::{
    levin_duke_audit, random_points, subspace_audit, AuditRow, AuditVerdict, LevinAudit, LevinRow, PlaceBreakdown,
    SubspaceAudit,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ln_bigint, ln_rat, pow, rat_string, vp_unchecked, Rat};
use crate::error::{Error, Result};
use crate::factor::{factor, is_prime};
use crate::poly::MultiPoly;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Place {
    Infinite,
    Finite(BigUint),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        let p = BigUint::from(p);
        if !is_prime(&p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Place::Finite(p))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Place::Infinite);
        }
        let p: BigUint = s.parse().map_err(|_| Error::Parse(format!("bad place `{s}`")))?;
        if !is_prime(&p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Place::Finite(p))
    }

    /// `|x|_v`, with `|0|_v = 0`.
    pub fn abs(&self, x: &Rat) -> Rat {
        if x.is_zero() {
            return Rat::zero();
        }
        match self {
            Place::Infinite => x.abs(),
            Place::Finite(p) => {
                let v = vp_unchecked(x, p);
                let pr = Rat::from_integer(BigInt::from_biguint(Sign::Plus, p.clone()));
                crate::arith::pow_signed(&pr, -v)
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl From<Place> for String {
    fn from(p: Place) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Place {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Place::parse(&s)
    }
}

/// Finite set of places, always containing the archimedean one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceSet {
    primes: BTreeSet<BigUint>,
}

impl PlaceSet {
    pub fn archimedean() -> Self {
        Self::default()
    }

    pub fn with_primes(primes: impl IntoIterator<Item = BigUint>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in primes {
            if !is_prime(&p) {
                return Err(Error::NotPrime(p));
            }
            set.insert(p);
        }
        Ok(PlaceSet { primes: set })
    }

    /// Comma-separated list such as `inf,2,3`; `inf` is implied.
    pub fn parse(s: &str) -> Result<Self> {
        let mut primes = BTreeSet::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Place::Finite(p) = Place::parse(part)? {
                primes.insert(p);
            }
        }
        Ok(PlaceSet { primes })
    }

    pub fn contains(&self, v: &Place) -> bool {
        match v {
            Place::Infinite => true,
            Place::Finite(p) => self.primes.contains(p),
        }
    }

    pub fn primes(&self) -> &BTreeSet<BigUint> {
        &self.primes
    }

    pub fn places(&self) -> Vec<Place> {
        std::iter::once(Place::Infinite)
            .chain(self.primes.iter().cloned().map(Place::Finite))
            .collect()
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inf")?;
        for p in &self.primes {
            write!(f, ",{p}")?;
        }
        Ok(())
    }
}

/// Point of projective space with coprime integer coordinates whose first
/// nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<BigInt>", into = "Vec<BigInt>")]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    pub fn new(mut coords: Vec<BigInt>) -> Result<Self> {
        let g = coords.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::Degenerate("projective point with all coordinates zero".into()));
        }
        let first_negative = coords.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative);
        for x in &mut coords {
            *x = &*x / &g;
            if first_negative {
                *x = -&*x;
            }
        }
        Ok(ProjPoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Clears denominators of a rational representative.
    pub fn from_rationals(coords: &[Rat]) -> Result<Self> {
        let l = coords.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        Self::new(coords.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn as_rats(&self) -> Vec<Rat> {
        self.coords.iter().cloned().map(Rat::from_integer).collect()
    }

    /// Multiplicative height `max |x_i|`.
    pub fn height(&self) -> BigInt {
        self.coords.iter().map(|x| x.abs()).max().expect("nonempty")
    }

    pub fn log_height(&self) -> f64 {
        ln_bigint(&self.height())
    }

    fn eval(&self, f: &MultiPoly) -> Result<Rat> {
        f.eval(&self.as_rats())
    }
}

impl TryFrom<Vec<BigInt>> for ProjPoint {
    type Error = Error;
    fn try_from(v: Vec<BigInt>) -> Result<Self> {
        let p = ProjPoint::new(v.clone())?;
        if p.coords != v {
            return Err(Error::Parse("projective point is not normalized".into()));
        }
        Ok(p)
    }
}

impl From<ProjPoint> for Vec<BigInt> {
    fn from(p: ProjPoint) -> Self {
        p.coords
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// Multiplicative local height: `lambda = ln(value) / scale`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalHeight {
    pub place: Place,
    #[serde(with = "rat_string")]
    pub value: Rat,
    pub scale: u64,
}

impl LocalHeight {
    pub fn lambda(&self) -> f64 {
        ln_rat(&self.value) / self.scale as f64
    }
}

/// Finitely supported multiplicative slack per place; absent entries are 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MkConstant {
    #[serde(with = "place_rat_map")]
    entries: BTreeMap<Place, Rat>,
}

impl MkConstant {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: Place, gamma: Rat) -> Result<()> {
        if !gamma.is_positive() {
            return Err(Error::OutOfRange("M_k-constant entries must be positive".into()));
        }
        if gamma.is_one() {
            self.entries.remove(&v);
        } else {
            self.entries.insert(v, gamma);
        }
        Ok(())
    }

    pub fn get(&self, v: &Place) -> Rat {
        self.entries.get(v).cloned().unwrap_or_else(Rat::one)
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.entries.keys()
    }
}

mod place_rat_map {
    use super::{Place, Rat};
    use crate::arith::{fmt_rat, parse_rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(m: &BTreeMap<Place, Rat>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), fmt_rat(v)))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Place, Rat>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                let p = Place::parse(&k).map_err(serde::de::Error::custom)?;
                let r = parse_rat(&v).map_err(serde::de::Error::custom)?;
                Ok((p, r))
            })
            .collect()
    }
}

fn check_form(f: &MultiPoly, p: &ProjPoint) -> Result<u32> {
    if f.nvars() != p.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            got: p.coords.len(),
        });
    }
    if f.is_zero() || !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    Ok(f.degree().unwrap_or(0))
}

fn local_from_value(fx: &Rat, deg: u32, p: &ProjPoint, v: &Place) -> LocalHeight {
    let max = p.coords.iter().map(|x| v.abs(&Rat::from_integer(x.clone()))).max().expect("nonempty");
    LocalHeight {
        place: v.clone(),
        value: pow(&max, deg) / v.abs(fx),
        scale: 1,
    }
}

/// Standard local Weil function of the hypersurface `F = 0` at `v`.
pub fn weil_local(f: &MultiPoly, p: &ProjPoint, v: &Place) -> Result<LocalHeight> {
    let deg = check_form(f, p)?;
    let fx = p.eval(f)?;
    if fx.is_zero() {
        return Err(Error::PointOnSupport);
    }
    Ok(local_from_value(&fx, deg, p, v))
}

/// Primes dividing the numerator or denominator of any of the values.
pub fn support_primes<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Result<BTreeSet<BigUint>> {
    let mut out = BTreeSet::new();
    for x in values {
        for part in [x.numer(), x.denom()] {
            if part.is_zero() {
                return Err(Error::FactorZero);
            }
            out.extend(factor(part)?.into_keys());
        }
    }
    Ok(out)
}

/// Every place where the local value differs from 1, plus `inf`.
pub fn weil_all_places(f: &MultiPoly, p: &ProjPoint) -> Result<Vec<LocalHeight>> {
    let deg = check_form(f, p)?;
    let fx = p.eval(f)?;
    if fx.is_zero() {
        return Err(Error::PointOnSupport);
    }
    let mut out = vec![local_from_value(&fx, deg, p, &Place::Infinite)];
    for q in support_primes([&fx])? {
        out.push(local_from_value(&fx, deg, p, &Place::Finite(q)));
    }
    Ok(out)
}

/// Local height of the subscheme cut out by the generators. Each generator
/// carries a positive weight `w`; the component value is `lambda_F / w` and the
/// result is their minimum, kept exact on the common scale `lcm(w)`.
pub fn weil_subscheme(generators: &[(MultiPoly, u32)], p: &ProjPoint, v: &Place) -> Result<LocalHeight> {
    if generators.is_empty() {
        return Err(Error::Degenerate("subscheme needs at least one generator".into()));
    }
    if generators.iter().any(|(_, w)| *w == 0) {
        return Err(Error::DegenerateDegrees("generator weight must be positive".into()));
    }
    let l = generators.iter().fold(1u64, |l, (_, w)| l.lcm(&u64::from(*w)));
    let mut vals = Vec::with_capacity(generators.len());
    let mut on_all = true;
    for (f, w) in generators {
        match weil_local(f, p, v) {
            Ok(h) => {
                on_all = false;
                vals.push(Some(pow(&h.value, (l / u64::from(*w)) as u32)));
            }
            Err(Error::PointOnSupport) => vals.push(None),
            Err(e) => return Err(e),
        }
    }
    if on_all {
        return Err(Error::PointOnSupport);
    }
    let value = vals.into_iter().flatten().min().expect("some generator is off the point");
    Ok(LocalHeight {
        place: v.clone(),
        value,
        scale: l,
    })
}

/// `lambda_D - lambda_{D cap W}` at `v`: the local height of the strict
/// transform of `D` after blowing up `D cap W`, in the standard normalization.
pub fn strict_transform_local(
    d: &(MultiPoly, u32),
    w: &[(MultiPoly, u32)],
    p: &ProjPoint,
    v: &Place,
) -> Result<LocalHeight> {
    let mut gens = vec![d.clone()];
    gens.extend_from_slice(w);
    let y = weil_subscheme(&gens, p, v)?;
    let dd = weil_subscheme(std::slice::from_ref(d), p, v)?;
    let value = pow(&dd.value, (y.scale / dd.scale) as u32) / y.value;
    Ok(LocalHeight {
        place: v.clone(),
        value,
        scale: y.scale,
    })
}

/// Proximity and counting parts of `h_D(P)`, all multiplicative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProximityCounting {
    #[serde(with = "rat_string")]
    pub proximity: Rat,
    #[serde(with = "rat_string")]
    pub counting: Rat,
    #[serde(with = "rat_string")]
    pub height: Rat,
    pub places: Vec<LocalHeight>,
}

pub fn proximity_counting(f: &MultiPoly, p: &ProjPoint, s: &PlaceSet) -> Result<ProximityCounting> {
    let mut places = weil_all_places(f, p)?;
    for q in s.primes() {
        let v = Place::Finite(q.clone());
        if !places.iter().any(|h| h.place == v) {
            places.push(weil_local(f, p, &v)?);
        }
    }
    places.sort_by(|a, b| a.place.cmp(&b.place));
    let mut proximity = Rat::one();
    let mut counting = Rat::one();
    for h in &places {
        if s.contains(&h.place) {
            proximity *= &h.value;
        } else {
            counting *= &h.value;
        }
    }
    let height = &proximity * &counting;
    debug_assert_eq!(height, pow(&Rat::from_integer(p.height()), f.degree().unwrap_or(0)));
    Ok(ProximityCounting {
        proximity,
        counting,
        height,
        places,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionMode {
    /// Each `lambda_i / d_i <= lambda_0 / d_0 + gamma` separately.
    I,
    /// `sum_i lambda_i / d_i <= lambda_0 / d_0 + gamma`.
    Ii,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub holds: bool,
    /// Places outside `S` where the comparison was not trivially `1 <= 1`.
    pub places_checked: Vec<Place>,
    /// First failing place and, in mode i, the failing form index.
    pub failure: Option<(Place, Option<usize>)>,
}

/// Exact check of the local comparison between `D_1..D_r` and `D_0` at every
/// place outside `S`. `forms[0]` is `D_0`.
pub fn theoremkey_condition(
    p: &ProjPoint,
    forms: &[MultiPoly],
    s: &PlaceSet,
    gamma: &MkConstant,
    mode: ConditionMode,
) -> Result<ConditionReport> {
    if forms.len() < 2 {
        return Err(Error::Degenerate("need D_0 and at least one D_i".into()));
    }
    let mut degs = Vec::with_capacity(forms.len());
    let mut values = Vec::with_capacity(forms.len());
    for f in forms {
        let d = check_form(f, p)?;
        if d == 0 {
            return Err(Error::DegenerateDegrees("forms must have positive degree".into()));
        }
        let fx = p.eval(f)?;
        if fx.is_zero() {
            return Err(Error::PointOnSupport);
        }
        degs.push(d);
        values.push(fx);
    }
    if mode == ConditionMode::I && degs[1..].iter().any(|&d| d < degs[0]) {
        return Err(Error::DegenerateDegrees("mode i needs deg D_i >= deg D_0".into()));
    }
    let mut places: BTreeSet<Place> = support_primes(&values)?.into_iter().map(Place::Finite).collect();
    places.extend(gamma.support().cloned());
    let places: Vec<Place> = places.into_iter().filter(|v| !s.contains(v)).collect();

    let d0 = degs[0];
    for v in &places {
        let lam: Vec<Rat> = values
            .iter()
            .zip(&degs)
            .map(|(fx, &d)| local_from_value(fx, d, p, v).value)
            .collect();
        let g = gamma.get(v);
        match mode {
            ConditionMode::I => {
                for i in 1..forms.len() {
                    let di = degs[i];
                    let lhs = pow(&lam[i], d0);
                    let rhs = pow(&lam[0], di) * pow(&g, d0 * di);
                    if lhs > rhs {
                        return Ok(ConditionReport {
                            holds: false,
                            failure: Some((v.clone(), Some(i))),
                            places_checked: places.clone(),
                        });
                    }
                }
            }
            ConditionMode::Ii => {
                let l = degs.iter().fold(1u32, |l, d| l.lcm(d));
                let lhs: Rat = (1..forms.len()).map(|i| pow(&lam[i], l / degs[i])).product();
                let rhs = pow(&lam[0], l / d0) * pow(&g, l);
                if lhs > rhs {
                    return Ok(ConditionReport {
                        holds: false,
                        failure: Some((v.clone(), None)),
                        places_checked: places.clone(),
                    });
                }
            }
        }
    }
    Ok(ConditionReport {
        holds: true,
        failure: None,
        places_checked: places,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use proptest::prelude::*;

    fn pt(c: &[i64]) -> ProjPoint {
        ProjPoint::from_i64(c).unwrap()
    }

    fn form(s: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(s, n).unwrap()
    }

    fn two() -> Place {
        Place::finite(2).unwrap()
    }

    #[test]
    fn heights_of_points() {
        assert_eq!(pt(&[3, 6, 9]).coords(), &[1.into(), 2.into(), 3.into()]);
        assert_eq!(pt(&[3, 6, 9]).height(), 3.into());
        assert_eq!(pt(&[1, 0, 0]).height(), 1.into());
        assert_eq!(pt(&[1, 0, 0]).log_height(), 0.0);
        let p = pt(&[-5, 7]);
        assert_eq!(p.coords(), &[5.into(), (-7).into()]);
        assert_eq!(p.height(), 7.into());
        assert!(ProjPoint::from_i64(&[0, 0]).is_err());
        assert_eq!(pt(&[0, -2, 4]).coords(), &[0.into(), 1.into(), (-2).into()]);
        assert_eq!(ProjPoint::from_rationals(&[rat(1, 2), rat(1, 3)]).unwrap(), pt(&[3, 2]));
    }

    #[test]
    fn weil_local_examples() {
        let f = form("x0", 2);
        let p = pt(&[2, 3]);
        assert_eq!(weil_local(&f, &p, &Place::Infinite).unwrap().value, rat(3, 2));
        assert_eq!(weil_local(&f, &p, &two()).unwrap().value, int(2));
        assert_eq!(weil_local(&f, &p, &Place::finite(3).unwrap()).unwrap().value, int(1));
        let all: Rat = weil_all_places(&f, &p).unwrap().iter().map(|h| h.value.clone()).product();
        assert_eq!(all, int(3));

        let g = form("x0 + x1", 2);
        for q in [3i64, 5, 7] {
            let v = weil_local(&g, &pt(&[1, -1 + q]), &Place::finite(q as u64).unwrap()).unwrap();
            assert_eq!(v.value, int(q));
        }
        // S-unit value with unit coordinates at v gives 1.
        assert_eq!(weil_local(&g, &pt(&[1, 1]), &Place::finite(3).unwrap()).unwrap().value, int(1));
        assert!(matches!(weil_local(&g, &pt(&[1, -1]), &two()), Err(Error::PointOnSupport)));
        assert!(matches!(weil_local(&form("x0^2 + x1", 2), &p, &two()), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn proximity_examples() {
        let p = pt(&[2, 3]);
        let pc = proximity_counting(&form("x0", 2), &p, &PlaceSet::archimedean()).unwrap();
        assert_eq!((pc.proximity, pc.counting, pc.height), (rat(3, 2), int(2), int(3)));
        let s = PlaceSet::parse("inf,2").unwrap();
        assert_eq!(proximity_counting(&form("x0", 2), &p, &s).unwrap().counting, int(1));
        let pc = proximity_counting(&form("x0*x1", 2), &p, &PlaceSet::archimedean()).unwrap();
        assert_eq!(pc.height, int(9));
    }

    #[test]
    fn subscheme_examples() {
        let p = pt(&[4, 2, 1]);
        let d = form("x0", 3);
        let w = form("x1", 3);
        for v in [Place::Infinite, two()] {
            let y = weil_subscheme(&[(d.clone(), 1), (w.clone(), 1)], &p, &v).unwrap();
            let ld = weil_local(&d, &p, &v).unwrap().value;
            let lw = weil_local(&w, &p, &v).unwrap().value;
            assert_eq!(y.value, ld.clone().min(lw));
            assert_eq!(weil_subscheme(&[(d.clone(), 1)], &p, &v).unwrap().value, ld);
        }
        // Generator coprime to the prime contributes value 1, so the minimum is 1.
        let y = weil_subscheme(&[(d, 1), (form("x2", 3), 1)], &p, &two()).unwrap();
        assert_eq!(y.value, int(1));
        // Mixed weights compare on the common scale.
        let y = weil_subscheme(&[(form("x0^2", 3), 2), (w, 1)], &p, &two()).unwrap();
        assert_eq!(y.scale, 2);
        assert_eq!(y.value, int(4).min(pow(&int(2), 2)));
    }

    #[test]
    fn condition_examples() {
        let s = PlaceSet::archimedean();
        let triv = MkConstant::trivial();
        let f = form("x0", 3);
        let g = form("x0 + x1", 3);
        // At [2:1:1], G = 3 and F = 2: at p=2 the F value exceeds the G value.
        let r = theoremkey_condition(&pt(&[2, 1, 1]), &[g.clone(), f.clone()], &s, &triv, ConditionMode::I).unwrap();
        assert!(!r.holds);
        assert_eq!(r.failure, Some((two(), Some(1))));
        assert_eq!(r.places_checked, vec![two(), Place::finite(3).unwrap()]);
        // A slack of 2 at p=2 repairs it.
        let mut gamma = MkConstant::trivial();
        gamma.set(two(), int(2)).unwrap();
        assert!(theoremkey_condition(&pt(&[2, 1, 1]), &[g.clone(), f.clone()], &s, &gamma, ConditionMode::I).unwrap().holds);
        // Reflexive.
        assert!(theoremkey_condition(&pt(&[6, 1, 5]), &[f.clone(), f.clone()], &s, &triv, ConditionMode::I).unwrap().holds);
        // Degree hypothesis.
        let q = form("x0^2 + x1^2", 3);
        assert!(matches!(
            theoremkey_condition(&pt(&[1, 1, 1]), &[q, f.clone()], &s, &triv, ConditionMode::I),
            Err(Error::DegenerateDegrees(_))
        ));
        assert!(matches!(
            theoremkey_condition(&pt(&[0, 1, 1]), &[g, f], &s, &triv, ConditionMode::I),
            Err(Error::PointOnSupport)
        ));
    }

    #[test]
    fn place_parsing() {
        assert_eq!(Place::parse("inf").unwrap(), Place::Infinite);
        assert!(matches!(Place::parse("4"), Err(Error::NotPrime(_))));
        let s = PlaceSet::parse("inf,3,2").unwrap();
        assert_eq!(s.to_string(), "inf,2,3");
        assert_eq!(serde_json::to_string(&two()).unwrap(), "\"2\"");
        let pjson = serde_json::to_string(&pt(&[2, -3])).unwrap();
        assert_eq!(serde_json::from_str::<ProjPoint>(&pjson).unwrap(), pt(&[2, -3]));
        assert!(serde_json::from_str::<ProjPoint>("[2,4]").is_err());
    }

    fn small_prime_places() -> Vec<Place> {
        [2u64, 3, 5, 7, 11, 13].iter().map(|&p| Place::finite(p).unwrap()).collect()
    }

    proptest! {
        #[test]
        fn product_formula(n in -10_000i64..10_000, d in 1i64..10_000) {
            prop_assume!(n != 0);
            let x = rat(n, d);
            let mut prod = Place::Infinite.abs(&x);
            for q in support_primes([&x]).unwrap() {
                prod *= Place::Finite(q).abs(&x);
            }
            prop_assert_eq!(prod, int(1));
        }

        #[test]
        fn height_machine_identity(
            coeffs in proptest::collection::vec(-5i64..=5, 6),
            c in proptest::collection::vec(-50i64..=50, 3),
        ) {
            // Quadratic form in three variables.
            let monos = ["x0^2", "x1^2", "x2^2", "x0*x1", "x0*x2", "x1*x2"];
            let text: Vec<String> = coeffs.iter().zip(monos).map(|(k, m)| format!("({k})*{m}")).collect();
            let f = form(&text.join(" + "), 3);
            prop_assume!(!f.is_zero());
            let p = ProjPoint::from_i64(&c);
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let fx = f.eval(&p.as_rats()).unwrap();
            prop_assume!(!fx.is_zero());
            let prod: Rat = weil_all_places(&f, &p).unwrap().iter().map(|h| h.value.clone()).product();
            prop_assert_eq!(prod, pow(&Rat::from_integer(p.height()), 2));
            for v in small_prime_places() {
                prop_assert!(weil_local(&f, &p, &v).unwrap().value >= int(1));
            }
        }

        #[test]
        fn subscheme_monotone(c in proptest::collection::vec(-30i64..=30, 3)) {
            let p = ProjPoint::from_i64(&c);
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let gens = [(form("x0 + x1", 3), 1), (form("x2", 3), 1), (form("x0 - x2", 3), 1)];
            prop_assume!(gens.iter().all(|(f, _)| !f.eval(&p.as_rats()).unwrap().is_zero()));
            // Adding generators shrinks the subscheme.
            for v in std::iter::once(Place::Infinite).chain(small_prime_places()) {
                let y2 = weil_subscheme(&gens[..2], &p, &v).unwrap();
                let y1 = weil_subscheme(&gens, &p, &v).unwrap();
                prop_assert!(y1.value <= y2.value);
            }
        }

        #[test]
        fn lemma_equivalence(c in proptest::collection::vec(-40i64..=40, 3)) {
            let p = ProjPoint::from_i64(&c);
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let d = (form("x0 + 2*x1", 3), 1);
            let w = [(form("x2", 3), 1), (form("x1 - x2", 3), 1)];
            prop_assume!(!d.0.eval(&p.as_rats()).unwrap().is_zero());
            prop_assume!(w.iter().any(|(f, _)| !f.eval(&p.as_rats()).unwrap().is_zero()));
            for v in small_prime_places() {
                let strict_zero = strict_transform_local(&d, &w, &p, &v).unwrap().value.is_one();
                let ld = weil_local(&d.0, &p, &v).unwrap().value;
                let lw = match weil_subscheme(&w, &p, &v) {
                    Ok(h) => h.value,
                    Err(_) => continue,
                };
                prop_assert_eq!(strict_zero, ld <= lw);
            }
        }
    }
}
