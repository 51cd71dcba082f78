//! Divisor classes on the blow-up of projective n-space at r distinct points.
//!
//! A class is stored as `a*H - sum b_i*E_i`, where `H` is the pulled-back
//! hyperplane class and `E_i` the exceptional divisor over the i-th point.
//! The Chow ring relations are `H^n = 1`, `E_i^n = (-1)^(n-1)` and every mixed
//! monomial is zero. Point and hyperplane indices are 0-based throughout.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, int, rat_string, rat_vec_string, Rat};
use crate::error::{Error, Result};
use crate::linalg::combinations;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawClass")]
pub struct DivisorClass {
    pub n: u32,
    pub r: usize,
    #[serde(with = "rat_string")]
    pub a: Rat,
    #[serde(with = "rat_vec_string")]
    pub b: Vec<Rat>,
}

#[derive(Deserialize)]
struct RawClass {
    n: u32,
    r: usize,
    #[serde(with = "rat_string")]
    a: Rat,
    #[serde(with = "rat_vec_string")]
    b: Vec<Rat>,
}

impl TryFrom<RawClass> for DivisorClass {
    type Error = Error;
    fn try_from(raw: RawClass) -> Result<Self> {
        DivisorClass::new(raw.n, raw.r, raw.a, raw.b)
    }
}

impl DivisorClass {
    pub fn new(n: u32, r: usize, a: Rat, b: Vec<Rat>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if b.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: b.len(),
            });
        }
        Ok(DivisorClass { n, r, a, b })
    }

    pub fn zero(n: u32, r: usize) -> Self {
        DivisorClass {
            n,
            r,
            a: Rat::zero(),
            b: vec![Rat::zero(); r],
        }
    }

    /// The pulled-back hyperplane class `H`.
    pub fn hyperplane(n: u32, r: usize) -> Self {
        let mut c = Self::zero(n, r);
        c.a = Rat::one();
        c
    }

    /// The exceptional divisor `E_i`, i.e. `a = 0`, `b = -e_i`.
    pub fn exceptional(n: u32, r: usize, i: usize) -> Self {
        let mut c = Self::zero(n, r);
        c.b[i] = -Rat::one();
        c
    }

    pub fn same_space(&self, other: &Self) -> bool {
        self.n == other.n && self.r == other.r
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x - y)
    }

    pub fn scale(&self, k: &Rat) -> Self {
        DivisorClass {
            n: self.n,
            r: self.r,
            a: &self.a * k,
            b: self.b.iter().map(|x| x * k).collect(),
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(&Rat, &Rat) -> Rat) -> Result<Self> {
        if !self.same_space(other) {
            return Err(Error::ClassMismatch);
        }
        Ok(DivisorClass {
            n: self.n,
            r: self.r,
            a: f(&self.a, &other.a),
            b: self.b.iter().zip(&other.b).map(|(x, y)| f(x, y)).collect(),
        })
    }

    /// Intersection with a curve class.
    pub fn dot_curve(&self, c: &CurveClass) -> Rat {
        match c.kind {
            CurveKind::ExceptionalLine => self.b[c.points[0]].clone(),
            CurveKind::Line => {
                let mut v = &self.a * int(c.degree as i64);
                for &j in &c.points {
                    v -= &self.b[j];
                }
                v
            }
        }
    }
}

impl std::fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*H", fmt_rat(&self.a))?;
        for (i, b) in self.b.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            if b.is_negative() {
                write!(f, " + {}*E{}", fmt_rat(&-b), i + 1)?;
            } else {
                write!(f, " - {}*E{}", fmt_rat(b), i + 1)?;
            }
        }
        Ok(())
    }
}

/// Top intersection number of `n` classes.
pub fn top_intersection(classes: &[DivisorClass]) -> Result<Rat> {
    let first = classes.first().ok_or(Error::DimensionMismatch {
        expected: 1,
        got: 0,
    })?;
    if classes.len() != first.n as usize {
        return Err(Error::DimensionMismatch {
            expected: first.n as usize,
            got: classes.len(),
        });
    }
    if classes.iter().any(|c| !c.same_space(first)) {
        return Err(Error::ClassMismatch);
    }
    let mut total: Rat = classes.iter().map(|c| c.a.clone()).product();
    for i in 0..first.r {
        let p: Rat = classes.iter().map(|c| c.b[i].clone()).product();
        total -= p;
    }
    Ok(total)
}

/// Top intersection of `prod c_j^{k_j}` with `sum k_j = n`.
pub fn intersect_powers(factors: &[(&DivisorClass, u32)]) -> Result<Rat> {
    let list: Vec<DivisorClass> = factors
        .iter()
        .flat_map(|(c, k)| std::iter::repeat_n((*c).clone(), *k as usize))
        .collect();
    top_intersection(&list)
}

/// Class of the strict transform of a degree-`d` hypersurface with the given
/// multiplicities at the blown-up points.
pub fn strict_transform(n: u32, d: u32, m: &[u32]) -> DivisorClass {
    DivisorClass {
        n,
        r: m.len(),
        a: int(d as i64),
        b: m.iter().map(|&x| int(x as i64)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Cyclic,
    Marked,
}

/// Hyperplanes `H_0..H_{h-1}` and blown-up points with their incidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupConfig {
    n: u32,
    kind: ConfigKind,
    points: usize,
    incidence: Vec<BTreeSet<usize>>,
}

impl BlowupConfig {
    /// `q` hyperplanes; `H_i` contains `P_{i-n+1}, .., P_i` (indices mod q).
    pub fn cyclic(n: u32, q: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("cyclic needs n >= 2, got {n}")));
        }
        if q < 3 * n as usize {
            return Err(Error::InvalidConfig(format!("cyclic needs q >= 3n, got q={q}, n={n}")));
        }
        let nn = n as usize;
        let incidence = (0..q)
            .map(|i| (0..nn).map(|t| (i + q - t) % q).collect())
            .collect();
        Ok(BlowupConfig {
            n,
            kind: ConfigKind::Cyclic,
            points: q,
            incidence,
        })
    }

    /// `2n` hyperplanes and `n+1` points with `P_i` on `H_i` only.
    pub fn marked(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("marked needs n >= 2, got {n}")));
        }
        let nn = n as usize;
        let incidence = (0..2 * nn)
            .map(|i| if i <= nn { BTreeSet::from([i]) } else { BTreeSet::new() })
            .collect();
        Ok(BlowupConfig {
            n,
            kind: ConfigKind::Marked,
            points: nn + 1,
            incidence,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> ConfigKind {
        self.kind
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.incidence.len()
    }

    pub fn points_on(&self, h: usize) -> &BTreeSet<usize> {
        &self.incidence[h]
    }

    pub fn hyperplanes_through(&self, p: usize) -> BTreeSet<usize> {
        (0..self.incidence.len())
            .filter(|&h| self.incidence[h].contains(&p))
            .collect()
    }

    /// Class of the strict transform `H~_h`.
    pub fn hyperplane_class(&self, h: usize) -> DivisorClass {
        let m: Vec<u32> = (0..self.points)
            .map(|j| u32::from(self.incidence[h].contains(&j)))
            .collect();
        strict_transform(self.n, 1, &m)
    }

    pub fn hyperplane_classes(&self) -> Vec<DivisorClass> {
        (0..self.num_hyperplanes()).map(|h| self.hyperplane_class(h)).collect()
    }

    fn owns(&self, cls: &DivisorClass) -> bool {
        cls.n == self.n && cls.r == self.points
    }
}

/// The named classes of a configuration: `D` (cyclic) or `A` (marked), plus every `H~_i`.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigClasses {
    pub name: &'static str,
    pub main: DivisorClass,
    pub tilde: Vec<DivisorClass>,
}

pub fn config_classes(cfg: &BlowupConfig, ell: Option<u64>) -> Result<ConfigClasses> {
    let tilde = cfg.hyperplane_classes();
    let zero = DivisorClass::zero(cfg.n, cfg.points);
    match cfg.kind {
        ConfigKind::Cyclic => {
            let mut d = zero;
            for h in &tilde {
                d = d.add(h)?;
            }
            Ok(ConfigClasses {
                name: "D",
                main: d,
                tilde,
            })
        }
        ConfigKind::Marked => {
            let ell = ell.ok_or_else(|| Error::InvalidConfig("marked configuration requires ell".into()))?;
            if ell == 0 {
                return Err(Error::InvalidConfig("ell must be positive".into()));
            }
            let n = cfg.n as usize;
            let mut a = zero;
            for h in &tilde[..=n] {
                a = a.add(h)?;
            }
            a = a.scale(&int(ell as i64)).add(&tilde[n + 1])?;
            Ok(ConfigClasses {
                name: "A",
                main: a,
                tilde,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// A line inside the exceptional divisor over `points[0]`.
    ExceptionalLine,
    /// Strict transform of a degree-`degree` curve through `points` with multiplicity one.
    Line,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClass {
    pub kind: CurveKind,
    pub points: Vec<usize>,
    pub degree: u32,
}

impl CurveClass {
    pub fn exceptional_line(i: usize) -> Self {
        CurveClass {
            kind: CurveKind::ExceptionalLine,
            points: vec![i],
            degree: 0,
        }
    }

    pub fn line_through(points: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = points.into_iter().collect();
        CurveClass {
            kind: CurveKind::Line,
            points: set.into_iter().collect(),
            degree: 1,
        }
    }
}

impl std::fmt::Display for CurveClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| format!("P{}", p + 1)).collect();
        match self.kind {
            CurveKind::ExceptionalLine => write!(f, "line in E{}", self.points[0] + 1),
            CurveKind::Line if pts.is_empty() => write!(f, "general line"),
            CurveKind::Line => write!(f, "line through {}", pts.join(",")),
        }
    }
}

/// Finite test family, in the order it is evaluated.
pub fn test_curves(cfg: &BlowupConfig) -> Vec<CurveClass> {
    let mut out: Vec<CurveClass> = (0..cfg.points).map(CurveClass::exceptional_line).collect();
    let mut seen = BTreeSet::new();
    let mut push = |c: CurveClass, out: &mut Vec<CurveClass>| {
        if seen.insert(c.points.clone()) {
            out.push(c);
        }
    };
    push(CurveClass::line_through([]), &mut out);
    for j in 0..cfg.points {
        push(CurveClass::line_through([j]), &mut out);
    }
    for pair in combinations(cfg.points, 2) {
        push(line_closure(cfg, pair[0], pair[1]), &mut out);
    }
    for h in 0..cfg.num_hyperplanes() {
        let pts: Vec<usize> = cfg.points_on(h).iter().copied().collect();
        for pair in combinations(pts.len(), 2) {
            push(line_closure(cfg, pts[pair[0]], pts[pair[1]]), &mut out);
        }
    }
    out
}

// If two points share n-1 hyperplanes, the line through them is the
// intersection of those hyperplanes and contains every point lying on all of them.
fn line_closure(cfg: &BlowupConfig, j: usize, k: usize) -> CurveClass {
    let shared: BTreeSet<usize> = cfg
        .hyperplanes_through(j)
        .intersection(&cfg.hyperplanes_through(k))
        .copied()
        .collect();
    if shared.len() + 1 < cfg.n as usize || shared.is_empty() {
        return CurveClass::line_through([j, k]);
    }
    let on_all = (0..cfg.points).filter(|&p| shared.iter().all(|&h| cfg.incidence[h].contains(&p)));
    CurveClass::line_through(on_all.chain([j, k]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NefCertificate {
    /// `scale * (D - m*H~_index)` on a cyclic configuration with `q >= 3n`, `0 <= m <= n`.
    CyclicLemma {
        index: usize,
        #[serde(with = "rat_string")]
        m: Rat,
        #[serde(with = "rat_string")]
        scale: Rat,
    },
    /// Nonnegative combination of the nef classes `H~_i` on the marked configuration.
    MarkedCombination {
        #[serde(with = "rat_vec_string")]
        coefficients: Vec<Rat>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NefVerdict {
    CertifiedNef {
        certificate: NefCertificate,
        curves_checked: usize,
    },
    FailsWitness {
        curve: CurveClass,
        #[serde(with = "rat_string")]
        value: Rat,
    },
    Inconclusive {
        curves_checked: usize,
    },
}

impl NefVerdict {
    /// Which tier produced the verdict.
    pub fn tier(&self) -> &'static str {
        match self {
            NefVerdict::CertifiedNef { .. } => "certificate",
            NefVerdict::FailsWitness { .. } => "witness-family",
            NefVerdict::Inconclusive { .. } => "none",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, NefVerdict::CertifiedNef { .. })
    }
}

pub fn nef_test(cls: &DivisorClass, cfg: &BlowupConfig) -> Result<NefVerdict> {
    if !cfg.owns(cls) {
        return Err(Error::ClassMismatch);
    }
    let curves = test_curves(cfg);
    for c in &curves {
        let v = cls.dot_curve(c);
        if v.is_negative() {
            return Ok(NefVerdict::FailsWitness {
                curve: c.clone(),
                value: v,
            });
        }
    }
    let curves_checked = curves.len();
    let certificate = match cfg.kind {
        ConfigKind::Cyclic => cyclic_certificate(cls, cfg),
        ConfigKind::Marked => marked_certificate(cls, cfg),
    };
    Ok(match certificate {
        Some(certificate) => NefVerdict::CertifiedNef {
            certificate,
            curves_checked,
        },
        None => NefVerdict::Inconclusive { curves_checked },
    })
}

fn cyclic_certificate(cls: &DivisorClass, cfg: &BlowupConfig) -> Option<NefCertificate> {
    let n = int(cfg.n as i64);
    let q = int(cfg.points as i64);
    let d = config_classes(cfg, None).ok()?.main;
    for i in 0..cfg.num_hyperplanes() {
        let outside = (0..cfg.points).find(|j| !cfg.points_on(i).contains(j))?;
        let scale = &cls.b[outside] / &n;
        if !scale.is_positive() {
            continue;
        }
        let m = &q - &cls.a / &scale;
        if m.is_negative() || m > n {
            continue;
        }
        let candidate = d.sub(&cfg.hyperplane_class(i).scale(&m)).ok()?.scale(&scale);
        if &candidate == cls {
            return Some(NefCertificate::CyclicLemma { index: i, m, scale });
        }
    }
    None
}

fn marked_certificate(cls: &DivisorClass, cfg: &BlowupConfig) -> Option<NefCertificate> {
    if cls.b.iter().any(Signed::is_negative) {
        return None;
    }
    let rest = &cls.a - cls.b.iter().sum::<Rat>();
    if rest.is_negative() {
        return None;
    }
    // H~_i = H - E_i for the marked points, then the remainder on H~_{n+1} = H.
    let mut coefficients = cls.b.clone();
    coefficients.resize(cfg.num_hyperplanes(), Rat::zero());
    coefficients[cfg.n as usize + 1] = rest;
    Some(NefCertificate::MarkedCombination { coefficients })
}
