//! Empirical audits of the hyperplane and Levin-type height inequalities over
//! sampled points. Verdicts are exact; logarithms are for display only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_form, local_from_value, support_primes, Place, PlaceSet, ProjPoint};
use crate::arith::{fmt_rat, ln_rat, opt_rat_string, pow, pow_signed, rat_string, vp_unchecked, Rat};
use crate::error::{Error, Result};
use crate::linalg::hyperplanes_general_position;
use crate::par;
use crate::poly::MultiPoly;

/// `count` points with coordinates drawn uniformly from `[-bound, bound]`,
/// normalized. Deterministic in `seed`.
pub fn random_points(n: usize, bound: u64, count: usize, seed: u64) -> Vec<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = bound as i64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c: Vec<i64> = (0..=n).map(|_| rng.gen_range(-b..=b)).collect();
        if let Ok(p) = ProjPoint::from_i64(&c) {
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditVerdict {
    Pass,
    Violation,
    OnSupport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceBreakdown {
    pub place: Place,
    /// Local values of every form, exact.
    pub values: Vec<String>,
    /// `v_p(F_i(P))` at finite places; empty at `inf`.
    pub valuations: Vec<i64>,
    #[serde(with = "rat_string")]
    pub defect: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub index: usize,
    pub point: ProjPoint,
    /// `ln` of the left side; infinite on the support.
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: AuditVerdict,
    /// Largest per-place defect, multiplicative.
    #[serde(with = "opt_rat_string")]
    pub defect: Option<Rat>,
    pub places: Vec<PlaceBreakdown>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceAudit {
    pub n: usize,
    pub q: usize,
    pub s: PlaceSet,
    #[serde(with = "rat_string")]
    pub eps: Rat,
    pub rows: Vec<AuditRow>,
    pub violators: Vec<usize>,
    #[serde(with = "opt_rat_string")]
    pub max_defect: Option<Rat>,
}

/// Local values of every form at every place of interest: `inf`, the primes
/// of `S`, and the primes dividing some form value.
fn breakdown(
    degs: &[u32],
    values: &[Rat],
    p: &ProjPoint,
    s: &PlaceSet,
    keep: usize,
) -> Result<Vec<(Place, Vec<Rat>, PlaceBreakdown)>> {
    let mut places = vec![Place::Infinite];
    let mut primes = support_primes(values)?;
    primes.extend(s.primes().iter().cloned());
    places.extend(primes.into_iter().map(Place::Finite));
    Ok(places
        .into_iter()
        .map(|v| {
            let vals: Vec<Rat> = values
                .iter()
                .zip(degs)
                .map(|(fx, &d)| local_from_value(fx, d, p, &v).value)
                .collect();
            let mut sorted = vals.clone();
            sorted.sort();
            let defect: Rat = sorted.iter().take(keep).cloned().product();
            let valuations = match &v {
                Place::Infinite => Vec::new(),
                Place::Finite(q) => values.iter().map(|x| vp_unchecked(x, q)).collect(),
            };
            let b = PlaceBreakdown {
                place: v.clone(),
                values: vals.iter().map(fmt_rat).collect(),
                valuations,
                defect,
            };
            (v, vals, b)
        })
        .collect())
}

fn eps_parts(eps: &Rat) -> Result<(BigInt, u32)> {
    if eps.is_negative() {
        return Err(Error::OutOfRange("epsilon must be nonnegative".into()));
    }
    let b: u32 = eps
        .denom()
        .try_into()
        .map_err(|_| Error::OutOfRange("epsilon denominator too large".into()))?;
    Ok((eps.numer().clone(), b))
}

fn exponent_i64(x: BigInt) -> Result<i64> {
    x.try_into().map_err(|_| Error::OutOfRange("exponent too large".into()))
}

/// Audits `sum_{v in S} max_I sum_{i in I} lambda_{H_i,v}(P) <= (n+1+eps) h(P)`,
/// with `I` ranging over independent subsets, and records the defect
/// `sum_i lambda_i - max_{|I|=n} sum_{i in I} lambda_i` at every place.
pub fn subspace_audit(
    hyperplanes: &[MultiPoly],
    s: &PlaceSet,
    eps: &Rat,
    samples: &[ProjPoint],
) -> Result<SubspaceAudit> {
    if hyperplanes.is_empty() {
        return Err(Error::Degenerate("no hyperplanes".into()));
    }
    if !hyperplanes_general_position(hyperplanes)? {
        return Err(Error::NotGeneralPosition);
    }
    let nvars = hyperplanes[0].nvars();
    let n = nvars - 1;
    let q = hyperplanes.len();
    let (ea, eb) = eps_parts(eps)?;
    let degs = vec![1u32; q];
    // Compare lhs^b against H^((n+1)b + a).
    let rhs_exp = exponent_i64(BigInt::from((n as u64 + 1) * u64::from(eb)) + &ea)?;
    let rhs_coef = crate::arith::to_f64(&(Rat::from_integer((n as i64 + 1).into()) + eps));

    let rows = par::map(samples, |index, p| -> Result<AuditRow> {
        for f in hyperplanes {
            check_form(f, p)?;
        }
        let values: Vec<Rat> = hyperplanes.iter().map(|f| f.eval(&p.as_rats())).collect::<Result<_>>()?;
        let rhs = rhs_coef * p.log_height();
        if values.iter().any(Zero::is_zero) {
            return Ok(AuditRow {
                index,
                point: p.clone(),
                lhs: f64::INFINITY,
                rhs,
                verdict: AuditVerdict::OnSupport,
                defect: None,
                places: Vec::new(),
            });
        }
        let keep = q.saturating_sub(n);
        let table = breakdown(&degs, &values, p, s, keep)?;
        let mut lhs = Rat::one();
        for (v, vals, _) in &table {
            if !s.contains(v) {
                continue;
            }
            let mut sorted = vals.clone();
            sorted.sort();
            lhs *= sorted.iter().rev().take(n + 1).filter(|x| **x > Rat::one()).cloned().product::<Rat>();
        }
        let h = Rat::from_integer(p.height());
        let verdict = if pow(&lhs, eb) <= pow_signed(&h, rhs_exp) {
            AuditVerdict::Pass
        } else {
            AuditVerdict::Violation
        };
        let defect = table.iter().map(|(_, _, b)| b.defect.clone()).max();
        Ok(AuditRow {
            index,
            point: p.clone(),
            lhs: ln_rat(&lhs),
            rhs,
            verdict,
            defect,
            places: table.into_iter().map(|(_, _, b)| b).collect(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let violators = rows.iter().filter(|r| r.verdict != AuditVerdict::Pass).map(|r| r.index).collect();
    let max_defect = rows.iter().filter_map(|r| r.defect.clone()).max();
    Ok(SubspaceAudit {
        n,
        q,
        s: s.clone(),
        eps: eps.clone(),
        rows,
        violators,
        max_defect,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevinRow {
    pub index: usize,
    pub point: ProjPoint,
    /// `sum (1/d_i) m_{D_i,S}(P)` in natural-log units.
    pub lhs: f64,
    /// `sum (1/d_i) N_{D_i,S}(P)` in natural-log units.
    pub lhs_counting: f64,
    pub rhs: f64,
    /// Verdict of the proximity form `lhs >= rhs`.
    pub verdict: AuditVerdict,
    /// Verdict of the counting form `lhs_counting >= rhs`.
    pub verdict_counting: AuditVerdict,
    pub places: Vec<PlaceBreakdown>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevinAudit {
    pub n: usize,
    pub q: usize,
    pub degrees: Vec<u32>,
    pub s: PlaceSet,
    #[serde(with = "rat_string")]
    pub eps: Rat,
    pub rows: Vec<LevinRow>,
    pub violators: Vec<usize>,
    pub violators_counting: Vec<usize>,
}

/// Audits `sum (1/d_i) m_{D_i,S}(P) >= (q-n-1-eps) h(P)` and, alongside, the
/// same bound with counting functions in place of proximity functions.
/// General position is verified for hyperplanes and must be asserted otherwise.
pub fn levin_duke_audit(
    forms: &[MultiPoly],
    s: &PlaceSet,
    eps: &Rat,
    samples: &[ProjPoint],
    assume_general_position: bool,
) -> Result<LevinAudit> {
    if forms.is_empty() {
        return Err(Error::Degenerate("no forms".into()));
    }
    if forms.iter().all(|f| f.linear_coefficients().is_some()) {
        if !hyperplanes_general_position(forms)? {
            return Err(Error::NotGeneralPosition);
        }
    } else if !assume_general_position {
        return Err(Error::NotGeneralPosition);
    }
    let nvars = forms[0].nvars();
    let n = nvars - 1;
    let q = forms.len();
    let mut degrees = Vec::with_capacity(q);
    for f in forms {
        if f.nvars() != nvars || f.is_zero() || !f.is_homogeneous() || f.degree() == Some(0) {
            return Err(Error::NotHomogeneous);
        }
        degrees.push(f.degree().unwrap_or(0));
    }
    let l = degrees.iter().fold(1u32, |l, d| l.lcm(d));
    let (ea, eb) = eps_parts(eps)?;
    // Both sides raised to the power b*L.
    let coef = BigInt::from(q as i64 - n as i64 - 1) * BigInt::from(eb) - &ea;
    let rhs_exp = exponent_i64(coef * BigInt::from(l))?;
    let rhs_coef = q as f64 - n as f64 - 1.0 - crate::arith::to_f64(eps);

    let rows = par::map(samples, |index, p| -> Result<LevinRow> {
        let values: Vec<Rat> = forms.iter().map(|f| f.eval(&p.as_rats())).collect::<Result<_>>()?;
        let rhs = rhs_coef * p.log_height();
        if values.iter().any(Zero::is_zero) {
            return Ok(LevinRow {
                index,
                point: p.clone(),
                lhs: f64::INFINITY,
                lhs_counting: f64::INFINITY,
                rhs,
                verdict: AuditVerdict::OnSupport,
                verdict_counting: AuditVerdict::OnSupport,
                places: Vec::new(),
            });
        }
        let table = breakdown(&degrees, &values, p, s, q.saturating_sub(n))?;
        let mut prox = Rat::one();
        let mut count = Rat::one();
        for (v, vals, _) in &table {
            let part: Rat = vals.iter().zip(&degrees).map(|(x, &d)| pow(x, l / d)).product();
            if s.contains(v) {
                prox *= part;
            } else {
                count *= part;
            }
        }
        let h = Rat::from_integer(p.height());
        let rhs_exact = pow_signed(&h, rhs_exp);
        let judge = |x: &Rat| {
            if pow(x, eb) >= rhs_exact {
                AuditVerdict::Pass
            } else {
                AuditVerdict::Violation
            }
        };
        Ok(LevinRow {
            index,
            point: p.clone(),
            lhs: ln_rat(&prox) / f64::from(l),
            lhs_counting: ln_rat(&count) / f64::from(l),
            rhs,
            verdict: judge(&prox),
            verdict_counting: judge(&count),
            places: table.into_iter().map(|(_, _, b)| b).collect(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let violators = rows.iter().filter(|r| r.verdict == AuditVerdict::Violation).map(|r| r.index).collect();
    let violators_counting =
        rows.iter().filter(|r| r.verdict_counting == AuditVerdict::Violation).map(|r| r.index).collect();
    Ok(LevinAudit {
        n,
        q,
        degrees,
        s: s.clone(),
        eps: eps.clone(),
        rows,
        violators,
        violators_counting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn forms(list: &[&str]) -> Vec<MultiPoly> {
        list.iter().map(|s| MultiPoly::parse(s, 3).unwrap()).collect()
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = random_points(2, 1000, 50, 7);
        assert_eq!(a, random_points(2, 1000, 50, 7));
        assert_ne!(a, random_points(2, 1000, 50, 8));
        assert!(a.iter().all(|p| p.height() <= BigInt::from(1000)));
    }

    #[test]
    fn coordinate_row_by_hand() {
        let hs = forms(&["x0", "x1", "x2"]);
        let p = ProjPoint::from_i64(&[1, 2, 3]).unwrap();
        let audit = subspace_audit(&hs, &PlaceSet::archimedean(), &rat(1, 10), &[p]).unwrap();
        let row = &audit.rows[0];
        // At inf the values are 3/1, 3/2, 3/3; their product is 9/2 <= 3^(3.1).
        assert_eq!(row.places[0].values, vec!["3", "3/2", "1"]);
        assert!((row.lhs - 4.5f64.ln()).abs() < 1e-12);
        assert_eq!(row.verdict, AuditVerdict::Pass);
        // Finite places: 2 and 3 divide a coordinate and contribute nothing to lhs.
        assert_eq!(row.places.len(), 3);
        assert_eq!(row.places[1].valuations, vec![0, 1, 0]);
    }

    #[test]
    fn far_point_has_trivial_finite_contribution() {
        let hs = forms(&["x0", "x1", "x2", "x0 + x1 + x2"]);
        // All form values are +-1 or 3; only p=3 shows up, where just one form vanishes.
        let p = ProjPoint::from_i64(&[1, 1, 1]).unwrap();
        let a = subspace_audit(&hs, &PlaceSet::parse("inf,3").unwrap(), &rat(1, 10), &[p]).unwrap();
        let three = &a.rows[0].places[1];
        assert_eq!(three.values, vec!["1", "1", "1", "3"]);
        assert_eq!(three.defect, int(1));
    }

    #[test]
    fn on_support_and_errors() {
        let hs = forms(&["x0", "x1", "x2"]);
        let p = ProjPoint::from_i64(&[0, 1, 1]).unwrap();
        let a = subspace_audit(&hs, &PlaceSet::archimedean(), &rat(1, 10), &[p]).unwrap();
        assert_eq!(a.violators, vec![0]);
        assert_eq!(a.rows[0].verdict, AuditVerdict::OnSupport);
        let bad = forms(&["x0", "x1", "x0 + x1"]);
        assert!(matches!(subspace_audit(&bad, &PlaceSet::archimedean(), &rat(1, 10), &[]), Err(Error::NotGeneralPosition)));
        assert!(subspace_audit(&hs, &PlaceSet::archimedean(), &rat(-1, 10), &[]).is_err());
    }

    #[test]
    fn levin_examples() {
        let pts = random_points(2, 200, 200, 3);
        // q = n+1: the right side is nonpositive, everything passes in both forms.
        let a = levin_duke_audit(&forms(&["x0", "x1", "x2"]), &PlaceSet::archimedean(), &rat(1, 2), &pts, false).unwrap();
        assert!(a.violators.is_empty() && a.violators_counting.is_empty());

        // With S covering every support prime, m = h and lhs = q h.
        let hs = forms(&["x0", "x1", "x2", "x0 + x1 + x2", "x0 + 2*x1 + 4*x2"]);
        let p = ProjPoint::from_i64(&[2, 3, 5]).unwrap();
        let mut primes = std::collections::BTreeSet::new();
        for f in &hs {
            primes.extend(support_primes([&f.eval(&p.as_rats()).unwrap()]).unwrap());
        }
        let s = PlaceSet::with_primes(primes).unwrap();
        let a = levin_duke_audit(&hs, &s, &rat(1, 2), std::slice::from_ref(&p), false).unwrap();
        assert_eq!(a.rows[0].verdict, AuditVerdict::Pass);
        assert!((a.rows[0].lhs - 5.0 * p.log_height()).abs() < 1e-9);
        assert_eq!(a.rows[0].verdict_counting, AuditVerdict::Violation);

        assert!(matches!(
            levin_duke_audit(&forms(&["x0^2 + x1^2", "x2^2"]), &PlaceSet::archimedean(), &rat(1, 2), &pts, false),
            Err(Error::NotGeneralPosition)
        ));
    }
}
