//! Forms vanishing on a finite point set, and linear components in the plane.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Matrix};
use crate::poly::MultiPoly;

/// Lines are only extracted for at most this many points.
const MAX_LINE_POINTS: usize = 600;

/// Exponent vectors in `nvars` variables of degree exactly `d`
/// (`homogeneous`) or at most `d`, in graded lexicographic order.
pub fn monomials(nvars: usize, d: u32, homogeneous: bool) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(nvars, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return vec![Vec::new()];
    }
    let degrees: Vec<u32> = if homogeneous { vec![d] } else { (0..=d).collect() };
    for k in degrees {
        rec(nvars, k, &mut Vec::new(), &mut out);
    }
    out
}

fn monomial_value(x: &[Rat], e: &[u32]) -> Rat {
    x.iter().zip(e).fold(Rat::one(), |acc, (v, &k)| acc * crate::arith::pow(v, k))
}

/// A basis of the forms of degree `d` vanishing at every point. Projective
/// points use homogeneous forms; affine points use all degrees up to `d`.
pub fn vanishing_forms(points: &[Vec<Rat>], vars: &[String], d: u32, homogeneous: bool) -> Result<Vec<MultiPoly>> {
    let mons = monomials(vars.len(), d, homogeneous);
    for p in points {
        if p.len() != vars.len() {
            return Err(Error::DimensionMismatch {
                expected: vars.len(),
                got: p.len(),
            });
        }
    }
    let basis: Vec<Vec<Rat>> = if points.is_empty() {
        (0..mons.len())
            .map(|i| (0..mons.len()).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect()
    } else {
        let rows = points.iter().map(|p| mons.iter().map(|e| monomial_value(p, e)).collect()).collect();
        kernel_basis(&Matrix::from_rows(rows)?)
    };
    basis
        .into_iter()
        .map(|v| MultiPoly::from_terms(vars.to_vec(), mons.iter().cloned().zip(v)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub degree: u32,
    pub monomials: usize,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineComponent {
    pub line: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthPoint {
    pub bound: u64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub points: usize,
    pub projective: bool,
    pub degrees: Vec<DegreeRow>,
    /// Least degree carrying a nonzero vanishing form.
    pub minimal_degree: Option<u32>,
    /// Vanishing forms of the minimal degree.
    pub forms: Vec<String>,
    /// Lines contained in the common zero locus of the minimal forms.
    pub lines: Vec<LineComponent>,
    /// Points on none of the reported lines.
    pub off_lines: usize,
    pub growth: Vec<GrowthPoint>,
}

/// Coefficients of the line through two plane points, scaled so the first
/// nonzero entry is one. Affine lines are `c0 + c1 x + c2 y`.
fn line_through(p: &[Rat], q: &[Rat], projective: bool) -> Option<Vec<Rat>> {
    let lift = |v: &[Rat]| -> Vec<Rat> {
        if projective {
            v.to_vec()
        } else {
            std::iter::once(Rat::one()).chain(v.iter().cloned()).collect()
        }
    };
    let (a, b) = (lift(p), lift(q));
    let c = vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ];
    let lead = c.iter().find(|v| !v.is_zero())?.clone();
    Some(c.into_iter().map(|v| v / &lead).collect())
}

fn on_line(c: &[Rat], p: &[Rat], projective: bool) -> bool {
    let v = if projective {
        &c[0] * &p[0] + &c[1] * &p[1] + &c[2] * &p[2]
    } else {
        &c[0] + &c[1] * &p[0] + &c[2] * &p[1]
    };
    v.is_zero()
}

fn line_string(c: &[Rat], vars: &[String], projective: bool) -> String {
    let poly = if projective {
        MultiPoly::linear(vars.to_vec(), c)
    } else {
        let mut f = MultiPoly::linear(vars.to_vec(), &c[1..]);
        f.add_term(vec![0; vars.len()], c[0].clone());
        f
    };
    format!("{poly} = 0")
}

/// Whether every form vanishes identically on the line through `p` and `q`:
/// a form of degree `d` vanishing at `d + 1` points of a line contains it.
fn line_in_locus(forms: &[MultiPoly], d: u32, p: &[Rat], q: &[Rat], projective: bool) -> Result<bool> {
    for t in 0..=d as i64 {
        let t = Rat::from_integer(t.into());
        let x: Vec<Rat> = if projective {
            p.iter().zip(q).map(|(a, b)| a + b * &t).collect()
        } else {
            p.iter().zip(q).map(|(a, b)| a + (b - a) * &t).collect()
        };
        for f in forms {
            if !f.eval(&x)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Kernel dimensions up to `max_degree` and, for plane point sets, the lines
/// contained in the zero locus of the minimal-degree vanishing forms.
pub fn degeneracy_report(points: &[Vec<Rat>], vars: &[String], projective: bool, max_degree: u32) -> Result<DegeneracyReport> {
    let mut degrees = Vec::new();
    let mut minimal = None;
    for d in 1..=max_degree {
        let forms = vanishing_forms(points, vars, d, projective)?;
        degrees.push(DegreeRow {
            degree: d,
            monomials: monomials(vars.len(), d, projective).len(),
            kernel_dim: forms.len(),
        });
        if minimal.is_none() && !forms.is_empty() {
            minimal = Some((d, forms));
        }
    }
    let plane = vars.len() == if projective { 3 } else { 2 };
    let mut lines = Vec::new();
    let mut covered = vec![false; points.len()];
    if let (true, Some((d, forms))) = (plane, &minimal) {
        if points.len() <= MAX_LINE_POINTS {
            let mut seen = BTreeSet::new();
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    let Some(c) = line_through(&points[i], &points[j], projective) else { continue };
                    if !seen.insert(c.clone()) {
                        continue;
                    }
                    if !line_in_locus(forms, *d, &points[i], &points[j], projective)? {
                        continue;
                    }
                    let mut count = 0;
                    for (k, p) in points.iter().enumerate() {
                        if on_line(&c, p, projective) {
                            count += 1;
                            covered[k] = true;
                        }
                    }
                    lines.push(LineComponent {
                        line: line_string(&c, vars, projective),
                        count,
                    });
                }
            }
        }
    }
    lines.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.line.cmp(&b.line)));
    Ok(DegeneracyReport {
        points: points.len(),
        projective,
        degrees,
        minimal_degree: minimal.as_ref().map(|(d, _)| *d),
        forms: minimal.map(|(_, f)| f.iter().map(|f| f.to_string()).collect()).unwrap_or_default(),
        off_lines: covered.iter().filter(|c| !**c).count(),
        lines,
        growth: Vec::new(),
    })
}

/// Solution counts at increasing bounds.
pub fn growth_series(bounds: &[u64], mut count: impl FnMut(u64) -> Result<usize>) -> Result<Vec<GrowthPoint>> {
    bounds.iter().map(|&b| Ok(GrowthPoint { bound: b, count: count(b)? })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn pts(list: &[[i64; 2]]) -> Vec<Vec<Rat>> {
        list.iter().map(|p| p.iter().map(|&v| int(v)).collect()).collect()
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monomial_counts() {
        for n in 1..4 {
            for d in 0..5 {
                assert_eq!(monomials(n, d, true).len(), binom(n + d as usize - 1, d as usize));
                assert_eq!(monomials(n, d, false).len(), binom(n + d as usize, d as usize));
            }
        }
    }

    #[test]
    fn three_noncollinear_points() {
        let r = degeneracy_report(&pts(&[[0, 0], [1, 0], [0, 1]]), &vars(&["x1", "x2"]), false, 2).unwrap();
        assert_eq!(r.degrees[0].kernel_dim, 0);
        assert_eq!(r.degrees[1].kernel_dim, 3);
        assert!(r.lines.is_empty());
        assert_eq!(r.minimal_degree, Some(2));
    }

    #[test]
    fn forms_vanish_on_points() {
        let p = pts(&[[1, 2], [3, -1], [0, 5], [2, 2], [7, 1]]);
        let v = vars(&["x1", "x2"]);
        for d in 1..=3 {
            let forms = vanishing_forms(&p, &v, d, false).unwrap();
            assert_eq!(forms.len(), (binom(d as usize + 2, 2)).saturating_sub(5));
            for f in &forms {
                for x in &p {
                    assert!(f.eval(x).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn two_lines_are_found() {
        // Points on x2 = 0 and on x1 = x2.
        let mut list: Vec<[i64; 2]> = (1..=4).map(|t| [t, 0]).collect();
        list.extend((1..=4).map(|t| [t, t]));
        let r = degeneracy_report(&pts(&list), &vars(&["x1", "x2"]), false, 2).unwrap();
        assert_eq!(r.minimal_degree, Some(2));
        assert_eq!(r.lines.len(), 2);
        assert!(r.lines.iter().all(|l| l.count == 4));
        assert_eq!(r.off_lines, 0);
    }

    #[test]
    fn projective_collinear() {
        let p: Vec<Vec<Rat>> = [[1, 0, 1], [1, 1, 0], [2, 1, 1], [0, 1, -1]]
            .iter()
            .map(|x| x.iter().map(|&v| int(v)).collect())
            .collect();
        let r = degeneracy_report(&p, &vars(&["x0", "x1", "x2"]), true, 1).unwrap();
        assert_eq!(r.minimal_degree, Some(1));
        assert_eq!(r.lines.len(), 1);
        assert_eq!(r.lines[0].count, 4);
    }
}
