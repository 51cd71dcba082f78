//! Exact verification tables over parameter grids.

use serde::Serialize;

use crate::arith::{fmt_rat, int, Rat};
use crate::beta::{self, AutissierInput};
use crate::blowup::{config_classes, intersect_powers, top_intersection, BlowupConfig, DivisorClass};
use crate::error::Result;

/// The computations a verification run trusts. Swapping one out lets tests
/// confirm that a wrong kernel is caught.
#[derive(Clone, Copy)]
pub struct VerifyKernels {
    pub top_intersection: fn(&[DivisorClass]) -> Result<Rat>,
    pub beta_exact_cyclic: fn(u32, u64) -> Result<Rat>,
    pub f_poly: fn(u32, i64) -> Result<Rat>,
    pub beta_autissier_lower: fn(&AutissierInput) -> Result<Rat>,
}

impl Default for VerifyKernels {
    fn default() -> Self {
        VerifyKernels {
            top_intersection,
            beta_exact_cyclic: beta::beta_exact_cyclic,
            f_poly: beta::f_poly,
            beta_autissier_lower: beta::beta_autissier_lower,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyGrid {
    /// Cyclic dimensions and, per `n`, `q` from `q_lo * n` to `q_hi * n`.
    pub cyclic_n: Vec<u32>,
    pub q_lo: u64,
    pub q_hi: u64,
    /// Overrides the `q` range with one value when set.
    pub q: Option<u64>,
    pub marked_n: Vec<u32>,
    pub ells: Vec<u64>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        VerifyGrid {
            cyclic_n: (2..=6).collect(),
            q_lo: 3,
            q_hi: 4,
            q: None,
            marked_n: vec![2, 3, 4],
            ells: vec![10, 100, 1000],
        }
    }
}

impl VerifyGrid {
    fn qs(&self, n: u32) -> Vec<u64> {
        match self.q {
            Some(q) => vec![q],
            None => (self.q_lo * n as u64..=self.q_hi * n as u64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub table: &'static str,
    pub n: u32,
    pub param: String,
    pub beta_exact: String,
    pub bound: String,
    pub target: String,
    pub pass: bool,
    pub detail: String,
}

impl VerifyRow {
    pub const COLUMNS: [&'static str; 8] = ["table", "n", "param", "beta_exact", "bound", "target", "verdict", "detail"];

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.table.to_string(),
            self.n.to_string(),
            self.param.clone(),
            self.beta_exact.clone(),
            self.bound.clone(),
            self.target.clone(),
            if self.pass { "PASS" } else { "FAIL" }.to_string(),
            self.detail.clone(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub grid: VerifyGrid,
    pub rows: Vec<VerifyRow>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&VerifyRow> {
        self.rows.iter().find(|r| !r.pass)
    }
}

fn nat(x: u64) -> Rat {
    Rat::from_integer(x.into())
}

fn intersection_row(k: &VerifyKernels, n: u32, q: u64) -> Result<VerifyRow> {
    let cfg = BlowupConfig::cyclic(n, q as usize)?;
    let classes = config_classes(&cfg, None)?;
    let d = &classes.main;
    let (nn, qq) = (nat(n as u64), nat(q));
    let pw = |x: &Rat, e: u32| crate::arith::pow(x, e);
    let expected = pw(&qq, n) - pw(&nn, n) * &qq;
    let got = (k.top_intersection)(&vec![d.clone(); n as usize])?;
    let mut detail = String::new();
    if got != expected {
        detail = format!("D^{n} = {}", fmt_rat(&got));
    }
    'outer: for (i, h) in classes.tilde.iter().enumerate() {
        for e in 0..n {
            let mut list = vec![d.clone(); e as usize];
            list.extend(std::iter::repeat_n(h.clone(), (n - e) as usize));
            let v = (k.top_intersection)(&list)?;
            let want = pw(&qq, e) - pw(&nn, e + 1);
            if v != want {
                if detail.is_empty() {
                    detail = format!("D^{e} H~{}^{} = {} != {}", i + 1, n - e, fmt_rat(&v), fmt_rat(&want));
                }
                break 'outer;
            }
        }
    }
    // The power form must agree with the list form.
    if detail.is_empty() && intersect_powers(&[(d, n)])? != got {
        detail = "power form disagrees".into();
    }
    Ok(VerifyRow {
        table: "intersection",
        n,
        param: format!("q={q}"),
        beta_exact: String::new(),
        bound: fmt_rat(&got),
        target: fmt_rat(&expected),
        pass: detail.is_empty(),
        detail,
    })
}

fn beta_row(k: &VerifyKernels, n: u32, q: u64) -> Result<VerifyRow> {
    let b = (k.beta_exact_cyclic)(n, q)?;
    let f = (k.f_poly)(n, q as i64)?;
    let (nn, qq) = (nat(n as u64), nat(q));
    let vol = crate::arith::pow(&qq, n) - crate::arith::pow(&nn, n) * &qq;
    let identity = (&b - int(1)) * (&nn + int(1)) * vol;
    let mut detail = Vec::new();
    if b <= int(1) {
        detail.push("beta <= 1".to_string());
    }
    if f <= int(0) {
        detail.push("f(q) <= 0".to_string());
    }
    if identity != f {
        detail.push(format!("f(q) != (beta-1)(n+1)(q^n-n^n q) = {}", fmt_rat(&identity)));
    }
    Ok(VerifyRow {
        table: "beta",
        n,
        param: format!("q={q}"),
        beta_exact: fmt_rat(&b),
        bound: fmt_rat(&f),
        target: "0".into(),
        pass: detail.is_empty(),
        detail: detail.join("; "),
    })
}

fn autissier_row(k: &VerifyKernels, n: u32, ell: u64) -> Result<VerifyRow> {
    let mut worst: Option<(usize, Rat, Rat)> = None;
    let mut failures = Vec::new();
    for i in 0..(n as usize + 2) {
        let input = AutissierInput::marked(n, ell, i)?;
        let bound = (k.beta_autissier_lower)(&input)?;
        let target = beta::marked_target(n, ell, i);
        if bound <= target {
            failures.push(format!("i={}", i + 1));
        }
        let margin = &bound - &target;
        if worst.as_ref().is_none_or(|(_, b, t)| margin < b - t) {
            worst = Some((i, bound, target));
        }
    }
    let (i, bound, target) = worst.expect("at least one index");
    Ok(VerifyRow {
        table: "autissier",
        n,
        param: format!("ell={ell}"),
        beta_exact: String::new(),
        bound: fmt_rat(&bound),
        target: fmt_rat(&target),
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("tightest i={}", i + 1)
        } else {
            format!("bound <= target at {}", failures.join(","))
        },
    })
}

/// Scan every table of the grid.
pub fn verify_tables(grid: &VerifyGrid, kernels: &VerifyKernels) -> Result<VerifyReport> {
    let mut cells = Vec::new();
    for &n in &grid.cyclic_n {
        for q in grid.qs(n) {
            cells.push((n, q));
        }
    }
    let rows: Vec<Result<Vec<VerifyRow>>> = crate::par::map(&cells, |_, &(n, q)| {
        Ok(vec![intersection_row(kernels, n, q)?, beta_row(kernels, n, q)?])
    });
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    out.sort_by_key(|r| r.table != "intersection");
    for &n in &grid.marked_n {
        for &ell in &grid.ells {
            out.push(autissier_row(kernels, n, ell)?);
        }
    }
    Ok(VerifyReport {
        grid: grid.clone(),
        pass: out.iter().all(|r| r.pass),
        rows: out,
    })
}
