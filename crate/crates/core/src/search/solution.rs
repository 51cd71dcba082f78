//! Solution sets and their JSON Lines form: a header line, a predicate line,
//! then one record per solution. Loading re-verifies every record.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{affine_values, Cor12, SRing, SearchBox, Thm11};
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::heights::ConditionMode;
use crate::poly::MultiPoly;

pub const TOOL: &str = "arithdeg";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Predicate {
    Thm11 {
        vars: Vec<String>,
        forms: Vec<String>,
        g: String,
        mode: ConditionMode,
        s: SRing,
    },
    Cor12 {
        vars: Vec<String>,
        g: String,
        s: SRing,
    },
    Thm16 {
        vars: Vec<String>,
        forms: Vec<String>,
        s: SRing,
    },
}

impl Predicate {
    pub fn thm11(forms: &[MultiPoly], g: &MultiPoly, mode: ConditionMode, s: &SRing) -> Self {
        Predicate::Thm11 {
            vars: g.vars().to_vec(),
            forms: forms.iter().map(|f| f.to_string()).collect(),
            g: g.to_string(),
            mode,
            s: s.clone(),
        }
    }

    pub fn cor12(g: &MultiPoly, s: &SRing) -> Self {
        Predicate::Cor12 {
            vars: g.vars().to_vec(),
            g: g.to_string(),
            s: s.clone(),
        }
    }

    pub fn thm16(forms: &[MultiPoly], s: &SRing) -> Self {
        Predicate::Thm16 {
            vars: forms[0].vars().to_vec(),
            forms: forms.iter().map(|f| f.to_string()).collect(),
            s: s.clone(),
        }
    }

    /// Short label stored on each record.
    pub fn tag(&self) -> String {
        match self {
            Predicate::Thm11 { mode: ConditionMode::I, .. } => "thm11-i".into(),
            Predicate::Thm11 { mode: ConditionMode::Ii, .. } => "thm11-ii".into(),
            Predicate::Cor12 { .. } => "cor12".into(),
            Predicate::Thm16 { .. } => "thm16".into(),
        }
    }

    pub fn s(&self) -> &SRing {
        match self {
            Predicate::Thm11 { s, .. } | Predicate::Cor12 { s, .. } | Predicate::Thm16 { s, .. } => s,
        }
    }

    pub fn is_projective(&self) -> bool {
        !matches!(self, Predicate::Cor12 { .. })
    }

    pub(crate) fn descriptor(&self, bx: &SearchBox) -> String {
        serde_json::to_string(&json!({ "predicate": self, "box": bx })).expect("serializable")
    }

    fn parse_all(vars: &[String], texts: &[String]) -> Result<Vec<MultiPoly>> {
        texts.iter().map(|t| MultiPoly::parse_with_vars(t, vars.to_vec())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    #[serde(with = "crate::arith::rat_vec_string")]
    pub point: Vec<Rat>,
    /// Valuations at primes outside `S` dividing some relevant value.
    pub witnesses: BTreeMap<String, Vec<i64>>,
    pub predicate: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub predicate: Predicate,
    pub bx: SearchBox,
    pub records: Vec<SolutionRecord>,
}

fn integer_point(x: &[Rat]) -> Result<Vec<i64>> {
    x.iter()
        .map(|v| {
            v.is_integer()
                .then(|| v.to_integer().to_i64())
                .flatten()
                .ok_or_else(|| Error::Verification(format!("non-integer projective coordinate {v}")))
        })
        .collect()
}

enum Checker {
    Thm11(Thm11),
    Cor12(Cor12, Vec<Rat>),
    Thm16(Vec<MultiPoly>, SRing),
}

impl SolutionSet {
    pub fn new(predicate: Predicate, bx: SearchBox, records: Vec<SolutionRecord>) -> Self {
        SolutionSet { predicate, bx, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn checker(&self) -> Result<Checker> {
        Ok(match &self.predicate {
            Predicate::Thm11 { vars, forms, g, mode, s } => {
                let forms = Predicate::parse_all(vars, forms)?;
                let g = MultiPoly::parse_with_vars(g, vars.clone())?;
                super::check_thm11_forms(&forms, &g, true)?;
                Checker::Thm11(Thm11::new(&forms, &g, *mode, s)?)
            }
            Predicate::Cor12 { vars, g, s } => {
                let g = MultiPoly::parse_with_vars(g, vars.clone())?;
                Checker::Cor12(Cor12::new(&g, s, true)?, affine_values(self.bx.bound, s, self.bx.denom_cap))
            }
            Predicate::Thm16 { vars, forms, s } => {
                let forms = Predicate::parse_all(vars, forms)?;
                super::check_thm16_forms(&forms)?;
                Checker::Thm16(forms, s.clone())
            }
        })
    }

    /// Re-check that every record lies in the box, satisfies the predicate
    /// and carries exactly the recomputed witnesses.
    pub fn verify(&self) -> Result<()> {
        let checker = self.checker()?;
        let tag = self.predicate.tag();
        let bound = self.bx.bound as i64;
        for (k, r) in self.records.iter().enumerate() {
            let fail = |why: &str| Error::Verification(format!("record {k}: {why}"));
            if r.predicate != tag {
                return Err(fail("predicate label mismatch"));
            }
            let projective = |len: usize| -> Result<Vec<i64>> {
                let x = integer_point(&r.point)?;
                if x.len() != len || x.iter().any(|v| v.abs() > bound) {
                    return Err(fail("point outside the box"));
                }
                let p = crate::heights::ProjPoint::from_i64(&x)?;
                if p.coords().iter().zip(&x).any(|(a, b)| *a != (*b).into()) {
                    return Err(fail("point is not normalized"));
                }
                Ok(x)
            };
            let witnesses = match &checker {
                Checker::Thm11(c) => {
                    let x = projective(self.bx.n + 1)?;
                    if !c.holds(&x) {
                        return Err(fail("predicate fails"));
                    }
                    c.witnesses(&x)?
                }
                Checker::Thm16(forms, s) => {
                    let x = projective(self.bx.n + 1)?;
                    let p = crate::heights::ProjPoint::from_i64(&x)?;
                    let e = super::ideal_equality_thm16(&p, forms, s).map_err(|_| fail("point on a hyperplane"))?;
                    if !e.holds {
                        return Err(fail("ideal equality fails"));
                    }
                    e.valuations
                }
                Checker::Cor12(c, values) => {
                    let inside = r.point.len() == self.bx.n
                        && r.point.iter().all(|v| values.binary_search_by(|w| cmp_key(w, v)).is_ok());
                    if !inside {
                        return Err(fail("point outside the box"));
                    }
                    if !c.holds(&r.point) {
                        return Err(fail("predicate fails"));
                    }
                    c.witnesses(&r.point)?
                }
            };
            if witnesses != r.witnesses {
                return Err(fail("witnesses differ from recomputation"));
            }
        }
        Ok(())
    }

    pub fn write_jsonl(&self, out: &mut impl Write, config: &Value) -> Result<()> {
        let header = json!({
            "kind": "header",
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
        });
        writeln!(out, "{header}")?;
        writeln!(out, "{}", json!({ "kind": "predicate", "predicate": self.predicate, "box": self.bx }))?;
        for r in &self.records {
            writeln!(out, "{}", serde_json::to_string(r)?)?;
        }
        Ok(())
    }

    /// Write atomically to `path`.
    pub fn save(&self, path: &Path, config: &Value) -> Result<()> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf, config)?;
        super::write_atomic(path, &buf)
    }

    /// Parse and re-verify; also returns the header's config object.
    pub fn read_jsonl(input: impl BufRead) -> Result<(Self, Value)> {
        let mut lines = input.lines();
        let mut next = |what: &str| -> Result<Value> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {what} line")))??;
            Ok(serde_json::from_str(&line)?)
        };
        let header = next("header")?;
        if header["kind"] != "header" || header["tool"] != TOOL {
            return Err(Error::Parse("not a solution file".into()));
        }
        let pl = next("predicate")?;
        if pl["kind"] != "predicate" {
            return Err(Error::Parse("second line must describe the predicate".into()));
        }
        let predicate: Predicate = serde_json::from_value(pl["predicate"].clone())?;
        let bx: SearchBox = serde_json::from_value(pl["box"].clone())?;
        let mut records = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        let set = SolutionSet { predicate, bx, records };
        set.verify()?;
        Ok((set, header["config"].clone()))
    }

    pub fn load(path: &Path) -> Result<(Self, Value)> {
        Self::read_jsonl(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn cmp_key(a: &Rat, b: &Rat) -> std::cmp::Ordering {
    a.numer().abs().cmp(&b.numer().abs()).then(a.cmp(b))
}
