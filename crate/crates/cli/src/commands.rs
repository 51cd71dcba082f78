use std::path::Path;

use arithdeg::arith::{fmt_rat, parse_rat, to_f64, Rat};
use arithdeg::beta::BetaReport;
use arithdeg::blowup::{config_classes, intersect_powers, nef_test, BlowupConfig, DivisorClass, NefVerdict};
use arithdeg::heights::{
    levin_duke_audit, proximity_counting, random_points, subspace_audit, theoremkey_condition, AuditVerdict,
    ConditionMode, MkConstant, PlaceSet, ProjPoint,
};
use arithdeg::report::{verify_tables, VerifyGrid, VerifyKernels, VerifyRow};
use arithdeg::search::{
    degeneracy_report, growth_series, search_cor12, search_thm11, search_thm16, SRing, SearchBox, SearchOptions,
    SolutionSet,
};
use arithdeg::{Error, MultiPoly};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{read_header, render, render_tables, solution_bytes, Output, Table};

pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Inline `--forms-file` contents so the recorded configuration is self-contained.
pub fn normalize(cmd: &mut Command) -> CliResult<()> {
    let inline = |f: &mut FormsInput| -> CliResult<()> {
        if let Some(path) = f.forms_file.take() {
            let text = std::fs::read_to_string(&path).map_err(Error::from)?;
            f.form.extend(
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(String::from),
            );
        }
        Ok(())
    };
    match cmd {
        Command::Search(SearchCommand::Thm11 { forms, .. }) | Command::Search(SearchCommand::Thm16 { forms, .. }) => {
            inline(forms)
        }
        Command::Audit(AuditCommand::Subspace(s)) | Command::Audit(AuditCommand::Levin { sample: s, .. }) => {
            inline(&mut s.forms)
        }
        _ => Ok(()),
    }
}

pub fn run(cmd: &Command) -> CliResult<Output> {
    match cmd {
        Command::Verify(a) => verify(a),
        Command::Chow(a) => chow(a),
        Command::Beta(a) => beta(a),
        Command::Heights(a) => heights(a),
        Command::Search(s) => search(s),
        Command::Audit(a) => audit(a),
        Command::Replay(a) => replay(a),
    }
}

fn verify(a: &VerifyArgs) -> CliResult<Output> {
    let grid = VerifyGrid {
        cyclic_n: a.n.clone(),
        q_lo: a.q_lo,
        q_hi: a.q_hi,
        q: a.q,
        marked_n: a.marked_n.clone(),
        ells: a.ell.clone(),
    };
    let mut kernels = VerifyKernels::default();
    match a.inject_fault.as_deref() {
        None => {}
        Some("f-poly") => kernels.f_poly = f_poly_off_by_one,
        Some("top") => kernels.top_intersection = top_off_by_one,
        Some(other) => return usage(format!("unknown fault `{other}`")),
    }
    let report = verify_tables(&grid, &kernels)?;
    let mut t = Table::new("verify", &VerifyRow::COLUMNS);
    for r in &report.rows {
        t.push(r.cells());
    }
    let mut out = Output::new(serde_json::to_value(&report).expect("serializable"));
    out.pass = report.pass;
    out.tables.push(t);
    Ok(out)
}

fn f_poly_off_by_one(n: u32, q: i64) -> arithdeg::Result<Rat> {
    Ok(arithdeg::beta::f_poly(n, q)? + Rat::from_integer(1.into()))
}

fn top_off_by_one(c: &[DivisorClass]) -> arithdeg::Result<Rat> {
    Ok(arithdeg::blowup::top_intersection(c)? + Rat::from_integer(1.into()))
}

fn blowup(a: &ChowArgs) -> CliResult<BlowupConfig> {
    Ok(match a.config {
        ConfigArg::Cyclic => match a.q {
            Some(q) => BlowupConfig::cyclic(a.n, q)?,
            None => return usage("the cyclic configuration needs --q"),
        },
        ConfigArg::Marked => BlowupConfig::marked(a.n)?,
    })
}

/// Parse `c1*NAME1 + c2*NAME2 - ...` over the named classes of a configuration.
pub fn parse_class(expr: &str, cfg: &BlowupConfig, ell: Option<u64>) -> CliResult<DivisorClass> {
    let (n, r) = (cfg.n(), cfg.num_points());
    let bad = |why: &str| CliError::Usage(format!("class `{expr}`: {why}"));
    let mut acc = DivisorClass::zero(n, r);
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let mut sign = Rat::from_integer(1.into());
        if let Some(t) = rest.strip_prefix('-') {
            sign = -sign;
            rest = t;
        } else if let Some(t) = rest.strip_prefix('+') {
            rest = t;
        }
        let end = rest[1..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
        let term = &rest[..end];
        rest = &rest[end..];
        let split = term.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(|| bad("missing class name"))?;
        let (coef, name) = term.split_at(split);
        let coef = coef.trim_end_matches('*');
        let coef = if coef.is_empty() { Rat::from_integer(1.into()) } else { parse_rat(coef).map_err(|_| bad("bad coefficient"))? };
        let index = |prefix: &str| -> CliResult<usize> {
            let k: usize = name[prefix.len()..].parse().map_err(|_| bad("bad index"))?;
            if k == 0 {
                return Err(bad("indices start at 1"));
            }
            Ok(k - 1)
        };
        let cls = match name {
            "H" => DivisorClass::hyperplane(n, r),
            "D" | "A" => {
                let c = config_classes(cfg, ell)?;
                if c.name != name {
                    return Err(bad(&format!("{name} is not defined on this configuration")));
                }
                c.main
            }
            _ if name.starts_with("Ht") => {
                let k = index("Ht")?;
                if k >= cfg.num_hyperplanes() {
                    return Err(bad("hyperplane index out of range"));
                }
                cfg.hyperplane_class(k)
            }
            _ if name.starts_with('E') => {
                let k = index("E")?;
                if k >= r {
                    return Err(bad("point index out of range"));
                }
                DivisorClass::exceptional(n, r, k)
            }
            _ => return Err(bad(&format!("unknown class {name}"))),
        };
        acc = acc.add(&cls.scale(&(sign * coef)))?;
    }
    Ok(acc)
}

fn chow(a: &ChowArgs) -> CliResult<Output> {
    let cfg = blowup(a)?;
    let mut out = Output::new(Value::Null);
    let mut result = serde_json::Map::new();
    let mut product = None;
    if !a.power.is_empty() {
        let mut factors = Vec::new();
        for p in &a.power {
            let (cls, exp) = p.rsplit_once(',').ok_or_else(|| CliError::Usage(format!("power `{p}` is not CLASS,EXP")))?;
            let e: u32 = if exp.trim() == "n" {
                a.n
            } else {
                exp.trim().parse().map_err(|_| CliError::Usage(format!("bad exponent in `{p}`")))?
            };
            factors.push((parse_class(cls, &cfg, a.ell)?, e));
        }
        let refs: Vec<(&DivisorClass, u32)> = factors.iter().map(|(c, e)| (c, *e)).collect();
        let v = intersect_powers(&refs)?;
        let mut t = Table::new("product", &["factors", "value"]);
        t.push(vec![a.power.join(" . "), fmt_rat(&v)]);
        out.tables.push(t);
        result.insert("product".into(), json!(fmt_rat(&v)));
        result.insert("factors".into(), json!(a.power));
        product = Some(fmt_rat(&v));
    }
    if !a.nef.is_empty() {
        let mut t = Table::new("nef", &["class", "verdict", "tier", "detail"]);
        let mut rows = Vec::new();
        for expr in &a.nef {
            let cls = parse_class(expr, &cfg, a.ell)?;
            let v = nef_test(&cls, &cfg)?;
            let (verdict, detail) = match &v {
                NefVerdict::CertifiedNef { curves_checked, .. } => ("certified-nef", format!("{curves_checked} curves nonnegative")),
                NefVerdict::FailsWitness { curve, value } => ("fails", format!("{curve}: {}", fmt_rat(value))),
                NefVerdict::Inconclusive { curves_checked } => ("inconclusive", format!("{curves_checked} curves nonnegative")),
            };
            t.push(vec![cls.to_string(), verdict.into(), v.tier().into(), detail]);
            rows.push(json!({ "expr": expr, "class": cls, "result": v }));
        }
        out.tables.push(t);
        result.insert("nef".into(), Value::Array(rows));
    }
    if a.power.is_empty() && a.nef.is_empty() {
        let mut t = Table::new("classes", &["name", "class"]);
        if let Ok(c) = config_classes(&cfg, a.ell) {
            t.push(vec![c.name.into(), c.main.to_string()]);
        }
        for k in 0..cfg.num_hyperplanes() {
            t.push(vec![format!("Ht{}", k + 1), cfg.hyperplane_class(k).to_string()]);
        }
        result.insert("classes".into(), json!(t.rows));
        out.tables.push(t);
    }
    if let (Some(v), true) = (product, a.nef.is_empty()) {
        out.text = Some(format!("{v}\n"));
    }
    out.json = Value::Object(result);
    Ok(out)
}

fn beta(a: &BetaArgs) -> CliResult<Output> {
    let mut reports = Vec::new();
    match (&a.cyclic, &a.marked) {
        (Some(c), None) => reports.push(BetaReport::cyclic(c[0] as u32, c[1], a.numeric_n)?),
        (None, Some(m)) => {
            let n = m[0] as u32;
            let indices: Vec<usize> = match a.index {
                Some(0) => return usage("--index starts at 1"),
                Some(i) => vec![i - 1],
                None => (0..n as usize + 2).collect(),
            };
            for i in indices {
                reports.push(BetaReport::marked(n, m[1], i, a.numeric_n)?);
            }
        }
        _ => return usage("give exactly one of --cyclic N Q or --marked N ELL"),
    }
    let mut t = Table::new("beta", &["config", "exact", "lower_bound", "numeric", "claim", "verdict"]);
    let opt = |x: &Option<Rat>| x.as_ref().map(fmt_rat).unwrap_or_default();
    for r in &reports {
        t.push(vec![
            r.config.clone(),
            opt(&r.exact),
            opt(&r.lower_bound),
            format!("{:.6}", to_f64(&r.numeric)),
            r.claim.clone(),
            if r.holds { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    let mut out = Output::new(serde_json::to_value(&reports).expect("serializable"));
    out.pass = reports.iter().all(|r| r.holds);
    out.tables.push(t);
    Ok(out)
}

fn parse_point(s: &str) -> CliResult<ProjPoint> {
    let coords: Vec<Rat> = s.split(',').map(|c| parse_rat(c.trim())).collect::<Result<_, _>>()?;
    Ok(ProjPoint::from_rationals(&coords)?)
}

fn parse_mode(s: &str) -> CliResult<ConditionMode> {
    match s {
        "i" => Ok(ConditionMode::I),
        "ii" => Ok(ConditionMode::Ii),
        _ => usage(format!("mode must be `i` or `ii`, got `{s}`")),
    }
}

fn heights(a: &HeightsArgs) -> CliResult<Output> {
    let p = parse_point(&a.point)?;
    let nvars = p.dim() + 1;
    let forms: Vec<MultiPoly> = a.form.iter().map(|f| MultiPoly::parse(f, nvars)).collect::<Result<_, _>>()?;
    let s = PlaceSet::parse(&a.s)?;
    let mut t = Table::new("places", &["form", "place", "in_s", "value", "lambda"]);
    let mut sums = Table::new("totals", &["form", "proximity", "counting", "height", "log_proximity", "log_counting", "log_height"]);
    let mut results = Vec::new();
    for (f, text) in forms.iter().zip(&a.form) {
        let pc = proximity_counting(f, &p, &s)?;
        for h in &pc.places {
            t.push(vec![
                text.clone(),
                h.place.to_string(),
                s.contains(&h.place).to_string(),
                fmt_rat(&h.value),
                format!("{:.6}", h.lambda()),
            ]);
        }
        let ln = |x: &Rat| format!("{:.6}", arithdeg::arith::ln_rat(x));
        sums.push(vec![
            text.clone(),
            fmt_rat(&pc.proximity),
            fmt_rat(&pc.counting),
            fmt_rat(&pc.height),
            ln(&pc.proximity),
            ln(&pc.counting),
            ln(&pc.height),
        ]);
        results.push(json!({ "form": text, "breakdown": pc }));
    }
    let mut out = Output::new(Value::Null);
    out.tables.push(t);
    out.tables.push(sums);
    let mut json = json!({ "point": p, "s": s.to_string(), "forms": results });
    if let Some(mode) = &a.condition {
        let rep = theoremkey_condition(&p, &forms, &s, &MkConstant::trivial(), parse_mode(mode)?)?;
        let mut c = Table::new("condition", &["mode", "holds", "places_checked", "failure"]);
        let failure = rep
            .failure
            .as_ref()
            .map(|(v, i)| match i {
                Some(i) => format!("{v} at D_{}", i + 1),
                None => v.to_string(),
            })
            .unwrap_or_default();
        let places: Vec<String> = rep.places_checked.iter().map(|v| v.to_string()).collect();
        c.push(vec![mode.clone(), rep.holds.to_string(), places.join(" "), failure]);
        out.tables.push(c);
        json["condition"] = serde_json::to_value(&rep).expect("serializable");
    }
    out.json = json;
    Ok(out)
}

fn nvars_of(texts: &[&str]) -> usize {
    texts.iter().map(|t| MultiPoly::infer_nvars(t)).max().unwrap_or(0).max(2)
}

fn search_output(set: &SolutionSet, bx: &BoxArgs, vars: Vec<String>, rerun: impl Fn(u64) -> CliResult<usize>) -> CliResult<Output> {
    let mut t = Table::new("solutions", &["point", "witnesses"]);
    for r in &set.records {
        let pt: Vec<String> = r.point.iter().map(fmt_rat).collect();
        t.push(vec![pt.join(","), serde_json::to_string(&r.witnesses).expect("serializable")]);
    }
    let mut out = Output::new(json!({
        "predicate": set.predicate,
        "box": set.bx,
        "count": set.len(),
        "records": set.records,
    }));
    let mut text = format!("{} solutions, bound {}\n", set.len(), set.bx.bound);
    for row in &t.rows {
        text.push_str(&format!("  ({})  {}\n", row[0], row[1]));
    }
    out.tables.push(t);
    if let Some(d) = bx.degeneracy {
        let points: Vec<Vec<Rat>> = set.records.iter().map(|r| r.point.clone()).collect();
        let mut rep = degeneracy_report(&points, &vars, set.predicate.is_projective(), d)?;
        if !bx.growth.is_empty() {
            rep.growth = growth_series(&bx.growth, |b| rerun(b).map_err(|e| match e {
                CliError::Core(e) => e,
                CliError::Usage(m) => Error::InvalidConfig(m),
            }))?;
        }
        let mut dt = Table::new("degeneracy", &["degree", "monomials", "kernel_dim"]);
        for r in &rep.degrees {
            dt.push(vec![r.degree.to_string(), r.monomials.to_string(), r.kernel_dim.to_string()]);
            text.push_str(&format!("degree {}: {} vanishing forms of {} monomials\n", r.degree, r.kernel_dim, r.monomials));
        }
        let mut lt = Table::new("lines", &["line", "count"]);
        for l in &rep.lines {
            lt.push(vec![l.line.clone(), l.count.to_string()]);
            text.push_str(&format!("line {}: {} points\n", l.line, l.count));
        }
        if rep.lines.is_empty() {
            text.push_str("no line component\n");
        }
        let mut gt = Table::new("growth", &["bound", "count"]);
        for g in &rep.growth {
            gt.push(vec![g.bound.to_string(), g.count.to_string()]);
            text.push_str(&format!("bound {}: {} solutions\n", g.bound, g.count));
        }
        out.tables.extend([dt, lt, gt]);
        out.json["degeneracy"] = serde_json::to_value(&rep).expect("serializable");
    }
    out.text = Some(text);
    Ok(out)
}

fn opts(bx: &BoxArgs) -> SearchOptions {
    SearchOptions {
        checkpoint: bx.checkpoint.clone(),
        batch: 0,
    }
}

fn parse_forms(f: &FormsInput, nvars: usize) -> CliResult<Vec<MultiPoly>> {
    if f.form.is_empty() {
        return usage("no forms given");
    }
    Ok(f.form.iter().map(|t| MultiPoly::parse(t, nvars)).collect::<Result<_, _>>()?)
}

/// Recount at another bound, for growth series.
type Rerun<'a> = Box<dyn Fn(u64) -> CliResult<usize> + 'a>;

fn search(cmd: &SearchCommand) -> CliResult<Output> {
    let (set, bx, vars, rerun): (SolutionSet, &BoxArgs, Vec<String>, Rerun) = match cmd {
        SearchCommand::Thm11 { forms, g, mode, assume_general_position, bx } => {
            let mut texts: Vec<&str> = forms.form.iter().map(String::as_str).collect();
            texts.push(g);
            let nvars = nvars_of(&texts);
            let fs = parse_forms(forms, nvars)?;
            let gp = MultiPoly::parse(g, nvars)?;
            let mode = parse_mode(mode)?;
            let s = SRing::parse(&bx.s)?;
            let gpos = *assume_general_position;
            let set = search_thm11(&fs, &gp, mode, &SearchBox::new(nvars - 1, bx.bound, bx.denom_cap), &s, gpos, &opts(bx))?;
            let rerun = Box::new(move |b| {
                Ok(search_thm11(&fs, &gp, mode, &SearchBox::new(nvars - 1, b, 0), &s, gpos, &SearchOptions::default())?.len())
            });
            (set, bx, MultiPoly::standard_vars(nvars), rerun)
        }
        SearchCommand::Cor12 { n, g, bx } => {
            let vars: Vec<String> = (1..=*n).map(|i| format!("x{i}")).collect();
            let gp = MultiPoly::parse_with_vars(g, vars.clone())?;
            let s = SRing::parse(&bx.s)?;
            let set = search_cor12(&gp, &SearchBox::new(*n, bx.bound, bx.denom_cap), &s, &opts(bx))?;
            let (n, cap) = (*n, bx.denom_cap);
            let rerun = Box::new(move |b| Ok(search_cor12(&gp, &SearchBox::new(n, b, cap), &s, &SearchOptions::default())?.len()));
            (set, bx, vars, rerun)
        }
        SearchCommand::Thm16 { forms, bx } => {
            let texts: Vec<&str> = forms.form.iter().map(String::as_str).collect();
            let nvars = nvars_of(&texts);
            let fs = parse_forms(forms, nvars)?;
            let s = SRing::parse(&bx.s)?;
            let set = search_thm16(&fs, &SearchBox::new(nvars - 1, bx.bound, 0), &s, &opts(bx))?;
            let rerun =
                Box::new(move |b| Ok(search_thm16(&fs, &SearchBox::new(nvars - 1, b, 0), &s, &SearchOptions::default())?.len()));
            (set, bx, MultiPoly::standard_vars(nvars), rerun)
        }
        SearchCommand::Check { file } => return check(file),
    };
    let mut out = search_output(&set, bx, vars, rerun)?;
    if let Some(path) = &bx.out {
        out.json["solution_file"] = json!(path);
        out.solutions = Some((path.clone(), set));
    }
    Ok(out)
}

fn check(file: &Path) -> CliResult<Output> {
    let (set, config) = SolutionSet::load(file)?;
    let mut out = Output::new(json!({ "file": file, "records": set.len(), "config": config }));
    out.text = Some(format!("{}: {} records verified\n", file.display(), set.len()));
    let mut t = Table::new("check", &["file", "records", "verified"]);
    t.push(vec![file.display().to_string(), set.len().to_string(), "true".into()]);
    out.tables.push(t);
    Ok(out)
}

fn audit(cmd: &AuditCommand) -> CliResult<Output> {
    let (sa, levin_gp) = match cmd {
        AuditCommand::Subspace(s) => (s, None),
        AuditCommand::Levin { sample, assume_general_position } => (sample, Some(*assume_general_position)),
    };
    let texts: Vec<&str> = sa.forms.form.iter().map(String::as_str).collect();
    let nvars = nvars_of(&texts);
    let forms = parse_forms(&sa.forms, nvars)?;
    let s = PlaceSet::parse(&sa.s)?;
    let eps = parse_rat(&sa.eps)?;
    let samples = random_points(nvars - 1, sa.height, sa.samples, sa.seed);
    let limit = sa.limit.unwrap_or(usize::MAX);
    let verdict = |v: AuditVerdict| serde_json::to_value(v).expect("serializable").as_str().unwrap_or("").to_string();
    let mut out = Output::new(Value::Null);
    let mut text;
    match levin_gp {
        None => {
            let a = subspace_audit(&forms, &s, &eps, &samples)?;
            let mut t = Table::new("subspace", &["index", "point", "lhs", "rhs", "verdict", "defect"]);
            for r in a.rows.iter().take(limit) {
                t.push(vec![
                    r.index.to_string(),
                    r.point.to_string(),
                    format!("{:.6}", r.lhs),
                    format!("{:.6}", r.rhs),
                    verdict(r.verdict),
                    r.defect.as_ref().map(fmt_rat).unwrap_or_default(),
                ]);
            }
            text = format!(
                "{} samples, {} violators, max defect {}\n",
                a.rows.len(),
                a.violators.len(),
                a.max_defect.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into())
            );
            for &i in &a.violators {
                text.push_str(&format!("  violator {} ({})\n", a.rows[i].point, verdict(a.rows[i].verdict)));
            }
            out.tables.push(t);
            out.json = serde_json::to_value(&a).expect("serializable");
        }
        Some(gp) => {
            let a = levin_duke_audit(&forms, &s, &eps, &samples, gp)?;
            let mut t = Table::new("levin", &["index", "point", "lhs", "lhs_counting", "rhs", "verdict", "verdict_counting"]);
            for r in a.rows.iter().take(limit) {
                t.push(vec![
                    r.index.to_string(),
                    r.point.to_string(),
                    format!("{:.6}", r.lhs),
                    format!("{:.6}", r.lhs_counting),
                    format!("{:.6}", r.rhs),
                    verdict(r.verdict),
                    verdict(r.verdict_counting),
                ]);
            }
            text = format!(
                "{} samples, {} violators of the proximity form, {} of the counting form\n",
                a.rows.len(),
                a.violators.len(),
                a.violators_counting.len()
            );
            out.tables.push(t);
            out.json = serde_json::to_value(&a).expect("serializable");
        }
    }
    if out.tables[0].rows.len() < 50 {
        text.push_str(&render_tables(&out.tables));
    }
    out.text = Some(text);
    Ok(out)
}

fn replay(a: &ReplayArgs) -> CliResult<Output> {
    let content = std::fs::read_to_string(&a.file).map_err(Error::from)?;
    let header = read_header(&content).ok_or_else(|| CliError::Usage(format!("{} has no header", a.file.display())))?;
    let cfg: RunConfig = serde_json::from_value(header["config"].clone())
        .map_err(|e| CliError::Usage(format!("unreadable configuration: {e}")))?;
    if matches!(cfg.command, Command::Replay(_)) {
        return usage("cannot replay a replay");
    }
    let solution_file = header.get("kind").is_some_and(|k| k == "header");
    let produced = run(&cfg.command)?;
    let regenerated = if solution_file {
        match &produced.solutions {
            Some((_, set)) => solution_bytes(&cfg, set)?,
            None => return usage("the recorded command writes no solution file"),
        }
    } else {
        render(&cfg, &produced, true).into_bytes()
    };
    let same = regenerated == content.as_bytes();
    let mut out = Output::new(json!({ "file": a.file, "identical": same }));
    out.pass = same;
    out.text = Some(format!(
        "{}: {}\n",
        a.file.display(),
        if same { "reproduced byte-for-byte" } else { "differs from the re-run" }
    ));
    Ok(out)
}
