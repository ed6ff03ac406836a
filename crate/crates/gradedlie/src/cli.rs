//! Command plumbing shared by the `gradedlie` binary and the C API: run
//! configuration, aut-spec parsing, JSON and text-table rendering, and the
//! exit-code convention.
//!
//! Exit codes are stable across commands: 0 = all checks pass, 1 = a
//! mathematical check failed, 2 = invalid input or parameters. JSON output
//! is deterministic for fixed inputs and seed, and every number in it is an
//! exact rational string, never a float.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use crate::algebra::{
    validate_params, BasisIndex, Element, Family, ParamError, Params, Window, WindowError,
};
use crate::automorphisms::{
    compose_all, factor, is_automorphism, make_diagonal, make_flip, make_inner_exp, make_scale,
    make_shear, make_unipotent, verify_group_laws, AutMap, FactorizationResult,
};
use crate::derivations::{classify_with_range, ClassificationReport, DEFAULT_DEGREE_RANGE};
use crate::exactlin::Scalar;
use crate::rng::DEFAULT_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
}

/// Validated run configuration for one command invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub lambda: Scalar,
    pub mu: Scalar,
    pub window_radius: i64,
    pub degree_range: (i64, i64),
    pub seed: u64,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(lambda: Scalar, mu: Scalar) -> Self {
        RunConfig {
            lambda,
            mu,
            window_radius: 6,
            degree_range: DEFAULT_DEGREE_RANGE,
            seed: DEFAULT_SEED,
            format: OutputFormat::Table,
        }
    }

    pub fn window(&self) -> Result<Window, String> {
        // Everything here is desk-scale; refuse windows that would turn the
        // exact solvers into memory hogs.
        const MAX_RADIUS: i64 = 64;
        if self.window_radius > MAX_RADIUS {
            return Err(format!(
                "window radius {} is too large (maximum {MAX_RADIUS})",
                self.window_radius
            ));
        }
        let w = Window::new(self.window_radius).map_err(|e: WindowError| e.to_string())?;
        let bound = self.window_radius - 2;
        let (lo, hi) = self.degree_range;
        if lo > hi || lo < -bound || hi > bound {
            return Err(format!(
                "degree range {lo}..{hi} must lie inside -{bound}..{bound} for window radius {}",
                self.window_radius
            ));
        }
        Ok(w)
    }

    pub fn params(&self) -> Result<Params, ParamError> {
        validate_params(self.lambda.clone(), self.mu.clone())
    }
}

/// What a command produced: a process exit status plus its streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmdOutcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutcome {
    fn ok(stdout: String) -> Self {
        CmdOutcome {
            status: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed(stdout: String, stderr: String) -> Self {
        CmdOutcome {
            status: EXIT_CHECK_FAILED,
            stdout,
            stderr,
        }
    }

    fn invalid(message: String) -> Self {
        CmdOutcome {
            status: EXIT_INVALID_INPUT,
            stdout: String::new(),
            stderr: message,
        }
    }
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

/// `jacobi`: exhaustive window Jacobi check; exit 0 iff no violations.
pub fn cmd_jacobi(cfg: &RunConfig) -> CmdOutcome {
    let p = match cfg.params() {
        Ok(p) => p,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let w = match cfg.window() {
        Ok(w) => w,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let report = crate::algebra::jacobi_check(&p, &w);
    let violations: Vec<serde_json::Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "triple": [v.triple[0].to_string(), v.triple[1].to_string(), v.triple[2].to_string()],
                "defect": v.defect.to_string(),
            })
        })
        .collect();
    let body = json!({
        "lambda": cfg.lambda.to_string(),
        "mu": cfg.mu.to_string(),
        "case": p.case().name(),
        "window": w.radius(),
        "triples_checked": report.triples_checked,
        "violations": violations,
        "ok": report.passed(),
    });
    let stdout = match cfg.format {
        OutputFormat::Json => render_json(&body),
        OutputFormat::Table => format!(
            "jacobi lambda={} mu={} case={} window={}: {} ({} triples)\n",
            cfg.lambda,
            cfg.mu,
            p.case().name(),
            w.radius(),
            if report.passed() { "OK" } else { "VIOLATIONS" },
            report.triples_checked,
        ),
    };
    if report.passed() {
        CmdOutcome::ok(stdout)
    } else {
        let mut err = String::new();
        for v in report.violations.iter().take(10) {
            let _ = writeln!(err, "{v}");
        }
        CmdOutcome::failed(stdout, err)
    }
}

/// `classify`: full degree-0 classification report; exit 0 iff the computed
/// data matches the classification.
pub fn cmd_classify(cfg: &RunConfig) -> CmdOutcome {
    let p = match cfg.params() {
        Ok(p) => p,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let w = match cfg.window() {
        Ok(w) => w,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let report = classify_with_range(&p, &w, cfg.degree_range);
    let stdout = match cfg.format {
        OutputFormat::Json => render_json(&report),
        OutputFormat::Table => render_classification_table(&report),
    };
    if report.matches_theorem {
        CmdOutcome::ok(stdout)
    } else {
        CmdOutcome::failed(stdout, "classification mismatch\n".to_owned())
    }
}

fn render_classification_table(r: &ClassificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "lambda={} mu={} case={} window={}",
        r.params.lambda, r.params.mu, r.params.case, r.window
    );
    let _ = writeln!(
        out,
        "dim Der_0 = {}   dim ad_0 = {}   outer = [{}]",
        r.dim_deg0,
        r.dim_inner_deg0,
        r.outer_basis_names.join(", ")
    );
    let h1: Vec<String> = r
        .h1_by_degree
        .iter()
        .map(|(k, d)| format!("H1({k})={d}"))
        .collect();
    let _ = writeln!(out, "{}", h1.join("  "));
    let _ = writeln!(
        out,
        "matches classification: {}",
        if r.matches_theorem { "yes" } else { "NO" }
    );
    out
}

/// One row of the `report` grid run.
#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub lambda: Scalar,
    pub mu: Scalar,
    /// Rejection reason for inadmissible points; admissible rows carry data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_deg0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_deg0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer: Option<Vec<&'static str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_laws_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_theorem: Option<bool>,
}

pub const DEFAULT_GRID: [(i64, i64, i64, i64); 5] = [
    (3, 1, 1, 3),
    (-2, 1, 0, 1),
    (-1, 1, 0, 1),
    (1, 1, 0, 1),
    (7, 1, 0, 1),
];

pub fn default_grid() -> Vec<(Scalar, Scalar)> {
    DEFAULT_GRID
        .iter()
        .map(|&(ln, ld, mn, md)| (Scalar::new(ln, ld), Scalar::new(mn, md)))
        .collect()
}

/// Parses a grid file: one `lambda mu` pair per line (whitespace or comma
/// separated), `#` comments allowed.
pub fn parse_grid_file(text: &str) -> Result<Vec<(Scalar, Scalar)>, String> {
    let mut grid = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if parts.len() != 2 {
            return Err(format!("line {}: expected `lambda mu`", lineno + 1));
        }
        let lambda = Scalar::parse(parts[0]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let mu = Scalar::parse(parts[1]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        grid.push((lambda, mu));
    }
    Ok(grid)
}

fn grid_row(lambda: Scalar, mu: Scalar, cfg: &RunConfig, w: Window) -> GridRow {
    let mut row = GridRow {
        lambda: lambda.clone(),
        mu: mu.clone(),
        excluded: None,
        case: None,
        dim_deg0: None,
        h1_deg0: None,
        outer: None,
        group_laws_pass: None,
        matches_theorem: None,
    };
    match validate_params(lambda, mu) {
        Err(e) => row.excluded = Some(e.to_string()),
        Ok(p) => {
            let report = classify_with_range(&p, &w, cfg.degree_range);
            let laws = verify_group_laws(&p, w, 5, cfg.seed);
            row.case = Some(p.case().name());
            row.dim_deg0 = Some(report.dim_deg0);
            row.h1_deg0 = report
                .h1_by_degree
                .iter()
                .find(|(k, _)| *k == 0)
                .map(|(_, d)| *d);
            row.outer = Some(report.outer_basis_names.clone());
            row.group_laws_pass = Some(laws.passed());
            row.matches_theorem = Some(report.matches_theorem && laws.passed());
        }
    }
    row
}

/// `report`: one classification row per grid point. Inadmissible points are
/// flagged, not fatal; exit 1 only when an admissible row fails its checks.
pub fn cmd_report(grid: &[(Scalar, Scalar)], cfg: &RunConfig) -> CmdOutcome {
    let w = match cfg.window() {
        Ok(w) => w,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    // Rows are independent; compute them in parallel, emit in input order.
    let rows: Vec<GridRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .iter()
            .map(|(lambda, mu)| {
                let (lambda, mu) = (lambda.clone(), mu.clone());
                let cfg = cfg.clone();
                scope.spawn(move || grid_row(lambda, mu, &cfg, w))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let all_match = rows
        .iter()
        .all(|r| r.excluded.is_some() || r.matches_theorem == Some(true));
    let stdout = match cfg.format {
        OutputFormat::Json => render_json(&rows),
        OutputFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<8} {:<6} {:<20} {:>8} {:>6}  {:<24} {:<6} {:<7}",
                "lambda", "mu", "case", "dim0", "H1(0)", "outer", "laws", "matches"
            );
            for r in &rows {
                // Scalars render through their own Display, so pad strings.
                let lambda = r.lambda.to_string();
                let mu = r.mu.to_string();
                if let Some(reason) = &r.excluded {
                    let _ = writeln!(out, "{lambda:<8} {mu:<6} {reason}");
                } else {
                    let _ = writeln!(
                        out,
                        "{:<8} {:<6} {:<20} {:>8} {:>6}  {:<24} {:<6} {:<7}",
                        lambda,
                        mu,
                        r.case.unwrap_or(""),
                        r.dim_deg0.unwrap_or(0),
                        r.h1_deg0.unwrap_or(0),
                        r.outer.as_deref().unwrap_or(&[]).join(","),
                        if r.group_laws_pass == Some(true) {
                            "pass"
                        } else {
                            "FAIL"
                        },
                        if r.matches_theorem == Some(true) {
                            "yes"
                        } else {
                            "NO"
                        },
                    );
                }
            }
            out
        }
    };
    if all_match {
        CmdOutcome::ok(stdout)
    } else {
        CmdOutcome::failed(stdout, "some grid rows failed their checks\n".to_owned())
    }
}

/// Parses an element like `L2 + 3/4*Y-1 + 2*M0`, or `0`.
pub fn parse_element(text: &str) -> Result<Element, String> {
    let s = text.trim();
    if s.is_empty() || s == "0" {
        return Ok(Element::zero());
    }
    // Normalize `a - b` into `a + -b`. A minus is a separator only after a
    // completed number (digit); after a family letter it signs the degree
    // (`Y-1`), and after `*` `/` or at the start it signs a coefficient.
    let mut normalized = String::with_capacity(s.len());
    let mut prev_meaningful = ' ';
    for ch in s.chars() {
        if ch == '-' && prev_meaningful.is_ascii_digit() {
            normalized.push('+');
        }
        normalized.push(ch);
        if !ch.is_whitespace() {
            prev_meaningful = ch;
        }
    }
    let mut out = Element::zero();
    for term in normalized.split('+') {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let (coeff, atom) = match term.rsplit_once('*') {
            Some((c, a)) => {
                let compact: String = c.split_whitespace().collect();
                (
                    Scalar::parse(&compact).map_err(|e| e.to_string())?,
                    a.trim(),
                )
            }
            None => {
                if let Some(rest) = term.strip_prefix('-') {
                    (-Scalar::one(), rest.trim())
                } else {
                    (Scalar::one(), term)
                }
            }
        };
        let mut chars = atom.chars();
        let family = match chars.next() {
            Some('L') => Family::L,
            Some('Y') => Family::Y,
            Some('M') => Family::M,
            _ => return Err(format!("bad basis term {atom:?} (expected L/Y/M + degree)")),
        };
        let degree: i64 = chars
            .as_str()
            .parse()
            .map_err(|_| format!("bad degree in term {atom:?}"))?;
        out.add_term(BasisIndex::new(family, degree), coeff);
    }
    Ok(out)
}

/// Parses an aut-map spec. Two forms:
///
/// Constructor script: one constructor per line, composed so the last line
/// applies first (the lines read left-to-right as a product):
///
/// ```text
/// scale 2 3
/// shear 5
/// ```
///
/// Raw image table: a first line `images`, then `FAMdeg = element` lines;
/// unlisted indices default to the identity image:
///
/// ```text
/// images
/// L2 = L2 + 8*M2
/// ```
pub fn parse_aut_spec(p: &Params, w: Window, text: &str) -> Result<AutMap, String> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    if lines.first().is_some_and(|l| *l == "images") {
        return parse_image_table(p, w, &lines[1..]);
    }
    let mut factors = Vec::new();
    for line in &lines {
        let mut it = line.split_whitespace();
        let head = it.next().unwrap_or("");
        let rest: Vec<&str> = it.collect();
        let map = match head {
            "flip" => {
                let eps: i64 = rest
                    .first()
                    .and_then(|s| s.parse().ok())
                    .filter(|e| *e == 1 || *e == -1)
                    .ok_or_else(|| format!("flip needs eps = 1 or -1: {line:?}"))?;
                make_flip(p, w, eps).map_err(|e| e.to_string())?
            }
            "scale" => {
                if rest.len() != 2 {
                    return Err(format!("scale needs two rationals: {line:?}"));
                }
                let a = Scalar::parse(rest[0]).map_err(|e| e.to_string())?;
                let b = Scalar::parse(rest[1]).map_err(|e| e.to_string())?;
                make_scale(p, w, a, b).map_err(|e| e.to_string())?
            }
            "unipotent" => {
                let b = Scalar::parse(rest.first().ok_or("unipotent needs a rational")?)
                    .map_err(|e| e.to_string())?;
                make_unipotent(p, w, b).map_err(|e| e.to_string())?
            }
            "shear" => {
                let e = Scalar::parse(rest.first().ok_or("shear needs a rational")?)
                    .map_err(|e| e.to_string())?;
                make_shear(p, w, e).map_err(|e| e.to_string())?
            }
            "diagonal" => {
                let t = Scalar::parse(rest.first().ok_or("diagonal needs a rational")?)
                    .map_err(|e| e.to_string())?;
                make_diagonal(p, w, t).map_err(|e| e.to_string())?
            }
            "inner_exp" => {
                let x = parse_element(&rest.join(" "))?;
                make_inner_exp(p, w, &x).map_err(|e| e.to_string())?
            }
            other => return Err(format!("unknown constructor {other:?}")),
        };
        factors.push(map);
    }
    compose_all(p, w, &factors).map_err(|e| e.to_string())
}

fn parse_image_table(p: &Params, w: Window, lines: &[&str]) -> Result<AutMap, String> {
    use crate::automorphisms::GUARD;
    let mut images = std::collections::BTreeMap::new();
    let stored = w.radius() + GUARD;
    for family in Family::ALL {
        for n in -stored..=stored {
            let idx = BasisIndex::new(family, n);
            images.insert(idx, Element::basis(idx));
        }
    }
    for line in lines {
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| format!("image line needs `FAMdeg = element`: {line:?}"))?;
        let target = parse_element(lhs)?;
        let mut it = target.iter();
        let idx = match (it.next(), it.next()) {
            (Some((idx, c)), None) if c.is_one() => *idx,
            _ => return Err(format!("left side must be a single basis vector: {line:?}")),
        };
        images.insert(idx, parse_element(rhs)?);
    }
    Ok(AutMap::from_images(p.clone(), w, images))
}

fn aut_map_json(a: &AutMap) -> serde_json::Value {
    let images: Vec<serde_json::Value> = a
        .images()
        .filter(|(idx, _)| a.window().contains(idx.degree))
        .map(|(idx, e)| json!({ "input": idx.to_string(), "image": e.to_string() }))
        .collect();
    json!({ "window": a.window().radius(), "images": images })
}

fn factorization_json(r: &FactorizationResult) -> serde_json::Value {
    json!({
        "epsilon": r.epsilon,
        "alpha": r.alpha.to_string(),
        "beta": r.beta.to_string(),
        "unipotent_b": r.unipotent_b.as_ref().map(|b| b.to_string()),
        "shear_e": r.shear_e.as_ref().map(|e| e.to_string()),
        "inner_witness": r.inner_witness.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "residual_is_identity": r.residual_is_identity,
    })
}

/// `aut verify`: homomorphism + invertibility check of the parsed map, plus
/// seeded group-law sampling for the constructor families.
pub fn cmd_aut_verify(cfg: &RunConfig, spec_text: &str) -> CmdOutcome {
    let p = match cfg.params() {
        Ok(p) => p,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let w = match cfg.window() {
        Ok(w) => w,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let map = match parse_aut_spec(&p, w, spec_text) {
        Ok(m) => m,
        Err(e) => return CmdOutcome::invalid(format!("aut spec: {e}\n")),
    };
    let hom = match is_automorphism(&map) {
        Ok(h) => h,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let laws = verify_group_laws(&p, w, 20, cfg.seed);
    let ok = hom.passed() && laws.passed();
    let body = json!({
        "lambda": cfg.lambda.to_string(),
        "mu": cfg.mu.to_string(),
        "window": w.radius(),
        "hom_pairs_checked": hom.pairs_checked,
        "hom_violations": hom.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "invertible_on_window": hom.invertible_on_window,
        "group_laws_checked": laws.laws_checked,
        "group_law_failures": laws.failures,
        "map": aut_map_json(&map),
        "ok": ok,
    });
    let stdout = match cfg.format {
        OutputFormat::Json => render_json(&body),
        OutputFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "aut verify: {} ({} hom pairs, {} law checks)",
                if ok { "OK" } else { "FAIL" },
                hom.pairs_checked,
                laws.laws_checked
            );
            for v in hom.violations.iter().take(5) {
                let _ = writeln!(out, "  {v}");
            }
            if !hom.invertible_on_window {
                let _ = writeln!(out, "  map is not invertible on the window");
            }
            for f in laws.failures.iter().take(5) {
                let _ = writeln!(out, "  {f}");
            }
            out
        }
    };
    if ok {
        CmdOutcome::ok(stdout)
    } else {
        CmdOutcome::failed(stdout, "aut verify failed\n".to_owned())
    }
}

/// `aut factor`: runs the factorization pipeline and prints the
/// (eps, alpha, beta, b, e, inner) data with the round-trip verdict.
pub fn cmd_aut_factor(cfg: &RunConfig, spec_text: &str) -> CmdOutcome {
    let p = match cfg.params() {
        Ok(p) => p,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let w = match cfg.window() {
        Ok(w) => w,
        Err(e) => return CmdOutcome::invalid(format!("{e}\n")),
    };
    let map = match parse_aut_spec(&p, w, spec_text) {
        Ok(m) => m,
        Err(e) => return CmdOutcome::invalid(format!("aut spec: {e}\n")),
    };
    match factor(&map) {
        Ok(r) => {
            let stdout = match cfg.format {
                OutputFormat::Json => render_json(&factorization_json(&r)),
                OutputFormat::Table => {
                    let mut out = String::new();
                    let _ = write!(out, "eps={} alpha={} beta={}", r.epsilon, r.alpha, r.beta);
                    if let Some(b) = &r.unipotent_b {
                        let _ = write!(out, " b={b}");
                    }
                    if let Some(e) = &r.shear_e {
                        let _ = write!(out, " e={e}");
                    }
                    let _ = writeln!(
                        out,
                        " round-trip {}",
                        if r.residual_is_identity { "OK" } else { "FAIL" }
                    );
                    for (i, wit) in r.inner_witness.iter().enumerate() {
                        if !wit.is_zero() {
                            let _ = writeln!(out, "inner[{i}] = exp(ad({wit}))");
                        }
                    }
                    out
                }
            };
            CmdOutcome::ok(stdout)
        }
        Err(e) => CmdOutcome::failed(String::new(), format!("factor: {e}\n")),
    }
}
