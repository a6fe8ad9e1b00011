use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nilkaehler::catalog::{
    validate_entry, AdmitsJ, AlgebraJson, Catalog, CatalogEntry, CatalogError, CheckResult, EndomorphismJson, Expect,
    FormJson, StructureEntry,
};
use nilkaehler::geometry::{CurvatureReport, Geometry, GeometryError};
use nilkaehler::linalg::Matrix;
use nilkaehler::scalar::params_of;
use nilkaehler::solver::{compat_nullspace, newton_search, NumericProblem, SearchOptions, SolverError};
use nilkaehler::{ParamBinding, Scalar, ScalarError};
use serde::Serialize;
use thiserror::Error;

use crate::{latex, Command, Format};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unknown names, unreadable or malformed input.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Geometry(_) => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ScalarError> for CliError {
    fn from(e: ScalarError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

/// Runs one command, returning the process exit code: 0 on success, 1 when
/// a verification fails, 2 on bad input.
pub fn run(command: Command, out: &mut impl Write) -> u8 {
    match dispatch(command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<bool, CliError> {
    match command {
        Command::List => list(&Catalog::load()?, out),
        Command::Show { name } => show(Catalog::load()?.get(&name)?, out),
        Command::Verify { name, form } => verify(&Catalog::load()?, name.as_deref(), form.as_deref(), out),
        Command::Curvature { name, form, structure, bind, json } => {
            let binding = ParamBinding::parse_pairs(&bind)?;
            let cat = Catalog::load()?;
            curvature(cat.get(&name)?, &form, structure.as_deref(), &binding, json, out)
        }
        Command::SolveLinear { form_file } => solve_linear(&form_file, out),
        Command::Search { algebra_file, form_file, starts, tol, seed, bind } => {
            if starts == 0 {
                return Err(CliError::Usage("--starts must be at least 1".into()));
            }
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Usage("--tol must be a positive number".into()));
            }
            let binding = ParamBinding::parse_pairs(&bind)?;
            let opts = SearchOptions { tolerance: tol, max_starts: starts, seed, ..SearchOptions::default() };
            search(&algebra_file, &form_file, &binding, &opts, out)
        }
        Command::Export { name, format, form } => {
            let cat = Catalog::load()?;
            export(cat.get(&name)?, form.as_deref(), format, out)
        }
    }
}

fn type_string(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

fn list(cat: &Catalog, out: &mut impl Write) -> Result<bool, CliError> {
    for (name, ty) in cat.list() {
        writeln!(out, "{name}\t{}", type_string(ty))?;
    }
    Ok(true)
}

/// `c*label` terms joined with signs; zero terms are skipped.
fn combination<'a>(terms: impl IntoIterator<Item = (&'a Scalar, String)>) -> String {
    let mut parts = Vec::new();
    for (c, label) in terms {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let term = if c.is_one() {
            label
        } else if text == "-1" {
            format!("-{label}")
        } else if text[1..].contains(['+', '-', '/']) {
            format!("({text})*{label}")
        } else {
            format!("{text}*{label}")
        };
        parts.push(term);
    }
    if parts.is_empty() {
        return "0".into();
    }
    parts.join(" + ").replace("+ -", "- ")
}

fn vector(coeffs: &[Scalar]) -> String {
    combination(coeffs.iter().enumerate().map(|(k, c)| (c, format!("e{}", k + 1))))
}

fn show(entry: &CatalogEntry, out: &mut impl Write) -> Result<bool, CliError> {
    let alg = &entry.algebra;
    let n = alg.dim();
    writeln!(out, "{}  type {}", entry.name, type_string(&entry.algebra_type))?;
    if !entry.notes.is_empty() {
        writeln!(out, "  {}", entry.notes)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = alg.basis_bracket(i, j);
            if v.iter().any(|c| !c.is_zero()) {
                writeln!(out, "  [e{},e{}] = {}", i + 1, j + 1, vector(&v))?;
            }
        }
    }
    for f in &entry.forms {
        let terms = f.form.terms();
        let terms = combination(terms.iter().map(|(i, j, c)| (c, format!("e^{}^e^{}", i + 1, j + 1))));
        let admits = match f.admits_j {
            AdmitsJ::Yes => "admits compatible J",
            AdmitsJ::No => "admits no compatible J",
            AdmitsJ::Unknown => "compatible J not recorded",
        };
        let closed = if f.closed { "" } else { ", not closed as printed" };
        writeln!(out, "form {}: {} ({admits}{closed})", f.id, terms)?;
    }
    for st in &entry.structures {
        show_structure(st, out)?;
    }
    Ok(true)
}

fn show_structure(st: &StructureEntry, out: &mut impl Write) -> Result<(), CliError> {
    let note = match st.expect {
        Expect::Pass => "",
        Expect::Incompatible => " (stated incompatible)",
    };
    writeln!(out, "structure {}/{}{note}", st.form, st.id)?;
    if !st.params.is_empty() {
        writeln!(out, "  params: {}", st.params.join(", "))?;
    }
    let nonzero: Vec<String> = st.nonzero.iter().map(|s| format!("{s} != 0")).collect();
    if !nonzero.is_empty() {
        writeln!(out, "  assuming {}", nonzero.join(", "))?;
    }
    for r in st.relations.to_strings() {
        writeln!(out, "  with {r}")?;
    }
    let m = st.j.matrix();
    for i in 0..m.rows() {
        writeln!(out, "  J(e{}) = {}", i + 1, vector(m.row(i)))?;
    }
    Ok(())
}

fn print_check(out: &mut impl Write, entry: &str, c: &CheckResult) -> std::io::Result<()> {
    let status = if c.pass { "PASS" } else { "FAIL" };
    match &c.detail {
        Some(d) if !c.pass && !d.is_empty() => writeln!(out, "{status} {entry} {}  ({d})", c.name),
        _ => writeln!(out, "{status} {entry} {}", c.name),
    }
}

fn verify(cat: &Catalog, name: Option<&str>, form: Option<&str>, out: &mut impl Write) -> Result<bool, CliError> {
    let reports = match name {
        None => {
            if form.is_some() {
                return Err(CliError::Usage("--form needs an entry name".into()));
            }
            cat.self_validate().entries
        }
        Some(name) => {
            let entry = cat.get(name)?;
            if let Some(f) = form {
                entry.form(f)?;
            }
            vec![validate_entry(entry)]
        }
    };
    let selected = |c: &&CheckResult| match form {
        None => true,
        Some(f) => c.name.starts_with(&format!("{f}:")) || c.name.starts_with(&format!("{f}/")),
    };
    let mut all = true;
    for r in &reports {
        let checks: Vec<&CheckResult> = r.checks.iter().filter(selected).collect();
        for c in &checks {
            print_check(out, &r.name, c)?;
        }
        let passed = checks.iter().filter(|c| c.pass).count();
        writeln!(out, "{}: {passed}/{} checks pass", r.name, checks.len())?;
        all &= passed == checks.len();
    }
    writeln!(out, "{}", if all { "verification passed" } else { "verification FAILED" })?;
    Ok(all)
}

fn pick_structure<'a>(entry: &'a CatalogEntry, form: &'a str, id: Option<&str>) -> Result<&'a StructureEntry, CliError> {
    entry.form(form)?;
    let st = match id {
        Some(id) => entry.structure(id)?,
        None => entry.structures_on(form).find(|s| s.expect == Expect::Pass).ok_or_else(|| {
            CliError::Usage(format!("{} {form}: no compatible structure is stored", entry.name))
        })?,
    };
    if st.form != form {
        return Err(CliError::Usage(format!("structure {} lives on form {}, not {form}", st.id, st.form)));
    }
    if st.expect == Expect::Incompatible {
        return Err(CliError::Usage(format!("{form}/{}: stored as not compatible", st.id)));
    }
    Ok(st)
}

#[derive(Serialize)]
struct CurvatureOutput<'a> {
    entry: &'a str,
    form: &'a str,
    structure: &'a str,
    binding: BTreeMap<String, String>,
    #[serde(flatten)]
    report: CurvatureReport,
}

fn write_components(out: &mut impl Write, report: &CurvatureReport) -> std::io::Result<()> {
    for c in &report.up_components {
        let [i, j, k, s] = c.idx;
        writeln!(out, "R_{{{i},{j},{k}}}^{s} = {}", c.value)?;
    }
    for c in &report.down_components {
        let [i, j, k, s] = c.idx;
        writeln!(out, "R_{{{i},{j},{k},{s}}} = {}", c.value)?;
    }
    Ok(())
}

fn curvature(
    entry: &CatalogEntry,
    form: &str,
    structure: Option<&str>,
    binding: &ParamBinding,
    json: bool,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    let st = pick_structure(entry, form, structure)?;
    let w = &entry.form(form)?.form;
    let known = params_of(st.j.matrix().entries().iter().chain(w.matrix().entries()));
    if let Some((name, _)) = binding.iter().find(|(k, _)| !known.iter().any(|v| v.as_str() == *k)) {
        return Err(CliError::Usage(format!("{} {form}/{}: no parameter named {name}", entry.name, st.id)));
    }
    let excluded = st.excluded_by(binding);
    if !excluded.is_empty() {
        return Err(CliError::Usage(format!("binding violates {} != 0", excluded.join(" != 0, "))));
    }
    let mut geo = Geometry::compute(&entry.algebra, w, &st.j, &st.relations)?;
    let side = geo.metric.side_conditions().violated_by(binding);
    if !side.is_empty() {
        return Err(CliError::Usage(format!("binding violates side condition {} != 0", side.join(" != 0, "))));
    }
    if !binding.is_empty() {
        geo = geo
            .substitute(binding)
            .map_err(|e| CliError::Usage(format!("binding is not admissible: {e}")))?;
    }
    let report = geo.report();
    if json {
        let output = CurvatureOutput {
            entry: &entry.name,
            form,
            structure: &st.id,
            binding: binding.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            report,
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;
        return Ok(true);
    }
    let at: Vec<String> = binding.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let at = if at.is_empty() { String::new() } else { format!(" at {}", at.join(", ")) };
    writeln!(out, "{} {form}/{}{at}", entry.name, st.id)?;
    if !report.side_conditions.is_empty() {
        writeln!(out, "side conditions: {} != 0", report.side_conditions.join(" != 0, "))?;
    }
    for r in &report.relations {
        writeln!(out, "relation: {r}")?;
    }
    if report.up_components.is_empty() {
        writeln!(out, "flat")?;
    }
    write_components(out, &report)?;
    writeln!(out, "Ricci {}", if report.ricci_zero { "= 0" } else { "!= 0" })?;
    writeln!(out, "norm = {}", report.norm)?;
    Ok(true)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct LinearOutput {
    dimension: usize,
    side_conditions: Vec<String>,
    basis: Vec<EndomorphismJson>,
}

fn solve_linear(form_file: &Path, out: &mut impl Write) -> Result<bool, CliError> {
    let w = read_json::<FormJson>(form_file)?.build()?;
    let sol = compat_nullspace(&w);
    let output = LinearOutput {
        dimension: sol.dimension(),
        side_conditions: sol.side_conditions.to_vec(),
        basis: sol.basis.iter().map(EndomorphismJson::from_endomorphism).collect(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;
    Ok(true)
}

fn search(
    algebra_file: &Path,
    form_file: &Path,
    binding: &ParamBinding,
    opts: &SearchOptions,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    let alg = read_json::<AlgebraJson>(algebra_file)?.build()?;
    let w = read_json::<FormJson>(form_file)?.build()?;
    let problem = NumericProblem::new(&alg, &w, binding)?;
    let result = newton_search(&problem, opts);
    writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?;
    Ok(true)
}

struct Exported<'a> {
    st: &'a StructureEntry,
    geo: Geometry,
}

fn exported<'a>(entry: &'a CatalogEntry, form: Option<&str>) -> Result<Vec<Exported<'a>>, CliError> {
    if let Some(f) = form {
        entry.form(f)?;
    }
    entry
        .structures
        .iter()
        .filter(|s| s.expect == Expect::Pass && form.is_none_or(|f| s.form == f))
        .map(|st| {
            let w = &entry.form(&st.form)?.form;
            let geo = Geometry::compute(&entry.algebra, w, &st.j, &st.relations)?;
            Ok(Exported { st, geo })
        })
        .collect()
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(Scalar::to_string).collect()).collect()
}

#[derive(Serialize)]
struct FormExport<'a> {
    id: &'a str,
    admits_j: AdmitsJ,
    closed: bool,
    form: FormJson,
}

#[derive(Serialize)]
struct StructureExport<'a> {
    id: &'a str,
    form: &'a str,
    #[serde(rename = "J")]
    j: EndomorphismJson,
    metric: Vec<Vec<String>>,
    curvature: CurvatureReport,
}

#[derive(Serialize)]
struct EntryExport<'a> {
    name: &'a str,
    #[serde(rename = "type")]
    algebra_type: &'a [usize],
    algebra: AlgebraJson,
    forms: Vec<FormExport<'a>>,
    structures: Vec<StructureExport<'a>>,
}

fn export(entry: &CatalogEntry, form: Option<&str>, format: Format, out: &mut impl Write) -> Result<bool, CliError> {
    let items = exported(entry, form)?;
    match format {
        Format::Json => {
            let doc = EntryExport {
                name: &entry.name,
                algebra_type: &entry.algebra_type,
                algebra: AlgebraJson::from_algebra(&entry.algebra),
                forms: entry
                    .forms
                    .iter()
                    .filter(|f| form.is_none_or(|id| f.id == id))
                    .map(|f| FormExport {
                        id: &f.id,
                        admits_j: f.admits_j,
                        closed: f.closed,
                        form: FormJson::from_form(&f.form),
                    })
                    .collect(),
                structures: items
                    .iter()
                    .map(|x| StructureExport {
                        id: &x.st.id,
                        form: &x.st.form,
                        j: EndomorphismJson::from_endomorphism(&x.st.j),
                        metric: matrix_strings(x.geo.metric.g()),
                        curvature: x.geo.report(),
                    })
                    .collect(),
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Csv => {
            writeln!(out, "entry,form,structure,kind,index,value")?;
            for x in &items {
                let row = |kind: &str, idx: &[usize], value: &str| {
                    let idx: Vec<String> = idx.iter().map(usize::to_string).collect();
                    format!("{},{},{},{kind},{},{value}", entry.name, x.st.form, x.st.id, idx.join(" "))
                };
                let g = x.geo.metric.g();
                for i in 0..g.rows() {
                    for (j, v) in g.row(i).iter().enumerate() {
                        if !v.is_zero() {
                            writeln!(out, "{}", row("metric", &[i + 1, j + 1], &v.to_string()))?;
                        }
                    }
                }
                let report = x.geo.report();
                for c in &report.up_components {
                    writeln!(out, "{}", row("up", &c.idx, &c.value))?;
                }
                for c in &report.down_components {
                    writeln!(out, "{}", row("down", &c.idx, &c.value))?;
                }
            }
        }
        Format::Latex => {
            for x in &items {
                writeln!(out, "% {} {}/{}", entry.name, x.st.form, x.st.id)?;
                let conds = x.geo.metric.side_conditions().to_vec();
                if !conds.is_empty() {
                    writeln!(out, "% assuming {} != 0", conds.join(" != 0, "))?;
                }
                writeln!(out, "g = {}", latex::pmatrix(x.geo.metric.g()))?;
                for ([i, j, k, s], v) in x.geo.down.nonzero() {
                    if i < j && k < s && (i, j) <= (k, s) {
                        writeln!(out, "R_{{{},{},{},{}}} = {}", i + 1, j + 1, k + 1, s + 1, latex::scalar(v))?;
                    }
                }
            }
        }
    }
    Ok(true)
}
