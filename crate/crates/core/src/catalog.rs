//! The classified six-dimensional nilpotent algebras with their symplectic
//! forms, complex structures and expected curvature, loaded from JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    bianchi_violations, metric_violations, pair_symmetry_violations, torsion_violations,
    type246_structure_check, Geometry, GeometryError, Split,
};
use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::Subspace;
use crate::scalar::{compose, parse_expr, parse_poly, ParamBinding, Poly, Relations, Scalar, ScalarError, Var};
use crate::solver::{verify_family, FamilyReport};
use crate::tensors::{is_abelian_j, is_closed, Endomorphism, TensorError, TwoForm};

pub const CATALOG_ENV: &str = "NILKAEHLER_CATALOG";

const EMBEDDED: &[(&str, &str)] = &[
    ("g10", include_str!("../data/g10.json")),
    ("g11", include_str!("../data/g11.json")),
    ("g12", include_str!("../data/g12.json")),
    ("g13", include_str!("../data/g13.json")),
    ("g14", include_str!("../data/g14.json")),
    ("g15", include_str!("../data/g15.json")),
    ("g16", include_str!("../data/g16.json")),
    ("g17", include_str!("../data/g17.json")),
    ("g18", include_str!("../data/g18.json")),
    ("g21", include_str!("../data/g21.json")),
    ("g23", include_str!("../data/g23.json")),
    ("g24", include_str!("../data/g24.json")),
    ("g25", include_str!("../data/g25.json")),
];
const EMBEDDED_EXPECTATIONS: &str = include_str!("../data/expectations.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown entry '{0}'")]
    UnknownEntry(String),
    #[error("entry {entry}: unknown {what} '{id}'")]
    UnknownId { entry: String, what: &'static str, id: String },
    #[error("{0}")]
    Schema(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON in {0}: {1}")]
    Json(String, serde_json::Error),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

// ---- JSON schemas ----

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub dim: usize,
    pub brackets: Vec<BracketJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub i: usize,
    pub j: usize,
    pub c: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

/// Row `i` is the image of `e_i`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EndomorphismJson {
    pub dim: usize,
    pub rows: Vec<Vec<String>>,
}

fn one_based(idx: usize, dim: usize, what: &str) -> Result<usize, CatalogError> {
    if idx == 0 || idx > dim {
        return Err(CatalogError::Schema(format!("{what} index {idx} outside 1..={dim}")));
    }
    Ok(idx - 1)
}

impl AlgebraJson {
    pub fn build(&self) -> Result<LieAlgebra, CatalogError> {
        let mut brackets = Vec::new();
        for b in &self.brackets {
            let i = one_based(b.i, self.dim, "bracket")?;
            let j = one_based(b.j, self.dim, "bracket")?;
            let k = one_based(b.k, self.dim, "bracket")?;
            if i >= j {
                return Err(CatalogError::Schema(format!("bracket needs i < j, got ({}, {})", b.i, b.j)));
            }
            brackets.push((i, j, k, parse_expr(&b.c)?));
        }
        Ok(LieAlgebra::new(self.dim, brackets)?)
    }

    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        AlgebraJson {
            dim: alg.dim(),
            brackets: alg
                .brackets()
                .map(|(i, j, k, c)| BracketJson { i: i + 1, j: j + 1, k: k + 1, c: c.to_string() })
                .collect(),
        }
    }
}

impl FormJson {
    pub fn build(&self) -> Result<TwoForm, CatalogError> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let i = one_based(t.i, self.dim, "form")?;
            let j = one_based(t.j, self.dim, "form")?;
            terms.push((i, j, parse_expr(&t.c)?));
        }
        Ok(TwoForm::from_terms(self.dim, terms)?)
    }

    pub fn from_form(w: &TwoForm) -> Self {
        FormJson {
            dim: w.dim(),
            terms: w
                .terms()
                .into_iter()
                .map(|(i, j, c)| TermJson { i: i + 1, j: j + 1, c: c.to_string() })
                .collect(),
        }
    }
}

impl EndomorphismJson {
    pub fn build(&self) -> Result<Endomorphism, CatalogError> {
        if self.rows.len() != self.dim || self.rows.iter().any(|r| r.len() != self.dim) {
            return Err(CatalogError::Schema(format!("endomorphism must be {0}x{0}", self.dim)));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|s| parse_expr(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Endomorphism::from_rows(rows)?)
    }

    pub fn from_endomorphism(j: &Endomorphism) -> Self {
        EndomorphismJson {
            dim: j.dim(),
            rows: j.matrix().to_rows().iter().map(|r| r.iter().map(Scalar::to_string).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormEntryJson {
    id: String,
    admits_j: AdmitsJ,
    form: FormJson,
    #[serde(default)]
    sample: BTreeMap<String, String>,
    #[serde(default = "yes")]
    closed: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureJson {
    id: String,
    form: String,
    params: Vec<String>,
    #[serde(default)]
    nonzero: Vec<String>,
    #[serde(rename = "J")]
    j: EndomorphismJson,
    #[serde(default)]
    sample: BTreeMap<String, String>,
    #[serde(default)]
    canonical: Option<BTreeMap<String, String>>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    expect: Expect,
    #[serde(default)]
    abelian: Option<bool>,
    #[serde(default)]
    abelian_at: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    name: String,
    #[serde(rename = "type")]
    algebra_type: Vec<usize>,
    #[serde(default)]
    notes: String,
    algebra: AlgebraJson,
    forms: Vec<FormEntryJson>,
    structures: Vec<StructureJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComponentJson<const N: usize> {
    #[serde(with = "serde_arrays")]
    pub idx: [usize; N],
    pub value: String,
}

// serde handles fixed arrays only for concrete sizes, so go through Vec
mod serde_arrays {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(a: &[usize; N], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(a.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[usize; N], D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        v.try_into().map_err(|v: Vec<usize>| D::Error::custom(format!("expected {N} indices, got {}", v.len())))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectationJson {
    entry: String,
    form: String,
    structure: String,
    #[serde(default)]
    up_components: Vec<ComponentJson<4>>,
    #[serde(default)]
    down_components: Vec<ComponentJson<4>>,
    #[serde(default)]
    complete: bool,
    #[serde(default)]
    flat: bool,
    #[serde(default)]
    metric: Vec<ComponentJson<2>>,
    #[serde(default)]
    metric_at: Option<String>,
    #[serde(default)]
    depends_only_on: Option<Vec<String>>,
}

// ---- domain types ----

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AdmitsJ {
    Yes,
    No,
    Unknown,
}

/// What verification of a stored structure is expected to conclude.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    #[default]
    Pass,
    Incompatible,
}

#[derive(Clone, Debug)]
pub struct FormEntry {
    pub id: String,
    pub form: TwoForm,
    pub admits_j: AdmitsJ,
    /// Values for parameters appearing in the form, used by numeric probes.
    pub sample: ParamBinding,
    /// Whether `dw = 0` holds for the form as transcribed. A `false` here
    /// records a form printed in the source that fails closedness.
    pub closed: bool,
}

/// Paper values for one structure, all 1-based.
#[derive(Clone, Debug, Default)]
pub struct Expectation {
    pub up: Vec<([usize; 4], Scalar)>,
    pub down: Vec<([usize; 4], Scalar)>,
    /// The listed up components are all the nonzero ones with `i < j`.
    pub complete: bool,
    pub flat: bool,
    pub metric: Vec<([usize; 2], Scalar)>,
    pub metric_at_canonical: bool,
    pub depends_only_on: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct StructureEntry {
    pub id: String,
    pub form: String,
    pub j: Endomorphism,
    pub params: Vec<String>,
    /// Expressions the family requires to be nonzero.
    pub nonzero: Vec<Scalar>,
    pub relations: Relations,
    pub canonical: Option<BTreeMap<Var, Poly>>,
    /// An admissible binding of every free parameter.
    pub sample: ParamBinding,
    pub expect: Expect,
    /// Whether `[JX,JY] = [X,Y]`, evaluated under `abelian_at`.
    pub abelian: Option<bool>,
    pub abelian_at: ParamBinding,
    pub expected: Option<Expectation>,
}

impl StructureEntry {
    pub fn canonical_j(&self) -> Result<Option<Endomorphism>, CatalogError> {
        let Some(values) = &self.canonical else {
            return Ok(None);
        };
        let m = self.j.matrix().try_map(|s| compose(s, values))?;
        Ok(Some(Endomorphism::from_matrix(m)?))
    }

    /// Nonzero conditions that fail under `binding`.
    pub fn excluded_by(&self, binding: &ParamBinding) -> Vec<String> {
        self.nonzero
            .iter()
            .filter(|c| matches!(c.substitute(binding), Ok(v) if v.is_zero()))
            .map(Scalar::to_string)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra_type: Vec<usize>,
    pub notes: String,
    pub algebra: LieAlgebra,
    pub forms: Vec<FormEntry>,
    pub structures: Vec<StructureEntry>,
}

impl CatalogEntry {
    pub fn form(&self, id: &str) -> Result<&FormEntry, CatalogError> {
        self.forms.iter().find(|f| f.id == id).ok_or_else(|| CatalogError::UnknownId {
            entry: self.name.clone(),
            what: "form",
            id: id.to_string(),
        })
    }

    pub fn structure(&self, id: &str) -> Result<&StructureEntry, CatalogError> {
        self.structures.iter().find(|s| s.id == id).ok_or_else(|| CatalogError::UnknownId {
            entry: self.name.clone(),
            what: "structure",
            id: id.to_string(),
        })
    }

    /// Structures on the given form, in file order.
    pub fn structures_on<'a>(&'a self, form: &'a str) -> impl Iterator<Item = &'a StructureEntry> {
        self.structures.iter().filter(move |s| s.form == form)
    }
}

fn binding_from(map: &BTreeMap<String, String>) -> Result<ParamBinding, CatalogError> {
    let pairs: Vec<String> = map.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Ok(ParamBinding::parse_pairs(&pairs)?)
}

fn parse_components<const N: usize>(
    comps: &[ComponentJson<N>],
    rel: &Relations,
) -> Result<Vec<([usize; N], Scalar)>, CatalogError> {
    comps.iter().map(|c| Ok((c.idx, rel.reduce(&parse_expr(&c.value)?)?))).collect()
}

impl EntryJson {
    fn build(self) -> Result<CatalogEntry, CatalogError> {
        let algebra = self.algebra.build()?;
        let forms = self
            .forms
            .into_iter()
            .map(|f| {
                Ok(FormEntry {
                    form: f.form.build()?,
                    id: f.id,
                    admits_j: f.admits_j,
                    sample: binding_from(&f.sample)?,
                    closed: f.closed,
                })
            })
            .collect::<Result<Vec<_>, CatalogError>>()?;
        let mut structures = Vec::new();
        for s in self.structures {
            if !forms.iter().any(|f| f.id == s.form) {
                return Err(CatalogError::UnknownId { entry: self.name.clone(), what: "form", id: s.form });
            }
            let mut relations = Relations::none();
            for r in &s.relations {
                relations.extend(Relations::parse(r)?);
            }
            let canonical = s
                .canonical
                .map(|m| {
                    m.iter()
                        .map(|(k, v)| Ok((Var::new(k)?, parse_poly(v)?)))
                        .collect::<Result<BTreeMap<_, _>, ScalarError>>()
                })
                .transpose()?;
            structures.push(StructureEntry {
                j: s.j.build()?.reduce(&relations)?,
                nonzero: s.nonzero.iter().map(|e| parse_expr(e)).collect::<Result<_, _>>()?,
                sample: binding_from(&s.sample)?,
                id: s.id,
                form: s.form,
                params: s.params,
                relations,
                canonical,
                expect: s.expect,
                abelian: s.abelian,
                abelian_at: binding_from(&s.abelian_at)?,
                expected: None,
            });
        }
        Ok(CatalogEntry {
            name: self.name,
            algebra_type: self.algebra_type,
            notes: self.notes,
            algebra,
            forms,
            structures,
        })
    }
}

/// All entries keyed by name.
#[derive(Clone, Debug)]
pub struct Catalog {
    entries: BTreeMap<String, CatalogEntry>,
}

impl Catalog {
    /// The data compiled into the library.
    pub fn embedded() -> Result<Self, CatalogError> {
        let files = EMBEDDED.iter().map(|(n, s)| (format!("{n}.json"), s.to_string())).collect();
        Self::from_sources(files, ("expectations.json".into(), EMBEDDED_EXPECTATIONS.to_string()))
    }

    /// Every `*.json` in `dir` except `expectations.json` is an entry.
    pub fn load_dir(dir: &Path) -> Result<Self, CatalogError> {
        let read = |p: PathBuf| std::fs::read_to_string(&p).map_err(|source| CatalogError::Io { path: p, source });
        let listing = std::fs::read_dir(dir).map_err(|source| CatalogError::Io { path: dir.into(), source })?;
        let mut files = Vec::new();
        for item in listing {
            let path = item.map_err(|source| CatalogError::Io { path: dir.into(), source })?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            if name.ends_with(".json") && name != "expectations.json" {
                files.push((name, read(path)?));
            }
        }
        files.sort();
        let exp = dir.join("expectations.json");
        let exp_text = if exp.exists() { read(exp)? } else { "[]".into() };
        Self::from_sources(files, ("expectations.json".into(), exp_text))
    }

    /// Honors the data-directory override in the environment.
    pub fn load() -> Result<Self, CatalogError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(dir) if !dir.is_empty() => Self::load_dir(Path::new(&dir)),
            _ => Self::embedded(),
        }
    }

    fn from_sources(files: Vec<(String, String)>, expectations: (String, String)) -> Result<Self, CatalogError> {
        let mut entries = BTreeMap::new();
        for (file, text) in files {
            let raw: EntryJson = serde_json::from_str(&text).map_err(|e| CatalogError::Json(file.clone(), e))?;
            let entry = raw.build()?;
            entries.insert(entry.name.clone(), entry);
        }
        let raw: Vec<ExpectationJson> =
            serde_json::from_str(&expectations.1).map_err(|e| CatalogError::Json(expectations.0, e))?;
        for x in raw {
            let entry = entries.get_mut(&x.entry).ok_or_else(|| CatalogError::UnknownEntry(x.entry.clone()))?;
            let name = entry.name.clone();
            let st = entry
                .structures
                .iter_mut()
                .find(|s| s.id == x.structure && s.form == x.form)
                .ok_or_else(|| CatalogError::UnknownId { entry: name, what: "structure", id: x.structure.clone() })?;
            let rel = &st.relations;
            st.expected = Some(Expectation {
                up: parse_components(&x.up_components, rel)?,
                down: parse_components(&x.down_components, rel)?,
                complete: x.complete,
                flat: x.flat,
                metric: parse_components(&x.metric, rel)?,
                metric_at_canonical: match x.metric_at.as_deref() {
                    None => false,
                    Some("canonical") => true,
                    Some(other) => return Err(CatalogError::Schema(format!("unknown metric_at '{other}'"))),
                },
                depends_only_on: x.depends_only_on,
            });
        }
        Ok(Catalog { entries })
    }

    pub fn get(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries.get(name).ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))
    }

    /// Names with their algebra types, sorted by name.
    pub fn list(&self) -> Vec<(&str, &[usize])> {
        self.entries.values().map(|e| (e.name.as_str(), e.algebra_type.as_slice())).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn self_validate(&self) -> ValidationReport {
        ValidationReport { entries: self.entries.values().collect::<Vec<_>>().par_iter().map(|e| validate_entry(e)).collect() }
    }

    /// `(entry, form)` pairs stated to admit no compatible complex structure.
    pub fn negative_forms(&self) -> Vec<(&CatalogEntry, &FormEntry)> {
        self.entries
            .values()
            .flat_map(|e| e.forms.iter().filter(|f| f.admits_j == AdmitsJ::No).map(move |f| (e, f)))
            .collect()
    }
}

// ---- validation ----

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EntryReport {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

impl EntryReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub entries: Vec<EntryReport>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(EntryReport::pass)
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, pass: bool) {
        self.0.push(CheckResult { name: name.into(), pass, detail: None });
    }

    fn push_detail(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        let detail = detail.into();
        self.0.push(CheckResult {
            name: name.into(),
            pass,
            detail: (!detail.is_empty()).then_some(detail),
        });
    }
}

/// `w(C^1 g, Z) = 0`.
pub fn derived_center_isotropic(alg: &LieAlgebra, w: &TwoForm) -> bool {
    let series = alg.descending_series();
    let derived = series.get(1).cloned().unwrap_or_else(|| Subspace::zero(alg.dim()));
    let center = alg.center();
    derived.basis().iter().all(|x| center.basis().iter().all(|z| w.eval(x, z).is_zero()))
}

fn family_detail(r: &FamilyReport) -> String {
    let mut parts = Vec::new();
    if !r.compat_failures.is_empty() {
        parts.push(format!("compat {:?}", r.compat_failures));
    }
    if !r.almost_complex_failures.is_empty() {
        parts.push(format!("J^2+I {:?}", r.almost_complex_failures));
    }
    if !r.nijenhuis_failures.is_empty() {
        parts.push(format!("Nijenhuis {:?}", r.nijenhuis_failures));
    }
    parts.join("; ")
}

fn compare_components(
    label: &str,
    expected: &[([usize; 4], Scalar)],
    tensor: &crate::geometry::Tensor4,
    rel: &Relations,
    checks: &mut Checks,
) {
    for (idx, want) in expected {
        let [i, j, k, l] = idx.map(|x| x - 1);
        let got = tensor.get(i, j, k, l);
        let ok = rel.is_zero(&(got - want));
        let detail = if ok { String::new() } else { format!("computed {got}") };
        checks.push_detail(format!("{label} {idx:?} = {want}"), ok, detail);
    }
}

fn validate_structure(entry: &CatalogEntry, st: &StructureEntry, checks: &mut Checks) {
    let tag = format!("{}/{}", st.form, st.id);
    let Ok(form) = entry.form(&st.form) else {
        checks.push(format!("{tag}: form exists"), false);
        return;
    };
    let w = &form.form;
    let rel = &st.relations;
    let report = verify_family(&entry.algebra, w, &st.j, rel);
    match st.expect {
        Expect::Incompatible => {
            checks.push_detail(format!("{tag}: not compatible"), !report.is_compatible(), family_detail(&report));
            return;
        }
        Expect::Pass => checks.push_detail(format!("{tag}: pseudo-Kaehler"), report.pass(), family_detail(&report)),
    }
    if !st.excluded_by(&st.sample).is_empty() {
        checks.push_detail(format!("{tag}: sample admissible"), false, st.excluded_by(&st.sample).join(", "));
    }
    if let Some(abelian) = st.abelian {
        let got = st.j.substitute(&st.abelian_at).map(|j| is_abelian_j(&entry.algebra, &j));
        checks.push(format!("{tag}: abelian J is {abelian}"), got == Ok(abelian));
    }
    let geo = match Geometry::compute(&entry.algebra, w, &st.j, rel) {
        Ok(g) => g,
        Err(e) => {
            checks.push_detail(format!("{tag}: geometry"), false, e.to_string());
            return;
        }
    };
    checks.push(format!("{tag}: Ricci = 0"), geo.ricci.is_zero());
    checks.push_detail(format!("{tag}: norm = 0"), geo.norm.is_zero(), geo.norm.to_string());
    checks.push(format!("{tag}: torsion-free"), torsion_violations(&entry.algebra, &geo.connection, rel).is_empty());
    checks.push(format!("{tag}: metric connection"), metric_violations(&geo.connection, &geo.metric, rel).is_empty());
    checks.push(format!("{tag}: first Bianchi"), bianchi_violations(&geo.up, rel).is_empty());
    checks.push(format!("{tag}: pair symmetry"), pair_symmetry_violations(&geo.down, rel).is_empty());
    if entry.algebra_type == [2, 4, 6] {
        let r = type246_structure_check(&entry.algebra, w, &geo, &Split::standard());
        let failed: Vec<String> =
            r.hypotheses.iter().chain(&r.conclusions).filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        checks.push_detail(format!("{tag}: (2,4,6) structure"), failed.is_empty(), failed.join(", "));
    }
    let Some(x) = &st.expected else {
        return;
    };
    if x.flat {
        checks.push(format!("{tag}: flat"), geo.up.is_zero());
    }
    compare_components(&format!("{tag}: R^"), &x.up, &geo.up, rel, checks);
    compare_components(&format!("{tag}: R_"), &x.down, &geo.down, rel, checks);
    if x.complete {
        let listed: BTreeSet<[usize; 4]> = x.up.iter().map(|(i, _)| *i).collect();
        let extra: Vec<[usize; 4]> = geo
            .report()
            .up_components
            .into_iter()
            .map(|c| c.idx)
            .filter(|i| !listed.contains(i))
            .collect();
        checks.push_detail(format!("{tag}: no unlisted components"), extra.is_empty(), format!("{extra:?}").replace("[]", ""));
    }
    if let Some(allowed) = &x.depends_only_on {
        let extra: Vec<String> = geo.up.params().into_iter().filter(|p| !allowed.contains(p)).collect();
        checks.push_detail(format!("{tag}: curvature depends only on {allowed:?}"), extra.is_empty(), extra.join(", "));
    }
    if !x.metric.is_empty() {
        let g = if x.metric_at_canonical {
            match st.canonical_j() {
                Ok(Some(jc)) => crate::geometry::associated_metric(w, &jc, rel).map(|m| m.g().clone()),
                _ => {
                    checks.push(format!("{tag}: canonical J"), false);
                    return;
                }
            }
        } else {
            Ok(geo.metric.g().clone())
        };
        match g {
            Ok(g) => {
                for (idx, want) in &x.metric {
                    let (i, j) = (idx[0] - 1, idx[1] - 1);
                    let ok = rel.is_zero(&(&g[(i, j)] - want)) && rel.is_zero(&(&g[(j, i)] - want));
                    let detail = if ok { String::new() } else { format!("computed {}", g[(i, j)]) };
                    checks.push_detail(format!("{tag}: g{idx:?} = {want}"), ok, detail);
                }
            }
            Err(e) => checks.push_detail(format!("{tag}: canonical metric"), false, e.to_string()),
        }
    }
}

/// Runs every stored invariant and expectation for one entry.
pub fn validate_entry(entry: &CatalogEntry) -> EntryReport {
    let mut checks = Checks(Vec::new());
    let alg = &entry.algebra;
    let bad = alg.jacobi_check();
    checks.push_detail("Jacobi", bad.is_empty(), if bad.is_empty() { String::new() } else { format!("{bad:?}") });
    let ty = alg.algebra_type();
    checks.push_detail(format!("type {:?}", entry.algebra_type), ty == entry.algebra_type, format!("computed {ty:?}"));
    for f in &entry.forms {
        let closed = is_closed(alg, &f.form);
        let label = if f.closed { "closed" } else { "not closed as printed" };
        checks.push(format!("{}: {label}", f.id), closed == f.closed);
        checks.push(format!("{}: nondegenerate", f.id), f.form.nondegenerate());
        checks.push(format!("{}: w(C1, Z) = 0", f.id), derived_center_isotropic(alg, &f.form));
        if f.admits_j == AdmitsJ::Yes {
            let has = entry.structures_on(&f.id).any(|s| s.expect == Expect::Pass);
            checks.push(format!("{}: has a structure", f.id), has);
        }
    }
    for st in &entry.structures {
        validate_structure(entry, st, &mut checks);
    }
    EntryReport { name: entry.name.clone(), checks: checks.0 }
}


#[cfg(test)]
mod validation_tests {
    use super::*;

    #[test]
    fn full_catalog_validates() {
        let report = Catalog::embedded().unwrap().self_validate();
        for e in &report.entries {
            for c in e.failures() {
                eprintln!("{}: {} {:?}", e.name, c.name, c.detail);
            }
        }
        assert!(report.pass());
    }

    #[test]
    fn flipped_sign_is_caught() {
        let cat = Catalog::embedded().unwrap();
        let mut e = cat.get("g21").unwrap().clone();
        let x = e.structures[0].expected.as_mut().unwrap();
        let (_, v) = x.down.iter_mut().find(|(i, _)| *i == [1, 2, 1, 2]).unwrap();
        *v = -v.clone();
        let report = validate_entry(&e);
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["w2/J: R_ [1, 2, 1, 2] = psi12"]);
    }

    #[test]
    fn g18_third_case_has_ten_components() {
        let cat = Catalog::embedded().unwrap();
        let st = cat.get("g18").unwrap().structure("J3").unwrap();
        let x = st.expected.as_ref().unwrap();
        assert_eq!(x.up.len(), 10);
        assert!(x.complete);
        assert!(x.up.contains(&([1, 2, 1, 6], parse_expr("-6*psi25/psi46").unwrap())));
    }

    #[test]
    fn directory_matches_embedded() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let from_dir = Catalog::load_dir(&dir).unwrap();
        let embedded = Catalog::embedded().unwrap();
        assert_eq!(from_dir.list(), embedded.list());
    }
}
