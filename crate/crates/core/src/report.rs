//! Machine-readable statistics reports and their JSON / CSV emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, ModeIndex, Monomial};
use crate::error::{Error, Result};
use crate::expansion::{verify_transition_all, verify_triple_relation, TransitionVerdict};
use crate::gram::{
    gram_generic, gram_matrix_unchecked, left_invariance_check, multiset_orthogonality_check,
    regular_decompose, RegularDecomposition,
};
use crate::linalg::{psd_check, PsdVerdict};
use crate::presets::PresetId;
use crate::rational::{format_rational, serde_rational, serde_rational_vec, Rational};
use crate::statistics::{
    dimension_table, haldane_g, sector_blocks, BlockKind, DimensionTable, HaldaneRecord, Partition,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Particle numbers up to which expansions and triple relations are checked.
pub const VERIFY_N_MAX: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SectionName {
    Dimensions,
    Haldane,
    Positivity,
    Diagnostics,
    Verify,
}

impl SectionName {
    pub const ALL: [SectionName; 5] = [
        SectionName::Dimensions,
        SectionName::Haldane,
        SectionName::Positivity,
        SectionName::Diagnostics,
        SectionName::Verify,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SectionName::Dimensions => "dimensions",
            SectionName::Haldane => "haldane",
            SectionName::Positivity => "positivity",
            SectionName::Diagnostics => "diagnostics",
            SectionName::Verify => "verify",
        }
    }
}

impl FromStr for SectionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SectionName::ALL
            .into_iter()
            .find(|x| x.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown section {s:?}")))
    }
}

/// A requested section: either computed or skipped with a reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Computed { data: T },
    Skipped { reason: String },
}

impl<T> Section<T> {
    pub fn data(&self) -> Option<&T> {
        match self {
            Section::Computed { data } => Some(data),
            Section::Skipped { .. } => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Section::Computed { .. } => "computed",
            Section::Skipped { .. } => "skipped",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Section::Computed { .. } => None,
            Section::Skipped { reason } => Some(reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetEcho {
    pub name: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessTerm {
    pub word: Monomial,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityRecord {
    pub n: usize,
    pub block: String,
    pub kind: BlockKind,
    pub partition: Option<Partition>,
    pub occupation: Option<Vec<usize>>,
    pub size: usize,
    pub verdict: String,
    /// Witness as a combination of basis words, for indefinite blocks.
    pub witness: Option<Vec<WitnessTerm>>,
    #[serde(with = "crate::rational::serde_rational_opt", default)]
    pub witness_value: Option<Rational>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryRecord {
    pub n: usize,
    pub block: String,
    pub symmetric: bool,
    pub first_asymmetry: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceRecord {
    pub n: usize,
    pub left_invariant: bool,
    pub decomposition: RegularDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalityRecord {
    pub n: usize,
    pub orthogonal: Option<bool>,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub symmetry: Vec<SymmetryRecord>,
    pub invariance: Section<Vec<InvarianceRecord>>,
    pub multiset_orthogonality: Vec<OrthogonalityRecord>,
}

impl Diagnostics {
    pub fn symmetric(&self) -> bool {
        self.symmetry.iter().all(|r| r.symmetric)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleVerdict {
    #[serde(with = "serde_rational_vec")]
    pub xyzq: Vec<Rational>,
    pub n_max: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub triple_relation: Section<TripleVerdict>,
    pub transitions: Section<TransitionVerdict>,
}

impl Verification {
    /// False when any computed check failed.
    pub fn holds(&self) -> bool {
        self.triple_relation.data().is_none_or(|t| t.holds)
            && self.transitions.data().is_none_or(|t| t.holds())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sections {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dimensions: Option<Section<DimensionTable>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub haldane: Option<Section<Vec<HaldaneRecord>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub positivity: Option<Section<Vec<PositivityRecord>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<Section<Diagnostics>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verify: Option<Section<Verification>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub schema_version: u32,
    pub engine_version: String,
    pub preset: Option<PresetEcho>,
    pub spec: AlgebraSpec,
    pub max_n: usize,
    pub sections: Sections,
    /// Wall-clock milliseconds per section; only present when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<BTreeMap<String, u64>>,
}

impl StatisticsReport {
    pub fn empty(spec: AlgebraSpec, preset: Option<&PresetId>, max_n: usize) -> Self {
        StatisticsReport {
            schema_version: SCHEMA_VERSION,
            engine_version: ENGINE_VERSION.into(),
            preset: preset.map(|p| PresetEcho {
                name: p.name().into(),
                label: p.to_string(),
            }),
            spec,
            max_n,
            sections: Sections::default(),
            timing_ms: None,
        }
    }

    pub fn guard_exceeded(&self) -> bool {
        let s = &self.sections;
        let skipped = |r: Option<&str>| r.is_some_and(|r| r.starts_with("guard"));
        skipped(s.dimensions.as_ref().and_then(Section::reason))
            || skipped(s.haldane.as_ref().and_then(Section::reason))
            || skipped(s.positivity.as_ref().and_then(Section::reason))
            || skipped(s.diagnostics.as_ref().and_then(Section::reason))
            || s.diagnostics
                .as_ref()
                .and_then(Section::data)
                .is_some_and(|d| {
                    skipped(d.invariance.reason())
                        || d.multiset_orthogonality
                            .iter()
                            .any(|r| skipped(r.skipped.as_deref()))
                })
    }

    pub fn symmetry_violation(&self) -> bool {
        self.sections
            .diagnostics
            .as_ref()
            .and_then(Section::data)
            .is_some_and(|d| !d.symmetric())
    }
}

fn skip_reason(e: &Error) -> String {
    match e {
        Error::GuardExceeded { .. } => format!("guard: {e}"),
        _ => e.to_string(),
    }
}

fn section<T>(r: Result<T>) -> Section<T> {
    match r {
        Ok(data) => Section::Computed { data },
        Err(e) => Section::Skipped {
            reason: skip_reason(&e),
        },
    }
}

pub fn haldane_records(spec: &AlgebraSpec, max_n: usize) -> Result<Vec<HaldaneRecord>> {
    let mut out = Vec::new();
    for n in 1..max_n {
        for k in 1..=max_n - n {
            // d_{n+k} needs a reference word of n+k-1 particles.
            if n + k - 1 > spec.modes() {
                continue;
            }
            out.push(haldane_g(spec, n, k)?);
        }
    }
    Ok(out)
}

pub fn positivity_records(
    spec: &AlgebraSpec,
    preset: Option<&PresetId>,
    max_n: usize,
) -> Result<Vec<PositivityRecord>> {
    let by_design = preset.is_some_and(PresetId::indefinite_by_design);
    let mut out = Vec::new();
    for n in 1..=max_n {
        for block in sector_blocks(spec, n)? {
            let verdict = psd_check(&block.gram(spec)?)?;
            let (witness, witness_value) = match &verdict {
                PsdVerdict::Psd => (None, None),
                PsdVerdict::Indefinite { witness, value } => (
                    Some(
                        block
                            .basis
                            .iter()
                            .zip(witness)
                            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                            .map(|(w, c)| WitnessTerm {
                                word: w.clone(),
                                coeff: c.clone(),
                            })
                            .collect(),
                    ),
                    Some(value.clone()),
                ),
            };
            let note = (by_design && !verdict.is_psd()).then(|| "indefinite by design".to_string());
            out.push(PositivityRecord {
                n,
                block: block.label(),
                kind: block.kind,
                partition: block.partition.clone(),
                occupation: block.occupation.clone(),
                size: block.basis.len(),
                verdict: verdict.tag().into(),
                witness,
                witness_value,
                note,
            });
        }
    }
    Ok(out)
}

pub fn diagnostics(spec: &AlgebraSpec, max_n: usize) -> Result<Diagnostics> {
    let mut symmetry = Vec::new();
    for n in 0..=max_n {
        for block in sector_blocks(spec, n)? {
            let first = gram_matrix_unchecked(spec, &block.basis)?.first_asymmetry();
            symmetry.push(SymmetryRecord {
                n,
                block: block.label(),
                symmetric: first.is_none(),
                first_asymmetry: first,
            });
        }
    }
    let invariance = if spec.is_graded() || !spec.is_index_uniform() {
        Section::Skipped {
            reason: "coefficients depend on the mode indices".into(),
        }
    } else {
        section(
            (1..=max_n.min(spec.modes())).try_fold(Vec::new(), |mut acc, n| {
                let indices: Vec<ModeIndex> = spec.mode_indices().take(n).collect();
                let g = gram_generic(spec, &indices)?;
                acc.push(InvarianceRecord {
                    n,
                    left_invariant: left_invariance_check(&g, n)?,
                    decomposition: regular_decompose(&g, n)?,
                });
                Ok(acc)
            }),
        )
    };
    let multiset_orthogonality = (1..=max_n)
        .map(|n| match multiset_orthogonality_check(spec, n) {
            Ok(v) => Ok(OrthogonalityRecord {
                n,
                orthogonal: Some(v),
                skipped: None,
            }),
            Err(e @ Error::GuardExceeded { .. }) => Ok(OrthogonalityRecord {
                n,
                orthogonal: None,
                skipped: Some(skip_reason(&e)),
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(Diagnostics {
        symmetry,
        invariance,
        multiset_orthogonality,
    })
}

pub fn verification(spec: &AlgebraSpec, preset: Option<&PresetId>) -> Verification {
    let triple_relation = match preset.and_then(PresetId::triple_coefficients) {
        None => Section::Skipped {
            reason: "no triple relation for this algebra".into(),
        },
        Some(c) => {
            let [x, y, z, q] = &c;
            section(
                verify_triple_relation(spec, x, y, z, q, VERIFY_N_MAX).map(|holds| TripleVerdict {
                    xyzq: c.to_vec(),
                    n_max: VERIFY_N_MAX,
                    holds,
                }),
            )
        }
    };
    let transitions = match preset {
        None => Section::Skipped {
            reason: "no preset given".into(),
        },
        Some(id) => section(verify_transition_all(id, spec, VERIFY_N_MAX)),
    };
    Verification {
        triple_relation,
        transitions,
    }
}

/// Computes the requested sections. Guard hits and similar size limits
/// become skipped sections rather than errors.
pub fn build_report(
    spec: &AlgebraSpec,
    preset: Option<&PresetId>,
    max_n: usize,
    sections: &[SectionName],
    timing: bool,
) -> StatisticsReport {
    let mut report = StatisticsReport::empty(spec.clone(), preset, max_n);
    let mut times = BTreeMap::new();
    let mut wanted: Vec<SectionName> = sections.to_vec();
    wanted.sort();
    wanted.dedup();
    for name in wanted {
        let start = Instant::now();
        let s = &mut report.sections;
        match name {
            SectionName::Dimensions => s.dimensions = Some(section(dimension_table(spec, max_n))),
            SectionName::Haldane => s.haldane = Some(section(haldane_records(spec, max_n))),
            SectionName::Positivity => {
                s.positivity = Some(section(positivity_records(spec, preset, max_n)))
            }
            SectionName::Diagnostics => s.diagnostics = Some(section(diagnostics(spec, max_n))),
            SectionName::Verify => {
                s.verify = Some(Section::Computed {
                    data: verification(spec, preset),
                })
            }
        }
        times.insert(
            name.as_str().to_string(),
            start.elapsed().as_millis() as u64,
        );
    }
    if timing {
        report.timing_ms = Some(times);
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

pub fn to_json(report: &StatisticsReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<StatisticsReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes a JSON file, or a directory of CSV tables plus `manifest.csv`.
pub fn emit(report: &StatisticsReport, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Json => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, to_json(report)?)?;
        }
        Format::Csv => emit_csv(report, path)?,
    }
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

fn kind_str(k: BlockKind) -> &'static str {
    match k {
        BlockKind::Partition => "partition",
        BlockKind::Occupation => "occupation",
        BlockKind::Full => "full",
    }
}

struct Table {
    file: &'static str,
    section: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn write_table(dir: &Path, t: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join(t.file))?;
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit_csv(report: &StatisticsReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("spec.json"),
        serde_json::to_string_pretty(&report.spec)? + "\n",
    )?;
    let mut manifest: Vec<Vec<String>> = vec![vec![
        "spec.json".into(),
        "spec".into(),
        "computed".into(),
        String::new(),
    ]];
    let mut tables = Vec::new();
    let mut note = |section: &str, file: &str, status: &str, reason: Option<&str>| {
        manifest.push(vec![
            file.into(),
            section.into(),
            status.into(),
            reason.unwrap_or("").into(),
        ]);
    };
    let s = &report.sections;

    if let Some(sec) = &s.dimensions {
        match sec.data() {
            Some(t) => {
                tables.push(Table {
                    file: "dimensions.csv",
                    section: "dimensions",
                    header: vec!["n", "kind", "partition", "occupation", "d", "multiplicity"],
                    rows: t
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.n.to_string(),
                                kind_str(r.kind).into(),
                                opt(&r.partition),
                                r.occupation.as_deref().map_or_else(String::new, join),
                                r.d.to_string(),
                                r.multiplicity.to_string(),
                            ]
                        })
                        .collect(),
                });
                tables.push(Table {
                    file: "dimension_totals.csv",
                    section: "dimensions",
                    header: vec!["n", "dimension"],
                    rows: t
                        .totals
                        .iter()
                        .map(|r| vec![r.n.to_string(), r.dimension.to_string()])
                        .collect(),
                });
            }
            None => note("dimensions", "", "skipped", sec.reason()),
        }
    }
    if let Some(sec) = &s.haldane {
        match sec.data() {
            Some(rs) => tables.push(Table {
                file: "haldane.csv",
                section: "haldane",
                header: vec!["n", "k", "d_n", "d_n_plus_k", "g"],
                rows: rs
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            r.k.to_string(),
                            r.d_n.to_string(),
                            r.d_n_plus_k.to_string(),
                            format_rational(&r.g),
                        ]
                    })
                    .collect(),
            }),
            None => note("haldane", "", "skipped", sec.reason()),
        }
    }
    if let Some(sec) = &s.positivity {
        match sec.data() {
            Some(rs) => tables.push(Table {
                file: "positivity.csv",
                section: "positivity",
                header: vec![
                    "n",
                    "block",
                    "size",
                    "verdict",
                    "witness",
                    "witness_value",
                    "note",
                ],
                rows: rs
                    .iter()
                    .map(|r| {
                        let witness = r.witness.as_ref().map_or_else(String::new, |w| {
                            w.iter()
                                .map(|t| format!("{}*{}", format_rational(&t.coeff), t.word))
                                .collect::<Vec<_>>()
                                .join(" + ")
                        });
                        vec![
                            r.n.to_string(),
                            r.block.clone(),
                            r.size.to_string(),
                            r.verdict.clone(),
                            witness,
                            r.witness_value
                                .as_ref()
                                .map_or_else(String::new, format_rational),
                            opt(&r.note),
                        ]
                    })
                    .collect(),
            }),
            None => note("positivity", "", "skipped", sec.reason()),
        }
    }
    if let Some(sec) = &s.diagnostics {
        match sec.data() {
            Some(d) => {
                tables.push(Table {
                    file: "diagnostics_symmetry.csv",
                    section: "diagnostics",
                    header: vec!["n", "block", "symmetric", "first_asymmetry"],
                    rows: d
                        .symmetry
                        .iter()
                        .map(|r| {
                            vec![
                                r.n.to_string(),
                                r.block.clone(),
                                r.symmetric.to_string(),
                                r.first_asymmetry
                                    .map_or_else(String::new, |(a, b)| format!("{a} {b}")),
                            ]
                        })
                        .collect(),
                });
                match d.invariance.data() {
                    Some(rs) => {
                        tables.push(Table {
                            file: "diagnostics_invariance.csv",
                            section: "diagnostics",
                            header: vec!["n", "left_invariant", "residual"],
                            rows: rs
                                .iter()
                                .map(|r| {
                                    vec![
                                        r.n.to_string(),
                                        r.left_invariant.to_string(),
                                        r.decomposition.residual.to_string(),
                                    ]
                                })
                                .collect(),
                        });
                        tables.push(Table {
                            file: "diagnostics_decomposition.csv",
                            section: "diagnostics",
                            header: vec!["n", "permutation", "cycles", "coefficient"],
                            rows: rs
                                .iter()
                                .flat_map(|r| {
                                    r.decomposition.coefficients.iter().map(move |c| {
                                        vec![
                                            r.n.to_string(),
                                            join(&c.perm),
                                            c.cycles.clone(),
                                            format_rational(&c.coeff),
                                        ]
                                    })
                                })
                                .collect(),
                        });
                    }
                    None => note(
                        "diagnostics",
                        "diagnostics_invariance.csv",
                        "skipped",
                        d.invariance.reason(),
                    ),
                }
                tables.push(Table {
                    file: "diagnostics_multiset.csv",
                    section: "diagnostics",
                    header: vec!["n", "orthogonal", "skipped"],
                    rows: d
                        .multiset_orthogonality
                        .iter()
                        .map(|r| vec![r.n.to_string(), opt(&r.orthogonal), opt(&r.skipped)])
                        .collect(),
                });
            }
            None => note("diagnostics", "", "skipped", sec.reason()),
        }
    }
    if let Some(sec) = &s.verify {
        if let Some(v) = sec.data() {
            let mut rows = Vec::new();
            match &v.triple_relation {
                Section::Computed { data } => rows.push(vec![
                    "triple_relation".into(),
                    "computed".into(),
                    data.holds.to_string(),
                    data.xyzq
                        .iter()
                        .map(format_rational)
                        .collect::<Vec<_>>()
                        .join(" "),
                ]),
                Section::Skipped { reason } => rows.push(vec![
                    "triple_relation".into(),
                    "skipped".into(),
                    String::new(),
                    reason.clone(),
                ]),
            }
            match &v.transitions {
                Section::Computed { data } => rows.push(vec![
                    "transitions".into(),
                    "computed".into(),
                    data.holds().to_string(),
                    data.failures
                        .iter()
                        .map(|(i, j)| format!("{i}{j}"))
                        .collect::<Vec<_>>()
                        .join(" "),
                ]),
                Section::Skipped { reason } => rows.push(vec![
                    "transitions".into(),
                    "skipped".into(),
                    String::new(),
                    reason.clone(),
                ]),
            }
            tables.push(Table {
                file: "verify.csv",
                section: "verify",
                header: vec!["check", "status", "holds", "detail"],
                rows,
            });
        }
    }
    for t in &tables {
        write_table(dir, t)?;
        manifest.push(vec![
            t.file.into(),
            t.section.into(),
            "computed".into(),
            String::new(),
        ]);
    }
    let mut w = csv::Writer::from_path(dir.join("manifest.csv"))?;
    w.write_record(["file", "section", "status", "reason"])?;
    w.write_record(["", "schema_version", &SCHEMA_VERSION.to_string(), ""])?;
    for r in manifest {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}
