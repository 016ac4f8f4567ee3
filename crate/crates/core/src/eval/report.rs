use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::{ActionClass, Language};
use crate::matcher::MatchMode;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Column index of the "no class" outcome in a confusion row.
pub const NO_CLASS_COLUMN: usize = 9;

/// Language slice an accuracy figure covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Es,
    En,
    Both,
}

impl Scope {
    pub const ALL: [Scope; 3] = [Scope::Es, Scope::En, Scope::Both];

    pub fn admits(self, language: Language) -> bool {
        match self {
            Scope::Es => language == Language::Spanish,
            Scope::En => language == Language::English,
            Scope::Both => true,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scope::Es => "Spanish",
            Scope::En => "English",
            Scope::Both => "Both",
        }
    }
}

impl From<Language> for Scope {
    fn from(l: Language) -> Self {
        match l {
            Language::Spanish => Scope::Es,
            Language::English => Scope::En,
        }
    }
}

pub fn accuracy(correct: u64, total: u64) -> Option<f64> {
    (total > 0).then(|| correct as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTally {
    pub mode: MatchMode,
    pub language: Language,
    pub class: ActionClass,
    pub correct: u64,
    pub total: u64,
}

impl CellTally {
    pub fn accuracy(&self) -> Option<f64> {
        accuracy(self.correct, self.total)
    }
}

/// Rows are true classes in table order; columns are predicted classes
/// followed by the "no class" column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub mode: MatchMode,
    pub language: Language,
    pub counts: [[u64; 10]; 9],
}

impl ConfusionMatrix {
    pub fn new(mode: MatchMode, language: Language) -> Self {
        Self {
            mode,
            language,
            counts: [[0; 10]; 9],
        }
    }

    pub fn record(&mut self, truth: ActionClass, predicted: Option<ActionClass>) {
        let col = predicted.map_or(NO_CLASS_COLUMN, ActionClass::index);
        self.counts[truth.index()][col] += 1;
    }

    pub fn diagonal(&self) -> u64 {
        (0..9).map(|i| self.counts[i][i]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_total(&self, truth: ActionClass) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn no_class(&self) -> u64 {
        self.counts.iter().map(|r| r[NO_CLASS_COLUMN]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallAccuracy {
    pub mode: MatchMode,
    pub scope: Scope,
    pub correct: u64,
    pub total: u64,
    pub accuracy: Option<f64>,
}

/// Accuracy of one speaker/session group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAccuracy {
    pub mode: MatchMode,
    pub language: Language,
    pub group: String,
    pub correct: u64,
    pub total: u64,
    pub accuracy: Option<f64>,
}

/// Unweighted mean of per-group accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMean {
    pub mode: MatchMode,
    pub scope: Scope,
    pub groups: u64,
    pub mean_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub provider_id: String,
    pub modes: Vec<MatchMode>,
    pub cells: Vec<CellTally>,
    pub confusion: Vec<ConfusionMatrix>,
    pub overall: Vec<OverallAccuracy>,
    pub groups: Vec<GroupAccuracy>,
    pub group_means: Vec<GroupMean>,
    /// Utterances the provider failed on, per language. They are also
    /// counted in the "no class" column.
    pub provider_failures: BTreeMap<Language, u64>,
}

impl EvaluationReport {
    pub fn cell(&self, mode: MatchMode, language: Language, class: ActionClass) -> Option<&CellTally> {
        self.cells
            .iter()
            .find(|c| c.mode == mode && c.language == language && c.class == class)
    }

    pub fn confusion(&self, mode: MatchMode, language: Language) -> Option<&ConfusionMatrix> {
        self.confusion.iter().find(|m| m.mode == mode && m.language == language)
    }

    pub fn overall(&self, mode: MatchMode, scope: Scope) -> Option<&OverallAccuracy> {
        self.overall.iter().find(|o| o.mode == mode && o.scope == scope)
    }

    pub fn accuracy(&self, mode: MatchMode, scope: Scope) -> Option<f64> {
        self.overall(mode, scope).and_then(|o| o.accuracy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Cells table, a blank line, then the confusion table.
    pub fn to_csv(&self) -> String {
        let mut cells = csv::Writer::from_writer(Vec::new());
        cells
            .write_record(["mode", "language", "class", "correct", "total", "accuracy"])
            .expect("in-memory write");
        for c in &self.cells {
            cells
                .write_record([
                    c.mode.label().to_string(),
                    c.language.code().to_string(),
                    c.class.label().to_string(),
                    c.correct.to_string(),
                    c.total.to_string(),
                    c.accuracy().map(|a| format!("{a:.6}")).unwrap_or_default(),
                ])
                .expect("in-memory write");
        }

        let mut matrix = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["mode", "language", "true_class"].map(String::from).to_vec();
        header.extend(ActionClass::ALL.iter().map(|c| c.label().to_string()));
        header.push("no_class".into());
        matrix.write_record(&header).expect("in-memory write");
        for m in &self.confusion {
            for class in ActionClass::ALL {
                let mut row = vec![
                    m.mode.label().to_string(),
                    m.language.code().to_string(),
                    class.label().to_string(),
                ];
                row.extend(m.counts[class.index()].iter().map(u64::to_string));
                matrix.write_record(&row).expect("in-memory write");
            }
        }

        let mut out = String::from_utf8(cells.into_inner().expect("flush")).expect("utf-8");
        out.push('\n');
        out.push_str(&String::from_utf8(matrix.into_inner().expect("flush")).expect("utf-8"));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// `.csv` selects CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

pub fn emit_report(
    report: &EvaluationReport,
    format: ReportFormat,
    destination: impl AsRef<Path>,
) -> std::io::Result<()> {
    let body = match format {
        ReportFormat::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        ReportFormat::Csv => report.to_csv(),
    };
    std::fs::write(destination, body)
}

/// Accumulates predictions and produces an [`EvaluationReport`].
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    provider_id: String,
    modes: Vec<MatchMode>,
    matrices: BTreeMap<(MatchMode, Language), ConfusionMatrix>,
    groups: BTreeMap<(MatchMode, Language, String), (u64, u64)>,
    failures: BTreeMap<Language, u64>,
}

impl ReportBuilder {
    pub(crate) fn new(provider_id: &str, modes: &[MatchMode]) -> Self {
        let mut matrices = BTreeMap::new();
        for &mode in modes {
            for language in Language::ALL {
                matrices.insert((mode, language), ConfusionMatrix::new(mode, language));
            }
        }
        Self {
            provider_id: provider_id.to_string(),
            modes: modes.to_vec(),
            matrices,
            groups: BTreeMap::new(),
            failures: Language::ALL.into_iter().map(|l| (l, 0)).collect(),
        }
    }

    pub(crate) fn record(
        &mut self,
        mode: MatchMode,
        language: Language,
        truth: ActionClass,
        predicted: Option<ActionClass>,
        group: Option<&str>,
    ) {
        self.matrices
            .get_mut(&(mode, language))
            .expect("mode registered")
            .record(truth, predicted);
        if let Some(g) = group {
            let slot = self.groups.entry((mode, language, g.to_string())).or_default();
            slot.0 += u64::from(predicted == Some(truth));
            slot.1 += 1;
        }
    }

    pub(crate) fn record_failure(&mut self, language: Language) {
        *self.failures.entry(language).or_default() += 1;
    }

    pub(crate) fn finish(self) -> EvaluationReport {
        let mut cells = Vec::new();
        let mut overall = Vec::new();
        let mut group_means = Vec::new();
        for &mode in &self.modes {
            for language in Language::ALL {
                let m = &self.matrices[&(mode, language)];
                for class in ActionClass::ALL {
                    cells.push(CellTally {
                        mode,
                        language,
                        class,
                        correct: m.counts[class.index()][class.index()],
                        total: m.row_total(class),
                    });
                }
            }
            for scope in Scope::ALL {
                let (correct, total) = Language::ALL
                    .into_iter()
                    .filter(|l| scope.admits(*l))
                    .map(|l| &self.matrices[&(mode, l)])
                    .fold((0, 0), |(c, t), m| (c + m.diagonal(), t + m.total()));
                overall.push(OverallAccuracy {
                    mode,
                    scope,
                    correct,
                    total,
                    accuracy: accuracy(correct, total),
                });

                let accs: Vec<f64> = self
                    .groups
                    .iter()
                    .filter(|((m, l, _), _)| *m == mode && scope.admits(*l))
                    .filter_map(|(_, (c, t))| accuracy(*c, *t))
                    .collect();
                group_means.push(GroupMean {
                    mode,
                    scope,
                    groups: accs.len() as u64,
                    mean_accuracy: (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64),
                });
            }
        }
        let groups = self
            .groups
            .into_iter()
            .map(|((mode, language, group), (correct, total))| GroupAccuracy {
                mode,
                language,
                group,
                correct,
                total,
                accuracy: accuracy(correct, total),
            })
            .collect();
        EvaluationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            provider_id: self.provider_id,
            modes: self.modes,
            cells,
            confusion: self.matrices.into_values().collect(),
            overall,
            groups,
            group_means,
            provider_failures: self.failures,
        }
    }
}
