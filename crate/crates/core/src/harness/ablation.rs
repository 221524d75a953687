//! Feature-group ablation in the layout of a results table: one row per
//! group combination, absolute rows for single groups and incremental rows
//! (bracket notation such as `(1, 3 & 6)`) for combinations.
//!
//! Groups are addressed by table number:
//!
//! | # | groups            |
//! |---|-------------------|
//! | 1 | cooc              |
//! | 2 | offset            |
//! | 3 | offset + concat   |
//! | 4 | offset (alias)    |
//! | 5 | offset + concat (alias) |
//! | 6 | jobim             |
//! | 7 | patterns          |
//!
//! 4 and 5 exist so a run over a second embedding file can keep that
//! file's numbering. A combination may also be written as group names
//! joined with `+`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbt::{train, GbtParams};
use crate::harness::dataset::Dataset;
use crate::harness::features::{FeatureRegistry, GroupMask, Resources};
use crate::harness::metrics::evaluate;

/// Table rows for a single embedding file.
pub const TABLE_COMBOS: &str = "1;2;3;6;7;1&3;1&6;1,3&6;1,3,6&7";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combo {
    pub label: String,
    pub mask: GroupMask,
    pub incremental: bool,
}

fn numbered_group(n: u8) -> Option<&'static [&'static str]> {
    Some(match n {
        1 => &["cooc"],
        2 | 4 => &["offset"],
        3 | 5 => &["offset", "concat"],
        6 => &["jobim"],
        7 => &["patterns"],
        _ => return None,
    })
}

fn bracket_label(ids: &[u8]) -> String {
    match ids {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => {
            let head: Vec<String> = init.iter().map(u8::to_string).collect();
            format!("{} & {last}", head.join(", "))
        }
    }
}

impl Combo {
    /// `1`, `1&3`, `1,3&6`, or names such as `cooc+jobim`.
    pub fn parse(s: &str) -> Result<Combo> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty combination".into()));
        }
        if s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, ',' | '&' | ' '))
        {
            let mut ids = Vec::new();
            for part in s.split([',', '&']).map(str::trim).filter(|p| !p.is_empty()) {
                let n: u8 = part
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad group number {part:?}")))?;
                if numbered_group(n).is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "no feature group numbered {n}"
                    )));
                }
                if !ids.contains(&n) {
                    ids.push(n);
                }
            }
            let mask = GroupMask::new(ids.iter().flat_map(|&n| numbered_group(n).unwrap().iter()));
            return Ok(Combo {
                label: bracket_label(&ids),
                incremental: ids.len() > 1,
                mask,
            });
        }
        let mask = GroupMask::parse(s);
        Ok(Combo {
            label: mask.names().collect::<Vec<_>>().join(" & "),
            incremental: mask.names().count() > 1,
            mask,
        })
    }

    /// Semicolon-separated list of combinations.
    pub fn parse_list(s: &str) -> Result<Vec<Combo>> {
        s.split(';')
            .filter(|p| !p.trim().is_empty())
            .map(Combo::parse)
            .collect()
    }

    pub fn display_label(&self) -> String {
        if self.incremental {
            format!("({})", self.label)
        } else {
            self.label.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub kind: &'static str,
    pub combo: String,
    pub groups: String,
    pub width: usize,
    pub macro_f1: f64,
    pub positive_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationReport {
    pub train: String,
    pub test: String,
    pub train_rows: usize,
    pub test_rows: usize,
    pub rows: Vec<AblationRow>,
}

pub fn ablation_table(
    train_set: &Dataset,
    test_set: &Dataset,
    combos: &[Combo],
    resources: &Resources,
    params: &GbtParams,
) -> Result<AblationReport> {
    let registry = FeatureRegistry::default();
    let ytr = train_set.labels()?;
    let yte = test_set.labels()?;
    let mut rows = Vec::with_capacity(combos.len());
    for combo in combos {
        let pipeline = registry.pipeline(&combo.mask, resources)?;
        let model = train(&pipeline.matrix(&train_set.triples), &ytr, params)?;
        let pred = model.predict_labels(&pipeline.matrix(&test_set.triples))?;
        let m = evaluate(&pred, &yte)?;
        rows.push(AblationRow {
            kind: if combo.incremental {
                "incremental"
            } else {
                "absolute"
            },
            combo: combo.display_label(),
            groups: pipeline
                .spans()
                .iter()
                .map(|s| s.name)
                .collect::<Vec<_>>()
                .join("+"),
            width: pipeline.width(),
            macro_f1: m.macro_f1,
            positive_f1: m.positive.f1,
        });
    }
    Ok(AblationReport {
        train: train_set.name.clone(),
        test: test_set.name.clone(),
        train_rows: train_set.len(),
        test_rows: test_set.len(),
        rows,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl AblationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,combo,groups,width,macro_f1,positive_f1\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{:.6}",
                r.kind,
                csv_field(&r.combo),
                r.groups,
                r.width,
                r.macro_f1,
                r.positive_f1
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} ({} rows) vs. {} ({} rows)\n",
            self.train, self.train_rows, self.test, self.test_rows
        );
        let cw = self
            .rows
            .iter()
            .map(|r| r.combo.len())
            .max()
            .unwrap_or(0)
            .max(5);
        let gw = self
            .rows
            .iter()
            .map(|r| r.groups.len())
            .max()
            .unwrap_or(0)
            .max(6);
        let _ = writeln!(
            out,
            "{:<11}  {:<cw$}  {:<gw$}  {:>7}  {:>6}  {:>6}",
            "kind", "combo", "groups", "# feat", "F1", "F1+"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<11}  {:<cw$}  {:<gw$}  {:>7}  {:>6.4}  {:>6.4}",
                r.kind, r.combo, r.groups, r.width, r.macro_f1, r.positive_f1
            );
        }
        out
    }
}
