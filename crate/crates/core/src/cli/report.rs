//! Run reports: JSON schema, human-readable rendering and CSV emission.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::spec_file::SpecFile;
use crate::existence::{ConditionReport, DualityData, HierarchyReport};
use crate::freeboundary::{Functional, RootResult, ScanTable, SweepTable};
use crate::ledger::{IdentityCheck, Verdict};

pub const REPORT_SCHEMA: &str = "odvp.run-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproductionRow {
    pub quantity: String,
    pub computed: f64,
    /// Computed value at the precision of `reference`.
    pub shown: String,
    /// Published figure, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub functional: Functional,
    pub rho_from: f64,
    pub rho_to: f64,
    pub steps: usize,
    pub sign_changes: Vec<(f64, f64)>,
    pub zeros: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ScanSummary {
    pub fn new(table: &ScanTable, out: Option<String>) -> Self {
        let first = table.samples.first().map_or(f64::NAN, |s| s.rho);
        let last = table.samples.last().map_or(f64::NAN, |s| s.rho);
        Self {
            functional: table.functional,
            rho_from: first,
            rho_to: last,
            steps: table.samples.len(),
            sign_changes: table.sign_changes.clone(),
            zeros: table.zeros.clone(),
            out,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub item: String,
    pub error: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReportItem {
    Condition(ConditionReport),
    Root(RootResult),
    Identity(IdentityCheck),
    Hierarchy(HierarchyReport),
    Duality(DualityData),
    Scan(ScanSummary),
    Sweep(SweepTable),
    Reproduction(ReproductionRow),
    Failure(ItemFailure),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecFile>,
    pub results: Vec<ReportItem>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, spec: Option<SpecFile>) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            command: command.to_string(),
            spec,
            results: Vec::new(),
            warnings: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn push(&mut self, item: ReportItem) {
        self.results.push(item);
    }

    pub fn warn(&mut self, text: impl Into<String>) {
        self.warnings.push(text.into());
    }

    /// Exit status implied by the items: the largest failure code, or 2 when
    /// an existence condition fails, else 0.
    pub fn exit_code(&self) -> i32 {
        // The case study deliberately exhibits a failing B condition.
        let exhibit = self.command == "reproduce-s8";
        self.results
            .iter()
            .map(|item| match item {
                ReportItem::Failure(f) => f.exit_code,
                ReportItem::Condition(c) if !c.holds && !exhibit => 2,
                ReportItem::Identity(c) if c.verdict == Verdict::Fail => 4,
                ReportItem::Reproduction(r) if r.matches == Some(false) => 4,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize to JSON")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "odvp {}", self.command);
        if let Some(spec) = &self.spec {
            let _ = writeln!(
                s,
                "  N = {}, R = {}, rho_max = {}",
                spec.dimension, spec.core_radius, spec.rho_max
            );
        }
        for item in &self.results {
            render_item(&mut s, item);
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(s, "elapsed: {ms:.3} ms");
        }
        s
    }
}

/// Serialized name of a unit enum value, as it appears in JSON reports.
fn id<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::from("?"),
    }
}

fn render_item(s: &mut String, item: &ReportItem) {
    match item {
        ReportItem::Condition(c) => {
            let _ = writeln!(
                s,
                "{}: lhs = {:.10} rhs = {:.10} margin = {:.6e} -> {}",
                id(&c.condition_id),
                c.lhs,
                c.rhs,
                c.margin,
                if c.holds { "holds" } else { "fails" }
            );
            for a in &c.annotations {
                let _ = writeln!(s, "    {a}");
            }
        }
        ReportItem::Root(r) => {
            let _ = writeln!(
                s,
                "critical radius R* = {:.12} ({}, {})",
                r.critical_radius,
                id(&r.problem),
                id(&r.method)
            );
            let _ = writeln!(
                s,
                "    residual {:.3e} (scale {:.6}), bracket [{:.15}, {:.15}], {} iterations",
                r.residual, r.scale, r.bracket.0, r.bracket.1, r.iterations
            );
            let _ = writeln!(s, "    pointwise check {:.3e}", r.pointwise_check);
            if let Some(m) = &r.mass_identity {
                let _ = writeln!(
                    s,
                    "    int u over B_R* = {:.12}, predicted {:.12}, residual {:.3e}",
                    m.lhs, m.rhs, m.residual
                );
            }
            let _ = writeln!(s, "    {}", r.multiplicity_note.text);
        }
        ReportItem::Identity(c) => {
            let _ = writeln!(
                s,
                "{}: lhs = {:.12} rhs = {:.12} residual = {:.3e} ({}) -> {}",
                id(&c.check_id),
                c.lhs,
                c.rhs,
                c.residual,
                id(&c.relation),
                id(&c.verdict)
            );
            for n in &c.notes {
                let _ = writeln!(s, "    {n}");
            }
        }
        ReportItem::Hierarchy(h) => {
            let _ = writeln!(s, "hierarchy: c_QS = {:.10}, c_B = {:.10}", h.c_qs, h.c_b);
            if let Some(r) = h.ratio {
                let _ = writeln!(s, "    ratio c_QS / c_B = {r:.10}");
            }
            for a in &h.annotations {
                let _ = writeln!(s, "    {a}");
            }
        }
        ReportItem::Duality(d) => {
            let _ = writeln!(
                s,
                "duality: g_1 = {:.10} sqrt g, g_2 = {:.10} sqrt g (on the core boundary {:.10}, {:.10})",
                d.g1_factor, d.g2_factor, d.g1_at_core, d.g2_at_core
            );
            for r in [&d.b_condition, &d.qs_f_g1, &d.qs_uc_g2] {
                render_item(s, &ReportItem::Condition(r.clone()));
            }
        }
        ReportItem::Scan(t) => {
            let _ = writeln!(
                s,
                "scan of {} on [{}, {}] with {} points",
                t.functional.name(),
                t.rho_from,
                t.rho_to,
                t.steps
            );
            for (a, b) in &t.sign_changes {
                let _ = writeln!(s, "    sign change in [{a:.12}, {b:.12}]");
            }
            for z in &t.zeros {
                let _ = writeln!(s, "    zero at {z:.12}");
            }
            if let Some(out) = &t.out {
                let _ = writeln!(s, "    written to {out}");
            }
        }
        ReportItem::Sweep(t) => {
            let _ = writeln!(s, "sweep of {} over {}", id(&t.problem), id(&t.knob));
            for row in &t.rows {
                let radius = row
                    .critical_radius
                    .map_or_else(|| "-".to_string(), |r| format!("{r:.12}"));
                let margin = row
                    .margin
                    .map_or_else(|| "-".to_string(), |m| format!("{m:.6e}"));
                let _ = write!(
                    s,
                    "    {:<12} R* = {radius:<16} margin = {margin}",
                    row.value
                );
                if let Some(e) = &row.error {
                    let _ = write!(s, "  ({e})");
                }
                s.push('\n');
            }
            if let Some(m) = t.modulus {
                let _ = writeln!(s, "    continuity modulus max |dR*/dk| = {m:.6}");
            }
        }
        ReportItem::Reproduction(r) => {
            let status = match r.matches {
                Some(true) => "ok",
                Some(false) => "MISMATCH",
                None => "",
            };
            let _ = writeln!(
                s,
                "{:<44} {:<16} {:<12} {status}",
                r.quantity,
                r.shown,
                r.reference.as_deref().unwrap_or("")
            );
        }
        ReportItem::Failure(f) => {
            let _ = writeln!(s, "{}: error: {}", f.item, f.error);
        }
    }
}

/// A double with 17 significant digits, enough to round-trip exactly.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_cell(x: Option<f64>) -> String {
    x.map(csv_number).unwrap_or_default()
}

pub fn scan_csv(table: &ScanTable) -> String {
    let mut s = String::from("rho,value,derivative\n");
    for p in &table.samples {
        let _ = writeln!(
            s,
            "{},{},{}",
            csv_number(p.rho),
            csv_number(p.value),
            csv_number(p.derivative)
        );
    }
    s
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s = String::from("knob,critical_radius,margin\n");
    for row in &table.rows {
        let _ = writeln!(
            s,
            "{},{},{}",
            csv_number(row.value),
            csv_cell(row.critical_radius),
            csv_cell(row.margin)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_round_trip() {
        for x in [
            1.0 / 3.0,
            1.717_715_123_456_789,
            -2.5e-300,
            0.0,
            4.0 * std::f64::consts::PI / 45.0,
        ] {
            let s = csv_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains(','));
        }
    }

    #[test]
    fn failure_sets_exit_code() {
        let mut r = RunReport::new("check", None);
        assert_eq!(r.exit_code(), 0);
        r.push(ReportItem::Failure(ItemFailure {
            item: "x".into(),
            error: "y".into(),
            exit_code: 4,
        }));
        assert_eq!(r.exit_code(), 4);
    }

    #[test]
    fn every_item_kind_round_trips() {
        let spec = crate::model::ProblemSpec::unit_ball_constant(0.005);
        let mut r = RunReport::new("verify", Some(SpecFile::from_spec(&spec)));
        r.push(ReportItem::Identity(
            crate::ledger::check_green(&spec, 1.5).unwrap(),
        ));
        r.push(ReportItem::Condition(
            crate::existence::check_b(&spec).unwrap(),
        ));
        r.push(ReportItem::Duality(
            crate::existence::duality_data(&spec).unwrap(),
        ));
        r.warn("w");
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
