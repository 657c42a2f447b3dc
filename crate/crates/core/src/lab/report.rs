use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cmp {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

/// One pass/fail decision with the metric and threshold behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub label: String,
    pub metric: String,
    pub value: f64,
    pub cmp: Cmp,
    pub threshold: f64,
    pub passed: bool,
    /// Signed distance to the threshold, positive when passing.
    pub margin: f64,
}

impl Verdict {
    pub fn new(label: &str, metric: &str, value: f64, cmp: Cmp, threshold: f64) -> Self {
        let (passed, margin) = match cmp {
            Cmp::Le => (value <= threshold, threshold - value),
            Cmp::Lt => (value < threshold, threshold - value),
            Cmp::Ge => (value >= threshold, value - threshold),
            Cmp::Gt => (value > threshold, value - threshold),
        };
        Self { label: label.into(), metric: metric.into(), value, cmp, threshold, passed, margin }
    }

    /// A boolean property, recorded as value 1 (holds) or 0.
    pub fn holds(label: &str, metric: &str, ok: bool) -> Self {
        Self::new(label, metric, if ok { 1.0 } else { 0.0 }, Cmp::Ge, 1.0)
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {}: {} = {:.6e} {} {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.metric,
            self.value,
            self.cmp.symbol(),
            self.threshold
        )
    }
}

/// Column-named numeric table.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(|x| x.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub metrics: Table,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub config_hash: String,
    pub seed: u64,
}

impl Report {
    pub fn new(experiment: &str, metrics: Table, config_hash: String, seed: u64) -> Self {
        Self { experiment: experiment.into(), metrics, verdicts: vec![], notes: vec![], config_hash, seed }
    }

    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn write_verdicts_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["label", "metric", "value", "cmp", "threshold", "passed", "margin"])?;
        for v in &self.verdicts {
            wr.write_record([
                v.label.clone(),
                v.metric.clone(),
                v.value.to_string(),
                v.cmp.symbol().to_string(),
                v.threshold.to_string(),
                v.passed.to_string(),
                v.margin.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Writes `<experiment>.csv` and `<experiment>_verdicts.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.metrics.write_csv(std::fs::File::create(dir.join(format!("{}.csv", self.experiment)))?)?;
        self.write_verdicts_csv(std::fs::File::create(dir.join(format!("{}_verdicts.csv", self.experiment)))?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_margins() {
        let v = Verdict::new("ratio", "e2/e1", 0.5, Cmp::Le, 0.7);
        assert!(v.passed && (v.margin - 0.2).abs() < 1e-15);
        let v = Verdict::new("slope", "s", 0.4, Cmp::Ge, 0.5);
        assert!(!v.passed && v.margin < 0.0);
        assert!(v.line().starts_with("[FAIL] slope"));
        assert!(Verdict::new("x", "x", 1.0, Cmp::Lt, 1.0).margin == 0.0);
        assert!(!Verdict::new("x", "x", 1.0, Cmp::Lt, 1.0).passed);
    }

    #[test]
    fn report_needs_verdicts_and_writes_csv() {
        let mut t = Table::new(&["eps", "error"]);
        t.push(vec![0.1, 0.02]);
        let mut r = Report::new("demo", t, "abc".into(), 0);
        assert!(!r.passed());
        r.verdict(Verdict::holds("ok", "flag", true));
        assert!(r.passed());
        let dir = tempfile::tempdir().unwrap();
        r.write(dir.path()).unwrap();
        let s = std::fs::read_to_string(dir.path().join("demo.csv")).unwrap();
        assert_eq!(s, "eps,error\n0.1,0.02\n");
        let v = std::fs::read_to_string(dir.path().join("demo_verdicts.csv")).unwrap();
        assert!(v.starts_with("label,metric,value,cmp,threshold,passed,margin\nok,flag,1,>=,1,true,0\n"));
    }
}
