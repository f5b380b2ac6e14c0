//! Line-delimited machine-readable run reports. Given equal inputs and
//! seed, records are byte-identical except for `timing` records, which
//! consumers filter out when comparing runs.

use std::io::Write;

use serde::Serialize;

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Meta {
        command: String,
        input_digest: String,
        seed: u64,
        params: serde_json::Value,
    },
    Homology {
        degree: usize,
        betti: i64,
        torsion: Vec<String>,
    },
    Check {
        suite: String,
        item: String,
        status: String,
        detail: serde_json::Value,
    },
    Summary {
        passed: usize,
        failed: usize,
    },
    Timing {
        seconds: f64,
    },
}

#[derive(Default)]
pub struct RunReport {
    pub records: Vec<Record>,
}

impl RunReport {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn failed(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r, Record::Check { status, .. } if status == "fail"))
            .count()
    }

    pub fn finish(&mut self) {
        let passed = self
            .records
            .iter()
            .filter(|r| matches!(r, Record::Check { status, .. } if status == "pass"))
            .count();
        let failed = self.failed();
        self.push(Record::Summary { passed, failed });
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        for r in &self.records {
            let line = serde_json::to_string(r).expect("serializable record");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

pub fn digest(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("sha256:{}", hex::encode(hasher.finalize()))
}
