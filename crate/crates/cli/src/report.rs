use std::path::Path;
use std::time::Instant;

use grpd_core::Error;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// What a run did: the command, its inputs, every check and the result.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<Check>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

/// Collects inputs and checks while a command runs.
pub struct Ctx {
    pub seed: u64,
    timing: bool,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<Check>,
}

/// The result of a check body: `Ok(None)` passes, `Ok(Some(w))` fails
/// with witness `w`, `Err` aborts the command.
pub type CheckResult = grpd_core::Result<Option<String>>;

impl Ctx {
    pub fn new(seed: u64, timing: bool) -> Self {
        Ctx { seed, timing, inputs: Vec::new(), checks: Vec::new() }
    }

    /// Records the SHA-256 digest of an input file.
    pub fn input(&mut self, path: &Path) -> grpd_core::Result<()> {
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    fn elapsed(&self, start: Instant) -> Option<f64> {
        self.timing.then(|| start.elapsed().as_secs_f64() * 1e3)
    }

    pub fn check(&mut self, name: impl Into<String>, body: impl FnOnce() -> CheckResult) -> grpd_core::Result<bool> {
        self.check_with_detail(name, || body().map(|w| (w, None)))
    }

    pub fn check_with_detail(
        &mut self,
        name: impl Into<String>,
        body: impl FnOnce() -> grpd_core::Result<(Option<String>, Option<String>)>,
    ) -> grpd_core::Result<bool> {
        let start = Instant::now();
        let (witness, detail) = body()?;
        let passed = witness.is_none();
        self.checks.push(Check {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            witness,
            detail,
            millis: self.elapsed(start),
        });
        Ok(passed)
    }

    /// Runs a fallible step as a check. Input errors propagate; any other
    /// error becomes a failed check with the error as witness.
    pub fn validate<T>(&mut self, name: impl Into<String>, body: impl FnOnce() -> grpd_core::Result<T>) -> grpd_core::Result<Option<T>> {
        let start = Instant::now();
        let (value, witness) = match body() {
            Ok(v) => (Some(v), None),
            Err(e) if e.is_input_error() => return Err(e),
            Err(e) => (None, Some(e.to_string())),
        };
        self.checks.push(Check {
            name: name.into(),
            status: if value.is_some() { Status::Pass } else { Status::Fail },
            witness,
            detail: None,
            millis: self.elapsed(start),
        });
        Ok(value)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn timing(&self) -> bool {
        self.timing
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }
}
