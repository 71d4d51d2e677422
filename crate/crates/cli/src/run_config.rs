//! Resolved command settings, written at the top of every output file.
//!
//! Output directory, cache directory and worker count are left out: they do
//! not change results, and keeping them out lets two runs into different
//! directories produce identical files.

use std::fmt::Display;

#[derive(Clone, Debug)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64) -> Self {
        RunConfig {
            entries: vec![
                ("tool".into(), format!("preprank {}", env!("CARGO_PKG_VERSION"))),
                ("command".into(), command.into()),
                ("seed".into(), seed.to_string()),
            ],
        }
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    /// `key=value` lines, no prefix.
    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().map(|(k, v)| format!("{k}={v}")).collect()
    }

    /// The lines as `# `-prefixed comments, newline-terminated.
    pub fn header(&self) -> String {
        self.lines().iter().map(|l| format!("# {l}\n")).collect()
    }
}
