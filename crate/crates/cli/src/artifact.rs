//! Output files. Every file starts with the tool version, the seed and a
//! SHA-256 of the resolved run configuration.

use crate::error::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
}

impl Header {
    /// `config` is the resolved configuration; `inputs` are extra bytes that
    /// affect the run, such as model file contents.
    pub fn new(command: &str, seed: u64, config: &impl Serialize, inputs: &[&str]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update(serde_json::to_vec(config).expect("config serializes"));
        for i in inputs {
            hasher.update([0u8]);
            hasher.update(i.as_bytes());
        }
        Header {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_sha256: hex::encode(hasher.finalize()),
        }
    }

    fn comment(&self, prefix: &str) -> String {
        format!(
            "{prefix} {} {} | command {} | seed {} | config sha256 {}\n",
            self.tool, self.version, self.command, self.seed, self.config_sha256
        )
    }
}

pub struct Artifacts {
    dir: PathBuf,
    header: Header,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, header: Header) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
        Ok(Artifacts { dir: dir.to_path_buf(), header, written: Vec::new() })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn write(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(CliError::io(format!("writing {}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// CSV with `#` header lines.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let text = self.header.comment("#") + body;
        self.write(name, &text)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let text = self.header.comment("#") + body;
        self.write(name, &text)
    }

    /// JSON object `{"header": …, <fields of value>}`.
    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let mut map = serde_json::Map::new();
        map.insert("header".into(), serde_json::to_value(&self.header).expect("header serializes"));
        match serde_json::to_value(value).expect("report serializes") {
            serde_json::Value::Object(fields) => map.extend(fields),
            other => {
                map.insert("data".into(), other);
            }
        }
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("json") + "\n";
        self.write(name, &text)
    }

    /// Gnuplot script plotting columns of a CSV written alongside it.
    pub fn gnuplot(&mut self, name: &str, csv: &str, title: &str, columns: &[(usize, String)], logscale_y: bool) -> Result<PathBuf, CliError> {
        let mut s = String::from("set datafile separator ','\nset key outside\n");
        s.push_str(&format!("set title '{title}'\nset xlabel 't'\n"));
        if logscale_y {
            s.push_str("set logscale y\n");
        }
        let plots: Vec<String> =
            columns.iter().map(|(c, label)| format!("'{csv}' using 1:{c} every ::1 with lines title '{label}'")).collect();
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        self.text(name, &s)
    }
}
