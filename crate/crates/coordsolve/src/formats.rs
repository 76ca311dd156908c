//! JSON files for games, stages and table protocols.
//!
//! A game or stage file:
//!
//! ```json
//! { "choices": [3, 3], "winning": [[0, 0], [1, 1], [2, 2]], "history": [[0, 1]] }
//! ```
//!
//! Indices are 0-based; `n` (player count) and `history` are optional, and
//! `labels` may give per-player choice names.
//!
//! A table protocol file maps class keys (as printed by `classify`, or
//! `"initial"`) to per-player weights, players numbered from 1:
//!
//! ```json
//! { "entries": { "initial": { "1": { "0": "1/2", "1": "1/2" }, "2": { "2": 1 } } },
//!   "fallback": "wm" }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use coordsolve_core::protocols::{ProtocolSpec, TableProtocol};
use coordsolve_core::rational::parse_q;
use coordsolve_core::{Profile, Stage, WlcGame};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {msg}")]
    Content { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] coordsolve_core::Error),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub choices: Vec<usize>,
    pub winning: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

impl StageFile {
    pub fn from_stage(stage: &Stage) -> Self {
        let g = stage.game();
        Self {
            n: Some(g.n_players()),
            choices: g.counts().to_vec(),
            winning: g.winning().to_vec(),
            history: stage.history().iter().map(|p| p.0.clone()).collect(),
            labels: g.labels().map(<[_]>::to_vec),
        }
    }

    pub fn to_stage(&self) -> Result<Stage, String> {
        if let Some(n) = self.n {
            if n != self.choices.len() {
                return Err(format!("n = {n} but {} choice counts given", self.choices.len()));
            }
        }
        let mut game = WlcGame::new(self.choices.clone(), self.winning.clone()).map_err(|e| e.to_string())?;
        if let Some(labels) = &self.labels {
            game = game.with_labels(labels.clone()).map_err(|e| e.to_string())?;
        }
        let history = self.history.iter().map(|p| Profile(p.clone())).collect();
        Stage::with_history(Arc::new(game), history).map_err(|e| e.to_string())
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn load_stage(path: &Path) -> Result<Stage, FormatError> {
    let text = read(path)?;
    let file: StageFile = serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.to_owned(),
        source,
    })?;
    file.to_stage().map_err(|msg| FormatError::Content {
        path: path.to_owned(),
        msg,
    })
}

#[derive(Debug, Deserialize)]
struct TableFile {
    entries: BTreeMap<String, BTreeMap<String, BTreeMap<String, Value>>>,
    #[serde(default)]
    fallback: Option<String>,
}

fn weight_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub fn parse_table(text: &str, path: &Path) -> Result<ProtocolSpec, FormatError> {
    let content = |msg: String| FormatError::Content {
        path: path.to_owned(),
        msg,
    };
    let file: TableFile = serde_json::from_str(text).map_err(|source| FormatError::Json {
        path: path.to_owned(),
        source,
    })?;
    let mut table = TableProtocol::new();
    for (key, players) in &file.entries {
        for (player, weights) in players {
            let pl: usize = player
                .parse()
                .ok()
                .filter(|&p| p >= 1)
                .ok_or_else(|| content(format!("entry {key}: players are numbered from 1, got {player:?}")))?;
            let mut row = Vec::new();
            for (choice, w) in weights {
                let c: usize = choice
                    .parse()
                    .map_err(|_| content(format!("entry {key}: bad choice index {choice:?}")))?;
                let w = weight_text(w).ok_or_else(|| content(format!("entry {key}: weight must be a number or string")))?;
                row.push((c, parse_q(&w)?));
            }
            table.insert_q(key, pl - 1, &row);
        }
    }
    if let Some(f) = &file.fallback {
        let fb = ProtocolSpec::parse(f)?;
        table = table.with_fallback(fb);
    }
    Ok(ProtocolSpec::Table(Arc::new(table)))
}

pub fn load_table(path: &Path) -> Result<ProtocolSpec, FormatError> {
    parse_table(&read(path)?, path)
}
