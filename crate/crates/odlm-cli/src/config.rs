//! Run configuration: flat `key = value` files with command-line overrides.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use odlm::{NeuronParams, WeightForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueueChoice {
    Naive,
    Memopt,
    Oracle,
}

impl QueueChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(QueueChoice::Naive),
            "memopt" => Ok(QueueChoice::Memopt),
            "oracle" => Ok(QueueChoice::Oracle),
            other => Err(format!("unknown queue {other:?}: expected naive, memopt or oracle")),
        }
    }
}

impl fmt::Display for QueueChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueueChoice::Naive => "naive",
            QueueChoice::Memopt => "memopt",
            QueueChoice::Oracle => "oracle",
        })
    }
}

/// Everything a segmentation run needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub image: Option<PathBuf>,
    pub out: PathBuf,
    pub stats: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub duration_ms: f64,
    pub seed: u64,
    pub queue: QueueChoice,
    pub eps_ticks: u64,
    pub params: NeuronParams,
    pub weight_form: WeightForm,
    pub accounting: bool,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            image: None,
            out: PathBuf::from("segments.ppm"),
            stats: None,
            trace: None,
            duration_ms: 200.0,
            seed: 1,
            queue: QueueChoice::Naive,
            eps_ticks: 64,
            params: NeuronParams::default(),
            weight_form: WeightForm::Thresholded,
            accounting: false,
            timing: false,
        }
    }
}

impl RunConfig {
    /// Overlay `key = value` lines from a config file. Later lines win;
    /// command-line flags are applied after this and win over everything.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("bad value for {key}: {value:?}"))
        }
        match key {
            "image" => self.image = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "stats" => self.stats = Some(PathBuf::from(value)),
            "trace" => self.trace = Some(PathBuf::from(value)),
            "duration_ms" => self.duration_ms = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "queue" => self.queue = QueueChoice::parse(value)?,
            "eps_ticks" => self.eps_ticks = num(key, value)?,
            "i0" => self.params.i0 = num(key, value)?,
            "tau" => self.params.tau = num(key, value)?,
            "p_theta" => self.params.p_theta = num(key, value)?,
            "w_max" => self.params.w_max = num(key, value)?,
            "alpha" => self.params.alpha = num(key, value)?,
            "delta" => self.params.delta = num(key, value)?,
            "weight_form" => {
                self.weight_form = match value {
                    "thresholded" => WeightForm::Thresholded,
                    "literal" => WeightForm::Literal,
                    other => return Err(format!("bad weight_form {other:?}")),
                }
            }
            "accounting" => self.accounting = bool_of(key, value)?,
            "timing" => self.timing = bool_of(key, value)?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.duration_ms < 0.0 {
            return Err("duration_ms must be non-negative".into());
        }
        self.params.validate().map_err(|e| e.to_string())
    }
}

fn bool_of(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "1" | "on" => Ok(true),
        "false" | "0" | "off" => Ok(false),
        other => Err(format!("bad boolean for {key}: {other:?}")),
    }
}
