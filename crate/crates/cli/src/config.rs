//! Experiment configuration: flat `key=value` files overridden by flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dfr_core::{problem_by_name, LossKind, Problem64, TrainConfig};

/// Everything one `run` needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub loss: LossKind,
    pub train: TrainConfig,
    /// Hidden widths; `None` keeps the problem's reference architecture.
    pub hidden_widths: Option<Vec<usize>>,
    pub out: PathBuf,
    pub svg: bool,
    pub solution_points: usize,
    pub resume: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(problem: &str, loss: LossKind) -> Result<Self> {
        let spec = load_problem(problem)?;
        Ok(Self {
            problem: problem.to_string(),
            loss,
            train: TrainConfig::for_problem(&spec, loss),
            hidden_widths: None,
            out: PathBuf::from("out"),
            svg: true,
            solution_points: if spec.dim() == 1 { 1000 } else { 100 },
            resume: None,
        })
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.train;
        match key {
            "loss" => {
                self.loss = parse(key, value)?;
                t.loss_kind = self.loss;
            }
            "n_train" => t.n_train = parse(key, value)?,
            "n_val" => t.n_val = parse(key, value)?,
            "max_iterations" => t.max_iterations = parse(key, value)?,
            "seed" => t.seed = parse(key, value)?,
            "initial_lr" => t.initial_lr = parse(key, value)?,
            "lr_up" => t.lr_up = parse(key, value)?,
            "lr_down" => t.lr_down = parse(key, value)?,
            "lr_min" => t.lr_min = parse(key, value)?,
            "lr_max" => t.lr_max = parse(key, value)?,
            "patience" => t.patience = parse(key, value)?,
            "early_stopping" => t.early_stopping = parse_bool(key, value)?,
            "log_every" => t.log_every = parse(key, value)?,
            "thin_log" => t.thin_log = parse_bool(key, value)?,
            "history_error_points" => t.history_error_points = parse(key, value)?,
            "hidden_widths" => {
                let w = value.split(',').map(|s| parse::<usize>(key, s.trim())).collect::<Result<Vec<_>>>()?;
                self.hidden_widths = Some(w);
            }
            "out" => self.out = PathBuf::from(value),
            "svg" => self.svg = parse_bool(key, value)?,
            "solution_points" => self.solution_points = parse(key, value)?,
            "resume" => self.resume = Some(PathBuf::from(value)),
            _ => bail!("unknown configuration key `{key}`"),
        }
        Ok(())
    }

    /// The problem with any architecture override applied.
    pub fn problem_spec(&self) -> Result<Problem64> {
        let mut p = load_problem(&self.problem)?;
        if let Some(w) = &self.hidden_widths {
            p.hidden_widths = w.clone();
        }
        Ok(p)
    }
}

pub fn load_problem(name: &str) -> Result<Problem64> {
    problem_by_name(name).map_err(|e| anyhow!(e))
}

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => bail!("invalid value `{value}` for `{key}`: expected true or false"),
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
        let k = k.trim().replace('-', "_");
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key `{k}`", i + 1);
        }
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Builds a configuration from file settings and flag overrides, flags last.
/// `problem` and `loss` are resolved first so the other keys refine the
/// problem's defaults.
pub fn build(file: &BTreeMap<String, String>, flags: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let pick = |k: &str| flags.get(k).or_else(|| file.get(k)).cloned();
    let problem = pick("problem").ok_or_else(|| anyhow!("no problem given; use --problem or a config file"))?;
    let loss: LossKind = parse("loss", &pick("loss").unwrap_or_else(|| "dfr".into()))?;
    let mut cfg = ExperimentConfig::new(&problem, loss)?;
    for source in [file, flags] {
        for (k, v) in source {
            if k != "problem" && k != "loss" {
                cfg.set(k, v)?;
            }
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = parse_config_text("problem = mp2\nloss=vpinn\nseed=3 # comment\nmax-iterations=50\n").unwrap();
        let mut flags = BTreeMap::new();
        flags.insert("seed".to_string(), "9".to_string());
        let cfg = build(&file, &flags).unwrap();
        assert_eq!(cfg.problem, "mp2");
        assert_eq!(cfg.loss, LossKind::Vpinn);
        assert_eq!(cfg.train.seed, 9);
        assert_eq!(cfg.train.max_iterations, 50);
    }

    #[test]
    fn problem_defaults_follow_the_problem() {
        let cfg = build(&parse_config_text("problem=mp5").unwrap(), &BTreeMap::new()).unwrap();
        assert!(cfg.train.early_stopping);
        let cfg = build(&parse_config_text("problem=mp1").unwrap(), &BTreeMap::new()).unwrap();
        assert!(!cfg.train.early_stopping);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("a=1\na=2").is_err());
        assert!(build(&parse_config_text("problem=mp9").unwrap(), &BTreeMap::new()).is_err());
        assert!(build(&parse_config_text("problem=mp1\nbogus=1").unwrap(), &BTreeMap::new()).is_err());
        assert!(build(&parse_config_text("problem=mp1\nseed=-1").unwrap(), &BTreeMap::new()).is_err());
    }
}
