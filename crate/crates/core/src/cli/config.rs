use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::harness::{BottomCase, GrowthProfile, Slope, WedgeModel};

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Converge,
    Wedge,
    Growth,
    Solve,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Converge => "converge",
            Experiment::Wedge => "wedge",
            Experiment::Growth => "growth",
            Experiment::Solve => "solve",
        })
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "converge" => Ok(Experiment::Converge),
            "wedge" => Ok(Experiment::Wedge),
            "growth" => Ok(Experiment::Growth),
            "solve" => Ok(Experiment::Solve),
            _ => Err(format!("unknown experiment '{s}'")),
        }
    }
}

/// Solver family named by the `model` key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Wedge(WedgeModel),
    ParabolicDissipative,
    ParabolicReactive,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Wedge(m) => m.fmt(f),
            Model::ParabolicDissipative => f.write_str("parabolic-dissipative"),
            Model::ParabolicReactive => f.write_str("parabolic-reactive"),
        }
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "parabolic-dissipative" => Ok(Model::ParabolicDissipative),
            "parabolic-reactive" => Ok(Model::ParabolicReactive),
            _ => s.parse::<WedgeModel>().map(Model::Wedge).map_err(|_| {
                format!("unknown model '{s}' (expected N, AK, IFDP, parabolic-dissipative or parabolic-reactive)")
            }),
        }
    }
}

/// Validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub models: Vec<Model>,
    pub params: Params,
    /// Non-fatal remarks attached during validation.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Converge {
        case: BottomCase,
        /// `1/h` per level.
        levels: Vec<usize>,
    },
    Wedge {
        direction: Slope,
        elements: usize,
        steps: usize,
        depth_m: Option<f64>,
        range_m: f64,
        sample_every: usize,
        growth_limit: f64,
    },
    Growth {
        profiles: Vec<GrowthProfile>,
        elements: usize,
    },
    Solve {
        case: BottomCase,
        elements: usize,
        steps: usize,
    },
}

/// A diagnostic tied to a line of the config file (`0` when no line applies).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            0 => f.write_str(&self.message),
            n => write!(f, "line {n}: {}", self.message),
        }
    }
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            message: message.into(),
        }
    }
}

/// Keys accepted in each section. Keys before the first header belong to `run`.
const SECTIONS: &[(&str, &[&str])] = &[
    ("run", &["experiment", "model"]),
    ("mesh", &["h", "k", "steps"]),
    ("converge", &["case", "levels"]),
    (
        "wedge",
        &[
            "direction",
            "depth_m",
            "range_m",
            "sample_every",
            "growth_limit",
        ],
    ),
    ("growth", &["profiles"]),
    ("solve", &["case"]),
];

struct Entry {
    line: usize,
    value: String,
}

struct Table {
    entries: Vec<((String, String), Entry)>,
    /// Section name and the line of its first header.
    headers: Vec<(String, usize)>,
}

impl Table {
    /// A required key is absent: points at the section header, or at no line.
    fn missing(&self, section: &str, key: &str, what: &str) -> ConfigError {
        let line = self
            .headers
            .iter()
            .find(|(s, _)| s == section)
            .map_or(0, |&(_, l)| l);
        ConfigError::new(line, format!("missing [{section}] {key}{what}"))
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|((s, k), _)| s == section && k == key)
            .map(|(_, e)| e)
    }

    fn parse<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<(usize, T)>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(|v| Some((e.line, v)))
                .map_err(|err| ConfigError::new(e.line, format!("{key}: {err}"))),
        }
    }

    fn list<T: FromStr>(
        &self,
        section: &str,
        key: &str,
    ) -> Result<Option<(usize, Vec<T>)>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        let items = e
            .value
            .split(',')
            .map(|s| s.trim().parse::<T>())
            .collect::<Result<Vec<T>, _>>()
            .map_err(|err| ConfigError::new(e.line, format!("{key}: {err}")))?;
        if items.is_empty() {
            return Err(ConfigError::new(e.line, format!("{key} must not be empty")));
        }
        Ok(Some((e.line, items)))
    }

    fn lexical(text: &str) -> Result<Self, ConfigError> {
        let mut section = "run".to_string();
        let mut entries: Vec<((String, String), Entry)> = Vec::new();
        let mut headers: Vec<(String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::new(line, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                if !headers.iter().any(|(s, _)| *s == section) {
                    headers.push((section.clone(), line));
                }
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                ConfigError::new(line, format!("expected key = value, got '{content}'"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let allowed = SECTIONS
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, k)| *k)
                .unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(ConfigError::new(
                    line,
                    format!("unknown key '{key}' in [{section}]"),
                ));
            }
            if let Some((_, prev)) = entries.iter().find(|((s, k), _)| *s == section && k == key) {
                return Err(ConfigError::new(
                    line,
                    format!("duplicate key '{key}' (first set on line {})", prev.line),
                ));
            }
            if value.is_empty() {
                return Err(ConfigError::new(line, format!("{key} has no value")));
            }
            entries.push((
                (section.clone(), key.to_string()),
                Entry {
                    line,
                    value: value.to_string(),
                },
            ));
        }
        Ok(Table { entries, headers })
    }

    fn reject_sections_other_than(&self, keep: &[&str]) -> Result<(), ConfigError> {
        match self
            .entries
            .iter()
            .find(|((s, _), _)| !keep.contains(&s.as_str()))
        {
            Some(((s, k), e)) => Err(ConfigError::new(
                e.line,
                format!("key '{k}' in [{s}] does not apply to this experiment"),
            )),
            None => Ok(()),
        }
    }
}

/// Parses a config for `experiment` (the subcommand). A `[run] experiment` key,
/// when present, must agree.
pub fn parse_config(text: &str, experiment: Experiment) -> Result<RunConfig, ConfigError> {
    let table = Table::lexical(text)?;
    if let Some((line, e)) = table.parse::<Experiment>("run", "experiment")? {
        if e != experiment {
            return Err(ConfigError::new(
                line,
                format!("config is for '{e}' but '{experiment}' was requested"),
            ));
        }
    }
    let models_entry = table.list::<Model>("run", "model")?;
    let mut notes = Vec::new();

    let (models, params) = match experiment {
        Experiment::Converge => {
            table.reject_sections_other_than(&["run", "converge"])?;
            let models = default_models(models_entry, Model::Wedge(WedgeModel::N));
            single_model(
                &models,
                experiment,
                &[
                    Model::Wedge(WedgeModel::N),
                    Model::Wedge(WedgeModel::AK),
                    Model::ParabolicDissipative,
                    Model::ParabolicReactive,
                ],
                line_of(&table, "run", "model"),
            )?;
            let case = case_of(&table, "converge")?;
            let (line, levels) = table
                .list::<usize>("converge", "levels")?
                .ok_or_else(|| table.missing("converge", "levels", ""))?;
            if levels.contains(&0) {
                return Err(ConfigError::new(line, "h must be positive"));
            }
            if levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::new(line, "levels must refine strictly"));
            }
            (models, Params::Converge { case, levels })
        }
        Experiment::Wedge => {
            table.reject_sections_other_than(&["run", "mesh", "wedge"])?;
            let models = default_models(models_entry, Model::Wedge(WedgeModel::N));
            if let Some(m) = models.iter().find(|m| !matches!(m, Model::Wedge(_))) {
                return Err(ConfigError::new(
                    line_of(&table, "run", "model"),
                    format!("model '{m}' does not apply to wedge runs"),
                ));
            }
            let (dline, direction) = table
                .parse::<Slope>("wedge", "direction")?
                .ok_or_else(|| table.missing("wedge", "direction", " (environment)"))?;
            let t_max = direction.environment().t_max();
            let (elements, steps) = mesh_of(&table, t_max)?;
            if direction == Slope::Down && models.contains(&Model::Wedge(WedgeModel::N)) {
                notes.push(format!(
                    "line {dline}: model N on a downsloping bottom: analysis requires upsloping; the run may be flagged unstable"
                ));
            }
            let depth_m = positive(&table, "wedge", "depth_m")?;
            let range_m = positive(&table, "wedge", "range_m")?.unwrap_or(2200.0);
            let sample_every = match table.parse::<usize>("wedge", "sample_every")? {
                Some((line, 0)) => {
                    return Err(ConfigError::new(line, "sample_every must be at least 1"))
                }
                Some((_, n)) => n,
                None => 1,
            };
            let growth_limit = match positive(&table, "wedge", "growth_limit")? {
                Some(g) if g <= 1.0 => {
                    return Err(ConfigError::new(
                        line_of(&table, "wedge", "growth_limit"),
                        "growth_limit must exceed 1",
                    ))
                }
                Some(g) => g,
                None => 1e6,
            };
            (
                models,
                Params::Wedge {
                    direction,
                    elements,
                    steps,
                    depth_m,
                    range_m,
                    sample_every,
                    growth_limit,
                },
            )
        }
        Experiment::Growth => {
            table.reject_sections_other_than(&["run", "mesh", "growth"])?;
            let models = default_models(models_entry, Model::Wedge(WedgeModel::N));
            single_model(
                &models,
                experiment,
                &[Model::Wedge(WedgeModel::N)],
                line_of(&table, "run", "model"),
            )?;
            let (elements, steps) = mesh_of(&table, 1.0)?;
            if steps != elements {
                return Err(ConfigError::new(
                    line_of(&table, "mesh", "k"),
                    "growth runs use k = h",
                ));
            }
            let profiles = match table.list::<GrowthProfile>("growth", "profiles")? {
                Some((_, p)) => p,
                None => GrowthProfile::ALL.to_vec(),
            };
            (models, Params::Growth { profiles, elements })
        }
        Experiment::Solve => {
            table.reject_sections_other_than(&["run", "mesh", "solve"])?;
            let models = default_models(models_entry, Model::Wedge(WedgeModel::N));
            single_model(
                &models,
                experiment,
                &[
                    Model::Wedge(WedgeModel::N),
                    Model::Wedge(WedgeModel::AK),
                    Model::ParabolicDissipative,
                    Model::ParabolicReactive,
                ],
                line_of(&table, "run", "model"),
            )?;
            let case = case_of(&table, "solve")?;
            let (elements, steps) = mesh_of(&table, 1.0)?;
            if case == BottomCase::Downslope && models[0] == Model::Wedge(WedgeModel::N) {
                notes.push(format!(
                    "line {}: model N on a downsloping bottom: analysis requires upsloping",
                    line_of(&table, "solve", "case")
                ));
            }
            (
                models,
                Params::Solve {
                    case,
                    elements,
                    steps,
                },
            )
        }
    };
    Ok(RunConfig {
        experiment,
        models,
        params,
        notes,
    })
}

fn line_of(table: &Table, section: &str, key: &str) -> usize {
    table.get(section, key).map_or(0, |e| e.line)
}

fn default_models(entry: Option<(usize, Vec<Model>)>, default: Model) -> Vec<Model> {
    entry.map_or_else(|| vec![default], |(_, m)| m)
}

fn single_model(
    models: &[Model],
    experiment: Experiment,
    allowed: &[Model],
    line: usize,
) -> Result<(), ConfigError> {
    if models.len() != 1 {
        return Err(ConfigError::new(
            line,
            format!("{experiment} takes exactly one model"),
        ));
    }
    if !allowed.contains(&models[0]) {
        return Err(ConfigError::new(
            line,
            format!("model '{}' does not apply to {experiment} runs", models[0]),
        ));
    }
    Ok(())
}

fn case_of(table: &Table, section: &str) -> Result<BottomCase, ConfigError> {
    match table.parse::<u32>(section, "case")? {
        Some((line, c)) => BottomCase::from_index(c)
            .ok_or_else(|| ConfigError::new(line, format!("case must be 1, 2 or 3, got {c}"))),
        None => Ok(BottomCase::Linear),
    }
}

fn positive(table: &Table, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.parse::<f64>(section, key)? {
        Some((line, v)) if !(v > 0.0 && v.is_finite()) => {
            Err(ConfigError::new(line, format!("{key} must be positive")))
        }
        Some((_, v)) => Ok(Some(v)),
        None => Ok(None),
    }
}

/// `(elements, steps)` from `h` and either `k` (in units of the range variable) or `steps`.
/// `1/h` and `t_max/k` must be integers to a relative `1e-9`.
fn mesh_of(table: &Table, t_max: f64) -> Result<(usize, usize), ConfigError> {
    let h = positive(table, "mesh", "h")?.ok_or_else(|| table.missing("mesh", "h", ""))?;
    let elements = whole(1.0 / h)
        .ok_or_else(|| ConfigError::new(line_of(table, "mesh", "h"), "1/h must be an integer"))?;
    let k = positive(table, "mesh", "k")?;
    let steps = table.parse::<usize>("mesh", "steps")?;
    let steps = match (k, steps) {
        (Some(_), Some((line, _))) => {
            return Err(ConfigError::new(line, "give either k or steps, not both"))
        }
        (Some(k), None) => whole(t_max / k).ok_or_else(|| {
            ConfigError::new(
                line_of(table, "mesh", "k"),
                format!("k must divide the final range {t_max}"),
            )
        })?,
        (None, Some((line, 0))) => return Err(ConfigError::new(line, "k must be positive")),
        (None, Some((_, n))) => n,
        (None, None) => return Err(table.missing("mesh", "k", " or steps")),
    };
    Ok((elements, steps))
}

fn whole(x: f64) -> Option<usize> {
    let r = x.round();
    (r >= 1.0 && (x - r).abs() <= 1e-9 * r).then_some(r as usize)
}
