//! Flat `key = value` experiment configs (a TOML subset; see `docs/config.md`).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use qapprox::{CompactRegion, GroupElement, GroupModel, Neighborhood, Side};
use toml::{Table, Value};

use crate::CliError;

pub struct Config {
    table: Table,
    dir: PathBuf,
    used: BTreeSet<String>,
}

fn bad(key: &str, what: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {what}"))
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, dir)
    }

    pub fn parse(text: &str, dir: PathBuf) -> Result<Self, CliError> {
        let table: Table = text.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table()) {
            return Err(bad(k, "nested tables are not part of the config grammar"));
        }
        Ok(Config { table, dir, used: BTreeSet::new() })
    }

    fn get(&mut self, key: &str) -> Option<&Value> {
        self.used.insert(key.to_string());
        self.table.get(key)
    }

    /// Errors on keys that no accessor asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        match self.table.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(bad(k, "unknown key for this command")),
            None => Ok(()),
        }
    }

    pub fn check_command(&mut self, command: &str) -> Result<(), CliError> {
        match self.opt_str("command")? {
            Some(c) if c != command => Err(bad("command", format!("config is for `{c}`, not `{command}`"))),
            _ => Ok(()),
        }
    }

    pub fn opt_str(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(bad(key, "expected a string")),
        }
    }

    pub fn str(&mut self, key: &str) -> Result<String, CliError> {
        self.opt_str(key)?.ok_or_else(|| bad(key, "missing"))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => as_f64(v).map(Some).ok_or_else(|| bad(key, "expected a number")),
        }
    }

    pub fn f64(&mut self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| bad(key, "missing"))
    }

    pub fn opt_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(bad(key, "expected a nonnegative integer")),
        }
    }

    pub fn usize(&mut self, key: &str) -> Result<usize, CliError> {
        self.opt_usize(key)?.ok_or_else(|| bad(key, "missing"))
    }

    pub fn opt_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => number_list(v).map(Some).ok_or_else(|| bad(key, "expected an array of numbers")),
        }
    }

    /// Array of arrays of numbers.
    pub fn opt_matrix(&mut self, key: &str) -> Result<Option<Vec<Vec<f64>>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(rows)) => rows
                .iter()
                .map(number_list)
                .collect::<Option<Vec<_>>>()
                .map(Some)
                .ok_or_else(|| bad(key, "expected an array of arrays of numbers")),
            Some(_) => Err(bad(key, "expected an array of arrays of numbers")),
        }
    }

    pub fn opt_index_matrix(&mut self, key: &str) -> Result<Option<Vec<Vec<usize>>>, CliError> {
        let Some(rows) = self.opt_matrix(key)? else { return Ok(None) };
        rows.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| (x >= 0.0 && x.fract() == 0.0).then_some(x as usize))
                    .collect::<Option<Vec<usize>>>()
            })
            .collect::<Option<Vec<_>>>()
            .map(Some)
            .ok_or_else(|| bad(key, "expected nonnegative integers"))
    }

    pub fn opt_element(&mut self, key: &str, m: GroupModel) -> Result<Option<GroupElement>, CliError> {
        let Some(v) = self.opt_f64_list(key)? else { return Ok(None) };
        if v.len() != m.dim() {
            return Err(bad(key, format!("{m} elements have {} coordinates", m.dim())));
        }
        Ok(Some(GroupElement::new(&v)))
    }

    pub fn opt_path(&mut self, key: &str) -> Result<Option<PathBuf>, CliError> {
        Ok(self.opt_str(key)?.map(|p| self.dir.join(p)))
    }

    pub fn model(&mut self) -> Result<GroupModel, CliError> {
        let name = self.str("model")?;
        name.parse().map_err(|e| bad("model", e))
    }

    pub fn side(&mut self) -> Result<Side, CliError> {
        match self.opt_str("side")?.as_deref() {
            None | Some("left") => Ok(Side::Left),
            Some("right") => Ok(Side::Right),
            Some(other) => Err(bad("side", format!("`{other}` is neither `left` nor `right`"))),
        }
    }

    pub fn u_radius(&mut self) -> Result<Neighborhood, CliError> {
        let u = self.f64("u_radius")?;
        Neighborhood::new(u).map_err(|e| bad("u_radius", e))
    }

    /// `key = [[lo, hi], ...]`, or the whole group when absent.
    pub fn region(&mut self, key: &str, m: GroupModel) -> Result<CompactRegion, CliError> {
        match self.opt_region(key, m)? {
            Some(r) => Ok(r),
            None => CompactRegion::whole(m).ok_or_else(|| bad(key, format!("required for the noncompact model {m}"))),
        }
    }

    pub fn opt_region(&mut self, key: &str, m: GroupModel) -> Result<Option<CompactRegion>, CliError> {
        let Some(rows) = self.opt_matrix(key)? else { return Ok(None) };
        let bounds = rows
            .into_iter()
            .map(|r| <[f64; 2]>::try_from(r).map_err(|_| bad(key, "each bound must be [lo, hi]")))
            .collect::<Result<Vec<_>, _>>()?;
        CompactRegion::new(m, bounds).map(Some).map_err(|e| bad(key, e))
    }

    pub fn opt_elements(&mut self, key: &str, m: GroupModel) -> Result<Option<Vec<GroupElement>>, CliError> {
        let Some(rows) = self.opt_matrix(key)? else { return Ok(None) };
        rows.iter()
            .map(|r| {
                if r.len() != m.dim() {
                    return Err(bad(key, format!("{m} elements have {} coordinates", m.dim())));
                }
                let e = GroupElement::new(r);
                m.validate(&e).map(|_| e).map_err(|err| bad(key, err))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn number_list(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(as_f64).collect()
}
