//! Run configuration: defaults, `key = value` files and flag overrides.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use heat_trace::fields::io::load_potential;
use heat_trace::scattering::Region;
use heat_trace::{make_potential, GridSpec, Potential64};

/// Keys in the order they are echoed into output headers.
pub const KEYS: &[&str] = &[
    "potential", "dim", "box", "grid-n", "t-min", "t-max", "t-points", "geometric", "kmax", "samples", "seed", "region", "tol",
    "m-max", "p-max", "methods", "out",
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn defaults() -> BTreeMap<String, String> {
    [
        ("potential", "well:V0=1,a=1"),
        ("dim", "1"),
        ("box", "16"),
        ("grid-n", "2048"),
        ("t-min", "0.001"),
        ("t-max", "0.1"),
        ("t-points", "16"),
        ("geometric", "true"),
        ("kmax", "6"),
        ("samples", "100000"),
        ("seed", "1"),
        ("region", "0,8,-4,0"),
        ("tol", "1e-6"),
        ("m-max", "3"),
        ("p-max", "3"),
        ("methods", "oracle,series"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| err(format!("line {}: expected key = value, got '{raw}'", no + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(err(format!("line {}: unknown key '{}'", no + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub settings: BTreeMap<String, String>,
    pub potential: String,
    pub grid: GridSpec,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub geometric: bool,
    pub kmax: usize,
    pub samples: usize,
    pub seed: u64,
    pub region: Region,
    pub tol: f64,
    pub m_max: usize,
    pub p_max: f64,
    pub methods: Vec<String>,
    pub out: Option<PathBuf>,
}

fn num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T, ConfigError> {
    let raw = &map[key];
    raw.parse().map_err(|_| err(format!("{key} = '{raw}' is not a valid number")))
}

impl RunConfig {
    /// Layers command defaults, then `file`, then `overrides` over the global
    /// defaults and validates the result.
    pub fn build_with(
        command_defaults: &[(&str, &str)],
        file: Option<&Path>,
        overrides: BTreeMap<String, String>,
    ) -> Result<Self, ConfigError> {
        let mut settings = defaults();
        settings.extend(command_defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())));
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
            settings.extend(parse_config_text(&text)?);
        }
        settings.extend(overrides);
        let dim: usize = num(&settings, "dim")?;
        let half_width: f64 = num(&settings, "box")?;
        let points: usize = num(&settings, "grid-n")?;
        let grid = GridSpec::new(dim, half_width, points).map_err(|e| err(e.to_string()))?;
        let t_min: f64 = num(&settings, "t-min")?;
        let t_max: f64 = num(&settings, "t-max")?;
        let t_points: usize = num(&settings, "t-points")?;
        let t_max = if t_points == 1 { t_min } else { t_max };
        if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) || t_points == 0 || (t_points > 1 && t_max == t_min) {
            return Err(err(format!("t-grid [{t_min}, {t_max}] with {t_points} points is invalid")));
        }
        let geometric = match settings["geometric"].as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => return Err(err(format!("geometric = '{other}' is not a boolean"))),
        };
        let kmax: usize = num(&settings, "kmax")?;
        if !(1..=8).contains(&kmax) {
            return Err(err(format!("kmax = {kmax} outside 1..=8")));
        }
        let samples: usize = num(&settings, "samples")?;
        let seed: u64 = num(&settings, "seed")?;
        let r: Vec<f64> = settings["region"]
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| err(format!("region '{}' must be re0,re1,im0,im1", settings["region"]))))
            .collect::<Result<_, _>>()?;
        if r.len() != 4 {
            return Err(err("region needs four numbers re0,re1,im0,im1"));
        }
        let region = Region::new(r[0], r[1], r[2], r[3]).map_err(|e| err(e.to_string()))?;
        let tol: f64 = num(&settings, "tol")?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(err(format!("tol = {tol} must lie in (0, 1)")));
        }
        let m_max: usize = num(&settings, "m-max")?;
        let p_max: f64 = num(&settings, "p-max")?;
        if !(p_max >= 1.0 && (2.0 * p_max).fract() == 0.0) {
            return Err(err(format!("p-max = {p_max} must be a half-integer ≥ 1")));
        }
        let methods: Vec<String> = settings["methods"].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if methods.is_empty() || methods.iter().any(|m| !["oracle", "series"].contains(&m.as_str())) {
            return Err(err(format!("methods = '{}' must list oracle and/or series", settings["methods"])));
        }
        if methods.iter().any(|m| m == "series") {
            if t_max > 1.0 {
                return Err(err("the series method needs t ≤ 1"));
            }
            if samples < 1000 {
                return Err(err(format!("samples = {samples}: the series method needs at least 1000")));
            }
        }
        let out = settings.get("out").map(PathBuf::from);
        let cfg = Self {
            potential: settings["potential"].clone(),
            settings,
            grid,
            t_min,
            t_max,
            t_points,
            geometric,
            kmax,
            samples,
            seed,
            region,
            tol,
            m_max,
            p_max,
            methods,
            out,
        };
        cfg.load_potential()?;
        Ok(cfg)
    }

    /// `kind:key=value,...`, `zero`, or `file:path`.
    pub fn load_potential(&self) -> Result<Potential64, ConfigError> {
        let spec = self.potential.trim();
        if let Some(path) = spec.strip_prefix("file:") {
            let p: Potential64 = load_potential(Path::new(path)).map_err(|e| err(format!("potential file {path}: {e}")))?;
            if *p.grid() != self.grid {
                return Err(err(format!("potential file {path} is on a different grid than dim/box/grid-n")));
            }
            return Ok(p);
        }
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = HashMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| err(format!("potential parameter '{item}' must be key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| err(format!("potential parameter '{item}' is not numeric")))?;
            params.insert(k.trim().to_string(), v);
        }
        make_potential(kind.trim(), &params, self.grid).map_err(|e| err(e.to_string()))
    }

    pub fn times(&self) -> Vec<f64> {
        if self.t_points == 1 {
            return vec![self.t_min];
        }
        let n = self.t_points - 1;
        (0..=n)
            .map(|i| {
                let f = i as f64 / n as f64;
                if self.geometric {
                    self.t_min * (self.t_max / self.t_min).powf(f)
                } else {
                    self.t_min + (self.t_max - self.t_min) * f
                }
            })
            .collect()
    }

    /// Effective configuration as `# key = value` lines.
    pub fn header(&self, command: &str) -> String {
        let mut s = format!("# heat-trace {command}\n");
        for key in KEYS {
            if let Some(v) = self.settings.get(*key) {
                s.push_str(&format!("# {key} = {v}\n"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut file = parse_config_text("# comment\nkmax = 4\nt_min = 0.01 # trailing\n").unwrap();
        assert_eq!(file["kmax"], "4");
        assert_eq!(file["t-min"], "0.01");
        file.insert("kmax".into(), "5".into());
        let cfg = RunConfig::build_with(&[], None, file).unwrap();
        assert_eq!(cfg.kmax, 5);
        assert_eq!(cfg.t_min, 0.01);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(parse_config_text("colour = red").is_err());
        let bad = BTreeMap::from([("t-min".to_string(), "-1".to_string())]);
        assert!(RunConfig::build_with(&[], None, bad).is_err());
        let bad = BTreeMap::from([("potential".to_string(), "blob:a=1".to_string())]);
        assert!(RunConfig::build_with(&[], None, bad).is_err());
    }

    #[test]
    fn geometric_times_hit_the_ends() {
        let cfg = RunConfig::build_with(&[], None, BTreeMap::new()).unwrap();
        let ts = cfg.times();
        assert_eq!(ts.len(), 16);
        assert!((ts[0] - 1e-3).abs() < 1e-18 && (ts[15] - 0.1).abs() < 1e-15);
    }
}
