//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use sabr_smile::structures::DEFAULT_H_FRACTION;
use sabr_smile::{
    alpha_from_atm, AtmBackout, FormulaKind, McConfig, SabrError, SabrParams, Spacing, StrikeGrid,
    Units,
};

use crate::error::{config, CliError, Result};

/// Keys accepted in a config file. Dashes and underscores are interchangeable.
pub const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "atm",
    "atm_backout",
    "beta",
    "rho",
    "nu",
    "forward",
    "tau",
    "formula",
    "grid",
    "peaks",
    "units",
    "h",
    "mc",
    "seed",
    "paths",
    "steps",
    "antithetic",
    "absorption",
    "draws",
    "format",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (csv|json)")),
        }
    }
}

/// A single formula or both side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaChoice {
    One(FormulaKind),
    #[default]
    Both,
}

impl FormulaChoice {
    pub fn kinds(&self) -> Vec<FormulaKind> {
        match self {
            FormulaChoice::One(k) => vec![*k],
            FormulaChoice::Both => FormulaKind::ALL.to_vec(),
        }
    }
}

impl FromStr for FormulaChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("both") {
            return Ok(FormulaChoice::Both);
        }
        s.parse::<FormulaKind>()
            .map(FormulaChoice::One)
            .map_err(|e| e.to_string())
    }
}

/// `min:max:count[:geom|:lin]`, linear unless stated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg(pub StrikeGrid);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("grid '{s}' is not min:max:count[:geom]"));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("grid '{s}': {e}"));
        let count = parts[2]
            .parse::<usize>()
            .map_err(|e| format!("grid '{s}': {e}"))?;
        let spacing = match parts.get(3).map(|t| t.to_ascii_lowercase()) {
            None => Spacing::Linear,
            Some(t) if t == "geom" || t == "geometric" => Spacing::Geometric,
            Some(t) if t == "lin" || t == "linear" => Spacing::Linear,
            Some(t) => return Err(format!("grid '{s}': unknown spacing '{t}'")),
        };
        StrikeGrid::new(num(parts[0])?, num(parts[1])?, count, spacing)
            .map(GridArg)
            .map_err(|e| e.to_string())
    }
}

pub fn parse_backout(s: &str) -> std::result::Result<AtmBackout, String> {
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "first_order" | "first" => Ok(AtmBackout::FirstOrder),
        "zero_order" | "zero" => Ok(AtmBackout::ZeroOrder),
        other => Err(format!(
            "unknown ATM back-out '{other}' (first_order|zero_order)"
        )),
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("expected a boolean, got '{other}'")),
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// `key = value` file; flags take precedence over its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "atm")]
    pub alpha: Option<f64>,
    /// At-the-money implied vol quote, in the chosen units.
    #[arg(long)]
    pub atm: Option<f64>,
    /// How `--atm` is turned into alpha: first_order or zero_order.
    #[arg(long, value_parser = parse_backout)]
    pub atm_backout: Option<AtmBackout>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub forward: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// hagan, berestycki or both.
    #[arg(long)]
    pub formula: Option<FormulaChoice>,
    /// Strike grid `min:max:count[:geom]`.
    #[arg(long)]
    pub grid: Option<GridArg>,
    /// Triangle peaks `min:max:count[:geom]`.
    #[arg(long)]
    pub peaks: Option<GridArg>,
    #[arg(long)]
    pub units: Option<Units>,
    /// Finite-difference step for the density scan.
    #[arg(long)]
    pub h: Option<f64>,
    /// Add Monte Carlo columns to the triangle table.
    #[arg(long)]
    pub mc: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Time steps per year.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub no_antithetic: bool,
    #[arg(long)]
    pub no_absorption: bool,
    /// Draws per regime for `table1`.
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config(format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(config(format!("line {}: unknown key '{key}'", n + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(config(format!("line {}: duplicate key '{key}'", n + 1)));
        }
    }
    Ok(map)
}

/// Everything a subcommand may need, after merging.
#[derive(Debug, Clone)]
pub struct RunConfig {
    params: Option<std::result::Result<SabrParams, SabrError>>,
    tau: Option<f64>,
    pub formula: FormulaChoice,
    pub grid: Option<StrikeGrid>,
    pub peaks: Option<StrikeGrid>,
    pub units: Units,
    pub h: Option<f64>,
    pub mc_enabled: bool,
    pub mc: McConfig,
    pub draws: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

struct Layer<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Layer<'_> {
    fn get<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| config(format!("config key '{key}': {e}")))
            })
            .transpose()
    }

    fn flag(&self, set: bool, key: &str) -> Result<Option<bool>> {
        if set {
            return Ok(Some(true));
        }
        self.file
            .get(key)
            .map(|v| parse_bool(v).map_err(|e| config(format!("config key '{key}': {e}"))))
            .transpose()
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::merge(args, &file)
    }

    pub fn merge(args: &CommonArgs, file: &BTreeMap<String, String>) -> Result<Self> {
        let l = Layer { file };
        let units = l.get(args.units, "units")?.unwrap_or_default();
        let tau = l.get(args.tau, "tau")?;
        if let Some(t) = tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config(format!("tau must be positive, got {t}")));
            }
        }

        // A level given on the command line replaces both file keys.
        let (alpha, atm) = if args.alpha.is_some() || args.atm.is_some() {
            (args.alpha, args.atm)
        } else {
            (l.get(None, "alpha")?, l.get(None, "atm")?)
        };
        let backout = match args.atm_backout {
            Some(b) => b,
            None => match file.get("atm_backout") {
                Some(v) => parse_backout(v).map_err(config)?,
                None => AtmBackout::default(),
            },
        };
        let beta = l.get(args.beta, "beta")?;
        let rho = l.get(args.rho, "rho")?;
        let nu = l.get(args.nu, "nu")?;
        let forward = l.get(args.forward, "forward")?;

        let params = match (alpha, atm, beta, rho, nu, forward) {
            (None, None, None, None, None, None) => None,
            (Some(_), Some(_), ..) => {
                return Err(config("give either alpha or atm, not both"));
            }
            (a, q, Some(beta), Some(rho), Some(nu), Some(forward)) => Some(match (a, q) {
                (Some(a), None) => SabrParams::new(a, beta, rho, nu, forward),
                (None, Some(q)) => {
                    let target = units.vol_from_quote(q);
                    // the first-order back-out needs tau; without it only the
                    // zero-order level is defined
                    alpha_from_atm(beta, rho, nu, forward, target, tau.unwrap_or(0.0), backout)
                        .and_then(|a| SabrParams::new(a, beta, rho, nu, forward))
                }
                _ => return Err(config("missing alpha or atm")),
            }),
            _ => {
                return Err(config(
                    "SABR parameters need beta, rho, nu, forward and one of alpha/atm",
                ))
            }
        };

        let defaults = McConfig::default();
        let mc = McConfig {
            paths: l.get(args.paths, "paths")?.unwrap_or(defaults.paths),
            steps: l.get(args.steps, "steps")?.unwrap_or(defaults.steps),
            seed: l.get(args.seed, "seed")?.unwrap_or(defaults.seed),
            antithetic: !args.no_antithetic
                && l.flag(false, "antithetic")?.unwrap_or(defaults.antithetic),
            absorption: !args.no_absorption
                && l.flag(false, "absorption")?.unwrap_or(defaults.absorption),
        };
        mc.validate().map_err(|e| config(e.to_string()))?;

        let h = l.get(args.h, "h")?;
        if let Some(h) = h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(config(format!("h must be positive, got {h}")));
            }
        }
        let draws = l.get(args.draws, "draws")?.unwrap_or(200);
        if draws == 0 {
            return Err(config("draws must be at least 1"));
        }

        Ok(Self {
            params,
            tau,
            formula: l.get(args.formula, "formula")?.unwrap_or_default(),
            grid: l.get(args.grid, "grid")?.map(|g| g.0),
            peaks: l.get(args.peaks, "peaks")?.map(|g| g.0),
            units,
            h,
            mc_enabled: l.flag(args.mc, "mc")?.unwrap_or(false),
            mc,
            draws,
            format: l.get(args.format, "format")?.unwrap_or_default(),
            out: l.get(args.out.clone(), "out")?,
        })
    }

    pub fn params(&self) -> Result<SabrParams> {
        match &self.params {
            Some(Ok(p)) => Ok(*p),
            Some(Err(SabrError::Domain(msg))) => Err(config(msg.clone())),
            Some(Err(e)) => Err(CliError::Numerical(e.clone())),
            None => Err(config(
                "SABR parameters are required (beta, rho, nu, forward and alpha or atm)",
            )),
        }
    }

    pub fn tau(&self) -> Result<f64> {
        self.tau.ok_or_else(|| config("tau is required"))
    }

    pub fn strikes(&self, forward: f64) -> Vec<f64> {
        self.grid
            .unwrap_or_else(|| StrikeGrid::default_for(forward))
            .points()
    }

    /// Triangle peaks; 0.25% to 6% in steps of 0.25% unless overridden.
    pub fn peak_points(&self) -> Vec<f64> {
        match self.peaks {
            Some(g) => g.points(),
            None => {
                let pct = (1..=24).map(|i| 0.25 * i as f64);
                match self.units {
                    Units::Percent => pct.collect(),
                    Units::Decimal => pct.map(|k| k / 100.0).collect(),
                }
            }
        }
    }

    pub fn density_step(&self, forward: f64) -> f64 {
        self.h.unwrap_or(DEFAULT_H_FRACTION * forward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> BTreeMap<String, String> {
        parse_config_file(
            "# case\nrho = -0.33\nbeta=0.4\nnu = 0.25\nforward = 8.01\natm = 4.25\ntau = 15\n",
        )
        .unwrap()
    }

    #[test]
    fn file_parsing() {
        let map = fig1();
        assert_eq!(map["rho"], "-0.33");
        assert_eq!(map.len(), 6);
        assert!(parse_config_file("bogus = 1").is_err());
        assert!(parse_config_file("beta = 1\nbeta = 2").is_err());
        assert!(parse_config_file("beta").is_err());
        assert_eq!(
            parse_config_file("atm-backout = zero").unwrap()["atm_backout"],
            "zero"
        );
    }

    #[test]
    fn flags_override_file() {
        let args = CommonArgs {
            tau: Some(20.0),
            alpha: Some(0.1),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::merge(&args, &fig1()).unwrap();
        assert_eq!(cfg.tau().unwrap(), 20.0);
        let p = cfg.params().unwrap();
        assert_eq!(p.alpha(), 0.1);
        assert_eq!(p.rho(), -0.33);
    }

    #[test]
    fn atm_backout_uses_units() {
        let cfg = RunConfig::merge(&CommonArgs::default(), &fig1()).unwrap();
        let alpha = cfg.params().unwrap().alpha();
        assert!((alpha - 0.13962).abs() < 1e-4, "{alpha}");
    }

    #[test]
    fn grid_argument() {
        let g: GridArg = "1:3:3".parse().unwrap();
        assert_eq!(g.0.points(), vec![1.0, 2.0, 3.0]);
        let g: GridArg = "1:4:3:geom".parse().unwrap();
        assert!((g.0.points()[1] - 2.0).abs() < 1e-15);
        assert!("1:3".parse::<GridArg>().is_err());
        assert!("3:1:5".parse::<GridArg>().is_err());
        assert!("1:3:1".parse::<GridArg>().is_err());
    }

    #[test]
    fn default_peaks_follow_units() {
        let mut cfg = RunConfig::merge(&CommonArgs::default(), &BTreeMap::new()).unwrap();
        assert_eq!(cfg.peak_points().first(), Some(&0.25));
        assert_eq!(cfg.peak_points().last(), Some(&6.0));
        cfg.units = Units::Decimal;
        assert_eq!(cfg.peak_points().last(), Some(&0.06));
    }

    #[test]
    fn missing_params_is_a_config_error() {
        let cfg = RunConfig::merge(&CommonArgs::default(), &BTreeMap::new()).unwrap();
        assert!(matches!(cfg.params(), Err(CliError::Config(_))));
        assert!(cfg.tau().is_err());
        let mut file = fig1();
        file.insert("alpha".into(), "0.1".into());
        assert!(RunConfig::merge(&CommonArgs::default(), &file).is_err());
    }
}
