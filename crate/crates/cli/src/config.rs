//! Run configuration: an optional JSON file, overridden by command-line flags,
//! validated into a [`Run`] before anything is computed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use sigma_damp::experiments::{
    time_grid, Profile, SpectralDataSpec, CURVE_T_MAX, CURVE_T_MIN, DEFAULT_TOL, MAX_CURVE_ORDER, PER_DECADE,
};
use sigma_damp::{ModelParams, RateCase};

use crate::CliError;

pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=10;

/// Order selection: a single order or a list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Orders {
    One(usize),
    Many(Vec<usize>),
}

impl Orders {
    fn into_vec(self) -> Vec<usize> {
        match self {
            Orders::One(k) => vec![k],
            Orders::Many(ks) => ks,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub per_decade: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<ModelParams>,
    pub case: Option<RateCase>,
    pub k: Option<Orders>,
    /// Each entry is used for both `û0` and `û1`.
    pub data: Option<Vec<Profile>>,
    pub times: Option<TimeGridConfig>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub criteria: Option<Vec<u8>>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CaseArg {
    Positive,
    Zero,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DataArg {
    Gaussian,
    MomentFree,
}

impl DataArg {
    fn profile(self) -> Profile {
        match self {
            DataArg::Gaussian => Profile::Gaussian { c: 1.0, alpha: 1.0 },
            DataArg::MomentFree => Profile::MomentFree { c: 1.0, alpha: 1.0 },
        }
    }
}

/// Flags shared by every subcommand; each overrides the matching config key.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub sigma1: Option<f64>,
    #[arg(long, global = true)]
    pub sigma2: Option<f64>,
    /// Space dimension n
    #[arg(long, global = true)]
    pub dim: Option<u32>,
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Defaults to the case implied by sigma1
    #[arg(long, global = true, value_enum)]
    pub case: Option<CaseArg>,
    /// Orders, e.g. `2`, `0,1,2` or `0..2`
    #[arg(long, global = true, value_parser = parse_orders)]
    pub k: Option<List<usize>>,
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub data: Vec<DataArg>,
    #[arg(long, global = true)]
    pub t_min: Option<f64>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub per_decade: Option<usize>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Acceptance criteria to run, e.g. `1,5,8` or `1..10`
    #[arg(long, global = true, value_parser = parse_criteria)]
    pub criteria: Option<List<u8>>,
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
}

/// A comma list or inclusive range given as a single flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: std::str::FromStr + Copy + Into<u64> + TryFrom<u64>>(s: &str) -> Result<Vec<T>, String> {
    let num = |x: &str| x.trim().parse::<T>().map_err(|_| format!("not an index: {x:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?.into(), num(b.trim_start_matches('='))?.into());
        if a > b {
            return Err(format!("empty range {s:?}"));
        }
        return (a..=b)
            .map(|v| T::try_from(v).map_err(|_| format!("out of range: {v}")))
            .collect();
    }
    s.split(',').map(num).collect()
}

fn parse_orders(s: &str) -> Result<List<usize>, String> {
    parse_list::<u32>(s).map(|v| List(v.into_iter().map(|k| k as usize).collect()))
}

fn parse_criteria(s: &str) -> Result<List<u8>, String> {
    parse_list::<u8>(s).map(List)
}

/// A fully validated configuration.
#[derive(Debug, Clone)]
pub struct Run {
    pub params: ModelParams,
    pub case: RateCase,
    pub ks: Vec<usize>,
    pub data: Vec<(String, SpectralDataSpec)>,
    pub times: Vec<f64>,
    pub tol: f64,
    pub out: PathBuf,
    pub criteria: Vec<u8>,
    pub json: bool,
}

fn default_params() -> ModelParams {
    ModelParams::new(3, 1.0, 0.25, 0.75, 0.0)
}

fn profile_name(p: &Profile) -> &'static str {
    match p {
        Profile::Gaussian { .. } => "gaussian",
        Profile::MomentFree { .. } => "moment_free",
    }
}

impl Run {
    /// Merges file and flags, then validates everything. `default_ks` is the
    /// command's order list when neither source gives one.
    pub fn resolve(flags: &Overrides, default_ks: &[usize]) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let config = |msg: String| CliError::Config(msg);

        let mut params = file.params.unwrap_or_else(default_params);
        params.sigma = flags.sigma.unwrap_or(params.sigma);
        params.sigma1 = flags.sigma1.unwrap_or(params.sigma1);
        params.sigma2 = flags.sigma2.unwrap_or(params.sigma2);
        params.n = flags.dim.unwrap_or(params.n);
        params.s = flags.s.unwrap_or(params.s);
        let case = match flags.case {
            Some(CaseArg::Positive) => RateCase::PositiveSigma1,
            Some(CaseArg::Zero) => RateCase::ZeroSigma1,
            None => file.case.unwrap_or_else(|| RateCase::for_params(&params)),
        };
        params.validate(case).map_err(|e| config(e.to_string()))?;

        let ks = flags
            .k
            .clone()
            .map(|l| l.0)
            .or(file.k.map(Orders::into_vec))
            .unwrap_or_else(|| default_ks.to_vec());
        if ks.is_empty() {
            return Err(config("empty order list".into()));
        }
        if let Some(k) = ks.iter().find(|&&k| k > MAX_CURVE_ORDER) {
            return Err(config(format!("order k = {k} exceeds {MAX_CURVE_ORDER}")));
        }

        let profiles = if flags.data.is_empty() {
            file.data.unwrap_or_else(|| vec![DataArg::Gaussian.profile()])
        } else {
            flags.data.iter().map(|d| d.profile()).collect()
        };
        if profiles.is_empty() {
            return Err(config("empty data list".into()));
        }
        let mut data = Vec::with_capacity(profiles.len());
        for (i, p) in profiles.iter().enumerate() {
            let spec = SpectralDataSpec { u0: *p, u1: *p };
            spec.validate().map_err(|e| config(e.to_string()))?;
            data.push((format!("d{i}_{}", profile_name(p)), spec));
        }

        let grid = file.times.unwrap_or_default();
        let times = time_grid(
            flags.t_min.or(grid.t_min).unwrap_or(CURVE_T_MIN),
            flags.t_max.or(grid.t_max).unwrap_or(CURVE_T_MAX),
            flags.per_decade.or(grid.per_decade).unwrap_or(PER_DECADE),
        )
        .map_err(|e| config(e.to_string()))?;

        let tol = flags.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(config(format!("tolerance {tol} outside (0, 1)")));
        }

        let criteria = flags
            .criteria
            .clone()
            .map(|l| l.0)
            .or(file.criteria)
            .unwrap_or_else(|| CRITERIA.collect());
        if criteria.is_empty() {
            return Err(config("empty criteria list".into()));
        }
        if let Some(c) = criteria.iter().find(|c| !CRITERIA.contains(c)) {
            return Err(config(format!("no acceptance criterion {c}")));
        }

        Ok(Run {
            params,
            case,
            ks,
            data,
            times,
            tol,
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("results")),
            criteria,
            json: flags.json,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_lists() {
        assert_eq!(parse_orders("2").unwrap().0, vec![2]);
        assert_eq!(parse_orders("0,1,3").unwrap().0, vec![0, 1, 3]);
        assert_eq!(parse_orders("0..2").unwrap().0, vec![0, 1, 2]);
        assert_eq!(parse_orders("0..=2").unwrap().0, vec![0, 1, 2]);
        assert!(parse_orders("2..0").is_err());
        assert!(parse_orders("x").is_err());
        assert_eq!(parse_criteria("1..10").unwrap().0.len(), 10);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"params": {"n": 3, "sigma": 1, "sigma1": 0, "sigma2": 1, "x": 1}}"#);
        assert!(err.is_err());
        let err = serde_json::from_str::<RunConfig>(r#"{"kk": [1]}"#);
        assert!(err.is_err());
        let ok = serde_json::from_str::<RunConfig>(r#"{"k": 1, "data": [{"kind": "moment_free", "c": 2, "alpha": 0.5}]}"#);
        assert!(ok.is_ok());
    }

    #[test]
    fn flags_override_defaults() {
        let flags = Overrides {
            sigma1: Some(0.0),
            sigma2: Some(0.8),
            dim: Some(1),
            ..Default::default()
        };
        let run = Run::resolve(&flags, &[1, 2]).unwrap();
        assert_eq!(run.case, RateCase::ZeroSigma1);
        assert_eq!(run.ks, vec![1, 2]);
        assert_eq!(run.times.len(), 76);
        assert_eq!(run.data[0].0, "d0_gaussian");
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = [
            Overrides { sigma2: Some(0.1), ..Default::default() },
            Overrides { k: Some(List(vec![4])), ..Default::default() },
            Overrides { tol: Some(0.0), ..Default::default() },
            Overrides { t_min: Some(0.0), ..Default::default() },
            Overrides { criteria: Some(List(vec![11])), ..Default::default() },
            Overrides { case: Some(CaseArg::Zero), ..Default::default() },
        ];
        for flags in bad {
            assert!(matches!(Run::resolve(&flags, &[0]), Err(CliError::Config(_))), "{flags:?}");
        }
    }
}
