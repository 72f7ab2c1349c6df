use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdcell_core::{
    db_to_linear, linear_to_db, Architecture, NearestBsMode, NetworkParams, SimConfig,
    Suppression,
};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "fdcell", version, about = "Outage and sum rate of full-duplex cellular networks")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a single parameter point.
    Eval(Options),
    /// Evaluate along one swept parameter.
    Sweep(Options),
    /// Cross-check the analytic and Monte Carlo engines over the reference grid.
    Validate(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    OutageUplink,
    OutageDownlink,
    SumRate,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::OutageUplink => "outage-uplink",
            Metric::OutageDownlink => "outage-downlink",
            Metric::SumRate => "sum-rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Montecarlo,
    Asymptotic,
    Both,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Analytic => "analytic",
            MethodArg::Montecarlo => "montecarlo",
            MethodArg::Asymptotic => "asymptotic",
            MethodArg::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    #[value(name = "R")]
    Rate,
    #[value(name = "sigma_l2_db")]
    SigmaL2Db,
    #[value(name = "m")]
    Sectors,
    #[value(name = "lambda")]
    Lambda,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Rate => "R",
            SweepVar::SigmaL2Db => "sigma_l2_db",
            SweepVar::Sectors => "m",
            SweepVar::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_arch(s: &str) -> Result<Architecture, String> {
    s.parse().map_err(|e: fdcell_core::Error| e.to_string())
}

fn parse_suppression(s: &str) -> Result<Suppression, String> {
    s.parse().map_err(|e: fdcell_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<NearestBsMode, String> {
    s.parse().map_err(|e: fdcell_core::Error| e.to_string())
}

/// Flags shared by all subcommands. Every flag can also be given as a
/// `key = value` line in the file passed to `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Target rate in bits per channel use.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_l2_db: Option<f64>,
    /// Thermal noise power in dB; `-inf` for none.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_n2_db: Option<f64>,
    /// Sector count of both BSs and users.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub m_b: Option<u32>,
    #[arg(long)]
    pub m_u: Option<u32>,
    /// Side-lobe to main-lobe gain ratio of both node types.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub p_b: Option<f64>,
    #[arg(long)]
    pub p_u: Option<f64>,
    #[arg(long, value_parser = parse_arch)]
    pub arch: Option<Architecture>,
    #[arg(long, value_parser = parse_suppression)]
    pub suppression: Option<Suppression>,
    #[arg(long, value_parser = parse_mode)]
    pub nearest_bs_mode: Option<NearestBsMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_enum)]
    pub var: Option<SweepVar>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Comma-separated sweep points; overrides `--from/--to/--step`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub metric: Metric,
    pub method: MethodArg,
    pub rate: f64,
    pub sigma_l2_db: f64,
    pub sigma_n2_db: f64,
    pub params: NetworkParams,
    pub sim: SimConfig,
    pub sweep: Option<(SweepVar, Vec<f64>)>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Reads `key = value` lines (blank lines and `#` comments ignored) and
/// turns them into flags. Keys may use `-` or `_`.
pub fn config_file_args(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))?;
    let mut args = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                n + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(CliError::Usage(format!("{}:{}: nested `config` is not supported", path.display(), n + 1)));
        }
        args.push(format!("--{key}={}", value.trim()));
    }
    Ok(args)
}

/// Inserts the flags from a `--config` file directly after the subcommand,
/// so that flags given on the command line take precedence.
pub fn splice_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if a == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
            i += 1;
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(argv) };
    let extra = config_file_args(&path)?;
    let mut out = argv;
    let has_command = out
        .get(1)
        .is_some_and(|a| matches!(a.as_str(), "eval" | "sweep" | "validate"));
    if !has_command {
        out.insert(1, "eval".into());
    }
    out.splice(2..2, extra);
    Ok(out)
}

fn usage(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid `{field}`: {reason}"))
}

fn sweep_points(opts: &Options) -> Result<Option<(SweepVar, Vec<f64>)>, CliError> {
    let Some(var) = opts.var else {
        if opts.values.is_some() || opts.from.is_some() {
            return Err(usage("var", "sweep points given without `--var`"));
        }
        return Ok(None);
    };
    let points = match (&opts.values, opts.from, opts.to, opts.step) {
        (Some(v), ..) => v.clone(),
        (None, Some(from), Some(to), Some(step)) => {
            if !(step.is_finite() && step > 0.0) {
                return Err(usage("step", format!("must be > 0, got {step}")));
            }
            if !(from.is_finite() && to.is_finite()) || to < from {
                return Err(usage("to", format!("range [{from}, {to}] is empty")));
            }
            let n = ((to - from) / step + 1e-9).floor() as usize;
            (0..=n).map(|k| from + k as f64 * step).collect()
        }
        _ => return Err(usage("var", "give `--values` or all of `--from`, `--to`, `--step`")),
    };
    if points.is_empty() {
        return Err(usage("values", "sweep has no points"));
    }
    if var == SweepVar::Sectors && points.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
        return Err(usage("m", "sector counts must be positive integers"));
    }
    Ok(Some((var, points)))
}

impl SweepSpec {
    pub fn from_options(opts: &Options) -> Result<Self, CliError> {
        let defaults = NetworkParams::default();
        let sigma_l2_db = opts.sigma_l2_db.unwrap_or_else(|| linear_to_db(defaults.sigma_l2));
        let sigma_n2_db = opts.sigma_n2_db.unwrap_or(f64::NEG_INFINITY);
        for (field, db) in [("sigma_l2_db", sigma_l2_db), ("sigma_n2_db", sigma_n2_db)] {
            if db.is_nan() || db == f64::INFINITY {
                return Err(usage(field, format!("must be a number or -inf, got {db}")));
            }
        }
        let m = opts.m.unwrap_or(defaults.m_b);
        let gamma = opts.gamma.unwrap_or(defaults.gamma_b);
        let params = NetworkParams {
            lambda: opts.lambda.unwrap_or(defaults.lambda),
            p_b: opts.p_b.unwrap_or(defaults.p_b),
            p_u: opts.p_u.unwrap_or(defaults.p_u),
            alpha1: opts.alpha1.unwrap_or(defaults.alpha1),
            alpha2: opts.alpha2.unwrap_or(defaults.alpha2),
            sigma_n2: db_to_linear(sigma_n2_db),
            sigma_l2: db_to_linear(sigma_l2_db),
            m_b: opts.m_b.unwrap_or(m),
            m_u: opts.m_u.unwrap_or(m),
            gamma_b: gamma,
            gamma_u: gamma,
            ..defaults
        };
        params.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        let sim = SimConfig {
            trials: opts.trials.unwrap_or(100_000),
            seed: opts.seed.unwrap_or(1),
            architecture: opts.arch.unwrap_or_default(),
            suppression: opts.suppression.unwrap_or(Suppression::On),
            nearest_bs_mode: opts.nearest_bs_mode.unwrap_or_default(),
            window_radius: None,
        };
        sim.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        let rate = opts.rate.unwrap_or(0.1);
        if !(rate.is_finite() && rate > 0.0) {
            return Err(usage("rate", format!("target rate must be > 0, got {rate}")));
        }
        let metric = opts.metric.unwrap_or(Metric::OutageUplink);
        let method = opts.method.unwrap_or(MethodArg::Analytic);
        if sim.architecture == Architecture::TwoNode && method != MethodArg::Montecarlo {
            return Err(usage(
                "method",
                "the two-node architecture has no analytic expressions; use --method montecarlo",
            ));
        }
        if method == MethodArg::Asymptotic && metric == Metric::SumRate {
            return Err(usage("method", "no asymptotic form exists for the sum rate"));
        }
        let sweep = sweep_points(opts)?;
        if let Some((var, points)) = &sweep {
            for &v in points {
                Self::apply_point(&params, rate, *var, v)
                    .and_then(|(p, r)| {
                        if r > 0.0 {
                            p.validate().map_err(|e| e.to_string())
                        } else {
                            Err(format!("target rate must be > 0, got {r}"))
                        }
                    })
                    .map_err(|e| usage(var.name(), format!("sweep point {v}: {e}")))?;
            }
        }
        Ok(SweepSpec {
            metric,
            method,
            rate,
            sigma_l2_db,
            sigma_n2_db,
            params,
            sim,
            sweep,
            output: opts.output.clone(),
            format: opts.format.unwrap_or(Format::Csv),
        })
    }

    /// Parameters and rate at one sweep point.
    pub fn apply_point(
        base: &NetworkParams,
        rate: f64,
        var: SweepVar,
        value: f64,
    ) -> Result<(NetworkParams, f64), String> {
        let mut p = base.clone();
        let mut r = rate;
        match var {
            SweepVar::Rate => r = value,
            SweepVar::SigmaL2Db => p.sigma_l2 = db_to_linear(value),
            SweepVar::Sectors => {
                let m = u32::try_from(value as i64).map_err(|e| e.to_string())?;
                p.m_b = m;
                p.m_u = m;
            }
            SweepVar::Lambda => p.lambda = value,
        }
        Ok((p, r))
    }

    /// `key = value` lines that parse back to this spec.
    pub fn to_config(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("metric", self.metric.name().into());
        line("method", self.method.name().into());
        line("rate", self.rate.to_string());
        line("sigma-l2-db", self.sigma_l2_db.to_string());
        line("sigma-n2-db", self.sigma_n2_db.to_string());
        line("m-b", p.m_b.to_string());
        line("m-u", p.m_u.to_string());
        line("gamma", p.gamma_b.to_string());
        line("lambda", p.lambda.to_string());
        line("alpha1", p.alpha1.to_string());
        line("alpha2", p.alpha2.to_string());
        line("p-b", p.p_b.to_string());
        line("p-u", p.p_u.to_string());
        line("arch", self.sim.architecture.to_string());
        line("suppression", self.sim.suppression.to_string());
        line("nearest-bs-mode", self.sim.nearest_bs_mode.to_string());
        line("seed", self.sim.seed.to_string());
        line("trials", self.sim.trials.to_string());
        if let Some((var, points)) = &self.sweep {
            line("var", var.name().into());
            line(
                "values",
                points.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            );
        }
        line(
            "format",
            match self.format {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            },
        );
        if let Some(out) = &self.output {
            line("output", out.display().to_string());
        }
        s
    }
}

impl FromStr for SweepSpec {
    type Err = CliError;

    /// Parses the `key = value` form produced by [`SweepSpec::to_config`].
    fn from_str(text: &str) -> Result<Self, CliError> {
        let mut argv = vec!["fdcell".to_owned(), "eval".to_owned()];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected `key = value`, got `{line}`")))?;
            argv.push(format!("--{}={}", k.trim().replace('_', "-"), v.trim()));
        }
        let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
        match cli.command {
            Some(Command::Eval(o)) => SweepSpec::from_options(&o),
            _ => unreachable!("argv starts with `eval`"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<SweepSpec, CliError> {
        let argv = std::iter::once("fdcell")
            .chain(args.iter().copied())
            .map(String::from)
            .collect::<Vec<_>>();
        let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
        match cli.command {
            Some(Command::Eval(o) | Command::Sweep(o) | Command::Validate(o)) => SweepSpec::from_options(&o),
            None => SweepSpec::from_options(&Options::default()),
        }
    }

    #[test]
    fn defaults() {
        assert_eq!(parse(&[]).unwrap(), parse(&["eval"]).unwrap());
        let s = parse(&["eval"]).unwrap();
        assert_eq!(s.params, NetworkParams::default());
        assert_eq!(s.rate, 0.1);
        assert_eq!(s.sigma_l2_db, -30.0);
        assert_eq!(s.sigma_n2_db, f64::NEG_INFINITY);
        assert_eq!(s.sim.trials, 100_000);
        assert!(s.sweep.is_none());
    }

    #[test]
    fn direct_mapping() {
        let s = parse(&[
            "eval", "--sigma-l2-db", "-30", "--rate", "0.1", "--m", "4", "--metric", "outage-uplink",
            "--method", "both",
        ])
        .unwrap();
        assert_eq!(s.method, MethodArg::Both);
        assert_eq!(s.params.m_b, 4);
        assert!((s.params.sigma_l2 - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn rejects_out_of_domain_exponent() {
        let err = parse(&["eval", "--alpha1", "1.5"]).unwrap_err().to_string();
        assert!(err.contains("alpha1") && err.contains("> 2"), "{err}");
    }

    #[test]
    fn rejects_unsupported_combinations() {
        let e = parse(&["eval", "--arch", "two-node"]).unwrap_err().to_string();
        assert!(e.contains("method"), "{e}");
        assert!(parse(&["eval", "--arch", "two-node", "--method", "montecarlo"]).is_ok());
        let e = parse(&["eval", "--metric", "sum-rate", "--method", "asymptotic"]).unwrap_err();
        assert!(e.to_string().contains("method"));
        assert!(parse(&["eval", "--rate", "0"]).is_err());
        assert!(parse(&["eval", "--bogus", "1"]).is_err());
    }

    #[test]
    fn sweep_ranges() {
        let s = parse(&["sweep", "--var", "sigma_l2_db", "--from", "-60", "--to", "0", "--step", "10"]).unwrap();
        let (var, points) = s.sweep.unwrap();
        assert_eq!(var, SweepVar::SigmaL2Db);
        assert_eq!(points, vec![-60.0, -50.0, -40.0, -30.0, -20.0, -10.0, 0.0]);
        let s = parse(&["sweep", "--var", "R", "--values", "0.01,0.1,1"]).unwrap();
        assert_eq!(s.sweep.unwrap().1, vec![0.01, 0.1, 1.0]);
        assert!(parse(&["sweep", "--var", "m", "--values", "1.5"]).is_err());
        assert!(parse(&["sweep", "--var", "R", "--from", "1", "--to", "0", "--step", "0.1"]).is_err());
        assert!(parse(&["sweep", "--var", "R", "--from", "0", "--to", "1", "--step", "0"]).is_err());
        assert!(parse(&["sweep", "--var", "R", "--values", "0,1"]).is_err());
    }

    #[test]
    fn config_echo_round_trips() {
        let s = parse(&[
            "sweep", "--var", "lambda", "--values", "0.001,0.01", "--method", "both", "--gamma", "0.3",
            "--sigma-n2-db", "-90", "--m-u", "2", "--seed", "17", "--format", "json",
        ])
        .unwrap();
        let text = s.to_config();
        let back: SweepSpec = text.parse().unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_config(), text);
    }

    #[test]
    fn splice_puts_file_flags_before_command_line_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# reference point\nrate = 0.5\nsigma_l2_db = -20\n\nm = 8\n").unwrap();
        let argv = ["fdcell", "eval", "--config", path.to_str().unwrap(), "--rate", "0.2"]
            .map(String::from)
            .to_vec();
        let spliced = splice_config(argv).unwrap();
        let cli = Cli::try_parse_from(spliced).unwrap();
        let Some(Command::Eval(o)) = cli.command else { panic!() };
        let s = SweepSpec::from_options(&o).unwrap();
        assert_eq!(s.rate, 0.2);
        assert_eq!(s.sigma_l2_db, -20.0);
        assert_eq!(s.params.m_b, 8);

        fs::write(&path, "rate 0.5\n").unwrap();
        assert!(config_file_args(&path).is_err());
    }
}
