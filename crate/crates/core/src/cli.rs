//! Command-line front end. `run` parses arguments, writes results to the
//! given stream and returns the process exit code: 0 on success, 1 for
//! usage or I/O errors, 2 when a fit does not converge.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baseline::BaselineSpec;
use crate::bgmo::{BgmoDistribution, BgmoParams};
use crate::data::{builtin_dataset, load_dataset, Builtin, Dataset, Format};
use crate::error::{Error, Result};
use crate::estimate::{fit_mle, FitConfig, FitResult, ModelTemplate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bgmo", version, about = "Beta generalized Marshall-Olkin-G distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate pdf, cdf, sf, hrf, rhrf or chrf at given points
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "fn", value_enum, default_value = "pdf")]
        function: EvalFn,
        /// Evaluation points (repeat or comma-separate)
        #[arg(long = "t", required = true, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Quantiles at given probabilities
    Quantile {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "u", required = true, value_delimiter = ',')]
        u: Vec<f64>,
    },
    /// Draw a seeded random sample
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-likelihood fit; writes a JSON report
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        fit: FitArgs,
        /// Hold a parameter fixed, e.g. --fix theta=1
        #[arg(long)]
        fix: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit several templates and rank them by AIC (ties by BIC)
    Compare {
        #[command(flatten)]
        data: DataArgs,
        /// Template as <model>/<baseline>, e.g. bgmo/weibull or mo/weibull
        #[arg(long = "template", required = true)]
        templates: Vec<String>,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fitted (or given) pdf and cdf on a grid, with a histogram of the data
    Curves {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Fit the model to the data first instead of using the given values
        #[arg(long)]
        fit_first: bool,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        /// Histogram bin count; Freedman-Diaconis when omitted
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// pdf or hrf of several models on a common grid
    Shapes {
        /// Model as "<m> <n> <theta> <alpha> ; <baseline spec>"; a default gallery is used when absent
        #[arg(long = "spec")]
        specs: Vec<String>,
        #[arg(long = "fn", value_enum, default_value = "pdf")]
        function: ShapeFn,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFn {
    Pdf,
    Cdf,
    Sf,
    Hrf,
    Rhrf,
    Chrf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeFn {
    Pdf,
    Hrf,
}

/// Sub-models obtained by holding family parameters at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Bgmo,
    /// θ = 1
    Bmo,
    /// m = n = 1
    Gmo,
    /// m = n = θ = 1
    Mo,
    /// θ = α = 1
    BetaG,
}

impl ModelKind {
    fn fixed(self) -> &'static [&'static str] {
        match self {
            ModelKind::Bgmo => &[],
            ModelKind::Bmo => &["theta"],
            ModelKind::Gmo => &["m", "n"],
            ModelKind::Mo => &["m", "n", "theta"],
            ModelKind::BetaG => &["theta", "alpha"],
        }
    }

    fn label(self) -> &'static str {
        match self {
            ModelKind::Bgmo => "BGMO",
            ModelKind::Bmo => "BMO",
            ModelKind::Gmo => "GMO",
            ModelKind::Mo => "MO",
            ModelKind::BetaG => "Beta",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "bgmo")]
    pub model: ModelKind,
    /// Baseline, e.g. "weibull lambda=0.5 beta=2"; omitted parameters are 1
    #[arg(long, default_value = "exponential")]
    pub baseline: String,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl ModelArgs {
    pub fn template(&self) -> Result<ModelTemplate> {
        let baseline: BaselineSpec = self.baseline.parse()?;
        let fixed = self.model.fixed();
        let mut vals = [("m", self.m), ("n", self.n), ("theta", self.theta), ("alpha", self.alpha)];
        for (name, v) in vals.iter_mut() {
            if fixed.contains(name) {
                if let Some(x) = *v {
                    if x != 1.0 {
                        return Err(Error::InvalidParameter(format!(
                            "{name} is fixed at 1 in the {} model (got {x})",
                            self.model.label()
                        )));
                    }
                }
                *v = Some(1.0);
            }
        }
        let get = |i: usize| vals[i].1.unwrap_or(1.0);
        let params = BgmoParams::new(get(0), get(1), get(2), get(3))?;
        let name = format!("{}-{}", self.model.label(), baseline.tag());
        let mut t = ModelTemplate::new(name, BgmoDistribution::new(params, baseline));
        for name in fixed {
            t = t.fix(name, 1.0)?;
        }
        Ok(t)
    }

    pub fn distribution(&self) -> Result<BgmoDistribution> {
        Ok(self.template()?.start)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// A file path or builtin:<turbocharger|nicotine|carbon_fibres>
    #[arg(long)]
    pub data: String,
    #[arg(long, default_value = "auto")]
    pub format: String,
}

impl DataArgs {
    pub fn load(&self) -> Result<Dataset> {
        match self.data.strip_prefix("builtin:") {
            Some(name) => Ok(builtin_dataset(name.parse::<Builtin>()?)),
            None => load_dataset(&self.data, self.format.parse::<Format>()?),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 24)]
    pub starts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    /// Intervals are reported at level 1 − gamma
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
}

impl FitArgs {
    pub fn config(&self) -> FitConfig {
        FitConfig {
            seed: self.seed,
            starts: self.starts,
            max_iter: self.max_iter,
            gamma: self.gamma,
            ..FitConfig::default()
        }
    }
}

/// Parses arguments (the first item is the program name) and executes.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(text: &str, path: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Eval { model, function, t } => {
            let d = model.distribution()?;
            let name = format!("{function:?}").to_lowercase();
            let mut s = format!("# t\t{name}\n");
            for x in t {
                let v = match function {
                    EvalFn::Pdf => d.pdf(x),
                    EvalFn::Cdf => d.cdf(x),
                    EvalFn::Sf => d.sf(x),
                    EvalFn::Hrf => d.hrf(x),
                    EvalFn::Rhrf => d.rhrf(x),
                    EvalFn::Chrf => d.chrf(x),
                };
                writeln!(s, "{x}\t{}", fmt_num(v)).unwrap();
            }
            emit(&s, &None, out)?;
            Ok(EXIT_OK)
        }
        Command::Quantile { model, u } => {
            let d = model.distribution()?;
            let mut s = String::from("# u\tquantile\n");
            for p in u {
                writeln!(s, "{p}\t{}", d.quantile(p)?).unwrap();
            }
            emit(&s, &None, out)?;
            Ok(EXIT_OK)
        }
        Command::Sample { model, count, seed, out: path } => {
            let d = model.distribution()?;
            let mut s = String::from("# sample\n");
            for v in d.sample(count, seed)? {
                writeln!(s, "{v}").unwrap();
            }
            emit(&s, &path, out)?;
            Ok(EXIT_OK)
        }
        Command::Fit { data, model, fit, fix, out: path } => {
            let ds = data.load()?;
            let mut template = model.template()?;
            for f in &fix {
                let (name, v) = f
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParameter(format!("--fix expects name=value, got '{f}'")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("--fix value '{v}' is not a number")))?;
                template = template.fix(name.trim(), v)?;
            }
            let r = fit_mle(&template, &ds.values, &fit.config())?;
            let mut text = serde_json::to_string_pretty(&r.to_json()).expect("report serializes");
            text.push('\n');
            emit(&text, &path, out)?;
            Ok(if r.converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
        }
        Command::Compare { data, templates, fit, out: path } => {
            if templates.len() < 2 {
                return Err(Error::InvalidParameter("compare needs at least two --template values".into()));
            }
            let ds = data.load()?;
            let cfg = fit.config();
            let rows = compare(&ds.values, &templates, &cfg);
            let mut s = String::from("# rank\tmodel\tk\tlogLik\taic\tbic\tcaic\thqic\tconverged\tstatus\n");
            for (i, (label, res)) in rows.iter().enumerate() {
                match res {
                    Ok(r) => writeln!(
                        s,
                        "{}\t{label}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{:.4}\t{}\tok",
                        i + 1,
                        r.k_params,
                        r.log_likelihood,
                        r.criteria.aic,
                        r.criteria.bic,
                        r.criteria.caic.map_or("nan".into(), |c| format!("{c:.4}")),
                        r.criteria.hqic,
                        r.converged
                    ),
                    Err(e) => writeln!(s, "-\t{label}\t-\tnan\tnan\tnan\tnan\tnan\tfalse\tfailed: {e}"),
                }
                .unwrap();
            }
            emit(&s, &path, out)?;
            Ok(EXIT_OK)
        }
        Command::Curves { data, model, fit_first, fit, grid, bins, out: path } => {
            let ds = data.load()?;
            let template = model.template()?;
            let d = if fit_first {
                let r = fit_mle(&template, &ds.values, &fit.config())?;
                r.distribution(&template)?
            } else {
                template.start
            };
            emit(&curves_table(&d, &ds.values, grid, bins)?, &path, out)?;
            Ok(EXIT_OK)
        }
        Command::Shapes { specs, function, grid, from, to, out: path } => {
            let models: Vec<(String, BgmoDistribution)> = if specs.is_empty() {
                default_gallery()
            } else {
                specs.iter().map(|s| parse_shape_spec(s).map(|d| (s.clone(), d))).collect::<Result<_>>()?
            };
            emit(&shapes_table(&models, function, grid, from, to)?, &path, out)?;
            Ok(EXIT_OK)
        }
    }
}

/// Fits each `<model>/<baseline>` template and orders the successful fits
/// by AIC, then BIC; failures follow in input order.
pub fn compare(data: &[f64], templates: &[String], cfg: &FitConfig) -> Vec<(String, Result<FitResult>)> {
    let mut rows: Vec<(String, Result<FitResult>)> = templates
        .iter()
        .map(|spec| {
            let res = parse_template(spec).and_then(|t| fit_mle(&t, data, cfg));
            (spec.clone(), res)
        })
        .collect();
    rows.sort_by(|a, b| match (&a.1, &b.1) {
        (Ok(x), Ok(y)) => x
            .criteria
            .aic
            .total_cmp(&y.criteria.aic)
            .then(x.criteria.bic.total_cmp(&y.criteria.bic)),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Equal,
    });
    rows
}

pub fn parse_template(spec: &str) -> Result<ModelTemplate> {
    let (kind, baseline) = spec
        .split_once('/')
        .ok_or_else(|| Error::InvalidParameter(format!("template '{spec}' is not <model>/<baseline>")))?;
    let model = ModelKind::from_str(kind.trim(), true)
        .map_err(|_| Error::InvalidParameter(format!("unknown model '{kind}' (bgmo, bmo, gmo, mo, beta-g)")))?;
    ModelArgs {
        model,
        baseline: baseline.trim().to_string(),
        m: None,
        n: None,
        theta: None,
        alpha: None,
    }
    .template()
}

/// "<m> <n> <theta> <alpha> ; <baseline spec>"
pub fn parse_shape_spec(spec: &str) -> Result<BgmoDistribution> {
    let (shapes, baseline) = spec
        .split_once(';')
        .ok_or_else(|| Error::InvalidParameter(format!("shape spec '{spec}' lacks ';'")))?;
    let v: Vec<f64> = shapes
        .split_whitespace()
        .map(|x| x.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidParameter(format!("shape spec '{spec}': {e}")))?;
    if v.len() != 4 {
        return Err(Error::InvalidParameter(format!("shape spec '{spec}' needs m n theta alpha")));
    }
    Ok(BgmoDistribution::new(
        BgmoParams::new(v[0], v[1], v[2], v[3])?,
        baseline.trim().parse()?,
    ))
}

/// Gallery used by `shapes` without --spec; includes a bathtub hazard.
pub fn default_gallery() -> Vec<(String, BgmoDistribution)> {
    [
        "1 1 1 1 ; exponential lambda=1",
        "2 1.5 0.8 2 ; exponential lambda=1",
        "0.5 2 1 1 ; weibull lambda=1 beta=3",
        "3 0.5 2 0.5 ; weibull lambda=1 beta=1.5",
        "1.5 1.5 0.5 5 ; lomax beta=2 delta=1",
    ]
    .iter()
    .map(|s| (s.to_string(), parse_shape_spec(s).expect("gallery entry parses")))
    .collect()
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Freedman-Diaconis bin count: width 2·IQR·n^{-1/3}; √n bins when the
/// IQR vanishes.
pub fn fd_bins(data: &[f64]) -> usize {
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let range = s[s.len() - 1] - s[0];
    if range == 0.0 {
        return 1;
    }
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    if iqr > 0.0 {
        let width = 2.0 * iqr / (s.len() as f64).cbrt();
        ((range / width).ceil() as usize).max(1)
    } else {
        ((s.len() as f64).sqrt().ceil() as usize).max(1)
    }
}

/// (low edge, high edge, density) per bin; densities integrate to 1.
pub fn histogram(data: &[f64], bins: usize) -> Result<Vec<(f64, f64, f64)>> {
    if data.is_empty() || bins == 0 {
        return Err(Error::InvalidParameter("histogram needs data and at least one bin".into()));
    }
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &x in data {
        let i = (((x - lo) / width).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    let n = data.len() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let a = lo + i as f64 * width;
            (a, a + width, c as f64 / (n * width))
        })
        .collect())
}

/// Columns t, pdf, cdf over [min − 5% range, max + 5% range], widened to
/// cover the model's 0.001 and 0.999 quantiles, side by side
/// with the histogram columns (padded with nan past the last bin).
pub fn curves_table(d: &BgmoDistribution, data: &[f64], grid: usize, bins: Option<usize>) -> Result<String> {
    if data.is_empty() {
        return Err(Error::InvalidParameter("curves need a nonempty dataset".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r = hi - lo;
    let a = (lo - 0.05 * r).min(d.quantile(0.001)?).max(d.support_low());
    let b = (hi + 0.05 * r).max(d.quantile(0.999)?);
    let hist = histogram(data, bins.unwrap_or_else(|| fd_bins(data)))?;
    let mut s = String::from("# t\tpdf\tcdf\tbin_low\tbin_high\tbin_density\n");
    for i in 0..grid.max(hist.len()) {
        let (t, f, c) = if i < grid {
            let t = a + (b - a) * i as f64 / (grid - 1) as f64;
            (t, d.pdf(t), d.cdf(t))
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        let (h0, h1, hd) = hist.get(i).copied().unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            fmt_num(t),
            fmt_num(f),
            fmt_num(c),
            fmt_num(h0),
            fmt_num(h1),
            fmt_num(hd)
        )
        .unwrap();
    }
    Ok(s)
}

/// One column per model. The default range runs from just above the
/// lowest support point to the largest 0.99 quantile.
pub fn shapes_table(
    models: &[(String, BgmoDistribution)],
    function: ShapeFn,
    grid: usize,
    from: Option<f64>,
    to: Option<f64>,
) -> Result<String> {
    if models.is_empty() || grid < 2 {
        return Err(Error::InvalidParameter("shapes need at least one model and two grid points".into()));
    }
    let low = models.iter().map(|(_, d)| d.support_low()).fold(f64::INFINITY, f64::min);
    let high = models
        .iter()
        .map(|(_, d)| d.quantile(0.99))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let a = from.unwrap_or(if low.is_finite() { low } else { 0.0 });
    let b = to.unwrap_or(high);
    if !(b > a) {
        return Err(Error::InvalidParameter(format!("empty shape range [{a}, {b}]")));
    }
    let step = (b - a) / grid as f64;
    let name = match function {
        ShapeFn::Pdf => "pdf",
        ShapeFn::Hrf => "hrf",
    };
    let mut s = String::from("# t");
    for (label, _) in models {
        write!(s, "\t{name}[{label}]").unwrap();
    }
    s.push('\n');
    for i in 1..=grid {
        let t = a + step * i as f64;
        write!(s, "{t}").unwrap();
        for (_, d) in models {
            let v = match function {
                ShapeFn::Pdf => d.pdf(t),
                ShapeFn::Hrf => d.hrf(t),
            };
            write!(s, "\t{}", fmt_num(v)).unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("bgmo").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn rows(text: &str) -> Vec<Vec<f64>> {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split('\t').map(|x| x.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn quantile_and_eval() {
        let (code, out, _) = call(&["quantile", "--u", "0.5"]);
        assert_eq!(code, 0);
        assert!((rows(&out)[0][1] - std::f64::consts::LN_2).abs() < 1e-12);
        let (code, out, _) = call(&["eval", "--fn", "pdf", "--t", "-1"]);
        assert_eq!(code, 0);
        assert_eq!(rows(&out)[0][1], 0.0);
        assert!(out.starts_with("# t\tpdf\n"));
    }

    #[test]
    fn sample_is_seeded() {
        let a = call(&["sample", "--count", "5", "--seed", "1"]);
        let b = call(&["sample", "--count", "5", "--seed", "1"]);
        assert_eq!(a, b);
        assert_eq!(rows(&a.1).len(), 5);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["eval", "--t", "1", "--m", "-2"]).0, 1);
        assert_eq!(call(&["fit", "--data", "/nonexistent/missing.txt"]).0, 1);
        assert_eq!(call(&["compare", "--data", "builtin:turbocharger", "--template", "bgmo/weibull"]).0, 1);
        assert_eq!(call(&["eval", "--model", "mo", "--m", "2", "--t", "1"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn histogram_normalizes() {
        let data: Vec<f64> = (0..97).map(|i| ((i * 37) % 101) as f64 * 0.13).collect();
        let h = histogram(&data, fd_bins(&data)).unwrap();
        let total: f64 = h.iter().map(|(a, b, d)| (b - a) * d).sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert_eq!(histogram(&[2.0, 2.0], 3).unwrap().iter().map(|x| x.2).sum::<f64>(), 1.0);
    }

    #[test]
    fn gallery_has_non_monotone_hazard() {
        let text = shapes_table(&default_gallery(), ShapeFn::Hrf, 400, None, None).unwrap();
        let data = rows(&text);
        let k = data[0].len() - 1;
        let found = (1..=k).any(|c| {
            let slopes: Vec<f64> = data.windows(2).map(|w| w[1][c] - w[0][c]).collect();
            slopes.iter().any(|&s| s < 0.0) && slopes.iter().any(|&s| s > 0.0)
        });
        assert!(found);
    }
}
