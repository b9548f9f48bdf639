//! Input parsing, the test report, and JSON / CSV / markdown emitters used by
//! the `cauchy-gof` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{edf_statistics, pit_transform, EdfStatistics};
use crate::distributions::Sample;
use crate::error::{Error, Result};
use crate::estimation::{fit_cauchy_ml, standardize};
use crate::montecarlo::{null_draws, pvalue_from_null, upper_quantile, CriticalValueTable, Metadata, PowerTable};
use crate::statistic::{delta_scaled, Method, TestConfig};

/// Exit status for operational errors in the input or the flags.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when the sample is too small or degenerate for a fit.
pub const EXIT_DEGENERATE: i32 = 3;

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SampleTooSmall { .. } | Error::DegenerateSample(_) => EXIT_DEGENERATE,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::Parse(format!("unknown output format '{other}'"))),
        }
    }
}

// ---------------------------------------------------------------- input

/// Reads a data file, or standard input when `path` is `-`.
pub fn read_input(path: &Path, column: Option<&str>) -> Result<Sample> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?
    };
    parse_values(&text, column)
}

/// Parses one number per line, or one column of a CSV file when `column` is
/// given. `#` comments and blank lines are skipped in both layouts.
///
/// `column` is matched against the header row first; otherwise it is read as
/// a zero-based index, and a first row that does not parse in that column is
/// taken to be a header.
pub fn parse_values(text: &str, column: Option<&str>) -> Result<Sample> {
    let values = match column {
        None => parse_lines(text)?,
        Some(col) => parse_csv_column(text, col)?,
    };
    if values.is_empty() {
        return Err(Error::Parse("input contains no observations".into()));
    }
    Sample::new(values).map_err(|e| match e {
        Error::NonFinite(i) => Error::Parse(format!("observation {} is not finite", i + 1)),
        other => other,
    })
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{}' is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: '{}' is not finite", field.trim())));
    }
    Ok(v)
}

fn parse_lines(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_number(line, i + 1)?);
    }
    Ok(out)
}

fn parse_csv_column(text: &str, column: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let records: Vec<(usize, csv::StringRecord)> = reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| Error::Parse(format!("malformed CSV: {e}")))?;
            let line = r.position().map_or(0, |p| p.line() as usize);
            Ok((line, r))
        })
        .collect::<Result<_>>()?;
    let records: Vec<_> = records.into_iter().filter(|(_, r)| r.iter().any(|f| !f.is_empty())).collect();
    let Some((_, first)) = records.first() else {
        return Ok(Vec::new());
    };

    let (index, skip_first) = if let Some(i) = first.iter().position(|h| h == column) {
        (i, true)
    } else if let Ok(i) = column.parse::<usize>() {
        let header = first.get(i).is_some_and(|f| f.parse::<f64>().is_err());
        (i, header)
    } else {
        return Err(Error::Parse(format!("no CSV column named '{column}'")));
    };

    records
        .iter()
        .skip(usize::from(skip_first))
        .map(|(line, r)| {
            let field = r
                .get(index)
                .ok_or_else(|| Error::Parse(format!("line {line}: no column {index}")))?;
            parse_number(field, *line)
        })
        .collect()
}

/// One value per line in the shortest representation that parses back to
/// the same `f64`.
pub fn render_sample(x: &Sample) -> String {
    let mut out = String::with_capacity(x.len() * 24);
    for v in x.values() {
        let _ = writeln!(out, "{v:?}");
    }
    out
}

// ---------------------------------------------------------------- test

/// How the reject flag was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// `statistic > critical_value`.
    CriticalValue,
    /// `p_value < level`.
    PValue,
}

/// Options of a single test run.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRequest {
    pub cfg: TestConfig,
    pub level: f64,
    /// Null replications for a Monte Carlo p-value; switches the decision
    /// rule to the p-value.
    pub pvalue_reps: Option<usize>,
    /// Null replications for the critical value when no p-value is asked for.
    pub calibration_reps: usize,
    pub seed: u64,
    pub baselines: bool,
    pub threads: Option<usize>,
}

impl Default for TestRequest {
    fn default() -> Self {
        TestRequest {
            cfg: TestConfig::default(),
            level: 0.05,
            pvalue_reps: None,
            calibration_reps: 10_000,
            seed: 1,
            baselines: false,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub theta_hat: f64,
    pub lambda_hat: f64,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub name: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub reject: bool,
}

/// Outcome of testing one sample for the Cauchy hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub n: usize,
    pub config: TestConfig,
    pub method_used: Method,
    pub level: f64,
    /// Simulated upper-`level` point of the null distribution.
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub decision: Decision,
    pub reject: bool,
    /// Null replications behind the critical value and p-value.
    pub null_reps: usize,
    pub fit: FitSummary,
    /// The sample's bandwidth hit the quadrature node cap.
    pub quad_capped: bool,
    pub baselines: Option<Vec<BaselineResult>>,
    pub seed: u64,
    pub metadata: Metadata,
}

/// Fits, computes the statistic, and decides against a simulated null.
pub fn run_test(x: &Sample, req: &TestRequest) -> Result<TestReport> {
    req.cfg.validate()?;
    if !(req.level > 0.0 && req.level < 1.0) {
        return Err(Error::domain(format!("significance level {} outside (0, 1)", req.level)));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::SampleTooSmall { needed: 3, got: n });
    }
    let fit = fit_cauchy_ml(x, req.cfg.fit_mode)?;
    let y = standardize(x, &fit, req.cfg.exponent)?;
    let value = delta_scaled(y.values(), &req.cfg)?;
    let observed_edf = if req.baselines { Some(edf_statistics(&pit_transform(x, &fit)?)) } else { None };

    let reps = req.pvalue_reps.unwrap_or(req.calibration_reps);
    if reps < 99 {
        return Err(Error::domain(format!("at least 99 null replications required, got {reps}")));
    }
    let null = null_draws(n, &req.cfg, reps, req.seed, req.threads, req.baselines)?;
    let decide = |observed: f64, sims: Vec<f64>| {
        let p_value = req.pvalue_reps.map(|_| pvalue_from_null(observed, &sims));
        let mut sorted = sims;
        sorted.sort_by(f64::total_cmp);
        let critical_value = upper_quantile(&sorted, req.level);
        let reject = match p_value {
            Some(p) => p < req.level,
            None => observed > critical_value,
        };
        (critical_value, p_value, reject)
    };

    let (critical_value, p_value, reject) = decide(value.delta, null.iter().map(|d| d.delta).collect());
    let baselines = observed_edf.map(|obs| {
        let sims: Vec<EdfStatistics> = null.iter().map(|d| d.edf.expect("edf requested")).collect();
        EdfStatistics::NAMES
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let statistic = obs.as_array()[k];
                let (critical_value, p_value, reject) = decide(statistic, sims.iter().map(|s| s.as_array()[k]).collect());
                BaselineResult { name: name.to_string(), statistic, critical_value, p_value, reject }
            })
            .collect()
    });

    Ok(TestReport {
        statistic: value.delta,
        n,
        config: req.cfg,
        method_used: value.method_used,
        level: req.level,
        critical_value,
        p_value,
        decision: if p_value.is_some() { Decision::PValue } else { Decision::CriticalValue },
        reject,
        null_reps: reps,
        fit: FitSummary {
            theta_hat: fit.theta_hat,
            lambda_hat: fit.lambda_hat,
            converged: fit.converged,
            iterations: fit.iterations,
            log_likelihood: fit.log_likelihood,
        },
        quad_capped: value.quad_capped,
        baselines,
        seed: req.seed,
        metadata: Metadata::current(),
    })
}

// ---------------------------------------------------------------- emitters

fn json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn config_fields(c: &TestConfig) -> [(&'static str, String); 6] {
    [
        ("a", c.a.to_string()),
        ("gamma", c.gamma.to_string()),
        ("exponent", c.exponent.value().to_string()),
        ("fit_mode", c.fit_mode.to_string()),
        ("method", c.method.to_string()),
        ("quad_nodes", c.quad_nodes.to_string()),
    ]
}

fn config_field_names() -> Vec<String> {
    config_fields(&TestConfig::default()).iter().map(|(k, _)| k.to_string()).collect()
}

fn metadata_fields(m: &Metadata) -> [(&'static str, String); 2] {
    [("generator", m.generator.clone()), ("engine_version", m.engine_version.clone())]
}

fn markdown_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", header.iter().map(|_| "---|").collect::<String>());
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out
}

fn markdown_footer(out: &mut String, items: &[(&str, String)]) {
    out.push('\n');
    for (k, v) in items {
        let _ = writeln!(out, "- {k}: {v}");
    }
}

/// Emits a test report.
pub fn render_test_report(r: &TestReport, format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json(r);
    }
    let mut fields: Vec<(String, String)> = vec![
        ("statistic".into(), r.statistic.to_string()),
        ("n".into(), r.n.to_string()),
        ("method_used".into(), r.method_used.to_string()),
        ("level".into(), r.level.to_string()),
        ("critical_value".into(), r.critical_value.to_string()),
        ("p_value".into(), opt(r.p_value)),
        ("decision".into(), match r.decision {
            Decision::CriticalValue => "critical_value".into(),
            Decision::PValue => "p_value".into(),
        }),
        ("reject".into(), r.reject.to_string()),
        ("null_reps".into(), r.null_reps.to_string()),
        ("theta_hat".into(), r.fit.theta_hat.to_string()),
        ("lambda_hat".into(), r.fit.lambda_hat.to_string()),
        ("converged".into(), r.fit.converged.to_string()),
        ("quad_capped".into(), r.quad_capped.to_string()),
    ];
    for b in r.baselines.iter().flatten() {
        let key = b.name.to_ascii_lowercase();
        fields.push((format!("{key}_statistic"), b.statistic.to_string()));
        fields.push((format!("{key}_critical_value"), b.critical_value.to_string()));
        fields.push((format!("{key}_p_value"), opt(b.p_value)));
        fields.push((format!("{key}_reject"), b.reject.to_string()));
    }
    fields.push(("seed".into(), r.seed.to_string()));
    fields.extend(config_fields(&r.config).map(|(k, v)| (k.to_string(), v)));
    fields.extend(metadata_fields(&r.metadata).map(|(k, v)| (k.to_string(), v)));

    match format {
        OutputFormat::Csv => {
            let (h, v): (Vec<String>, Vec<String>) = fields.into_iter().unzip();
            csv_string(&h, &[v])
        }
        _ => {
            let rows: Vec<Vec<String>> = fields.into_iter().map(|(k, v)| vec![k, v]).collect();
            Ok(markdown_table(&["field".into(), "value".into()], &rows))
        }
    }
}

/// Emits critical values for several sample sizes. The markdown layout has
/// one row per significance level and one column per `n`.
pub fn render_critical_values(tables: &[CriticalValueTable], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(tables),
        OutputFormat::Csv => {
            let mut header: Vec<String> = ["n", "level", "critical_value", "reps", "seed"].map(String::from).to_vec();
            header.extend(config_field_names());
            header.extend(["generator", "engine_version"].map(String::from));
            let rows = tables
                .iter()
                .flat_map(|t| {
                    t.rows.iter().map(move |row| {
                        let mut r = vec![
                            t.n.to_string(),
                            row.level.to_string(),
                            row.critical_value.to_string(),
                            t.reps.to_string(),
                            t.seed.to_string(),
                        ];
                        r.extend(config_fields(&t.config).map(|(_, v)| v));
                        r.extend(metadata_fields(&t.metadata).map(|(_, v)| v));
                        r
                    })
                })
                .collect::<Vec<_>>();
            csv_string(&header, &rows)
        }
        OutputFormat::Markdown => {
            let mut levels: Vec<f64> = tables.iter().flat_map(|t| t.rows.iter().map(|r| r.level)).collect();
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            let mut header = vec!["Sig. \\ n".to_string()];
            header.extend(tables.iter().map(|t| t.n.to_string()));
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|&l| {
                    let mut r = vec![format!("{l}")];
                    r.extend(tables.iter().map(|t| {
                        t.critical_value(l).map_or_else(|| "-".to_string(), |c| format!("{c:.2}"))
                    }));
                    r
                })
                .collect();
            let mut out = markdown_table(&header, &rows);
            if let Some(t) = tables.first() {
                let mut meta: Vec<(&str, String)> = vec![("reps", t.reps.to_string()), ("seed", t.seed.to_string())];
                meta.extend(config_fields(&t.config));
                meta.extend(metadata_fields(&t.metadata));
                markdown_footer(&mut out, &meta);
            }
            Ok(out)
        }
    }
}

/// Emits power studies. The markdown layout has one row per alternative,
/// one percentage column per `(gamma, a)` configuration and, when the
/// baselines ran, one column per EDF test.
pub fn render_power(tables: &[PowerTable], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(tables),
        OutputFormat::Csv => {
            let mut header: Vec<String> = [
                "n", "alternative", "label", "level", "rejection_rate", "critical_value",
                "ks", "cvm", "ad", "watson", "reps", "calibration_reps", "seed",
            ]
            .map(String::from)
            .to_vec();
            header.extend(config_field_names());
            header.extend(["generator", "engine_version"].map(String::from));
            let rows = tables
                .iter()
                .flat_map(|t| {
                    t.rows.iter().map(move |row| {
                        let mut r = vec![
                            t.n.to_string(),
                            row.alternative.to_string(),
                            row.label.clone(),
                            t.level.to_string(),
                            row.rejection_rate.to_string(),
                            t.critical_value.to_string(),
                        ];
                        match row.baselines {
                            Some(b) => r.extend(b.as_array().map(|v| v.to_string())),
                            None => r.extend(std::iter::repeat_n(String::new(), 4)),
                        }
                        r.extend([t.reps.to_string(), t.calibration_reps.to_string(), t.seed.to_string()]);
                        r.extend(config_fields(&t.config).map(|(_, v)| v));
                        r.extend(metadata_fields(&t.metadata).map(|(_, v)| v));
                        r
                    })
                })
                .collect::<Vec<_>>();
            csv_string(&header, &rows)
        }
        OutputFormat::Markdown => {
            let Some(first) = tables.first() else {
                return Ok(String::new());
            };
            let mut header = vec!["alternative".to_string()];
            header.extend(tables.iter().map(|t| format!("gamma={} a={}", t.config.gamma, t.config.a)));
            let baseline_source = tables.iter().find(|t| t.baseline_critical_values.is_some());
            if baseline_source.is_some() {
                header.extend(EdfStatistics::NAMES.map(String::from));
            }
            let rows: Vec<Vec<String>> = first
                .rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut r = vec![row.label.clone()];
                    r.extend(tables.iter().map(|t| {
                        t.rows.get(i).map_or_else(|| "-".to_string(), |p| format!("{:.0}", p.percent()))
                    }));
                    if let Some(b) = baseline_source.and_then(|t| t.rows.get(i)).and_then(|p| p.baselines) {
                        r.extend(b.as_array().map(|v| format!("{:.0}", 100.0 * v)));
                    }
                    r
                })
                .collect();
            let mut out = markdown_table(&header, &rows);
            let mut meta: Vec<(&str, String)> = vec![
                ("n", first.n.to_string()),
                ("level", first.level.to_string()),
                ("reps", first.reps.to_string()),
                ("calibration_reps", first.calibration_reps.to_string()),
                ("seed", first.seed.to_string()),
                ("exponent", first.config.exponent.value().to_string()),
                ("fit_mode", first.config.fit_mode.to_string()),
                ("method", first.config.method.to_string()),
            ];
            let cvs = tables
                .iter()
                .map(|t| format!("{:.4} (gamma={} a={})", t.critical_value, t.config.gamma, t.config.a))
                .collect::<Vec<_>>()
                .join(", ");
            meta.push(("critical values", cvs));
            meta.extend(metadata_fields(&first.metadata));
            markdown_footer(&mut out, &meta);
            Ok(out)
        }
    }
}
