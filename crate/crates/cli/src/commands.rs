use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ccpt::baselines::{
    build_rpt, complexity_estimate, dft, dft_divisor_strengths, Method, MultiplicationUnit,
};
use ccpt::estimation::{
    build_dictionary_with, default_p_max, power_penalty, range_scan_parallel, DictionaryBasis,
};
use ccpt::signalgen::{SignalSpec, RNG_ALGORITHM};
use ccpt::{build_t, estimate_period, Complex64, PeriodStrengthProfile, ThresholdPolicy};
use serde::Serialize;

use crate::report::{
    strengths, Coefficient, CompareRow, DictionaryInfo, InputInfo, Report, ScanInfo, ScanRow,
};
use crate::signal_io::{read_signal, write_signal, write_table, Signal};
use crate::{AnalyzeMethod, BasisFamily, CliError, DictBasis, Preset};

#[derive(Serialize)]
struct SignalMetadata<'a> {
    schema: &'static str,
    spec: &'a SignalSpec,
    length: usize,
    real: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn gen(
    preset: Option<Preset>,
    seed: u64,
    tiled: Option<(usize, usize)>,
    len: Option<usize>,
    spec_file: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if len.is_some() && tiled.is_none() {
        return Err(CliError::Usage("--len only applies to --tiled-ccps".into()));
    }
    let spec = match (preset, tiled, spec_file) {
        (Some(Preset::Y1), _, _) => SignalSpec::PresetY1,
        (Some(Preset::Y2), _, _) => SignalSpec::PresetY2 { seed },
        (_, Some((period, k)), _) => SignalSpec::TiledCcps {
            period,
            k,
            len: len.unwrap_or_default(),
        },
        (_, _, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: invalid signal spec: {e}", path.display())))?
        }
        _ => return Err(CliError::Usage("no signal source given".into())),
    };
    let samples = spec.generate()?;
    let real = spec.is_real();
    let comment = serde_json::to_string(&spec).expect("spec serializes");

    let Some(output) = output else {
        let mut out = std::io::stdout().lock();
        let res = (|| {
            writeln!(out, "# {comment}")?;
            for v in &samples {
                if real {
                    writeln!(out, "{:.16e}", v.re)?;
                } else {
                    writeln!(out, "{:.16e},{:.16e}", v.re, v.im)?;
                }
            }
            out.flush()
        })();
        return stdout_result(res);
    };

    write_signal(output, &samples, real, &comment)?;
    let seeded = matches!(spec, SignalSpec::PresetY2 { .. });
    let meta = SignalMetadata {
        schema: "ccpt-signal/1",
        spec: &spec,
        length: samples.len(),
        real,
        rng: seeded.then_some(RNG_ALGORITHM),
        seed: seeded.then_some(seed),
    };
    let sidecar = sidecar_path(output);
    let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    text.push('\n');
    std::fs::write(&sidecar, text).map_err(|e| CliError::io(&sidecar, e))
}

fn input_info(path: &Path, signal: &Signal) -> InputInfo {
    InputInfo {
        length: signal.samples.len(),
        real: signal.real,
        source: path.display().to_string(),
    }
}

fn emit(report: &Report, output: Option<&Path>) -> Result<(), CliError> {
    let text = report.to_json();
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            match report.estimated_period {
                Some(p) => println!("estimated period {p}; report written to {}", path.display()),
                None => println!("report written to {}", path.display()),
            }
            Ok(())
        }
        None => stdout_result(std::io::stdout().lock().write_all(text.as_bytes())),
    }
}

/// A closed downstream pipe is not an error for a filter-style command.
fn stdout_result(res: std::io::Result<()>) -> Result<(), CliError> {
    match res {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Io(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|f| format!("{f:.16e}")).unwrap_or_default()
}

fn write_coefficient_plot(path: &Path, coeffs: &[Coefficient]) -> Result<(), CliError> {
    let header = ["index", "label", "frequency", "magnitude"].map(String::from);
    let rows: Vec<Vec<String>> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.label.clone(),
                fmt_opt(c.frequency),
                format!("{:.16e}", c.magnitude),
            ]
        })
        .collect();
    write_table(path, &header, &rows)
}

fn write_profile_plot(path: &Path, profile: &PeriodStrengthProfile) -> Result<(), CliError> {
    let header = ["period", "strength", "normalized"].map(String::from);
    let rows: Vec<Vec<String>> = strengths(profile)
        .into_iter()
        .map(|s| {
            vec![
                s.period.to_string(),
                format!("{:.16e}", s.raw),
                format!("{:.16e}", s.normalized),
            ]
        })
        .collect();
    write_table(path, &header, &rows)
}

fn coefficient_list(labels: Vec<String>, freqs: Option<Vec<f64>>, values: &[Complex64]) -> Vec<Coefficient> {
    labels
        .into_iter()
        .zip(values)
        .enumerate()
        .map(|(i, (label, v))| Coefficient {
            label,
            frequency: freqs.as_ref().map(|f| f[i]),
            magnitude: v.norm(),
        })
        .collect()
}

/// Coefficients and divisor profile of one full-length analysis.
fn full_length(
    x: &[Complex64],
    method: AnalyzeMethod,
    frame: Option<f64>,
) -> Result<(Vec<Coefficient>, PeriodStrengthProfile), CliError> {
    let n = x.len();
    Ok(match method {
        AnalyzeMethod::Ccpt | AnalyzeMethod::Rpt => {
            let t = if method == AnalyzeMethod::Ccpt {
                build_t(n)?
            } else {
                build_rpt(n)?
            };
            let beta = t.forward(x)?;
            let labels = t.labels().iter().map(|l| l.to_string()).collect();
            (
                coefficient_list(labels, t.frequency_labels(frame), &beta.values),
                beta.divisor_strengths(),
            )
        }
        AnalyzeMethod::Dft => {
            let spec = dft(x);
            let frame = frame.unwrap_or(n as f64);
            let labels = (0..n).map(|k| format!("bin:{k}")).collect();
            let freqs = (0..n).map(|k| k as f64 / n as f64 * frame).collect();
            (
                coefficient_list(labels, Some(freqs), &spec),
                dft_divisor_strengths(&spec),
            )
        }
    })
}

fn method_of(m: AnalyzeMethod) -> Method {
    match m {
        AnalyzeMethod::Ccpt => Method::Ccpt,
        AnalyzeMethod::Rpt => Method::Rpt,
        AnalyzeMethod::Dft => Method::Dft,
    }
}

pub fn analyze(
    input: &Path,
    method: AnalyzeMethod,
    frame: Option<f64>,
    policy: ThresholdPolicy,
    plot: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let signal = read_signal(input)?;
    let m = method_of(method);
    let start = Instant::now();
    let (coefficients, profile) = full_length(&signal.samples, method, frame)?;
    let period = estimate_period(&profile, policy)?;
    let runtime = start.elapsed().as_secs_f64();

    let mut report = Report::new("analyze", m.name(), input_info(input, &signal), policy.fraction);
    report.detected = profile.significant(policy);
    report.strengths = strengths(&profile);
    report.estimated_period = Some(period);
    report.runtime_seconds = runtime;
    report.complexity = Some(complexity_estimate(m, signal.samples.len(), None)?);
    report.coefficients = coefficients;
    if let Some(path) = plot {
        write_coefficient_plot(path, &report.coefficients)?;
    }
    emit(&report, output)
}

pub fn scan(
    input: &Path,
    n1: usize,
    jobs: usize,
    policy: ThresholdPolicy,
    csv: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let signal = read_signal(input)?;
    let start = Instant::now();
    let result = range_scan_parallel(&signal.samples, n1, policy, jobs)?;
    let runtime = start.elapsed().as_secs_f64();

    let rows: Vec<ScanRow> = result
        .records
        .iter()
        .map(|r| ScanRow {
            length: r.length,
            detected: r.detected.clone(),
            strengths: strengths(&r.profile),
        })
        .collect();
    if let Some(path) = csv {
        let header = ["length", "detected"].map(String::from);
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                let d: Vec<String> = r.detected.iter().map(|p| p.to_string()).collect();
                vec![r.length.to_string(), d.join(";")]
            })
            .collect();
        write_table(path, &header, &table)?;
    }

    let mut report = Report::new(
        "scan",
        Method::ScanCcpt.name(),
        input_info(input, &signal),
        policy.fraction,
    );
    report.runtime_seconds = runtime;
    report.complexity = Some(complexity_estimate(
        Method::ScanCcpt,
        signal.samples.len(),
        Some(n1),
    )?);
    report.scan = Some(ScanInfo {
        n1,
        jobs,
        duplicated_subspaces: result.duplicated_subspace_count(),
        rows,
    });
    emit(&report, output)
}

pub struct DictArgs {
    pub p_max: Option<usize>,
    pub basis: DictBasis,
    pub penalty_exp: f64,
    pub frame: Option<f64>,
}

fn dict_method(basis: DictBasis) -> (Method, DictionaryBasis) {
    match basis {
        DictBasis::Ccpt => (Method::DictCcpt, DictionaryBasis::Ccpt),
        DictBasis::Farey => (Method::DictFarey, DictionaryBasis::Farey),
        DictBasis::Rpt => (Method::DictRpt, DictionaryBasis::Rpt),
    }
}

struct DictRun {
    coefficients: Vec<Coefficient>,
    profile: PeriodStrengthProfile,
    info: DictionaryInfo,
}

fn run_dictionary(x: &[Complex64], args: &DictArgs) -> Result<DictRun, CliError> {
    if !(args.penalty_exp.is_finite()) {
        return Err(CliError::Usage("--penalty-exp must be finite".into()));
    }
    let n = x.len();
    let p_max = args.p_max.unwrap_or_else(|| default_p_max(n));
    let (method, basis) = dict_method(args.basis);
    let model = build_dictionary_with(n, p_max, basis, power_penalty(args.penalty_exp))?;
    let sol = model.solve(x)?;
    let labels = model.labels().iter().map(|l| l.to_string()).collect();
    Ok(DictRun {
        coefficients: coefficient_list(labels, model.frequency_labels(args.frame), &sol.coefficients),
        profile: sol.profile,
        info: DictionaryInfo {
            basis: method.name().trim_start_matches("dict-").to_string(),
            p_max,
            penalty_exponent: args.penalty_exp,
            width: model.width(),
            residual: sol.residual,
            condition: sol.condition,
            ridge: sol.ridge,
        },
    })
}

pub fn dict(
    input: &Path,
    args: DictArgs,
    policy: ThresholdPolicy,
    plot: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let signal = read_signal(input)?;
    let (method, _) = dict_method(args.basis);
    let start = Instant::now();
    let run = run_dictionary(&signal.samples, &args)?;
    let period = estimate_period(&run.profile, policy)?;
    let runtime = start.elapsed().as_secs_f64();

    let mut report = Report::new("dict", method.name(), input_info(input, &signal), policy.fraction);
    report.detected = run.profile.significant(policy);
    report.strengths = strengths(&run.profile);
    report.estimated_period = Some(period);
    report.runtime_seconds = runtime;
    report.complexity = Some(complexity_estimate(method, signal.samples.len(), None)?);
    report.coefficients = run.coefficients;
    report.dictionary = Some(run.info);
    if let Some(path) = plot {
        write_profile_plot(path, &run.profile)?;
    }
    emit(&report, output)
}

fn compare_row(
    method: Method,
    capabilities: (bool, bool, bool),
    complexity: ccpt::baselines::ComplexityReport,
    runtime: f64,
    profile: Option<&PeriodStrengthProfile>,
    detected: Vec<usize>,
    policy: ThresholdPolicy,
) -> CompareRow {
    CompareRow {
        method: method.name().to_string(),
        divisor_periods: capabilities.0,
        non_divisor_periods: capabilities.1,
        frequency: capabilities.2,
        multiplications: format!(
            "{} {}",
            complexity.count,
            match complexity.unit {
                MultiplicationUnit::Real => "real",
                MultiplicationUnit::Complex => "complex",
            }
        ),
        complexity,
        runtime_seconds: runtime,
        estimated_period: profile.and_then(|p| estimate_period(p, policy).ok()),
        detected,
    }
}

pub fn compare(
    input: &Path,
    n1: Option<usize>,
    with_dict: bool,
    p_max: Option<usize>,
    policy: ThresholdPolicy,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let signal = read_signal(input)?;
    let x = &signal.samples;
    let n = x.len();
    let mut rows = Vec::new();

    for (method, caps) in [
        (AnalyzeMethod::Dft, (true, false, true)),
        (AnalyzeMethod::Rpt, (true, false, false)),
        (AnalyzeMethod::Ccpt, (true, false, true)),
    ] {
        let start = Instant::now();
        let (_, profile) = full_length(x, method, None)?;
        let runtime = start.elapsed().as_secs_f64();
        let m = method_of(method);
        rows.push(compare_row(
            m,
            caps,
            complexity_estimate(m, n, None)?,
            runtime,
            Some(&profile),
            profile.significant(policy),
            policy,
        ));
    }

    if let Some(n1) = n1 {
        let start = Instant::now();
        range_scan_parallel(x, n1, policy, 1)?;
        let runtime = start.elapsed().as_secs_f64();
        rows.push(compare_row(
            Method::ScanCcpt,
            (true, true, true),
            complexity_estimate(Method::ScanCcpt, n, Some(n1))?,
            runtime,
            None,
            Vec::new(),
            policy,
        ));
    }

    if with_dict {
        for basis in [DictBasis::Ccpt, DictBasis::Farey, DictBasis::Rpt] {
            let args = DictArgs {
                p_max,
                basis,
                penalty_exp: 2.0,
                frame: None,
            };
            let start = Instant::now();
            let run = run_dictionary(x, &args)?;
            let runtime = start.elapsed().as_secs_f64();
            let (method, _) = dict_method(basis);
            rows.push(compare_row(
                method,
                (true, true, basis != DictBasis::Rpt),
                complexity_estimate(method, n, None)?,
                runtime,
                Some(&run.profile),
                run.profile.significant(policy),
                policy,
            ));
        }
    }

    let yes = |b: bool| if b { "yes" } else { "no" };
    println!(
        "{:<11} {:>8} {:>12} {:>9} {:>20} {:>12} {:>7}  detected",
        "method", "divisor", "non-divisor", "frequency", "multiplications", "runtime(s)", "period"
    );
    for r in &rows {
        let d: Vec<String> = r.detected.iter().map(|p| p.to_string()).collect();
        println!(
            "{:<11} {:>8} {:>12} {:>9} {:>20} {:>12.3e} {:>7}  {{{}}}",
            r.method,
            yes(r.divisor_periods),
            yes(r.non_divisor_periods),
            yes(r.frequency),
            r.multiplications,
            r.runtime_seconds,
            r.estimated_period.map_or("-".to_string(), |p| p.to_string()),
            d.join(",")
        );
    }

    if let Some(path) = output {
        let mut report = Report::new("compare", "compare", input_info(input, &signal), policy.fraction);
        report.runtime_seconds = rows.iter().map(|r| r.runtime_seconds).sum();
        report.comparison = rows;
        let text = report.to_json();
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

pub fn basis(
    n: usize,
    block: Option<usize>,
    kind: BasisFamily,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let t = match kind {
        BasisFamily::Ccpt => build_t(n)?,
        BasisFamily::Rpt => build_rpt(n)?,
    };
    let (matrix, labels) = match block {
        Some(p) => {
            let b = t.block(p).ok_or_else(|| {
                CliError::Usage(format!("block {p} is not a divisor of {n}"))
            })?;
            (b.matrix, b.labels)
        }
        None => (t.matrix().clone(), t.labels().to_vec()),
    };
    let header: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    let rows: Vec<Vec<String>> = matrix
        .row_iter()
        .map(|r| r.iter().map(|v| format!("{v:.16e}")).collect())
        .collect();
    match output {
        Some(path) => write_table(path, &header, &rows),
        None => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in std::iter::once(&header).chain(&rows) {
                w.write_record(r).expect("in-memory write");
            }
            let bytes = w.into_inner().expect("in-memory flush");
            stdout_result(std::io::stdout().lock().write_all(&bytes))
        }
    }
}
