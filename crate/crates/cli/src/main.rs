use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{ErrorKind, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dlparam::dltable::{
    builtin_sheet, load_sheet, save_sheet, sheet_from_json, sheet_to_json, validate_sheet,
    CharacterSheet, IrrLabel, SheetError,
};
use dlparam::recovery::{gram_independence, Recoverer, RecoveryError, ReportJson, SearchMode};
use dlparam::reductive::{check_q_condition, geom_class_id, GeomClassId};
use dlparam::{GroupSpec, TorusType};

const THREADS_VAR: &str = "DLPARAM_THREADS";
const ENUMERATION_BUDGET: u128 = 1 << 24;

#[derive(Parser)]
#[command(
    name = "dlparam",
    version,
    about = "Deligne-Lusztig parameters of GL_n(F_q) from torus character values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the regular-semisimple density condition on every torus.
    CheckQ {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        json: bool,
    },
    /// Emit the built-in character sheet as JSON.
    Table {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a sheet file.
    Validate {
        #[arg(long)]
        sheet: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Recover the parameter class of one row, or of every row.
    Recover {
        #[command(flatten)]
        source: SheetSource,
        /// Irreducible label, e.g. steinberg:0 or principal:0,1.
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        json: bool,
        /// Stop at the first verified expansion instead of proving uniqueness.
        #[arg(long)]
        fast: bool,
    },
    /// List the unipotent rows of a sheet.
    Unipotent {
        #[command(flatten)]
        source: SheetSource,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        fast: bool,
    },
    /// Enumerate geometric conjugacy classes of (torus, character) pairs.
    Classes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        json: bool,
    },
    /// Exact Gram determinant of torus characters on the regular locus.
    Gram {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Torus type as a partition, e.g. 1+1 or 2.
        #[arg(long)]
        torus: String,
        /// Character exponents, tuples separated by ';', e.g. "0,0;0,1".
        #[arg(long)]
        chars: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SheetSource {
    /// Use the built-in sheet for GL_n(F_q).
    #[arg(long)]
    q: Option<u64>,
    /// Rank for the built-in sheet.
    #[arg(long, default_value_t = 2, requires = "q")]
    n: usize,
    /// Load a sheet from a JSON file.
    #[arg(long, conflicts_with = "q")]
    sheet: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Gate(String),
    Sheet(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Gate(_) => 2,
            Failure::Sheet(_) => 3,
            Failure::Inconsistent(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Gate(m) | Failure::Sheet(m) | Failure::Inconsistent(m) => {
                m
            }
        }
    }
}

impl From<RecoveryError> for Failure {
    fn from(e: RecoveryError) -> Self {
        match e {
            RecoveryError::QConditionViolated { .. } => Failure::Gate(e.to_string()),
            e if e.is_inconsistency() => Failure::Inconsistent(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<dlparam::Error> for Failure {
    fn from(e: dlparam::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Output produced on success, or after a failure that still has partial
/// results to show.
struct Run {
    stdout: String,
    failure: Option<Failure>,
}

impl Run {
    fn ok(stdout: String) -> Self {
        Run {
            stdout,
            failure: None,
        }
    }
}

fn spec(n: usize, q: u64) -> Result<GroupSpec, Failure> {
    Ok(GroupSpec::new(n, q)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn load(source: &SheetSource) -> Result<CharacterSheet, Failure> {
    match (&source.sheet, source.q) {
        (Some(path), _) => load_sheet(path).map_err(|e| Failure::Sheet(e.to_string())),
        (None, Some(q)) => {
            spec(source.n, q)?;
            builtin_sheet(source.n, q).map_err(|e| Failure::Usage(e.to_string()))
        }
        (None, None) => Err(Failure::Usage("one of --q or --sheet is required".into())),
    }
}

fn recoverer(sheet: &CharacterSheet, fast: bool) -> Result<Recoverer<'_>, Failure> {
    let mode = if fast {
        SearchMode::Fast
    } else {
        SearchMode::Exhaustive
    };
    Ok(Recoverer::new(sheet)?.with_mode(mode))
}

#[derive(Serialize)]
struct TorusRatioJson {
    torus: String,
    ratio: String,
    holds: bool,
}

#[derive(Serialize)]
struct QReportJson {
    group: String,
    threshold: String,
    tori: Vec<TorusRatioJson>,
    holds: bool,
}

fn cmd_check_q(n: usize, q: u64, json: bool) -> Result<Run, Failure> {
    let report = check_q_condition(spec(n, q)?)?;
    let stdout = if json {
        to_json(&QReportJson {
            group: report.spec.to_string(),
            threshold: report.threshold.to_string(),
            tori: report
                .tori
                .iter()
                .map(|t| TorusRatioJson {
                    torus: t.torus.label(),
                    ratio: t.ratio.to_string(),
                    holds: t.holds,
                })
                .collect(),
            holds: report.holds,
        })
    } else {
        let mut s = format!("{}: threshold {}\n", report.spec, report.threshold);
        for t in &report.tori {
            let rel = if t.holds { "<" } else { ">=" };
            writeln!(
                s,
                "  torus {:<8} {} {rel} {}",
                t.torus.label(),
                t.ratio,
                report.threshold
            )
            .unwrap();
        }
        writeln!(s, "{}", if report.holds { "pass" } else { "fail" }).unwrap();
        s
    };
    let failure =
        (!report.holds).then(|| Failure::Gate(format!("q-condition fails for {}", report.spec)));
    Ok(Run { stdout, failure })
}

fn cmd_table(n: usize, q: u64, out: Option<PathBuf>) -> Result<Run, Failure> {
    spec(n, q)?;
    let sheet = builtin_sheet(n, q).map_err(|e| Failure::Usage(e.to_string()))?;
    let sheet_err = |e: SheetError| Failure::Usage(e.to_string());
    match out {
        Some(path) => {
            save_sheet(&sheet, &path).map_err(sheet_err)?;
            Ok(Run::ok(format!(
                "wrote {} rows to {}\n",
                sheet.rows.len(),
                path.display()
            )))
        }
        None => Ok(Run::ok(sheet_to_json(&sheet).map_err(sheet_err)?)),
    }
}

fn cmd_validate(path: PathBuf, json: bool) -> Result<Run, Failure> {
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Sheet(format!("{}: {e}", path.display())))?;
    let sheet = sheet_from_json(&text).map_err(|e| Failure::Sheet(e.to_string()))?;
    let report = validate_sheet(&sheet)?;
    let stdout = if json {
        to_json(&report)
    } else if report.is_ok() {
        format!("{}: {} rows, ok\n", sheet.spec, sheet.rows.len())
    } else {
        format!("{report}\n")
    };
    let failure = (!report.is_ok())
        .then(|| Failure::Sheet(format!("{} violation(s)", report.violations.len())));
    Ok(Run { stdout, failure })
}

fn cmd_recover(
    source: SheetSource,
    rho: Option<String>,
    json: bool,
    fast: bool,
) -> Result<Run, Failure> {
    let sheet = load(&source)?;
    let rec = recoverer(&sheet, fast)?;
    if let Some(rho) = rho {
        let label = IrrLabel::parse_canonical(&rho, sheet.spec)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let report = rec.recover(&label)?;
        let stdout = if json {
            to_json(&report.to_json())
        } else {
            report.to_string()
        };
        return Ok(Run::ok(stdout));
    }
    let mut reports: Vec<ReportJson> = Vec::new();
    let mut text = String::new();
    let mut errors = Vec::new();
    let mut failure = None;
    for (label, result) in rec.recover_all() {
        match result {
            Ok(r) => {
                text.push_str(&r.to_string());
                reports.push(r.to_json());
            }
            Err(e) => {
                errors.push(format!("{label}: {e}"));
                let f = Failure::from(e);
                if failure
                    .as_ref()
                    .is_none_or(|old: &Failure| f.code() > old.code())
                {
                    failure = Some(f);
                }
            }
        }
    }
    let failure = failure.map(|f| match f {
        Failure::Inconsistent(_) => Failure::Inconsistent(errors.join("\n")),
        other => other,
    });
    Ok(Run {
        stdout: if json { to_json(&reports) } else { text },
        failure,
    })
}

#[derive(Serialize)]
struct UnipotentJson {
    group: String,
    unipotent: Vec<String>,
}

fn cmd_unipotent(source: SheetSource, json: bool, fast: bool) -> Result<Run, Failure> {
    let sheet = load(&source)?;
    let rec = recoverer(&sheet, fast)?;
    let mut labels = Vec::new();
    for (label, result) in rec.recover_all() {
        let report = result.map_err(|e| match Failure::from(e) {
            Failure::Inconsistent(m) => Failure::Inconsistent(format!("{label}: {m}")),
            other => other,
        })?;
        if report.unipotent {
            labels.push(label.to_string());
        }
    }
    let stdout = if json {
        to_json(&UnipotentJson {
            group: sheet.spec.to_string(),
            unipotent: labels,
        })
    } else {
        let mut s = format!("{}: {} unipotent\n", sheet.spec, labels.len());
        for l in &labels {
            writeln!(s, "{l}").unwrap();
        }
        s
    };
    Ok(Run::ok(stdout))
}

#[derive(Serialize)]
struct ClassJson {
    epsilon: GeomClassId,
    torus: String,
    character: Vec<u64>,
    pairs: usize,
}

#[derive(Serialize)]
struct ClassesJson {
    group: String,
    count: usize,
    classes: Vec<ClassJson>,
}

fn cmd_classes(n: usize, q: u64, json: bool) -> Result<Run, Failure> {
    let spec = spec(n, q)?;
    // first pair in (torus, character) order represents its class
    let mut classes: BTreeMap<GeomClassId, (TorusType, Vec<u64>, usize)> = BTreeMap::new();
    for torus in spec.tori() {
        for chi in torus
            .rational_points()?
            .enumerate_chars(ENUMERATION_BUDGET)?
        {
            let id = geom_class_id(&torus, &chi)?;
            classes
                .entry(id)
                .or_insert_with(|| (torus.clone(), chi.cexps().to_vec(), 0))
                .2 += 1;
        }
    }
    let stdout = if json {
        to_json(&ClassesJson {
            group: spec.to_string(),
            count: classes.len(),
            classes: classes
                .into_iter()
                .map(|(epsilon, (t, c, pairs))| ClassJson {
                    epsilon,
                    torus: t.label(),
                    character: c,
                    pairs,
                })
                .collect(),
        })
    } else {
        let mut s = format!("{}: {} geometric conjugacy classes\n", spec, classes.len());
        for (id, (t, c, pairs)) in &classes {
            writeln!(s, "{id}  torus {} theta {c:?}  pairs {pairs}", t.label()).unwrap();
        }
        s
    };
    Ok(Run::ok(stdout))
}

#[derive(Serialize)]
struct GramJson {
    group: String,
    torus: String,
    chars: Vec<Vec<u64>>,
    level: u64,
    /// `[numerator, denominator, power]` triples of the determinant.
    det: Vec<(String, String, u64)>,
    nonzero: bool,
}

fn parse_chars(s: &str) -> Result<Vec<Vec<i64>>, Failure> {
    s.split(';')
        .map(|t| {
            t.split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("bad character {t:?}: {e}")))
        })
        .collect()
}

fn cmd_gram(n: usize, q: u64, torus: &str, chars: &str, json: bool) -> Result<Run, Failure> {
    let torus = TorusType::parse(spec(n, q)?, torus)?;
    let group = torus.rational_points()?;
    let chars = parse_chars(chars)?
        .iter()
        .map(|c| group.character(c))
        .collect::<Result<Vec<_>, _>>()?;
    let g = gram_independence(&torus, &chars)?;
    let stdout = if json {
        to_json(&GramJson {
            group: torus.spec().to_string(),
            torus: torus.label(),
            chars: chars.iter().map(|c| c.cexps().to_vec()).collect(),
            level: g.det.level(),
            det: g
                .det
                .to_triples()
                .into_iter()
                .map(|(a, b, p)| (a.to_string(), b.to_string(), p))
                .collect(),
            nonzero: g.nonzero,
        })
    } else {
        format!(
            "{} torus {}: det = {}\n{}\n",
            torus.spec(),
            torus.label(),
            g.det,
            if g.nonzero {
                "independent"
            } else {
                "dependent"
            }
        )
    };
    Ok(Run::ok(stdout))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = v.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<Run, Failure> {
    configure_threads()?;
    match cli.command {
        Command::CheckQ { n, q, json } => cmd_check_q(n, q, json),
        Command::Table { n, q, out } => cmd_table(n, q, out),
        Command::Validate { sheet, json } => cmd_validate(sheet, json),
        Command::Recover {
            source,
            rho,
            json,
            fast,
        } => cmd_recover(source, rho, json, fast),
        Command::Unipotent { source, json, fast } => cmd_unipotent(source, json, fast),
        Command::Classes { n, q, json } => cmd_classes(n, q, json),
        Command::Gram {
            n,
            q,
            torus,
            chars,
            json,
        } => cmd_gram(n, q, &torus, &chars, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (stdout, failure) = match run(cli) {
        Ok(r) => (r.stdout, r.failure),
        Err(f) => (String::new(), Some(f)),
    };
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(stdout.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
