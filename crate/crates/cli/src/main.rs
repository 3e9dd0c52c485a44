mod cache;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbidt::acceptance::{self, DEFAULT_SEED};
use orbidt::laurent::{format_rational, RationalPoint};
use orbidt::pleth::{numerical_closed_form, pexp_eval, CRingEval, Formula, PointEval};
use orbidt::points::PointSampler;
use orbidt::qseries::{Coefficient, FixedPointTable, QSeries};
use orbidt::transfer::{check_a_commutation, check_gamma_commutation, z_limit};
use orbidt::vertex::ahat_limit;
use orbidt::{vertex, Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use cache::Cache;
use report::{compare_series, series_output, CompareReport, Comparison, Format, Output};

/// Exact degree-zero DT series of [C^3/mu_r]: fixed-point sums, closed forms and transfer matrices.
#[derive(Parser, Debug)]
#[command(name = "orbidt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Order of the cyclic group.
    #[arg(long, global = true, default_value_t = 1)]
    r: usize,
    /// Truncation: maximal number of boxes (total q-degree).
    #[arg(long = "max-boxes", global = true, default_value_t = 4)]
    max_boxes: usize,
    /// Number of seeded random points to draw.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Explicit point s1 s2 s3, rationals as p/q; may be repeated.
    #[arg(long, global = true, num_args = 3, value_names = ["S1", "S2", "S3"], action = clap::ArgAction::Append, allow_hyphen_values = true)]
    point: Vec<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = SeriesMode::Point)]
    mode: SeriesMode,
    /// F, Fr, Fcol, Fnum, Flim or main.
    #[arg(long, global = true, default_value = "main")]
    formula: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long = "cache-dir", global = true, env = "ORBIDT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Recompute fixed points instead of reading or writing the cache.
    #[arg(long = "no-cache", global = true)]
    no_cache: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesMode {
    Point,
    Limit,
    Numerical,
}

impl SeriesMode {
    fn name(self) -> &'static str {
        match self {
            SeriesMode::Point => "point",
            SeriesMode::Limit => "limit",
            SeriesMode::Numerical => "numerical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Producer {
    /// Sum over colored plane partitions.
    Enumerated,
    /// Limit side computed from the index alone.
    Index,
    /// Plethystic closed form.
    Closedform,
    /// Vacuum expectation of the operator word.
    Transfer,
}

impl Producer {
    fn name(self) -> &'static str {
        match self {
            Producer::Enumerated => "enumerated",
            Producer::Index => "index",
            Producer::Closedform => "closedform",
            Producer::Transfer => "transfer",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List colored plane partitions with 1..=N boxes.
    Enumerate,
    /// Per-partition weights, index and limit weight.
    Vertex,
    /// Localization series summed over fixed points.
    Zseries,
    /// Closed plethystic formula, expanded.
    Closedform,
    /// Limit series in c (same as `zseries --mode limit`).
    Limit,
    /// Limit series from the transfer matrix, with operator checks.
    Transfer,
    /// Compare two series producers coefficient by coefficient.
    Compare {
        #[arg(long, value_enum, default_value_t = Producer::Enumerated)]
        lhs: Producer,
        #[arg(long, value_enum, default_value_t = Producer::Closedform)]
        rhs: Producer,
        /// Include wall-clock time in the report (breaks byte determinism).
        #[arg(long)]
        timings: bool,
    },
    /// Run the acceptance suite.
    Selfcheck {
        /// Run only these criteria, e.g. A1.
        #[arg(long)]
        only: Vec<String>,
    },
}

enum Outcome {
    Done(Output),
    Verdict(Output, bool),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(j) = cli.opts.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(outcome) => {
            let (out, ok) = match outcome {
                Outcome::Done(o) => (o, true),
                Outcome::Verdict(o, ok) => (o, ok),
            };
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.render(cli.opts.format).as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    if o.r == 0 {
        return Err(Error::Usage("--r must be at least 1".into()));
    }
    let cache = Cache::new(if o.no_cache {
        None
    } else {
        Some(o.cache_dir.clone().unwrap_or_else(|| std::env::temp_dir().join("orbidt-cache")))
    });
    match &cli.command {
        Command::Enumerate => enumerate(o, &cache).map(Outcome::Done),
        Command::Vertex => vertex_records(o, &cache).map(Outcome::Done),
        Command::Zseries => zseries(o, &cache, o.mode).map(Outcome::Done),
        Command::Limit => zseries(o, &cache, SeriesMode::Limit).map(Outcome::Done),
        Command::Closedform => closedform(o).map(Outcome::Done),
        Command::Transfer => transfer(o),
        Command::Compare { lhs, rhs, timings } => compare(o, &cache, *lhs, *rhs, *timings),
        Command::Selfcheck { only } => selfcheck(o, only),
    }
}

fn explicit_points(o: &Opts) -> Result<Vec<RationalPoint>> {
    o.point.chunks(3).map(RationalPoint::parse).collect()
}

/// Explicit points first, then `--points` seeded draws (default `default_count` when none are explicit).
/// Draws are rejected while `f` reports a vanishing bracket.
fn gather_points<T>(
    o: &Opts,
    default_count: usize,
    f: impl Fn(&RationalPoint) -> Result<T>,
) -> Result<Vec<(RationalPoint, T)>> {
    let explicit = explicit_points(o)?;
    let count = o.points.unwrap_or(if explicit.is_empty() { default_count } else { 0 });
    let mut out = Vec::with_capacity(explicit.len() + count);
    for p in explicit {
        let v = f(&p)?;
        out.push((p, v));
    }
    let mut sampler = PointSampler::new(o.seed);
    for _ in 0..count {
        out.push(sampler.draw_generic(&f)?);
    }
    Ok(out)
}

fn point_strings(p: &RationalPoint) -> [String; 3] {
    p.to_strings()
}

fn enumerate(o: &Opts, cache: &Cache) -> Result<Output> {
    let table = cache.table(o.r, o.max_boxes)?;
    let pts: Vec<_> = table.points().iter().filter(|f| !f.partition.is_empty()).collect();
    let records: Vec<Value> = pts
        .iter()
        .map(|f| {
            json!({
                "size": f.partition.len(),
                "boxes": f.partition.boxes(),
                "alpha": f.alpha.0,
                "index": f.index,
            })
        })
        .collect();
    let rows = pts
        .iter()
        .map(|f| {
            vec![
                f.partition.len().to_string(),
                f.partition.to_string(),
                report::alpha_key(&f.alpha),
                f.index.to_string(),
            ]
        })
        .collect();
    Ok(Output {
        json: json!({"r": o.r, "N": o.max_boxes, "count": records.len(), "records": records}),
        header: vec!["size", "boxes", "alpha", "index"],
        rows,
    })
}

fn vertex_records(o: &Opts, cache: &Cache) -> Result<Output> {
    let table = cache.table(o.r, o.max_boxes)?;
    let explicit = explicit_points(o)?;
    if explicit.len() > 1 {
        return Err(Error::Usage("vertex takes at most one --point".into()));
    }
    let pt = explicit.into_iter().next();
    let pts: Vec<_> = table.points().iter().filter(|f| !f.partition.is_empty()).collect();
    let records = pts
        .par_iter()
        .map(|f| {
            let limit = ahat_limit(&f.weights)?;
            let mut rec = json!({
                "boxes": f.partition.boxes(),
                "alpha": f.alpha.0,
                "W": f.weights.0,
                "index": f.index,
                "ahat_limit": limit.to_json(),
            });
            // a vanishing bracket at the chosen point is reported as null
            let at = pt.as_ref().map(|p| vertex::ahat_eval(&f.weights, p).ok().map(|v| format_rational(&v)));
            if let Some(v) = &at {
                rec["ahat_at_point"] = json!(v);
            }
            Ok((rec, limit.to_string(), at.flatten()))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = pts
        .iter()
        .zip(&records)
        .map(|(f, (_, lim, at))| {
            vec![
                f.partition.to_string(),
                report::alpha_key(&f.alpha),
                f.weights.to_string(),
                f.index.to_string(),
                lim.clone(),
                at.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut json = json!({
        "r": o.r,
        "N": o.max_boxes,
        "records": records.into_iter().map(|(v, _, _)| v).collect::<Vec<_>>(),
    });
    if let Some(p) = &pt {
        json["point"] = json!(point_strings(p));
    }
    Ok(Output {
        json,
        header: vec!["boxes", "alpha", "W", "index", "ahat_limit", "ahat_at_point"],
        rows,
    })
}

fn single_point<T>(o: &Opts, f: impl Fn(&RationalPoint) -> Result<T>) -> Result<(RationalPoint, T)> {
    let mut all = gather_points(o, 1, f)?;
    if all.len() != 1 {
        return Err(Error::Usage("this command evaluates at exactly one point".into()));
    }
    Ok(all.remove(0))
}

fn zseries(o: &Opts, cache: &Cache, mode: SeriesMode) -> Result<Output> {
    let table = cache.table(o.r, o.max_boxes)?;
    let n = o.max_boxes;
    Ok(match mode {
        SeriesMode::Point => {
            let (pt, z) = single_point(o, |p| table.z_point(p, n))?;
            series_output(&z, "point", vec![("point", json!(point_strings(&pt)))])
        }
        SeriesMode::Limit => series_output(&table.z_limit(n)?, "limit", vec![]),
        SeriesMode::Numerical => series_output(&table.z_numerical(n)?, "numerical", vec![]),
    })
}

fn closedform(o: &Opts) -> Result<Output> {
    let formula: Formula = o.formula.parse()?;
    let (r, n) = (o.r, o.max_boxes);
    let name = json!(formula.name());
    let s = formula.build(r)?;
    Ok(match formula {
        Formula::Flim => series_output(&pexp_eval(&s, n, &CRingEval)?, "limit", vec![("formula", name)]),
        Formula::Fnum => series_output(&numerical_closed_form(r, n)?, "numerical", vec![("formula", name)]),
        _ => {
            let (pt, z) = single_point(o, |p| pexp_eval(&s, n, &PointEval(p.clone())))?;
            series_output(&z, "point", vec![("formula", name), ("point", json!(point_strings(&pt)))])
        }
    })
}

fn transfer(o: &Opts) -> Result<Outcome> {
    let z = z_limit(o.r, o.max_boxes)?;
    let check_order = o.max_boxes.min(4);
    let checks = [check_gamma_commutation(check_order)?, check_a_commutation(o.r, check_order)?];
    let ok = checks.iter().all(|c| c.passed);
    let mut out = series_output(&z, "limit", vec![("checks", serde_json::to_value(&checks).expect("serializable"))]);
    for c in &checks {
        out.rows.push(vec![format!("check:{}", c.name), if c.passed { "pass" } else { "fail" }.into()]);
    }
    Ok(Outcome::Verdict(out, ok))
}

fn limit_series(
    p: Producer,
    o: &Opts,
    table: &Option<FixedPointTable>,
) -> Result<QSeries<orbidt::laurent::CRational>> {
    let n = o.max_boxes;
    match p {
        Producer::Enumerated => table.as_ref().expect("table loaded").z_limit(n),
        Producer::Index => table.as_ref().expect("table loaded").z_index(n),
        Producer::Closedform => pexp_eval(&Formula::Flim.build(o.r)?, n, &CRingEval),
        Producer::Transfer => z_limit(o.r, n),
    }
}

fn compare(o: &Opts, cache: &Cache, lhs: Producer, rhs: Producer, timings: bool) -> Result<Outcome> {
    let start = Instant::now();
    let n = o.max_boxes;
    let allowed: &[Producer] = match o.mode {
        SeriesMode::Limit => &[Producer::Enumerated, Producer::Index, Producer::Closedform, Producer::Transfer],
        _ => &[Producer::Enumerated, Producer::Closedform],
    };
    for p in [lhs, rhs] {
        if !allowed.contains(&p) {
            return Err(Error::Usage(format!("producer {} is not available in {} mode", p.name(), o.mode.name())));
        }
    }
    let needs_table = [lhs, rhs].iter().any(|p| matches!(p, Producer::Enumerated | Producer::Index));
    let table = if needs_table { Some(cache.table(o.r, n)?) } else { None };

    let comparisons: Vec<Comparison> = match o.mode {
        SeriesMode::Point => {
            let formula: Formula = o.formula.parse()?;
            let s = formula.build(o.r)?;
            let side = |p: Producer, pt: &RationalPoint| -> Result<QSeries<_>> {
                match p {
                    Producer::Enumerated => table.as_ref().expect("table loaded").z_point(pt, n),
                    _ => pexp_eval(&s, n, &PointEval(pt.clone())),
                }
            };
            let pairs = gather_points(o, 3, |pt| Ok((side(lhs, pt)?, side(rhs, pt)?)))?;
            pairs
                .iter()
                .map(|(pt, (a, b))| compare_series(Some(point_strings(pt)), a, b))
                .collect()
        }
        SeriesMode::Limit => {
            vec![compare_series(None, &limit_series(lhs, o, &table)?, &limit_series(rhs, o, &table)?)]
        }
        SeriesMode::Numerical => {
            let side = |p: Producer| match p {
                Producer::Enumerated => table.as_ref().expect("table loaded").z_numerical(n),
                _ => numerical_closed_form(o.r, n),
            };
            vec![compare_series(None, &side(lhs)?, &side(rhs)?)]
        }
    };
    let report = CompareReport {
        r: o.r,
        order: n,
        mode: o.mode.name(),
        lhs: lhs.name(),
        rhs: rhs.name(),
        seed: o.seed,
        equal: comparisons.iter().all(|c| c.equal),
        comparisons,
        millis: timings.then(|| start.elapsed().as_millis()),
    };
    Ok(Outcome::Verdict(report.output(), report.equal))
}

fn selfcheck(o: &Opts, only: &[String]) -> Result<Outcome> {
    let results = if only.is_empty() {
        acceptance::run_all(o.seed)
    } else {
        only.iter()
            .map(|id| acceptance::run(id, o.seed).ok_or_else(|| Error::Usage(format!("unknown criterion {id}"))))
            .collect::<Result<Vec<_>>>()?
    };
    for r in &results {
        eprintln!("{}", r.line());
    }
    let ok = results.iter().all(|r| r.passed);
    let rows = results
        .iter()
        .map(|r| vec![r.id.to_string(), if r.passed { "PASS" } else { "FAIL" }.into(), r.title.into(), r.detail.clone()])
        .collect();
    let out = Output {
        json: json!({"seed": o.seed, "passed": ok, "criteria": results}),
        header: vec!["id", "verdict", "title", "detail"],
        rows,
    };
    Ok(Outcome::Verdict(out, ok))
}
