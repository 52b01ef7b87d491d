//! Command-line front end: regression galleries, approximation traces,
//! modulus sweeps, point checks, and delta certificates, written as CSV
//! or JSON with byte-identical reruns for a fixed config and seed.
//!
//! Numbers in CSV cells are printed with 17 significant digits; the JSON
//! variant mirrors the rows and adds a metadata block. Wall time goes to
//! stderr only, so artifact files stay reproducible. The exit status is
//! 0 when every row-level pass flag is true, 1 when some row fails, and
//! 2 for invalid configurations or runtime errors.

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{
    self, gallery, geometric_schedule, is_maximal, pos_support_check, stmax_delta_certificate,
    strict_max_modulus, GalleryFamily,
};
use crate::cones::{BaseSpec, ConeSpec};
use crate::sets::{Certificate, SetSpec, Verdict};
use crate::solvers::SolverConfig;
use crate::spaces::{NormKind, Vector};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "conelab",
    version,
    about = "Maximal-point certificates and approximation experiments on convex truncations"
)]
pub struct Cli {
    /// Seed for all deterministic samplers (env CONELAB_SEED wins)
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Solver tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit one witness-family regression table
    Gallery {
        /// Family id: prop37, prop33, ex34, or prop36
        family: String,
        /// Number of rows
        #[arg(long, default_value_t = 100)]
        nmax: usize,
        /// Truncation dimension
        #[arg(long = "N", default_value_t = 128)]
        dim: usize,
    },
    /// Approximate a maximal point by positively supported ones
    Abb {
        #[arg(long)]
        instance: String,
        /// Target point, comma-separated, zero-padded to the dimension
        #[arg(long)]
        target: String,
        /// Dilation schedule, e.g. geom:0.45:0.5:20 for 0.45*0.5^k
        #[arg(long, default_value = "geom:0.45:0.5:20")]
        schedule: String,
        /// Truncation dimension (inferred from the point when omitted)
        #[arg(long = "N")]
        dim: Option<usize>,
        /// Cone base slice level
        #[arg(long, default_value_t = 1.0)]
        level: f64,
    },
    /// Sweep the strict-maximality modulus over truncations
    Modulus {
        #[arg(long)]
        instance: String,
        /// Shell level for the modulus
        #[arg(long, default_value_t = 0.7)]
        epsilon: f64,
        /// Comma-separated truncation dimensions
        #[arg(long, default_value = "4,8,16,32,64")]
        sweep: String,
        /// Reference point, zero-padded per dimension
        #[arg(long, default_value = "0")]
        point: String,
    },
    /// Check maximality (and positive support) of a point
    Check {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value = "0")]
        point: String,
        /// Functional for the support check (skipped when omitted)
        #[arg(long)]
        functional: Option<String>,
        #[arg(long = "N")]
        dim: Option<usize>,
    },
    /// Build a separation-based strict-maximality certificate
    Certify {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 0.6)]
        epsilon: f64,
        #[arg(long, default_value = "0")]
        target: String,
        #[arg(long = "N")]
        dim: Option<usize>,
        /// Base slice level; fitted to the eps/3 ball when omitted
        #[arg(long)]
        level: Option<f64>,
    },
}

/// One table cell; numbers render with 17 significant digits in CSV.
enum Cell {
    Text(&'static str),
    Int(i64),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => (*s).to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => serde_json::Value::from(*s),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Num(v) => serde_json::Value::from(*v),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<(Vec<Cell>, bool)>,
}

impl Table {
    fn all_pass(&self) -> bool {
        self.rows.iter().all(|(_, p)| *p)
    }
}

/// Runs a parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(cli.seed)?;
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            cli.tol
        )));
    }
    let cfg = SolverConfig {
        tol: cli.tol,
        seed,
        ..SolverConfig::default()
    };

    let (table, params) = match &cli.command {
        Command::Gallery { family, nmax, dim } => run_gallery(family, *nmax, *dim)?,
        Command::Abb {
            instance,
            target,
            schedule,
            dim,
            level,
        } => run_abb(instance, target, schedule, *dim, *level, &cfg)?,
        Command::Modulus {
            instance,
            epsilon,
            sweep,
            point,
        } => run_modulus(instance, *epsilon, sweep, point, &cfg)?,
        Command::Check {
            instance,
            point,
            functional,
            dim,
        } => run_check(instance, point, functional.as_deref(), *dim, &cfg)?,
        Command::Certify {
            instance,
            epsilon,
            target,
            dim,
            level,
        } => run_certify(instance, *epsilon, target, *dim, *level, &cfg)?,
    };

    let bytes = match cli.format {
        Format::Csv => render_csv(&table)?,
        Format::Json => render_json(&table, command_name(&cli.command), seed, cli.tol, &params),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    eprintln!("# wall_time_ms {}", started.elapsed().as_millis());
    Ok(if table.all_pass() { 0 } else { 1 })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gallery { .. } => "gallery",
        Command::Abb { .. } => "abb",
        Command::Modulus { .. } => "modulus",
        Command::Check { .. } => "check",
        Command::Certify { .. } => "certify",
    }
}

fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var("CONELAB_SEED") {
        Ok(s) => s.trim().parse::<u64>().map_err(|_| {
            Error::InvalidParameter(format!(
                "CONELAB_SEED must be an unsigned integer, got '{s}'"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(Error::InvalidParameter(format!("CONELAB_SEED: {e}"))),
    }
}

/// The calibration instances exposed on the command line.
fn instance(name: &str, dim: Option<usize>) -> Result<(SetSpec, ConeSpec)> {
    let planar = |dim: Option<usize>| -> Result<()> {
        match dim {
            None | Some(2) => Ok(()),
            Some(d) => Err(Error::InvalidParameter(format!(
                "instance is two-dimensional, got N = {d}"
            ))),
        }
    };
    match name {
        "kflat" => {
            let d = dim.unwrap_or(16).max(2);
            Ok((SetSpec::flat(d, 1.0)?, ConeSpec::orthant(d, NormKind::L2)?))
        }
        "kminusp" => {
            let d = dim.unwrap_or(16).max(2);
            Ok((SetSpec::minus_slanted(d)?, ConeSpec::slanted(d)?))
        }
        "kslab" => {
            let d = dim.unwrap_or(16).max(2);
            Ok((SetSpec::slab(d)?, ConeSpec::orthant(d, NormKind::L1)?))
        }
        "balltriple" => {
            let d = dim.unwrap_or(16).max(2);
            Ok((
                SetSpec::triple_ball(d)?,
                ConeSpec::orthant(d, NormKind::Triple)?,
            ))
        }
        "disk2d" => {
            planar(dim)?;
            Ok((SetSpec::disk(1.0)?, ConeSpec::orthant(2, NormKind::L2)?))
        }
        "square2d" => {
            planar(dim)?;
            Ok((SetSpec::square(), ConeSpec::orthant(2, NormKind::L2)?))
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown instance '{other}' (known: kflat, kminusp, kslab, balltriple, disk2d, square2d)"
        ))),
    }
}

/// Default strictly positive base functional for a cone.
fn base_functional(p: &ConeSpec) -> Vector {
    if p.is_slanted() {
        Vector::basis(p.dim(), 1, p.ambient())
    } else {
        Vector::new(vec![1.0; p.dim()], p.ambient()).expect("finite functional")
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("{what}: '{s}' is not a number")))
}

/// Comma-separated coordinates, zero-padded to the dimension.
fn parse_vector(s: &str, dim: usize, ambient: NormKind) -> Result<Vector> {
    let mut coords = Vec::new();
    for part in s.split(',') {
        coords.push(parse_f64(part, "coordinate")?);
    }
    if coords.len() > dim {
        return Err(Error::InvalidParameter(format!(
            "got {} coordinates but the truncation is {dim}",
            coords.len()
        )));
    }
    coords.resize(dim, 0.0);
    Vector::new(coords, ambient)
}

/// Number of coordinates literally present in a point argument.
fn coord_count(s: &str) -> usize {
    s.split(',').count()
}

fn parse_schedule(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if let ["geom", a, r, m] = parts.as_slice() {
        let a = parse_f64(a, "schedule scale")?;
        let r = parse_f64(r, "schedule ratio")?;
        let m: usize = m
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("schedule length: '{m}'")))?;
        if !(a > 0.0 && r > 0.0 && r < 1.0 && m >= 1) {
            return Err(Error::InvalidParameter(format!(
                "geometric schedule needs scale > 0, ratio in (0,1), length >= 1; got {s}"
            )));
        }
        return Ok(geometric_schedule(a, r, m));
    }
    // fallback: explicit comma-separated levels
    let mut out = Vec::new();
    for part in s.split(',') {
        out.push(parse_f64(part, "schedule value")?);
    }
    Ok(out)
}

fn parse_sweep(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let d: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("sweep dimension: '{part}'")))?;
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "sweep dimensions must be at least 2, got {d}"
            )));
        }
        out.push(d);
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    Ok(out)
}

type Params = Vec<(&'static str, serde_json::Value)>;

fn run_gallery(family: &str, nmax: usize, dim: usize) -> Result<(Table, Params)> {
    let fam = match family {
        "prop37" => GalleryFamily::FlatWitness,
        "prop33" => GalleryFamily::SlantedWitness,
        "ex34" => GalleryFamily::SlabWitness,
        "prop36" => GalleryFamily::RenormWitness,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown family '{other}' (known: prop37, prop33, ex34, prop36)"
            )))
        }
    };
    let rows = gallery(fam, nmax, dim)?;
    let mut columns: Vec<&'static str> = vec!["n"];
    if let Some(first) = rows.first() {
        columns.extend(first.columns.iter().map(|(name, _)| *name));
    }
    let table = Table {
        columns,
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = vec![Cell::Int(r.n as i64)];
                cells.extend(r.columns.iter().map(|(_, v)| Cell::Num(*v)));
                (cells, r.pass)
            })
            .collect(),
    };
    let params = vec![
        ("family", serde_json::Value::from(family)),
        ("nmax", serde_json::Value::from(nmax)),
        ("N", serde_json::Value::from(dim)),
    ];
    Ok((table, params))
}

fn run_abb(
    name: &str,
    target: &str,
    schedule: &str,
    dim: Option<usize>,
    level: f64,
    cfg: &SolverConfig,
) -> Result<(Table, Params)> {
    let dim_hint = dim.or(Some(coord_count(target).max(2)));
    let (k, p) = instance(name, dim_hint)?;
    let x_bar = parse_vector(target, k.dim(), k.ambient())?;
    let base = p.base(&base_functional(&p), level)?;
    let deltas = parse_schedule(schedule)?;
    let trace = analysis::abb_approximate(&k, &p, &base, &x_bar, &deltas, cfg)?;

    let mut rows = Vec::new();
    let mut prev = f64::INFINITY;
    for (i, it) in trace.iterates.iter().enumerate() {
        let margin = p.positivity_margin(&it.functional)?;
        let pass = margin >= 1e-6
            && it.support_residual <= 1e-8
            && it.distance <= prev + 1e-12;
        prev = it.distance;
        rows.push((
            vec![
                Cell::Int((i + 1) as i64),
                Cell::Num(trace.schedule[i]),
                Cell::Num(it.distance),
                Cell::Num(it.support_residual),
                Cell::Num(margin),
            ],
            pass,
        ));
    }
    let table = Table {
        columns: vec![
            "k",
            "delta",
            "distance",
            "support_residual",
            "positivity_margin",
        ],
        rows,
    };
    let params = vec![
        ("instance", serde_json::Value::from(name)),
        ("target", serde_json::Value::from(target)),
        ("schedule", serde_json::Value::from(schedule)),
        ("N", serde_json::Value::from(k.dim())),
        ("level", serde_json::Value::from(level)),
    ];
    Ok((table, params))
}

fn run_modulus(
    name: &str,
    epsilon: f64,
    sweep: &str,
    point: &str,
    cfg: &SolverConfig,
) -> Result<(Table, Params)> {
    let dims = parse_sweep(sweep)?;
    let mut rows = Vec::new();
    let mut prev = f64::INFINITY;
    for &d in &dims {
        let (k, p) = instance(name, Some(d))?;
        let x = parse_vector(point, k.dim(), k.ambient())?;
        let rep = strict_max_modulus(&k, &p, &x, epsilon, cfg)?;
        let bound = match name {
            "kflat" => 1.0 / (2.0f64.sqrt() * (d - 1) as f64),
            "kminusp" => 1.0 / d as f64,
            _ => f64::INFINITY,
        };
        let pass = rep.delta_hat <= bound + 1e-9 && rep.delta_hat < prev;
        prev = rep.delta_hat;
        rows.push((
            vec![
                Cell::Int(d as i64),
                Cell::Num(rep.epsilon),
                Cell::Num(rep.delta_hat),
                Cell::Num(bound),
                Cell::Int(rep.upper_bound_only as i64),
            ],
            pass,
        ));
    }
    let table = Table {
        columns: vec!["N", "epsilon", "delta_hat", "bound", "upper_bound_only"],
        rows,
    };
    let params = vec![
        ("instance", serde_json::Value::from(name)),
        ("epsilon", serde_json::Value::from(epsilon)),
        ("sweep", serde_json::Value::from(sweep)),
        ("point", serde_json::Value::from(point)),
    ];
    Ok((table, params))
}

fn certificate_rows(
    label: &'static str,
    cert: &Certificate,
    k: &SetSpec,
    p: &ConeSpec,
    x: &Vector,
    cfg: &SolverConfig,
    rows: &mut Vec<(Vec<Cell>, bool)>,
) -> Result<()> {
    let replay_ok = if cert.residuals.is_empty() {
        true
    } else {
        cert.replay(k, p, x, cfg)?
    };
    let pass = cert.verdict != Verdict::Inconclusive && replay_ok;
    rows.push((
        vec![
            Cell::Text(label),
            Cell::Text(cert.verdict.label()),
            Cell::Text("replay_ok"),
            Cell::Num(f64::from(u8::from(replay_ok))),
        ],
        pass,
    ));
    for (metric, value) in &cert.residuals {
        rows.push((
            vec![
                Cell::Text(label),
                Cell::Text(cert.verdict.label()),
                Cell::Text(metric),
                Cell::Num(*value),
            ],
            pass,
        ));
    }
    Ok(())
}

fn run_check(
    name: &str,
    point: &str,
    functional: Option<&str>,
    dim: Option<usize>,
    cfg: &SolverConfig,
) -> Result<(Table, Params)> {
    let dim_hint = dim.or_else(|| {
        let n = coord_count(point).max(functional.map_or(0, coord_count)).max(2);
        Some(n)
    });
    let (k, p) = instance(name, dim_hint)?;
    let x = parse_vector(point, k.dim(), k.ambient())?;

    let mut rows = Vec::new();
    let max_cert = is_maximal(&k, &p, &x, cfg)?;
    certificate_rows("maximal", &max_cert, &k, &p, &x, cfg, &mut rows)?;
    if let Some(fs) = functional {
        let f = parse_vector(fs, k.dim(), k.ambient())?;
        let pos_cert = pos_support_check(&k, &p, &x, &f, cfg)?;
        certificate_rows("pos_support", &pos_cert, &k, &p, &x, cfg, &mut rows)?;
    }
    let table = Table {
        columns: vec!["check", "verdict", "metric", "value"],
        rows,
    };
    let mut params = vec![
        ("instance", serde_json::Value::from(name)),
        ("point", serde_json::Value::from(point)),
        ("N", serde_json::Value::from(k.dim())),
    ];
    if let Some(fs) = functional {
        params.push(("functional", serde_json::Value::from(fs)));
    }
    Ok((table, params))
}

fn run_certify(
    name: &str,
    epsilon: f64,
    target: &str,
    dim: Option<usize>,
    level: Option<f64>,
    cfg: &SolverConfig,
) -> Result<(Table, Params)> {
    let dim_hint = dim.or(Some(coord_count(target).max(2)));
    let (k, p) = instance(name, dim_hint)?;
    let x_bar = parse_vector(target, k.dim(), k.ambient())?;
    let base = fitted_base(&p, epsilon, level)?;
    let cert = stmax_delta_certificate(&k, &p, &base, &x_bar, epsilon, cfg)?;

    let sep_ok = cert.sup_value < cert.alpha;
    let rows = vec![
        (vec![Cell::Text("delta"), Cell::Num(cert.delta)], cert.delta > 0.0),
        (vec![Cell::Text("alpha"), Cell::Num(cert.alpha)], sep_ok),
        (
            vec![Cell::Text("sup_value"), Cell::Num(cert.sup_value)],
            sep_ok,
        ),
        (
            vec![
                Cell::Text("violations"),
                Cell::Num(cert.violations as f64),
            ],
            cert.violations == 0,
        ),
        (
            vec![Cell::Text("samples"), Cell::Num(cert.samples as f64)],
            true,
        ),
    ];
    let table = Table {
        columns: vec!["metric", "value"],
        rows,
    };
    let mut params = vec![
        ("instance", serde_json::Value::from(name)),
        ("epsilon", serde_json::Value::from(epsilon)),
        ("target", serde_json::Value::from(target)),
        ("N", serde_json::Value::from(k.dim())),
    ];
    if let Some(l) = level {
        params.push(("level", serde_json::Value::from(l)));
    }
    Ok((table, params))
}

/// Base used by `certify`: an explicit level is taken as-is (and the
/// library precondition enforces the eps/3 fit); otherwise the slice
/// level is chosen so the base exactly fills the eps/3 ball.
fn fitted_base(p: &ConeSpec, epsilon: f64, level: Option<f64>) -> Result<BaseSpec> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon}")));
    }
    let f = base_functional(p);
    match level {
        Some(l) => p.base(&f, l),
        None => {
            let unit = p.base(&f, 1.0)?;
            unit.rescaled(epsilon / 3.0 / unit.sup_norm())
        }
    }
}

fn render_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<&str> = table.columns.clone();
    header.push("pass");
    w.write_record(&header)
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    for (cells, pass) in &table.rows {
        let mut rec: Vec<String> = cells.iter().map(Cell::csv).collect();
        rec.push(pass.to_string());
        w.write_record(&rec)
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

fn render_json(
    table: &Table,
    command: &'static str,
    seed: u64,
    tol: f64,
    params: &Params,
) -> Vec<u8> {
    let mut meta = serde_json::Map::new();
    meta.insert("command".into(), serde_json::Value::from(command));
    meta.insert(
        "version".into(),
        serde_json::Value::from(env!("CARGO_PKG_VERSION")),
    );
    meta.insert("seed".into(), serde_json::Value::from(seed));
    meta.insert("tol".into(), serde_json::Value::from(tol));
    let mut pmap = serde_json::Map::new();
    for (k, v) in params {
        pmap.insert((*k).into(), v.clone());
    }
    meta.insert("params".into(), serde_json::Value::Object(pmap));
    meta.insert(
        "columns".into(),
        serde_json::Value::from(
            table
                .columns
                .iter()
                .map(|c| serde_json::Value::from(*c))
                .collect::<Vec<_>>(),
        ),
    );

    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|(cells, pass)| {
            let mut obj = serde_json::Map::new();
            for (name, cell) in table.columns.iter().zip(cells) {
                obj.insert((*name).into(), cell.json());
            }
            obj.insert("pass".into(), serde_json::Value::from(*pass));
            serde_json::Value::Object(obj)
        })
        .collect();

    let mut root = serde_json::Map::new();
    root.insert("metadata".into(), serde_json::Value::Object(meta));
    root.insert("rows".into(), serde_json::Value::from(rows));
    let mut bytes = serde_json::to_string_pretty(&serde_json::Value::Object(root))
        .expect("serializable tables")
        .into_bytes();
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_are_zero_padded() {
        let v = parse_vector("1,0", 4, NormKind::L2).unwrap();
        assert_eq!(v.coords(), &[1.0, 0.0, 0.0, 0.0]);
        let v = parse_vector("0", 3, NormKind::L2).unwrap();
        assert_eq!(v.coords(), &[0.0, 0.0, 0.0]);
        assert!(parse_vector("1,2,3", 2, NormKind::L2).is_err());
        assert!(parse_vector("1,x", 4, NormKind::L2).is_err());
    }

    #[test]
    fn schedules_parse() {
        let s = parse_schedule("geom:0.45:0.5:3").unwrap();
        assert_eq!(s.len(), 3);
        assert!((s[0] - 0.225).abs() < 1e-15);
        assert!((s[2] - 0.05625).abs() < 1e-15);
        let s = parse_schedule("0.2,0.1").unwrap();
        assert_eq!(s, vec![0.2, 0.1]);
        assert!(parse_schedule("geom:0:0.5:3").is_err());
        assert!(parse_schedule("geom:1:1.5:3").is_err());
    }

    #[test]
    fn instances_resolve_and_reject() {
        assert!(instance("kflat", Some(8)).is_ok());
        assert!(instance("disk2d", None).is_ok());
        assert!(instance("disk2d", Some(5)).is_err());
        assert!(instance("nosuch", None).is_err());
    }

    #[test]
    fn csv_renders_fixed_precision() {
        let table = Table {
            columns: vec!["n", "value"],
            rows: vec![(vec![Cell::Int(1), Cell::Num(0.625)], true)],
        };
        let bytes = render_csv(&table).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text, "n,value,pass\n1,6.2500000000000000e-1,true\n");
    }

    #[test]
    fn check_reports_the_documented_verdicts() {
        let cfg = SolverConfig::default();
        let (table, _) = run_check("kflat", "0", Some("1,1,1,1"), None, &cfg).unwrap();
        assert!(table.all_pass());
        let verdicts: Vec<String> = table
            .rows
            .iter()
            .map(|(cells, _)| match (&cells[0], &cells[1]) {
                (Cell::Text(a), Cell::Text(b)) => format!("{a}:{b}"),
                _ => unreachable!(),
            })
            .collect();
        assert!(verdicts.iter().any(|v| v == "maximal:maximal"));
        assert!(verdicts.iter().any(|v| v == "pos_support:not_supported"));
    }

    #[test]
    fn certify_square_matches_the_closed_form() {
        let cfg = SolverConfig::default();
        let (table, _) = run_certify("square2d", 0.6, "0", None, None, &cfg).unwrap();
        assert!(table.all_pass());
        let delta = table
            .rows
            .iter()
            .find_map(|(cells, _)| match (&cells[0], &cells[1]) {
                (Cell::Text("delta"), Cell::Num(v)) => Some(*v),
                _ => None,
            })
            .unwrap();
        assert!((delta - 0.2 / 2.0f64.sqrt()).abs() <= 1e-12);
    }
}
