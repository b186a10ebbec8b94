//! `fermi-renyi`: entropy densities of quasi-free fermionic lattice states,
//! approximation schemes for the von Neumann density, and validation tools.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermi_renyi::approx::{self, apply_scheme, ApproxScheme, MinimaxConfig, SchemeKind};
use fermi_renyi::config::{load_config, SymbolConfig};
use fermi_renyi::entropy::Order;
use fermi_renyi::lattice::{density_convergence, oracle_report, CONVERGENCE_THRESHOLD};
use fermi_renyi::report::{self, ComparisonRow, Reproduction};
use fermi_renyi::symbol::Boundary;
use fermi_renyi::{Error, QuadratureSpec, Symbol};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "fermi-renyi", version, about = "Rényi and von Neumann entropy densities of quasi-free fermionic states")]
struct Cli {
    /// Print the effective configuration, defaults included, and exit.
    #[arg(long, global = true)]
    show_config: bool,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Significant digits of floating-point CSV fields.
    #[arg(long, global = true, default_value_t = 17)]
    digits: usize,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rényi entropy densities of a symbol.
    Entropy {
        #[arg(long)]
        symbol: PathBuf,
        /// Orders, comma separated; `1` is von Neumann, `inf` the min-entropy.
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        alpha: Vec<Order>,
    },
    /// Approximation schemes.
    #[command(subcommand)]
    Approx(ApproxCommand),
    /// Numerical cross-checks.
    #[command(subcommand)]
    Validate(ValidateCommand),
    /// Recompute all published tables and figure data.
    ReproducePaper {
        #[arg(long, default_value = "reproduction")]
        out_dir: PathBuf,
    },
    /// Figure data.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Args, Debug, Clone, Copy)]
struct SchemeArgs {
    #[arg(long, default_value = "controlled")]
    kind: SchemeKind,
    /// Number of Rényi terms.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Right end of the sup-norm domain (plain kind).
    #[arg(long, default_value_t = 40.0)]
    domain_cap: f64,
}

impl SchemeArgs {
    fn solve(&self) -> Result<ApproxScheme, Error> {
        match self.kind {
            SchemeKind::Plain => approx::solve_plain(self.n, self.domain_cap),
            kind => approx::solve(kind, self.n),
        }
    }
}

#[derive(Subcommand, Debug)]
enum ApproxCommand {
    /// Solve one scheme.
    Solve(SchemeArgs),
    /// Published against computed coefficients, bounds and `α`.
    Table,
    /// Evaluate a scheme on a symbol and compare with the von Neumann density.
    Apply {
        #[arg(long)]
        symbol: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ValidateCommand {
    /// Laplace identity, representation of `g`, kernel asymptote and complete
    /// monotonicity.
    Laplace {
        #[arg(long)]
        symbol: PathBuf,
    },
    /// Per-site entropies of growing boxes against the density.
    Lattice {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        alpha: Vec<Order>,
        /// Box sides, ascending.
        #[arg(long = "L", value_delimiter = ',', default_value = "8,16,32,64,128")]
        sides: Vec<usize>,
        /// Use circulant instead of open boxes.
        #[arg(long)]
        periodic: bool,
        #[arg(long, default_value_t = CONVERGENCE_THRESHOLD)]
        threshold: f64,
    },
    /// Density matrix built from the two-point function against the product
    /// formula.
    Oracle {
        #[arg(long)]
        symbol: PathBuf,
        /// Number of sites (1 to 4).
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum PlotCommand {
    /// The step function `k(t)`.
    Step {
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
    },
}

/// Errors of a command run.
enum Failure {
    Lib(Error),
    /// A check ran to completion but did not pass.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Lib(Error::Io(e))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::Lib(Error::Csv(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::Lib(Error::Io(e.into()))
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Formats `v` with `digits` significant digits. At 17 or more digits the
/// shortest representation that reads back to the same `f64` is used.
fn num(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let fixed = (-5..15).contains(&exp);
    if digits >= 17 {
        return if fixed { format!("{v}") } else { format!("{v:e}") };
    }
    let digits = digits.max(1);
    if !fixed {
        return format!("{:.*e}", digits - 1, v);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map(|v| num(v, digits)).unwrap_or_default()
}

struct Out<'a> {
    cli: &'a Cli,
}

impl Out<'_> {
    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }

    fn emit(&self, bytes: &[u8]) -> Outcome {
        match &self.cli.output {
            Some(path) => fs::write(path, bytes)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())).into()),
            None => {
                std::io::stdout().write_all(bytes)?;
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Outcome {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(text.as_bytes())
    }

    fn csv(&self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome {
        self.emit(&csv_bytes(header, rows)?)
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Failure::Lib(Error::Io(e.into_error())))
}

fn symbol(path: &Path) -> Outcome<Symbol> {
    Ok(fermi_renyi::config::load_symbol(path)?)
}

#[derive(Serialize)]
struct ShownConfig<'a> {
    command: String,
    format: Option<Format>,
    output: Option<&'a Path>,
    digits: usize,
    quadrature: QuadratureSpec,
    minimax: MinimaxConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol: Option<SymbolConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol_file: Option<&'a Path>,
}

fn symbol_path(command: &Command) -> Option<&Path> {
    match command {
        Command::Entropy { symbol, .. }
        | Command::Approx(ApproxCommand::Apply { symbol, .. })
        | Command::Validate(ValidateCommand::Laplace { symbol })
        | Command::Validate(ValidateCommand::Lattice { symbol, .. })
        | Command::Validate(ValidateCommand::Oracle { symbol, .. }) => Some(symbol),
        _ => None,
    }
}

fn run(cli: &Cli) -> Outcome {
    let spec = QuadratureSpec::with_tol(cli.tol);
    spec.validate()?;
    let out = Out { cli };
    let d = cli.digits;

    if cli.show_config {
        let path = symbol_path(&cli.command);
        let shown = ShownConfig {
            command: format!("{:?}", cli.command),
            format: cli.format,
            output: cli.output.as_deref(),
            digits: cli.digits,
            quadrature: spec,
            minimax: MinimaxConfig::default(),
            symbol: path.map(load_config).transpose()?,
            symbol_file: path,
        };
        let mut text = serde_json::to_string_pretty(&shown)?;
        text.push('\n');
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    }

    match &cli.command {
        Command::Entropy { symbol: path, alpha } => {
            let q = symbol(path)?;
            let values = report::densities(&q, alpha, &spec)?;
            match out.format(Format::Csv) {
                Format::Json => out.json(&values),
                Format::Csv => out.csv(
                    &["alpha", "value", "quad_error"],
                    values
                        .iter()
                        .map(|v| vec![v.order.to_string(), num(v.value, d), num(v.quad_error, d)]),
                ),
            }
        }

        Command::Approx(ApproxCommand::Solve(args)) => {
            let s = args.solve()?;
            match out.format(Format::Json) {
                Format::Json => out.json(&s),
                Format::Csv => out.csv(
                    &["term", "order", "gamma"],
                    s.gamma
                        .iter()
                        .enumerate()
                        .map(|(i, g)| vec![(i + 1).to_string(), (i + 2).to_string(), num(*g, d)]),
                ),
            }
        }

        Command::Approx(ApproxCommand::Table) => {
            let rows = report::comparison_rows(&report::solve_all());
            match out.format(Format::Csv) {
                Format::Json => out.json(&rows),
                Format::Csv => out.emit(&table_csv(&rows, d)?),
            }
        }

        Command::Approx(ApproxCommand::Apply { symbol: path, scheme }) => {
            let q = symbol(path)?;
            let s = scheme.solve()?;
            let app = apply_scheme(&s, &q, &spec)?;
            match out.format(Format::Json) {
                Format::Json => out.json(&app),
                Format::Csv => out.csv(
                    &["estimate", "true_value", "true_error", "bound", "quad_error"],
                    [vec![
                        num(app.estimate, d),
                        num(app.true_value, d),
                        num(app.true_error, d),
                        opt(app.bound, d),
                        num(app.quad_error, d),
                    ]],
                ),
            }
        }

        Command::Validate(ValidateCommand::Laplace { symbol: path }) => {
            let q = symbol(path)?;
            let r = report::laplace_report(&q, &spec)?;
            match out.format(Format::Json) {
                Format::Json => out.json(&r)?,
                Format::Csv => out.csv(
                    &["alpha", "defining", "integral", "laplace", "max_difference", "pass"],
                    r.representation.iter().map(|row| {
                        vec![
                            num(row.alpha, d),
                            num(row.defining, d),
                            num(row.integral, d),
                            num(row.laplace, d),
                            num(row.max_difference, d),
                            row.pass.to_string(),
                        ]
                    }),
                )?,
            }
            if r.pass {
                Ok(())
            } else {
                Err(Failure::Check(format!("Laplace validation of {} did not pass", r.symbol)))
            }
        }

        Command::Validate(ValidateCommand::Lattice {
            symbol: path,
            alpha,
            sides,
            periodic,
            threshold,
        }) => {
            let q = symbol(path)?;
            let boundary = if *periodic { Boundary::Periodic } else { Boundary::Open };
            let reports = alpha
                .iter()
                .map(|&o| density_convergence(&q, o, sides, boundary, *threshold, &spec))
                .collect::<Result<Vec<_>, _>>()?;
            match out.format(Format::Csv) {
                Format::Json => out.json(&reports)?,
                Format::Csv => out.csv(
                    &["alpha", "L", "per_site", "density", "gap"],
                    reports.iter().flat_map(|r| {
                        r.rows.iter().map(move |row| {
                            vec![
                                r.order.to_string(),
                                row.side.to_string(),
                                num(row.per_site, d),
                                num(row.density, d),
                                num(row.gap, d),
                            ]
                        })
                    }),
                )?,
            }
            match reports.iter().find(|r| !r.pass) {
                None => Ok(()),
                Some(r) => Err(Failure::Check(format!(
                    "per-site entropy at order {} did not converge below {}",
                    r.order, r.threshold
                ))),
            }
        }

        Command::Validate(ValidateCommand::Oracle { symbol: path, n }) => {
            let q = symbol(path)?;
            let r = oracle_report(&q, *n, &spec)?;
            match out.format(Format::Json) {
                Format::Json => out.json(&r)?,
                Format::Csv => out.csv(
                    &["index", "rho", "product"],
                    r.rho_spectrum
                        .iter()
                        .zip(&r.product_spectrum)
                        .enumerate()
                        .map(|(i, (a, b))| vec![i.to_string(), num(*a, d), num(*b, d)]),
                )?,
            }
            if r.pass {
                Ok(())
            } else {
                Err(Failure::Check(format!("oracle and product formula differ for {}", r.symbol)))
            }
        }

        Command::ReproducePaper { out_dir } => {
            let rep = report::reproduce(&spec)?;
            write_reproduction(&rep, out_dir, d)?;
            match out.format(Format::Csv) {
                Format::Json => out.json(&rep.rows),
                Format::Csv => out.emit(&table_csv(&rep.rows, d)?),
            }
        }

        Command::Plot(PlotCommand::Step { tmax }) => {
            if !(*tmax > 0.0 && tmax.is_finite()) {
                return Err(Error::InvalidArgument(format!("tmax must be positive, got {tmax}")).into());
            }
            let points = report::step_plot(*tmax);
            match out.format(Format::Csv) {
                Format::Json => out.json(&points),
                Format::Csv => out.csv(&["t", "k"], points.iter().map(|(t, k)| vec![num(*t, d), num(*k, d)])),
            }
        }
    }
}

/// Published values keep their printed precision of three decimals.
fn table_csv(rows: &[ComparisonRow], d: usize) -> Outcome<Vec<u8>> {
    csv_bytes(
        &["table", "n", "quantity", "published", "computed", "tolerance", "status", "note"],
        rows.iter().map(|r| {
            vec![
                r.table.clone(),
                r.n.to_string(),
                r.quantity.clone(),
                r.published.map(|v| format!("{v:.3}")).unwrap_or_default(),
                opt(r.computed, d),
                opt(r.tolerance, d),
                r.status().to_string(),
                r.note.clone(),
            ]
        }),
    )
}

fn columns_csv(header: &[&str], rows: &[Vec<f64>], d: usize) -> Outcome<Vec<u8>> {
    csv_bytes(header, rows.iter().map(|r| r.iter().map(|v| num(*v, d)).collect()))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Outcome {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())).into())
}

fn write_reproduction(rep: &Reproduction, dir: &Path, d: usize) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    write_file(dir, "table.csv", &table_csv(&rep.rows, d)?)?;

    let alpha_n = [1, 2, 3, 4, 10];
    write_file(
        dir,
        "alpha.csv",
        &csv_bytes(
            &["n", "alpha"],
            alpha_n.iter().zip(&rep.alpha_list).map(|(n, a)| vec![n.to_string(), opt(*a, d)]),
        )?,
    )?;

    write_file(
        dir,
        "applications.csv",
        &csv_bytes(
            &["symbol", "kind", "n", "estimate", "true_value", "true_error", "bound", "quad_error", "error"],
            rep.applications.iter().map(|a| {
                vec![
                    a.symbol.clone(),
                    a.kind.to_string(),
                    a.n.to_string(),
                    opt(a.estimate, d),
                    opt(a.true_value, d),
                    opt(a.true_error, d),
                    opt(a.bound, d),
                    opt(a.quad_error, d),
                    a.error.clone().unwrap_or_default(),
                ]
            }),
        )?,
    )?;

    let fig1: Vec<Vec<f64>> = rep.fig1.iter().map(|&(t, k)| vec![t, k]).collect();
    write_file(dir, "fig1_step.csv", &columns_csv(&["t", "k"], &fig1, d)?)?;
    for (name, rows) in [
        ("fig2_plain_residual.csv", &rep.fig2),
        ("fig3_controlled_residual.csv", &rep.fig3),
        ("fig3_controlled_weighted.csv", &rep.fig3_weighted),
    ] {
        let width = rows.first().map_or(1, Vec::len);
        let names: Vec<String> = std::iter::once("t".to_string())
            .chain((1..width).map(|n| format!("n{n}")))
            .collect();
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        write_file(dir, name, &columns_csv(&header, rows, d)?)?;
    }

    let mut json = serde_json::to_string_pretty(rep)?;
    json.push('\n');
    write_file(dir, "report.json", json.as_bytes())
}
