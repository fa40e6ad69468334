//! Command-line front end of the `sudler` binary.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dashu_int::UBig;
use serde::Serialize;

use crate::alpha::{parse_alpha, AlphaSpec};
use crate::cf::ConvergentTable;
use crate::cotangent::{self, SumKind, VkKernel};
use crate::error::{Error, Result};
use crate::fixtures::{self, Fixtures, DEFAULT_MARGIN};
use crate::hexfloat;
use crate::limitfn::{self, g_alpha, g_closed, limit_constants, Grid};
use crate::ostrowski::{self, OstrowskiDigits};
use crate::real::{PrecisionConfig, PRECISION_ENV};
use crate::sudler::{self as products, ScanConfig, DEFAULT_BUDGET};
use crate::verify::{self, Suite, SuiteContext, TheoremTarget};
use crate::SCHEMA_VERSION;

#[derive(Debug, Parser)]
#[command(name = "sudler", version, about = "Sudler products, Ostrowski digits, cotangent sums and limit functions")]
pub struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 256)]
    pub precision: usize,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergent table: a_k, p_k, q_k, θ_k, δ_k, η_k.
    Cf {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long = "K", default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Ostrowski digits of `--n`, or the integer of `--digits`.
    Ostrowski {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long, conflicts_with = "digits", required_unless_present = "digits")]
        n: Option<String>,
        /// Comma-separated `b_0,b_1,…`.
        #[arg(long, value_delimiter = ',')]
        digits: Option<Vec<u64>>,
        /// Digit vector length; minimal when omitted.
        #[arg(long = "K")]
        k: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive scan of `P_N` for `0 ≤ N < q_K`.
    Scan {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long = "K")]
        k: usize,
        /// Norm exponents; repeatable.
        #[arg(long = "c", default_values_t = [1.0, 2.0])]
        c: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        top: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Also write `N, log P_N` as CSV.
        #[arg(long)]
        values_csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// `C_k`, `V_k` or `V_k*` on a grid of shifts.
    Cotangent {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = CotKind::Vk)]
        kind: CotKind,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-0.9:0.9:0.1")]
        grid: Grid,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: Output,
    },
    /// `P_{q_k}(α, (−1)^k x/q_k)` on a grid, with optional closed form.
    Limitfn {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-1:1:0.01")]
        grid: Grid,
        #[arg(long)]
        closed_form: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites against frozen fixtures; exit 1 on any failure.
    Verify {
        /// Suite name or `all`; repeatable.
        #[arg(long, default_value = "all")]
        suite: Vec<String>,
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<AlphaSpec>,
        #[arg(long = "K", requires = "alpha")]
        k: Option<usize>,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Selects the random sample of `N` where a suite samples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV data behind the three figures.
    Figures {
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
    },
    /// Recompute and freeze every envelope constant.
    Calibrate {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra α for the theorem probes; pairs with `--K` by position.
        #[arg(long, value_parser = parse_alpha)]
        alpha: Vec<AlphaSpec>,
        #[arg(long = "K")]
        k: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CotKind {
    Ck,
    Vk,
    VkStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Fig1,
    Fig2,
    Fig3,
    All,
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.parse::<Grid>().map_err(|e| e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("# schema_version={SCHEMA_VERSION}\n{}\n", header.join(","));
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn num(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Executes a parsed command; `Ok(false)` means a verification failed.
pub fn run(cli: Cli) -> Result<bool> {
    let cfg = PrecisionConfig::new(cli.precision, PrecisionConfig::default().tail_depth)?;
    match cli.command {
        Command::Cf { alpha, k, output } => cmd_cf(&alpha, k, cfg, &output),
        Command::Ostrowski { alpha, n, digits, k, output } => cmd_ostrowski(&alpha, n, digits, k, cfg, &output),
        Command::Scan { alpha, k, c, top, budget, values_csv, output } => {
            let table = ConvergentTable::build(&alpha, k + 1, cfg)?;
            let scfg = ScanConfig {
                budget,
                parallelism: cli.threads.unwrap_or_else(rayon::current_num_threads),
                top_m: top,
                keep_values: values_csv.is_some(),
            };
            let res = products::scan(&table, k, &c, &scfg)?;
            eprintln!("argmax={} digits={:?} max_log={:.9}", res.argmax_n, res.argmax_digits, res.max_log);
            if let (Some(path), Some(values)) = (values_csv, &res.values) {
                let rows = values.iter().enumerate().map(|(n, v)| vec![n.to_string(), num(*v)]);
                emit(Some(&path), &csv(&["N", "log_p"], rows))?;
            }
            let text = match output.format {
                Format::Json => json(&res)?,
                Format::Csv => csv(
                    &["c", "log_sum", "norm"],
                    res.sums.iter().map(|s| vec![num(s.c), num(s.log_sum), num(s.log_sum / s.c)]),
                ),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Cotangent { alpha, k, kind, grid, budget, output } => {
            cmd_cotangent(&alpha, k, kind, &grid, budget, cfg, &output)
        }
        Command::Limitfn { alpha, k, grid, closed_form, budget, out } => {
            cmd_limitfn(&alpha, k, &grid, closed_form, budget, cfg, out.as_deref())
        }
        Command::Verify { suite, alpha, k, t, fixtures, seed, out } => {
            cmd_verify(&suite, alpha, k, t, fixtures, seed, cfg, out.as_deref())
        }
        Command::Figures { which, out_dir, step } => cmd_figures(which, &out_dir, step, cfg),
        Command::Calibrate { out, alpha, k, margin } => {
            if alpha.len() != k.len() {
                return Err(Error::Domain("every --alpha needs a matching --K".into()));
            }
            let extra: Vec<TheoremTarget> = alpha
                .into_iter()
                .zip(k)
                .map(|(alpha, k_top)| TheoremTarget { alpha, k_top })
                .collect();
            let fx = verify::calibrate(cfg, &extra, margin)?;
            let path = out.unwrap_or_else(fixtures::default_path);
            fx.save(&path)?;
            eprintln!("wrote {} entries to {}", fx.entries.len(), path.display());
            Ok(true)
        }
    }
}

fn cmd_cf(alpha: &AlphaSpec, k: usize, cfg: PrecisionConfig, output: &Output) -> Result<bool> {
    let k_max = alpha.finite_len().map_or(k, |n| k.min(n));
    let table = ConvergentTable::build(alpha, k_max, cfg)?;
    let text = match output.format {
        Format::Json => json(&table.to_json())?,
        Format::Csv => csv(
            &["k", "a", "p", "q", "theta", "delta", "eta"],
            (0..=table.k_max()).map(|j| {
                let a = if j == 0 { alpha.integer_part.to_string() } else { table.a(j).to_string() };
                vec![
                    j.to_string(),
                    a,
                    table.p(j).to_string(),
                    table.q(j).to_string(),
                    num(table.theta_f64(j)),
                    num(table.delta_f64(j)),
                    num(table.eta_f64(j)),
                ]
            }),
        ),
    };
    emit(output.out.as_deref(), &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct OstrowskiJson {
    schema_version: u32,
    alpha: String,
    n: String,
    digits: OstrowskiDigits,
    valid: bool,
    /// `ε_k(N)` where `b_k ≥ 1`.
    epsilon: Vec<Option<String>>,
}

fn cmd_ostrowski(
    alpha: &AlphaSpec,
    n: Option<String>,
    digits: Option<Vec<u64>>,
    k: Option<usize>,
    cfg: PrecisionConfig,
    output: &Output,
) -> Result<bool> {
    let probe_len = k.unwrap_or(8).max(digits.as_ref().map_or(0, Vec::len)) + 2;
    let mut table = ConvergentTable::build(alpha, probe_len, cfg)?;
    let (value, digits) = match (n, digits) {
        (Some(n), _) => {
            let value: UBig = n
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("not a non-negative integer: {n:?}")))?;
            while *table.q(table.k_max()) <= value && alpha.finite_len().is_none_or(|m| table.k_max() < m) {
                table = ConvergentTable::build(alpha, table.k_max() * 2, cfg)?;
            }
            let d = match k {
                Some(len) => ostrowski::encode_with_len(&table, &value, len)?,
                None => ostrowski::encode(&table, &value)?,
            };
            (value, d)
        }
        (None, Some(d)) => {
            let d = OstrowskiDigits::new(&table, d)?;
            (ostrowski::decode(&table, &d)?, d)
        }
        (None, None) => unreachable!("clap requires one of --n, --digits"),
    };
    let epsilon = if digits.is_valid() {
        let eps = ostrowski::epsilon_profile(&table, &digits)?;
        (0..digits.len()).map(|j| eps.get(j).map(hexfloat::format_real)).collect()
    } else {
        Vec::new()
    };
    let record = OstrowskiJson {
        schema_version: SCHEMA_VERSION,
        alpha: alpha.render(),
        n: value.to_string(),
        valid: digits.is_valid(),
        digits,
        epsilon,
    };
    let text = match output.format {
        Format::Json => json(&record)?,
        Format::Csv => csv(
            &["k", "b"],
            record.digits.digits().iter().enumerate().map(|(j, b)| vec![j.to_string(), b.to_string()]),
        ),
    };
    emit(output.out.as_deref(), &text)?;
    Ok(true)
}

fn cmd_cotangent(
    alpha: &AlphaSpec,
    k: usize,
    kind: CotKind,
    grid: &Grid,
    budget: u64,
    cfg: PrecisionConfig,
    output: &Output,
) -> Result<bool> {
    let table = ConvergentTable::build(alpha, k + 1, cfg)?;
    let xs = grid.points();
    let kernel = match kind {
        CotKind::Ck => None,
        _ => Some(VkKernel::with_budget(&table, k, budget)?),
    };
    if kind == CotKind::Ck {
        cotangent::q_within(&table, k, budget)?;
    }
    let mut values = Vec::with_capacity(xs.len());
    for &x in &xs {
        let (value, main) = match (kind, &kernel) {
            (CotKind::Ck, _) => (cotangent::c_k(&table, k, x)?.value, f64::NAN),
            (CotKind::Vk, Some(kr)) => (kr.v(x)?, kr.main_term(x, false)?),
            (CotKind::VkStar, Some(kr)) => (kr.v_star(x)?, kr.main_term(x, true)?),
            _ => unreachable!("kernel present for V sums"),
        };
        let kind = match kind {
            CotKind::Ck => SumKind::CK,
            CotKind::Vk => SumKind::VK,
            CotKind::VkStar => SumKind::VKStar,
        };
        values.push((cotangent::CotangentSumValue { value, k, x, kind }, main));
    }
    let text = match output.format {
        Format::Json => json(&values.iter().map(|(v, _)| v).collect::<Vec<_>>())?,
        Format::Csv => csv(
            &["x", "value", "main_term"],
            values.iter().map(|(v, m)| vec![num(v.x), num(v.value), num(*m)]),
        ),
    };
    emit(output.out.as_deref(), &text)?;
    Ok(true)
}

/// Closed form for the residue class of `k`, when `α` is periodic.
fn closed_form_for(alpha: &AlphaSpec, table: &ConvergentTable, k: usize) -> Result<Option<limitfn::LimitConstants>> {
    let Some(period) = &alpha.period else {
        return Ok(None);
    };
    let pre = alpha.preperiod.len();
    if k <= pre {
        return Ok(None);
    }
    let r = (k - pre - 1) % period.len() + 1;
    let lc = limit_constants(alpha, r, table.bits())?;
    debug_assert_eq!(lc.a_current, table.a(k));
    Ok(Some(lc))
}

fn cmd_limitfn(
    alpha: &AlphaSpec,
    k: usize,
    grid: &Grid,
    closed_form: bool,
    budget: u64,
    cfg: PrecisionConfig,
    out: Option<&Path>,
) -> Result<bool> {
    let table = ConvergentTable::build(alpha, k + 1, cfg)?;
    let xs = grid.points();
    let emp = limitfn::empirical_limit(&table, k, &xs, budget)?;
    let lc = if closed_form {
        Some(closed_form_for(alpha, &table, k)?.ok_or(Error::NotPeriodic)?)
    } else {
        None
    };
    let mut header = vec!["x", "empirical"];
    if lc.is_some() {
        header.push("closed_form");
    }
    header.push("two_sin");
    let rows = xs
        .iter()
        .zip(&emp)
        .map(|(&x, &e)| {
            let mut row = vec![num(x), num(e)];
            if let Some(lc) = &lc {
                row.push(g_closed(lc, x).map_or_else(|_| "nan".to_owned(), num));
            }
            row.push(num(2.0 * (PI * x).sin().abs()));
            row
        })
        .collect::<Vec<_>>();
    emit(out, &csv(&header, rows))?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyJson {
    schema_version: u32,
    fixtures: String,
    seed: u64,
    suites: Vec<verify::SuiteReport>,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suites: &[String],
    alpha: Option<AlphaSpec>,
    k: Option<usize>,
    t: f64,
    fixtures: Option<PathBuf>,
    seed: u64,
    cfg: PrecisionConfig,
    out: Option<&Path>,
) -> Result<bool> {
    let mut chosen = Vec::new();
    for s in suites {
        if s == "all" {
            chosen.extend(Suite::ALL);
        } else {
            chosen.push(s.parse::<Suite>().map_err(Error::Domain)?);
        }
    }
    chosen.dedup();
    let path = fixtures.unwrap_or_else(fixtures::default_path);
    let fx = Fixtures::load(&path)?;
    let target = alpha.map(|alpha| TheoremTarget { alpha, k_top: k.unwrap_or(3) });
    let ctx = SuiteContext { target, t, seed, cfg };
    let mut reports = Vec::new();
    for suite in chosen {
        let r = verify::run_suite(suite, &ctx, &fx)?;
        let mut line = String::new();
        for note in &r.notes {
            let _ = writeln!(line, "  {note}");
        }
        for f in r.failures() {
            let _ = writeln!(
                line,
                "  FAIL {}: prediction {:.6e}, observed {:.6e}, budget {:.3e}",
                f.label, f.prediction, f.observed, f.error_budget
            );
        }
        println!(
            "{} {suite}: {}/{} checks",
            if r.pass { "PASS" } else { "FAIL" },
            r.reports.iter().filter(|x| x.pass).count(),
            r.reports.len()
        );
        print!("{line}");
        reports.push(r);
    }
    let pass = reports.iter().all(|r| r.pass);
    if let Some(out) = out {
        let record = VerifyJson {
            schema_version: SCHEMA_VERSION,
            fixtures: path.display().to_string(),
            seed,
            suites: reports,
            pass,
        };
        emit(Some(out), &json(&record)?)?;
    }
    Ok(pass)
}

fn fig_grid(step: f64) -> Result<Vec<f64>> {
    Ok(Grid::new(-1.0, 1.0, step).map_err(Error::Domain)?.points())
}

fn cmd_figures(which: Which, dir: &Path, step: f64, cfg: PrecisionConfig) -> Result<bool> {
    let xs = fig_grid(step)?;
    let two_sin: Vec<f64> = xs.iter().map(|x| 2.0 * (PI * x).sin().abs()).collect();
    if matches!(which, Which::Fig1 | Which::All) {
        let mut cols = Vec::new();
        for a in [5u64, 15, 50] {
            let t = ConvergentTable::build(&AlphaSpec::constant(a), 6, cfg)?;
            cols.push(limitfn::empirical_limit(&t, 4, &xs, DEFAULT_BUDGET)?);
        }
        let rows = (0..xs.len()).map(|i| {
            vec![num(xs[i]), num(cols[0][i]), num(cols[1][i]), num(cols[2][i]), num(two_sin[i])]
        });
        let path = dir.join("fig1.csv");
        emit(Some(&path), &csv(&["x", "a5", "a15", "a50", "two_sin"], rows))?;
        eprintln!("wrote {}", path.display());
    }
    if matches!(which, Which::Fig2 | Which::All) {
        let alpha = parse_alpha("[0;(2,50)]")?;
        let t = ConvergentTable::build(&alpha, 7, cfg)?;
        let mut cols = Vec::new();
        for k in [4usize, 5] {
            cols.push(limitfn::empirical_limit(&t, k, &xs, DEFAULT_BUDGET)?);
            let lc = closed_form_for(&alpha, &t, k)?.expect("periodic");
            cols.push(xs.iter().map(|&x| g_closed(&lc, x)).collect::<Result<Vec<_>>>()?);
        }
        let rows = (0..xs.len()).map(|i| {
            vec![num(xs[i]), num(cols[0][i]), num(cols[1][i]), num(cols[2][i]), num(cols[3][i]), num(two_sin[i])]
        });
        let path = dir.join("fig2.csv");
        emit(Some(&path), &csv(&["x", "k4", "k4_closed", "k5", "k5_closed", "two_sin"], rows))?;
        eprintln!("wrote {}", path.display());
        for (k, a_k, emp, closed) in verify::fig2_crossings(cfg)? {
            eprintln!("k={k} (a_k={a_k}): crosses 1 at x={emp:.4} (closed form {closed:.4})");
        }
    }
    if matches!(which, Which::Fig3 | Which::All) {
        let t = ConvergentTable::build(&AlphaSpec::constant(15), 6, cfg)?;
        let emp = limitfn::empirical_limit(&t, 4, &xs, DEFAULT_BUDGET)?;
        let rows = xs
            .iter()
            .zip(&emp)
            .map(|(&x, &e)| {
                let g = g_alpha(15, x)?;
                Ok(vec![num(x), num(e), num(g), num(e - g)])
            })
            .collect::<Result<Vec<_>>>()?;
        let path = dir.join("fig3.csv");
        emit(Some(&path), &csv(&["x", "empirical", "closed_form", "residual"], rows))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn bad_grid_is_a_usage_error() {
        let err = Cli::try_parse_from(["sudler", "limitfn", "--alpha", "[0;(3)]", "--k", "2", "--grid", "0:1"])
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_alpha_is_a_usage_error() {
        let err = Cli::try_parse_from(["sudler", "cf", "--alpha", "[0;(3"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
