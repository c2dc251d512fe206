//! Argument parsing and subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use ssp_core::engine::{decide_ssp_parallel, first_unseparated};
use ssp_core::reductions::nop_free::{
    gen_nop_free, gen_nop_free_alpha_region, gen_nop_free_witness, transport, SwapKernel,
};
use ssp_core::reductions::nop_inp::{gen_nop_inp, gen_nop_inp_witness, model_region, nop_inp_type};
use ssp_core::reductions::{cm_oracle, extend, CmFormula, ExtensionKind, NamedRegion};
use ssp_core::{classify_type, decide_ssp, is_region, solve_atom, Atom, AtomVerdict, SearchBudget, TransitionSystem};

use crate::format::{
    format_type, parse_formula, parse_model, parse_ts, parse_ts_json, parse_type, serialize_ts, serialize_ts_json,
    to_dot,
};
use crate::report::{render_region, RegionJson, RegionSetJson, ReportJson};
use crate::verify::{run_suite, Scale, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ssp-kit", version, about = "Boolean state separation for transition systems")]
pub struct Cli {
    /// Read and write transition systems in the JSON format.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reduction {
    NopInp,
    NopFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Backward,
    OnewayLoop,
    Loop,
}

impl From<Kind> for ExtensionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Backward => ExtensionKind::Backward,
            Kind::OnewayLoop => ExtensionKind::OnewayLoop,
            Kind::Loop => ExtensionKind::Loop,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kernel {
    SwapFree,
    SwapUsed,
    ResSwap,
    SetSwap,
}

impl From<Kernel> for SwapKernel {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::SwapFree => SwapKernel::Free,
            Kernel::SwapUsed => SwapKernel::Used,
            Kernel::ResSwap => SwapKernel::Res,
            Kernel::SetSwap => SwapKernel::Set,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complexity row of a Boolean type.
    Classify {
        #[arg(long = "type", value_name = "TYPE")]
        tau: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide the state separation property.
    CheckSsp {
        file: PathBuf,
        #[arg(long = "type", value_name = "TYPE")]
        tau: String,
        /// Search nodes allowed per atom.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search a region separating two states.
    SolveAtom {
        file: PathBuf,
        #[arg(long = "type", value_name = "TYPE")]
        tau: String,
        /// The two states, as `s,t`.
        #[arg(long)]
        atom: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build the hardness instance of a formula.
    Gen {
        #[arg(value_enum)]
        reduction: Reduction,
        formula: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add reverse edges and loops to a loop-free system.
    Transform {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witness regions of a hardness instance from a one-in-three model.
    Witness {
        #[arg(value_enum)]
        reduction: Reduction,
        formula: PathBuf,
        /// Variables set to true, e.g. `X0,X4`.
        #[arg(long)]
        model: String,
        /// Only the region solving the key atom.
        #[arg(long)]
        alpha_only: bool,
        /// Target type for nop-free witnesses.
        #[arg(long, value_enum, default_value_t = Kernel::SwapFree)]
        kernel: Kernel,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scale::Small)]
        scale: Scale,
    },
    /// Find a one-in-three model of a formula.
    Oracle { formula: PathBuf },
    /// Graphviz rendering of a system.
    Dot { file: PathBuf },
}

/// Failure reported on stderr with [`EXIT_ERROR`].
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct CliError(String);

fn err(e: impl std::fmt::Display) -> CliError {
    CliError(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

/// Worker cap from `SSP_KIT_THREADS`, defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var("SSP_KIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

struct Ctx<'a> {
    json: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn load_ts(&self, path: &Path) -> Result<TransitionSystem, CliError> {
        let text = read(path)?;
        let parsed = if self.json {
            parse_ts_json(&text)
        } else {
            parse_ts(&text)
        };
        parsed.map_err(|e| CliError(format!("{}: {e}", path.display())))
    }

    fn render_ts(&self, ts: &TransitionSystem, header: &[String]) -> String {
        if self.json {
            return serialize_ts_json(ts);
        }
        let mut text: String = header.iter().map(|h| format!("# {h}\n")).collect();
        text.push_str(&serialize_ts(ts));
        text
    }

    /// Writes `text` to `out` if given, else to stdout.
    fn emit(&mut self, out: Option<&Path>, text: &str) -> Result<(), CliError> {
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError(format!("{}: {e}", path.display()))),
            None => self.out.write_all(text.as_bytes()).map_err(err),
        }
    }
}

fn load_formula(path: &Path) -> Result<CmFormula, CliError> {
    parse_formula(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn budget(nodes: Option<u64>) -> SearchBudget {
    nodes.map_or_else(SearchBudget::default, SearchBudget::nodes)
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_ERROR
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        out,
        err,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> Result<i32, CliError> {
    match command {
        Command::Classify { tau, format } => {
            let tau = parse_type(&tau).map_err(err)?;
            let c = classify_type(tau);
            let text = match format {
                Format::Text => format!("{c}\n"),
                Format::Json => {
                    json!({ "type": format_type(tau), "row": c.row, "complexity": c.complexity }).to_string() + "\n"
                }
            };
            ctx.out.write_all(text.as_bytes()).map_err(err)?;
            Ok(EXIT_OK)
        }
        Command::CheckSsp {
            file,
            tau,
            budget: nodes,
            format,
        } => {
            let ts = ctx.load_ts(&file)?;
            let tau = parse_type(&tau).map_err(err)?;
            let threads = thread_count();
            let report = if threads > 1 {
                decide_ssp_parallel(&ts, tau, budget(nodes), threads)
            } else {
                decide_ssp(&ts, tau, budget(nodes))
            };
            let json = ReportJson::new(&ts, &report);
            let text = match format {
                Format::Text => json.render_text(),
                Format::Json => serde_json::to_string_pretty(&json).map_err(err)? + "\n",
            };
            ctx.out.write_all(text.as_bytes()).map_err(err)?;
            Ok(match json.decision.as_str() {
                "has_ssp" => EXIT_OK,
                "lacks_ssp" => EXIT_NEGATIVE,
                _ => EXIT_UNKNOWN,
            })
        }
        Command::SolveAtom {
            file,
            tau,
            atom,
            budget: nodes,
            format,
        } => {
            let ts = ctx.load_ts(&file)?;
            let tau = parse_type(&tau).map_err(err)?;
            let names: Vec<&str> = atom.split(',').map(str::trim).collect();
            let [a, b] = names.as_slice() else {
                return Err(CliError(format!("atom `{atom}` is not of the form `s,t`")));
            };
            let atom = Atom::named(&ts, a, b).ok_or_else(|| CliError(format!("no atom ({a}, {b}) in this system")))?;
            let (label, region, code) = match solve_atom(&ts, tau, atom, budget(nodes)) {
                AtomVerdict::Solved(r) => ("solved", Some(RegionJson::new(&ts, &r)), EXIT_OK),
                AtomVerdict::Unsolvable => ("unsolvable", None, EXIT_NEGATIVE),
                AtomVerdict::Exhausted(_) => ("exhausted", None, EXIT_UNKNOWN),
            };
            let text = match format {
                Format::Text => match &region {
                    Some(r) => format!("{label}: {}\n", render_region(r)),
                    None => format!("{label}\n"),
                },
                Format::Json => json!({ "verdict": label, "region": region }).to_string() + "\n",
            };
            ctx.out.write_all(text.as_bytes()).map_err(err)?;
            Ok(code)
        }
        Command::Gen {
            reduction,
            formula,
            out,
        } => {
            let formula = load_formula(&formula)?;
            let (name, ts, alpha) = match reduction {
                Reduction::NopInp => {
                    let inst = gen_nop_inp(&formula);
                    ("nop-inp", inst.ts, inst.alpha)
                }
                Reduction::NopFree => {
                    let inst = gen_nop_free(&formula);
                    ("nop-free", inst.ts, inst.alpha)
                }
            };
            let (a, b) = alpha.names(&ts);
            let meta = format!(
                "{name} instance: {} states, {} events, key atom {a},{b}",
                ts.num_states(),
                ts.num_events()
            );
            let text = ctx.render_ts(&ts, std::slice::from_ref(&meta));
            ctx.emit(out.as_deref(), &text)?;
            if out.is_some() {
                writeln!(ctx.out, "{meta}").map_err(err)?;
            } else if ctx.json {
                writeln!(ctx.err, "{meta}").map_err(err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Transform { file, kind, out } => {
            let ts = ctx.load_ts(&file)?;
            let extended = extend(&ts, kind.into()).map_err(err)?;
            let text = ctx.render_ts(&extended, &[]);
            ctx.emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Witness {
            reduction,
            formula,
            model,
            alpha_only,
            kernel,
            out,
        } => {
            let formula = load_formula(&formula)?;
            let model = parse_model(&formula, &model).map_err(err)?;
            let (ts, tau, alpha, regions) = match reduction {
                Reduction::NopInp => {
                    let inst = gen_nop_inp(&formula);
                    let regions = if alpha_only {
                        vec![model_region(&inst, &model).map_err(err)?]
                    } else {
                        gen_nop_inp_witness(&inst, &model).map_err(err)?
                    };
                    (inst.ts, nop_inp_type(), inst.alpha, regions)
                }
                Reduction::NopFree => {
                    let inst = gen_nop_free(&formula);
                    let kernel = SwapKernel::from(kernel);
                    let regions = if alpha_only {
                        let r = gen_nop_free_alpha_region(&inst, &model).map_err(err)?;
                        vec![NamedRegion {
                            name: "R_alpha".into(),
                            region: r,
                        }]
                    } else {
                        gen_nop_free_witness(&inst, &model).map_err(err)?
                    };
                    let moved = regions
                        .into_iter()
                        .map(|r| NamedRegion {
                            name: r.name,
                            region: transport(&r.region, kernel),
                        })
                        .collect();
                    (inst.ts, kernel.tau(), inst.alpha, moved)
                }
            };
            let valid = regions.iter().filter(|r| is_region(&ts, tau, &r.region)).count();
            let all: Vec<_> = regions.iter().map(|r| r.region.clone()).collect();
            let (a, b) = alpha.names(&ts);
            let solves_alpha = all.iter().any(|r| r.separates(alpha.first, alpha.second));
            let mut summary = format!(
                "{} regions, {valid} valid for {}, key atom ({a}, {b}) solved: {}",
                regions.len(),
                format_type(tau),
                yes(solves_alpha)
            );
            let separative = match first_unseparated(&ts, &all) {
                None => true,
                Some(atom) => {
                    let (s, t) = atom.names(&ts);
                    if !alpha_only {
                        summary.push_str(&format!(", first unseparated atom ({s}, {t})"));
                    }
                    false
                }
            };
            if !alpha_only {
                summary.push_str(&format!(", separative: {}", yes(separative)));
            }
            let set = RegionSetJson::new(&ts, &format_type(tau), &regions);
            let text = serde_json::to_string_pretty(&set).map_err(err)? + "\n";
            ctx.emit(out.as_deref(), &text)?;
            let report: &mut dyn Write = if out.is_some() { &mut *ctx.out } else { &mut *ctx.err };
            writeln!(report, "{summary}").map_err(err)?;
            let ok = valid == regions.len() && solves_alpha && (alpha_only || separative);
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Verify { suite, seed, scale } => {
            let checks = run_suite(suite, seed, scale);
            let passed = checks.iter().filter(|c| c.passed).count();
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                writeln!(ctx.out, "{status} {}/{}: {}", c.suite, c.name, c.detail).map_err(err)?;
            }
            writeln!(ctx.out, "{passed}/{} checks passed", checks.len()).map_err(err)?;
            Ok(if passed == checks.len() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Oracle { formula } => {
            let formula = load_formula(&formula)?;
            match cm_oracle(&formula).map_err(err)? {
                Some(model) => {
                    let names: Vec<&str> = model.iter().map(|&v| formula.name(v)).collect();
                    writeln!(ctx.out, "{}", names.join(" ")).map_err(err)?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(ctx.out, "unsatisfiable").map_err(err)?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Dot { file } => {
            let ts = ctx.load_ts(&file)?;
            ctx.out.write_all(to_dot(&ts).as_bytes()).map_err(err)?;
            Ok(EXIT_OK)
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
