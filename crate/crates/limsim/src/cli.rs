//! The toolchain commands behind the `limsim` binary: assemble,
//! disassemble, run with tracing and stats, batch-run the benchmark
//! suite. Everything here is a plain function so tests and examples can
//! drive the commands in-process.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::asm::{assemble, lint_lim_pairing, AsmError, AsmOptions, LintWarning};
use crate::bench::{run_suite, BenchError, VariantOutcome};
use crate::cpu::{CpuFault, HaltReason, RunStats, Simulator, TimingModel};
use crate::elf::write_elf;
use crate::isa::decode;
use crate::loader::{load_elf, load_flat, parse_elf, LoadError};
use crate::mem::{LimMemory, DEFAULT_MEM_BYTES};

pub const DEFAULT_MAX_INSTRUCTIONS: u64 = 100_000_000;
/// Process exit status used for runtime faults and other abnormal halts.
pub const FAULT_EXIT_STATUS: i32 = 70;
pub const MEM_BYTES_ENV: &str = "LIMSIM_MEM_BYTES";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Asm {
        path: PathBuf,
        #[source]
        source: AsmError,
    },
    #[error("{path}: {source}")]
    Load {
        path: PathBuf,
        #[source]
        source: LoadError,
    },
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{0}")]
    Config(String),
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Memory size default: `LIMSIM_MEM_BYTES` when set, 16 MiB otherwise.
pub fn default_mem_bytes() -> u32 {
    std::env::var(MEM_BYTES_ENV)
        .ok()
        .and_then(|v| crate::asm::parse_int(&v))
        .and_then(|v| u32::try_from(v).ok())
        .unwrap_or(DEFAULT_MEM_BYTES)
}

/// Everything `run` needs besides the program itself.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mem_bytes: u32,
    pub trace_path: Option<PathBuf>,
    pub stats_path: Option<PathBuf>,
    pub max_instructions: u64,
    pub strict_lim: bool,
    pub timing: TimingModel,
    /// Load address for flat binaries (ELF inputs carry their own).
    pub base: Option<u32>,
    /// Entry override for flat binaries.
    pub entry: Option<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mem_bytes: default_mem_bytes(),
            trace_path: None,
            stats_path: None,
            max_instructions: DEFAULT_MAX_INSTRUCTIONS,
            strict_lim: false,
            timing: TimingModel::default(),
            base: None,
            entry: None,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !self.mem_bytes.is_power_of_two() || self.mem_bytes < 64 * 1024 {
            return Err(CliError::Config(format!(
                "memory size must be a power of two >= 64 KiB, got {}",
                self.mem_bytes
            )));
        }
        if self.max_instructions == 0 {
            return Err(CliError::Config("instruction budget must be positive".into()));
        }
        Ok(())
    }
}

/// Loads a per-class timing override file (TOML, one key per field).
pub fn load_timing(path: &Path) -> Result<TimingModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The stats JSON object. Every key is always present; fields describing
/// events that did not occur report zero.
#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub instret: u64,
    pub cycles: u64,
    pub halt_reason: String,
    pub halt_detail: String,
    pub exit_code: u32,
    pub plain_reads: u64,
    pub plain_writes: u64,
    pub logic_stores: u64,
    pub load_masks: u64,
    pub activations: u64,
    pub activated_cells_peak: u64,
    pub data_accesses: u64,
    pub fetches: u64,
    pub nonzero_imm_logic_store_warnings: u64,
    pub wall_seconds: f64,
}

impl StatsReport {
    pub fn new(halt: &HaltReason, stats: &RunStats) -> Self {
        let (halt_reason, halt_detail, exit_code) = match halt {
            HaltReason::Exit { code } => ("exit", String::new(), *code),
            HaltReason::Fault { pc, fault } => ("fault", format!("pc=0x{pc:08x}: {fault}"), 0),
            HaltReason::InstructionLimit => ("instruction_limit", String::new(), 0),
            HaltReason::IllegalInstruction { pc, word } => {
                ("illegal_instruction", format!("pc=0x{pc:08x} word=0x{word:08x}"), 0)
            }
        };
        StatsReport {
            instret: stats.instret,
            cycles: stats.cycles,
            halt_reason: halt_reason.to_string(),
            halt_detail,
            exit_code,
            plain_reads: stats.mem.plain_reads,
            plain_writes: stats.mem.plain_writes,
            logic_stores: stats.mem.logic_stores,
            load_masks: stats.mem.load_masks,
            activations: stats.mem.activations,
            activated_cells_peak: stats.mem.activated_cells_peak,
            data_accesses: stats.mem.data_accesses(),
            fetches: stats.fetches,
            nonzero_imm_logic_store_warnings: stats.nonzero_imm_logic_stores,
            wall_seconds: stats.wall_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Elf,
    Flat,
}

/// `asm`: assemble a source file into an ELF executable or a flat binary
/// with a `.sym` sidecar. Pairing-lint warnings are returned for the
/// caller to print; they never fail the build.
pub fn cmd_asm(
    input: &Path,
    output: &Path,
    format: OutputFormat,
    opts: &AsmOptions,
) -> Result<Vec<LintWarning>, CliError> {
    let source = String::from_utf8_lossy(&read_file(input)?).into_owned();
    let image =
        assemble(&source, opts).map_err(|source| CliError::Asm { path: input.to_path_buf(), source })?;
    let warnings = lint_lim_pairing(&source);

    match format {
        OutputFormat::Elf => write_file(output, &write_elf(&image))?,
        OutputFormat::Flat => {
            let lo = image.segments.iter().map(|s| s.base).min().unwrap_or(0);
            let hi = image.segments.iter().map(|s| s.end()).max().unwrap_or(lo);
            let mut blob = vec![0u8; (hi - lo) as usize];
            for seg in &image.segments {
                let at = (seg.base - lo) as usize;
                blob[at..at + seg.data.len()].copy_from_slice(&seg.data);
            }
            write_file(output, &blob)?;
            let sym_path = output.with_extension("sym");
            write_file(&sym_path, image.symbol_map_text().as_bytes())?;
        }
    }
    Ok(warnings)
}

/// What `run` produced: the report, the guest's console bytes, and the
/// process exit status mirroring the guest exit code (faults map to 70).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: StatsReport,
    pub guest_stdout: Vec<u8>,
    pub exit_status: i32,
}

fn load_program(
    path: &Path,
    bytes: &[u8],
    cfg: &RunConfig,
    mem: &mut LimMemory,
) -> Result<crate::loader::LoadedProgram, CliError> {
    let wrap = |source| CliError::Load { path: path.to_path_buf(), source };
    if bytes.starts_with(&crate::elf::ELF_MAGIC) {
        load_elf(bytes, mem).map_err(wrap)
    } else {
        let base = cfg.base.unwrap_or(crate::asm::DEFAULT_TEXT_BASE);
        load_flat(bytes, base, cfg.entry, mem).map_err(wrap)
    }
}

/// `run`: execute a program to halt, writing the optional trace file and
/// the stats JSON.
pub fn cmd_run(program: &Path, cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let bytes = read_file(program)?;
    let mut mem = LimMemory::new(cfg.mem_bytes).with_strict_lim(cfg.strict_lim);
    let prog = load_program(program, &bytes, cfg, &mut mem)?;

    let mut sim = Simulator::new(mem, cfg.timing);
    sim.reset_to(&prog);
    sim.set_tracing(cfg.trace_path.is_some());
    let (halt, stats) = sim.run(cfg.max_instructions);

    if let Some(trace_path) = &cfg.trace_path {
        let mut text = String::new();
        for record in &sim.trace {
            text.push_str(&record.format_line());
            text.push('\n');
        }
        write_file(trace_path, text.as_bytes())?;
    }

    let report = StatsReport::new(&halt, &stats);
    if let Some(stats_path) = &cfg.stats_path {
        write_file(stats_path, format!("{}\n", report.to_json()).as_bytes())?;
    }

    let exit_status = match halt {
        HaltReason::Exit { code } => code as i32,
        _ => FAULT_EXIT_STATUS,
    };
    Ok(RunOutcome { report, guest_stdout: sim.stdout, exit_status })
}

fn listing_lines(out: &mut String, base: u32, data: &[u8], as_code: bool) {
    let words = data.chunks_exact(4);
    let tail = words.remainder();
    for (i, chunk) in words.enumerate() {
        let addr = base + 4 * i as u32;
        let word = u32::from_le_bytes(chunk.try_into().unwrap());
        let text = if as_code {
            match decode(word) {
                Ok(inst) => crate::isa::disassemble(&inst),
                Err(_) => format!(".word 0x{word:08x}"),
            }
        } else {
            format!(".word 0x{word:08x}")
        };
        out.push_str(&format!("{addr:08x}: {word:08x}  {text}\n"));
    }
    if !tail.is_empty() {
        let addr = base + (data.len() - tail.len()) as u32;
        let bytes: Vec<String> = tail.iter().map(|b| format!("0x{b:02x}")).collect();
        out.push_str(&format!("{addr:08x}: {:8}  .byte {}\n", "", bytes.join(", ")));
    }
}

/// `disasm`: address, raw word, and mnemonic per line. Executable ELF
/// segments are decoded; data segments and undecodable words render as
/// `.word`. Flat inputs are treated as all code at `base`.
pub fn cmd_disasm(program: &Path, base: Option<u32>) -> Result<String, CliError> {
    let bytes = read_file(program)?;
    let mut out = String::new();
    if bytes.starts_with(&crate::elf::ELF_MAGIC) {
        let (_, segments) =
            parse_elf(&bytes).map_err(|source| CliError::Load { path: program.into(), source })?;
        for seg in &segments {
            listing_lines(&mut out, seg.vaddr, &seg.data, seg.executable);
        }
    } else {
        listing_lines(&mut out, base.unwrap_or(crate::asm::DEFAULT_TEXT_BASE), &bytes, true);
    }
    Ok(out)
}

/// Renders the benchmark report table.
pub fn format_bench_table(outcomes: &[VariantOutcome]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:<7} {:>10} {:>10} {:>14} {:>9}  {}\n",
        "benchmark", "variant", "instret", "cycles", "data_accesses", "wall_s", "result"
    ));
    for o in outcomes {
        out.push_str(&format!(
            "{:<14} {:<7} {:>10} {:>10} {:>14} {:>9.4}  {}\n",
            o.benchmark,
            o.variant,
            o.stats.instret,
            o.stats.cycles,
            o.stats.mem.data_accesses(),
            o.stats.wall_seconds,
            if o.passed { "pass" } else { "fail" }
        ));
        if !o.passed {
            out.push_str(&format!("    {}\n", o.detail));
        }
    }
    out
}

/// `bench`: assemble, run, and verify the whole suite. Returns the table
/// and whether every variant passed.
pub fn cmd_bench(suite: &Path, out_path: Option<&Path>) -> Result<(String, bool), CliError> {
    let outcomes = run_suite(suite)?;
    let table = format_bench_table(&outcomes);
    if let Some(path) = out_path {
        write_file(path, table.as_bytes())?;
    }
    Ok((table, outcomes.iter().all(|o| o.passed)))
}

/// One-line halt description for diagnostics on standard error.
pub fn describe_halt(halt: &HaltReason) -> String {
    match halt {
        HaltReason::Exit { code } => format!("guest exited with code {code}"),
        HaltReason::Fault { pc, fault } => match fault {
            CpuFault::Mem(m) => format!("memory fault at pc=0x{pc:08x}: {m}"),
            other => format!("fault at pc=0x{pc:08x}: {other}"),
        },
        HaltReason::InstructionLimit => "instruction budget exhausted".to_string(),
        HaltReason::IllegalInstruction { pc, word } => {
            format!("illegal instruction 0x{word:08x} at pc=0x{pc:08x}")
        }
    }
}
