use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use limsim::asm::AsmOptions;
use limsim::cli::{
    cmd_asm, cmd_bench, cmd_disasm, cmd_run, default_mem_bytes, load_timing, OutputFormat,
    RunConfig, DEFAULT_MAX_INSTRUCTIONS,
};

#[derive(Parser)]
#[command(
    name = "limsim",
    about = "RV32IM simulator and assembler with logic-in-memory extensions",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Elf,
    Flat,
}

fn parse_u32(text: &str) -> Result<u32, String> {
    limsim::asm::parse_int(text)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| format!("'{text}' is not a 32-bit value"))
}

#[derive(Subcommand)]
enum Command {
    /// Assemble a source file into an ELF executable or flat binary
    Asm {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "elf")]
        format: Format,
        /// Text section base address
        #[arg(long, value_parser = parse_u32, default_value = "0x1000")]
        base_text: u32,
        /// Data section base address
        #[arg(long, value_parser = parse_u32, default_value = "0x100000")]
        base_data: u32,
    },
    /// Disassemble an ELF executable or flat binary
    Disasm {
        program: PathBuf,
        /// Load address for flat inputs
        #[arg(long, value_parser = parse_u32)]
        base: Option<u32>,
    },
    /// Load and execute a program, reporting stats as JSON
    Run {
        program: PathBuf,
        /// Write a per-instruction trace to this file
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the stats JSON here instead of standard output
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_INSTRUCTIONS)]
        max_instructions: u64,
        /// Memory size in bytes (power of two, >= 64 KiB)
        #[arg(long, value_parser = parse_u32)]
        mem_bytes: Option<u32>,
        /// Fault when a masked load disagrees with the cell state
        #[arg(long)]
        strict_lim: bool,
        /// TOML file overriding the per-class cycle costs
        #[arg(long)]
        timing: Option<PathBuf>,
        /// Load address for flat inputs
        #[arg(long, value_parser = parse_u32)]
        base: Option<u32>,
        /// Entry point override for flat inputs
        #[arg(long, value_parser = parse_u32)]
        entry: Option<u32>,
    },
    /// Assemble, run, and verify the benchmark suite
    Bench {
        /// Benchmark manifest file
        #[arg(long)]
        suite: PathBuf,
        /// Also write the report table to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("limsim: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(args: Args) -> Result<ExitCode, limsim::cli::CliError> {
    match args.command {
        Command::Asm { input, output, format, base_text, base_data } => {
            let format = match format {
                Format::Elf => OutputFormat::Elf,
                Format::Flat => OutputFormat::Flat,
            };
            let opts = AsmOptions { base_text, base_data };
            let warnings = cmd_asm(&input, &output, format, &opts)?;
            for warning in warnings {
                eprintln!("{}: {warning}", input.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Disasm { program, base } => {
            print!("{}", cmd_disasm(&program, base)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            program,
            trace,
            stats,
            max_instructions,
            mem_bytes,
            strict_lim,
            timing,
            base,
            entry,
        } => {
            let cfg = RunConfig {
                mem_bytes: mem_bytes.unwrap_or_else(default_mem_bytes),
                trace_path: trace,
                stats_path: stats.clone(),
                max_instructions,
                strict_lim,
                timing: timing.as_deref().map(load_timing).transpose()?.unwrap_or_default(),
                base,
                entry,
            };
            let outcome = cmd_run(&program, &cfg)?;
            std::io::stdout().write_all(&outcome.guest_stdout).ok();
            if stats.is_none() {
                println!("{}", outcome.report.to_json());
            }
            if outcome.report.halt_reason != "exit" {
                eprintln!("limsim: {}", outcome.report.halt_detail);
            }
            Ok(ExitCode::from(outcome.exit_status.clamp(0, 255) as u8))
        }
        Command::Bench { suite, out } => {
            let (table, all_passed) = cmd_bench(&suite, out.as_deref())?;
            print!("{table}");
            Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
