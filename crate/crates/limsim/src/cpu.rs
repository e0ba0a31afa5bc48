//! In-order RV32IM interpreter with the LiM decode extension, a
//! configurable per-class timing model, packet-based memory access, and
//! per-instruction trace emission.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::isa::{
    decode, disassemble, AluOp, BranchCond, CounterId, Instruction, LoadWidth, MulDivOp, Reg,
    StoreWidth,
};
use crate::loader::LoadedProgram;
use crate::mem::{LimMemory, MemFault, MemRequest, MemStats};

/// Architectural register file, program counter, and the two counters.
#[derive(Debug, Clone)]
pub struct CpuState {
    regs: [u32; 32],
    pub pc: u32,
    pub cycles: u64,
    pub instret: u64,
}

impl CpuState {
    pub fn new() -> Self {
        CpuState { regs: [0; 32], pc: 0, cycles: 0, instret: 0 }
    }

    pub fn reg(&self, r: Reg) -> u32 {
        self.regs[r.index()]
    }

    /// Writes a register; x0 stays hardwired to zero.
    pub fn set_reg(&mut self, r: Reg, value: u32) {
        if !r.is_zero() {
            self.regs[r.index()] = value;
        }
    }
}

impl Default for CpuState {
    fn default() -> Self {
        CpuState::new()
    }
}

/// Per-instruction-class cycle costs. The values are uncalibrated
/// placeholders meant to be overridden from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingModel {
    pub base_cycles_per_instruction: u64,
    pub extra_cycles_load: u64,
    pub extra_cycles_store: u64,
    pub extra_cycles_lim_activate: u64,
    pub extra_cycles_lim_loadmask: u64,
    pub extra_cycles_mul: u64,
    pub extra_cycles_div: u64,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel {
            base_cycles_per_instruction: 1,
            extra_cycles_load: 1,
            extra_cycles_store: 1,
            extra_cycles_lim_activate: 1,
            extra_cycles_lim_loadmask: 1,
            extra_cycles_mul: 3,
            extra_cycles_div: 32,
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    Exit { code: u32 },
    Fault { pc: u32, fault: CpuFault },
    InstructionLimit,
    IllegalInstruction { pc: u32, word: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpuFault {
    Mem(MemFault),
    MisalignedFetch { addr: u32 },
    UnsupportedSyscall { number: u32 },
    Breakpoint,
}

impl std::fmt::Display for CpuFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CpuFault::Mem(m) => write!(f, "{m}"),
            CpuFault::MisalignedFetch { addr } => write!(f, "misaligned fetch at 0x{addr:08x}"),
            CpuFault::UnsupportedSyscall { number } => write!(f, "unsupported syscall {number}"),
            CpuFault::Breakpoint => write!(f, "breakpoint"),
        }
    }
}

/// Memory effect kind recorded in the trace: plain read, plain write,
/// logic write, load-mask, activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemEffectKind {
    Read,
    Write,
    LogicWrite,
    LoadMask,
    Activate,
}

impl MemEffectKind {
    pub fn tag(self) -> &'static str {
        match self {
            MemEffectKind::Read => "R",
            MemEffectKind::Write => "W",
            MemEffectKind::LogicWrite => "LW",
            MemEffectKind::LoadMask => "LM",
            MemEffectKind::Activate => "ACT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemEffect {
    pub kind: MemEffectKind,
    pub addr: u32,
    /// Read value, written/combined value, masked result, or activation
    /// range depending on `kind`.
    pub data: u32,
}

/// One retired instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub cycle: u64,
    pub pc: u32,
    pub word: u32,
    pub text: String,
    pub writeback: Option<(Reg, u32)>,
    pub mem: Option<MemEffect>,
}

impl TraceRecord {
    /// Renders the stable one-line trace format:
    /// `cycle=<u64> pc=<hex8> insn=<hex8> <disassembly> [rd=x<N>:<hex8>] [mem=<tag>:<hex8>:<hex8>]`
    pub fn format_line(&self) -> String {
        let mut line =
            format!("cycle={} pc={:08x} insn={:08x} {}", self.cycle, self.pc, self.word, self.text);
        if let Some((rd, value)) = self.writeback {
            line.push_str(&format!(" rd={}:{:08x}", rd, value));
        }
        if let Some(effect) = self.mem {
            line.push_str(&format!(" mem={}:{:08x}:{:08x}", effect.kind.tag(), effect.addr, effect.data));
        }
        line
    }
}

/// End-of-run statistics.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub instret: u64,
    pub cycles: u64,
    /// Instruction fetches; kept out of the data-access counters.
    pub fetches: u64,
    pub mem: MemStats,
    /// Logic stores whose effective address used a nonzero immediate,
    /// violating the activation pairing convention.
    pub nonzero_imm_logic_stores: u64,
    pub wall_seconds: f64,
}

/// A single-threaded simulator instance owning its CPU state and memory.
pub struct Simulator {
    pub cpu: CpuState,
    pub mem: LimMemory,
    pub timing: TimingModel,
    tracing: bool,
    pub trace: Vec<TraceRecord>,
    /// Bytes emitted by the guest through the write syscall.
    pub stdout: Vec<u8>,
    fetches: u64,
    nonzero_imm_logic_stores: u64,
}

const SYSCALL_EXIT: u32 = 93;
const SYSCALL_WRITE: u32 = 64;

impl Simulator {
    pub fn new(mem: LimMemory, timing: TimingModel) -> Self {
        Simulator {
            cpu: CpuState::new(),
            mem,
            timing,
            tracing: false,
            trace: Vec::new(),
            stdout: Vec::new(),
            fetches: 0,
            nonzero_imm_logic_stores: 0,
        }
    }

    pub fn set_tracing(&mut self, on: bool) {
        self.tracing = on;
    }

    /// Points the CPU at a loaded program: entry pc and initial stack.
    pub fn reset_to(&mut self, prog: &LoadedProgram) {
        self.cpu.pc = prog.entry;
        self.cpu.set_reg(Reg::SP, prog.initial_sp);
    }

    fn mem_access(&mut self, pc: u32, req: MemRequest) -> Result<crate::mem::MemResponse, HaltReason> {
        self.mem.handle(req).map_err(|fault| HaltReason::Fault { pc, fault: CpuFault::Mem(fault) })
    }

    /// Fetches, decodes, and executes one instruction. Returns `Some` when
    /// the run must stop; the faulting or exiting instruction itself
    /// decides whether it retires (exit does, faults do not).
    pub fn step(&mut self) -> Option<HaltReason> {
        let pc = self.cpu.pc;
        if pc % 4 != 0 {
            return Some(HaltReason::Fault { pc, fault: CpuFault::MisalignedFetch { addr: pc } });
        }
        let word = match self.mem.peek_word(pc) {
            Ok(word) => word,
            Err(fault) => return Some(HaltReason::Fault { pc, fault: CpuFault::Mem(fault) }),
        };
        self.fetches += 1;
        let inst = match decode(word) {
            Ok(inst) => inst,
            Err(_) => return Some(HaltReason::IllegalInstruction { pc, word }),
        };

        let mut next_pc = pc.wrapping_add(4);
        let mut writeback: Option<(Reg, u32)> = None;
        let mut mem_effect: Option<MemEffect> = None;
        let mut extra_cycles = 0u64;
        let mut halt: Option<HaltReason> = None;

        match inst {
            Instruction::Lui { rd, imm } => writeback = Some((rd, imm)),
            Instruction::Auipc { rd, imm } => writeback = Some((rd, pc.wrapping_add(imm))),
            Instruction::Jal { rd, offset } => {
                writeback = Some((rd, pc.wrapping_add(4)));
                next_pc = pc.wrapping_add(offset as u32);
            }
            Instruction::Jalr { rd, rs1, offset } => {
                let target = self.cpu.reg(rs1).wrapping_add(offset as u32) & !1;
                writeback = Some((rd, pc.wrapping_add(4)));
                next_pc = target;
            }
            Instruction::Branch { cond, rs1, rs2, offset } => {
                let a = self.cpu.reg(rs1);
                let b = self.cpu.reg(rs2);
                let taken = match cond {
                    BranchCond::Eq => a == b,
                    BranchCond::Ne => a != b,
                    BranchCond::Lt => (a as i32) < (b as i32),
                    BranchCond::Ge => (a as i32) >= (b as i32),
                    BranchCond::Ltu => a < b,
                    BranchCond::Geu => a >= b,
                };
                if taken {
                    next_pc = pc.wrapping_add(offset as u32);
                }
            }
            Instruction::Load { width, rd, rs1, offset } => {
                extra_cycles = self.timing.extra_cycles_load;
                let addr = self.cpu.reg(rs1).wrapping_add(offset as u32);
                let req = match width {
                    LoadWidth::Word => MemRequest::read_word(addr),
                    LoadWidth::Half | LoadWidth::HalfUnsigned => MemRequest::read_half(addr),
                    LoadWidth::Byte | LoadWidth::ByteUnsigned => MemRequest::read_byte(addr),
                };
                match self.mem_access(pc, req) {
                    Ok(resp) => {
                        let value = match width {
                            LoadWidth::Word => resp.data,
                            LoadWidth::Half => resp.data as u16 as i16 as i32 as u32,
                            LoadWidth::HalfUnsigned => resp.data,
                            LoadWidth::Byte => resp.data as u8 as i8 as i32 as u32,
                            LoadWidth::ByteUnsigned => resp.data,
                        };
                        writeback = Some((rd, value));
                        mem_effect =
                            Some(MemEffect { kind: MemEffectKind::Read, addr, data: resp.data });
                    }
                    Err(reason) => halt = Some(reason),
                }
            }
            Instruction::Store { width, rs1, rs2, offset } => {
                extra_cycles = self.timing.extra_cycles_store;
                let addr = self.cpu.reg(rs1).wrapping_add(offset as u32);
                let data = self.cpu.reg(rs2);
                let req = match width {
                    StoreWidth::Word => MemRequest::write_word(addr, data),
                    StoreWidth::Half => MemRequest::write_half(addr, data),
                    StoreWidth::Byte => MemRequest::write_byte(addr, data),
                };
                match self.mem_access(pc, req) {
                    Ok(resp) => {
                        let kind = if resp.logic_store {
                            if offset != 0 {
                                self.nonzero_imm_logic_stores += 1;
                            }
                            MemEffectKind::LogicWrite
                        } else {
                            MemEffectKind::Write
                        };
                        mem_effect = Some(MemEffect { kind, addr, data: resp.data });
                    }
                    Err(reason) => halt = Some(reason),
                }
            }
            Instruction::OpImm { op, rd, rs1, imm } => {
                let value = alu(op, self.cpu.reg(rs1), imm as u32);
                writeback = Some((rd, value));
            }
            Instruction::Op { op, rd, rs1, rs2 } => {
                let value = alu(op, self.cpu.reg(rs1), self.cpu.reg(rs2));
                writeback = Some((rd, value));
            }
            Instruction::MulDiv { op, rd, rs1, rs2 } => {
                extra_cycles = match op {
                    MulDivOp::Mul | MulDivOp::Mulh | MulDivOp::Mulhsu | MulDivOp::Mulhu => {
                        self.timing.extra_cycles_mul
                    }
                    _ => self.timing.extra_cycles_div,
                };
                let value = muldiv(op, self.cpu.reg(rs1), self.cpu.reg(rs2));
                writeback = Some((rd, value));
            }
            Instruction::Fence => {}
            Instruction::Ecall => match self.ecall_dispatch(pc) {
                Ok(wb) => writeback = wb,
                Err(reason) => halt = Some(reason),
            },
            Instruction::Ebreak => {
                halt = Some(HaltReason::Fault { pc, fault: CpuFault::Breakpoint });
            }
            Instruction::ReadCounter { rd, counter } => {
                let value = match counter {
                    CounterId::Cycle => self.cpu.cycles as u32,
                    CounterId::CycleHigh => (self.cpu.cycles >> 32) as u32,
                    CounterId::InstRet => self.cpu.instret as u32,
                    CounterId::InstRetHigh => (self.cpu.instret >> 32) as u32,
                };
                writeback = Some((rd, value));
            }
            Instruction::LimStoreActiveLogic { base_reg, range_reg, mem_op } => {
                extra_cycles = self.timing.extra_cycles_lim_activate;
                let base = self.cpu.reg(base_reg);
                let range = self.cpu.reg(range_reg);
                match self.mem_access(pc, MemRequest::activate(base, range, mem_op)) {
                    Ok(_) => {
                        mem_effect = Some(MemEffect {
                            kind: MemEffectKind::Activate,
                            addr: base,
                            data: range,
                        });
                    }
                    Err(reason) => halt = Some(reason),
                }
            }
            Instruction::LimLoadMask { dest_reg, base_reg, source_reg, mem_op } => {
                extra_cycles = self.timing.extra_cycles_lim_loadmask;
                let addr = self.cpu.reg(base_reg);
                let mask = self.cpu.reg(source_reg);
                match self.mem_access(pc, MemRequest::load_mask(addr, mask, mem_op)) {
                    Ok(resp) => {
                        writeback = Some((dest_reg, resp.data));
                        mem_effect = Some(MemEffect {
                            kind: MemEffectKind::LoadMask,
                            addr,
                            data: resp.data,
                        });
                    }
                    Err(reason) => halt = Some(reason),
                }
            }
        }

        // A faulting instruction does not retire: no state update, no
        // trace record, no counter movement. The exit ecall does retire.
        if let Some(reason) = halt {
            if !matches!(reason, HaltReason::Exit { .. }) {
                return Some(reason);
            }
        }

        let cycle = self.cpu.cycles;
        if let Some((rd, value)) = writeback {
            self.cpu.set_reg(rd, value);
        }
        if self.tracing {
            self.trace.push(TraceRecord {
                cycle,
                pc,
                word,
                text: disassemble(&inst),
                writeback: writeback.filter(|(rd, _)| !rd.is_zero()),
                mem: mem_effect,
            });
        }
        self.cpu.pc = next_pc;
        self.cpu.cycles += self.timing.base_cycles_per_instruction + extra_cycles;
        self.cpu.instret += 1;
        halt
    }

    /// Runs until halt or until `max_instructions` have retired.
    pub fn run(&mut self, max_instructions: u64) -> (HaltReason, RunStats) {
        let start = Instant::now();
        let limit = self.cpu.instret.saturating_add(max_instructions);
        let halt = loop {
            if self.cpu.instret >= limit {
                break HaltReason::InstructionLimit;
            }
            if let Some(reason) = self.step() {
                break reason;
            }
        };
        let stats = RunStats {
            instret: self.cpu.instret,
            cycles: self.cpu.cycles,
            fetches: self.fetches,
            mem: *self.mem.stats(),
            nonzero_imm_logic_stores: self.nonzero_imm_logic_stores,
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        (halt, stats)
    }

    /// Newlib-style environment calls: a7 selects, a0-a2 carry arguments.
    /// Only `exit` (93) and `write` (64, fd 1 or 2) exist.
    fn ecall_dispatch(&mut self, pc: u32) -> Result<Option<(Reg, u32)>, HaltReason> {
        let a0 = Reg::new(10).unwrap();
        let number = self.cpu.reg(Reg::new(17).unwrap());
        match number {
            SYSCALL_EXIT => Err(HaltReason::Exit { code: self.cpu.reg(a0) }),
            SYSCALL_WRITE => {
                let fd = self.cpu.reg(a0);
                if fd != 1 && fd != 2 {
                    return Err(HaltReason::Fault {
                        pc,
                        fault: CpuFault::UnsupportedSyscall { number },
                    });
                }
                let addr = self.cpu.reg(Reg::new(11).unwrap());
                let len = self.cpu.reg(Reg::new(12).unwrap());
                // Console traffic is simulator plumbing, not data-path
                // memory accesses, so it bypasses the packet counters.
                let bytes = self
                    .mem
                    .peek_bytes(addr, len)
                    .map_err(|fault| HaltReason::Fault { pc, fault: CpuFault::Mem(fault) })?;
                self.stdout.extend_from_slice(bytes);
                Ok(Some((a0, len)))
            }
            _ => Err(HaltReason::Fault { pc, fault: CpuFault::UnsupportedSyscall { number } }),
        }
    }
}

fn alu(op: AluOp, a: u32, b: u32) -> u32 {
    match op {
        AluOp::Add => a.wrapping_add(b),
        AluOp::Sub => a.wrapping_sub(b),
        AluOp::Sll => a << (b & 0x1f),
        AluOp::Slt => ((a as i32) < (b as i32)) as u32,
        AluOp::Sltu => (a < b) as u32,
        AluOp::Xor => a ^ b,
        AluOp::Srl => a >> (b & 0x1f),
        AluOp::Sra => ((a as i32) >> (b & 0x1f)) as u32,
        AluOp::Or => a | b,
        AluOp::And => a & b,
    }
}

fn muldiv(op: MulDivOp, a: u32, b: u32) -> u32 {
    match op {
        MulDivOp::Mul => a.wrapping_mul(b),
        MulDivOp::Mulh => ((a as i32 as i64).wrapping_mul(b as i32 as i64) >> 32) as u32,
        MulDivOp::Mulhsu => ((a as i32 as i64).wrapping_mul(b as i64) >> 32) as u32,
        MulDivOp::Mulhu => ((a as u64 * b as u64) >> 32) as u32,
        MulDivOp::Div => {
            if b == 0 {
                u32::MAX
            } else if a == 0x8000_0000 && b == u32::MAX {
                a
            } else {
                ((a as i32) / (b as i32)) as u32
            }
        }
        MulDivOp::Divu => {
            if b == 0 {
                u32::MAX
            } else {
                a / b
            }
        }
        MulDivOp::Rem => {
            if b == 0 {
                a
            } else if a == 0x8000_0000 && b == u32::MAX {
                0
            } else {
                ((a as i32) % (b as i32)) as u32
            }
        }
        MulDivOp::Remu => {
            if b == 0 {
                a
            } else {
                a % b
            }
        }
    }
}
