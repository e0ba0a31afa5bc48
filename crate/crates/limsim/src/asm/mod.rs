//! Two-pass assembler for the RV32IM subset plus the LiM mnemonics.
//!
//! Pass 1 computes the layout and the symbol table; pass 2 encodes
//! instructions, resolves branch and jump targets, and expands
//! pseudo-instructions. The dialect is a strict subset of standard RISC-V
//! assembly extended with:
//!
//! * `lim.active rs1, rs2, <none|and|or|xor|nand|nor|xnor>`
//! * `lim.loadmask rd, rs1, rs2, <op>`

mod lint;
mod parser;

pub use lint::{lint_lim_pairing, LintWarning};
pub use parser::{parse_int, parse_reg};

use std::collections::BTreeMap;

use crate::isa::{
    encode, encode_load_mask, encode_store_active_logic, AluOp, BranchCond, CounterId,
    Instruction, LoadWidth, MulDivOp, Reg, StoreWidth,
};
use parser::{parse, parse_mem_op, parse_mem_operand, parse_string_literal, Body};

pub const DEFAULT_TEXT_BASE: u32 = 0x1000;
pub const DEFAULT_DATA_BASE: u32 = 0x0010_0000;

/// The conventional entry label. When absent, execution starts at the
/// beginning of the text segment.
pub const ENTRY_SYMBOL: &str = "_start";

#[derive(Debug, Clone, Copy)]
pub struct AsmOptions {
    pub base_text: u32,
    pub base_data: u32,
}

impl Default for AsmOptions {
    fn default() -> Self {
        AsmOptions { base_text: DEFAULT_TEXT_BASE, base_data: DEFAULT_DATA_BASE }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AsmError {
    #[error("line {line}: unknown mnemonic '{name}'")]
    UnknownMnemonic { line: usize, name: String },
    #[error("line {line}: {msg}")]
    BadOperand { line: usize, msg: String },
    #[error("line {line}: undefined label '{name}'")]
    UndefinedLabel { line: usize, name: String },
    #[error("line {line}: duplicate label '{name}'")]
    DuplicateLabel { line: usize, name: String },
    #[error("line {line}: branch target out of range ({offset} bytes)")]
    BranchOutOfRange { line: usize, offset: i64 },
    #[error("text and data segments overlap at 0x{addr:08x}")]
    OverlappingSegments { addr: u32 },
    #[error("entry point 0x{addr:08x} is not inside an executable segment")]
    EntryNotExecutable { addr: u32 },
}

/// One loadable segment of an assembled program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub base: u32,
    pub data: Vec<u8>,
    pub writable: bool,
}

impl Segment {
    pub fn end(&self) -> u32 {
        self.base + self.data.len() as u32
    }
}

/// Assembled program: non-overlapping segments, entry address, and the
/// resolved symbol map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramImage {
    pub segments: Vec<Segment>,
    pub entry: u32,
    pub symbols: BTreeMap<String, u32>,
}

impl ProgramImage {
    /// Symbol map in the text sidecar format: `<hex8> <name>` per line,
    /// sorted by address then name.
    pub fn symbol_map_text(&self) -> String {
        let mut entries: Vec<_> = self.symbols.iter().collect();
        entries.sort_by_key(|(name, addr)| (**addr, (*name).clone()));
        let mut out = String::new();
        for (name, addr) in entries {
            out.push_str(&format!("{addr:08x} {name}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SectionId {
    Text,
    Data,
}

struct SectionBuf {
    default_base: u32,
    start: Option<u32>,
    bytes: Vec<u8>,
}

impl SectionBuf {
    fn new(default_base: u32) -> Self {
        SectionBuf { default_base, start: None, bytes: Vec::new() }
    }

    fn start_addr(&self) -> u32 {
        self.start.unwrap_or(self.default_base)
    }

    fn current_addr(&self) -> u32 {
        self.start_addr() + self.bytes.len() as u32
    }

    /// Forward-only `.org`: rebases an empty section, zero-fills otherwise.
    fn org(&mut self, addr: u32, line: usize) -> Result<(), AsmError> {
        if self.bytes.is_empty() {
            self.start = Some(addr);
            return Ok(());
        }
        let current = self.current_addr();
        if addr < current {
            return Err(AsmError::BadOperand {
                line,
                msg: format!(".org 0x{addr:x} is behind current address 0x{current:x}"),
            });
        }
        self.bytes.resize(self.bytes.len() + (addr - current) as usize, 0);
        Ok(())
    }

    fn align(&mut self, power: u32) {
        if self.start.is_none() {
            self.start = Some(self.default_base);
        }
        let step = 1u32 << power;
        let current = self.current_addr();
        let padded = current.next_multiple_of(step);
        self.bytes.resize(self.bytes.len() + (padded - current) as usize, 0);
    }
}

/// Assembles a complete source file into a loadable image.
pub fn assemble(source: &str, opts: &AsmOptions) -> Result<ProgramImage, AsmError> {
    let statements = parse(source)?;

    // Pass 1: layout and symbols.
    let mut symbols: BTreeMap<String, u32> = BTreeMap::new();
    {
        let mut text = SectionBuf::new(opts.base_text);
        let mut data = SectionBuf::new(opts.base_data);
        let mut current = SectionId::Text;
        for stmt in &statements {
            let section = if current == SectionId::Text { &mut text } else { &mut data };
            if let Some(label) = &stmt.label {
                if symbols.insert(label.clone(), section.current_addr()).is_some() {
                    return Err(AsmError::DuplicateLabel { line: stmt.line, name: label.clone() });
                }
            }
            match &stmt.body {
                None => {}
                Some(Body::Directive { name, args }) => {
                    apply_directive(name, args, stmt.line, &mut current, &mut text, &mut data, None)?;
                }
                Some(Body::Instruction { mnemonic, operands }) => {
                    let words = instruction_words(mnemonic, operands, stmt.line)?;
                    let section = if current == SectionId::Text { &mut text } else { &mut data };
                    section.bytes.resize(section.bytes.len() + 4 * words, 0);
                }
            }
        }
    }

    // Pass 2: emit bytes with every symbol resolved.
    let mut text = SectionBuf::new(opts.base_text);
    let mut data = SectionBuf::new(opts.base_data);
    let mut current = SectionId::Text;
    for stmt in &statements {
        match &stmt.body {
            None => {}
            Some(Body::Directive { name, args }) => {
                apply_directive(name, args, stmt.line, &mut current, &mut text, &mut data, Some(&symbols))?;
            }
            Some(Body::Instruction { mnemonic, operands }) => {
                let section = if current == SectionId::Text { &mut text } else { &mut data };
                let pc = section.current_addr();
                let expected = instruction_words(mnemonic, operands, stmt.line)?;
                let words = encode_statement(mnemonic, operands, pc, &symbols, stmt.line)?;
                debug_assert_eq!(words.len(), expected);
                for word in words {
                    section.bytes.extend_from_slice(&word.to_le_bytes());
                }
            }
        }
    }

    let mut segments = Vec::new();
    if !text.bytes.is_empty() {
        segments.push(Segment { base: text.start_addr(), data: text.bytes, writable: false });
    }
    if !data.bytes.is_empty() {
        segments.push(Segment { base: data.start_addr(), data: data.bytes, writable: true });
    }
    segments.sort_by_key(|s| s.base);
    for pair in segments.windows(2) {
        if pair[0].end() > pair[1].base {
            return Err(AsmError::OverlappingSegments { addr: pair[1].base });
        }
    }

    let entry = symbols.get(ENTRY_SYMBOL).copied().unwrap_or(opts.base_text);
    let inside_rx = segments
        .iter()
        .any(|s| !s.writable && entry >= s.base && entry < s.end());
    if !inside_rx {
        return Err(AsmError::EntryNotExecutable { addr: entry });
    }

    Ok(ProgramImage { segments, entry, symbols })
}

/// Assembles one instruction in isolation (no symbols) at the given pc.
/// Numeric branch/jump operands are taken as byte offsets from the
/// instruction, matching the disassembler's output format.
pub fn assemble_line(text: &str, pc: u32) -> Result<Vec<u32>, AsmError> {
    let statements = parse(text)?;
    let symbols = BTreeMap::new();
    let mut words = Vec::new();
    let mut addr = pc;
    for stmt in &statements {
        if let Some(Body::Instruction { mnemonic, operands }) = &stmt.body {
            let emitted = encode_statement(mnemonic, operands, addr, &symbols, stmt.line)?;
            addr += 4 * emitted.len() as u32;
            words.extend(emitted);
        }
    }
    Ok(words)
}

#[allow(clippy::too_many_arguments)]
fn apply_directive(
    name: &str,
    args: &[String],
    line: usize,
    current: &mut SectionId,
    text: &mut SectionBuf,
    data: &mut SectionBuf,
    symbols: Option<&BTreeMap<String, u32>>,
) -> Result<(), AsmError> {
    let bad = |msg: String| AsmError::BadOperand { line, msg };
    match name {
        "text" => *current = SectionId::Text,
        "data" => *current = SectionId::Data,
        "globl" | "global" => {
            // Accepted for compatibility; the entry convention is the
            // `_start` label, so there is nothing to record here.
            if args.len() != 1 {
                return Err(bad(".globl expects one symbol".into()));
            }
        }
        "org" => {
            let addr = args
                .first()
                .and_then(|a| parse_int(a))
                .filter(|&v| (0..=u32::MAX as i64).contains(&v))
                .ok_or_else(|| bad(".org expects an address".into()))?;
            let buf = if *current == SectionId::Text { text } else { data };
            buf.org(addr as u32, line)?;
        }
        "align" => {
            let power = args
                .first()
                .and_then(|a| parse_int(a))
                .filter(|&v| (0..=16).contains(&v))
                .ok_or_else(|| bad(".align expects a power in 0..=16".into()))?;
            let buf = if *current == SectionId::Text { text } else { data };
            buf.align(power as u32);
        }
        "word" | "half" | "byte" => {
            let (size, min, max): (usize, i64, i64) = match name {
                "word" => (4, i32::MIN as i64, u32::MAX as i64),
                "half" => (2, i16::MIN as i64, u16::MAX as i64),
                _ => (1, i8::MIN as i64, u8::MAX as i64),
            };
            let buf = if *current == SectionId::Text { text } else { data };
            if buf.start.is_none() {
                buf.start = Some(buf.default_base);
            }
            if args.is_empty() {
                return Err(bad(format!(".{name} expects at least one value")));
            }
            for arg in args {
                let value = match parse_int(arg) {
                    Some(v) => {
                        if !(min..=max).contains(&v) {
                            return Err(bad(format!("value {v} out of range for .{name}")));
                        }
                        v
                    }
                    None => match symbols {
                        // Pass 1 sizes only; any symbol resolves later.
                        None => 0,
                        Some(map) => match map.get(arg.as_str()) {
                            Some(&addr) if size == 4 => addr as i64,
                            Some(_) => {
                                return Err(bad(format!("symbol value does not fit .{name}")))
                            }
                            None => {
                                return Err(AsmError::UndefinedLabel {
                                    line,
                                    name: arg.clone(),
                                })
                            }
                        },
                    },
                };
                buf.bytes.extend_from_slice(&(value as u64).to_le_bytes()[..size]);
            }
        }
        "asciz" => {
            let bytes = args
                .first()
                .and_then(|a| parse_string_literal(a))
                .ok_or_else(|| bad(".asciz expects a quoted string".into()))?;
            let buf = if *current == SectionId::Text { text } else { data };
            if buf.start.is_none() {
                buf.start = Some(buf.default_base);
            }
            buf.bytes.extend_from_slice(&bytes);
            buf.bytes.push(0);
        }
        other => {
            return Err(AsmError::UnknownMnemonic { line, name: format!(".{other}") });
        }
    }
    Ok(())
}

/// Number of 32-bit words a (possibly pseudo) instruction expands to.
/// Must agree exactly with `encode_statement`.
fn instruction_words(mnemonic: &str, operands: &[String], line: usize) -> Result<usize, AsmError> {
    match mnemonic {
        "li" => {
            let imm = operands
                .get(1)
                .and_then(|t| parse_int(t))
                .filter(|&v| (i32::MIN as i64..=u32::MAX as i64).contains(&v))
                .ok_or_else(|| AsmError::BadOperand {
                    line,
                    msg: "li expects a 32-bit literal".into(),
                })?;
            let (_, lo) = split_hi_lo(imm as u32);
            Ok(if fits_i12(imm) || lo == 0 { 1 } else { 2 })
        }
        "la" | "call" => Ok(2),
        _ => Ok(1),
    }
}

fn fits_i12(value: i64) -> bool {
    (-2048..=2047).contains(&value)
}

/// Splits a 32-bit value into a LUI upper part and a sign-corrected
/// 12-bit low part such that `hi + sext(lo) == value`.
fn split_hi_lo(value: u32) -> (u32, i32) {
    let lo = ((value as i32) << 20) >> 20;
    let hi = value.wrapping_sub(lo as u32);
    (hi, lo)
}

struct Ctx<'a> {
    pc: u32,
    symbols: &'a BTreeMap<String, u32>,
    line: usize,
}

impl Ctx<'_> {
    fn bad(&self, msg: impl Into<String>) -> AsmError {
        AsmError::BadOperand { line: self.line, msg: msg.into() }
    }

    fn reg(&self, operands: &[String], idx: usize) -> Result<Reg, AsmError> {
        operands
            .get(idx)
            .and_then(|t| parse_reg(t))
            .ok_or_else(|| self.bad(format!("operand {} must be a register", idx + 1)))
    }

    fn imm(&self, operands: &[String], idx: usize, min: i64, max: i64) -> Result<i32, AsmError> {
        let value = operands
            .get(idx)
            .and_then(|t| parse_int(t))
            .ok_or_else(|| self.bad(format!("operand {} must be an immediate", idx + 1)))?;
        if !(min..=max).contains(&value) {
            return Err(self.bad(format!("immediate {value} out of range [{min}, {max}]")));
        }
        Ok(value as i32)
    }

    fn mem(&self, operands: &[String], idx: usize) -> Result<(i32, Reg), AsmError> {
        let (offset, base) = operands
            .get(idx)
            .and_then(|t| parse_mem_operand(t))
            .ok_or_else(|| self.bad(format!("operand {} must be offset(reg)", idx + 1)))?;
        if !fits_i12(offset) {
            return Err(self.bad(format!("offset {offset} out of range [-2048, 2047]")));
        }
        Ok((offset as i32, base))
    }

    /// Branch/jump target: a label resolves to `symbol - pc`; a bare
    /// number is already a byte offset from this instruction.
    fn target_offset(&self, operands: &[String], idx: usize) -> Result<i64, AsmError> {
        let token = operands
            .get(idx)
            .ok_or_else(|| self.bad(format!("operand {} must be a branch target", idx + 1)))?;
        if let Some(value) = parse_int(token) {
            return Ok(value);
        }
        match self.symbols.get(token.as_str()) {
            Some(&addr) => Ok(addr as i64 - self.pc as i64),
            None => Err(AsmError::UndefinedLabel { line: self.line, name: token.clone() }),
        }
    }

    fn branch_offset(&self, operands: &[String], idx: usize) -> Result<i32, AsmError> {
        let offset = self.target_offset(operands, idx)?;
        if offset % 2 != 0 || !(-4096..=4094).contains(&offset) {
            return Err(AsmError::BranchOutOfRange { line: self.line, offset });
        }
        Ok(offset as i32)
    }

    fn jump_offset(&self, operands: &[String], idx: usize) -> Result<i32, AsmError> {
        let offset = self.target_offset(operands, idx)?;
        if offset % 2 != 0 || !(-1_048_576..=1_048_574).contains(&offset) {
            return Err(AsmError::BranchOutOfRange { line: self.line, offset });
        }
        Ok(offset as i32)
    }

    fn mem_op(&self, operands: &[String], idx: usize) -> Result<crate::isa::MemOpCode, AsmError> {
        operands
            .get(idx)
            .and_then(|t| parse_mem_op(t))
            .ok_or_else(|| self.bad("expected one of none/and/or/xor/nand/nor/xnor".to_string()))
    }

    fn arity(&self, operands: &[String], n: usize) -> Result<(), AsmError> {
        if operands.len() != n {
            return Err(self.bad(format!("expected {n} operands, found {}", operands.len())));
        }
        Ok(())
    }
}

fn alu_imm_op(mnemonic: &str) -> Option<AluOp> {
    Some(match mnemonic {
        "addi" => AluOp::Add,
        "slti" => AluOp::Slt,
        "sltiu" => AluOp::Sltu,
        "xori" => AluOp::Xor,
        "ori" => AluOp::Or,
        "andi" => AluOp::And,
        _ => return None,
    })
}

fn shift_imm_op(mnemonic: &str) -> Option<AluOp> {
    Some(match mnemonic {
        "slli" => AluOp::Sll,
        "srli" => AluOp::Srl,
        "srai" => AluOp::Sra,
        _ => return None,
    })
}

fn alu_reg_op(mnemonic: &str) -> Option<AluOp> {
    Some(match mnemonic {
        "add" => AluOp::Add,
        "sub" => AluOp::Sub,
        "sll" => AluOp::Sll,
        "slt" => AluOp::Slt,
        "sltu" => AluOp::Sltu,
        "xor" => AluOp::Xor,
        "srl" => AluOp::Srl,
        "sra" => AluOp::Sra,
        "or" => AluOp::Or,
        "and" => AluOp::And,
        _ => return None,
    })
}

fn muldiv_op(mnemonic: &str) -> Option<MulDivOp> {
    Some(match mnemonic {
        "mul" => MulDivOp::Mul,
        "mulh" => MulDivOp::Mulh,
        "mulhsu" => MulDivOp::Mulhsu,
        "mulhu" => MulDivOp::Mulhu,
        "div" => MulDivOp::Div,
        "divu" => MulDivOp::Divu,
        "rem" => MulDivOp::Rem,
        "remu" => MulDivOp::Remu,
        _ => return None,
    })
}

fn branch_cond(mnemonic: &str) -> Option<BranchCond> {
    Some(match mnemonic {
        "beq" => BranchCond::Eq,
        "bne" => BranchCond::Ne,
        "blt" => BranchCond::Lt,
        "bge" => BranchCond::Ge,
        "bltu" => BranchCond::Ltu,
        "bgeu" => BranchCond::Geu,
        _ => return None,
    })
}

fn load_width(mnemonic: &str) -> Option<LoadWidth> {
    Some(match mnemonic {
        "lb" => LoadWidth::Byte,
        "lh" => LoadWidth::Half,
        "lw" => LoadWidth::Word,
        "lbu" => LoadWidth::ByteUnsigned,
        "lhu" => LoadWidth::HalfUnsigned,
        _ => return None,
    })
}

fn store_width(mnemonic: &str) -> Option<StoreWidth> {
    Some(match mnemonic {
        "sb" => StoreWidth::Byte,
        "sh" => StoreWidth::Half,
        "sw" => StoreWidth::Word,
        _ => return None,
    })
}

fn counter_id(mnemonic: &str) -> Option<CounterId> {
    Some(match mnemonic {
        "rdcycle" => CounterId::Cycle,
        "rdcycleh" => CounterId::CycleHigh,
        "rdinstret" => CounterId::InstRet,
        "rdinstreth" => CounterId::InstRetHigh,
        _ => return None,
    })
}

/// Encodes one source instruction (expanding pseudo-instructions) at `pc`.
fn encode_statement(
    mnemonic: &str,
    operands: &[String],
    pc: u32,
    symbols: &BTreeMap<String, u32>,
    line: usize,
) -> Result<Vec<u32>, AsmError> {
    let ctx = Ctx { pc, symbols, line };
    let one = |inst: Instruction| Ok(vec![encode(&inst)]);

    if let Some(op) = alu_imm_op(mnemonic) {
        ctx.arity(operands, 3)?;
        let rd = ctx.reg(operands, 0)?;
        let rs1 = ctx.reg(operands, 1)?;
        let imm = ctx.imm(operands, 2, -2048, 2047)?;
        return one(Instruction::OpImm { op, rd, rs1, imm });
    }
    if let Some(op) = shift_imm_op(mnemonic) {
        ctx.arity(operands, 3)?;
        let rd = ctx.reg(operands, 0)?;
        let rs1 = ctx.reg(operands, 1)?;
        let imm = ctx.imm(operands, 2, 0, 31)?;
        return one(Instruction::OpImm { op, rd, rs1, imm });
    }
    if let Some(op) = alu_reg_op(mnemonic) {
        ctx.arity(operands, 3)?;
        return one(Instruction::Op {
            op,
            rd: ctx.reg(operands, 0)?,
            rs1: ctx.reg(operands, 1)?,
            rs2: ctx.reg(operands, 2)?,
        });
    }
    if let Some(op) = muldiv_op(mnemonic) {
        ctx.arity(operands, 3)?;
        return one(Instruction::MulDiv {
            op,
            rd: ctx.reg(operands, 0)?,
            rs1: ctx.reg(operands, 1)?,
            rs2: ctx.reg(operands, 2)?,
        });
    }
    if let Some(cond) = branch_cond(mnemonic) {
        ctx.arity(operands, 3)?;
        return one(Instruction::Branch {
            cond,
            rs1: ctx.reg(operands, 0)?,
            rs2: ctx.reg(operands, 1)?,
            offset: ctx.branch_offset(operands, 2)?,
        });
    }
    if let Some(width) = load_width(mnemonic) {
        ctx.arity(operands, 2)?;
        let rd = ctx.reg(operands, 0)?;
        let (offset, rs1) = ctx.mem(operands, 1)?;
        return one(Instruction::Load { width, rd, rs1, offset });
    }
    if let Some(width) = store_width(mnemonic) {
        ctx.arity(operands, 2)?;
        let rs2 = ctx.reg(operands, 0)?;
        let (offset, rs1) = ctx.mem(operands, 1)?;
        return one(Instruction::Store { width, rs1, rs2, offset });
    }
    if let Some(counter) = counter_id(mnemonic) {
        ctx.arity(operands, 1)?;
        return one(Instruction::ReadCounter { rd: ctx.reg(operands, 0)?, counter });
    }

    match mnemonic {
        "lui" | "auipc" => {
            ctx.arity(operands, 2)?;
            let rd = ctx.reg(operands, 0)?;
            let imm = ctx.imm(operands, 1, 0, 0xfffff)? as u32;
            one(if mnemonic == "lui" {
                Instruction::Lui { rd, imm: imm << 12 }
            } else {
                Instruction::Auipc { rd, imm: imm << 12 }
            })
        }
        "jal" => {
            // Two-operand form, or one-operand shorthand linking through ra.
            let (rd, target_idx) = if operands.len() == 2 {
                (ctx.reg(operands, 0)?, 1)
            } else {
                ctx.arity(operands, 1)?;
                (Reg::RA, 0)
            };
            one(Instruction::Jal { rd, offset: ctx.jump_offset(operands, target_idx)? })
        }
        "jalr" => match operands.len() {
            1 => one(Instruction::Jalr { rd: Reg::RA, rs1: ctx.reg(operands, 0)?, offset: 0 }),
            2 => {
                let rd = ctx.reg(operands, 0)?;
                let (offset, rs1) = ctx.mem(operands, 1)?;
                one(Instruction::Jalr { rd, rs1, offset })
            }
            _ => {
                ctx.arity(operands, 3)?;
                one(Instruction::Jalr {
                    rd: ctx.reg(operands, 0)?,
                    rs1: ctx.reg(operands, 1)?,
                    offset: ctx.imm(operands, 2, -2048, 2047)?,
                })
            }
        },
        "fence" => {
            // Ordering annotations are accepted and ignored.
            one(Instruction::Fence)
        }
        "ecall" => {
            ctx.arity(operands, 0)?;
            one(Instruction::Ecall)
        }
        "ebreak" => {
            ctx.arity(operands, 0)?;
            one(Instruction::Ebreak)
        }
        "lim.active" => {
            ctx.arity(operands, 3)?;
            let base_reg = ctx.reg(operands, 0)?;
            let range_reg = ctx.reg(operands, 1)?;
            let mem_op = ctx.mem_op(operands, 2)?;
            Ok(vec![encode_store_active_logic(base_reg, range_reg, mem_op)])
        }
        "lim.loadmask" => {
            ctx.arity(operands, 4)?;
            let dest_reg = ctx.reg(operands, 0)?;
            let base_reg = ctx.reg(operands, 1)?;
            let source_reg = ctx.reg(operands, 2)?;
            let mem_op = ctx.mem_op(operands, 3)?;
            Ok(vec![encode_load_mask(dest_reg, base_reg, source_reg, mem_op)])
        }

        // Pseudo-instructions.
        "nop" => {
            ctx.arity(operands, 0)?;
            one(Instruction::OpImm { op: AluOp::Add, rd: Reg::ZERO, rs1: Reg::ZERO, imm: 0 })
        }
        "mv" => {
            ctx.arity(operands, 2)?;
            one(Instruction::OpImm {
                op: AluOp::Add,
                rd: ctx.reg(operands, 0)?,
                rs1: ctx.reg(operands, 1)?,
                imm: 0,
            })
        }
        "li" => {
            ctx.arity(operands, 2)?;
            let rd = ctx.reg(operands, 0)?;
            let imm = ctx.imm(operands, 1, i32::MIN as i64, u32::MAX as i64)?;
            Ok(load_immediate(rd, imm as u32))
        }
        "la" => {
            ctx.arity(operands, 2)?;
            let rd = ctx.reg(operands, 0)?;
            let token = &operands[1];
            let addr = symbols
                .get(token.as_str())
                .copied()
                .ok_or_else(|| AsmError::UndefinedLabel { line, name: token.clone() })?;
            let (hi, lo) = split_hi_lo(addr);
            Ok(vec![
                encode(&Instruction::Lui { rd, imm: hi }),
                encode(&Instruction::OpImm { op: AluOp::Add, rd, rs1: rd, imm: lo }),
            ])
        }
        "j" => {
            ctx.arity(operands, 1)?;
            one(Instruction::Jal { rd: Reg::ZERO, offset: ctx.jump_offset(operands, 0)? })
        }
        "jr" => {
            ctx.arity(operands, 1)?;
            one(Instruction::Jalr { rd: Reg::ZERO, rs1: ctx.reg(operands, 0)?, offset: 0 })
        }
        "ret" => {
            ctx.arity(operands, 0)?;
            one(Instruction::Jalr { rd: Reg::ZERO, rs1: Reg::RA, offset: 0 })
        }
        "call" => {
            ctx.arity(operands, 1)?;
            let delta = ctx.target_offset(operands, 0)?;
            if !(i32::MIN as i64..=i32::MAX as i64).contains(&delta) {
                return Err(AsmError::BranchOutOfRange { line, offset: delta });
            }
            let (hi, lo) = split_hi_lo(delta as u32);
            Ok(vec![
                encode(&Instruction::Auipc { rd: Reg::RA, imm: hi }),
                encode(&Instruction::Jalr { rd: Reg::RA, rs1: Reg::RA, offset: lo }),
            ])
        }
        "beqz" | "bnez" => {
            ctx.arity(operands, 2)?;
            let cond = if mnemonic == "beqz" { BranchCond::Eq } else { BranchCond::Ne };
            one(Instruction::Branch {
                cond,
                rs1: ctx.reg(operands, 0)?,
                rs2: Reg::ZERO,
                offset: ctx.branch_offset(operands, 1)?,
            })
        }
        other => Err(AsmError::UnknownMnemonic { line, name: other.to_string() }),
    }
}

/// `li` expansion: one `addi` for 12-bit values, bare `lui` when the low
/// part is zero, otherwise `lui` + `addi` with the sign-carry fold.
fn load_immediate(rd: Reg, value: u32) -> Vec<u32> {
    if fits_i12(value as i32 as i64) {
        return vec![encode(&Instruction::OpImm {
            op: AluOp::Add,
            rd,
            rs1: Reg::ZERO,
            imm: value as i32,
        })];
    }
    let (hi, lo) = split_hi_lo(value);
    let mut words = vec![encode(&Instruction::Lui { rd, imm: hi })];
    if lo != 0 {
        words.push(encode(&Instruction::OpImm { op: AluOp::Add, rd, rs1: rd, imm: lo }));
    }
    words
}
