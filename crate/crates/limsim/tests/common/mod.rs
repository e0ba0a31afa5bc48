//! Shared helpers for the integration tests.

use rand::rngs::StdRng;
use rand::Rng;

use limsim::isa::{
    AluOp, BranchCond, CounterId, Instruction, LoadWidth, MulDivOp, Reg, StoreWidth,
};

pub fn reg(n: u8) -> Reg {
    Reg::new(n).unwrap()
}

/// Draws a legal instruction uniformly-ish across the whole variant
/// alphabet, with operands inside each format's range.
pub fn random_instruction(rng: &mut StdRng) -> Instruction {
    let r = |rng: &mut StdRng| reg(rng.gen_range(0..32));
    let i12 = |rng: &mut StdRng| rng.gen_range(-2048..=2047);
    match rng.gen_range(0..12) {
        0 => Instruction::Lui { rd: r(rng), imm: rng.gen::<u32>() & 0xffff_f000 },
        1 => Instruction::Auipc { rd: r(rng), imm: rng.gen::<u32>() & 0xffff_f000 },
        2 => Instruction::Jal { rd: r(rng), offset: rng.gen_range(-0x10_0000..=0xf_fffe) & !1 },
        3 => Instruction::Jalr { rd: r(rng), rs1: r(rng), offset: i12(rng) },
        4 => {
            let cond = [
                BranchCond::Eq,
                BranchCond::Ne,
                BranchCond::Lt,
                BranchCond::Ge,
                BranchCond::Ltu,
                BranchCond::Geu,
            ][rng.gen_range(0..6)];
            Instruction::Branch {
                cond,
                rs1: r(rng),
                rs2: r(rng),
                offset: rng.gen_range(-4096..=4094) & !1,
            }
        }
        5 => {
            let width = [
                LoadWidth::Byte,
                LoadWidth::Half,
                LoadWidth::Word,
                LoadWidth::ByteUnsigned,
                LoadWidth::HalfUnsigned,
            ][rng.gen_range(0..5)];
            Instruction::Load { width, rd: r(rng), rs1: r(rng), offset: i12(rng) }
        }
        6 => {
            let width =
                [StoreWidth::Byte, StoreWidth::Half, StoreWidth::Word][rng.gen_range(0..3)];
            Instruction::Store { width, rs1: r(rng), rs2: r(rng), offset: i12(rng) }
        }
        7 => {
            let (op, imm) = match rng.gen_range(0..9) {
                0 => (AluOp::Add, i12(rng)),
                1 => (AluOp::Slt, i12(rng)),
                2 => (AluOp::Sltu, i12(rng)),
                3 => (AluOp::Xor, i12(rng)),
                4 => (AluOp::Or, i12(rng)),
                5 => (AluOp::And, i12(rng)),
                6 => (AluOp::Sll, rng.gen_range(0..32)),
                7 => (AluOp::Srl, rng.gen_range(0..32)),
                _ => (AluOp::Sra, rng.gen_range(0..32)),
            };
            Instruction::OpImm { op, rd: r(rng), rs1: r(rng), imm }
        }
        8 => {
            let op = [
                AluOp::Add,
                AluOp::Sub,
                AluOp::Sll,
                AluOp::Slt,
                AluOp::Sltu,
                AluOp::Xor,
                AluOp::Srl,
                AluOp::Sra,
                AluOp::Or,
                AluOp::And,
            ][rng.gen_range(0..10)];
            Instruction::Op { op, rd: r(rng), rs1: r(rng), rs2: r(rng) }
        }
        9 => {
            let op = [
                MulDivOp::Mul,
                MulDivOp::Mulh,
                MulDivOp::Mulhsu,
                MulDivOp::Mulhu,
                MulDivOp::Div,
                MulDivOp::Divu,
                MulDivOp::Rem,
                MulDivOp::Remu,
            ][rng.gen_range(0..8)];
            Instruction::MulDiv { op, rd: r(rng), rs1: r(rng), rs2: r(rng) }
        }
        10 => {
            let counter = [
                CounterId::Cycle,
                CounterId::CycleHigh,
                CounterId::InstRet,
                CounterId::InstRetHigh,
            ][rng.gen_range(0..4)];
            Instruction::ReadCounter { rd: r(rng), counter }
        }
        _ => [Instruction::Fence, Instruction::Ecall, Instruction::Ebreak][rng.gen_range(0..3)],
    }
}
