//! Stable-format disassembly: lower-case mnemonics, `x<N>` register names,
//! comma-space separators. The output re-assembles to the original word.

use super::{
    AluOp, BranchCond, CounterId, Instruction, LoadWidth, MulDivOp, StoreWidth,
};

fn alu_name(op: AluOp) -> &'static str {
    match op {
        AluOp::Add => "add",
        AluOp::Sub => "sub",
        AluOp::Sll => "sll",
        AluOp::Slt => "slt",
        AluOp::Sltu => "sltu",
        AluOp::Xor => "xor",
        AluOp::Srl => "srl",
        AluOp::Sra => "sra",
        AluOp::Or => "or",
        AluOp::And => "and",
    }
}

fn muldiv_name(op: MulDivOp) -> &'static str {
    match op {
        MulDivOp::Mul => "mul",
        MulDivOp::Mulh => "mulh",
        MulDivOp::Mulhsu => "mulhsu",
        MulDivOp::Mulhu => "mulhu",
        MulDivOp::Div => "div",
        MulDivOp::Divu => "divu",
        MulDivOp::Rem => "rem",
        MulDivOp::Remu => "remu",
    }
}

fn branch_name(cond: BranchCond) -> &'static str {
    match cond {
        BranchCond::Eq => "beq",
        BranchCond::Ne => "bne",
        BranchCond::Lt => "blt",
        BranchCond::Ge => "bge",
        BranchCond::Ltu => "bltu",
        BranchCond::Geu => "bgeu",
    }
}

fn load_name(width: LoadWidth) -> &'static str {
    match width {
        LoadWidth::Byte => "lb",
        LoadWidth::Half => "lh",
        LoadWidth::Word => "lw",
        LoadWidth::ByteUnsigned => "lbu",
        LoadWidth::HalfUnsigned => "lhu",
    }
}

fn store_name(width: StoreWidth) -> &'static str {
    match width {
        StoreWidth::Byte => "sb",
        StoreWidth::Half => "sh",
        StoreWidth::Word => "sw",
    }
}

/// Renders an instruction as assembly text. Branch, jump, and jalr
/// immediates appear as signed byte offsets relative to the instruction.
pub fn disassemble(inst: &Instruction) -> String {
    match *inst {
        Instruction::Lui { rd, imm } => format!("lui {}, 0x{:x}", rd, imm >> 12),
        Instruction::Auipc { rd, imm } => format!("auipc {}, 0x{:x}", rd, imm >> 12),
        Instruction::Jal { rd, offset } => format!("jal {}, {}", rd, offset),
        Instruction::Jalr { rd, rs1, offset } => format!("jalr {}, {}, {}", rd, rs1, offset),
        Instruction::Branch { cond, rs1, rs2, offset } => {
            format!("{} {}, {}, {}", branch_name(cond), rs1, rs2, offset)
        }
        Instruction::Load { width, rd, rs1, offset } => {
            format!("{} {}, {}({})", load_name(width), rd, offset, rs1)
        }
        Instruction::Store { width, rs1, rs2, offset } => {
            format!("{} {}, {}({})", store_name(width), rs2, offset, rs1)
        }
        Instruction::OpImm { op, rd, rs1, imm } => {
            let name = match op {
                AluOp::Add => "addi",
                AluOp::Slt => "slti",
                AluOp::Sltu => "sltiu",
                AluOp::Xor => "xori",
                AluOp::Or => "ori",
                AluOp::And => "andi",
                AluOp::Sll => "slli",
                AluOp::Srl => "srli",
                AluOp::Sra => "srai",
                AluOp::Sub => unreachable!("no subtract-immediate form"),
            };
            format!("{} {}, {}, {}", name, rd, rs1, imm)
        }
        Instruction::Op { op, rd, rs1, rs2 } => {
            format!("{} {}, {}, {}", alu_name(op), rd, rs1, rs2)
        }
        Instruction::MulDiv { op, rd, rs1, rs2 } => {
            format!("{} {}, {}, {}", muldiv_name(op), rd, rs1, rs2)
        }
        Instruction::Fence => "fence".to_string(),
        Instruction::Ecall => "ecall".to_string(),
        Instruction::Ebreak => "ebreak".to_string(),
        Instruction::ReadCounter { rd, counter } => {
            let name = match counter {
                CounterId::Cycle => "rdcycle",
                CounterId::CycleHigh => "rdcycleh",
                CounterId::InstRet => "rdinstret",
                CounterId::InstRetHigh => "rdinstreth",
            };
            format!("{} {}", name, rd)
        }
        Instruction::LimStoreActiveLogic { base_reg, range_reg, mem_op } => {
            format!("lim.active {}, {}, {}", base_reg, range_reg, mem_op)
        }
        Instruction::LimLoadMask { dest_reg, base_reg, source_reg, mem_op } => {
            format!("lim.loadmask {}, {}, {}, {}", dest_reg, base_reg, source_reg, mem_op)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{decode, MemOpCode, Reg};
    use super::*;

    #[test]
    fn renders_lim_instructions() {
        let inst = Instruction::LimStoreActiveLogic {
            base_reg: Reg::new(10).unwrap(),
            range_reg: Reg::new(11).unwrap(),
            mem_op: MemOpCode::Or,
        };
        assert_eq!(disassemble(&inst), "lim.active x10, x11, or");

        let inst = Instruction::LimLoadMask {
            dest_reg: Reg::new(5).unwrap(),
            base_reg: Reg::new(6).unwrap(),
            source_reg: Reg::new(7).unwrap(),
            mem_op: MemOpCode::And,
        };
        assert_eq!(disassemble(&inst), "lim.loadmask x5, x6, x7, and");
    }

    #[test]
    fn renders_base_instructions() {
        assert_eq!(disassemble(&decode(0x00100093).unwrap()), "addi x1, x0, 1");
        assert_eq!(disassemble(&decode(0x00000013).unwrap()), "addi x0, x0, 0");
        assert_eq!(disassemble(&decode(0x00c52223).unwrap()), "sw x12, 4(x10)");
    }
}
