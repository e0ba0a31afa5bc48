//! Advisory checks for the LiM pairing conventions: the store paired with
//! an activation must address the same base register with a zero
//! immediate, and a masked load only makes sense after an activation.

use crate::isa::{MemOpCode, Reg};

use super::parser::{parse, parse_mem_op, parse_mem_operand, parse_reg, Body};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintWarning {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LintWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: warning: {}", self.line, self.message)
    }
}

/// Scans the source in straight-line order and reports:
///
/// * stores through a register that a `lim.active` named as base, but with
///   a nonzero immediate offset;
/// * a `lim.loadmask` with no earlier `lim.active` anywhere in the
///   program.
///
/// Warnings never fail a build.
pub fn lint_lim_pairing(source: &str) -> Vec<LintWarning> {
    let statements = match parse(source) {
        Ok(s) => s,
        Err(_) => return Vec::new(),
    };

    let mut warnings = Vec::new();
    let mut active_bases: Vec<Reg> = Vec::new();
    let mut seen_activation = false;

    for stmt in &statements {
        let Some(Body::Instruction { mnemonic, operands }) = &stmt.body else {
            continue;
        };
        match mnemonic.as_str() {
            "lim.active" => {
                let base = operands.first().and_then(|t| parse_reg(t));
                let op = operands.get(2).and_then(|t| parse_mem_op(t));
                if let (Some(base), Some(op)) = (base, op) {
                    if op == MemOpCode::None {
                        active_bases.retain(|&r| r != base);
                    } else {
                        seen_activation = true;
                        if !active_bases.contains(&base) {
                            active_bases.push(base);
                        }
                    }
                }
            }
            "lim.loadmask" => {
                if !seen_activation {
                    warnings.push(LintWarning {
                        line: stmt.line,
                        message: "lim.loadmask with no preceding lim.active".to_string(),
                    });
                }
            }
            "sw" | "sh" | "sb" => {
                if let Some((offset, base)) = operands.get(1).and_then(|t| parse_mem_operand(t)) {
                    if offset != 0 && active_bases.contains(&base) {
                        warnings.push(LintWarning {
                            line: stmt.line,
                            message: format!(
                                "store through activated base register {base} uses nonzero \
                                 immediate {offset}; paired logic stores must use offset 0"
                            ),
                        });
                    }
                }
            }
            _ => {}
        }
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonzero_offset_after_activation_warns() {
        let warnings = lint_lim_pairing("lim.active x10, x11, or\nsw x12, 4(x10)\n");
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].line, 2);
        assert!(warnings[0].message.contains("nonzero"));
    }

    #[test]
    fn loadmask_without_activation_warns() {
        let warnings = lint_lim_pairing("lim.loadmask x5, x6, x7, and\n");
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].message.contains("no preceding"));
    }

    #[test]
    fn well_formed_pairing_is_clean() {
        let src = "li x10, 8\nli x11, 3\nlim.active x10, x11, or\nsw x12, 0(x10)\n\
                   lim.loadmask x5, x10, x7, or\nlim.active x10, x11, none\n";
        assert!(lint_lim_pairing(src).is_empty());
    }

    #[test]
    fn deactivation_clears_base_tracking() {
        let src = "lim.active x10, x11, or\nlim.active x10, x11, none\nsw x12, 4(x10)\n";
        assert!(lint_lim_pairing(src).is_empty());
    }

    #[test]
    fn stores_to_other_bases_unaffected() {
        let warnings = lint_lim_pairing("lim.active x10, x11, or\nsw x12, 8(x20)\n");
        assert!(warnings.is_empty());
    }
}
