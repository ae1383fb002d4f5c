//! Static validation against a tag registry. Problems are reported as
//! diagnostics, not errors.

use super::ast::*;
use crate::semantics::TagRegistry;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col, self.message)
    }
}

pub fn validate(program: &ConstraintProgram, registry: &TagRegistry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Err(e) = super::parse::type_check(program) {
        out.push(Diagnostic {
            span: Span {
                line: e.line,
                col: e.col,
            },
            message: e.msg.clone(),
        });
    }
    for (idx, node) in program.nodes.iter().enumerate() {
        let span = node.span;
        match &node.kind {
            NodeKind::Semantics(_, tag) => {
                if !registry.is_registered(tag) {
                    let suggestion = registry
                        .suggest(tag)
                        .map(|s| format!(" (did you mean \"{s}\"?)"))
                        .unwrap_or_default();
                    out.push(Diagnostic {
                        span,
                        message: format!("unknown tag \"{tag}\"{suggestion}"),
                    });
                }
            }
            NodeKind::RelatedTo { relation, .. } => {
                if relation.child_tag.is_empty() || relation.parent_tag.is_empty() {
                    out.push(Diagnostic {
                        span,
                        message: "relation plane classes must be non-empty".into(),
                    });
                }
                if !relation.margin.is_finite() || relation.margin < 0.0 {
                    out.push(Diagnostic {
                        span,
                        message: format!("invalid relation margin {}", relation.margin),
                    });
                }
            }
            NodeKind::Const(c) if !c.is_finite() => {
                out.push(Diagnostic {
                    span,
                    message: format!("non-finite constant {c} at node {idx}"),
                });
            }
            _ => {}
        }
    }
    for s in &program.scores {
        if !(s.weight.is_finite() && s.weight >= 0.0) {
            out.push(Diagnostic {
                span: program.node(s.root).span,
                message: format!("score '{}' has invalid weight {}", s.name, s.weight),
            });
        }
    }
    out
}
