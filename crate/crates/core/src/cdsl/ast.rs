//! Typed AST for constraint programs.
//!
//! A program is a DAG of nodes: set filters at the leaves, geometric and
//! arithmetic operators above them, boolean roots for hard constraints and
//! scalar roots for weighted score terms. Shared subexpressions are ordinary
//! shared nodes, introduced by `def` forms in the surface syntax.

use crate::semantics::RelationKind;
use serde::{Deserialize, Serialize};

pub type NodeId = u32;

/// Source location, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ty {
    Set,
    Scalar,
    Bool,
}

impl std::fmt::Display for Ty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ty::Set => "set",
            Ty::Scalar => "scalar",
            Ty::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessMode {
    Fast,
    Slow,
}

/// Relation literal carried inline by `related_to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub kind: RelationKind,
    /// Plane class on the child object ("base", "back", ...).
    pub child_tag: String,
    /// Plane class on the parent ("floor", "wall", "top", "shelf", ...).
    pub parent_tag: String,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopOp {
    All,
    Sum,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    /// All scene entities (rooms and objects).
    Scene,
    /// Subset of a set matching a semantic tag.
    Semantics(NodeId, String),
    /// Subset of `set` related to any member of `targets` via `relation`.
    RelatedTo {
        set: NodeId,
        targets: NodeId,
        relation: RelationSpec,
    },
    Count(NodeId),
    Area(NodeId),
    Volume(NodeId),
    MinDistance {
        a: NodeId,
        b: NodeId,
        tag_a: Option<String>,
        tag_b: Option<String>,
    },
    AngleAlignment {
        objs: NodeId,
        reference: NodeId,
    },
    RotationAsymmetry(NodeId),
    ReflectionAsymmetry {
        objs: NodeId,
        reference: NodeId,
    },
    Accessibility {
        objs: NodeId,
        blockers: NodeId,
        mode: AccessMode,
    },
    FocusScore {
        objs: NodeId,
        target: NodeId,
    },
    Freespace2d {
        surfaces: NodeId,
        occupants: NodeId,
    },
    Const(f64),
    Add(Vec<NodeId>),
    Sub(NodeId, NodeId),
    Mul(Vec<NodeId>),
    Div(NodeId, NodeId),
    Pow(NodeId, NodeId),
    Hinge {
        x: NodeId,
        lo: NodeId,
        hi: NodeId,
    },
    Eq(NodeId, NodeId),
    Lt(NodeId, NodeId),
    Le(NodeId, NodeId),
    InRange {
        x: NodeId,
        lo: NodeId,
        hi: NodeId,
    },
    And(Vec<NodeId>),
    /// all / sum / mean: bind `var` to each element of `set`, evaluate `body`.
    Loop {
        op: LoopOp,
        var: String,
        set: NodeId,
        body: NodeId,
    },
    /// Loop variable reference (a singleton set at evaluation time).
    Var(String),
}

impl NodeKind {
    pub fn children(&self) -> Vec<NodeId> {
        use NodeKind::*;
        match self {
            Scene | Const(_) | Var(_) => vec![],
            Semantics(s, _) | Count(s) | Area(s) | Volume(s) | RotationAsymmetry(s) => vec![*s],
            RelatedTo { set, targets, .. } => vec![*set, *targets],
            MinDistance { a, b, .. } => vec![*a, *b],
            AngleAlignment { objs, reference } | ReflectionAsymmetry { objs, reference } => {
                vec![*objs, *reference]
            }
            Accessibility { objs, blockers, .. } => vec![*objs, *blockers],
            FocusScore { objs, target } => vec![*objs, *target],
            Freespace2d {
                surfaces,
                occupants,
            } => vec![*surfaces, *occupants],
            Add(v) | Mul(v) | And(v) => v.clone(),
            Sub(a, b) | Div(a, b) | Pow(a, b) | Eq(a, b) | Lt(a, b) | Le(a, b) => vec![*a, *b],
            Hinge { x, lo, hi } | InRange { x, lo, hi } => vec![*x, *lo, *hi],
            Loop { set, body, .. } => vec![*set, *body],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Span,
}

/// Named hard constraint (boolean root).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardConstraint {
    pub name: String,
    pub root: NodeId,
}

/// Named weighted score term (scalar root; lower is better).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTerm {
    pub name: String,
    pub weight: f64,
    pub root: NodeId,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintProgram {
    pub nodes: Vec<Node>,
    /// Named shared subexpressions in definition order.
    pub defs: Vec<(String, NodeId)>,
    pub hards: Vec<HardConstraint>,
    pub scores: Vec<ScoreTerm>,
}

impl ConstraintProgram {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn push(&mut self, kind: NodeKind, span: Span) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node { kind, span });
        id
    }

    pub fn is_empty(&self) -> bool {
        self.hards.is_empty() && self.scores.is_empty()
    }

    /// All roots: hard constraints then score terms.
    pub fn roots(&self) -> Vec<NodeId> {
        self.hards
            .iter()
            .map(|h| h.root)
            .chain(self.scores.iter().map(|s| s.root))
            .collect()
    }

    /// Canonical structural fingerprint: definitions are expanded, so two
    /// programs with the same computation graph hash identically regardless
    /// of node numbering.
    pub fn structural_key(&self) -> String {
        let mut out = String::new();
        for h in &self.hards {
            out.push_str(&format!("(hard {} ", h.name));
            self.expand(h.root, &mut out);
            out.push_str(")\n");
        }
        for s in &self.scores {
            out.push_str(&format!("(score {} {:?} ", s.name, s.weight));
            self.expand(s.root, &mut out);
            out.push_str(")\n");
        }
        out
    }

    fn expand(&self, id: NodeId, out: &mut String) {
        use NodeKind::*;
        let node = &self.node(id).kind;
        match node {
            Scene => out.push_str("scene"),
            Const(c) => out.push_str(&format!("{c:?}")),
            Var(v) => out.push_str(&format!("var:{v}")),
            _ => {
                out.push('(');
                out.push_str(kind_name(node));
                for attr in kind_attrs(node) {
                    out.push(' ');
                    out.push_str(&attr);
                }
                for c in node.children() {
                    out.push(' ');
                    self.expand(c, out);
                }
                out.push(')');
            }
        }
    }

    pub fn structurally_equal(&self, other: &ConstraintProgram) -> bool {
        self.structural_key() == other.structural_key()
    }
}

/// Surface-syntax operator name of a node kind.
pub fn kind_name(kind: &NodeKind) -> &'static str {
    use NodeKind::*;
    match kind {
        Scene => "scene",
        Semantics(..) => "semantics",
        RelatedTo { .. } => "related_to",
        Count(_) => "count",
        Area(_) => "area",
        Volume(_) => "volume",
        MinDistance { .. } => "min_distance",
        AngleAlignment { .. } => "angle_alignment_cost",
        RotationAsymmetry(_) => "rotation_asymmetry",
        ReflectionAsymmetry { .. } => "reflection_asymmetry",
        Accessibility { .. } => "accessibility_cost",
        FocusScore { .. } => "focus_score",
        Freespace2d { .. } => "freespace_2d",
        Const(_) => "const",
        Add(_) => "+",
        Sub(..) => "-",
        Mul(_) => "*",
        Div(..) => "/",
        Pow(..) => "pow",
        Hinge { .. } => "hinge",
        Eq(..) => "==",
        Lt(..) => "<",
        Le(..) => "<=",
        InRange { .. } => "in_range",
        And(_) => "and",
        Loop { op, .. } => match op {
            LoopOp::All => "all",
            LoopOp::Sum => "sum",
            LoopOp::Mean => "mean",
        },
        Var(_) => "var",
    }
}

/// Non-child attributes rendered into the canonical form.
pub fn kind_attrs(kind: &NodeKind) -> Vec<String> {
    use NodeKind::*;
    match kind {
        Semantics(_, tag) => vec![format!("{tag:?}")],
        RelatedTo { relation, .. } => vec![format!(
            "({} {:?} {:?} {:?})",
            relation.kind.name(),
            relation.child_tag,
            relation.parent_tag,
            relation.margin
        )],
        MinDistance { tag_a, tag_b, .. } => match (tag_a, tag_b) {
            (Some(a), Some(b)) => vec![format!("{a:?}"), format!("{b:?}")],
            _ => vec![],
        },
        Accessibility { mode, .. } => vec![match mode {
            AccessMode::Fast => "fast".to_string(),
            AccessMode::Slow => "slow".to_string(),
        }],
        Loop { var, .. } => vec![var.clone()],
        _ => vec![],
    }
}
