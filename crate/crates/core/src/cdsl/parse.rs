//! Parser and type checker for the surface syntax.
//!
//! Parenthesized forms, `;` line comments, string literals for tags.
//! Top-level forms:
//!
//! ```text
//! (def tables (related_to (semantics scene "table") rooms
//!              (stable_against "base" "floor" 0.0)))
//! (hard table-count (in_range (count tables) 1 2))
//! (score spread :weight 0.5 (min_distance tables tables))
//! ```

use super::ast::*;
use crate::semantics::RelationKind;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl ParseError {
    fn at(span: Span, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: span.line,
            col: span.col,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Sym(String),
    Str(String),
    Num(f64),
    Key(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::LParen,
                    span,
                });
            }
            ')' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::RParen,
                    span,
                });
            }
            '"' => {
                chars.next();
                col += 1;
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    col += 1;
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\n' => {
                            return Err(ParseError::at(span, "unterminated string"));
                        }
                        '\\' => {
                            let esc = chars.next().ok_or_else(|| {
                                ParseError::at(span, "unterminated escape sequence")
                            })?;
                            col += 1;
                            s.push(match esc {
                                'n' => '\n',
                                't' => '\t',
                                other => other,
                            });
                        }
                        other => s.push(other),
                    }
                }
                if !closed {
                    return Err(ParseError::at(span, "unterminated string"));
                }
                out.push(Token {
                    tok: Tok::Str(s),
                    span,
                });
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                let tok = if let Some(stripped) = word.strip_prefix(':') {
                    Tok::Key(stripped.to_string())
                } else if let Ok(n) = word.parse::<f64>() {
                    Tok::Num(n)
                } else {
                    Tok::Sym(word)
                };
                out.push(Token { tok, span });
            }
        }
    }
    Ok(out)
}

/// Intermediate s-expression tree.
#[derive(Debug, Clone)]
enum Sx {
    List(Vec<Sx>, Span),
    Sym(String, Span),
    Str(String, Span),
    Num(f64, Span),
    Key(String, Span),
}

impl Sx {
    fn span(&self) -> Span {
        match self {
            Sx::List(_, s) | Sx::Sym(_, s) | Sx::Str(_, s) | Sx::Num(_, s) | Sx::Key(_, s) => *s,
        }
    }
}

fn read_all(tokens: &[Token]) -> Result<Vec<Sx>, ParseError> {
    let mut pos = 0usize;
    let mut out = Vec::new();
    while pos < tokens.len() {
        let (sx, next) = read_one(tokens, pos)?;
        out.push(sx);
        pos = next;
    }
    Ok(out)
}

fn read_one(tokens: &[Token], pos: usize) -> Result<(Sx, usize), ParseError> {
    let t = &tokens[pos];
    match &t.tok {
        Tok::LParen => {
            let mut items = Vec::new();
            let mut p = pos + 1;
            loop {
                match tokens.get(p) {
                    None => return Err(ParseError::at(t.span, "unclosed '('")),
                    Some(tk) if tk.tok == Tok::RParen => {
                        return Ok((Sx::List(items, t.span), p + 1));
                    }
                    Some(_) => {
                        let (sx, next) = read_one(tokens, p)?;
                        items.push(sx);
                        p = next;
                    }
                }
            }
        }
        Tok::RParen => Err(ParseError::at(t.span, "unexpected ')'")),
        Tok::Sym(s) => Ok((Sx::Sym(s.clone(), t.span), pos + 1)),
        Tok::Str(s) => Ok((Sx::Str(s.clone(), t.span), pos + 1)),
        Tok::Num(n) => Ok((Sx::Num(*n, t.span), pos + 1)),
        Tok::Key(k) => Ok((Sx::Key(k.clone(), t.span), pos + 1)),
    }
}

struct Builder {
    program: ConstraintProgram,
    defs: BTreeMap<String, NodeId>,
    scene_node: Option<NodeId>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            program: ConstraintProgram::default(),
            defs: BTreeMap::new(),
            scene_node: None,
        }
    }

    fn scene(&mut self, span: Span) -> NodeId {
        match self.scene_node {
            Some(id) => id,
            None => {
                let id = self.program.push(NodeKind::Scene, span);
                self.scene_node = Some(id);
                id
            }
        }
    }

    fn expr(&mut self, sx: &Sx, loop_vars: &[String]) -> Result<NodeId, ParseError> {
        let span = sx.span();
        match sx {
            Sx::Num(n, _) => Ok(self.program.push(NodeKind::Const(*n), span)),
            Sx::Sym(s, _) => {
                if s == "scene" {
                    Ok(self.scene(span))
                } else if loop_vars.contains(s) {
                    Ok(self.program.push(NodeKind::Var(s.clone()), span))
                } else if let Some(&id) = self.defs.get(s) {
                    Ok(id)
                } else {
                    Err(ParseError::at(
                        span,
                        format!("unbound symbol '{s}' (not a def or loop variable)"),
                    ))
                }
            }
            Sx::Str(_, _) => Err(ParseError::at(
                span,
                "string literal cannot appear as an expression",
            )),
            Sx::Key(k, _) => Err(ParseError::at(span, format!("unexpected keyword :{k}"))),
            Sx::List(items, _) => {
                let (head, rest) = items
                    .split_first()
                    .ok_or_else(|| ParseError::at(span, "empty form"))?;
                let Sx::Sym(op, _) = head else {
                    return Err(ParseError::at(
                        head.span(),
                        "form must start with an operator symbol",
                    ));
                };
                self.op(op, rest, span, loop_vars)
            }
        }
    }

    fn op(
        &mut self,
        op: &str,
        args: &[Sx],
        span: Span,
        lv: &[String],
    ) -> Result<NodeId, ParseError> {
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                Err(ParseError::at(
                    span,
                    format!("'{op}' expects {n} argument(s), got {}", args.len()),
                ))
            } else {
                Ok(())
            }
        };
        let kind = match op {
            "scene" => {
                arity(0)?;
                return Ok(self.scene(span));
            }
            "semantics" => {
                arity(2)?;
                let set = self.expr(&args[0], lv)?;
                let tag = self.string(&args[1])?;
                NodeKind::Semantics(set, tag)
            }
            "related_to" => {
                arity(3)?;
                let set = self.expr(&args[0], lv)?;
                let targets = self.expr(&args[1], lv)?;
                let relation = self.relation(&args[2])?;
                NodeKind::RelatedTo {
                    set,
                    targets,
                    relation,
                }
            }
            "count" => {
                arity(1)?;
                NodeKind::Count(self.expr(&args[0], lv)?)
            }
            "area" => {
                arity(1)?;
                NodeKind::Area(self.expr(&args[0], lv)?)
            }
            "volume" => {
                arity(1)?;
                NodeKind::Volume(self.expr(&args[0], lv)?)
            }
            "min_distance" => {
                if args.len() != 2 && args.len() != 4 {
                    return Err(ParseError::at(
                        span,
                        format!("'min_distance' expects 2 or 4 arguments, got {}", args.len()),
                    ));
                }
                let a = self.expr(&args[0], lv)?;
                let b = self.expr(&args[1], lv)?;
                let (tag_a, tag_b) = if args.len() == 4 {
                    (Some(self.string(&args[2])?), Some(self.string(&args[3])?))
                } else {
                    (None, None)
                };
                NodeKind::MinDistance { a, b, tag_a, tag_b }
            }
            "angle_alignment_cost" => {
                arity(2)?;
                NodeKind::AngleAlignment {
                    objs: self.expr(&args[0], lv)?,
                    reference: self.expr(&args[1], lv)?,
                }
            }
            "rotation_asymmetry" => {
                arity(1)?;
                NodeKind::RotationAsymmetry(self.expr(&args[0], lv)?)
            }
            "reflection_asymmetry" => {
                arity(2)?;
                NodeKind::ReflectionAsymmetry {
                    objs: self.expr(&args[0], lv)?,
                    reference: self.expr(&args[1], lv)?,
                }
            }
            "accessibility_cost" => {
                arity(3)?;
                let objs = self.expr(&args[0], lv)?;
                let blockers = self.expr(&args[1], lv)?;
                let mode = match &args[2] {
                    Sx::Sym(s, _) if s == "fast" => AccessMode::Fast,
                    Sx::Sym(s, _) if s == "slow" => AccessMode::Slow,
                    other => {
                        return Err(ParseError::at(
                            other.span(),
                            "accessibility mode must be 'fast' or 'slow'",
                        ));
                    }
                };
                NodeKind::Accessibility {
                    objs,
                    blockers,
                    mode,
                }
            }
            "focus_score" => {
                arity(2)?;
                NodeKind::FocusScore {
                    objs: self.expr(&args[0], lv)?,
                    target: self.expr(&args[1], lv)?,
                }
            }
            "freespace_2d" => {
                arity(2)?;
                NodeKind::Freespace2d {
                    surfaces: self.expr(&args[0], lv)?,
                    occupants: self.expr(&args[1], lv)?,
                }
            }
            "+" | "*" | "and" => {
                if args.len() < 2 {
                    return Err(ParseError::at(
                        span,
                        format!("'{op}' expects at least 2 arguments"),
                    ));
                }
                let ids = args
                    .iter()
                    .map(|a| self.expr(a, lv))
                    .collect::<Result<Vec<_>, _>>()?;
                match op {
                    "+" => NodeKind::Add(ids),
                    "*" => NodeKind::Mul(ids),
                    _ => NodeKind::And(ids),
                }
            }
            "-" | "/" | "pow" | "==" | "<" | "<=" => {
                arity(2)?;
                let a = self.expr(&args[0], lv)?;
                let b = self.expr(&args[1], lv)?;
                match op {
                    "-" => NodeKind::Sub(a, b),
                    "/" => NodeKind::Div(a, b),
                    "pow" => NodeKind::Pow(a, b),
                    "==" => NodeKind::Eq(a, b),
                    "<" => NodeKind::Lt(a, b),
                    _ => NodeKind::Le(a, b),
                }
            }
            "hinge" | "in_range" => {
                arity(3)?;
                let x = self.expr(&args[0], lv)?;
                let lo = self.expr(&args[1], lv)?;
                let hi = self.expr(&args[2], lv)?;
                if op == "hinge" {
                    NodeKind::Hinge { x, lo, hi }
                } else {
                    NodeKind::InRange { x, lo, hi }
                }
            }
            "all" | "sum" | "mean" => {
                arity(3)?;
                let Sx::Sym(var, _) = &args[0] else {
                    return Err(ParseError::at(
                        args[0].span(),
                        format!("'{op}' expects a loop variable symbol"),
                    ));
                };
                let set = self.expr(&args[1], lv)?;
                let mut inner = lv.to_vec();
                inner.push(var.clone());
                let body = self.expr(&args[2], &inner)?;
                NodeKind::Loop {
                    op: match op {
                        "all" => LoopOp::All,
                        "sum" => LoopOp::Sum,
                        _ => LoopOp::Mean,
                    },
                    var: var.clone(),
                    set,
                    body,
                }
            }
            other => {
                return Err(ParseError::at(span, format!("unknown operator '{other}'")));
            }
        };
        Ok(self.program.push(kind, span))
    }

    fn string(&self, sx: &Sx) -> Result<String, ParseError> {
        match sx {
            Sx::Str(s, _) => Ok(s.clone()),
            other => Err(ParseError::at(other.span(), "expected a string literal")),
        }
    }

    fn number(&self, sx: &Sx) -> Result<f64, ParseError> {
        match sx {
            Sx::Num(n, _) => Ok(*n),
            other => Err(ParseError::at(other.span(), "expected a number")),
        }
    }

    fn relation(&self, sx: &Sx) -> Result<RelationSpec, ParseError> {
        let Sx::List(items, span) = sx else {
            return Err(ParseError::at(sx.span(), "expected a relation literal"));
        };
        let Some((Sx::Sym(kind, _), rest)) = items.split_first().map(|(h, r)| (h, r)) else {
            return Err(ParseError::at(*span, "empty relation literal"));
        };
        match kind.as_str() {
            "stable_against" => {
                if rest.len() != 3 {
                    return Err(ParseError::at(
                        *span,
                        "stable_against expects (stable_against CHILD-PLANE PARENT-PLANE MARGIN)",
                    ));
                }
                let margin = self.number(&rest[2])?;
                if !(margin >= 0.0) {
                    return Err(ParseError::at(rest[2].span(), "margin must be >= 0"));
                }
                Ok(RelationSpec {
                    kind: RelationKind::StableAgainst,
                    child_tag: self.string(&rest[0])?,
                    parent_tag: self.string(&rest[1])?,
                    margin,
                })
            }
            "supported_by" => {
                if rest.len() != 2 {
                    return Err(ParseError::at(
                        *span,
                        "supported_by expects (supported_by CHILD-PLANE PARENT-PLANE)",
                    ));
                }
                Ok(RelationSpec {
                    kind: RelationKind::SupportedBy,
                    child_tag: self.string(&rest[0])?,
                    parent_tag: self.string(&rest[1])?,
                    margin: 0.0,
                })
            }
            other => Err(ParseError::at(
                *span,
                format!("unknown relation kind '{other}'"),
            )),
        }
    }
}

/// Parse a program from text, including type checking.
pub fn parse(text: &str) -> Result<ConstraintProgram, ParseError> {
    let tokens = lex(text)?;
    let forms = read_all(&tokens)?;
    let mut b = Builder::new();
    for form in &forms {
        let Sx::List(items, span) = form else {
            return Err(ParseError::at(
                form.span(),
                "top level expects (def ...), (hard ...), or (score ...) forms",
            ));
        };
        let Some((Sx::Sym(head, _), rest)) = items.split_first().map(|(h, r)| (h, r)) else {
            return Err(ParseError::at(*span, "empty top-level form"));
        };
        match head.as_str() {
            "def" => {
                if rest.len() != 2 {
                    return Err(ParseError::at(*span, "def expects (def NAME EXPR)"));
                }
                let Sx::Sym(name, nspan) = &rest[0] else {
                    return Err(ParseError::at(rest[0].span(), "def name must be a symbol"));
                };
                if b.defs.contains_key(name) || name == "scene" {
                    return Err(ParseError::at(*nspan, format!("duplicate def '{name}'")));
                }
                let id = b.expr(&rest[1], &[])?;
                b.defs.insert(name.clone(), id);
                b.program.defs.push((name.clone(), id));
            }
            "hard" => {
                if rest.len() != 2 {
                    return Err(ParseError::at(*span, "hard expects (hard NAME BOOL-EXPR)"));
                }
                let Sx::Sym(name, _) = &rest[0] else {
                    return Err(ParseError::at(rest[0].span(), "hard name must be a symbol"));
                };
                let id = b.expr(&rest[1], &[])?;
                b.program.hards.push(HardConstraint {
                    name: name.clone(),
                    root: id,
                });
            }
            "score" => {
                // (score NAME :weight W EXPR)
                if rest.len() != 4 {
                    return Err(ParseError::at(
                        *span,
                        "score expects (score NAME :weight W EXPR)",
                    ));
                }
                let Sx::Sym(name, _) = &rest[0] else {
                    return Err(ParseError::at(rest[0].span(), "score name must be a symbol"));
                };
                match &rest[1] {
                    Sx::Key(k, _) if k == "weight" => {}
                    other => {
                        return Err(ParseError::at(other.span(), "expected :weight"));
                    }
                }
                let weight = b.number(&rest[2])?;
                if !(weight.is_finite() && weight >= 0.0) {
                    return Err(ParseError::at(
                        rest[2].span(),
                        "weight must be finite and >= 0",
                    ));
                }
                let id = b.expr(&rest[3], &[])?;
                b.program.scores.push(ScoreTerm {
                    name: name.clone(),
                    weight,
                    root: id,
                });
            }
            other => {
                return Err(ParseError::at(
                    *span,
                    format!("unknown top-level form '{other}'"),
                ));
            }
        }
    }
    type_check(&b.program)?;
    Ok(b.program)
}

/// Infer and check node kinds. Hard roots must be bool, score roots scalar.
pub fn type_check(program: &ConstraintProgram) -> Result<(), ParseError> {
    let mut memo: Vec<Option<Ty>> = vec![None; program.nodes.len()];
    for h in &program.hards {
        let ty = infer(program, h.root, &mut memo)?;
        if ty != Ty::Bool {
            let span = program.node(h.root).span;
            return Err(ParseError::at(
                span,
                format!("hard constraint '{}' must be bool, found {ty}", h.name),
            ));
        }
    }
    for s in &program.scores {
        let ty = infer(program, s.root, &mut memo)?;
        if ty != Ty::Scalar {
            let span = program.node(s.root).span;
            return Err(ParseError::at(
                span,
                format!("score term '{}' must be scalar, found {ty}", s.name),
            ));
        }
    }
    Ok(())
}

fn infer(
    program: &ConstraintProgram,
    id: NodeId,
    memo: &mut Vec<Option<Ty>>,
) -> Result<Ty, ParseError> {
    if let Some(ty) = memo[id as usize] {
        return Ok(ty);
    }
    use NodeKind::*;
    let node = program.node(id);
    let span = node.span;
    let want = |child: NodeId, ty: Ty, memo: &mut Vec<Option<Ty>>| -> Result<(), ParseError> {
        let got = infer(program, child, memo)?;
        if got != ty {
            let cspan = program.node(child).span;
            Err(ParseError::at(
                cspan,
                format!("expected {ty} argument for '{}', found {got}", kind_name(&node.kind)),
            ))
        } else {
            Ok(())
        }
    };
    let ty = match &node.kind {
        Scene | Var(_) => Ty::Set,
        Semantics(s, _) | RotationAsymmetry(s) => {
            want(*s, Ty::Set, memo)?;
            if matches!(node.kind, RotationAsymmetry(_)) {
                Ty::Scalar
            } else {
                Ty::Set
            }
        }
        RelatedTo { set, targets, .. } => {
            want(*set, Ty::Set, memo)?;
            want(*targets, Ty::Set, memo)?;
            Ty::Set
        }
        Count(s) | Area(s) | Volume(s) => {
            want(*s, Ty::Set, memo)?;
            Ty::Scalar
        }
        MinDistance { a, b, .. } => {
            want(*a, Ty::Set, memo)?;
            want(*b, Ty::Set, memo)?;
            Ty::Scalar
        }
        AngleAlignment { objs, reference }
        | ReflectionAsymmetry { objs, reference } => {
            want(*objs, Ty::Set, memo)?;
            want(*reference, Ty::Set, memo)?;
            Ty::Scalar
        }
        Accessibility { objs, blockers, .. } => {
            want(*objs, Ty::Set, memo)?;
            want(*blockers, Ty::Set, memo)?;
            Ty::Scalar
        }
        FocusScore { objs, target } => {
            want(*objs, Ty::Set, memo)?;
            want(*target, Ty::Set, memo)?;
            Ty::Scalar
        }
        Freespace2d {
            surfaces,
            occupants,
        } => {
            want(*surfaces, Ty::Set, memo)?;
            want(*occupants, Ty::Set, memo)?;
            Ty::Scalar
        }
        Const(_) => Ty::Scalar,
        Add(v) | Mul(v) => {
            for &c in v {
                want(c, Ty::Scalar, memo)?;
            }
            Ty::Scalar
        }
        Sub(a, b) | Div(a, b) | Pow(a, b) => {
            want(*a, Ty::Scalar, memo)?;
            want(*b, Ty::Scalar, memo)?;
            Ty::Scalar
        }
        Hinge { x, lo, hi } => {
            want(*x, Ty::Scalar, memo)?;
            want(*lo, Ty::Scalar, memo)?;
            want(*hi, Ty::Scalar, memo)?;
            Ty::Scalar
        }
        Eq(a, b) | Lt(a, b) | Le(a, b) => {
            want(*a, Ty::Scalar, memo)?;
            want(*b, Ty::Scalar, memo)?;
            Ty::Bool
        }
        InRange { x, lo, hi } => {
            want(*x, Ty::Scalar, memo)?;
            want(*lo, Ty::Scalar, memo)?;
            want(*hi, Ty::Scalar, memo)?;
            Ty::Bool
        }
        And(v) => {
            for &c in v {
                want(c, Ty::Bool, memo)?;
            }
            Ty::Bool
        }
        Loop { op, set, body, .. } => {
            want(*set, Ty::Set, memo)?;
            let body_ty = infer(program, *body, memo)?;
            match op {
                LoopOp::All => {
                    if body_ty != Ty::Bool {
                        return Err(ParseError::at(
                            span,
                            format!("'all' body must be bool, found {body_ty}"),
                        ));
                    }
                    Ty::Bool
                }
                LoopOp::Sum | LoopOp::Mean => {
                    if body_ty != Ty::Scalar {
                        return Err(ParseError::at(
                            span,
                            format!("loop body must be scalar, found {body_ty}"),
                        ));
                    }
                    Ty::Scalar
                }
            }
        }
    };
    memo[id as usize] = Some(ty);
    Ok(ty)
}
