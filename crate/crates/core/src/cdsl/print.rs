//! Canonical pretty-printer.
//!
//! Shared subexpressions (reference count >= 2) print once as `def` forms,
//! in dependency order; single-use defs are inlined. Output is deterministic
//! and reparses to a structurally equal program.

use super::ast::*;
use std::collections::BTreeMap;

const WRAP_WIDTH: usize = 72;

pub fn print(program: &ConstraintProgram) -> String {
    let mut refs = vec![0u32; program.nodes.len()];
    let mut reachable = vec![false; program.nodes.len()];
    let roots = program.roots();
    for &r in &roots {
        refs[r as usize] += 1;
    }
    // One pass per reachable node: each parent edge counts once.
    let mut stack = roots.clone();
    while let Some(id) = stack.pop() {
        if reachable[id as usize] {
            continue;
        }
        reachable[id as usize] = true;
        for c in program.node(id).kind.children() {
            refs[c as usize] += 1;
            stack.push(c);
        }
    }

    let mut names: BTreeMap<NodeId, String> = BTreeMap::new();
    for (name, id) in &program.defs {
        if reachable[*id as usize] && refs[*id as usize] >= 2 {
            names.entry(*id).or_insert_with(|| name.clone());
        }
    }
    // Synthesized names for unnamed shared nodes, in node order.
    let mut counter = 0usize;
    for id in 0..program.nodes.len() as NodeId {
        if reachable[id as usize]
            && refs[id as usize] >= 2
            && !names.contains_key(&id)
            && defworthy(&program.node(id).kind)
        {
            loop {
                let candidate = format!("e{counter}");
                counter += 1;
                if !program.defs.iter().any(|(n, _)| *n == candidate) {
                    names.insert(id, candidate);
                    break;
                }
            }
        }
    }

    // Topological order: dependencies before dependents.
    let mut order: Vec<NodeId> = Vec::new();
    let mut seen = vec![false; program.nodes.len()];
    fn visit(
        program: &ConstraintProgram,
        id: NodeId,
        seen: &mut Vec<bool>,
        names: &BTreeMap<NodeId, String>,
        order: &mut Vec<NodeId>,
    ) {
        if seen[id as usize] {
            return;
        }
        seen[id as usize] = true;
        for c in program.node(id).kind.children() {
            visit(program, c, seen, names, order);
        }
        if names.contains_key(&id) {
            order.push(id);
        }
    }
    for &r in &roots {
        visit(program, r, &mut seen, &names, &mut order);
    }

    let mut out = String::new();
    let p = Printer { program, names: &names };
    for id in &order {
        let body = p.fmt(*id, true, 1);
        out.push_str(&format!("(def {} {})\n", p.names[id], body));
    }
    if !order.is_empty() && (!program.hards.is_empty() || !program.scores.is_empty()) {
        out.push('\n');
    }
    for h in &program.hards {
        out.push_str(&format!("(hard {} {})\n", h.name, p.fmt(h.root, false, 1)));
    }
    for s in &program.scores {
        out.push_str(&format!(
            "(score {} :weight {} {})\n",
            s.name,
            fmt_num(s.weight),
            p.fmt(s.root, false, 1)
        ));
    }
    out
}

fn defworthy(kind: &NodeKind) -> bool {
    !matches!(kind, NodeKind::Scene | NodeKind::Const(_) | NodeKind::Var(_))
}

fn fmt_num(n: f64) -> String {
    if n == n.trunc() && n.abs() < 1e15 {
        format!("{:.1}", n)
    } else {
        format!("{n}")
    }
}

struct Printer<'a> {
    program: &'a ConstraintProgram,
    names: &'a BTreeMap<NodeId, String>,
}

impl Printer<'_> {
    /// Format node `id`; `defining` suppresses the name substitution at the
    /// top of its own definition.
    fn fmt(&self, id: NodeId, defining: bool, depth: usize) -> String {
        if !defining {
            if let Some(name) = self.names.get(&id) {
                return name.clone();
            }
        }
        use NodeKind::*;
        let kind = &self.program.node(id).kind;
        match kind {
            Scene => "scene".to_string(),
            Const(c) => fmt_num(*c),
            Var(v) => v.clone(),
            _ => {
                let mut parts: Vec<String> = Vec::new();
                let name = kind_name(kind);
                match kind {
                    Semantics(set, tag) => {
                        parts.push(self.fmt(*set, false, depth + 1));
                        parts.push(format!("{tag:?}"));
                    }
                    RelatedTo {
                        set,
                        targets,
                        relation,
                    } => {
                        parts.push(self.fmt(*set, false, depth + 1));
                        parts.push(self.fmt(*targets, false, depth + 1));
                        parts.push(fmt_relation(relation));
                    }
                    MinDistance { a, b, tag_a, tag_b } => {
                        parts.push(self.fmt(*a, false, depth + 1));
                        parts.push(self.fmt(*b, false, depth + 1));
                        if let (Some(ta), Some(tb)) = (tag_a, tag_b) {
                            parts.push(format!("{ta:?}"));
                            parts.push(format!("{tb:?}"));
                        }
                    }
                    Accessibility {
                        objs,
                        blockers,
                        mode,
                    } => {
                        parts.push(self.fmt(*objs, false, depth + 1));
                        parts.push(self.fmt(*blockers, false, depth + 1));
                        parts.push(
                            match mode {
                                AccessMode::Fast => "fast",
                                AccessMode::Slow => "slow",
                            }
                            .to_string(),
                        );
                    }
                    Loop { var, set, body, .. } => {
                        parts.push(var.clone());
                        parts.push(self.fmt(*set, false, depth + 1));
                        parts.push(self.fmt(*body, false, depth + 1));
                    }
                    _ => {
                        for c in kind.children() {
                            parts.push(self.fmt(c, false, depth + 1));
                        }
                    }
                }
                let flat = format!("({name} {})", parts.join(" "));
                if flat.len() <= WRAP_WIDTH || parts.len() < 2 {
                    flat
                } else {
                    let pad = "  ".repeat(depth + 1);
                    let mut s = format!("({name} {}", parts[0]);
                    for part in &parts[1..] {
                        s.push('\n');
                        s.push_str(&pad);
                        s.push_str(part);
                    }
                    s.push(')');
                    s
                }
            }
        }
    }
}

fn fmt_relation(rel: &RelationSpec) -> String {
    match rel.kind {
        crate::semantics::RelationKind::StableAgainst => format!(
            "(stable_against {:?} {:?} {})",
            rel.child_tag,
            rel.parent_tag,
            fmt_num(rel.margin)
        ),
        crate::semantics::RelationKind::SupportedBy => {
            format!("(supported_by {:?} {:?})", rel.child_tag, rel.parent_tag)
        }
    }
}
