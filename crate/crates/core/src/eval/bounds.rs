//! Cardinality-bound extraction.
//!
//! Walks the hard constraints for count comparisons and turns each one into
//! per-context bounds on object counts. Contexts name a semantic tag chain
//! plus the relation assignments an added object must satisfy; loop-bound
//! constraints yield one context per loop element ("1 to 5 books on *this*
//! shelf"). Inequalities between counts are state-sensitive: the other side
//! is evaluated against the current scene.

use super::evaluate::{evaluate_node, EvalCache, EvalContext};
use super::EvalError;
use crate::cdsl::{ConstraintProgram, LoopOp, NodeId, NodeKind, RelationSpec};
use crate::semantics::EntId;
use std::collections::BTreeMap;

/// Where an added object's relation must point.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetRef {
    /// A specific entity (from a loop binding).
    Entity(EntId),
    /// Any current member of the given set expression.
    AnyOf(NodeId),
}

/// The shape of objects a bound counts: semantic tags plus required
/// relations.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundContext {
    /// All semantic filters on the chain (an object must match every one).
    pub tags: Vec<String>,
    pub requirements: Vec<(RelationSpec, TargetRef)>,
    /// The counted set expression.
    pub set_node: NodeId,
    /// Loop bindings active for this context instance.
    pub env: Vec<(String, EntId)>,
}

impl BoundContext {
    /// Human-readable context label, also the merge key.
    pub fn key(&self) -> String {
        let mut s = self.tags.join("+");
        for (rel, target) in &self.requirements {
            s.push_str(&format!(
                " {}({}->{}@{:.3},{})",
                rel.kind.name(),
                rel.child_tag,
                rel.parent_tag,
                rel.margin,
                match target {
                    TargetRef::Entity(e) => format!("{e:?}"),
                    TargetRef::AnyOf(n) => format!("set#{n}"),
                }
            ));
        }
        s
    }
}

/// Inclusive cardinality bound on a context: `low <= count <= high`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub context: BoundContext,
    pub low: u32,
    pub high: Option<u32>,
    /// Count of matching objects in the scene the bounds were extracted from.
    pub current: u32,
}

impl Bound {
    pub fn tight_above(&self) -> bool {
        self.high.is_some_and(|h| self.current >= h)
    }

    pub fn tight_below(&self) -> bool {
        self.current <= self.low
    }
}

/// Decompose a set expression into (tags, relation requirements); `None`
/// when the chain bottoms out at something other than `scene` (a loop
/// variable is not an addable context).
fn context_of(
    program: &ConstraintProgram,
    mut id: NodeId,
    env: &[(String, EntId)],
) -> Option<(Vec<String>, Vec<(RelationSpec, TargetRef)>)> {
    let set_node = id;
    let mut tags = Vec::new();
    let mut requirements = Vec::new();
    loop {
        match &program.node(id).kind {
            NodeKind::Scene => break,
            NodeKind::Semantics(inner, tag) => {
                tags.push(tag.clone());
                id = *inner;
            }
            NodeKind::RelatedTo {
                set,
                targets,
                relation,
            } => {
                let target = match &program.node(*targets).kind {
                    NodeKind::Var(name) => {
                        let ent = env.iter().rev().find(|(n, _)| n == name)?.1;
                        TargetRef::Entity(ent)
                    }
                    _ => TargetRef::AnyOf(*targets),
                };
                requirements.push((relation.clone(), target));
                id = *set;
            }
            _ => return None,
        }
    }
    let _ = set_node;
    tags.reverse();
    requirements.reverse();
    Some((tags, requirements))
}

/// A raw (low, high) interval contributed by one constraint.
#[derive(Debug, Clone, Copy)]
struct Interval {
    low: u32,
    high: Option<u32>,
}

struct Extractor<'a, 'b> {
    program: &'a ConstraintProgram,
    ctx: &'a mut EvalContext<'b>,
    cache: Option<&'a mut EvalCache>,
    /// key -> (context, intervals...)
    found: BTreeMap<String, (BoundContext, Vec<Interval>)>,
}

impl Extractor<'_, '_> {
    fn eval_num(&mut self, id: NodeId, env: &[(String, EntId)]) -> Result<f64, EvalError> {
        evaluate_node(self.program, self.ctx, self.cache.as_deref_mut(), id, env)
            .map(|v| v.as_num())
    }

    /// Does the scalar expression depend on `count(set_node)` itself?
    fn mentions(&self, id: NodeId, set_node: NodeId) -> bool {
        if id == set_node {
            return true;
        }
        self.program
            .node(id)
            .kind
            .children()
            .iter()
            .any(|&c| self.mentions(c, set_node))
    }

    fn record(
        &mut self,
        set_node: NodeId,
        env: &[(String, EntId)],
        interval: Interval,
    ) -> Result<(), EvalError> {
        let Some((tags, requirements)) = context_of(self.program, set_node, env) else {
            return Ok(());
        };
        // Realizability: every relation target must have a current candidate.
        for (_, target) in &requirements {
            if let TargetRef::AnyOf(node) = target {
                let v = evaluate_node(
                    self.program,
                    self.ctx,
                    self.cache.as_deref_mut(),
                    *node,
                    env,
                )?;
                if v.as_set().is_empty() {
                    return Ok(());
                }
            }
        }
        let context = BoundContext {
            tags,
            requirements,
            set_node,
            env: env.to_vec(),
        };
        let key = format!("{}|{:?}", context.key(), env);
        let entry = self
            .found
            .entry(key)
            .or_insert_with(|| (context, Vec::new()));
        entry.1.push(interval);
        Ok(())
    }

    /// Register a context discovered under a score term (no interval).
    fn record_free(&mut self, set_node: NodeId, env: &[(String, EntId)]) -> Result<(), EvalError> {
        self.record(
            set_node,
            env,
            Interval {
                low: 0,
                high: None,
            },
        )
    }

    fn walk_bool(&mut self, id: NodeId, env: &[(String, EntId)]) -> Result<(), EvalError> {
        use NodeKind::*;
        match self.program.node(id).kind.clone() {
            And(children) => {
                for c in children {
                    self.walk_bool(c, env)?;
                }
            }
            Loop {
                op: LoopOp::All,
                var,
                set,
                body,
            } => {
                let elems = evaluate_node(
                    self.program,
                    self.ctx,
                    self.cache.as_deref_mut(),
                    set,
                    env,
                )?;
                for &e in elems.as_set() {
                    let mut inner = env.to_vec();
                    inner.push((var.clone(), e));
                    self.walk_bool(body, &inner)?;
                }
            }
            Le(a, b) => self.comparison(a, b, env, 0)?,
            Lt(a, b) => self.comparison(a, b, env, 1)?,
            Eq(a, b) => {
                self.comparison(a, b, env, 0)?; // a <= b
                self.comparison(b, a, env, 0)?; // b <= a
            }
            InRange { x, lo, hi } => {
                if let Count(set) = self.program.node(x).kind {
                    let lo_v = self.eval_num(lo, env)?;
                    let hi_v = self.eval_num(hi, env)?;
                    self.record(
                        set,
                        env,
                        Interval {
                            low: ceil_u32(lo_v),
                            high: Some(floor_u32(hi_v)),
                        },
                    )?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Handle `a <= b` (strictness 0) or `a < b` (strictness 1) where either
    /// side may be a count.
    fn comparison(
        &mut self,
        a: NodeId,
        b: NodeId,
        env: &[(String, EntId)],
        strictness: u32,
    ) -> Result<(), EvalError> {
        use NodeKind::Count;
        let a_count = match self.program.node(a).kind {
            Count(s) => Some(s),
            _ => None,
        };
        let b_count = match self.program.node(b).kind {
            Count(s) => Some(s),
            _ => None,
        };
        // count(A) <= rhs: upper bound from the current value of rhs,
        // provided rhs does not itself involve count(A).
        if let Some(set) = a_count {
            if !self.mentions(b, set) {
                let rhs = self.eval_num(b, env)?;
                let high = floor_u32(rhs).saturating_sub(strictness);
                self.record(
                    set,
                    env,
                    Interval {
                        low: 0,
                        high: Some(high),
                    },
                )?;
            }
        }
        // lhs <= count(B): lower bound.
        if let Some(set) = b_count {
            if !self.mentions(a, set) {
                let lhs = self.eval_num(a, env)?;
                let low = ceil_u32(lhs) + strictness;
                self.record(set, env, Interval { low, high: None })?;
            }
        }
        Ok(())
    }

    /// Contexts mentioned by score terms become unconstrained bounds so the
    /// addition move can still propose into them.
    fn walk_score(&mut self, id: NodeId, env: &[(String, EntId)]) -> Result<(), EvalError> {
        use NodeKind::*;
        match self.program.node(id).kind.clone() {
            Count(set) => self.record_free(set, env)?,
            Loop {
                op: _,
                var,
                set,
                body,
            } => {
                let elems = evaluate_node(
                    self.program,
                    self.ctx,
                    self.cache.as_deref_mut(),
                    set,
                    env,
                )?;
                for &e in elems.as_set() {
                    let mut inner = env.to_vec();
                    inner.push((var.clone(), e));
                    self.walk_score(body, &inner)?;
                }
            }
            kind => {
                for c in kind.children() {
                    self.walk_score(c, env)?;
                }
            }
        }
        Ok(())
    }
}

fn ceil_u32(v: f64) -> u32 {
    v.ceil().max(0.0) as u32
}

fn floor_u32(v: f64) -> u32 {
    v.floor().max(0.0) as u32
}

/// Extract one bound per realizable context of the program against the
/// current scene. Intervals from multiple constraints on one context
/// intersect; hard-infeasible intersections collapse to `low > high` bounds
/// that are both tight.
pub fn extract_bounds(
    program: &ConstraintProgram,
    ctx: &mut EvalContext,
    mut cache: Option<&mut EvalCache>,
) -> Result<Vec<Bound>, EvalError> {
    let mut ex = Extractor {
        program,
        ctx,
        cache: cache.as_deref_mut(),
        found: BTreeMap::new(),
    };
    for h in &program.hards {
        ex.walk_bool(h.root, &[])?;
    }
    for s in &program.scores {
        ex.walk_score(s.root, &[])?;
    }
    let found = std::mem::take(&mut ex.found);
    let mut out = Vec::new();
    for (_, (context, intervals)) in found {
        let mut low = 0u32;
        let mut high: Option<u32> = None;
        for iv in &intervals {
            low = low.max(iv.low);
            high = match (high, iv.high) {
                (None, h) => h,
                (h, None) => h,
                (Some(a), Some(b)) => Some(a.min(b)),
            };
        }
        let current = evaluate_node(
            program,
            ex.ctx,
            ex.cache.as_deref_mut(),
            context.set_node,
            &context.env,
        )?
        .as_set()
        .len() as u32;
        out.push(Bound {
            context,
            low,
            high,
            current,
        });
    }
    Ok(out)
}
