//! Tree-walking evaluator with memoized incremental re-evaluation.
//!
//! Cached entries remember which entities their value depends on through
//! poses, parameters, or LOD. A mutation invalidates exactly the entries
//! whose dependency set intersects the touched ids; structural changes
//! (add/delete/relation rewiring) clear the cache. Cached evaluation is
//! bit-identical to evaluation from scratch.

use super::geo::GeomCache;
use super::ops;
use super::EvalError;
use crate::cdsl::{AccessMode, ConstraintProgram, LoopOp, NodeId, NodeKind};
use crate::semantics::{filter_related, EntId, SceneState, TagRegistry};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Set(Rc<Vec<EntId>>),
    Num(f64),
    Bool(bool),
}

impl Value {
    pub fn as_set(&self) -> &[EntId] {
        match self {
            Value::Set(v) => v,
            _ => &[],
        }
    }

    pub fn as_num(&self) -> f64 {
        match self {
            Value::Num(n) => *n,
            _ => f64::NAN,
        }
    }

    pub fn as_bool(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Set(v) => serde_json::Value::Array(
                v.iter()
                    .map(|e| serde_json::Value::String(format!("{e:?}")))
                    .collect(),
            ),
            Value::Num(n) => serde_json::json!(n),
            Value::Bool(b) => serde_json::json!(b),
        }
    }
}

type Touched = Rc<BTreeSet<EntId>>;

/// What a committed or reverted mutation touched.
#[derive(Debug, Clone)]
pub enum MutationEffect {
    /// Membership or relations changed: everything is suspect.
    Structural,
    /// Only the listed entities' geometry changed.
    Touched(Vec<EntId>),
}

/// Per-node memo keyed by (node, loop bindings).
#[derive(Debug, Default)]
pub struct EvalCache {
    entries: BTreeMap<(NodeId, Vec<EntId>), (Value, Touched)>,
}

impl EvalCache {
    pub fn new() -> EvalCache {
        EvalCache::default()
    }

    pub fn invalidate(&mut self, effect: &MutationEffect) {
        match effect {
            MutationEffect::Structural => self.entries.clear(),
            MutationEffect::Touched(ids) => {
                self.entries
                    .retain(|_, (_, touched)| ids.iter().all(|id| !touched.contains(id)));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Violation of one hard constraint, with witness entities when a loop can
/// name the failing elements.
#[derive(Debug, Clone, PartialEq)]
pub struct HardViolation {
    pub name: String,
    pub witnesses: Vec<EntId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    /// Weighted sum of score terms (lower is better), always finite.
    pub soft_loss: f64,
    pub hard_violations: Vec<HardViolation>,
    /// Per-root-node values for debugging (only when requested).
    pub node_values: Option<BTreeMap<String, serde_json::Value>>,
}

impl ScoreReport {
    pub fn hard_ok(&self) -> bool {
        self.hard_violations.is_empty()
    }

    pub fn violated_names(&self) -> BTreeSet<String> {
        self.hard_violations
            .iter()
            .map(|v| v.name.clone())
            .collect()
    }
}

pub struct EvalContext<'a> {
    pub scene: &'a SceneState,
    pub registry: &'a TagRegistry,
    pub geo: &'a mut GeomCache,
}

struct Evaluator<'a, 'b> {
    program: &'a ConstraintProgram,
    ctx: &'a mut EvalContext<'b>,
    cache: Option<&'a mut EvalCache>,
    env: Vec<(String, EntId)>,
}

impl Evaluator<'_, '_> {
    fn eval(&mut self, id: NodeId) -> Result<(Value, Touched), EvalError> {
        let key_env: Vec<EntId> = self.env.iter().map(|(_, e)| *e).collect();
        if let Some(cache) = self.cache.as_deref() {
            if let Some(hit) = cache.entries.get(&(id, key_env.clone())) {
                return Ok(hit.clone());
            }
        }
        let out = self.compute(id)?;
        if let Some(cache) = self.cache.as_deref_mut() {
            cache.entries.insert((id, key_env), out.clone());
        }
        Ok(out)
    }

    fn compute(&mut self, id: NodeId) -> Result<(Value, Touched), EvalError> {
        use NodeKind::*;
        let empty: Touched = Rc::new(BTreeSet::new());
        let node = &self.program.node(id).kind;
        Ok(match node {
            Scene => (Value::Set(Rc::new(self.ctx.scene.all_entities())), empty),
            Var(name) => {
                let ent = self
                    .env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == name)
                    .map(|(_, e)| *e)
                    .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
                (Value::Set(Rc::new(vec![ent])), empty)
            }
            Const(c) => (Value::Num(*c), empty),
            Semantics(set, tag) => {
                let (v, t) = self.eval(*set)?;
                let mut out = Vec::new();
                for &e in v.as_set() {
                    let tags = self.ctx.scene.tags_of(e)?;
                    if self.ctx.registry.tag_matches(tags, tag)? {
                        out.push(e);
                    }
                }
                (Value::Set(Rc::new(out)), t)
            }
            RelatedTo {
                set,
                targets,
                relation,
            } => {
                let (sv, st) = self.eval(*set)?;
                let (tv, tt) = self.eval(*targets)?;
                let hit = filter_related(
                    self.ctx.scene,
                    sv.as_set(),
                    tv.as_set(),
                    relation.kind,
                    Some(relation.margin),
                );
                (Value::Set(Rc::new(hit)), union(&st, &tt))
            }
            Count(set) => {
                let (v, t) = self.eval(*set)?;
                (Value::Num(v.as_set().len() as f64), t)
            }
            Area(set) => {
                let (v, t) = self.eval(*set)?;
                let touched = extend(&t, v.as_set());
                (
                    Value::Num(ops::total_area(self.ctx.scene, v.as_set())),
                    touched,
                )
            }
            Volume(set) => {
                let (v, t) = self.eval(*set)?;
                let touched = extend(&t, v.as_set());
                (
                    Value::Num(ops::total_volume(self.ctx.scene, v.as_set())),
                    touched,
                )
            }
            MinDistance { a, b, tag_a, tag_b } => {
                let (av, at) = self.eval(*a)?;
                let (bv, bt) = self.eval(*b)?;
                let touched = extend(&union(&at, &bt), av.as_set());
                let touched = extend(&touched, bv.as_set());
                let d = ops::min_distance(
                    self.ctx.scene,
                    self.ctx.geo,
                    av.as_set(),
                    bv.as_set(),
                    tag_a.as_deref(),
                    tag_b.as_deref(),
                );
                (Value::Num(d), touched)
            }
            AngleAlignment { objs, reference } => {
                let (ov, ot) = self.eval(*objs)?;
                let (rv, rt) = self.eval(*reference)?;
                let touched = extend(&extend(&union(&ot, &rt), ov.as_set()), rv.as_set());
                (
                    Value::Num(ops::angle_alignment_cost(
                        self.ctx.scene,
                        ov.as_set(),
                        rv.as_set(),
                    )),
                    touched,
                )
            }
            RotationAsymmetry(objs) => {
                let (ov, ot) = self.eval(*objs)?;
                let touched = extend(&ot, ov.as_set());
                let val = if ov.as_set().len() < 2 {
                    0.0 // degenerate set convention
                } else {
                    ops::rotation_asymmetry(self.ctx.scene, ov.as_set())?
                };
                (Value::Num(val), touched)
            }
            ReflectionAsymmetry { objs, reference } => {
                let (ov, ot) = self.eval(*objs)?;
                let (rv, rt) = self.eval(*reference)?;
                let touched = extend(&extend(&union(&ot, &rt), ov.as_set()), rv.as_set());
                let val = if ov.as_set().len() < 2 || rv.as_set().is_empty() {
                    0.0
                } else {
                    ops::reflection_asymmetry(self.ctx.scene, ov.as_set(), rv.as_set())?
                };
                (Value::Num(val), touched)
            }
            Accessibility {
                objs,
                blockers,
                mode,
            } => {
                let (ov, ot) = self.eval(*objs)?;
                let (bv, bt) = self.eval(*blockers)?;
                let touched = extend(&extend(&union(&ot, &bt), ov.as_set()), bv.as_set());
                let kind = match mode {
                    AccessMode::Fast => ops::AccessKind::Fast,
                    AccessMode::Slow => ops::AccessKind::Slow,
                };
                (
                    Value::Num(ops::accessibility_cost(
                        self.ctx.scene,
                        self.ctx.geo,
                        ov.as_set(),
                        bv.as_set(),
                        kind,
                    )),
                    touched,
                )
            }
            FocusScore { objs, target } => {
                let (ov, ot) = self.eval(*objs)?;
                let (tv, tt) = self.eval(*target)?;
                let touched = extend(&extend(&union(&ot, &tt), ov.as_set()), tv.as_set());
                (
                    Value::Num(ops::focus_score(self.ctx.scene, ov.as_set(), tv.as_set())),
                    touched,
                )
            }
            Freespace2d {
                surfaces,
                occupants,
            } => {
                let (sv, st) = self.eval(*surfaces)?;
                let (qv, qt) = self.eval(*occupants)?;
                let touched = extend(&extend(&union(&st, &qt), sv.as_set()), qv.as_set());
                (
                    Value::Num(ops::freespace_2d(self.ctx.scene, sv.as_set(), qv.as_set())),
                    touched,
                )
            }
            Add(children) => self.fold_nums(children, |acc, x| acc + x, 0.0)?,
            Mul(children) => self.fold_nums(children, |acc, x| acc * x, 1.0)?,
            Sub(a, b) => {
                let (av, at) = self.eval(*a)?;
                let (bv, bt) = self.eval(*b)?;
                (Value::Num(av.as_num() - bv.as_num()), union(&at, &bt))
            }
            Div(a, b) => {
                let (av, at) = self.eval(*a)?;
                let (bv, bt) = self.eval(*b)?;
                (Value::Num(av.as_num() / bv.as_num()), union(&at, &bt))
            }
            Pow(a, b) => {
                let (av, at) = self.eval(*a)?;
                let (bv, bt) = self.eval(*b)?;
                (Value::Num(av.as_num().powf(bv.as_num())), union(&at, &bt))
            }
            Hinge { x, lo, hi } => {
                let (xv, xt) = self.eval(*x)?;
                let (lv, lt) = self.eval(*lo)?;
                let (hv, ht) = self.eval(*hi)?;
                let v = xv.as_num();
                let out = (lv.as_num() - v).max(0.0) + (v - hv.as_num()).max(0.0);
                (Value::Num(out), union(&union(&xt, &lt), &ht))
            }
            Eq(a, b) => self.compare(*a, *b, |x, y| x == y)?,
            Lt(a, b) => self.compare(*a, *b, |x, y| x < y)?,
            Le(a, b) => self.compare(*a, *b, |x, y| x <= y)?,
            InRange { x, lo, hi } => {
                let (xv, xt) = self.eval(*x)?;
                let (lv, lt) = self.eval(*lo)?;
                let (hv, ht) = self.eval(*hi)?;
                let v = xv.as_num();
                (
                    Value::Bool(lv.as_num() <= v && v <= hv.as_num()),
                    union(&union(&xt, &lt), &ht),
                )
            }
            And(children) => {
                let mut touched = empty;
                let mut all = true;
                for &c in children {
                    let (v, t) = self.eval(c)?;
                    touched = union(&touched, &t);
                    all = all && v.as_bool();
                }
                (Value::Bool(all), touched)
            }
            Loop { op, var, set, body } => {
                let (sv, st) = self.eval(*set)?;
                let mut touched = st;
                let mut sum = 0.0;
                let mut all = true;
                let n = sv.as_set().len();
                for &e in sv.as_set() {
                    self.env.push((var.clone(), e));
                    let out = self.eval(*body);
                    self.env.pop();
                    let (v, t) = out?;
                    touched = union(&touched, &t);
                    match op {
                        LoopOp::All => all = all && v.as_bool(),
                        _ => sum += v.as_num(),
                    }
                }
                match op {
                    LoopOp::All => (Value::Bool(all), touched),
                    LoopOp::Sum => (Value::Num(sum), touched),
                    LoopOp::Mean => (
                        Value::Num(if n == 0 { 0.0 } else { sum / n as f64 }),
                        touched,
                    ),
                }
            }
        })
    }

    fn fold_nums(
        &mut self,
        children: &[NodeId],
        f: impl Fn(f64, f64) -> f64,
        init: f64,
    ) -> Result<(Value, Touched), EvalError> {
        let mut acc = init;
        let mut touched: Touched = Rc::new(BTreeSet::new());
        for &c in children {
            let (v, t) = self.eval(c)?;
            acc = f(acc, v.as_num());
            touched = union(&touched, &t);
        }
        Ok((Value::Num(acc), touched))
    }

    fn compare(
        &mut self,
        a: NodeId,
        b: NodeId,
        f: impl Fn(f64, f64) -> bool,
    ) -> Result<(Value, Touched), EvalError> {
        let (av, at) = self.eval(a)?;
        let (bv, bt) = self.eval(b)?;
        Ok((Value::Bool(f(av.as_num(), bv.as_num())), union(&at, &bt)))
    }

    /// Witnesses for a failed boolean root: the failing elements of `all`
    /// loops, when the root names them.
    fn witnesses(&mut self, id: NodeId) -> Result<Vec<EntId>, EvalError> {
        use NodeKind::*;
        match &self.program.node(id).kind {
            And(children) => {
                let children = children.clone();
                let mut out = Vec::new();
                for c in children {
                    let (v, _) = self.eval(c)?;
                    if !v.as_bool() {
                        out.extend(self.witnesses(c)?);
                    }
                }
                Ok(out)
            }
            Loop {
                op: LoopOp::All,
                var,
                set,
                body,
            } => {
                let (var, set, body) = (var.clone(), *set, *body);
                let (sv, _) = self.eval(set)?;
                let elems: Vec<EntId> = sv.as_set().to_vec();
                let mut out = Vec::new();
                for e in elems {
                    self.env.push((var.clone(), e));
                    let res = self.eval(body);
                    self.env.pop();
                    if !res?.0.as_bool() {
                        out.push(e);
                    }
                }
                Ok(out)
            }
            _ => Ok(vec![]),
        }
    }
}

fn union(a: &Touched, b: &Touched) -> Touched {
    if b.is_empty() {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    let mut out = (**a).clone();
    out.extend(b.iter().copied());
    Rc::new(out)
}

fn extend(t: &Touched, ids: &[EntId]) -> Touched {
    if ids.is_empty() {
        return t.clone();
    }
    let mut out = (**t).clone();
    out.extend(ids.iter().copied());
    Rc::new(out)
}

/// Evaluate a program against a scene. With a cache, results are bit-identical
/// to uncached evaluation; the cache must have been invalidated for every
/// mutation since it was last used.
pub fn evaluate(
    program: &ConstraintProgram,
    ctx: &mut EvalContext,
    cache: Option<&mut EvalCache>,
    collect_values: bool,
) -> Result<ScoreReport, EvalError> {
    let mut ev = Evaluator {
        program,
        ctx,
        cache,
        env: Vec::new(),
    };
    let mut soft_loss = 0.0;
    let mut node_values = collect_values.then(BTreeMap::new);
    let mut hard_violations = Vec::new();
    for h in &program.hards {
        let (v, _) = ev.eval(h.root)?;
        let ok = v.as_bool();
        if let Some(values) = node_values.as_mut() {
            values.insert(format!("hard:{}", h.name), serde_json::json!(ok));
        }
        if !ok {
            let witnesses = ev.witnesses(h.root)?;
            hard_violations.push(HardViolation {
                name: h.name.clone(),
                witnesses,
            });
        }
    }
    for s in &program.scores {
        let (v, _) = ev.eval(s.root)?;
        let val = v.as_num();
        if let Some(values) = node_values.as_mut() {
            values.insert(format!("score:{}", s.name), serde_json::json!(val));
        }
        soft_loss += s.weight * val;
    }
    if !soft_loss.is_finite() {
        // Degenerate arithmetic (division by zero counts, infinite powers)
        // must not poison the annealer; treat as a maximally bad state.
        soft_loss = 1e300;
    }
    Ok(ScoreReport {
        soft_loss,
        hard_violations,
        node_values,
    })
}

/// Evaluate a single node with loop bindings (used by bound extraction).
pub(crate) fn evaluate_node(
    program: &ConstraintProgram,
    ctx: &mut EvalContext,
    cache: Option<&mut EvalCache>,
    id: NodeId,
    env: &[(String, EntId)],
) -> Result<Value, EvalError> {
    let mut ev = Evaluator {
        program,
        ctx,
        cache,
        env: env.to_vec(),
    };
    ev.eval(id).map(|(v, _)| v)
}
