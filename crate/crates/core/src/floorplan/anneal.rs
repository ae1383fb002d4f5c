//! Simulated annealing over floorplans.

use super::loss::{floor_terms_cached, FloorLoss, LossCache, LossWeights, TERM_COUNT};
use super::moves::{apply_move, move_valid, propose_plan_move, PlanMove};
use super::{FloorPlan, PlanConfig};
use crate::solver::schedule::{metropolis_accept, TemperatureSchedule};

fn touched_rooms(plan: &FloorPlan, mv: &PlanMove) -> Vec<u32> {
    match mv {
        PlanMove::Transfer { cells, .. } => {
            let mut ids: Vec<u32> = cells.iter().flat_map(|&(_, a, b)| [a, b]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        }
        PlanMove::Swap { rooms, .. } => vec![rooms.0, rooms.1],
        PlanMove::MoveStair { .. } => plan
            .floors
            .iter()
            .flat_map(|f| f.rooms.iter())
            .filter(|r| r.kind == super::pcfg::RoomKind::Staircase)
            .map(|r| r.id)
            .collect(),
    }
}

/// Anneal `plan` for `steps` Metropolis steps under the standard cooling
/// schedule. Deterministic for a given seed. Returns the final plan and the
/// (initial, final) weighted losses.
pub fn anneal_plan(
    plan: &FloorPlan,
    steps: u64,
    weights: &LossWeights,
    config: &PlanConfig,
    seed: u64,
) -> (FloorPlan, f64, f64) {
    let mut rng = crate::rng::stream(seed, "plan-anneal");
    let mut plan = plan.clone();
    let schedule = TemperatureSchedule::standard(steps);
    let mut cache = LossCache::new();
    let mut terms: Vec<[f64; TERM_COUNT]> = (0..plan.floors.len())
        .map(|f| floor_terms_cached(&plan, f, config, &mut cache))
        .collect();
    let weigh = |per_floor: &[[f64; TERM_COUNT]]| -> f64 {
        per_floor
            .iter()
            .flat_map(|t| t.iter().zip(weights.values.iter()).map(|(v, w)| v * w))
            .sum()
    };
    let initial_loss = weigh(&terms);
    let mut loss = initial_loss;

    for t in 0..steps {
        let Some(mv) = propose_plan_move(&plan, &mut rng) else {
            continue;
        };
        let touched_floor: Option<usize> = match &mv {
            PlanMove::Transfer { floor, .. } | PlanMove::Swap { floor, .. } => Some(*floor),
            PlanMove::MoveStair { .. } => None,
        };
        let touched = touched_rooms(&plan, &mv);
        let undo = apply_move(&mut plan, &mv);
        if !move_valid(&plan, config, &mv) {
            apply_move(&mut plan, &undo);
            continue;
        }
        for &id in &touched {
            cache.invalidate_room(id);
        }
        // Recompute only the touched floor; staircase moves touch the
        // staircase terms of every floor.
        let mut new_terms = terms.clone();
        match touched_floor {
            Some(f) => new_terms[f] = floor_terms_cached(&plan, f, config, &mut cache),
            None => {
                for f in 0..plan.floors.len() {
                    new_terms[f] = floor_terms_cached(&plan, f, config, &mut cache);
                }
            }
        }
        let new_loss = weigh(&new_terms);
        if metropolis_accept(loss, new_loss, schedule.tau(t), &mut rng) {
            terms = new_terms;
            loss = new_loss;
            debug_assert!(plan.check_valid(config).is_ok());
        } else {
            apply_move(&mut plan, &undo);
            // The cache holds quantities for the proposed state; drop them.
            for &id in &touched {
                cache.invalidate_room(id);
            }
        }
    }
    (plan, initial_loss, loss)
}

/// Convenience: the weighted loss of a plan.
pub fn plan_loss(plan: &FloorPlan, weights: &LossWeights, config: &PlanConfig) -> FloorLoss {
    super::loss::floor_loss(plan, weights, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::init::init_plan;
    use crate::floorplan::pcfg::{sample_room_graph, PcfgConfig};

    #[test]
    fn annealing_is_deterministic() {
        let graph = sample_room_graph(8, &PcfgConfig::with_floors(1)).unwrap();
        let config = PlanConfig::default();
        let plan = init_plan(&graph, 8, &config).unwrap();
        let w = LossWeights::tuned();
        let (a, ia, fa) = anneal_plan(&plan, 300, &w, &config, 42);
        let (b, ib, fb) = anneal_plan(&plan, 300, &w, &config, 42);
        assert_eq!(a, b);
        assert_eq!(ia, ib);
        assert_eq!(fa, fb);
    }

    #[test]
    fn annealing_keeps_validity_and_tends_downhill() {
        let config = PlanConfig::default();
        let w = LossWeights::tuned();
        let mut improved = 0;
        for seed in 0..5 {
            let graph = sample_room_graph(seed, &PcfgConfig::with_floors(1)).unwrap();
            let plan = init_plan(&graph, seed, &config).unwrap();
            let (annealed, initial, fin) = anneal_plan(&plan, 500, &w, &config, seed);
            annealed.check_valid(&config).unwrap();
            if fin < initial {
                improved += 1;
            }
        }
        assert!(improved >= 3, "only {improved}/5 improved");
    }

    #[test]
    fn zero_steps_is_identity() {
        let graph = sample_room_graph(1, &PcfgConfig::with_floors(1)).unwrap();
        let config = PlanConfig::default();
        let plan = init_plan(&graph, 1, &config).unwrap();
        let (out, initial, fin) = anneal_plan(&plan, 0, &LossWeights::ones(), &config, 7);
        assert_eq!(out, plan);
        assert_eq!(initial, fin);
    }
}
