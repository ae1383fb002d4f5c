use arrange_core::floorplan::*;
use std::time::Instant;
fn main() {
    let config = PlanConfig::default();
    let w = LossWeights::tuned();
    let mut ok = 0;
    let mut post_ok = 0;
    let t0 = Instant::now();
    for seed in 0..30u64 {
        let floors = 1 + (seed % 3) as u32;
        let Ok(graph) = sample_room_graph(seed, &PcfgConfig::with_floors(floors)) else { continue };
        let Ok(plan) = init_plan(&graph, seed, &config) else { continue };
        let (plan, li, lf) = anneal_plan(&plan, 2000, &w, &config, seed);
        if plan.check_valid(&config).is_ok() && lf <= li { ok += 1; }
        if postprocess(&plan, seed, &config).is_ok() { post_ok += 1; }
    }
    eprintln!("valid+improved {ok}/30 post_ok {post_ok}/30 in {:?}", t0.elapsed());
}
