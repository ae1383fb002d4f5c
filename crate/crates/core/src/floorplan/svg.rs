//! Top-down SVG rendering of floors.

use super::pcfg::RoomKind;
use super::{Floor, FloorPlan, Opening, GRID};
use std::fmt::Write;

fn room_fill(kind: RoomKind) -> &'static str {
    match kind {
        RoomKind::Kitchen => "#f4d8a8",
        RoomKind::Bedroom => "#cfe3f5",
        RoomKind::LivingRoom => "#d8eccd",
        RoomKind::Closet => "#e0d4ee",
        RoomKind::Hallway => "#f0f0e4",
        RoomKind::Bathroom => "#cdeef0",
        RoomKind::Garage => "#d9d9d9",
        RoomKind::Balcony => "#f5e3d8",
        RoomKind::DiningRoom => "#efe2ba",
        RoomKind::Utility => "#e5e5d2",
        RoomKind::Staircase => "#e8c8c8",
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.2}")
}

/// Render one floor as a standalone SVG document.
pub fn floor_svg(plan: &FloorPlan, floor: &Floor) -> String {
    let scale = 40.0; // px per meter
    let bbox = floor.contour.bbox().expect("non-empty contour");
    let (x0, y0, x1, y1) = bbox.meters();
    let pad = 0.5;
    let width = (x1 - x0 + 2.0 * pad) * scale;
    let height = (y1 - y0 + 2.0 * pad) * scale;
    let tx = |x: f64| (x - x0 + pad) * scale;
    // SVG y grows downward; flip so plans read like blueprints.
    let ty = |y: f64| (y1 - y + pad) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"##,
        fmt_f(width),
        fmt_f(height),
        fmt_f(width),
        fmt_f(height)
    );
    let _ = writeln!(
        s,
        r##"  <rect x="0" y="0" width="{}" height="{}" fill="white"/>"##,
        fmt_f(width),
        fmt_f(height)
    );
    for room in &floor.rooms {
        for poly in room.cells.to_polygons() {
            let mut d = String::new();
            for (k, v) in poly.exterior().iter().enumerate() {
                let cmd = if k == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{} {} ", fmt_f(tx(v.x)), fmt_f(ty(v.y)));
            }
            d.push('Z');
            for hole in poly.holes() {
                for (k, v) in hole.iter().enumerate() {
                    let cmd = if k == 0 { 'M' } else { 'L' };
                    let _ = write!(d, "{cmd}{} {} ", fmt_f(tx(v.x)), fmt_f(ty(v.y)));
                }
                d.push('Z');
            }
            let _ = writeln!(
                s,
                r##"  <path d="{}" fill="{}" stroke="#333" stroke-width="2" fill-rule="evenodd"/>"##,
                d.trim(),
                room_fill(room.kind)
            );
        }
        // Label at the room's cell centroid.
        let n = room.cells.len().max(1) as f64;
        let (mut cx, mut cy) = (0.0, 0.0);
        for (i, j) in room.cells.iter() {
            cx += (i as f64 + 0.5) * GRID;
            cy += (j as f64 + 0.5) * GRID;
        }
        let _ = writeln!(
            s,
            r##"  <text x="{}" y="{}" font-size="10" font-family="sans-serif" text-anchor="middle" fill="#222">{}</text>"##,
            fmt_f(tx(cx / n)),
            fmt_f(ty(cy / n)),
            room.name
        );
    }
    for opening in &floor.openings {
        match opening {
            Opening::Door { center, width, .. } => {
                let _ = writeln!(
                    s,
                    r##"  <circle cx="{}" cy="{}" r="{}" fill="#b5651d"/>"##,
                    fmt_f(tx(center.0)),
                    fmt_f(ty(center.1)),
                    fmt_f(width * scale * 0.25)
                );
            }
            Opening::OpenWall { a, b, .. } => {
                let _ = writeln!(
                    s,
                    r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ffffff" stroke-width="4" stroke-dasharray="6 4"/>"##,
                    fmt_f(tx(a.0)),
                    fmt_f(ty(a.1)),
                    fmt_f(tx(b.0)),
                    fmt_f(ty(b.1))
                );
            }
            Opening::Window { center, width, out_dir, .. } => {
                // Draw along the wall (perpendicular to the outward normal).
                let (dx, dy) = (-out_dir.1, out_dir.0);
                let hx = dx * width / 2.0;
                let hy = dy * width / 2.0;
                let _ = writeln!(
                    s,
                    r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#4aa3df" stroke-width="4"/>"##,
                    fmt_f(tx(center.0 - hx)),
                    fmt_f(ty(center.1 - hy)),
                    fmt_f(tx(center.0 + hx)),
                    fmt_f(ty(center.1 + hy))
                );
            }
            Opening::Staircase { rect, .. } => {
                let (rx0, ry0, rx1, ry1) = rect.meters();
                let _ = writeln!(
                    s,
                    r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#7a3030" stroke-width="2" stroke-dasharray="3 3"/>"##,
                    fmt_f(tx(rx0)),
                    fmt_f(ty(ry1)),
                    fmt_f((rx1 - rx0) * scale),
                    fmt_f((ry1 - ry0) * scale)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Render every floor; returns (filename suffix, svg document) pairs.
pub fn plan_svgs(plan: &FloorPlan) -> Vec<(String, String)> {
    plan.floors
        .iter()
        .map(|f| (format!("floor{}.svg", f.index), floor_svg(plan, f)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::init::init_plan;
    use crate::floorplan::pcfg::{sample_room_graph, PcfgConfig};
    use crate::floorplan::PlanConfig;

    #[test]
    fn svg_contains_every_room_label() {
        let graph = sample_room_graph(6, &PcfgConfig::with_floors(1)).unwrap();
        let plan = init_plan(&graph, 6, &PlanConfig::default()).unwrap();
        let svg = floor_svg(&plan, &plan.floors[0]);
        for room in &plan.floors[0].rooms {
            assert!(svg.contains(&room.name), "missing {}", room.name);
        }
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_is_deterministic() {
        let graph = sample_room_graph(6, &PcfgConfig::with_floors(1)).unwrap();
        let plan = init_plan(&graph, 6, &PlanConfig::default()).unwrap();
        assert_eq!(
            floor_svg(&plan, &plan.floors[0]),
            floor_svg(&plan, &plan.floors[0])
        );
    }
}
