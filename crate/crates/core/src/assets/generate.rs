//! Archetype geometry: kind + parameters -> tagged placeholder.

use super::catalog::GeneratorSpec;
use super::placeholder::{Face, PlaceholderObject, ProxyBuilder};
use super::{AssetError, Catalog};
use crate::geom::vec3;
use rand::Rng;

/// Sample a parameter vector uniformly within the declared ranges.
pub fn resample_params(spec: &GeneratorSpec, rng: &mut impl Rng) -> Vec<f64> {
    spec.params
        .iter()
        .map(|p| {
            if p.max > p.min {
                rng.gen_range(p.min..=p.max)
            } else {
                p.min
            }
        })
        .collect()
}

/// Generate the placeholder for `(kind, params, seed)`. Deterministic; the
/// seed is reserved for archetypes with stochastic detail (none of the
/// shipped archetypes use it, which keeps resampling strictly parametric).
pub fn generate(
    catalog: &Catalog,
    kind: &str,
    params: &[f64],
    _seed: u64,
) -> Result<PlaceholderObject, AssetError> {
    let spec = catalog.spec(kind)?;
    spec.check_params(params)?;
    let p = |name: &str| -> f64 {
        spec.param_index(name)
            .map(|i| params[i])
            .unwrap_or_else(|| panic!("archetype '{}' missing param '{name}'", spec.archetype))
    };
    let mut b = ProxyBuilder::new();
    match spec.archetype.as_str() {
        "box" => {
            let (w, d, h) = (p("width"), p("depth"), p("height"));
            let ix = b.add_box(vec3(-d / 2.0, -w / 2.0, 0.0), vec3(d / 2.0, w / 2.0, h));
            b.tag_face(ix, Face::NegZ, "base", 0);
            b.tag_face(ix, Face::PosZ, "top", 0);
            b.tag_face(ix, Face::PosX, "front", 0);
            b.tag_face(ix, Face::NegX, "back", 0);
            b.tag_face(ix, Face::PosY, "side", 0);
            b.tag_face(ix, Face::NegY, "side", 1);
        }
        "table" => {
            let (l, w, h, tt) = (p("length"), p("width"), p("height"), p("top_thickness"));
            let top = b.add_box(vec3(-l / 2.0, -w / 2.0, h - tt), vec3(l / 2.0, w / 2.0, h));
            b.tag_face(top, Face::PosZ, "top", 0);
            b.tag_face(top, Face::PosX, "side", 0);
            b.tag_face(top, Face::PosY, "side", 1);
            b.tag_face(top, Face::NegX, "side", 2);
            b.tag_face(top, Face::NegY, "side", 3);
            // Four legs inset from the corners.
            let leg = 0.06f64.min(l / 6.0).min(w / 6.0);
            let inset = leg * 0.5;
            let mut leg_tris = Vec::new();
            for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let cx = sx * (l / 2.0 - inset - leg / 2.0);
                let cy = sy * (w / 2.0 - inset - leg / 2.0);
                let ix = b.add_box(
                    vec3(cx - leg / 2.0, cy - leg / 2.0, 0.0),
                    vec3(cx + leg / 2.0, cy + leg / 2.0, h - tt),
                );
                leg_tris.extend(b.face_tris(ix, Face::NegZ));
            }
            // Contact footprint spans the whole top, resting on the legs.
            b.tag_free_plane(
                "base",
                0,
                vec3(0.0, 0.0, 0.0),
                vec3(0.0, 0.0, -1.0),
                vec![
                    vec3(-l / 2.0, -w / 2.0, 0.0),
                    vec3(-l / 2.0, w / 2.0, 0.0),
                    vec3(l / 2.0, w / 2.0, 0.0),
                    vec3(l / 2.0, -w / 2.0, 0.0),
                ],
                leg_tris,
            );
        }
        "seat" => {
            let (w, d, sh, bh) = (p("width"), p("depth"), p("seat_height"), p("back_height"));
            let bt = 0.1f64.min(d / 4.0);
            // Solid base; back panel on the -x side, front faces +x.
            let seat = b.add_box(vec3(-d / 2.0, -w / 2.0, 0.0), vec3(d / 2.0, w / 2.0, sh));
            b.tag_face(seat, Face::NegZ, "base", 0);
            b.tag_face(seat, Face::PosX, "front", 0);
            b.tag_face(seat, Face::PosZ, "seat", 0);
            let back = b.add_box(
                vec3(-d / 2.0, -w / 2.0, sh),
                vec3(-d / 2.0 + bt, w / 2.0, bh),
            );
            b.tag_face(back, Face::NegX, "back", 0);
        }
        "shelf" => {
            let (w, d, h) = (p("width"), p("depth"), p("height"));
            let cells = p("cells").round().max(1.0) as u32;
            let t = 0.02;
            // Side panels along y, back panel at -x; rows open toward +x.
            let left = b.add_box(vec3(-d / 2.0, -w / 2.0, 0.0), vec3(d / 2.0, -w / 2.0 + t, h));
            let _right = b.add_box(vec3(-d / 2.0, w / 2.0 - t, 0.0), vec3(d / 2.0, w / 2.0, h));
            let back = b.add_box(vec3(-d / 2.0, -w / 2.0, 0.0), vec3(-d / 2.0 + t, w / 2.0, h));
            b.tag_face(back, Face::NegX, "back", 0);
            let cell_h = h / (cells as f64 + 1.0);
            for k in 0..=cells {
                let z = (k as f64) * cell_h;
                let board = b.add_box(
                    vec3(-d / 2.0, -w / 2.0 + t, z),
                    vec3(d / 2.0, w / 2.0 - t, z + t),
                );
                if k < cells {
                    b.tag_face(board, Face::PosZ, "shelf", k);
                } else {
                    b.tag_face(board, Face::PosZ, "top", 0);
                }
            }
            b.tag_free_plane(
                "base",
                0,
                vec3(0.0, 0.0, 0.0),
                vec3(0.0, 0.0, -1.0),
                vec![
                    vec3(-d / 2.0, -w / 2.0, 0.0),
                    vec3(-d / 2.0, w / 2.0, 0.0),
                    vec3(d / 2.0, w / 2.0, 0.0),
                    vec3(d / 2.0, -w / 2.0, 0.0),
                ],
                b.face_tris(left, Face::NegZ),
            );
        }
        "slab" => {
            // Wall-mounted panel: back at x = 0, faces +x.
            let (w, h, t) = (p("width"), p("height"), p("thickness"));
            let ix = b.add_box(vec3(0.0, -w / 2.0, 0.0), vec3(t, w / 2.0, h));
            b.tag_face(ix, Face::NegX, "back", 0);
            b.tag_face(ix, Face::PosX, "front", 0);
        }
        "cylinder" => {
            let (r, h) = (p("radius"), p("height"));
            b.add_prism(vec3(0.0, 0.0, 0.0), r, h, 12);
        }
        "rug" => {
            let (l, w) = (p("length"), p("width"));
            let ix = b.add_box(vec3(-l / 2.0, -w / 2.0, 0.0), vec3(l / 2.0, w / 2.0, 0.01));
            b.tag_face(ix, Face::NegZ, "base", 0);
            b.tag_face(ix, Face::PosZ, "top", 0);
        }
        "bed" => {
            let (l, w, h) = (p("length"), p("width"), p("height"));
            let ht = 0.08;
            let mattress = b.add_box(vec3(-l / 2.0, -w / 2.0, 0.0), vec3(l / 2.0, w / 2.0, h));
            b.tag_face(mattress, Face::NegZ, "base", 0);
            b.tag_face(mattress, Face::PosZ, "top", 0);
            b.tag_face(mattress, Face::PosX, "front", 0);
            let head = b.add_box(
                vec3(-l / 2.0 - ht, -w / 2.0, 0.0),
                vec3(-l / 2.0, w / 2.0, h + 0.5),
            );
            b.tag_face(head, Face::NegX, "back", 0);
        }
        other => {
            return Err(AssetError::Catalog(format!("unknown archetype '{other}'")));
        }
    }
    Ok(b.build()?)
}
