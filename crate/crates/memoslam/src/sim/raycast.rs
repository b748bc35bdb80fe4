//! Ground-truth rendering: nearest ray-primitive intersection per pixel with
//! flat Lambert shading off a fixed light direction.

use super::{camera_pose, Frame, InstanceObservation, SceneScript};
use crate::error::Result;
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed scene light, pointing from the light toward the scene.
pub const LIGHT_DIR: [f64; 3] = [0.35, -0.85, 0.4];
const AMBIENT: f64 = 0.35;

struct Hit {
    t: f64,
    normal: Vector3<f64>,
    albedo: [f64; 3],
    id: u32,
}

/// Distance to the interior of an axis-aligned box seen from inside, plus the
/// wall index (0..6 for -x,+x,-y,+y,-z,+z).
fn room_exit(
    room: &crate::diff::Aabb,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
) -> Option<(f64, usize)> {
    let mut best = f64::INFINITY;
    let mut wall = 0;
    for a in 0..3 {
        if dir[a].abs() < 1e-15 {
            continue;
        }
        let (face, idx) = if dir[a] > 0.0 {
            (room.max[a], 2 * a + 1)
        } else {
            (room.min[a], 2 * a)
        };
        let t = (face - origin[a]) / dir[a];
        if t > 0.0 && t < best {
            best = t;
            wall = idx;
        }
    }
    best.is_finite().then_some((best, wall))
}

/// Slab-method intersection with a box centered at `center`.
fn hit_box(
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    center: &Vector3<f64>,
    half: &Vector3<f64>,
) -> Option<(f64, Vector3<f64>)> {
    let mut t0 = 1e-9;
    let mut t1 = f64::INFINITY;
    let mut axis_in = 0usize;
    for a in 0..3 {
        let (lo, hi) = (center[a] - half[a], center[a] + half[a]);
        if dir[a].abs() < 1e-15 {
            if origin[a] < lo || origin[a] > hi {
                return None;
            }
            continue;
        }
        let inv = 1.0 / dir[a];
        let (mut ta, mut tb) = ((lo - origin[a]) * inv, (hi - origin[a]) * inv);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        if ta > t0 {
            t0 = ta;
            axis_in = a;
        }
        t1 = t1.min(tb);
    }
    if t0 > t1 {
        return None;
    }
    let p = origin + dir * t0;
    let mut normal = Vector3::zeros();
    normal[axis_in] = if p[axis_in] > center[axis_in] { 1.0 } else { -1.0 };
    Some((t0, normal))
}

fn hit_sphere(
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    center: &Vector3<f64>,
    radius: f64,
) -> Option<(f64, Vector3<f64>)> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_squared() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t = if -b - sq > 1e-9 {
        -b - sq
    } else if -b + sq > 1e-9 {
        -b + sq
    } else {
        return None;
    };
    let normal = (origin + dir * t - center).normalize();
    Some((t, normal))
}

fn shade(albedo: &[f64; 3], normal: &Vector3<f64>, light: &Vector3<f64>) -> [f64; 3] {
    let lit = (-normal.dot(light)).max(0.0);
    let k = AMBIENT + (1.0 - AMBIENT) * lit;
    [albedo[0] * k, albedo[1] * k, albedo[2] * k]
}

/// Quantize color to 8-bit steps so in-memory frames match what a PPM
/// round-trip produces.
#[inline]
fn quantize(c: f64) -> f64 {
    (c.clamp(0.0, 1.0) * 255.0).round() / 255.0
}

/// Renders frame `t` of the script: per-pixel nearest ray-primitive
/// intersection gives depth, Lambert-shaded color, and instance id.
pub fn render_ground_truth(script: &SceneScript, t: usize) -> Result<Frame> {
    script.intrinsics.validate()?;
    if t >= script.n_frames {
        return Err(crate::error::Error::contract(format!(
            "frame index {t} outside sequence of {}",
            script.n_frames
        )));
    }
    let tf = t as f64;
    let pose = camera_pose(script, tf);
    let intr = &script.intrinsics;
    let (w, h) = (intr.width, intr.height);
    let light = Vector3::new(LIGHT_DIR[0], LIGHT_DIR[1], LIGHT_DIR[2]).normalize();

    // positions of all objects alive at this frame
    let alive: Vec<(usize, Vector3<f64>)> = script
        .objects
        .iter()
        .enumerate()
        .filter(|(_, o)| o.alive_at(tf))
        .map(|(i, o)| (i, o.position_at(tf)))
        .collect();

    let mut color = vec![0.0; w * h * 3];
    let mut depth = vec![0.0; w * h];
    let mut ids = vec![0u32; w * h];
    let origin = pose.translation;

    for v in 0..h {
        for u in 0..w {
            let dir = pose.rotate(&intr.pixel_dir(u as f64, v as f64)).normalize();
            let mut hit: Option<Hit> = room_exit(&script.room, &origin, &dir).map(|(tw, wall)| {
                let mut normal = Vector3::zeros();
                normal[wall / 2] = if wall % 2 == 0 { 1.0 } else { -1.0 };
                Hit {
                    t: tw,
                    normal,
                    albedo: script.wall_colors[wall],
                    id: 0,
                }
            });
            for (oi, pos) in &alive {
                let obj = &script.objects[*oi];
                let res = match obj.shape {
                    super::Shape::Box { half_extents } => {
                        hit_box(&origin, &dir, pos, &half_extents)
                    }
                    super::Shape::Sphere { radius } => hit_sphere(&origin, &dir, pos, radius),
                };
                if let Some((th, normal)) = res {
                    if hit.as_ref().is_none_or(|h| th < h.t) {
                        hit = Some(Hit {
                            t: th,
                            normal,
                            albedo: obj.color,
                            id: obj.id,
                        });
                    }
                }
            }
            let pi = v * w + u;
            if let Some(hh) = hit {
                let c = shade(&hh.albedo, &hh.normal, &light);
                color[pi * 3] = quantize(c[0]);
                color[pi * 3 + 1] = quantize(c[1]);
                color[pi * 3 + 2] = quantize(c[2]);
                depth[pi] = hh.t;
                ids[pi] = hh.id;
            }
        }
    }

    if script.depth_noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(script.seed, 0xDE9, t as u64));
        for d in depth.iter_mut() {
            if *d > 0.0 {
                *d = (*d + script.depth_noise_sigma * standard_normal(&mut rng)).max(1e-3);
            }
        }
    }
    // round through f32 so in-memory depth matches the on-disk raster exactly
    for d in depth.iter_mut() {
        *d = *d as f32 as f64;
    }

    let model = script.embedding_model();
    let mut instances = Vec::new();
    for (oi, pos) in &alive {
        let obj = &script.objects[*oi];
        let pixels: Vec<u32> = ids
            .iter()
            .enumerate()
            .filter(|(_, id)| **id == obj.id)
            .map(|(i, _)| i as u32)
            .collect();
        if pixels.is_empty() {
            continue;
        }
        instances.push(InstanceObservation {
            id: obj.id,
            pixels,
            embedding: model.make_embedding(obj.effective_embedding_id(), t),
            center: *pos,
        });
    }
    instances.sort_by_key(|o| o.id);

    Ok(Frame {
        t,
        width: w,
        height: h,
        color,
        depth,
        pose,
        ids,
        instances,
    })
}

pub(crate) fn mix_seed(seed: u64, salt: u64, x: u64) -> u64 {
    // splitmix64 over the concatenated words
    let mut z = seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(salt.wrapping_mul(0xBF58476D1CE4E5B9))
        .wrapping_add(x.wrapping_mul(0x94D049BB133111EB));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

pub(crate) fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::pose::Pose;

    fn wall_test_script() -> SceneScript {
        // camera at origin looking along +z at a wall 2 m away
        SceneScript {
            room: Aabb::new(Vector3::new(-3.0, -3.0, -1.0), Vector3::new(3.0, 3.0, 2.0)),
            wall_colors: scenarios::WALL_PALETTE,
            objects: vec![],
            camera: vec![CameraKeypose {
                t: 0.0,
                pose: Pose::identity(),
            }],
            n_frames: 1,
            intrinsics: Intrinsics {
                fx: 90.0,
                fy: 90.0,
                cx: 80.0,
                cy: 60.0,
                width: 160,
                height: 120,
            },
            embedding_dim: 16,
            embedding_sigma: 0.0,
            depth_noise_sigma: 0.0,
            seed: 1,
        }
    }

    #[test]
    fn center_pixel_sees_wall_at_two_meters() {
        let frame = render_ground_truth(&wall_test_script(), 0).unwrap();
        let d = frame.depth_at(80, 60);
        assert!((d - 2.0).abs() < 1e-6, "depth {d}");
        assert_eq!(frame.ids[frame.pixel_index(80, 60)], 0);
    }

    #[test]
    fn sphere_ahead_gives_center_depth_minus_radius() {
        let mut script = wall_test_script();
        script.room.max.z = 4.0;
        script.objects.push(ObjectScript {
            id: 3,
            shape: Shape::Sphere { radius: 0.5 },
            color: [0.8, 0.2, 0.2],
            category: "ball".into(),
            embedding_id: None,
            track: vec![TrackPoint {
                t: 0.0,
                position: Vector3::new(0.0, 0.0, 3.0),
            }],
            appear: 0.0,
            vanish: 1.0,
        });
        let frame = render_ground_truth(&script, 0).unwrap();
        let d = frame.depth_at(80, 60);
        assert!((d - 2.5).abs() < 1e-6, "depth {d}");
        assert_eq!(frame.ids[frame.pixel_index(80, 60)], 3);
        assert_eq!(frame.instances.len(), 1);
        assert_eq!(frame.instances[0].id, 3);
        assert!(!frame.instances[0].pixels.is_empty());
    }

    #[test]
    fn degenerate_intrinsics_rejected() {
        let mut script = wall_test_script();
        script.intrinsics.fx = -1.0;
        assert!(matches!(
            render_ground_truth(&script, 0),
            Err(crate::error::Error::Config(_))
        ));
    }

    #[test]
    fn objects_outside_existence_interval_are_absent() {
        let mut script = wall_test_script();
        script.n_frames = 4;
        script.room.max.z = 4.0;
        script.objects.push(ObjectScript {
            id: 3,
            shape: Shape::Sphere { radius: 0.5 },
            color: [0.8, 0.2, 0.2],
            category: "ball".into(),
            embedding_id: None,
            track: vec![TrackPoint {
                t: 0.0,
                position: Vector3::new(0.0, 0.0, 3.0),
            }],
            appear: 1.0,
            vanish: 3.0,
        });
        let f0 = render_ground_truth(&script, 0).unwrap();
        assert!(f0.instances.is_empty());
        assert!((f0.depth_at(80, 60) - 4.0).abs() < 1e-5);
        let f1 = render_ground_truth(&script, 1).unwrap();
        assert_eq!(f1.instances.len(), 1);
        let f3 = render_ground_truth(&script, 3).unwrap();
        assert!(f3.instances.is_empty());
    }

    #[test]
    fn every_nonzero_id_has_exactly_one_observation() {
        let script = scenarios::scenario("walking", 5).unwrap();
        let frame = render_ground_truth(&script, 0).unwrap();
        let mut seen: Vec<u32> = frame.ids.iter().copied().filter(|id| *id != 0).collect();
        seen.sort_unstable();
        seen.dedup();
        let inst_ids: Vec<u32> = frame.instances.iter().map(|o| o.id).collect();
        assert_eq!(seen, inst_ids);
        // depth positive everywhere in a closed room
        assert!(frame.depth.iter().all(|d| *d > 0.0));
    }

    #[test]
    fn rendering_is_deterministic() {
        let script = scenarios::scenario("walking", 9).unwrap();
        let a = render_ground_truth(&script, 7).unwrap();
        let b = render_ground_truth(&script, 7).unwrap();
        assert_eq!(a, b);
    }
}
