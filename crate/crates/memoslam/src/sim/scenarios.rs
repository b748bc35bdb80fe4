//! The shipped scenario library. Each scenario mimics a class of dynamic
//! RGB-D sequences: people walking through the view, an object removed from
//! the scene, an object moved to a new rest position, a crowd filling the
//! frame from the start, and a fully static baseline.

use super::{CameraKeypose, Intrinsics, ObjectScript, SceneScript, Shape, TrackPoint};
use crate::diff::Aabb;
use crate::error::{Error, Result};
use crate::pose::Pose;
use nalgebra::{UnitQuaternion, Vector3};

/// Wall albedos for -x, +x, -y (floor), +y (ceiling), -z, +z.
pub const WALL_PALETTE: [[f64; 3]; 6] = [
    [0.75, 0.55, 0.35],
    [0.35, 0.55, 0.75],
    [0.45, 0.45, 0.45],
    [0.85, 0.85, 0.80],
    [0.55, 0.70, 0.45],
    [0.70, 0.65, 0.50],
];

pub const SCENARIO_NAMES: [&str; 5] =
    ["static", "walking", "kidnapping_box", "replace_box", "crowd"];

const N_FRAMES: usize = 200;

fn room() -> Aabb {
    Aabb::new(Vector3::new(-3.0, -1.5, -3.0), Vector3::new(3.0, 1.5, 3.0))
}

fn intrinsics() -> Intrinsics {
    Intrinsics {
        fx: 90.0,
        fy: 90.0,
        cx: 80.0,
        cy: 60.0,
        width: 160,
        height: 120,
    }
}

fn cam(t: f64, x: f64, y: f64, z: f64, yaw_deg: f64) -> CameraKeypose {
    let rot = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), yaw_deg.to_radians());
    CameraKeypose {
        t,
        pose: Pose::new(rot, Vector3::new(x, y, z)),
    }
}

fn still(
    id: u32,
    shape: Shape,
    color: [f64; 3],
    category: &str,
    pos: Vector3<f64>,
) -> ObjectScript {
    ObjectScript {
        id,
        shape,
        color,
        category: category.into(),
        embedding_id: None,
        track: vec![TrackPoint { t: 0.0, position: pos }],
        appear: 0.0,
        vanish: N_FRAMES as f64,
    }
}

fn person(id: u32, color: [f64; 3], track: Vec<(f64, f64, f64)>) -> ObjectScript {
    ObjectScript {
        id,
        shape: Shape::Box {
            half_extents: Vector3::new(0.22, 0.85, 0.18),
        },
        color,
        category: "person".into(),
        embedding_id: None,
        track: track
            .into_iter()
            .map(|(t, x, z)| TrackPoint {
                t,
                position: Vector3::new(x, -0.65, z),
            })
            .collect(),
        appear: 0.0,
        vanish: N_FRAMES as f64,
    }
}

fn furniture() -> Vec<ObjectScript> {
    vec![
        still(
            1,
            Shape::Box {
                half_extents: Vector3::new(0.3, 0.4, 0.3),
            },
            [0.20, 0.60, 0.60],
            "furniture",
            Vector3::new(2.5, -1.1, 0.9),
        ),
        still(
            2,
            Shape::Box {
                half_extents: Vector3::new(0.35, 0.5, 0.35),
            },
            [0.65, 0.45, 0.25],
            "furniture",
            Vector3::new(-2.45, -1.0, 1.5),
        ),
        still(
            3,
            Shape::Sphere { radius: 0.45 },
            [0.70, 0.20, 0.25],
            "ball",
            Vector3::new(-1.9, -1.05, 2.55),
        ),
        still(
            4,
            Shape::Box {
                half_extents: Vector3::new(0.25, 0.7, 0.25),
            },
            [0.30, 0.30, 0.65],
            "furniture",
            Vector3::new(1.9, -0.8, 2.65),
        ),
    ]
}

fn base_script(seed: u64) -> SceneScript {
    SceneScript {
        room: room(),
        wall_colors: WALL_PALETTE,
        objects: vec![],
        camera: vec![],
        n_frames: N_FRAMES,
        intrinsics: intrinsics(),
        embedding_dim: 16,
        embedding_sigma: 0.05,
        depth_noise_sigma: 0.0,
        seed,
    }
}

fn static_scenario(seed: u64) -> SceneScript {
    let mut s = base_script(seed);
    s.objects = furniture();
    s.camera = vec![
        cam(0.0, -0.7, 0.20, -2.30, -6.0),
        cam(100.0, 0.1, 0.15, -2.10, 2.0),
        cam(199.0, 0.8, 0.25, -2.25, 8.0),
    ];
    s
}

/// Three people proxies: A walks through the view early and leaves, B and C
/// stand still and start walking mid-sequence. Exercises flagging, keyframe
/// mask recomputation, and map forgetting of the early mover.
fn walking_scenario(seed: u64) -> SceneScript {
    let mut s = static_scenario(seed);
    // A: moves from frame 0, exits the camera view around frame 78 and parks
    // in the far corner behind the camera.
    s.objects.push(person(
        100,
        [0.80, 0.30, 0.20],
        vec![
            (0.0, -1.9, 1.7),
            (70.0, 1.7, 1.45),
            (82.0, 2.65, -1.2),
            (95.0, 2.65, -2.4),
        ],
    ));
    // B: still until frame 100, then keeps walking to the end.
    s.objects.push(person(
        101,
        [0.25, 0.55, 0.25],
        vec![
            (0.0, 1.25, 2.1),
            (100.0, 1.25, 2.1),
            (140.0, -0.6, 2.3),
            (199.0, -1.1, 2.0),
        ],
    ));
    // C: still until frame 150, then walks.
    s.objects.push(person(
        102,
        [0.60, 0.50, 0.15],
        vec![(0.0, -0.9, 2.75), (150.0, -0.9, 2.75), (199.0, 0.9, 2.75)],
    ));
    s
}

/// A box observed as static for 100 frames, then removed from the scene while
/// the camera keeps looking at its spot.
fn kidnapping_scenario(seed: u64) -> SceneScript {
    let mut s = base_script(seed);
    s.objects = vec![
        furniture()[1].clone(),
        furniture()[2].clone(),
        still(
            4,
            Shape::Box {
                half_extents: Vector3::new(0.25, 0.7, 0.25),
            },
            [0.30, 0.30, 0.65],
            "furniture",
            Vector3::new(-0.6, -0.8, 2.7),
        ),
    ];
    let mut boxed = still(
        50,
        Shape::Box {
            half_extents: Vector3::new(0.3, 0.35, 0.25),
        },
        [0.85, 0.65, 0.15],
        "box",
        Vector3::new(0.8, -1.15, 1.9),
    );
    boxed.vanish = 100.0;
    s.objects.push(boxed);
    s.camera = vec![
        cam(0.0, -0.4, 0.20, -2.30, -2.0),
        cam(100.0, 0.1, 0.20, -2.20, 2.0),
        cam(199.0, 0.5, 0.15, -2.30, 5.0),
    ];
    s
}

/// A box is kidnapped from its observed rest position and reappears at a new
/// rest position in a region the camera only pans onto afterwards. The two
/// script objects share one embedding identity.
fn replace_scenario(seed: u64) -> SceneScript {
    let mut s = base_script(seed);
    s.objects = vec![
        still(
            1,
            Shape::Box {
                half_extents: Vector3::new(0.3, 0.4, 0.3),
            },
            [0.20, 0.60, 0.60],
            "furniture",
            Vector3::new(-0.9, -1.1, 2.6),
        ),
        still(
            3,
            Shape::Sphere { radius: 0.45 },
            [0.70, 0.20, 0.25],
            "ball",
            Vector3::new(0.9, -1.05, 2.45),
        ),
        still(
            4,
            Shape::Box {
                half_extents: Vector3::new(0.25, 0.7, 0.25),
            },
            [0.30, 0.30, 0.65],
            "furniture",
            Vector3::new(2.0, -0.8, 2.3),
        ),
    ];
    // old rest position, observed from the start, removed at frame 70
    let mut old_box = still(
        60,
        Shape::Box {
            half_extents: Vector3::new(0.28, 0.4, 0.22),
        },
        [0.85, 0.55, 0.20],
        "box",
        Vector3::new(-2.0, -1.1, 2.2),
    );
    old_box.vanish = 70.0;
    s.objects.push(old_box);
    // same physical box at the new rest position, present from frame 85,
    // inside the region the camera pans onto from ~frame 115
    let mut new_box = still(
        61,
        Shape::Box {
            half_extents: Vector3::new(0.28, 0.4, 0.22),
        },
        [0.85, 0.55, 0.20],
        "box",
        Vector3::new(2.35, -1.1, 0.9),
    );
    new_box.appear = 85.0;
    new_box.embedding_id = Some(60);
    s.objects.push(new_box);
    s.camera = vec![
        cam(0.0, -0.3, 0.20, -2.30, -14.0),
        cam(100.0, 0.0, 0.20, -2.25, -14.0),
        cam(112.0, 0.05, 0.20, -2.25, -11.5),
        cam(160.0, 0.3, 0.20, -2.30, 22.0),
        cam(199.0, 0.35, 0.20, -2.30, 24.0),
    ];
    s
}

/// Three large people proxies close to the camera, moving from frame 0 and
/// covering a large share of the first frame.
fn crowd_scenario(seed: u64) -> SceneScript {
    let mut s = base_script(seed);
    let mover = |id: u32, color: [f64; 3], track: Vec<(f64, f64, f64)>| ObjectScript {
        id,
        shape: Shape::Box {
            half_extents: Vector3::new(0.36, 0.85, 0.20),
        },
        color,
        category: "person".into(),
        embedding_id: None,
        track: track
            .into_iter()
            .map(|(t, x, z)| TrackPoint {
                t,
                position: Vector3::new(x, -0.65, z),
            })
            .collect(),
        appear: 0.0,
        vanish: N_FRAMES as f64,
    };
    s.objects = vec![
        still(
            2,
            Shape::Box {
                half_extents: Vector3::new(0.35, 0.5, 0.35),
            },
            [0.65, 0.45, 0.25],
            "furniture",
            Vector3::new(-2.2, -1.0, 1.6),
        ),
        still(
            3,
            Shape::Sphere { radius: 0.45 },
            [0.70, 0.20, 0.25],
            "ball",
            Vector3::new(2.0, -1.05, 1.9),
        ),
        still(
            4,
            Shape::Box {
                half_extents: Vector3::new(0.25, 0.7, 0.25),
            },
            [0.30, 0.30, 0.65],
            "furniture",
            Vector3::new(0.3, -0.8, 2.6),
        ),
        mover(
            110,
            [0.80, 0.30, 0.20],
            vec![
                (0.0, -0.75, -1.15),
                (45.0, 0.85, -1.15),
                (100.0, -0.5, -1.15),
                (150.0, 0.6, -1.15),
                (199.0, -0.3, -1.15),
            ],
        ),
        mover(
            111,
            [0.25, 0.55, 0.25],
            vec![
                (0.0, 0.25, -0.65),
                (40.0, -1.0, -0.65),
                (95.0, 0.9, -0.65),
                (160.0, -0.7, -0.65),
                (199.0, 0.2, -0.65),
            ],
        ),
        mover(
            112,
            [0.60, 0.50, 0.15],
            vec![
                (0.0, 0.9, -0.15),
                (55.0, -0.8, -0.15),
                (120.0, 1.1, -0.15),
                (199.0, -0.2, -0.15),
            ],
        ),
    ];
    s.camera = vec![
        cam(0.0, 0.0, 0.20, -2.40, 0.0),
        cam(199.0, 0.3, 0.20, -2.30, 3.0),
    ];
    s
}

/// Builds a shipped scenario by name.
pub fn scenario(name: &str, seed: u64) -> Result<SceneScript> {
    let script = match name {
        "static" => static_scenario(seed),
        "walking" => walking_scenario(seed),
        "kidnapping_box" => kidnapping_scenario(seed),
        "replace_box" => replace_scenario(seed),
        "crowd" => crowd_scenario(seed),
        other => {
            return Err(Error::Config(format!(
                "unknown scenario '{other}' (available: {})",
                SCENARIO_NAMES.join(", ")
            )))
        }
    };
    script.validate()?;
    Ok(script)
}
