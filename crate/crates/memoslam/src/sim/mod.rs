//! Synthetic dynamic RGB-D world: scripted rigid primitives inside a room,
//! ground-truth rendering by ray casting, and the per-instance segmentation /
//! embedding oracle that stands in for a learned segmenter and encoder.

pub mod embed;
pub mod raycast;
pub mod scenarios;

pub use embed::EmbeddingNoiseModel;
pub use raycast::render_ground_truth;

use crate::diff::Aabb;
use crate::error::{Error, Result};
use crate::pose::{interpolate_pose, Pose};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Pinhole camera intrinsics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Intrinsics {
    pub fn validate(&self) -> Result<()> {
        if self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(Error::Config(format!(
                "degenerate intrinsics: fx={}, fy={}",
                self.fx, self.fy
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("zero image size".into()));
        }
        Ok(())
    }

    /// Camera-frame ray direction through pixel (u, v), not normalized.
    #[inline]
    pub fn pixel_dir(&self, u: f64, v: f64) -> Vector3<f64> {
        Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    #[serde(rename = "box")]
    Box { half_extents: Vector3<f64> },
    #[serde(rename = "sphere")]
    Sphere { radius: f64 },
}

impl Shape {
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Shape::Box { half_extents } => half_extents.norm(),
            Shape::Sphere { radius } => *radius,
        }
    }

    /// Half extent along one axis (exact for boxes and spheres).
    pub fn half_extent(&self, axis: usize) -> f64 {
        match self {
            Shape::Box { half_extents } => half_extents[axis],
            Shape::Sphere { radius } => *radius,
        }
    }
}

/// A position keypoint on an object's piecewise-linear motion track.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub position: Vector3<f64>,
}

/// One scripted rigid primitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectScript {
    pub id: u32,
    pub shape: Shape,
    pub color: [f64; 3],
    /// Semantic category tag, used only to designate classes for prior
    /// pre-training (e.g. "person").
    pub category: String,
    /// Instance identity for embedding purposes. Defaults to `id`; setting it
    /// to another object's id makes both carry the same embedding base, which
    /// models one physical object that disappears and reappears elsewhere.
    #[serde(default)]
    pub embedding_id: Option<u32>,
    /// Piecewise-linear keypositions over frame time; clamped outside the span.
    pub track: Vec<TrackPoint>,
    /// Existence interval `[appear, vanish)` in frame time.
    pub appear: f64,
    pub vanish: f64,
}

impl ObjectScript {
    pub fn position_at(&self, t: f64) -> Vector3<f64> {
        piecewise_position(&self.track, t)
    }

    pub fn effective_embedding_id(&self) -> u32 {
        self.embedding_id.unwrap_or(self.id)
    }

    pub fn alive_at(&self, t: f64) -> bool {
        t >= self.appear && t < self.vanish
    }

    /// True if the track ever moves (a designated mover for ground truth).
    pub fn is_mover(&self) -> bool {
        self.track
            .windows(2)
            .any(|w| (w[0].position - w[1].position).norm() > 1e-9)
    }
}

fn piecewise_position(track: &[TrackPoint], t: f64) -> Vector3<f64> {
    assert!(!track.is_empty());
    if t <= track[0].t {
        return track[0].position;
    }
    for w in track.windows(2) {
        if t <= w[1].t {
            let s = (t - w[0].t) / (w[1].t - w[0].t);
            return w[0].position.lerp(&w[1].position, s);
        }
    }
    track.last().unwrap().position
}

/// A camera keypose on the scripted trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraKeypose {
    pub t: f64,
    pub pose: Pose,
}

/// Full description of a synthetic sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneScript {
    /// The room interior; walls are the box faces seen from inside.
    pub room: Aabb,
    /// Albedo per wall face: -x, +x, -y, +y, -z, +z.
    pub wall_colors: [[f64; 3]; 6],
    pub objects: Vec<ObjectScript>,
    pub camera: Vec<CameraKeypose>,
    pub n_frames: usize,
    pub intrinsics: Intrinsics,
    /// Dimension of oracle instance embeddings.
    pub embedding_dim: usize,
    /// Per-observation Gaussian perturbation of embeddings.
    pub embedding_sigma: f64,
    /// Optional Gaussian depth noise (meters); 0 disables it.
    pub depth_noise_sigma: f64,
    pub seed: u64,
}

impl SceneScript {
    /// Checks the script invariants: tracks inside the room, strictly
    /// increasing keypose times, existence intervals within the sequence.
    pub fn validate(&self) -> Result<()> {
        self.intrinsics.validate()?;
        if self.camera.is_empty() || self.n_frames == 0 {
            return Err(Error::Config("empty camera trajectory or sequence".into()));
        }
        for w in self.camera.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::Config("camera keypose times must increase".into()));
            }
        }
        for obj in &self.objects {
            if obj.track.is_empty() {
                return Err(Error::Config(format!("object {} has no track", obj.id)));
            }
            for w in obj.track.windows(2) {
                if w[1].t <= w[0].t {
                    return Err(Error::Config(format!(
                        "object {} keypose times must increase",
                        obj.id
                    )));
                }
            }
            for p in &obj.track {
                for a in 0..3 {
                    let r = obj.shape.half_extent(a);
                    if p.position[a] - r < self.room.min[a] - 1e-9
                        || p.position[a] + r > self.room.max[a] + 1e-9
                    {
                        return Err(Error::Config(format!(
                            "object {} leaves the room at t={}",
                            obj.id, p.t
                        )));
                    }
                }
            }
            if obj.appear < 0.0 || obj.vanish > self.n_frames as f64 || obj.vanish <= obj.appear {
                return Err(Error::Config(format!(
                    "object {} existence interval [{}, {}) outside [0, {})",
                    obj.id, obj.appear, obj.vanish, self.n_frames
                )));
            }
        }
        let mut ids: Vec<u32> = self.objects.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.objects.len() {
            return Err(Error::Config("duplicate object ids".into()));
        }
        if ids.contains(&0) {
            return Err(Error::Config("object id 0 is reserved for background".into()));
        }
        Ok(())
    }

    pub fn embedding_model(&self) -> EmbeddingNoiseModel {
        EmbeddingNoiseModel {
            seed: self.seed,
            dim: self.embedding_dim,
            sigma: self.embedding_sigma,
            renormalize: true,
        }
    }

    pub fn object(&self, id: u32) -> Option<&ObjectScript> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Ids of objects whose category is in `categories`.
    pub fn ids_of_categories(&self, categories: &[String]) -> Vec<u32> {
        self.objects
            .iter()
            .filter(|o| categories.iter().any(|c| c == &o.category))
            .map(|o| o.id)
            .collect()
    }

    /// Ids of designated movers (objects with non-constant tracks).
    pub fn mover_ids(&self) -> Vec<u32> {
        self.objects
            .iter()
            .filter(|o| o.is_mover())
            .map(|o| o.id)
            .collect()
    }
}

/// Ground-truth camera pose at frame time `t` (clamped to the trajectory span).
pub fn camera_pose(script: &SceneScript, t: f64) -> Pose {
    let keys = &script.camera;
    if t <= keys[0].t {
        return keys[0].pose;
    }
    for w in keys.windows(2) {
        if t <= w[1].t {
            let s = (t - w[0].t) / (w[1].t - w[0].t);
            return interpolate_pose(&w[0].pose, &w[1].pose, s);
        }
    }
    keys.last().unwrap().pose
}

/// One oracle-segmented instance in a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceObservation {
    pub id: u32,
    /// Flat pixel indices (v * width + u) covered by this instance.
    pub pixels: Vec<u32>,
    /// Unit-norm embedding vector for this observation.
    pub embedding: Vec<f64>,
    /// Object center in world coordinates.
    pub center: Vector3<f64>,
}

impl InstanceObservation {
    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }
}

/// One rendered RGB-D observation with oracle annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: usize,
    pub width: usize,
    pub height: usize,
    /// Row-major RGB in [0,1], quantized to 8-bit steps.
    pub color: Vec<f64>,
    /// Distance from the camera center along each pixel ray (meters); 0 = invalid.
    pub depth: Vec<f64>,
    /// Ground-truth camera-to-world pose.
    pub pose: Pose,
    /// Per-pixel instance id; 0 = background (room walls).
    pub ids: Vec<u32>,
    pub instances: Vec<InstanceObservation>,
}

impl Frame {
    #[inline]
    pub fn pixel_index(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    pub fn color_at(&self, u: usize, v: usize) -> [f64; 3] {
        let i = self.pixel_index(u, v) * 3;
        [self.color[i], self.color[i + 1], self.color[i + 2]]
    }

    pub fn depth_at(&self, u: usize, v: usize) -> f64 {
        self.depth[self.pixel_index(u, v)]
    }
}

/// An in-memory sequence: the script plus all rendered frames.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub script: SceneScript,
    pub frames: Vec<Frame>,
}

impl Dataset {
    /// Renders every frame of the script.
    pub fn generate(script: SceneScript) -> Result<Self> {
        script.validate()?;
        let frames = (0..script.n_frames)
            .map(|t| render_ground_truth(&script, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { script, frames })
    }

    pub fn gt_poses(&self) -> Vec<Pose> {
        self.frames.iter().map(|f| f.pose).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::Pose;

    fn minimal_script() -> SceneScript {
        SceneScript {
            room: Aabb::new(Vector3::new(-3.0, -1.5, -3.0), Vector3::new(3.0, 1.5, 3.0)),
            wall_colors: scenarios::WALL_PALETTE,
            objects: vec![],
            camera: vec![
                CameraKeypose {
                    t: 0.0,
                    pose: Pose::identity(),
                },
                CameraKeypose {
                    t: 10.0,
                    pose: Pose::new(
                        nalgebra::UnitQuaternion::identity(),
                        Vector3::new(1.0, 0.0, 0.0),
                    ),
                },
            ],
            n_frames: 11,
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
            seed: 7,
        }
    }

    #[test]
    fn camera_pose_hits_keyposes_exactly() {
        let script = minimal_script();
        let p0 = camera_pose(&script, 0.0);
        assert_eq!(p0.translation, Vector3::zeros());
        let p10 = camera_pose(&script, 10.0);
        assert_eq!(p10.translation, Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn camera_pose_midpoint_of_translations() {
        let script = minimal_script();
        let p = camera_pose(&script, 5.0);
        assert!((p.translation - Vector3::new(0.5, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn camera_pose_midpoint_of_rotation_pair_is_half_angle() {
        let mut script = minimal_script();
        let rot = nalgebra::UnitQuaternion::from_axis_angle(
            &Vector3::y_axis(),
            std::f64::consts::FRAC_PI_2,
        );
        script.camera[1].pose = Pose::new(rot, Vector3::zeros());
        let p = camera_pose(&script, 5.0);
        // quaternion slerp oracle: half of 90 degrees about the same axis
        let expect = nalgebra::UnitQuaternion::from_axis_angle(
            &Vector3::y_axis(),
            std::f64::consts::FRAC_PI_4,
        );
        assert!(p.rotation.angle_to(&expect) < 1e-12);
    }

    #[test]
    fn validation_rejects_track_outside_room() {
        let mut script = minimal_script();
        script.objects.push(ObjectScript {
            id: 1,
            shape: Shape::Sphere { radius: 0.5 },
            color: [1.0, 0.0, 0.0],
            category: "ball".into(),
            embedding_id: None,
            track: vec![TrackPoint {
                t: 0.0,
                position: Vector3::new(2.9, 0.0, 0.0),
            }],
            appear: 0.0,
            vanish: 11.0,
        });
        assert!(script.validate().is_err());
    }
}
