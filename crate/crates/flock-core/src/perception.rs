//! Per-agent local sensing: distance-band classification of flockmates and
//! intruders, bearing/distance measurements with rates, and the heading-
//! aligned probe fan used for obstacle and boundary detection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{Bounds, Polygon, Rotation2, Segment, Vec2, Vector, EPS_ZERO};

/// Concentric interaction radii. Flockmates are classified by distance band;
/// intruders by the surveillance radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZoneParams {
    pub repulsion: f64,
    pub conflict: f64,
    pub attraction: f64,
    pub surveillance: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ZoneError {
    #[error("repulsion radius must be positive, got {0}")]
    NonPositiveRepulsion(f64),
    #[error("zone radii must be ordered repulsion <= conflict <= attraction <= surveillance, got {0} > {1}")]
    Unordered(f64, f64),
}

impl ZoneParams {
    pub fn new(repulsion: f64, conflict: f64, attraction: f64, surveillance: f64) -> Result<Self, ZoneError> {
        let z = ZoneParams { repulsion, conflict, attraction, surveillance };
        z.validate()?;
        Ok(z)
    }

    /// Single-radius setup: conflict and surveillance collapse onto their
    /// inner neighbors.
    pub fn uniform(radius: f64) -> Result<Self, ZoneError> {
        Self::new(radius, radius, radius, radius)
    }

    pub fn validate(&self) -> Result<(), ZoneError> {
        if !(self.repulsion > 0.0) {
            return Err(ZoneError::NonPositiveRepulsion(self.repulsion));
        }
        for (lo, hi) in [
            (self.repulsion, self.conflict),
            (self.conflict, self.attraction),
            (self.attraction, self.surveillance),
        ] {
            if lo > hi {
                return Err(ZoneError::Unordered(lo, hi));
            }
        }
        Ok(())
    }
}

/// Ids of the neighbors falling in each band, plus intruders under watch.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighborSets {
    pub repulsion: Vec<usize>,
    pub conflict: Vec<usize>,
    pub attraction: Vec<usize>,
    pub surveillance: Vec<usize>,
}

impl NeighborSets {
    /// Repulsion plus conflict members: the set the separation rule acts on.
    pub fn near(&self) -> Vec<usize> {
        let mut v = self.repulsion.clone();
        v.extend_from_slice(&self.conflict);
        v
    }

    /// Conflict plus attraction members: the set cohesion/alignment act on.
    pub fn far(&self) -> Vec<usize> {
        let mut v = self.conflict.clone();
        v.extend_from_slice(&self.attraction);
        v
    }

    pub fn is_isolated(&self) -> bool {
        self.conflict.is_empty() && self.attraction.is_empty()
    }
}

/// Bands: repulsion d <= r, conflict r < d <= c, attraction c < d <= a.
/// Intruders join surveillance at any distance <= s by default;
/// `band_only` restricts membership to the a < d <= s band instead.
pub fn classify_neighbors<const D: usize>(
    self_pos: Vector<D>,
    flock: &[(usize, Vector<D>)],
    intruders: &[(usize, Vector<D>)],
    z: &ZoneParams,
    band_only: bool,
) -> NeighborSets {
    let mut sets = NeighborSets::default();
    for &(id, p) in flock {
        let d = (p - self_pos).norm();
        if d <= z.repulsion {
            sets.repulsion.push(id);
        } else if d <= z.conflict {
            sets.conflict.push(id);
        } else if d <= z.attraction {
            sets.attraction.push(id);
        }
    }
    for &(id, q) in intruders {
        let d = (q - self_pos).norm();
        let watched = if band_only {
            z.attraction < d && d <= z.surveillance
        } else {
            d <= z.surveillance
        };
        if watched {
            sets.surveillance.push(id);
        }
    }
    sets
}

/// Relative observation of one neighbor: unit bearing, range, and their
/// time derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairMeasurement<const D: usize> {
    pub bearing: Vector<D>,
    pub distance: f64,
    pub bearing_rate: Vector<D>,
    pub distance_rate: f64,
}

impl<const D: usize> PairMeasurement<D> {
    /// Reconstructs v_other − v_self from the measured rates. The bearing
    /// rate is tangent to the unit bearing, so the radial part comes back
    /// through the distance rate alone.
    pub fn relative_velocity(&self) -> Vector<D> {
        self.bearing_rate * self.distance + self.bearing * self.distance_rate
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("coincident agents: no bearing defined at separation <= {EPS_ZERO}")]
pub struct CoincidentAgents;

/// Exact bearing/distance observation from ground-truth kinematics.
pub fn measure_pair<const D: usize>(
    p_self: Vector<D>,
    v_self: Vector<D>,
    p_other: Vector<D>,
    v_other: Vector<D>,
) -> Result<PairMeasurement<D>, CoincidentAgents> {
    let rel = p_other - p_self;
    let distance = rel.norm();
    if distance <= EPS_ZERO {
        return Err(CoincidentAgents);
    }
    let bearing = rel / distance;
    let dvel = v_other - v_self;
    let distance_rate = bearing.dot(dvel);
    let bearing_rate = (dvel - bearing * distance_rate) / distance;
    Ok(PairMeasurement { bearing, distance, bearing_rate, distance_rate })
}

/// Deterministic stand-in bearing for physically overlapping agents.
/// Antisymmetric in the pair so both agents push apart along one line.
pub fn fallback_bearing<const D: usize>(id_self: usize, id_other: usize) -> Vector<D> {
    let (lo, hi) = if id_self <= id_other { (id_self, id_other) } else { (id_other, id_self) };
    // splitmix64 finalizer over the packed pair.
    let mut x = (lo as u64).wrapping_shl(32) ^ (hi as u64) ^ 0x9e37_79b9_7f4a_7c15;
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    let mut rng = ChaCha8Rng::seed_from_u64(x);
    let dir = loop {
        let mut v = Vector::<D>::ZERO;
        for k in 0..D {
            v[k] = rng.gen_range(-1.0..1.0);
        }
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            break v / n;
        }
    };
    if id_self <= id_other {
        dir
    } else {
        -dir
    }
}

/// Heading-aligned probe fan: a forward probe of length c plus two
/// perpendicular flanks of length alpha*c, all emanating from the agent.
#[derive(Clone, Copy, Debug)]
pub struct ReactionTriangle {
    pub heading: Segment,
    /// Clockwise perpendicular flank.
    pub cw: Segment,
    /// Counter-clockwise perpendicular flank.
    pub ccw: Segment,
    pub alpha: f64,
}

impl ReactionTriangle {
    pub fn probes(&self) -> [Segment; 3] {
        [self.heading, self.cw, self.ccw]
    }

    /// The two outline edges joining the forward tip to each flank tip, for
    /// the optional denser coverage mode.
    pub fn outline_edges(&self) -> [Segment; 2] {
        [
            Segment::new(self.heading.b, self.cw.b),
            Segment::new(self.heading.b, self.ccw.b),
        ]
    }
}

/// None when the agent has no usable heading (speed at or below EPS_ZERO).
pub fn build_reaction_triangle(pos: Vec2, vel: Vec2, c: f64, alpha: f64) -> Option<ReactionTriangle> {
    assert!(c > 0.0, "probe length must be positive, got {c}");
    assert!(alpha > 0.0 && alpha <= 1.0, "flank scale must be in (0, 1], got {alpha}");
    let speed = vel.norm();
    if speed <= EPS_ZERO {
        return None;
    }
    let h = vel * (c / speed);
    let cw = Rotation2::from_angle(-std::f64::consts::FRAC_PI_2).apply(h) * alpha;
    let ccw = Rotation2::from_angle(std::f64::consts::FRAC_PI_2).apply(h) * alpha;
    Some(ReactionTriangle {
        heading: Segment::new(pos, pos + h),
        cw: Segment::new(pos, pos + cw),
        ccw: Segment::new(pos, pos + ccw),
        alpha,
    })
}

/// What a probe ran into.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HitSource {
    Obstacle(usize),
    /// Wall index per Bounds::walls order.
    Wall(usize),
}

/// One detected source, reduced to the boundary point nearest the agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstacleHit {
    pub point: Vec2,
    pub distance: f64,
    pub source: HitSource,
}

/// All sources any probe touches, one entry per source, each reduced to the
/// nearest point on that source. Source order (obstacles, then walls) is
/// fixed for determinism.
pub fn detect_obstacle_hits(
    agent: Vec2,
    tri: &ReactionTriangle,
    obstacles: &[Polygon],
    bounds: Option<&Bounds<2>>,
    include_outline_edges: bool,
) -> Vec<ObstacleHit> {
    let mut segments: Vec<Segment> = tri.probes().to_vec();
    if include_outline_edges {
        segments.extend_from_slice(&tri.outline_edges());
    }
    let mut hits = Vec::new();
    for (idx, poly) in obstacles.iter().enumerate() {
        if segments.iter().any(|s| poly.first_crossing(*s).is_some()) {
            let point = poly.closest_boundary_point(agent);
            hits.push(ObstacleHit {
                point,
                distance: (point - agent).norm(),
                source: HitSource::Obstacle(idx),
            });
        }
    }
    if let Some(b) = bounds {
        for (idx, wall) in b.walls().iter().enumerate() {
            if segments.iter().any(|s| s.intersect(*wall).is_some()) {
                let point = wall.closest_point_to(agent);
                hits.push(ObstacleHit {
                    point,
                    distance: (point - agent).norm(),
                    source: HitSource::Wall(idx),
                });
            }
        }
    }
    hits
}

/// The single nearest detected source, if any.
pub fn detect_obstacle_point(
    agent: Vec2,
    tri: &ReactionTriangle,
    obstacles: &[Polygon],
    bounds: Option<&Bounds<2>>,
    include_outline_edges: bool,
) -> Option<ObstacleHit> {
    detect_obstacle_hits(agent, tri, obstacles, bounds, include_outline_edges)
        .into_iter()
        .min_by(|a, b| a.distance.partial_cmp(&b.distance).unwrap())
}

/// Widens the attraction radius in steps until some flockmate is in range or
/// the cap is reached. Returns the zones unchanged when the agent already has
/// a conflict- or attraction-band neighbor.
pub fn grow_attraction_until_contact<const D: usize>(
    self_pos: Vector<D>,
    flock: &[(usize, Vector<D>)],
    z: &ZoneParams,
    growth_step: f64,
    max_a: f64,
) -> ZoneParams {
    assert!(growth_step > 0.0, "growth step must be positive, got {growth_step}");
    let dists: Vec<f64> = flock.iter().map(|&(_, p)| (p - self_pos).norm()).collect();
    if dists.iter().any(|&d| z.repulsion < d && d <= z.attraction) {
        return *z;
    }
    let mut a = z.attraction;
    while a < max_a && !dists.iter().any(|&d| d <= a) {
        a = (a + growth_step).min(max_a);
    }
    ZoneParams {
        attraction: a,
        surveillance: z.surveillance.max(a),
        ..*z
    }
}
