//! World state and the synchronous main loop: perception, deviation rules,
//! control composition, limits, Euler integration, then alien pursuit.
//!
//! Every agent reads the same start-of-step snapshot, so the committed state
//! never depends on update order. Neighbor sums run in ascending id order,
//! which keeps runs bit-for-bit reproducible even if the agent list is
//! stored shuffled.

use std::collections::HashMap;

use log::warn;
use thiserror::Error;

use crate::behaviors::{
    self, bound_velocity, positional, BehaviorWeights, DeviationSet, Limits, VelocityEstimate,
};
use crate::geometry::{Bounds, Polygon, Vec2, Vector, EPS_ZERO};
use crate::perception::{
    build_reaction_triangle, classify_neighbors, detect_obstacle_hits, fallback_bearing,
    grow_attraction_until_contact, measure_pair, PairMeasurement, ZoneParams,
};
use crate::simplified::{self, SimplifiedParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Zone,
    Simplified,
}

/// How agents sense each other: raw relative states, exact bearing/distance
/// rates, or bearings differenced across steps (zero rates on the first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measurement {
    Position,
    Bearing,
    BearingFd,
}

#[derive(Clone, Debug)]
pub struct AgentState<const D: usize> {
    pub id: usize,
    pub pos: Vector<D>,
    pub vel: Vector<D>,
    pub zones: ZoneParams,
    pub weights: BehaviorWeights,
    pub limits: Limits,
    pub estimate: VelocityEstimate<D>,
    pub informed: bool,
    /// Required when the world runs the simplified model.
    pub simplified: Option<SimplifiedParams>,
    /// Smoothed neighbor count, populated only under count smoothing.
    smoothed_count: Option<f64>,
    /// Control applied on the previous step, fed back into the velocity
    /// estimate by default.
    last_control: Vector<D>,
}

impl<const D: usize> AgentState<D> {
    /// Uninformed agents carry no speed-alignment weight, whatever the
    /// template says.
    pub fn new(
        id: usize,
        pos: Vector<D>,
        vel: Vector<D>,
        zones: ZoneParams,
        weights: BehaviorWeights,
        limits: Limits,
        informed: bool,
    ) -> Self {
        let mut weights = weights;
        if !informed {
            weights.speed = 0.0;
        }
        AgentState {
            id,
            pos,
            vel,
            zones,
            weights,
            limits,
            estimate: VelocityEstimate::new(vel),
            informed,
            simplified: None,
            smoothed_count: None,
            last_control: Vector::ZERO,
        }
    }

    pub fn with_simplified(mut self, params: SimplifiedParams) -> Self {
        self.simplified = Some(params);
        self
    }

    pub fn speed(&self) -> f64 {
        self.vel.norm()
    }
}

/// A pursuer outside the flock: chases the nearest detectable agent at full
/// speed, hard-clamped to its containment polygon.
#[derive(Clone, Debug)]
pub struct AlienState {
    pub id: usize,
    pub pos: Vec2,
    pub vel: Vec2,
    pub v_max: f64,
    pub detection_radius: f64,
    pub containment: Polygon,
}

/// One alien update. Detection is a plain closest-agent check; the candidate
/// Euler step is clamped back onto the containment boundary (velocity zeroed)
/// if it would leave.
pub fn alien_step(alien: &AlienState, agent_positions: &[Vec2], dt: f64) -> AlienState {
    let mut next = alien.clone();
    let target = agent_positions
        .iter()
        .map(|p| (*p, (*p - alien.pos).norm()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    next.vel = match target {
        Some((p, d)) if d <= alien.detection_radius && d > EPS_ZERO => {
            (p - alien.pos) * (alien.v_max / d)
        }
        _ => Vec2::ZERO,
    };
    let candidate = next.pos + next.vel * dt;
    if alien.containment.contains(candidate) {
        next.pos = candidate;
    } else {
        next.pos = alien.containment.closest_boundary_point(candidate);
        next.vel = Vec2::ZERO;
    }
    next
}

/// Attraction-zone growth for isolated agents (only meaningful for the zone
/// model). Auto enables growth in unbounded worlds, stepping 0.5 m per try
/// and capping at the live extent of the flock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AttractionGrowth {
    Auto,
    Disabled,
    Enabled { step_m: f64, max_radius_m: Option<f64> },
}

const AUTO_GROWTH_STEP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOptions {
    /// Rescale the cohesion mean to unit length and apply the cohesion weight
    /// on top (keeps distant stragglers from dominating the control).
    pub cohesion_normalize: bool,
    /// Apply the speed squash every step instead of only above v_max. The
    /// unconditional squash shrinks any nonzero velocity, so it fights
    /// convergence to the desired cruise speed; off by default.
    pub strict_velocity_bound: bool,
    /// Restrict intruder surveillance to the a < d <= s band instead of the
    /// full disc. The band reading switches repulsion off as a pursuer gets
    /// very close, so the disc is the default.
    pub strict_surveillance_band: bool,
    /// Flank length of the avoidance triangle as a fraction of its height.
    pub triangle_alpha: f64,
    /// Also test the two outline edges of the triangle, not just the probes.
    pub triangle_edge_probes: bool,
    pub attraction_growth: AttractionGrowth,
    /// EMA factor in (0,1] for the simplified neighbor count; None uses the
    /// live count.
    pub count_smoothing: Option<f64>,
    /// Wire surveillance/avoidance/speed rules into the simplified model
    /// (conflict radius := adaptive spacing, surveillance := perception
    /// radius). The composed control stays unsaturated.
    pub simplified_extensions: bool,
    /// Integrate the agent's own applied control into its velocity estimate
    /// (the estimate then tracks the true velocity exactly until a squash
    /// event). When off, only the flock terms are integrated; that variant
    /// freezes the estimate whenever the neighborhood reaches equilibrium and
    /// leaves the speed-alignment force running open loop, so it exists only
    /// for studying the divergence.
    pub estimate_from_applied_control: bool,
    /// Sense the arena walls by proximity instead of through the reaction
    /// triangle: each wall closer than the conflict radius contributes the
    /// avoidance term directly, using its signed plane distance. Proximity
    /// pressure acts regardless of heading, so a sideways drift is corrected
    /// before the wall is reached, and the signed distance keeps the push
    /// pointing into the arena even for an agent that slipped past the line.
    /// With the flag off, walls only act when a probe crosses them; nothing
    /// recovers an agent that gets shoved out facing away.
    pub wall_zone_pressure: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            cohesion_normalize: true,
            strict_velocity_bound: false,
            strict_surveillance_band: false,
            triangle_alpha: 0.5,
            triangle_edge_probes: false,
            attraction_growth: AttractionGrowth::Auto,
            count_smoothing: None,
            simplified_extensions: false,
            estimate_from_applied_control: true,
            wall_zone_pressure: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("a world needs at least one agent")]
    EmptyFlock,
    #[error("duplicate agent id {0}")]
    DuplicateAgentId(usize),
    #[error("duplicate alien id {0}")]
    DuplicateAlienId(usize),
    #[error("time step must be finite and > 0, got {0}")]
    BadTimeStep(f64),
    #[error("desired speed must be finite and >= 0, got {0}")]
    BadDesiredSpeed(f64),
    #[error("bounds must satisfy min < max componentwise")]
    BadBounds,
    #[error("{feature} requires a two-dimensional world, got d={dimension}")]
    PlanarOnly { feature: &'static str, dimension: usize },
    #[error("agent {id}: {reason}")]
    BadAgent { id: usize, reason: String },
    #[error("agent {0} runs the simplified model but has no simplified parameters")]
    MissingSimplifiedParams(usize),
    #[error("alien {id}: {reason}")]
    BadAlien { id: usize, reason: String },
    #[error("alien {0} starts outside its containment polygon")]
    AlienOutsideContainment(usize),
    #[error("triangle alpha must lie in (0, 1], got {0}")]
    BadTriangleAlpha(f64),
    #[error("count smoothing factor must lie in (0, 1], got {0}")]
    BadCountSmoothing(f64),
    #[error("attraction growth step must be finite and > 0, got {0}")]
    BadGrowthStep(f64),
    #[error("attraction growth cap must be finite and > 0, got {0}")]
    BadGrowthCap(f64),
}

/// Per-pair bearings and distances from the previous step, kept only in
/// finite-difference measurement mode. Looked up per ordered pair, never
/// iterated, so the hash order cannot leak into results.
#[derive(Clone, Debug, Default)]
struct FdMemory<const D: usize> {
    flock: HashMap<(usize, usize), (Vector<D>, f64)>,
    alien: HashMap<(usize, usize), (Vector<D>, f64)>,
}

#[derive(Clone, Debug)]
pub struct World<const D: usize> {
    pub agents: Vec<AgentState<D>>,
    pub aliens: Vec<AlienState>,
    pub obstacles: Vec<Polygon>,
    pub bounds: Option<Bounds<2>>,
    pub dt: f64,
    pub time: f64,
    pub model: Model,
    pub measurement: Measurement,
    pub v_desired: f64,
    pub options: StepOptions,
    step_index: u64,
    fd: Option<FdMemory<D>>,
}

struct StepCtx<'a, const D: usize> {
    /// Start-of-step agent states sorted by id.
    snap: &'a [AgentState<D>],
    fd_prev: Option<&'a FdMemory<D>>,
    /// Diagonal of the live bounding box of all agents, for Auto growth.
    live_diag: f64,
}

impl<'a, const D: usize> StepCtx<'a, D> {
    fn agent(&self, id: usize) -> &AgentState<D> {
        let i = self.snap.binary_search_by_key(&id, |a| a.id).expect("snapshot covers all ids");
        &self.snap[i]
    }
}

fn to_plane<const D: usize>(v: Vector<D>) -> Vec2 {
    debug_assert!(D == 2);
    Vec2::xy(v[0], v[1])
}

fn from_plane<const D: usize>(v: Vec2) -> Vector<D> {
    debug_assert!(D == 2);
    let mut out = Vector::ZERO;
    out[0] = v.x();
    out[1] = v.y();
    out
}

impl<const D: usize> World<D> {
    pub fn new(
        agents: Vec<AgentState<D>>,
        dt: f64,
        model: Model,
        measurement: Measurement,
        v_desired: f64,
    ) -> World<D> {
        World {
            agents,
            aliens: Vec::new(),
            obstacles: Vec::new(),
            bounds: None,
            dt,
            time: 0.0,
            model,
            measurement,
            v_desired,
            options: StepOptions::default(),
            step_index: 0,
            fd: None,
        }
    }

    pub fn dimension(&self) -> usize {
        D
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if self.agents.is_empty() {
            return Err(WorldError::EmptyFlock);
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(WorldError::BadTimeStep(self.dt));
        }
        if !(self.v_desired.is_finite() && self.v_desired >= 0.0) {
            return Err(WorldError::BadDesiredSpeed(self.v_desired));
        }
        let mut ids: Vec<usize> = self.agents.iter().map(|a| a.id).collect();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(WorldError::DuplicateAgentId(w[0]));
            }
        }
        for a in &self.agents {
            let bad = |reason: String| WorldError::BadAgent { id: a.id, reason };
            a.zones.validate().map_err(|e| bad(e.to_string()))?;
            a.weights.validate().map_err(bad)?;
            a.limits.validate().map_err(bad)?;
            if !(a.pos.is_finite() && a.vel.is_finite()) {
                return Err(bad("non-finite position or velocity".into()));
            }
            if !a.informed && a.weights.speed != 0.0 {
                return Err(bad("uninformed agent with nonzero speed-alignment weight".into()));
            }
            if self.model == Model::Simplified {
                match &a.simplified {
                    None => return Err(WorldError::MissingSimplifiedParams(a.id)),
                    Some(p) => p.validate().map_err(bad)?,
                }
            }
        }
        if D != 2 {
            let feature = if !self.aliens.is_empty() {
                Some("alien agents")
            } else if !self.obstacles.is_empty() {
                Some("obstacles")
            } else if self.bounds.is_some() {
                Some("boundary walls")
            } else {
                None
            };
            if let Some(feature) = feature {
                return Err(WorldError::PlanarOnly { feature, dimension: D });
            }
        }
        if let Some(b) = &self.bounds {
            if !b.well_ordered() {
                return Err(WorldError::BadBounds);
            }
        }
        let mut alien_ids: Vec<usize> = self.aliens.iter().map(|a| a.id).collect();
        alien_ids.sort_unstable();
        for w in alien_ids.windows(2) {
            if w[0] == w[1] {
                return Err(WorldError::DuplicateAlienId(w[0]));
            }
        }
        for al in &self.aliens {
            let bad = |reason: String| WorldError::BadAlien { id: al.id, reason };
            if !(al.detection_radius.is_finite() && al.detection_radius > 0.0) {
                return Err(bad(format!(
                    "detection radius must be finite and > 0, got {}",
                    al.detection_radius
                )));
            }
            if !(al.v_max.is_finite() && al.v_max >= 0.0) {
                return Err(bad(format!("max speed must be finite and >= 0, got {}", al.v_max)));
            }
            if !al.containment.contains(al.pos)
                && (al.containment.closest_boundary_point(al.pos) - al.pos).norm() > EPS_ZERO
            {
                return Err(WorldError::AlienOutsideContainment(al.id));
            }
        }
        let o = &self.options;
        if !(o.triangle_alpha > 0.0 && o.triangle_alpha <= 1.0) {
            return Err(WorldError::BadTriangleAlpha(o.triangle_alpha));
        }
        if let Some(f) = o.count_smoothing {
            if !(f > 0.0 && f <= 1.0) {
                return Err(WorldError::BadCountSmoothing(f));
            }
        }
        if let AttractionGrowth::Enabled { step_m, max_radius_m } = o.attraction_growth {
            if !(step_m.is_finite() && step_m > 0.0) {
                return Err(WorldError::BadGrowthStep(step_m));
            }
            if let Some(cap) = max_radius_m {
                if !(cap.is_finite() && cap > 0.0) {
                    return Err(WorldError::BadGrowthCap(cap));
                }
            }
        }
        Ok(())
    }

    /// One synchronous step. Returns the control applied to each agent,
    /// index-aligned with `self.agents`. Measurement faults (overlapping
    /// agents) are logged and patched, never fatal.
    pub fn step(&mut self) -> Vec<Vector<D>> {
        let mut snap = self.agents.clone();
        snap.sort_by_key(|a| a.id);
        let fd_now = match self.measurement {
            Measurement::BearingFd => Some(self.fd_table(&snap)),
            _ => None,
        };
        let ctx = StepCtx {
            snap: &snap,
            fd_prev: self.fd.as_ref(),
            live_diag: live_diagonal(&snap),
        };

        let results: Vec<(Vector<D>, VelocityEstimate<D>, Option<f64>)> =
            self.agents.iter().map(|a| self.agent_control(a, &ctx)).collect();

        let mut controls = Vec::with_capacity(self.agents.len());
        for (agent, (u, est, smoothed)) in self.agents.iter_mut().zip(results) {
            agent.estimate = est;
            agent.smoothed_count = smoothed;
            agent.last_control = u;
            agent.vel = bound_velocity(
                agent.vel + u * self.dt,
                agent.limits.v_max,
                self.options.strict_velocity_bound,
            );
            // Confinement is purely behavioral: the boundary walls feed the
            // avoidance deviation like any obstacle, and nothing pins the
            // position. An agent can overshoot the line for a few frames
            // during a saturated turn and gets steered back.
            agent.pos += agent.vel * self.dt;
            controls.push(u);
        }

        if !self.aliens.is_empty() {
            let mut reached: Vec<(usize, Vec2)> =
                self.agents.iter().map(|a| (a.id, to_plane(a.pos))).collect();
            reached.sort_by_key(|&(id, _)| id);
            let positions: Vec<Vec2> = reached.into_iter().map(|(_, p)| p).collect();
            for alien in &mut self.aliens {
                *alien = alien_step(alien, &positions, self.dt);
            }
        }

        self.fd = fd_now;
        self.step_index += 1;
        self.time = self.step_index as f64 * self.dt;
        controls
    }

    fn fd_table(&self, snap: &[AgentState<D>]) -> FdMemory<D> {
        let mut mem = FdMemory::default();
        for a in snap {
            for b in snap {
                if a.id == b.id {
                    continue;
                }
                let rel = b.pos - a.pos;
                let d = rel.norm();
                if d > EPS_ZERO {
                    mem.flock.insert((a.id, b.id), (rel / d, d));
                }
            }
            for al in &self.aliens {
                let rel = from_plane::<D>(al.pos) - a.pos;
                let d = rel.norm();
                if d > EPS_ZERO {
                    mem.alien.insert((a.id, al.id), (rel / d, d));
                }
            }
        }
        mem
    }

    /// Bearing-family observation of one counterpart, with the logged
    /// fallback for physical overlap (distance 0, deterministic bearing).
    fn observe(
        &self,
        me: &AgentState<D>,
        other_id: usize,
        other_pos: Vector<D>,
        other_vel: Vector<D>,
        ctx: &StepCtx<D>,
        alien: bool,
    ) -> PairMeasurement<D> {
        match self.measurement {
            Measurement::BearingFd => {
                let rel = other_pos - me.pos;
                let d = rel.norm();
                if d <= EPS_ZERO {
                    self.warn_overlap(me.id, other_id, alien);
                    return overlap_measurement(me.id, other_id);
                }
                let b = rel / d;
                let prev = ctx.fd_prev.and_then(|m| {
                    let table = if alien { &m.alien } else { &m.flock };
                    table.get(&(me.id, other_id))
                });
                let (bearing_rate, distance_rate) = match prev {
                    Some(&(pb, pd)) => ((b - pb) / self.dt, (d - pd) / self.dt),
                    None => (Vector::ZERO, 0.0),
                };
                PairMeasurement { bearing: b, distance: d, bearing_rate, distance_rate }
            }
            _ => measure_pair(me.pos, me.vel, other_pos, other_vel).unwrap_or_else(|_| {
                self.warn_overlap(me.id, other_id, alien);
                overlap_measurement(me.id, other_id)
            }),
        }
    }

    fn warn_overlap(&self, id: usize, other_id: usize, alien: bool) {
        let kind = if alien { "alien" } else { "agent" };
        warn!(
            "agent {id} and {kind} {other_id} coincide at step {}; substituting fallback bearing",
            self.step_index
        );
    }

    fn agent_control(
        &self,
        me: &AgentState<D>,
        ctx: &StepCtx<D>,
    ) -> (Vector<D>, VelocityEstimate<D>, Option<f64>) {
        match self.model {
            Model::Zone => {
                let (u, est) = self.zone_control(me, ctx);
                (u, est, me.smoothed_count)
            }
            Model::Simplified => self.simplified_control(me, ctx),
        }
    }

    fn effective_zones(
        &self,
        me: &AgentState<D>,
        flock_pos: &[(usize, Vector<D>)],
        ctx: &StepCtx<D>,
    ) -> ZoneParams {
        let growth = match self.options.attraction_growth {
            AttractionGrowth::Disabled => None,
            AttractionGrowth::Auto => {
                if self.bounds.is_none() {
                    Some((AUTO_GROWTH_STEP, None))
                } else {
                    None
                }
            }
            AttractionGrowth::Enabled { step_m, max_radius_m } => Some((step_m, max_radius_m)),
        };
        match growth {
            None => me.zones,
            Some((step, cap)) => {
                let cap = cap.unwrap_or(ctx.live_diag).max(me.zones.attraction);
                grow_attraction_until_contact(me.pos, flock_pos, &me.zones, step, cap)
            }
        }
    }

    /// Obstacle/wall contacts for one planar agent, as (hit − pos) vectors.
    /// Walls drop out of the probe test when they are sensed by proximity
    /// instead, so a wall never contributes through both paths.
    fn reaction_hits(&self, pos: Vec2, vel: Vec2, conflict: f64) -> Vec<Vec2> {
        let probe_bounds =
            if self.options.wall_zone_pressure { None } else { self.bounds.as_ref() };
        if self.obstacles.is_empty() && probe_bounds.is_none() {
            return Vec::new();
        }
        let tri = match build_reaction_triangle(pos, vel, conflict, self.options.triangle_alpha) {
            Some(t) => t,
            None => return Vec::new(),
        };
        detect_obstacle_hits(
            pos,
            &tri,
            &self.obstacles,
            probe_bounds,
            self.options.triangle_edge_probes,
        )
        .into_iter()
        .filter(|h| h.distance > EPS_ZERO)
        .map(|h| h.point - pos)
        .collect()
    }

    fn zone_control(
        &self,
        me: &AgentState<D>,
        ctx: &StepCtx<D>,
    ) -> (Vector<D>, VelocityEstimate<D>) {
        let flock_pos: Vec<(usize, Vector<D>)> = ctx
            .snap
            .iter()
            .filter(|a| a.id != me.id)
            .map(|a| (a.id, a.pos))
            .collect();
        let alien_pos: Vec<(usize, Vector<D>)> =
            self.aliens.iter().map(|al| (al.id, from_plane(al.pos))).collect();
        let zones = self.effective_zones(me, &flock_pos, ctx);
        let sets = classify_neighbors(
            me.pos,
            &flock_pos,
            &alien_pos,
            &zones,
            self.options.strict_surveillance_band,
        );

        let mut dev = DeviationSet::ZERO;
        let w = &me.weights;
        match self.measurement {
            Measurement::Position => {
                let rel_of = |id: usize| -> Vector<D> {
                    let other = ctx.agent(id);
                    let rel = other.pos - me.pos;
                    if rel.norm() <= EPS_ZERO {
                        self.warn_overlap(me.id, id, false);
                        fallback_bearing::<D>(me.id, id) * (2.0 * EPS_ZERO)
                    } else {
                        rel
                    }
                };
                let near: Vec<(Vector<D>, f64)> =
                    sets.near().iter().map(|&id| (rel_of(id), w.separation)).collect();
                dev.separation = positional::local_separation(&near, zones.conflict);

                let far_ids = sets.far();
                let far_rel: Vec<(Vector<D>, f64)> =
                    far_ids.iter().map(|&id| (rel_of(id), w.cohesion)).collect();
                dev.cohesion = self.finish_cohesion(positional::local_cohesion(
                    &far_rel,
                    self.options.cohesion_normalize,
                ), w);
                let far_dvel: Vec<(Vector<D>, f64)> = far_ids
                    .iter()
                    .map(|&id| (ctx.agent(id).vel - me.vel, w.alignment))
                    .collect();
                dev.alignment =
                    positional::local_alignment(&far_dvel).unwrap_or(Vector::ZERO);

                let watched: Vec<(Vector<D>, f64)> = sets
                    .surveillance
                    .iter()
                    .map(|&id| {
                        let al = &self.aliens[self.alien_index(id)];
                        (from_plane::<D>(al.pos) - me.pos, w.strategic)
                    })
                    .collect();
                dev.strategic = positional::strategic_separation(&watched, zones.surveillance);
            }
            _ => {
                let meas_of = |id: usize| -> PairMeasurement<D> {
                    let other = ctx.agent(id);
                    self.observe(me, id, other.pos, other.vel, ctx, false)
                };
                let near: Vec<(PairMeasurement<D>, f64)> =
                    sets.near().iter().map(|&id| (meas_of(id), w.separation)).collect();
                dev.separation = behaviors::local_separation(&near, zones.conflict);

                let far_ids = sets.far();
                let far_lc: Vec<(PairMeasurement<D>, f64)> =
                    far_ids.iter().map(|&id| (meas_of(id), w.cohesion)).collect();
                dev.cohesion = self.finish_cohesion(
                    behaviors::local_cohesion(&far_lc, self.options.cohesion_normalize),
                    w,
                );
                let far_la: Vec<(PairMeasurement<D>, f64)> =
                    far_ids.iter().map(|&id| (meas_of(id), w.alignment)).collect();
                dev.alignment = behaviors::local_alignment(&far_la).unwrap_or(Vector::ZERO);

                let watched: Vec<(PairMeasurement<D>, f64)> = sets
                    .surveillance
                    .iter()
                    .map(|&id| {
                        let al = &self.aliens[self.alien_index(id)];
                        let m = self.observe(
                            me,
                            id,
                            from_plane(al.pos),
                            from_plane(al.vel),
                            ctx,
                            true,
                        );
                        (m, w.strategic)
                    })
                    .collect();
                dev.strategic = behaviors::strategic_separation(&watched, zones.surveillance);
            }
        }

        if D == 2 {
            let rel_hits = self.reaction_hits(to_plane(me.pos), to_plane(me.vel), zones.conflict);
            let rel_hits: Vec<Vector<D>> = rel_hits.into_iter().map(from_plane).collect();
            dev.avoidance = positional::obstacle_avoidance(&rel_hits, zones.conflict, w.avoidance);
            if self.options.wall_zone_pressure {
                if let Some(b) = &self.bounds {
                    dev.avoidance += from_plane(behaviors::boundary_pressure(
                        to_plane(me.pos),
                        b,
                        zones.conflict,
                        w.avoidance,
                    ));
                }
            }
        }

        let mut est = me.estimate;
        if self.options.estimate_from_applied_control {
            est.update(me.last_control, self.dt);
        } else {
            est.update(behaviors::aux_control(&dev, w.gain), self.dt);
        }
        let v_ref = match self.measurement {
            Measurement::Position => me.vel,
            _ => est.v_hat,
        };
        dev.speed = behaviors::global_speed_alignment(v_ref, self.v_desired, w.speed);
        let u = behaviors::compose_control(&dev, w.gain, me.limits.u_max);
        (u, est)
    }

    fn finish_cohesion(&self, raw: Option<Vector<D>>, w: &BehaviorWeights) -> Vector<D> {
        match raw {
            None => Vector::ZERO,
            Some(v) => {
                if self.options.cohesion_normalize {
                    v * w.cohesion
                } else {
                    v
                }
            }
        }
    }

    fn alien_index(&self, id: usize) -> usize {
        self.aliens.iter().position(|al| al.id == id).expect("surveillance ids come from aliens")
    }

    fn simplified_control(
        &self,
        me: &AgentState<D>,
        ctx: &StepCtx<D>,
    ) -> (Vector<D>, VelocityEstimate<D>, Option<f64>) {
        let params = me.simplified.as_ref().expect("validated: simplified params present");
        let neighbors: Vec<&AgentState<D>> = ctx
            .snap
            .iter()
            .filter(|a| a.id != me.id && (a.pos - me.pos).norm() <= params.radius)
            .collect();
        let live = neighbors.len() as f64;
        let (count, smoothed) = match (self.options.count_smoothing, me.smoothed_count) {
            (None, _) => (live, None),
            (Some(_), None) => (live, Some(live)),
            (Some(f), Some(prev)) => {
                let ema = prev + f * (live - prev);
                (ema, Some(ema))
            }
        };
        let spacing = params.beta * count * params.radius;

        let (e_sc, e_a) = match self.measurement {
            Measurement::Position => {
                let rel: Vec<(Vector<D>, f64)> = neighbors
                    .iter()
                    .map(|o| {
                        let d = o.pos - me.pos;
                        let d = if d.norm() <= EPS_ZERO {
                            self.warn_overlap(me.id, o.id, false);
                            fallback_bearing::<D>(me.id, o.id) * (2.0 * EPS_ZERO)
                        } else {
                            d
                        };
                        (d, params.w_sep_cohesion)
                    })
                    .collect();
                let dvel: Vec<(Vector<D>, f64)> =
                    neighbors.iter().map(|o| (o.vel - me.vel, params.w_alignment)).collect();
                (
                    simplified::positional::separation_cohesion_spaced(&rel, spacing),
                    simplified::positional::alignment(&dvel),
                )
            }
            _ => {
                let meas: Vec<PairMeasurement<D>> = neighbors
                    .iter()
                    .map(|o| self.observe(me, o.id, o.pos, o.vel, ctx, false))
                    .collect();
                let sc: Vec<(PairMeasurement<D>, f64)> =
                    meas.iter().map(|m| (*m, params.w_sep_cohesion)).collect();
                let al: Vec<(PairMeasurement<D>, f64)> =
                    meas.iter().map(|m| (*m, params.w_alignment)).collect();
                (
                    simplified::separation_cohesion_spaced(&sc, spacing),
                    simplified::simplified_alignment(&al),
                )
            }
        };

        let mut flock_terms = e_sc + e_a;
        let mut est = me.estimate;
        if self.options.simplified_extensions && D == 2 {
            flock_terms += self.simplified_extension_terms(me, ctx, spacing, params.radius);
            if self.options.estimate_from_applied_control {
                est.update(me.last_control, self.dt);
            } else {
                est.update(flock_terms * params.gain, self.dt);
            }
            let v_ref = match self.measurement {
                Measurement::Position => me.vel,
                _ => est.v_hat,
            };
            let e_ga =
                behaviors::global_speed_alignment(v_ref, self.v_desired, me.weights.speed);
            return ((flock_terms + e_ga) * params.gain, est, smoothed);
        }
        let u = flock_terms * params.gain;
        if self.options.estimate_from_applied_control {
            est.update(me.last_control, self.dt);
        } else {
            est.update(u, self.dt);
        }
        (u, est, smoothed)
    }

    /// Surveillance and obstacle terms for the extended simplified model,
    /// with the adaptive spacing standing in for the conflict radius and the
    /// perception radius for the surveillance radius.
    fn simplified_extension_terms(
        &self,
        me: &AgentState<D>,
        ctx: &StepCtx<D>,
        spacing: f64,
        radius: f64,
    ) -> Vector<D> {
        let mut extra = Vector::ZERO;
        let watched: Vec<(PairMeasurement<D>, f64)> = self
            .aliens
            .iter()
            .filter(|al| (from_plane::<D>(al.pos) - me.pos).norm() <= radius)
            .map(|al| {
                let m =
                    self.observe(me, al.id, from_plane(al.pos), from_plane(al.vel), ctx, true);
                (m, me.weights.strategic)
            })
            .collect();
        extra += behaviors::strategic_separation(&watched, radius);
        if spacing > EPS_ZERO {
            let rel_hits = self.reaction_hits(to_plane(me.pos), to_plane(me.vel), spacing);
            let rel_hits: Vec<Vector<D>> = rel_hits.into_iter().map(from_plane).collect();
            extra +=
                positional::obstacle_avoidance(&rel_hits, spacing, me.weights.avoidance);
            if self.options.wall_zone_pressure {
                if let Some(b) = &self.bounds {
                    extra += from_plane(behaviors::boundary_pressure(
                        to_plane(me.pos),
                        b,
                        spacing,
                        me.weights.avoidance,
                    ));
                }
            }
        }
        extra
    }
}

fn live_diagonal<const D: usize>(snap: &[AgentState<D>]) -> f64 {
    let mut min = snap[0].pos;
    let mut max = snap[0].pos;
    for a in snap {
        for k in 0..D {
            min[k] = min[k].min(a.pos[k]);
            max[k] = max[k].max(a.pos[k]);
        }
    }
    (max - min).norm()
}

fn overlap_measurement<const D: usize>(id_self: usize, id_other: usize) -> PairMeasurement<D> {
    PairMeasurement {
        bearing: fallback_bearing(id_self, id_other),
        distance: 0.0,
        bearing_rate: Vector::ZERO,
        distance_rate: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use approx::assert_abs_diff_eq;

    fn zones() -> ZoneParams {
        ZoneParams::new(1.5, 3.0, 5.0, 6.0).unwrap()
    }

    fn weights() -> BehaviorWeights {
        BehaviorWeights {
            separation: 5.0,
            cohesion: 0.75,
            alignment: 0.25,
            strategic: 5.0,
            avoidance: 5.0,
            speed: 5.0,
            gain: 1.0,
        }
    }

    fn limits() -> Limits {
        Limits { u_max: 2.0, v_max: 4.0 }
    }

    fn agent2(id: usize, pos: [f64; 2], vel: [f64; 2], informed: bool) -> AgentState<2> {
        AgentState::new(id, Vector(pos), Vector(vel), zones(), weights(), limits(), informed)
    }

    fn zone_world(agents: Vec<AgentState<2>>) -> World<2> {
        World::new(agents, 0.1, Model::Zone, Measurement::Bearing, 3.0)
    }

    #[test]
    fn lone_uninformed_agent_drifts_straight() {
        let mut w = zone_world(vec![agent2(0, [1.0, 2.0], [0.5, -0.25], false)]);
        w.options.attraction_growth = AttractionGrowth::Disabled;
        let u = w.step();
        assert_eq!(u[0], Vector([0.0, 0.0]));
        assert_eq!(w.agents[0].vel, Vector([0.5, -0.25]));
        assert_eq!(w.agents[0].pos, Vector([1.0 + 0.05, 2.0 - 0.025]));
    }

    // Oracle rows informed_agent_u / _vel_after / _pos_delta.
    #[test]
    fn informed_agent_brakes_toward_desired_speed() {
        let mut w = zone_world(vec![agent2(0, [0.0, 0.0], [4.0, 0.0], true)]);
        let u = w.step();
        assert_eq!(u[0], Vector([-1.9732285963028606, 0.0]));
        assert_eq!(w.agents[0].vel, Vector([3.802677140369714, 0.0]));
        assert_eq!(w.agents[0].pos, Vector([0.38026771403697146, 0.0]));
    }

    #[test]
    fn informed_agent_settles_at_desired_speed() {
        // Speed alignment closes the loop through the fed-back estimate: a
        // lone agent launched fast brakes onto the cruise speed and stays
        // there, identically in both measurement routes (no squash events, so
        // the estimate tracks the true velocity bit for bit).
        let mut by_route = Vec::new();
        for measurement in [Measurement::Position, Measurement::Bearing] {
            let mut w = zone_world(vec![agent2(0, [0.0, 0.0], [4.0, 0.0], true)]);
            w.measurement = measurement;
            for _ in 0..400 {
                w.step();
            }
            assert_abs_diff_eq!(w.agents[0].speed(), 3.0, epsilon = 1e-9);
            by_route.push((w.agents[0].pos, w.agents[0].vel));
        }
        assert_eq!(by_route[0], by_route[1]);
    }

    #[test]
    fn wall_term_turns_back_a_cruising_agent() {
        // Nothing hard-stops an agent at the boundary; the wall feeds the
        // avoidance deviation and that has to be enough. Head-on at cruise
        // speed the brake begins when the probe touches the wall and the
        // agent stops short of the line with room to spare.
        let mut w = zone_world(vec![agent2(0, [25.0, 25.0], [3.0, 0.0], false)]);
        w.bounds = Some(Bounds { min: Vector([0.0, 0.0]), max: Vector([50.0, 50.0]) });
        let mut max_x: f64 = 0.0;
        for _ in 0..300 {
            w.step();
            max_x = max_x.max(w.agents[0].pos[0]);
        }
        assert!(max_x < 49.6, "ran closer to the wall than the brake allows: {max_x}");
        assert!(w.agents[0].pos[0] < 49.6);
    }

    #[test]
    fn aux_only_estimate_leaves_speed_alignment_open_loop() {
        // The flock-terms-only estimate freezes for a lone agent, so the
        // braking force never updates and the speed saws around the squash
        // instead of settling. This pins the divergence the default avoids.
        let mut w = zone_world(vec![agent2(0, [0.0, 0.0], [4.0, 0.0], true)]);
        w.measurement = Measurement::Bearing;
        w.options.estimate_from_applied_control = false;
        for _ in 0..400 {
            w.step();
        }
        assert!(
            (w.agents[0].speed() - 3.0).abs() > 0.2,
            "open-loop run unexpectedly settled: {}",
            w.agents[0].speed()
        );
    }

    #[test]
    fn symmetric_pair_stays_mirror_symmetric() {
        let a = agent2(0, [0.0, 0.0], [1.0, 1.0], true);
        let b = agent2(1, [4.0, 0.0], [-1.0, 1.0], true);
        let mut w = zone_world(vec![a, b]);
        for _ in 0..50 {
            w.step();
            let (p0, p1) = (w.agents[0].pos, w.agents[1].pos);
            let (v0, v1) = (w.agents[0].vel, w.agents[1].vel);
            // Velocity mirroring is exact (pure negation symmetry); the
            // midpoint drifts only by representation error around x = 2.
            assert_abs_diff_eq!(p0[0], 4.0 - p1[0], epsilon = 1e-12);
            assert_eq!(p0[1], p1[1]);
            assert_eq!(v0[0], -v1[0]);
            assert_eq!(v0[1], v1[1]);
        }
    }

    #[test]
    fn storage_order_is_invisible() {
        let build = |reversed: bool| {
            let mut agents = vec![
                agent2(0, [0.0, 0.0], [1.0, 0.3], true),
                agent2(1, [2.0, 1.0], [0.5, 0.5], false),
                agent2(2, [4.5, 0.5], [0.2, 0.9], true),
                agent2(3, [1.0, 3.5], [0.8, 0.1], false),
                agent2(4, [3.0, 2.5], [0.4, 0.6], true),
            ];
            if reversed {
                agents.reverse();
            }
            zone_world(agents)
        };
        let mut a = build(false);
        let mut b = build(true);
        for _ in 0..20 {
            a.step();
            b.step();
        }
        for agent in &a.agents {
            let twin = b.agents.iter().find(|x| x.id == agent.id).unwrap();
            assert_eq!(agent.pos, twin.pos);
            assert_eq!(agent.vel, twin.vel);
        }
    }

    fn containment() -> Polygon {
        Polygon::new(vec![
            Vec2::xy(-20.0, -20.0),
            Vec2::xy(20.0, -20.0),
            Vec2::xy(20.0, 20.0),
            Vec2::xy(-20.0, 20.0),
        ])
        .unwrap()
    }

    #[test]
    fn alien_ignores_out_of_range_agents() {
        let alien = AlienState {
            id: 0,
            pos: Vec2::ZERO,
            vel: Vec2::xy(1.0, 0.0),
            v_max: 3.0,
            detection_radius: 9.0,
            containment: containment(),
        };
        let next = alien_step(&alien, &[Vec2::xy(10.0, 0.0)], 0.1);
        assert_eq!(next.vel, Vec2::ZERO);
        assert_eq!(next.pos, Vec2::ZERO);
    }

    // Oracle row alien_pursuit_step.
    #[test]
    fn alien_pursues_at_full_speed() {
        let alien = AlienState {
            id: 0,
            pos: Vec2::ZERO,
            vel: Vec2::ZERO,
            v_max: 3.0,
            detection_radius: 9.0,
            containment: containment(),
        };
        let next = alien_step(&alien, &[Vec2::xy(5.0, 0.0)], 0.1);
        assert_eq!(next.pos, Vec2::xy(0.30000000000000004, 0.0));
    }

    #[test]
    fn alien_clamps_to_containment_edge() {
        let tri = Polygon::new(vec![Vec2::ZERO, Vec2::xy(1.0, 0.0), Vec2::xy(0.0, 1.0)]).unwrap();
        let alien = AlienState {
            id: 0,
            pos: Vec2::xy(0.4, 0.4),
            vel: Vec2::ZERO,
            v_max: 10.0,
            detection_radius: 50.0,
            containment: tri.clone(),
        };
        let next = alien_step(&alien, &[Vec2::xy(5.0, 5.0)], 0.1);
        assert_eq!(next.vel, Vec2::ZERO);
        assert_abs_diff_eq!(
            (tri.closest_boundary_point(next.pos) - next.pos).norm(),
            0.0,
            epsilon = 1e-12
        );
        for _ in 0..20 {
            let again = alien_step(&next, &[Vec2::xy(5.0, 5.0)], 0.1);
            let inside = tri.contains(again.pos)
                || (tri.closest_boundary_point(again.pos) - again.pos).norm() <= 1e-9;
            assert!(inside, "alien escaped to {:?}", again.pos);
        }
    }

    #[test]
    fn finite_difference_rates_start_at_zero() {
        let mut wts = weights();
        wts.separation = 0.0;
        wts.cohesion = 0.0;
        wts.alignment = 1.0;
        wts.strategic = 0.0;
        let lim = Limits { u_max: 100.0, v_max: 100.0 };
        let z = ZoneParams::new(1.0, 2.0, 50.0, 50.0).unwrap();
        let mk = |id, pos: [f64; 2], vel: [f64; 2]| {
            AgentState::new(id, Vector(pos), Vector(vel), z, wts, lim, false)
        };
        let mut w = World::new(
            vec![mk(0, [0.0, 0.0], [1.0, 0.0]), mk(1, [10.0, 0.0], [-1.0, 0.0])],
            0.1,
            Model::Zone,
            Measurement::BearingFd,
            0.0,
        );
        w.options.attraction_growth = AttractionGrowth::Disabled;
        let u1 = w.step();
        assert_eq!(u1[0], Vector([0.0, 0.0]));
        let u2 = w.step();
        // Head-on closing motion: distance shrinks linearly, bearing fixed,
        // so the differenced rates reproduce the relative velocity almost
        // exactly from the second step on.
        assert_abs_diff_eq!(u2[0][0], -2.0, epsilon = 1e-2);
        assert_abs_diff_eq!(u2[0][1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u2[1][0], 2.0, epsilon = 1e-2);
    }

    #[test]
    fn attraction_growth_reaches_distant_flockmate_without_bounds() {
        let mut w = zone_world(vec![
            agent2(0, [0.0, 0.0], [0.0, 0.0], false),
            agent2(1, [30.0, 0.0], [0.0, 0.0], false),
        ]);
        let u = w.step();
        assert!(u[0][0] > 0.0, "expected pull toward the distant flockmate, got {:?}", u[0]);
        assert!(u[1][0] < 0.0);

        let mut bounded = zone_world(vec![
            agent2(0, [1.0, 1.0], [0.0, 0.0], false),
            agent2(1, [31.0, 1.0], [0.0, 0.0], false),
        ]);
        bounded.bounds = Some(Bounds { min: Vector([0.0, 0.0]), max: Vector([50.0, 50.0]) });
        let u = bounded.step();
        // Growth is off inside bounded worlds and the flockmate is beyond the
        // attraction radius; stationary agents probe no walls either.
        assert_eq!(u[0], Vector([0.0, 0.0]));
    }

    #[test]
    fn surveillance_band_flag_changes_close_intruder_response() {
        let mk_world = |band_only: bool| {
            let mut w = zone_world(vec![agent2(0, [0.0, 0.0], [0.1, 0.0], false)]);
            w.options.attraction_growth = AttractionGrowth::Disabled;
            w.options.strict_surveillance_band = band_only;
            w.aliens.push(AlienState {
                id: 0,
                pos: Vec2::xy(2.0, 0.0),
                vel: Vec2::ZERO,
                v_max: 0.0,
                detection_radius: 1.0,
                containment: containment(),
            });
            w
        };
        // Intruder at distance 2 < attraction radius: the full-disc default
        // still repels, the band-only reading does not.
        let u_disc = mk_world(false).step();
        assert!(u_disc[0][0] < 0.0, "expected repulsion, got {:?}", u_disc[0]);
        let u_band = mk_world(true).step();
        assert_eq!(u_band[0], Vector([0.0, 0.0]));
    }

    fn simplified_pair(d0: f64, w_alignment: f64) -> World<2> {
        let params = SimplifiedParams {
            radius: 10.0,
            beta: 0.1,
            w_sep_cohesion: 1.0,
            w_alignment,
            gain: 1.0,
        };
        let lim = Limits { u_max: 1e6, v_max: 1e6 };
        let mk = |id, x: f64| {
            AgentState::new(
                id,
                Vector([x, 0.0]),
                Vector([0.0, 0.0]),
                ZoneParams::uniform(10.0).unwrap(),
                BehaviorWeights { speed: 0.0, ..weights() },
                lim,
                false,
            )
            .with_simplified(params)
        };
        let mut w = World::new(
            vec![mk(0, 0.0), mk(1, d0)],
            0.1,
            Model::Simplified,
            Measurement::Bearing,
            0.0,
        );
        w.options.attraction_growth = AttractionGrowth::Disabled;
        w
    }

    // Oracle row two_agent_control.
    #[test]
    fn simplified_two_agent_control_matches_both_routes() {
        for meas in [Measurement::Bearing, Measurement::Position] {
            let mut w = simplified_pair(5.0, 1.0);
            w.measurement = meas;
            let u = w.step();
            assert_eq!(u[0], Vector([4.0, 0.0]), "mode {meas:?}");
            assert_eq!(u[1], Vector([-4.0, 0.0]));
        }
    }

    fn distance_series(mut w: World<2>, steps: usize) -> (Vec<f64>, f64) {
        let mut out = vec![(w.agents[1].pos - w.agents[0].pos).norm()];
        let mut max_asym: f64 = 0.0;
        for _ in 0..steps {
            let u = w.step();
            max_asym = max_asym.max((u[0] + u[1]).norm());
            out.push((w.agents[1].pos - w.agents[0].pos).norm());
        }
        (out, max_asym)
    }

    fn extrema(series: &[f64]) -> Vec<f64> {
        let mut out = vec![series[0]];
        for i in 1..series.len() - 1 {
            let a = series[i] - series[i - 1];
            let b = series[i + 1] - series[i];
            if a * b < 0.0 {
                out.push(series[i]);
            }
        }
        out
    }

    #[test]
    fn alignment_damps_the_two_agent_oscillation() {
        let (with_align, asym) = distance_series(simplified_pair(1.5, 1.0), 500);
        assert!(asym <= 1e-12, "controls not antisymmetric: {asym}");
        let ext = extrema(&with_align);
        let amps: Vec<f64> =
            ext.windows(2).map(|w| (w[1] - w[0]).abs()).filter(|a| *a > 1e-9).collect();
        assert!(amps.len() >= 2, "expected an oscillation to damp, extrema {ext:?}");
        for pair in amps.windows(2) {
            assert!(pair[1] < pair[0], "amplitudes did not shrink: {amps:?}");
        }

        let (without, _) = distance_series(simplified_pair(1.5, 0.0), 500);
        let ext = extrema(&without);
        let amps: Vec<f64> = ext.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(amps.len() >= 3);
        let first = amps[0];
        assert!(
            amps.iter().all(|a| *a >= 0.9 * first),
            "undamped oscillation lost amplitude: first {first}, amps {amps:?}"
        );
    }

    #[test]
    fn velocity_stays_bounded_under_wild_control() {
        let mut w = simplified_pair(9.0, 1.0);
        for a in &mut w.agents {
            a.limits = Limits { u_max: 1e6, v_max: 0.5 };
        }
        for _ in 0..100 {
            w.step();
            for a in &w.agents {
                assert!(a.speed() <= 0.5 + 1e-9, "speed {} above bound", a.speed());
            }
        }
    }

    #[test]
    fn strict_velocity_bound_shrinks_any_speed() {
        let mut w = zone_world(vec![agent2(0, [0.0, 0.0], [1.0, 0.0], false)]);
        w.options.attraction_growth = AttractionGrowth::Disabled;
        w.options.strict_velocity_bound = true;
        w.step();
        let s = w.agents[0].speed();
        assert!(s < 1.0 && s > 0.9, "expected a slight squash, got {s}");
    }

    #[test]
    fn world_validation_catches_planar_features_in_3d() {
        let a = AgentState::<3>::new(
            0,
            Vector([0.0; 3]),
            Vector([0.0; 3]),
            zones(),
            weights(),
            limits(),
            false,
        );
        let mut w = World::new(vec![a], 0.1, Model::Zone, Measurement::Bearing, 3.0);
        assert!(w.validate().is_ok());
        w.obstacles.push(containment());
        match w.validate() {
            Err(WorldError::PlanarOnly { feature, dimension }) => {
                assert_eq!(feature, "obstacles");
                assert_eq!(dimension, 3);
            }
            other => panic!("expected planar-only error, got {other:?}"),
        }
    }

    #[test]
    fn world_validation_rejects_duplicate_ids_and_bad_dt() {
        let mut w = zone_world(vec![
            agent2(0, [0.0, 0.0], [0.0, 0.0], false),
            agent2(0, [1.0, 0.0], [0.0, 0.0], false),
        ]);
        assert!(matches!(w.validate(), Err(WorldError::DuplicateAgentId(0))));
        w.agents[1].id = 1;
        w.dt = 0.0;
        assert!(matches!(w.validate(), Err(WorldError::BadTimeStep(_))));
    }

    #[test]
    fn coincident_agents_push_apart_in_every_mode() {
        for meas in [Measurement::Position, Measurement::Bearing, Measurement::BearingFd] {
            let mut w = zone_world(vec![
                agent2(0, [1.0, 1.0], [0.0, 0.0], false),
                agent2(1, [1.0, 1.0], [0.0, 0.0], false),
            ]);
            w.measurement = meas;
            let u = w.step();
            assert!(u[0].norm() > 0.1, "mode {meas:?}: no separation push, got {:?}", u[0]);
            let sum = u[0] + u[1];
            assert_abs_diff_eq!(sum.norm(), 0.0, epsilon = 1e-12);
        }
    }
}

