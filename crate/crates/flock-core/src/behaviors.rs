//! The behavioral deviation vectors for the zone-based controller, in two
//! routes: bearing/distance measurements, and raw relative states. The two
//! routes are kept as separate arithmetic paths on purpose; the test suite
//! cross-checks them against each other.

use crate::geometry::{tanh_saturate, Bounds, Vec2, Vector, EPS_ZERO};
use crate::perception::PairMeasurement;

/// Per-rule weights and the controller gain for one agent. The per-rule
/// scalars apply uniformly to that agent's pairs; heterogeneous per-pair
/// weighting is expressed by the weight slot in each measurement list entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BehaviorWeights {
    pub separation: f64,
    pub cohesion: f64,
    pub alignment: f64,
    pub strategic: f64,
    pub avoidance: f64,
    pub speed: f64,
    pub gain: f64,
}

impl BehaviorWeights {
    pub fn validate(&self) -> Result<(), String> {
        let named = [
            ("separation", self.separation),
            ("cohesion", self.cohesion),
            ("alignment", self.alignment),
            ("strategic", self.strategic),
            ("avoidance", self.avoidance),
            ("speed", self.speed),
        ];
        for (name, w) in named {
            if !w.is_finite() || w < 0.0 {
                return Err(format!("{name} weight must be finite and >= 0, got {w}"));
            }
        }
        if !(self.gain > 0.0) || !self.gain.is_finite() {
            return Err(format!("gain must be finite and > 0, got {}", self.gain));
        }
        Ok(())
    }
}

/// The six deviation vectors for one agent at one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationSet<const D: usize> {
    pub separation: Vector<D>,
    pub cohesion: Vector<D>,
    pub alignment: Vector<D>,
    pub strategic: Vector<D>,
    pub avoidance: Vector<D>,
    pub speed: Vector<D>,
}

impl<const D: usize> DeviationSet<D> {
    pub const ZERO: Self = DeviationSet {
        separation: Vector::ZERO,
        cohesion: Vector::ZERO,
        alignment: Vector::ZERO,
        strategic: Vector::ZERO,
        avoidance: Vector::ZERO,
        speed: Vector::ZERO,
    };

    pub fn total(&self) -> Vector<D> {
        self.separation + self.cohesion + self.alignment + self.strategic + self.avoidance + self.speed
    }

    /// Everything except the speed-regulation term.
    pub fn flock_terms(&self) -> Vector<D> {
        self.separation + self.cohesion + self.alignment + self.strategic + self.avoidance
    }
}

/// Σ w·(d − c)·b over near-field neighbors: pushes inward-of-c neighbors away
/// and outer ones closer to the conflict radius.
pub fn local_separation<const D: usize>(meas: &[(PairMeasurement<D>, f64)], c: f64) -> Vector<D> {
    let mut acc = Vector::ZERO;
    for (m, w) in meas {
        acc += m.bearing * (*w * (m.distance - c));
    }
    acc
}

/// Weighted mean of neighbor displacements d·b. Raw mode returns the mean;
/// normalized mode rescales it to unit length (zero stays zero) so the caller
/// can apply its own cohesion gain. None when the neighborhood is empty or
/// carries no weight.
pub fn local_cohesion<const D: usize>(
    meas: &[(PairMeasurement<D>, f64)],
    normalize: bool,
) -> Option<Vector<D>> {
    let w_sum: f64 = meas.iter().map(|(_, w)| *w).sum();
    if meas.is_empty() || w_sum <= 0.0 {
        return None;
    }
    let mut acc = Vector::ZERO;
    for (m, w) in meas {
        acc += m.bearing * (*w * m.distance);
    }
    let mean = acc / w_sum;
    Some(if normalize { mean.normalized() } else { mean })
}

/// Weighted mean of d·(ḃ + ḋ·b) over far-field neighbors, which reconstructs
/// the mean relative velocity. None when the neighborhood is empty.
pub fn local_alignment<const D: usize>(meas: &[(PairMeasurement<D>, f64)]) -> Option<Vector<D>> {
    let w_sum: f64 = meas.iter().map(|(_, w)| *w).sum();
    if meas.is_empty() || w_sum <= 0.0 {
        return None;
    }
    let mut acc = Vector::ZERO;
    for (m, w) in meas {
        acc += m.relative_velocity() * *w;
    }
    Some(acc / w_sum)
}

/// Σ w·(d − s)·b over watched intruders: always points away from an intruder
/// inside the surveillance radius.
pub fn strategic_separation<const D: usize>(meas: &[(PairMeasurement<D>, f64)], s: f64) -> Vector<D> {
    let mut acc = Vector::ZERO;
    for (m, w) in meas {
        acc += m.bearing * (*w * (m.distance - s));
    }
    acc
}

/// Σ w·(d − c)·b over detected obstacle/wall points; zero with no hits.
pub fn obstacle_avoidance<const D: usize>(
    hits: &[(Vector<D>, f64)],
    c: f64,
    w_oa: f64,
) -> Vector<D> {
    let mut acc = Vector::ZERO;
    for (bearing, distance) in hits {
        acc += *bearing * (w_oa * (distance - c));
    }
    acc
}

/// Proximity pressure from the four arena walls: one avoidance term per wall
/// whose plane lies within the conflict radius, with the distance taken
/// signed (negative past the line). Inside the arena this is the ordinary
/// w·(d − c) push off a nearby wall; outside, (d − c) only grows more
/// negative while the bearing still points at the plane, so the term keeps
/// shoving the agent back in. No heading gate on purpose.
pub fn boundary_pressure(pos: Vec2, b: &Bounds<2>, c: f64, w_oa: f64) -> Vec2 {
    let mut acc = Vec2::ZERO;
    for k in 0..2 {
        let mut toward_low: Vec2 = Vector::ZERO;
        toward_low[k] = -1.0;
        let d_low = pos[k] - b.min[k];
        if d_low <= c {
            acc += toward_low * (w_oa * (d_low - c));
        }
        let d_high = b.max[k] - pos[k];
        if d_high <= c {
            acc += toward_low * (-w_oa * (d_high - c));
        }
    }
    acc
}

/// w·(v_d·v̂ref/‖v̂ref‖ − v̂ref): drives the reference velocity's magnitude
/// toward the desired speed. Zero when the weight is zero or no direction is
/// defined.
pub fn global_speed_alignment<const D: usize>(
    v_ref: Vector<D>,
    v_desired: f64,
    w_ga: f64,
) -> Vector<D> {
    let n = v_ref.norm();
    if w_ga == 0.0 || n <= EPS_ZERO {
        return Vector::ZERO;
    }
    (v_ref * (v_desired / n) - v_ref) * w_ga
}

/// Dead-reckoned own-velocity estimate for agents without absolute velocity
/// sensing; integrates the unsaturated auxiliary control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityEstimate<const D: usize> {
    pub v_hat: Vector<D>,
    pub v_hat_prev: Vector<D>,
}

impl<const D: usize> VelocityEstimate<D> {
    pub fn new(initial: Vector<D>) -> Self {
        VelocityEstimate { v_hat: initial, v_hat_prev: initial }
    }

    pub fn update(&mut self, u_aux: Vector<D>, dt: f64) {
        assert!(dt > 0.0, "estimator step must be positive, got {dt}");
        self.v_hat_prev = self.v_hat;
        self.v_hat = self.v_hat_prev + u_aux * dt;
    }
}

pub fn update_velocity_estimate<const D: usize>(
    mut est: VelocityEstimate<D>,
    u_aux: Vector<D>,
    dt: f64,
) -> VelocityEstimate<D> {
    est.update(u_aux, dt);
    est
}

/// The unsaturated auxiliary control: gain times the five flock terms.
pub fn aux_control<const D: usize>(dev: &DeviationSet<D>, gain: f64) -> Vector<D> {
    dev.flock_terms() * gain
}

/// Full control: gain times all six deviations, squashed below u_max.
pub fn compose_control<const D: usize>(dev: &DeviationSet<D>, gain: f64, u_max: f64) -> Vector<D> {
    assert!(gain > 0.0, "controller gain must be positive, got {gain}");
    tanh_saturate(dev.total() * gain, u_max)
}

/// Acceleration and speed ceilings for one agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub u_max: f64,
    pub v_max: f64,
}

impl Limits {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.u_max > 0.0 && self.u_max.is_finite()) {
            return Err(format!("max acceleration must be finite and > 0, got {}", self.u_max));
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return Err(format!("max speed must be finite and > 0, got {}", self.v_max));
        }
        Ok(())
    }
}

/// Speed ceiling policy. The squash engages only above v_max by default;
/// `always` applies it unconditionally (which strictly shrinks any nonzero
/// velocity and so fights convergence to a desired cruise speed).
pub fn bound_velocity<const D: usize>(v: Vector<D>, v_max: f64, always: bool) -> Vector<D> {
    if always || v.norm() > v_max {
        tanh_saturate(v, v_max)
    } else {
        v
    }
}

/// Deviation rules computed from raw relative states instead of
/// bearing/distance measurements. `rel` entries are (p_other − p_self, w);
/// `dvel` entries are (v_other − v_self, w).
pub mod positional {
    use super::*;

    pub fn local_separation<const D: usize>(rel: &[(Vector<D>, f64)], c: f64) -> Vector<D> {
        let mut acc = Vector::ZERO;
        for (dp, w) in rel {
            let n = dp.norm();
            if n <= EPS_ZERO {
                continue;
            }
            acc += (*dp - *dp * (c / n)) * *w;
        }
        acc
    }

    pub fn local_cohesion<const D: usize>(
        rel: &[(Vector<D>, f64)],
        normalize: bool,
    ) -> Option<Vector<D>> {
        let w_sum: f64 = rel.iter().map(|(_, w)| *w).sum();
        if rel.is_empty() || w_sum <= 0.0 {
            return None;
        }
        let mut acc = Vector::ZERO;
        for (dp, w) in rel {
            acc += *dp * *w;
        }
        let mean = acc / w_sum;
        Some(if normalize { mean.normalized() } else { mean })
    }

    pub fn local_alignment<const D: usize>(dvel: &[(Vector<D>, f64)]) -> Option<Vector<D>> {
        let w_sum: f64 = dvel.iter().map(|(_, w)| *w).sum();
        if dvel.is_empty() || w_sum <= 0.0 {
            return None;
        }
        let mut acc = Vector::ZERO;
        for (dv, w) in dvel {
            acc += *dv * *w;
        }
        Some(acc / w_sum)
    }

    pub fn strategic_separation<const D: usize>(rel: &[(Vector<D>, f64)], s: f64) -> Vector<D> {
        let mut acc = Vector::ZERO;
        for (dq, w) in rel {
            let n = dq.norm();
            if n <= EPS_ZERO {
                continue;
            }
            acc += (*dq - *dq * (s / n)) * *w;
        }
        acc
    }

    /// `rel_hits` entries are (hit_point − p_self).
    pub fn obstacle_avoidance<const D: usize>(
        rel_hits: &[Vector<D>],
        c: f64,
        w_oa: f64,
    ) -> Vector<D> {
        let mut acc = Vector::ZERO;
        for db in rel_hits {
            let n = db.norm();
            if n <= EPS_ZERO {
                continue;
            }
            acc += (*db - *db * (c / n)) * w_oa;
        }
        acc
    }
}
