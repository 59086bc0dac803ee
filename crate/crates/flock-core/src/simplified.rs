//! Single-perception-zone flocking: one combined separation–cohesion rule
//! whose equilibrium spacing adapts to the live neighbor count, plus
//! alignment. Homogeneous controller in both measurement routes.

use crate::geometry::{Vector, EPS_ZERO};
use crate::perception::PairMeasurement;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplifiedParams {
    /// Perception radius: every flockmate within it is a neighbor.
    pub radius: f64,
    /// Spacing scale; the equilibrium distance is beta * |N| * radius.
    pub beta: f64,
    pub w_sep_cohesion: f64,
    pub w_alignment: f64,
    pub gain: f64,
}

impl SimplifiedParams {
    /// Defaults beta to 1/radius and all weights to one.
    pub fn homogeneous(radius: f64) -> Self {
        SimplifiedParams {
            radius,
            beta: 1.0 / radius,
            w_sep_cohesion: 1.0,
            w_alignment: 1.0,
            gain: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(format!("perception radius must be finite and > 0, got {}", self.radius));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(format!("beta must be finite and > 0, got {}", self.beta));
        }
        for (name, w) in [
            ("separation-cohesion", self.w_sep_cohesion),
            ("alignment", self.w_alignment),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(format!("{name} weight must be finite and >= 0, got {w}"));
            }
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(format!("gain must be finite and > 0, got {}", self.gain));
        }
        Ok(())
    }

    /// Equilibrium spacing for a given neighbor count.
    pub fn adaptive_spacing(&self, neighbor_count: usize) -> f64 {
        self.beta * neighbor_count as f64 * self.radius
    }
}

/// Σ w·(d − β|N|r)·b over all perceived neighbors.
pub fn separation_cohesion<const D: usize>(
    meas: &[(PairMeasurement<D>, f64)],
    params: &SimplifiedParams,
    neighbor_count: usize,
) -> Vector<D> {
    separation_cohesion_spaced(meas, params.adaptive_spacing(neighbor_count))
}

/// Same rule with the equilibrium spacing supplied directly (used when the
/// neighbor count is smoothed instead of live).
pub fn separation_cohesion_spaced<const D: usize>(
    meas: &[(PairMeasurement<D>, f64)],
    spacing: f64,
) -> Vector<D> {
    let mut acc = Vector::ZERO;
    for (m, w) in meas {
        acc += m.bearing * (*w * (m.distance - spacing));
    }
    acc
}

/// Weighted mean of d·(ḃ + ḋ·b): the mean relative velocity. Zero on an
/// empty neighborhood.
pub fn simplified_alignment<const D: usize>(meas: &[(PairMeasurement<D>, f64)]) -> Vector<D> {
    let w_sum: f64 = meas.iter().map(|(_, w)| *w).sum();
    if meas.is_empty() || w_sum <= 0.0 {
        return Vector::ZERO;
    }
    let mut acc = Vector::ZERO;
    for (m, w) in meas {
        acc += m.relative_velocity() * *w;
    }
    acc / w_sum
}

/// Uniform-weight control from measurements: gain·(e_sc + e_a), unsaturated,
/// with the rule weights from `params` applied to every pair.
pub fn control_uniform<const D: usize>(
    meas: &[PairMeasurement<D>],
    params: &SimplifiedParams,
) -> Vector<D> {
    let sc: Vec<(PairMeasurement<D>, f64)> =
        meas.iter().map(|m| (*m, params.w_sep_cohesion)).collect();
    let al: Vec<(PairMeasurement<D>, f64)> =
        meas.iter().map(|m| (*m, params.w_alignment)).collect();
    let e_sc = separation_cohesion(&sc, params, meas.len());
    let e_a = simplified_alignment(&al);
    (e_sc + e_a) * params.gain
}

/// Position/velocity-route versions of the same rules.
pub mod positional {
    use super::*;

    /// `rel` entries are (p_other − p_self, w).
    pub fn separation_cohesion<const D: usize>(
        rel: &[(Vector<D>, f64)],
        params: &SimplifiedParams,
        neighbor_count: usize,
    ) -> Vector<D> {
        separation_cohesion_spaced(rel, params.adaptive_spacing(neighbor_count))
    }

    /// Positional twin of the spacing-direct rule.
    pub fn separation_cohesion_spaced<const D: usize>(
        rel: &[(Vector<D>, f64)],
        spacing: f64,
    ) -> Vector<D> {
        let mut acc = Vector::ZERO;
        for (dp, w) in rel {
            let n = dp.norm();
            if n <= EPS_ZERO {
                continue;
            }
            acc += (*dp - *dp * (spacing / n)) * *w;
        }
        acc
    }

    /// `dvel` entries are (v_other − v_self, w).
    pub fn alignment<const D: usize>(dvel: &[(Vector<D>, f64)]) -> Vector<D> {
        let w_sum: f64 = dvel.iter().map(|(_, w)| *w).sum();
        if dvel.is_empty() || w_sum <= 0.0 {
            return Vector::ZERO;
        }
        let mut acc = Vector::ZERO;
        for (dv, w) in dvel {
            acc += *dv * *w;
        }
        acc / w_sum
    }

    /// Uniform-weight control from raw relative states.
    pub fn control_uniform<const D: usize>(
        rel: &[Vector<D>],
        dvel: &[Vector<D>],
        params: &SimplifiedParams,
    ) -> Vector<D> {
        let sc: Vec<(Vector<D>, f64)> =
            rel.iter().map(|r| (*r, params.w_sep_cohesion)).collect();
        let al: Vec<(Vector<D>, f64)> =
            dvel.iter().map(|v| (*v, params.w_alignment)).collect();
        let e_sc = separation_cohesion(&sc, params, rel.len());
        let e_a = alignment(&al);
        (e_sc + e_a) * params.gain
    }
}
