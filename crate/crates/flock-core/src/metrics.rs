//! Run recording and per-step flock metrics: pairwise distance statistics,
//! speeds, control norms, and the proximity-graph component count used to
//! track fragmentation.

use crate::geometry::{Vec2, Vector};
use crate::sim::{Model, World};

/// Snapshot of one recorded instant. Agent columns are sorted by id; the
/// control is the one chosen at this state (zero on the terminal frame,
/// where no further step is taken).
#[derive(Clone, Debug)]
pub struct Frame<const D: usize> {
    pub t: f64,
    pub pos: Vec<Vector<D>>,
    pub vel: Vec<Vector<D>>,
    pub control: Vec<Vector<D>>,
    pub alien_pos: Vec<Vec2>,
    pub alien_vel: Vec<Vec2>,
}

#[derive(Clone, Debug)]
pub struct RunRecording<const D: usize> {
    pub agent_ids: Vec<usize>,
    pub alien_ids: Vec<usize>,
    pub frames: Vec<Frame<D>>,
}

/// Pairwise distance envelope. All three are 0.0 for a single-agent flock
/// (no pairs to measure).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

pub fn pairwise_stats<const D: usize>(positions: &[Vector<D>]) -> DistanceStats {
    let n = positions.len();
    if n < 2 {
        return DistanceStats { min: 0.0, max: 0.0, mean: 0.0 };
    }
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = (positions[j] - positions[i]).norm();
            min = min.min(d);
            max = max.max(d);
            sum += d;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    DistanceStats { min, max, mean: sum / pairs }
}

/// Distance to the closest flockmate per agent; 0.0 entries for a
/// single-agent flock.
pub fn nearest_neighbor_distances<const D: usize>(positions: &[Vector<D>]) -> Vec<f64> {
    let n = positions.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (positions[j] - positions[i]).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Connected components of the proximity graph with an edge wherever
/// d_ij <= max(r_i, r_j): the symmetric closure of per-agent reach radii.
pub fn component_count<const D: usize>(positions: &[Vector<D>], radii: &[f64]) -> usize {
    let n = positions.len();
    assert_eq!(n, radii.len(), "one radius per agent");
    if n == 0 {
        return 0;
    }
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j]
                    && (positions[j] - positions[i]).norm() <= radii[i].max(radii[j])
                {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

/// Per-agent proximity radius for the fragmentation graph, sorted by id:
/// the attraction radius for the zone model, the perception radius for the
/// simplified one.
pub fn proximity_radii<const D: usize>(world: &World<D>) -> Vec<f64> {
    let mut agents: Vec<_> = world.agents.iter().collect();
    agents.sort_by_key(|a| a.id);
    agents
        .iter()
        .map(|a| match world.model {
            Model::Zone => a.zones.attraction,
            Model::Simplified => {
                a.simplified.as_ref().expect("validated: simplified params present").radius
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct StepMetrics {
    pub t: f64,
    pub dist: DistanceStats,
    pub mean_speed: f64,
    pub components: usize,
    /// Per-agent speed, id order.
    pub speeds: Vec<f64>,
    /// Per-agent control norm, id order.
    pub control_norms: Vec<f64>,
}

pub fn frame_metrics<const D: usize>(frame: &Frame<D>, radii: &[f64]) -> StepMetrics {
    let speeds: Vec<f64> = frame.vel.iter().map(|v| v.norm()).collect();
    let mean_speed = if speeds.is_empty() {
        0.0
    } else {
        speeds.iter().sum::<f64>() / speeds.len() as f64
    };
    StepMetrics {
        t: frame.t,
        dist: pairwise_stats(&frame.pos),
        mean_speed,
        components: component_count(&frame.pos, radii),
        speeds,
        control_norms: frame.control.iter().map(|u| u.norm()).collect(),
    }
}

pub fn metrics_table<const D: usize>(rec: &RunRecording<D>, radii: &[f64]) -> Vec<StepMetrics> {
    rec.frames.iter().map(|f| frame_metrics(f, radii)).collect()
}

/// Whole-run digest for summary export.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub min_distance: f64,
    pub mean_final_speed: f64,
    pub max_control_norm: f64,
    /// Maximal intervals with more than one proximity component.
    pub fragmentation_episodes: usize,
}

pub fn summarize(table: &[StepMetrics]) -> RunSummary {
    assert!(!table.is_empty(), "summary of an empty run");
    let min_distance = table.iter().map(|m| m.dist.min).fold(f64::INFINITY, f64::min);
    let max_control_norm = table
        .iter()
        .flat_map(|m| m.control_norms.iter().copied())
        .fold(0.0, f64::max);
    let mut episodes = 0;
    let mut fragmented = false;
    for m in table {
        let now = m.components > 1;
        if now && !fragmented {
            episodes += 1;
        }
        fragmented = now;
    }
    RunSummary {
        min_distance,
        mean_final_speed: table.last().unwrap().mean_speed,
        max_control_norm,
        fragmentation_episodes: episodes,
    }
}

fn capture<const D: usize>(world: &World<D>, order: &[usize]) -> Frame<D> {
    Frame {
        t: world.time,
        pos: order.iter().map(|&i| world.agents[i].pos).collect(),
        vel: order.iter().map(|&i| world.agents[i].vel).collect(),
        control: vec![Vector::ZERO; order.len()],
        alien_pos: world.aliens.iter().map(|a| a.pos).collect(),
        alien_vel: world.aliens.iter().map(|a| a.vel).collect(),
    }
}

/// Steps the world `steps` times, recording the initial state plus one frame
/// per step: steps + 1 frames in total. Each frame carries the control
/// chosen at that state; the terminal frame's controls are zero.
pub fn run<const D: usize>(world: &mut World<D>, steps: usize) -> RunRecording<D> {
    assert!(steps >= 1, "a run needs at least one step");
    let mut order: Vec<usize> = (0..world.agents.len()).collect();
    order.sort_by_key(|&i| world.agents[i].id);
    let agent_ids: Vec<usize> = order.iter().map(|&i| world.agents[i].id).collect();
    let mut alien_ids: Vec<usize> = world.aliens.iter().map(|a| a.id).collect();
    alien_ids.sort_unstable();

    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(capture(world, &order));
    for k in 0..steps {
        let controls = world.step();
        frames[k].control = order.iter().map(|&i| controls[i]).collect();
        frames.push(capture(world, &order));
    }
    RunRecording { agent_ids, alien_ids, frames }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviors::{BehaviorWeights, Limits};
    use crate::perception::ZoneParams;
    use crate::sim::{AgentState, AttractionGrowth, Measurement, Model};
    use approx::assert_abs_diff_eq;

    fn agent(id: usize, pos: [f64; 2]) -> AgentState<2> {
        AgentState::new(
            id,
            Vector(pos),
            Vector([1.0, 0.0]),
            ZoneParams::new(1.5, 3.0, 5.0, 6.0).unwrap(),
            BehaviorWeights {
                separation: 5.0,
                cohesion: 0.75,
                alignment: 0.25,
                strategic: 5.0,
                avoidance: 5.0,
                speed: 0.0,
                gain: 1.0,
            },
            Limits { u_max: 2.0, v_max: 4.0 },
            false,
        )
    }

    #[test]
    fn pairwise_stats_on_a_right_triangle() {
        let pos = vec![Vector([0.0, 0.0]), Vector([3.0, 0.0]), Vector([0.0, 4.0])];
        let s = pairwise_stats(&pos);
        assert_eq!(s.min, 3.0);
        assert_eq!(s.max, 5.0);
        assert_abs_diff_eq!(s.mean, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn single_agent_stats_are_zero() {
        let s = pairwise_stats(&[Vector([7.0, 7.0])]);
        assert_eq!(s, DistanceStats { min: 0.0, max: 0.0, mean: 0.0 });
        assert_eq!(nearest_neighbor_distances(&[Vector([7.0, 7.0])]), vec![0.0]);
    }

    #[test]
    fn nearest_neighbor_picks_the_closest() {
        let pos = vec![Vector([0.0, 0.0]), Vector([1.0, 0.0]), Vector([5.0, 0.0])];
        assert_eq!(nearest_neighbor_distances(&pos), vec![1.0, 1.0, 4.0]);
    }

    #[test]
    fn components_split_and_merge_by_radius() {
        let pos = vec![
            Vector([0.0, 0.0]),
            Vector([2.0, 0.0]),
            Vector([10.0, 0.0]),
            Vector([12.0, 0.0]),
        ];
        assert_eq!(component_count(&pos, &[3.0; 4]), 2);
        assert_eq!(component_count(&pos, &[8.0; 4]), 1);
        assert_eq!(component_count(&pos, &[1.0; 4]), 4);
        // Asymmetric radii connect through the larger of the two.
        assert_eq!(component_count(&pos, &[8.0, 1.0, 1.0, 1.0]), 3);
    }

    #[test]
    fn run_records_steps_plus_one_frames() {
        let mut w = World::new(
            vec![agent(0, [0.0, 0.0]), agent(1, [2.0, 0.0])],
            0.1,
            Model::Zone,
            Measurement::Bearing,
            0.0,
        );
        w.options.attraction_growth = AttractionGrowth::Disabled;
        let rec = run(&mut w, 5);
        assert_eq!(rec.frames.len(), 6);
        assert_eq!(rec.agent_ids, vec![0, 1]);
        // Terminal frame: zero control by convention.
        assert!(rec.frames[5].control.iter().all(|u| u.norm() == 0.0));
        // Non-terminal: the separation push at 2 m < conflict radius.
        assert!(rec.frames[0].control[0].norm() > 0.0);
        for (k, f) in rec.frames.iter().enumerate() {
            assert_abs_diff_eq!(f.t, 0.1 * k as f64, epsilon = 1e-12);
        }
    }

    #[test]
    #[should_panic(expected = "at least one step")]
    fn zero_step_runs_are_rejected() {
        let mut w = World::new(
            vec![agent(0, [0.0, 0.0])],
            0.1,
            Model::Zone,
            Measurement::Bearing,
            0.0,
        );
        run(&mut w, 0);
    }

    #[test]
    fn summary_counts_fragmentation_episodes() {
        let mk = |components| StepMetrics {
            t: 0.0,
            dist: DistanceStats { min: 1.0, max: 2.0, mean: 1.5 },
            mean_speed: 3.0,
            components,
            speeds: vec![3.0],
            control_norms: vec![0.5],
        };
        let table: Vec<StepMetrics> = [1, 2, 2, 1, 1, 3, 1].into_iter().map(mk).collect();
        let s = summarize(&table);
        assert_eq!(s.fragmentation_episodes, 2);
        assert_eq!(s.min_distance, 1.0);
        assert_eq!(s.mean_final_speed, 3.0);
        assert_eq!(s.max_control_norm, 0.5);
    }
}
