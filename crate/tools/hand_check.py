#!/usr/bin/env python3
"""Independent hand evaluation of every non-obvious constant frozen in the
Rust unit tests.

Each block below recomputes one expected value from first principles (plain
arithmetic on the defining formula, no shared helpers, no library code) so the
numbers in the test suite can be audited without trusting the implementation.

Run:  python3 tools/hand_check.py > tools/hand_check.expected.txt
The committed hand_check.expected.txt must match this script's output exactly;
a test re-runs the script and diffs when python3 is available.
"""

import math


def show(label, *values):
    flat = []
    for v in values:
        if isinstance(v, (tuple, list)):
            flat.extend(v)
        else:
            flat.append(v)
    print(label + " = " + ", ".join(repr(float(v)) for v in flat))


print("# geometry")

# Rotation by theta acting on (x, y): (cos t * x - sin t * y, sin t * x + cos t * y).
t = -math.pi / 2
show("rotate_quarter_cw_of_unit_x", (math.cos(t) * 1 - math.sin(t) * 0,
                                     math.sin(t) * 1 + math.cos(t) * 0))
t = math.pi / 2
show("rotate_quarter_ccw_of_unit_x", (math.cos(t) * 1 - math.sin(t) * 0,
                                      math.sin(t) * 1 + math.cos(t) * 0))

# Closest boundary point: square with corners (10,10) and (20,20), query (5,15).
# Feet on the four edges: (10,15) d=5; (15,20) d=sqrt(125); (20,15) d=15; (15,10) d=sqrt(125).
show("closest_point_square_outside_left", (10.0, 15.0))
# Query (15,15), the exact center: all four edge feet are at distance 5; the
# earliest edge in winding order (10,10)->(10,20) wins, foot (10,15).
show("closest_point_square_center_tiebreak", (10.0, 15.0))

# Segment ((0,15),(30,15)) against the same square: crossings at x=10 and x=20,
# both at y=15; nearest to the segment start is x=10.
show("segment_cross_square_entry", (10.0, 15.0))
# Segment ((15,15),(15,25)) starting inside: single boundary crossing at y=20.
show("segment_exit_square_top", (15.0, 20.0))

# Norm rescale to cap*tanh(norm/cap): inputs (4,0) cap 4, and the two control
# compositions used later, 2*tanh(2.5) and 2*tanh(0.05).
show("tanh_rescale_4_cap4", 4.0 * math.tanh(4.0 / 4.0))
show("tanh_rescale_5_cap2", 2.0 * math.tanh(5.0 / 2.0))
show("tanh_rescale_0p1_cap2", 2.0 * math.tanh(0.1 / 2.0))

print()
print("# perception")

# Bearing/distance pair for p_i=(0,0) v_i=(0,0), p_j=(2,0) v_j=(1,0):
# d = |p_j - p_i|, b = (p_j - p_i)/d, d_rate = b . (v_j - v_i),
# b_rate = ((v_j - v_i) - d_rate*b)/d.
d = math.hypot(2.0, 0.0)
b = (2.0 / d, 0.0 / d)
dv = (1.0, 0.0)
d_rate = b[0] * dv[0] + b[1] * dv[1]
b_rate = ((dv[0] - d_rate * b[0]) / d, (dv[1] - d_rate * b[1]) / d)
show("measure_radial_distance", d)
show("measure_radial_bearing", b)
show("measure_radial_distance_rate", d_rate)
show("measure_radial_bearing_rate", b_rate)

# Same geometry, tangential motion v_j=(0,2).
dv = (0.0, 2.0)
d_rate = b[0] * dv[0] + b[1] * dv[1]
b_rate = ((dv[0] - d_rate * b[0]) / d, (dv[1] - d_rate * b[1]) / d)
show("measure_tangential_distance_rate", d_rate)
show("measure_tangential_bearing_rate", b_rate)

# Avoidance probe fan for vel=(1,0), c=3, alpha=0.5:
# h = c*vel/|vel|; cw flank = alpha * R(-pi/2) h; ccw flank = alpha * R(pi/2) h.
show("triangle_h_for_unit_x", (3.0, 0.0))
show("triangle_cw_flank_unit_x", (0.5 * 3.0 * 0.0, 0.5 * 3.0 * -1.0))
show("triangle_ccw_flank_unit_x", (0.5 * 3.0 * 0.0, 0.5 * 3.0 * 1.0))
# vel=(0,5), c=3, alpha=1: h=(0,3); R(-pi/2)(0,1)=(1,0); R(pi/2)(0,1)=(-1,0).
show("triangle_h_for_unit_y", (0.0, 3.0))
show("triangle_cw_flank_unit_y", (3.0, 0.0))
show("triangle_ccw_flank_unit_y", (-3.0, 0.0))

# Probe hit bookkeeping: agent (8,15), heading probe to (11,15), square
# (10,10)-(20,20): nearest boundary point to the agent is (10,15).
show("probe_hit_point_near_square", (10.0, 15.0))
# Agent (25,0.5), vel (1,-1)/sqrt2, c=3: heading probe end y-coordinate
# 0.5 - 3/sqrt(2) < 0 crosses the wall y=0; perpendicular foot is (25,0).
show("probe_heading_end_y", 0.5 - 3.0 / math.sqrt(2.0))
show("probe_wall_hit_point", (25.0, 0.0))

# Attraction radius growth: start 5.0, step 0.5, nearest mate at 7.3:
# smallest 5.0 + k*0.5 that is >= 7.3.
a = 5.0
while a < 7.3:
    a += 0.5
show("grown_attraction_radius", a)

print()
print("# zone behaviors")

# Separation: sum of w*(d - c)*b over near neighbors.
show("separation_single_inside", (5.0 * (2.0 - 3.0) * 1.0, 5.0 * (2.0 - 3.0) * 0.0))

# Cohesion: weighted average of displacements d*b; raw then unit-normalized.
raw = ((4.0 + 0.0) / 2.0, (0.0 + 4.0) / 2.0)
show("cohesion_two_neighbors_raw", raw)
n = math.hypot(*raw)
show("cohesion_two_neighbors_unit", (raw[0] / n, raw[1] / n))

# Alignment: weighted average of relative velocities (2,0) and (0,2).
show("alignment_two_neighbors", ((2.0 + 0.0) / 2.0, (0.0 + 2.0) / 2.0))

# Flight-from-intruder term: w*(d - s)*b with d=5.5, s=6, w=5, b=(0,1).
show("strategic_single_inside", (5.0 * (5.5 - 6.0) * 0.0, 5.0 * (5.5 - 6.0) * 1.0))

# Avoidance term: w*(d - c)*b with d=1, c=3, w=5, b=(1,0).
show("avoidance_close_hit", (5.0 * (1.0 - 3.0) * 1.0, 5.0 * (1.0 - 3.0) * 0.0))

# Speed regulation term: w*(v_d * v/|v| - v) with v=(4,0), v_d=3, w=5.
show("speed_alignment_overspeed", (5.0 * (3.0 * 1.0 - 4.0), 5.0 * (3.0 * 0.0 - 0.0)))

# Dead-reckoned velocity estimate: one Euler step (1,0) + 0.1*(2,0).
show("velocity_estimate_step", (1.0 + 0.1 * 2.0, 0.0))

# Control composition: cap*tanh(|g*e|/cap) along e for e=(-5,0), g=1, cap=2,
# then the near-identity case e=(0.1,0).
m = 2.0 * math.tanh(5.0 / 2.0)
show("control_sat_ls_only", (-m, 0.0))
m = 2.0 * math.tanh(0.1 / 2.0)
show("control_near_identity", (m, 0.0))

print()
print("# simplified model")

# Adaptive spacing alpha*r = beta*|N|*r.
show("adaptive_spacing_one_neighbor", 0.1 * 1 * 10.0)
show("adaptive_spacing_three_neighbors", 0.1 * 3 * 10.0)
# Term for one neighbor at d=5 bearing (1,0), |N|=1: (5 - 1)*(1,0).
show("sep_cohesion_one_neighbor", ((5.0 - 0.1 * 1 * 10.0) * 1.0, 0.0))
# Term at d=2 bearing (0,1) with |N|=3: (2 - 3)*(0,1).
show("sep_cohesion_term_three_neighbors", (0.0, (2.0 - 0.1 * 3 * 10.0) * 1.0))
# Two stationary agents 5 m apart, r=10, beta=0.1: u = e_sc = (4,0), e_a = 0.
show("two_agent_control", ((5.0 - 0.1 * 1 * 10.0) * 1.0, 0.0))

print()
print("# sim step")

# Single informed agent, vel=(4,0), v_d=3, w_ga=5, g=1, u_max=2, dt=0.1:
# e_ga=(-5,0); u = 2*tanh(5/2) along (-1,0); vel' = vel + dt*u; pos' advances
# by dt*vel'.
u = 2.0 * math.tanh(5.0 / 2.0)
vel1 = 4.0 - 0.1 * u
show("informed_agent_u", (-u, 0.0))
show("informed_agent_vel_after", (vel1, 0.0))
show("informed_agent_pos_delta", (0.1 * vel1, 0.0))

# Alien pursuit: alien (0,0), target (5,0), speed 3, dt 0.1 -> (0.3, 0).
show("alien_pursuit_step", (3.0 * 1.0 * 0.1, 0.0))

print()
print("# run bookkeeping")

# Row counts are t/dt + 1 (initial state plus one row per step).
show("rows_100s_at_0p1", 100.0 / 0.1 + 1)
show("rows_10s_at_0p1", 10.0 / 0.1 + 1)
