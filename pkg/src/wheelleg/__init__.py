"""Kinematics toolkit for transformable wheel-leg stair-climbing robots.

Modules:
    geometry  two- and three-spoke transformation linkages, wheel outlines
    stairs    stair presets, slope, classification, staircase profiles
    rollout   no-slip rollout over stairs, body pose, wheelbase optimization
    gait      differential drive and clock-driven legged trajectories
    metrics   telemetry parsing and stability/efficiency metrics
    cli       command-line front end
"""

__version__ = "0.1.0"
