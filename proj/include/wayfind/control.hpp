#pragma once

#include <vector>

#include "wayfind/world.hpp"

namespace wayfind::ctl {

struct PController {
    double kp = 2.0;      // proportional gain
    double eps_wp = 0.3;  // waypoint-arrival radius, tiles
};

/// a = clamp(kp * (target - current)) componentwise; x error maps to
/// forward, y error to strafe.
sim::Action control_action(const PController& c, const sim::Position& current,
                           const sim::Position& target);

struct TrackResult {
    bool success = false;  // all waypoints reached within the time limit, alive
    std::vector<sim::Position> trajectory;
};

/// Waypoint-tracking loop: steer to each waypoint in turn, advancing when
/// within eps_wp. Timeout or death is a fail outcome, not an error.
TrackResult track_waypoints(sim::World& world, const PController& c,
                            const std::vector<sim::Position>& waypoints,
                            double time_limit);

double distance(const sim::Position& a, const sim::Position& b);

}  // namespace wayfind::ctl
