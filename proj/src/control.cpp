#include "wayfind/control.hpp"

#include <cmath>

namespace wayfind::ctl {

double distance(const sim::Position& a, const sim::Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

sim::Action control_action(const PController& c, const sim::Position& current,
                           const sim::Position& target) {
    return sim::Action(c.kp * (target.x - current.x), c.kp * (target.y - current.y));
}

TrackResult track_waypoints(sim::World& world, const PController& c,
                            const std::vector<sim::Position>& waypoints,
                            double time_limit) {
    TrackResult res;
    res.trajectory.push_back(world.pos);
    size_t i = 0;
    while (i < waypoints.size()) {
        if (world.clock > time_limit) return res;  // timeout -> fail
        if (!world.alive) return res;              // death -> fail
        if (distance(world.pos, waypoints[i]) < c.eps_wp) {
            ++i;
            continue;
        }
        world.step(control_action(c, world.pos, waypoints[i]));
        res.trajectory.push_back(world.pos);
    }
    res.success = world.alive && world.clock <= time_limit;
    return res;
}

}  // namespace wayfind::ctl
