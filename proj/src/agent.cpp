#include "wayfind/agent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace wayfind::agent {

using nlohmann::json;

std::vector<sim::Position> infer_waypoints(sim::World& world,
                                           const demo::Demonstration& d,
                                           const search::SearchSpec& spec,
                                           const vision::Kernel& kern, bool noise) {
    std::vector<sim::Position> waypoints;
    sim::Position center = world.map.spawn;  // r_0
    for (size_t i = 1; i < d.frames.size(); ++i) {
        search::Objective obj =
            search::image_objective(world, spec, d.frames[i], kern, noise);
        try {
            search::SearchResult res = search::grid_search(center, spec, obj);
            center = res.best;
        } catch (const search::NoFeasibleCandidate&) {
            throw search::NoFeasibleCandidate("no feasible candidate at waypoint " +
                                              std::to_string(i));
        }
        waypoints.push_back(center);
    }
    return waypoints;
}

namespace {

bool at_goal(const sim::World& world) {
    return ctl::distance(world.pos, world.map.goal_center()) <= kGoalRadius;
}

/// Steer toward a target; true if arrived within eps_wp before the budget
/// (simulated seconds) runs out.
bool navigate_to(sim::World& world, const ctl::PController& c,
                 const sim::Position& target, double budget,
                 std::vector<sim::Position>* traj) {
    double deadline = world.clock + budget;
    while (ctl::distance(world.pos, target) >= c.eps_wp) {
        if (!world.alive || world.clock >= deadline) return false;
        world.step(ctl::control_action(c, world.pos, target));
        if (traj) traj->push_back(world.pos);
    }
    return true;
}

}  // namespace

MissionReport run_mission_algorithm2(sim::World& world, const demo::Demonstration& d,
                                     const search::SearchSpec& spec,
                                     const ctl::PController& c,
                                     const vision::Kernel& kern, double time_limit,
                                     bool noise) {
    MissionReport rep;
    rep.demo_traj = d.positions;

    std::uint64_t before = world.interactions;
    rep.waypoints = infer_waypoints(world, d, spec, kern, noise);
    rep.interactions_inference = world.interactions - before;

    world.restart();
    before = world.interactions;
    ctl::TrackResult track = ctl::track_waypoints(world, c, rep.waypoints, time_limit);
    rep.interactions_tracking = world.interactions - before;
    rep.interactions_total = rep.interactions_inference + rep.interactions_tracking;
    rep.agent_traj = track.trajectory;
    rep.sim_time = world.clock;
    rep.success = track.success && at_goal(world);
    return rep;
}

MissionReport run_mission_algorithm1(sim::World& world, const demo::Demonstration& d,
                                     const search::SearchSpec& spec,
                                     const ctl::PController& c,
                                     const vision::Kernel& kern, bool noise,
                                     double candidate_budget) {
    MissionReport rep;
    rep.demo_traj = d.positions;

    std::uint64_t before = world.interactions;
    rep.agent_traj.push_back(world.pos);
    sim::Position center = world.map.spawn;

    int n = static_cast<int>(std::floor(spec.radius / spec.step + 1e-9));
    for (size_t i = 1; i < d.frames.size() && world.alive; ++i) {
        bool found = false;
        sim::Position best{};
        double best_val = 0.0;
        for (int ix = -n; ix <= n; ++ix) {
            for (int jy = -n; jy <= n; ++jy) {
                sim::Position cand{center.x + ix * spec.step, center.y + jy * spec.step};
                if (!world.map.in_bounds(cand) || !world.map.traversable(cand)) continue;
                if (!navigate_to(world, c, cand, candidate_budget, &rep.agent_traj)) {
                    ++rep.skipped_candidates;
                    continue;
                }
                std::vector<vision::Image> frames;
                for (int k = 0; k < spec.n_avg; ++k) frames.push_back(world.render(noise));
                double v = vision::dist(d.frames[i], vision::average(frames), kern);
                if (!found || v < best_val) {
                    best = cand;
                    best_val = v;
                    found = true;
                }
            }
        }
        if (!found) break;
        navigate_to(world, c, best, candidate_budget, &rep.agent_traj);
        center = best;
        rep.waypoints.push_back(best);
    }

    rep.interactions_inference = world.interactions - before;
    rep.interactions_total = rep.interactions_inference;
    rep.sim_time = world.clock;
    rep.success = world.alive && at_goal(world);
    return rep;
}

MissionReport run_baseline_sweep(sim::World& world, std::uint64_t interaction_budget) {
    MissionReport rep;
    std::uint64_t before = world.interactions;
    bool found = false;
    for (int y = 1; y < world.map.height - 1 && !found; ++y) {
        for (int k = 1; k < world.map.width - 1; ++k) {
            int x = (y % 2 == 1) ? k : world.map.width - 1 - k;  // serpentine
            if (!world.map.traversable_cell(x, y)) continue;
            if (world.interactions - before >= interaction_budget)
                throw BudgetExhausted("baseline sweep exceeded interaction budget");
            world.teleport({x + 0.5, y + 0.5});
            world.render(false);
            rep.agent_traj.push_back(world.pos);
            if (world.map.cell_of(world.pos) == world.map.goal_cell) {
                found = true;
                break;
            }
        }
    }
    rep.interactions_inference = world.interactions - before;
    rep.interactions_total = rep.interactions_inference;
    rep.success = found;
    return rep;
}

json report_to_json(const MissionReport& r) {
    auto positions = [](const std::vector<sim::Position>& ps) {
        json a = json::array();
        for (const auto& p : ps) a.push_back({p.x, p.y});
        return a;
    };
    return json{{"U", r.success ? "success" : "fail"},
                {"waypoints", positions(r.waypoints)},
                {"agent_trajectory", positions(r.agent_traj)},
                {"demo_trajectory", positions(r.demo_traj)},
                {"interactions_inference", r.interactions_inference},
                {"interactions_tracking", r.interactions_tracking},
                {"interactions_total", r.interactions_total},
                {"sim_time_s", r.sim_time},
                {"skipped_candidates", r.skipped_candidates}};
}

void write_report_svg(const std::filesystem::path& file, const sim::TileMap& map,
                      const MissionReport& r) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    const int cell = 24;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << map.width * cell
       << "\" height=\"" << map.height * cell << "\" viewBox=\"0 0 " << map.width * cell
       << " " << map.height * cell << "\">\n";
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const char* fill = nullptr;
            switch (map.tile(x, y).type) {
                case sim::TileType::Wall: fill = "#444444"; break;
                case sim::TileType::Lava: fill = "#cc3311"; break;
                case sim::TileType::Web: fill = "#99ccee"; break;
                case sim::TileType::Goal: fill = "#22bb22"; break;
                case sim::TileType::Floor: fill = "#f2f2f2"; break;
            }
            os << "<rect x=\"" << x * cell << "\" y=\"" << y * cell << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    auto polyline = [&](const std::vector<sim::Position>& ps, const char* style) {
        if (ps.empty()) return;
        os << "<polyline fill=\"none\" " << style << " points=\"";
        char buf[64];
        for (const auto& p : ps) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", p.x * cell, p.y * cell);
            os << buf;
        }
        os << "\"/>\n";
    };
    polyline(r.demo_traj,
             "stroke=\"#2244dd\" stroke-width=\"2\" stroke-dasharray=\"6,4\"");
    polyline(r.agent_traj, "stroke=\"#dd2222\" stroke-width=\"2\"");
    os << "</svg>\n";
}

}  // namespace wayfind::agent
