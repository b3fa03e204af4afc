#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wayfind/control.hpp"
#include "wayfind/demo.hpp"
#include "wayfind/search.hpp"
#include "wayfind/world.hpp"

namespace wayfind::agent {

struct BudgetExhausted : std::runtime_error {
    explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

/// A tracked run counts as reaching the goal when it ends within this
/// distance of the goal tile center.
constexpr double kGoalRadius = 1.0;

struct MissionReport {
    bool success = false;  // U
    std::vector<sim::Position> waypoints;    // inferred r_{1:L}
    std::vector<sim::Position> agent_traj;   // q^_{0:K}
    std::vector<sim::Position> demo_traj;    // q*_{0:L}
    std::uint64_t interactions_inference = 0;
    std::uint64_t interactions_tracking = 0;
    std::uint64_t interactions_total = 0;
    double sim_time = 0.0;        // simulated seconds spent tracking
    int skipped_candidates = 0;   // unreachable candidates (navigation variant)
};

/// Waypoint recursion: r_0 = spawn, r_i = local grid argmin of the image
/// distance to demo frame y*_i around r_{i-1}. Uses teleportation.
std::vector<sim::Position> infer_waypoints(sim::World& world,
                                           const demo::Demonstration& d,
                                           const search::SearchSpec& spec,
                                           const vision::Kernel& kern, bool noise);

/// Teleport-based variant: infer all waypoints, restart, then track them.
MissionReport run_mission_algorithm2(sim::World& world, const demo::Demonstration& d,
                                     const search::SearchSpec& spec,
                                     const ctl::PController& c,
                                     const vision::Kernel& kern, double time_limit,
                                     bool noise);

/// Navigation-only variant: every candidate is reached by steering (no
/// teleport, no restart); candidates the controller cannot reach within the
/// per-candidate budget are skipped.
MissionReport run_mission_algorithm1(sim::World& world, const demo::Demonstration& d,
                                     const search::SearchSpec& spec,
                                     const ctl::PController& c,
                                     const vision::Kernel& kern, bool noise,
                                     double candidate_budget = 3.0);

/// Uninformed baseline: serpentine teleport+render sweep over all
/// traversable tile centers until standing on the goal tile.
MissionReport run_baseline_sweep(sim::World& world, std::uint64_t interaction_budget);

nlohmann::json report_to_json(const MissionReport& r);

/// Top-view overlay: demonstrator trajectory blue dashed, agent red solid.
void write_report_svg(const std::filesystem::path& file, const sim::TileMap& map,
                      const MissionReport& r);

}  // namespace wayfind::agent
