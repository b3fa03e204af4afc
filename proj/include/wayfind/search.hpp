#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "wayfind/image.hpp"
#include "wayfind/world.hpp"

namespace wayfind::search {

struct NoFeasibleCandidate : std::runtime_error {
    explicit NoFeasibleCandidate(const std::string& what) : std::runtime_error(what) {}
};

/// Local grid-search window: candidates center + (i*h, j*h) with
/// |i*h| <= radius, |j*h| <= radius.
struct SearchSpec {
    double radius = 2.0;  // tiles
    double step = 0.5;    // tiles, 0 < step <= radius
    int n_avg = 3;        // frames averaged per candidate
};

struct SearchResult {
    sim::Position best;
    double value = 0.0;
    int evals = 0;  // number of feasible candidate evaluations
};

/// Objective over candidate positions; nullopt marks an untraversable
/// candidate.
using Objective = std::function<std::optional<double>(const sim::Position&)>;

/// Exhaustive search over the local grid; ties broken toward the
/// lexicographically smallest (x, then y) candidate. Throws
/// NoFeasibleCandidate when every candidate is untraversable.
SearchResult grid_search(const sim::Position& center, const SearchSpec& spec,
                         const Objective& objective);

/// Candidate objective for waypoint inference: teleport there, render n_avg
/// frames (averaged), return the image distance to the target frame.
Objective image_objective(sim::World& world, const SearchSpec& spec,
                          const vision::Image& target, const vision::Kernel& kern,
                          bool noise);

}  // namespace wayfind::search
