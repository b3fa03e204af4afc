#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wayfind/control.hpp"
#include "wayfind/image.hpp"
#include "wayfind/world.hpp"

namespace wayfind::demo {

struct DemonstratorFailed : std::runtime_error {
    explicit DemonstratorFailed(const std::string& what) : std::runtime_error(what) {}
};

struct CorruptDemo : std::runtime_error {
    explicit CorruptDemo(const std::string& what) : std::runtime_error(what) {}
};

/// Aligned (position, frame) pairs recorded from the demonstrator run.
/// Index 0 is the starting pose; L = frames.size() - 1.
struct Demonstration {
    std::vector<vision::Image> frames;     // y*_{0:L}
    std::vector<sim::Position> positions;  // q*_{0:L}, ground truth
    int stride = 3;
    std::string map_id;

    size_t length() const { return frames.empty() ? 0 : frames.size() - 1; }
};

/// 4-neighbor BFS route from spawn to goal over traversable, non-lava
/// tiles, as tile-center waypoints (spawn cell excluded, goal included).
std::vector<sim::Position> plan_path(const sim::TileMap& map);

/// Drive the world through the path with the proportional controller,
/// recording every stride-th (position, frame) pair plus the final pose on
/// goal arrival. Throws DemonstratorFailed on death or timeout.
Demonstration run_demonstrator(sim::World& world, const ctl::PController& c,
                               const std::vector<sim::Position>& path, int stride,
                               bool noise, double time_limit = 15.0);

/// Directory layout: meta.jsonl (header record with map_id/stride, then one
/// record {i, x, y, frame_file} per index) + frame_%05d.pgm files.
void save_demonstration(const Demonstration& d, const std::filesystem::path& dir);
Demonstration load_demonstration(const std::filesystem::path& dir);

}  // namespace wayfind::demo
