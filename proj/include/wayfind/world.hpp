#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wayfind/image.hpp"

namespace wayfind::sim {

struct DeadAgent : std::runtime_error {
    explicit DeadAgent(const std::string& what) : std::runtime_error(what) {}
};

struct Untraversable : std::runtime_error {
    explicit Untraversable(const std::string& what) : std::runtime_error(what) {}
};

struct MapFormatError : std::runtime_error {
    explicit MapFormatError(const std::string& what) : std::runtime_error(what) {}
};

constexpr int kFrameWidth = 64;
constexpr int kFrameHeight = 48;
constexpr double kAgentRadius = 0.25;
constexpr double kWallHeightScale = 2.0;   // walls closer than this fill the frame
constexpr double kDistanceShade = 0.15;    // intensity *= 1/(1 + shade*d)
constexpr double kWebSpeedFactor = 0.3;
constexpr double kDefaultObsSigma = 0.05;

// Built-in wall texture table. Ids 0..3 are the regular patterns assigned to
// '#' walls by position hash; 4 is the deliberately ambiguous pattern whose
// spatial period (0.125 tiles) divides one tile exactly; 5 is a faint
// low-contrast stripe used by tests that need noise-limited matching.
constexpr int kNumRegularTextures = 4;
constexpr int kRepetitiveTexture = 4;
constexpr int kFaintTexture = 5;

enum class TileType { Floor, Wall, Lava, Web, Goal };

struct Tile {
    TileType type = TileType::Floor;
    int texture = 0;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell& o) const { return x == o.x && y == o.y; }
};

/// Planar action; both components clamp to [-1, 1] on construction.
/// forward maps to +x (the fixed heading), strafe to +y.
struct Action {
    double forward = 0.0;
    double strafe = 0.0;
    Action() = default;
    Action(double f, double s);
};

struct TileMap {
    int width = 0;
    int height = 0;
    std::vector<Tile> tiles;  // row-major, tiles[y * width + x]
    Cell goal_cell;
    Position spawn;
    double s_max = 4.0;
    double dt = 0.1;
    std::uint64_t seed = 1;
    std::string id;  // map name, used in demonstration metadata

    Tile& tile(int x, int y) { return tiles[static_cast<size_t>(y) * width + x]; }
    const Tile& tile(int x, int y) const { return tiles[static_cast<size_t>(y) * width + x]; }

    bool in_bounds(const Position& p) const {
        return p.x >= 0.0 && p.y >= 0.0 && p.x < width && p.y < height;
    }
    Cell cell_of(const Position& p) const;
    const Tile& tile_at(const Position& p) const;

    /// Traversable = not Wall and not Lava.
    bool traversable(const Position& p) const;
    bool traversable_cell(int x, int y) const;

    Position goal_center() const {
        return {goal_cell.x + 0.5, goal_cell.y + 0.5};
    }

    /// Parse the plain-text map format: header "width height s_max dt seed"
    /// followed by `height` rows of tile codes
    /// (. floor, # wall, R repetitive wall, L lava, W web, G goal, S spawn).
    /// Row r of the grid is y = r.
    static TileMap parse(const std::string& text, const std::string& id = "");
    static TileMap load(const std::filesystem::path& file);
};

/// Open square room bordered by walls, spawn near one corner, goal near the
/// opposite one. Used by the scaling experiment and tests.
TileMap make_open_map(int interior_side, std::uint64_t seed);

double texture_value(int texture_id, double u, double v);

double speed_factor(TileType t);

/// Deterministic 2D tile world: continuous position, fixed heading (+x),
/// first-person column raycaster, mission clock, interaction counter.
class World {
public:
    TileMap map;
    Position pos;
    double clock = 0.0;
    bool alive = true;
    std::uint64_t seed = 1;
    std::uint64_t interactions = 0;
    double obs_sigma = kDefaultObsSigma;

    explicit World(TileMap m);

    /// Advance the clock by the map timestep and move by
    /// dt * s_max * speed_factor(tile) * (forward, strafe), with
    /// axis-separated wall collision.
    void step(const Action& a);
    void step(const Action& a, double dt);

    /// First-person 64x48 grayscale frame from the current position.
    vision::Image render(bool noise);

    void teleport(const Position& p);

    /// Back to spawn, clock 0, alive, RNG reseeded. Interaction counter is
    /// cumulative and survives restarts.
    void restart();

private:
    std::mt19937_64 rng_;

    double resolve_x(double from_x, double to_x, double y) const;
    double resolve_y(double x, double from_y, double to_y) const;
};

}  // namespace wayfind::sim
