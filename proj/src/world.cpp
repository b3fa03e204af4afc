#include "wayfind/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wayfind::sim {

namespace {

double frac(double v) { return v - std::floor(v); }

constexpr double kEps = 1e-9;

}  // namespace

Action::Action(double f, double s)
    : forward(std::clamp(f, -1.0, 1.0)), strafe(std::clamp(s, -1.0, 1.0)) {}

Cell TileMap::cell_of(const Position& p) const {
    return {static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))};
}

const Tile& TileMap::tile_at(const Position& p) const {
    Cell c = cell_of(p);
    return tile(c.x, c.y);
}

bool TileMap::traversable_cell(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    TileType t = tile(x, y).type;
    return t != TileType::Wall && t != TileType::Lava;
}

bool TileMap::traversable(const Position& p) const {
    if (!in_bounds(p)) return false;
    Cell c = cell_of(p);
    return traversable_cell(c.x, c.y);
}

TileMap TileMap::parse(const std::string& text, const std::string& id) {
    std::istringstream is(text);
    TileMap m;
    m.id = id;
    std::string header;
    if (!std::getline(is, header)) throw MapFormatError("empty map file");
    {
        std::istringstream hs(header);
        if (!(hs >> m.width >> m.height >> m.s_max >> m.dt >> m.seed))
            throw MapFormatError("bad header line, expected: width height s_max dt seed");
    }
    if (m.width < 3 || m.height < 3) throw MapFormatError("map too small");
    if (m.s_max <= 0.0 || m.dt <= 0.0) throw MapFormatError("s_max and dt must be positive");
    m.tiles.assign(static_cast<size_t>(m.width) * m.height, Tile{});

    int goals = 0, spawns = 0;
    for (int y = 0; y < m.height; ++y) {
        std::string row;
        if (!std::getline(is, row)) throw MapFormatError("missing map row " + std::to_string(y));
        if (static_cast<int>(row.size()) < m.width)
            throw MapFormatError("short map row " + std::to_string(y));
        for (int x = 0; x < m.width; ++x) {
            Tile& t = m.tile(x, y);
            switch (row[x]) {
                case '.': t = {TileType::Floor, 0}; break;
                case '#': t = {TileType::Wall, (3 * x + 5 * y) % kNumRegularTextures}; break;
                case 'R': t = {TileType::Wall, kRepetitiveTexture}; break;
                case 'L': t = {TileType::Lava, 0}; break;
                case 'W': t = {TileType::Web, 0}; break;
                case 'G':
                    t = {TileType::Goal, 0};
                    m.goal_cell = {x, y};
                    ++goals;
                    break;
                case 'S':
                    t = {TileType::Floor, 0};
                    m.spawn = {x + 0.5, y + 0.5};
                    ++spawns;
                    break;
                default:
                    throw MapFormatError(std::string("unknown tile code '") + row[x] + "'");
            }
        }
    }
    if (goals != 1) throw MapFormatError("map must contain exactly one goal");
    if (spawns != 1) throw MapFormatError("map must contain exactly one spawn");
    for (int x = 0; x < m.width; ++x)
        if (m.tile(x, 0).type != TileType::Wall || m.tile(x, m.height - 1).type != TileType::Wall)
            throw MapFormatError("border tiles must be walls");
    for (int y = 0; y < m.height; ++y)
        if (m.tile(0, y).type != TileType::Wall || m.tile(m.width - 1, y).type != TileType::Wall)
            throw MapFormatError("border tiles must be walls");
    if (!m.traversable(m.spawn)) throw MapFormatError("spawn is not traversable");
    return m;
}

TileMap TileMap::load(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw MapFormatError("cannot open map: " + file.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), file.stem().string());
}

TileMap make_open_map(int interior_side, std::uint64_t seed) {
    int s = interior_side + 2;
    // The goal sits two rows clear of the bottom wall: frames taken closer
    // than ~2 tiles to a wall are dominated by close-up columns and carry
    // little positional information, so routes should end before that zone.
    int gy = std::max(2, s - 4);
    std::ostringstream os;
    os << s << " " << s << " 4.0 0.1 " << seed << "\n";
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            if (x == 0 || y == 0 || x == s - 1 || y == s - 1)
                os << '#';
            else if (x == 1 && y == 1)
                os << 'S';
            else if (x == 1 && y == gy)
                os << 'G';
            else
                os << '.';
        }
        os << "\n";
    }
    return TileMap::parse(os.str(), "open" + std::to_string(interior_side));
}

double texture_value(int texture_id, double u, double v) {
    switch (texture_id) {
        case 0: return frac(u) < 0.5 ? 0.8 : 0.25;                      // vertical stripes
        case 1: return frac(v * 3.0) < 0.5 ? 0.75 : 0.3;                // horizontal bands
        case 2: {                                                        // coarse checker
            int c = static_cast<int>(std::floor(u * 2.0)) + static_cast<int>(std::floor(v * 3.0));
            return ((c % 2) + 2) % 2 == 0 ? 0.8 : 0.25;
        }
        case 3: return frac(u + v) < 0.5 ? 0.7 : 0.3;                   // diagonal stripes
        case kRepetitiveTexture: return frac(u * 8.0) < 0.5 ? 0.85 : 0.2;  // period 1/8 tile
        case kFaintTexture: return frac(u) < 0.5 ? 0.55 : 0.45;
        default: return 0.5;
    }
}

double speed_factor(TileType t) {
    return t == TileType::Web ? kWebSpeedFactor : 1.0;
}

World::World(TileMap m) : map(std::move(m)), pos(map.spawn), seed(map.seed), rng_(map.seed) {}

double World::resolve_x(double from_x, double to_x, double y) const {
    double dx = to_x - from_x;
    if (dx == 0.0) return from_x;
    int y0 = static_cast<int>(std::floor(y - kAgentRadius + kEps));
    int y1 = static_cast<int>(std::floor(y + kAgentRadius - kEps));
    double x = from_x;
    int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(dx) / 0.25)));
    double h = dx / substeps;
    for (int s = 0; s < substeps; ++s) {
        double nx = x + h;
        if (h > 0.0) {
            int cx = static_cast<int>(std::floor(nx + kAgentRadius - kEps));
            for (int cy = y0; cy <= y1; ++cy) {
                if (cx >= 0 && cx < map.width && cy >= 0 && cy < map.height &&
                    map.tile(cx, cy).type == TileType::Wall)
                    nx = std::min(nx, cx - kAgentRadius);
            }
        } else {
            int cx = static_cast<int>(std::floor(nx - kAgentRadius + kEps));
            for (int cy = y0; cy <= y1; ++cy) {
                if (cx >= 0 && cx < map.width && cy >= 0 && cy < map.height &&
                    map.tile(cx, cy).type == TileType::Wall)
                    nx = std::max(nx, cx + 1 + kAgentRadius);
            }
        }
        x = nx;
    }
    return std::clamp(x, kAgentRadius, map.width - kAgentRadius);
}

double World::resolve_y(double x, double from_y, double to_y) const {
    double dy = to_y - from_y;
    if (dy == 0.0) return from_y;
    int x0 = static_cast<int>(std::floor(x - kAgentRadius + kEps));
    int x1 = static_cast<int>(std::floor(x + kAgentRadius - kEps));
    double y = from_y;
    int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(dy) / 0.25)));
    double h = dy / substeps;
    for (int s = 0; s < substeps; ++s) {
        double ny = y + h;
        if (h > 0.0) {
            int cy = static_cast<int>(std::floor(ny + kAgentRadius - kEps));
            for (int cx = x0; cx <= x1; ++cx) {
                if (cx >= 0 && cx < map.width && cy >= 0 && cy < map.height &&
                    map.tile(cx, cy).type == TileType::Wall)
                    ny = std::min(ny, cy - kAgentRadius);
            }
        } else {
            int cy = static_cast<int>(std::floor(ny - kAgentRadius + kEps));
            for (int cx = x0; cx <= x1; ++cx) {
                if (cx >= 0 && cx < map.width && cy >= 0 && cy < map.height &&
                    map.tile(cx, cy).type == TileType::Wall)
                    ny = std::max(ny, cy + 1 + kAgentRadius);
            }
        }
        y = ny;
    }
    return std::clamp(y, kAgentRadius, map.height - kAgentRadius);
}

void World::step(const Action& a) { step(a, map.dt); }

void World::step(const Action& a, double dt) {
    if (!alive) throw DeadAgent("step on a dead agent");
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
    double sf = speed_factor(map.tile_at(pos).type);
    double scale = dt * map.s_max * sf;
    pos.x = resolve_x(pos.x, pos.x + scale * a.forward, pos.y);
    pos.y = resolve_y(pos.x, pos.y, pos.y + scale * a.strafe);
    clock += dt;
    ++interactions;
    if (map.tile_at(pos).type == TileType::Lava) alive = false;
}

vision::Image World::render(bool noise) {
    ++interactions;
    vision::Image img(kFrameWidth, kFrameHeight);
    Cell own = map.cell_of(pos);

    for (int col = 0; col < kFrameWidth; ++col) {
        // 90 degree FOV: camera plane half-width tan(45) = 1.
        double cam = 2.0 * (col + 0.5) / kFrameWidth - 1.0;
        double ray_x = 1.0, ray_y = cam;

        int mx = own.x, my = own.y;
        double delta_x = std::abs(1.0 / ray_x);
        double delta_y = ray_y == 0.0 ? 1e30 : std::abs(1.0 / ray_y);
        int step_x = 1, step_y = ray_y < 0.0 ? -1 : 1;
        double side_x = (mx + 1.0 - pos.x) * delta_x;
        double side_y = ray_y < 0.0 ? (pos.y - my) * delta_y : (my + 1.0 - pos.y) * delta_y;

        int side = 0;  // 0 = x-face hit, 1 = y-face hit
        int hit_tex = 0;
        for (int it = 0; it < 4 * (map.width + map.height); ++it) {
            if (side_x < side_y) {
                side_x += delta_x;
                mx += step_x;
                side = 0;
            } else {
                side_y += delta_y;
                my += step_y;
                side = 1;
            }
            if (mx < 0 || my < 0 || mx >= map.width || my >= map.height) break;
            if (map.tile(mx, my).type == TileType::Wall) {
                hit_tex = map.tile(mx, my).texture;
                break;
            }
        }

        double perp = side == 0 ? side_x - delta_x : side_y - delta_y;
        perp = std::max(perp, 0.05);
        double u = side == 0 ? pos.y + perp * ray_y : pos.x + perp * ray_x;
        double shade = 1.0 / (1.0 + kDistanceShade * perp);

        double line = kWallHeightScale * kFrameHeight / perp;
        double top = kFrameHeight / 2.0 - line / 2.0;
        for (int row = 0; row < kFrameHeight; ++row) {
            double rc = row + 0.5;
            double val;
            if (rc < top) {
                val = 0.62;  // ceiling
            } else if (rc >= top + line) {
                // floor casting: project the screen row onto the ground
                // plane; the ground pattern gives position and depth cues
                double row_dist = kWallHeightScale * kFrameHeight / (2.0 * rc - kFrameHeight);
                double fx = pos.x + row_dist * ray_x;
                double fy = pos.y + row_dist * ray_y;
                int cx = std::clamp(static_cast<int>(std::floor(fx)), 0, map.width - 1);
                int cy = std::clamp(static_cast<int>(std::floor(fy)), 0, map.height - 1);
                double fshade = 1.0 / (1.0 + kDistanceShade * row_dist);
                switch (map.tile(cx, cy).type) {
                    case TileType::Goal: {  // high-contrast 4x4 ground checker
                        int c = static_cast<int>(std::floor(fx * 4.0)) +
                                static_cast<int>(std::floor(fy * 4.0));
                        val = ((c % 2) + 2) % 2 == 0 ? 0.95 : 0.05;
                        break;
                    }
                    case TileType::Lava:
                        val = 0.03;
                        break;
                    case TileType::Web:
                        val = 0.52 * fshade;
                        break;
                    default: {  // tile-sized ground checker
                        int c = static_cast<int>(std::floor(fx)) +
                                static_cast<int>(std::floor(fy));
                        val = (((c % 2) + 2) % 2 == 0 ? 0.45 : 0.30) * fshade;
                        break;
                    }
                }
            } else {
                double v = (rc - top) / line;
                if (hit_tex < kNumRegularTextures) {
                    // per-tile phase and brightness break the period the
                    // texture-id cycle would otherwise repeat with along
                    // long walls; deliberately repetitive/faint surfaces
                    // render their plain pattern instead
                    double phase = ((mx * 31 + my * 17) % 7) / 7.0;
                    double tint = 0.8 + 0.2 * ((mx * 13 + my * 29) % 5) / 4.0;
                    val = texture_value(hit_tex, u + phase, v) * shade * tint;
                } else {
                    val = texture_value(hit_tex, u, v) * shade;
                }
            }
            img.at(col, row) = val;
        }
    }

    if (map.tile_at(pos).type == TileType::Web) {
        // fixed occlusion mask darkening 40% of the pixels
        for (int y = 0; y < kFrameHeight; ++y)
            for (int x = 0; x < kFrameWidth; ++x)
                if ((x * 73856093u ^ y * 19349663u ^ (x * y * 83492791u)) % 10u < 4u)
                    img.at(x, y) *= 0.55;
    }

    if (noise) {
        std::normal_distribution<double> n(0.0, obs_sigma);
        for (double& p : img.px) p = std::clamp(p + n(rng_), 0.0, 1.0);
    }
    return img;
}

void World::teleport(const Position& p) {
    ++interactions;
    if (!map.in_bounds(p) || !map.traversable(p))
        throw Untraversable("teleport target blocked or out of bounds");
    pos = p;
}

void World::restart() {
    pos = map.spawn;
    clock = 0.0;
    alive = true;
    rng_.seed(seed);
}

}  // namespace wayfind::sim
