#include "wayfind/demo.hpp"

#include <cstdio>
#include <deque>
#include <fstream>

#include <json.hpp>

namespace wayfind::demo {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<sim::Position> plan_path(const sim::TileMap& map) {
    sim::Cell start = map.cell_of(map.spawn);
    sim::Cell goal = map.goal_cell;
    std::vector<int> prev(static_cast<size_t>(map.width) * map.height, -1);
    auto idx = [&](int x, int y) { return y * map.width + x; };
    std::deque<sim::Cell> queue{start};
    prev[idx(start.x, start.y)] = idx(start.x, start.y);
    // +y before +x: with the camera fixed on +x, routes then run down open
    // columns looking across the room instead of hugging the wall ahead
    const int dx[] = {0, 1, -1, 0};
    const int dy[] = {1, 0, 0, -1};
    while (!queue.empty()) {
        sim::Cell c = queue.front();
        queue.pop_front();
        if (c == goal) break;
        for (int k = 0; k < 4; ++k) {
            int nx = c.x + dx[k], ny = c.y + dy[k];
            if (!map.traversable_cell(nx, ny)) continue;
            if (prev[idx(nx, ny)] != -1) continue;
            prev[idx(nx, ny)] = idx(c.x, c.y);
            queue.push_back({nx, ny});
        }
    }
    if (prev[idx(goal.x, goal.y)] == -1)
        throw DemonstratorFailed("no route from spawn to goal");
    std::vector<sim::Position> path;
    int cur = idx(goal.x, goal.y);
    while (cur != prev[cur]) {
        path.push_back({cur % map.width + 0.5, cur / map.width + 0.5});
        cur = prev[cur];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

Demonstration run_demonstrator(sim::World& world, const ctl::PController& c,
                               const std::vector<sim::Position>& path, int stride,
                               bool noise, double time_limit) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    Demonstration d;
    d.stride = stride;
    d.map_id = world.map.id;

    d.positions.push_back(world.pos);
    d.frames.push_back(world.render(noise));

    size_t i = 0;
    int steps = 0;
    while (i < path.size()) {
        if (!world.alive) throw DemonstratorFailed("demonstrator died");
        if (world.clock > time_limit) throw DemonstratorFailed("demonstrator timed out");
        if (ctl::distance(world.pos, path[i]) < c.eps_wp) {
            ++i;
            continue;
        }
        world.step(ctl::control_action(c, world.pos, path[i]));
        ++steps;
        if (steps % stride == 0) {
            d.positions.push_back(world.pos);
            d.frames.push_back(world.render(noise));
        }
    }
    if (steps % stride != 0) {  // always record the goal-arrival pose
        d.positions.push_back(world.pos);
        d.frames.push_back(world.render(noise));
    }
    return d;
}

void save_demonstration(const Demonstration& d, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream meta(dir / "meta.jsonl");
    if (!meta) throw std::runtime_error("cannot write " + (dir / "meta.jsonl").string());
    meta << json{{"map_id", d.map_id}, {"stride", d.stride}, {"count", d.frames.size()}}.dump()
         << "\n";
    for (size_t i = 0; i < d.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu.pgm", i);
        vision::save_pgm(d.frames[i], dir / name);
        meta << json{{"i", i},
                     {"x", d.positions[i].x},
                     {"y", d.positions[i].y},
                     {"frame_file", name}}
                    .dump()
             << "\n";
    }
}

Demonstration load_demonstration(const fs::path& dir) {
    std::ifstream meta(dir / "meta.jsonl");
    if (!meta) throw CorruptDemo("missing meta.jsonl in " + dir.string());
    std::string line;
    if (!std::getline(meta, line)) throw CorruptDemo("empty meta.jsonl");
    Demonstration d;
    size_t count = 0;
    try {
        json header = json::parse(line);
        d.map_id = header.at("map_id").get<std::string>();
        d.stride = header.at("stride").get<int>();
        count = header.at("count").get<size_t>();
    } catch (const json::exception& e) {
        throw CorruptDemo(std::string("bad meta header: ") + e.what());
    }
    while (std::getline(meta, line)) {
        if (line.empty()) continue;
        try {
            json rec = json::parse(line);
            d.positions.push_back({rec.at("x").get<double>(), rec.at("y").get<double>()});
            fs::path f = dir / rec.at("frame_file").get<std::string>();
            if (!fs::exists(f)) throw CorruptDemo("missing frame file " + f.string());
            try {
                d.frames.push_back(vision::load_pgm(f));
            } catch (const std::runtime_error& e) {
                throw CorruptDemo(std::string("unreadable frame: ") + e.what());
            }
        } catch (const json::exception& e) {
            throw CorruptDemo(std::string("bad meta record: ") + e.what());
        }
    }
    if (d.frames.empty() || d.frames.size() != count || d.frames.size() != d.positions.size())
        throw CorruptDemo("demonstration length mismatch");
    return d;
}

}  // namespace wayfind::demo
