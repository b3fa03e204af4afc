#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "wayfind/demo.hpp"

using namespace wayfind;
using namespace wayfind::demo;
namespace fs = std::filesystem;

namespace {

sim::TileMap corridor_map() {
    return sim::TileMap::parse(
        "9 4 4.0 0.1 5\n"
        "#########\n"
        "#S.....G#\n"
        "#.......#\n"
        "#########\n",
        "corridor");
}

sim::TileMap lava_crossing_map() {
    return sim::TileMap::parse(
        "7 4 4.0 0.1 5\n"
        "#######\n"
        "#S.L.G#\n"
        "#..L..#\n"
        "#######\n");
}

}  // namespace

TEST_CASE("plan_path routes spawn to goal over traversable tiles") {
    sim::TileMap m = corridor_map();
    auto path = plan_path(m);
    REQUIRE_FALSE(path.empty());
    CHECK(path.back().x == doctest::Approx(7.5));
    CHECK(path.back().y == doctest::Approx(1.5));
    for (const auto& p : path) CHECK(m.traversable(p));
}

TEST_CASE("straight corridor demonstration: length and goal arrival") {
    sim::World w(corridor_map());
    ctl::PController c{2.0, 0.3};
    Demonstration d = run_demonstrator(w, c, plan_path(w.map), 2, false);
    CHECK(d.length() >= 5);
    CHECK(d.frames.size() == d.positions.size());
    CHECK(ctl::distance(d.positions.back(), w.map.goal_center()) < c.eps_wp);
    // consecutive reach invariant
    double reach = d.stride * w.map.s_max * w.map.dt;
    for (size_t i = 1; i < d.positions.size(); ++i)
        CHECK(ctl::distance(d.positions[i], d.positions[i - 1]) <= reach + 1e-9);
}

TEST_CASE("stride=2 positions are a subsequence of stride=1 positions") {
    sim::World w1(corridor_map());
    Demonstration fine = run_demonstrator(w1, ctl::PController{}, plan_path(w1.map), 1, false);
    sim::World w2(corridor_map());
    Demonstration coarse = run_demonstrator(w2, ctl::PController{}, plan_path(w2.map), 2, false);
    for (size_t i = 0; i + 1 < coarse.positions.size(); ++i) {
        // record i of the coarse run is record 2i of the fine run
        CHECK(coarse.positions[i].x == doctest::Approx(fine.positions[2 * i].x));
        CHECK(coarse.positions[i].y == doctest::Approx(fine.positions[2 * i].y));
    }
}

TEST_CASE("a path through lava fails the demonstrator") {
    sim::World w(lava_crossing_map());
    std::vector<sim::Position> path{{5.5, 1.5}};
    CHECK_THROWS_AS(run_demonstrator(w, ctl::PController{}, path, 2, false),
                    DemonstratorFailed);
}

TEST_CASE("recorded frames replay under the stored seed") {
    sim::World w(corridor_map());
    Demonstration a = run_demonstrator(w, ctl::PController{}, plan_path(w.map), 3, true);
    w.restart();
    Demonstration b = run_demonstrator(w, ctl::PController{}, plan_path(w.map), 3, true);
    REQUIRE(a.frames.size() == b.frames.size());
    for (size_t i = 0; i < a.frames.size(); ++i) CHECK(a.frames[i].px == b.frames[i].px);
}

TEST_CASE("save/load round trip") {
    sim::World w(corridor_map());
    Demonstration d = run_demonstrator(w, ctl::PController{}, plan_path(w.map), 2, false);
    fs::path dir = fs::temp_directory_path() / "wayfind_demo_rt";
    fs::remove_all(dir);
    save_demonstration(d, dir);
    Demonstration e = load_demonstration(dir);
    REQUIRE(e.frames.size() == d.frames.size());
    CHECK(e.stride == d.stride);
    CHECK(e.map_id == d.map_id);
    for (size_t i = 0; i < d.positions.size(); ++i) {
        CHECK(e.positions[i].x == d.positions[i].x);
        CHECK(e.positions[i].y == d.positions[i].y);
        for (size_t j = 0; j < d.frames[i].px.size(); ++j)
            CHECK(e.frames[i].px[j] ==
                  doctest::Approx(d.frames[i].px[j]).epsilon(1.0 / 255.0));
    }
    // saving the loaded demonstration again is byte-stable
    fs::path dir2 = fs::temp_directory_path() / "wayfind_demo_rt2";
    fs::remove_all(dir2);
    save_demonstration(e, dir2);
    Demonstration f = load_demonstration(dir2);
    for (size_t i = 0; i < e.frames.size(); ++i) CHECK(f.frames[i].px == e.frames[i].px);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("corrupt demonstrations are rejected") {
    fs::path dir = fs::temp_directory_path() / "wayfind_demo_corrupt";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK_THROWS_AS(load_demonstration(dir), CorruptDemo);  // empty directory

    sim::World w(corridor_map());
    Demonstration d = run_demonstrator(w, ctl::PController{}, plan_path(w.map), 2, false);
    save_demonstration(d, dir);
    fs::remove(dir / "frame_00002.pgm");
    CHECK_THROWS_AS(load_demonstration(dir), CorruptDemo);  // missing frame

    save_demonstration(d, dir);
    {
        std::ofstream truncate(dir / "frame_00001.pgm", std::ios::trunc);
    }
    CHECK_THROWS_AS(load_demonstration(dir), CorruptDemo);  // unreadable frame
    fs::remove_all(dir);
}
