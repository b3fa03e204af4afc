#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wayfind/agent.hpp"
#include "wayfind/causal.hpp"
#include "wayfind/control.hpp"
#include "wayfind/demo.hpp"
#include "wayfind/search.hpp"
#include "wayfind/world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wayfind;

namespace {

struct RunConfig {
    std::string map_file;
    std::string out;
    std::string demo_dir;
    std::string report_file;
    std::string svg_file;
    std::string config_file;
    std::uint64_t seed = 0;  // 0 = use the map's seed
    double blur_sigma = 1.5;
    double radius = 2.0;
    double step_h = 0.5;
    int n_avg = 3;
    double kp = 2.0;
    double eps_wp = 0.3;
    double time_limit = 15.0;
    int stride = 3;
    bool noise = true;
    double obs_sigma = sim::kDefaultObsSigma;
    double demo_noise_sigma = sim::kDefaultObsSigma;
    int alg = 2;
    bool baseline = false;
    std::uint64_t budget = 1'000'000'000;
    std::vector<int> sizes = {10, 20, 40};
    // causal
    double dt_c = 0.01;
    double bin_width = 0.25;
    std::vector<double> hp = {60.0, 120.0};
    double target_hp = 90.0;
    std::string g_profile = "bumpy";
    double feedback_gain = 0.05;
};

/// Config file keys override flags (which override the built-in defaults).
void apply_config_file(RunConfig& c) {
    if (c.config_file.empty()) return;
    std::ifstream is(c.config_file);
    if (!is) throw std::runtime_error("cannot open config: " + c.config_file);
    json j = json::parse(is);
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("blur_sigma", c.blur_sigma);
    get("radius", c.radius);
    get("step_h", c.step_h);
    get("n_avg", c.n_avg);
    get("kp", c.kp);
    get("eps_wp", c.eps_wp);
    get("time_limit", c.time_limit);
    get("stride", c.stride);
    get("noise", c.noise);
    get("obs_sigma", c.obs_sigma);
    get("demo_noise_sigma", c.demo_noise_sigma);
    get("dt_c", c.dt_c);
    get("bin_width", c.bin_width);
    get("target_hp", c.target_hp);
    get("g_profile", c.g_profile);
    get("feedback_gain", c.feedback_gain);
}

sim::World make_world(const RunConfig& c) {
    sim::TileMap map = sim::TileMap::load(c.map_file);
    if (c.seed != 0) map.seed = c.seed;
    sim::World world(map);
    world.obs_sigma = c.obs_sigma;
    return world;
}

int cmd_record_demo(RunConfig& c) {
    apply_config_file(c);
    sim::World world = make_world(c);
    world.obs_sigma = c.demo_noise_sigma;
    ctl::PController pc{c.kp, c.eps_wp};
    auto path = demo::plan_path(world.map);
    demo::Demonstration d =
        demo::run_demonstrator(world, pc, path, c.stride, c.noise, c.time_limit);
    demo::save_demonstration(d, c.out);
    std::cout << "recorded " << d.frames.size() << " frames (L=" << d.length() << ") to "
              << c.out << "\n";
    return 0;
}

int cmd_run_mission(RunConfig& c) {
    apply_config_file(c);
    sim::World world = make_world(c);
    search::SearchSpec spec{c.radius, c.step_h, c.n_avg};
    ctl::PController pc{c.kp, c.eps_wp};
    vision::Kernel kern = vision::Kernel::gaussian(c.blur_sigma);

    agent::MissionReport rep;
    if (c.baseline) {
        rep = agent::run_baseline_sweep(world, c.budget);
    } else {
        demo::Demonstration d = demo::load_demonstration(c.demo_dir);
        if (c.alg == 2) {
            rep = agent::run_mission_algorithm2(world, d, spec, pc, kern, c.time_limit,
                                                c.noise);
        } else {
            rep = agent::run_mission_algorithm1(world, d, spec, pc, kern, c.noise);
        }
    }
    if (!c.report_file.empty()) {
        std::ofstream os(c.report_file);
        os << agent::report_to_json(rep).dump(2) << "\n";
    } else {
        std::cout << agent::report_to_json(rep).dump(2) << "\n";
    }
    if (!c.svg_file.empty()) agent::write_report_svg(c.svg_file, world.map, rep);
    std::cerr << "U=" << (rep.success ? "success" : "fail")
              << " interactions=" << rep.interactions_total << "\n";
    return rep.success ? 0 : 1;
}

int cmd_scaling(RunConfig& c) {
    apply_config_file(c);
    std::ostringstream csv;
    csv << "L,agent_interactions,baseline_interactions\n";
    for (int target_len : c.sizes) {
        int interior = 1 + static_cast<int>(std::lround(0.6 * target_len));
        std::uint64_t seed = (c.seed != 0 ? c.seed : 7) + static_cast<std::uint64_t>(target_len);
        sim::TileMap map = sim::make_open_map(interior, seed);
        ctl::PController pc{c.kp, c.eps_wp};
        // corner-to-corner routes on the larger rooms outgrow the default
        // mission limit; scale the budget with the room size
        double limit = std::max(c.time_limit, 2.0 * interior);

        sim::World demo_world(map);
        demo_world.obs_sigma = c.demo_noise_sigma;
        demo::Demonstration d = demo::run_demonstrator(
            demo_world, pc, demo::plan_path(map), c.stride, c.noise, limit);

        sim::World agent_world(map);
        agent_world.obs_sigma = c.obs_sigma;
        search::SearchSpec spec{c.radius, c.step_h, c.n_avg};
        vision::Kernel kern = vision::Kernel::gaussian(c.blur_sigma);
        agent::MissionReport rep = agent::run_mission_algorithm2(
            agent_world, d, spec, pc, kern, limit, c.noise);

        sim::World baseline_world(map);
        agent::MissionReport base = agent::run_baseline_sweep(baseline_world, c.budget);

        csv << d.length() << "," << rep.interactions_total << ","
            << base.interactions_total << "\n";
    }
    if (c.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream os(c.out);
        os << csv.str();
    }
    return 0;
}

int cmd_causal(RunConfig& c) {
    apply_config_file(c);
    causal::TwoCarConfig cfg;
    cfg.dt = c.dt_c;
    cfg.bin_width = c.bin_width;
    cfg.source_hp = c.hp;
    cfg.target_hp = c.target_hp;
    cfg.profile = c.g_profile;
    cfg.feedback_gain = c.feedback_gain;
    causal::TwoCarResult res = causal::run_two_car_experiment(cfg);
    json out{{"g_rel_l2_err", res.g_rel_l2_err},
             {"crosscar_disagreement", res.crosscar_disagreement},
             {"predict_rel_err", res.predict_rel_err},
             {"uncovered_queries", res.uncovered_queries},
             {"rms_transfer", res.rms_transfer},
             {"rms_naive", res.rms_naive},
             {"covered_bins", res.model.g_table.size()}};
    if (c.out.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::ofstream os(c.out);
        os << out.dump(2) << "\n";
    }
    return 0;
}

void add_common(CLI::App* app, RunConfig& c) {
    app->add_option("--config", c.config_file, "JSON config file (overrides flags)");
    app->add_option("--seed", c.seed, "RNG seed (0 = use the map's seed)");
    app->add_option("--sigma", c.blur_sigma, "Gaussian blur sigma, pixels");
    app->add_option("--radius", c.radius, "search radius R, tiles");
    app->add_option("--step-h", c.step_h, "search grid step h, tiles");
    app->add_option("--n-avg", c.n_avg, "frames averaged per candidate");
    app->add_option("--kp", c.kp, "proportional gain");
    app->add_option("--eps-wp", c.eps_wp, "waypoint arrival radius, tiles");
    app->add_option("--time-limit", c.time_limit, "mission time limit, seconds");
    app->add_option("--stride", c.stride, "demo subsampling stride");
    app->add_flag("!--no-noise", c.noise, "disable observation noise");
    app->add_option("--obs-sigma", c.obs_sigma, "observation noise sigma");
    app->add_option("--demo-noise-sigma", c.demo_noise_sigma,
                    "demonstrator camera noise sigma");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tile-world demonstration-following and mechanism-transfer toolkit"};
    app.require_subcommand(1);
    RunConfig c;

    CLI::App* rec = app.add_subcommand("record-demo", "run the scripted demonstrator");
    rec->add_option("--map", c.map_file, "map file")->required();
    rec->add_option("--out", c.out, "output demonstration directory")->required();
    add_common(rec, c);

    CLI::App* run = app.add_subcommand("run-mission", "run an agent on a recorded demo");
    run->add_option("--map", c.map_file, "map file")->required();
    run->add_option("--demo", c.demo_dir, "demonstration directory");
    run->add_option("--alg", c.alg, "algorithm variant (1 = navigate, 2 = teleport)")
        ->check(CLI::IsMember({1, 2}));
    run->add_flag("--baseline", c.baseline, "uninformed sweep baseline instead");
    run->add_option("--budget", c.budget, "baseline interaction budget");
    run->add_option("--report", c.report_file, "report JSON output path");
    run->add_option("--svg", c.svg_file, "trajectory overlay SVG output path");
    add_common(run, c);

    CLI::App* sca = app.add_subcommand("scaling", "agent-vs-baseline interaction scaling");
    sca->add_option("--sizes", c.sizes, "demonstration length targets");
    sca->add_option("--out", c.out, "CSV output path");
    add_common(sca, c);

    CLI::App* cau = app.add_subcommand("causal", "two-car mechanism transfer experiment");
    cau->add_option("--out", c.out, "JSON output path");
    cau->add_option("--dt-c", c.dt_c, "car simulation timestep");
    cau->add_option("--bin-width", c.bin_width, "position bin width");
    cau->add_option("--hp", c.hp, "source car engine scales");
    cau->add_option("--target-hp", c.target_hp, "target car engine scale");
    cau->add_option("--g-profile", c.g_profile, "road force profile id");
    cau->add_option("--feedback-gain", c.feedback_gain, "tracking feedback gain");
    cau->add_option("--config", c.config_file, "JSON config file (overrides flags)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors -> 2, --help -> 0
    }

    try {
        if (rec->parsed()) return cmd_record_demo(c);
        if (run->parsed()) return cmd_run_mission(c);
        if (sca->parsed()) return cmd_scaling(c);
        if (cau->parsed()) return cmd_causal(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
