#include "wayfind/causal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wayfind::causal {

void save_log_csv(const ExperienceLog& log, const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << "t,u,y\n";
    char buf[96];
    for (size_t i = 0; i < log.records.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", i * log.dt,
                      log.records[i].u, log.records[i].y);
        os << buf;
    }
}

ExperienceLog load_log_csv(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::getline(is, line);  // header
    ExperienceLog log;
    double prev_t = 0.0;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double t, u, y;
        char c1, c2;
        std::istringstream ls(line);
        if (!(ls >> t >> c1 >> u >> c2 >> y) || c1 != ',' || c2 != ',')
            throw std::runtime_error("bad CSV record: " + line);
        if (!first) log.dt = t - prev_t;
        prev_t = t;
        first = false;
        log.records.push_back({u, y});
    }
    return log;
}

Description Description::parse(const std::string& text) {
    Description d;
    std::istringstream is(text);
    std::string line;
    std::set<std::string> outputs;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "mech") {
            MechanismDecl m;
            std::string tok;
            if (!(ls >> m.output >> tok) || tok != "<-")
                throw DescriptionFormatError("expected 'mech out <- in... : form': " + line);
            while (ls >> tok && tok != ":") m.inputs.push_back(tok);
            if (tok != ":") throw DescriptionFormatError("missing ':' in mech line: " + line);
            std::string form;
            if (!(ls >> form)) throw DescriptionFormatError("missing form in: " + line);
            if (form == "known") {
                m.known = true;
                if (!(ls >> m.formula))
                    throw DescriptionFormatError("known mech needs a formula id: " + line);
            } else if (form == "unknown") {
                m.known = false;
            } else {
                throw DescriptionFormatError("form must be known|unknown: " + line);
            }
            if (!outputs.insert(m.output).second)
                throw DescriptionFormatError("variable declared as output twice: " + m.output);
            d.mechanisms.push_back(std::move(m));
        } else if (kind == "indep") {
            std::string a, b;
            if (!(ls >> a >> b)) throw DescriptionFormatError("expected 'indep var var': " + line);
            d.independences.emplace_back(a, b);
        } else if (kind == "const") {
            std::string name;
            double value;
            if (!(ls >> name >> value))
                throw DescriptionFormatError("expected 'const name value': " + line);
            if (name == "m") d.mass = value;
        } else {
            throw DescriptionFormatError("unknown directive: " + kind);
        }
    }
    return d;
}

Description Description::two_car_default() {
    return parse(
        "mech F <- u hp : known f_F\n"
        "mech ydd <- F G : known newton\n"
        "mech G <- y : unknown\n"
        "indep G hp\n"
        "indep F y\n"
        "const m 1.0\n");
}

bool Dag::has_node(const std::string& n) const {
    return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

std::vector<std::string> Dag::parents(const std::string& n) const {
    std::vector<std::string> ps;
    for (const auto& [from, to] : edges)
        if (to == n) ps.push_back(from);
    return ps;
}

Dag build_diagram(const Description& d) {
    Dag g;
    auto add_node = [&](const std::string& n) {
        if (!g.has_node(n)) g.nodes.push_back(n);
    };
    for (const auto& m : d.mechanisms) {
        add_node(m.output);
        for (const auto& in : m.inputs) {
            add_node(in);
            g.edges.emplace_back(in, m.output);
        }
    }
    for (const auto& [var, non_parent] : d.independences) {
        for (const auto& m : d.mechanisms) {
            if (m.output != var) continue;
            if (std::find(m.inputs.begin(), m.inputs.end(), non_parent) != m.inputs.end())
                throw ContradictoryIndependence("indep " + var + " " + non_parent +
                                                " contradicts mechanism inputs");
        }
    }
    // Kahn topological check
    std::map<std::string, int> indeg;
    for (const auto& n : g.nodes) indeg[n] = 0;
    for (const auto& [from, to] : g.edges) ++indeg[to];
    std::vector<std::string> frontier;
    for (const auto& [n, deg] : indeg)
        if (deg == 0) frontier.push_back(n);
    size_t seen = 0;
    while (!frontier.empty()) {
        std::string n = frontier.back();
        frontier.pop_back();
        ++seen;
        for (const auto& [from, to] : g.edges)
            if (from == n && --indeg[to] == 0) frontier.push_back(to);
    }
    if (seen != g.nodes.size()) throw CyclicDescription("description implies a cyclic graph");
    return g;
}

long long CausalModel::bin_of(double y) const {
    return static_cast<long long>(std::floor(y / bin_width));
}

std::optional<double> CausalModel::g_hat(double y) const {
    auto it = g_table.find(bin_of(y));
    if (it == g_table.end()) return std::nullopt;
    return it->second.mean();
}

CausalModel init_model(const Description& d, double bin_width) {
    CausalModel m;
    m.diagram = build_diagram(d);
    m.mass = d.mass;
    m.bin_width = bin_width;
    return m;
}

ExperienceLog simulate_car(const HardwareSpec& spec, const ForceProfile& g_true,
                           const DrivePolicy& policy, int steps, double dt,
                           double y0, double v0, double mass) {
    if (dt <= 0.0) throw std::invalid_argument("simulate_car: dt must be positive");
    ExperienceLog log;
    log.dt = dt;
    double y = y0, v = v0;
    for (int t = 0; t <= steps; ++t) {
        double u = std::clamp(policy(t * dt, y, v), -1.0, 1.0);
        log.records.push_back({u, y});
        double a = (spec.hp * u + g_true(y)) / mass;
        v += a * dt;
        y += v * dt;
    }
    return log;
}

CausalModel infer_g(CausalModel model,
                    const std::vector<std::pair<HardwareSpec, ExperienceLog>>& logs) {
    for (const auto& [spec, log] : logs) {
        if (log.records.size() < 3)
            throw LogTooShort("need at least 3 records for central differences");
        double inv_dt2 = 1.0 / (log.dt * log.dt);
        for (size_t t = 1; t + 1 < log.records.size(); ++t) {
            double ydd = (log.records[t + 1].y - 2.0 * log.records[t].y +
                          log.records[t - 1].y) * inv_dt2;
            double sample = model.mass * ydd - spec.hp * log.records[t].u;
            BinStat& bin = model.g_table[model.bin_of(log.records[t].y)];
            bin.sum += sample;
            ++bin.count;
        }
    }
    return model;
}

std::optional<double> predict_accel(const CausalModel& model, double u, double y,
                                    const HardwareSpec& target) {
    std::optional<double> g = model.g_hat(y);
    if (!g) return std::nullopt;
    return (target.hp * u + *g) / model.mass;
}

TrackLog transfer_control(const CausalModel& model, const HardwareSpec& target,
                          const Reference& ref, double feedback_gain, int steps,
                          double dt, const ForceProfile& g_true, double y0, double v0) {
    TrackLog out;
    double y = y0, v = v0;
    double sq_sum = 0.0;
    for (int t = 0; t <= steps; ++t) {
        double time = t * dt;
        double yr = ref.y_ref(time);
        double ar = ref.a_ref(time);
        std::optional<double> g = model.g_hat(y);
        if (!g) ++out.uncovered;
        double ff = (model.mass * ar - g.value_or(0.0)) / target.hp;
        double u = std::clamp(ff + feedback_gain * (yr - y), -1.0, 1.0);
        out.t.push_back(time);
        out.y.push_back(y);
        out.y_ref.push_back(yr);
        out.u.push_back(u);
        sq_sum += (y - yr) * (y - yr);
        double a = (target.hp * u + g_true(y)) / model.mass;
        v += a * dt;
        y += v * dt;
    }
    out.rms = std::sqrt(sq_sum / static_cast<double>(steps + 1));
    return out;
}

CausalModel do_intervene(const CausalModel& model,
                         const std::map<std::string, double>& assignments) {
    CausalModel out = model;
    for (const auto& [var, value] : assignments) {
        if (!out.diagram.has_node(var)) throw UnknownVariable("unknown variable: " + var);
        auto& edges = out.diagram.edges;
        edges.erase(std::remove_if(edges.begin(), edges.end(),
                                   [&](const auto& e) { return e.second == var; }),
                    edges.end());
        out.fixed[var] = value;
    }
    return out;
}

ForceProfile g_profile(const std::string& id) {
    if (id == "bumpy") return [](double y) { return -2.0 + 1.5 * std::sin(0.8 * y); };
    if (id == "const") return [](double) { return -2.0; };
    if (id == "zero") return [](double) { return 0.0; };
    throw std::invalid_argument("unknown g profile: " + id);
}

namespace {

/// Cruise policy: hold a target velocity, compensating the nominal road drag.
DrivePolicy cruise(double hp, double v_des) {
    return [hp, v_des](double, double, double v) {
        return (2.0 + 30.0 * (v_des - v)) / hp;
    };
}

double rel_l2(const std::vector<double>& err, const std::vector<double>& ref) {
    double num = 0.0, den = 0.0;
    for (double e : err) num += e * e;
    for (double r : ref) den += r * r;
    return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

}  // namespace

TwoCarResult run_two_car_experiment(const TwoCarConfig& cfg) {
    TwoCarResult res;
    ForceProfile g = g_profile(cfg.profile);
    int drive_steps = static_cast<int>(cfg.drive_seconds / cfg.dt);

    // source cars sweep overlapping position ranges in opposite directions
    std::vector<std::pair<HardwareSpec, ExperienceLog>> logs;
    for (size_t k = 0; k < cfg.source_hp.size(); ++k) {
        HardwareSpec spec{cfg.source_hp[k]};
        double y0 = k % 2 == 0 ? 0.0 : 30.0;
        double v_des = k % 2 == 0 ? 1.5 : -1.5;
        logs.emplace_back(spec,
                          simulate_car(spec, g, cruise(spec.hp, v_des), drive_steps,
                                       cfg.dt, y0, 0.0));
    }

    CausalModel model = init_model(Description::two_car_default(), cfg.bin_width);
    res.model = infer_g(model, logs);

    // recovery error at bin centers
    std::vector<double> err, truth;
    for (const auto& [bin, stat] : res.model.g_table) {
        double yc = (bin + 0.5) * cfg.bin_width;
        err.push_back(stat.mean() - g(yc));
        truth.push_back(g(yc));
    }
    res.g_rel_l2_err = rel_l2(err, truth);

    // per-car tables must agree on shared bins (hp-invariance)
    if (logs.size() >= 2) {
        CausalModel m1 = infer_g(model, {logs[0]});
        CausalModel m2 = infer_g(model, {logs[1]});
        std::vector<double> diff, scale;
        for (const auto& [bin, stat] : m1.g_table) {
            auto it = m2.g_table.find(bin);
            if (it == m2.g_table.end()) continue;
            diff.push_back(stat.mean() - it->second.mean());
            scale.push_back(g((bin + 0.5) * cfg.bin_width));
        }
        res.crosscar_disagreement = rel_l2(diff, scale);
    }

    // target-car prediction at covered bin centers, u = 0.5
    HardwareSpec target{cfg.target_hp};
    std::vector<double> perr, ptruth;
    for (const auto& [bin, stat] : res.model.g_table) {
        (void)stat;
        double yc = (bin + 0.5) * cfg.bin_width;
        std::optional<double> pred = predict_accel(res.model, 0.5, yc, target);
        double a_true = (target.hp * 0.5 + g(yc)) / res.model.mass;
        perr.push_back(pred.value_or(a_true) - a_true);
        ptruth.push_back(a_true);
    }
    res.predict_rel_err = rel_l2(perr, ptruth);

    // probe far outside the driven range; every query must come back uncovered
    long long lo = res.model.g_table.begin()->first;
    long long hi = res.model.g_table.rbegin()->first;
    for (int k = 1; k <= 50; ++k) {
        if (!predict_accel(res.model, 0.5, (lo - k - 0.5) * cfg.bin_width, target))
            ++res.uncovered_queries;
        if (!predict_accel(res.model, 0.5, (hi + k + 1.5) * cfg.bin_width, target))
            ++res.uncovered_queries;
    }

    // tracking: transferred feedforward vs naive (no road-force table)
    Reference ref;
    double period = cfg.track_seconds;
    double omega = 2.0 * std::acos(-1.0) / period;
    ref.y_ref = [omega](double t) { return 15.0 + 10.0 * std::sin(omega * t); };
    ref.a_ref = [omega](double t) { return -10.0 * omega * omega * std::sin(omega * t); };
    int track_steps = static_cast<int>(cfg.track_seconds / cfg.dt);
    double y0 = ref.y_ref(0.0);
    double v0 = 10.0 * omega;  // matched initial velocity
    TrackLog transferred = transfer_control(res.model, target, ref, cfg.feedback_gain,
                                            track_steps, cfg.dt, g, y0, v0);
    CausalModel naive = res.model;
    naive.g_table.clear();
    TrackLog naive_log = transfer_control(naive, target, ref, cfg.feedback_gain,
                                          track_steps, cfg.dt, g, y0, v0);
    res.rms_transfer = transferred.rms;
    res.rms_naive = naive_log.rms;
    return res;
}

}  // namespace wayfind::causal
