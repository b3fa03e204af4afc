#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wayfind::causal {

struct CyclicDescription : std::runtime_error {
    explicit CyclicDescription(const std::string& what) : std::runtime_error(what) {}
};

struct ContradictoryIndependence : std::runtime_error {
    explicit ContradictoryIndependence(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownVariable : std::runtime_error {
    explicit UnknownVariable(const std::string& what) : std::runtime_error(what) {}
};

struct LogTooShort : std::runtime_error {
    explicit LogTooShort(const std::string& what) : std::runtime_error(what) {}
};

struct DescriptionFormatError : std::runtime_error {
    explicit DescriptionFormatError(const std::string& what) : std::runtime_error(what) {}
};

struct HardwareSpec {
    double hp = 1.0;  // engine scale; engine force = hp * u
};

struct LogRecord {
    double u = 0.0;  // control, [-1, 1]
    double y = 0.0;  // position
};

/// Uniformly sampled (u, y) experience of one car.
struct ExperienceLog {
    double dt = 0.01;
    std::vector<LogRecord> records;
};

void save_log_csv(const ExperienceLog& log, const std::filesystem::path& file);
ExperienceLog load_log_csv(const std::filesystem::path& file);

struct MechanismDecl {
    std::string output;
    std::vector<std::string> inputs;
    bool known = false;
    std::string formula;  // formula id when known ("f_F", "newton")
};

/// Declarative mechanism/independence description, parsed from lines like
///   mech F <- u hp : known f_F
///   mech ydd <- F G : known newton
///   mech G <- y : unknown
///   indep G hp
///   const m 1.0
struct Description {
    std::vector<MechanismDecl> mechanisms;
    std::vector<std::pair<std::string, std::string>> independences;  // (variable, non-parent)
    double mass = 1.0;

    static Description parse(const std::string& text);
    /// The bundled two-car description (engine + Newton + unknown road force).
    static Description two_car_default();
};

struct Dag {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;  // (from, to)

    bool has_node(const std::string& n) const;
    std::vector<std::string> parents(const std::string& n) const;
};

/// Nodes = declared variables, edges = mechanism inputs. Throws on cycles
/// and on independence assertions that contradict a declared input.
Dag build_diagram(const Description& d);

struct BinStat {
    double sum = 0.0;
    std::uint64_t count = 0;
    double mean() const { return sum / static_cast<double>(count); }
};

/// Causal model of the two-car scenario: the diagram, the known mechanisms
/// (F = hp*u, ydd = (F+G)/m), and the learned position-binned road-force
/// table. do()-style interventions are recorded as fixed values.
struct CausalModel {
    Dag diagram;
    double mass = 1.0;
    double bin_width = 0.25;
    std::map<long long, BinStat> g_table;
    std::map<std::string, double> fixed;

    long long bin_of(double y) const;
    /// Learned road force at y, or nullopt when the bin was never visited.
    std::optional<double> g_hat(double y) const;
};

CausalModel init_model(const Description& d, double bin_width = 0.25);

using DrivePolicy = std::function<double(double t, double y, double v)>;
using ForceProfile = std::function<double(double y)>;

/// Ground-truth rig: semi-implicit Euler of m*ydd = hp*u + g_true(y),
/// logging only (u, y) per the experience definition.
ExperienceLog simulate_car(const HardwareSpec& spec, const ForceProfile& g_true,
                           const DrivePolicy& policy, int steps, double dt,
                           double y0 = 0.0, double v0 = 0.0, double mass = 1.0);

/// Pool samples m*ydd_fd - hp*u into position bins across all logs, where
/// ydd_fd is the central second difference of the logged positions.
CausalModel infer_g(CausalModel model,
                    const std::vector<std::pair<HardwareSpec, ExperienceLog>>& logs);

/// Post-interventional acceleration (hp_j*u + g_hat(y))/m, or nullopt when
/// y falls outside the visited bins (never extrapolated).
std::optional<double> predict_accel(const CausalModel& model, double u, double y,
                                    const HardwareSpec& target);

struct Reference {
    std::function<double(double t)> y_ref;
    std::function<double(double t)> a_ref;
};

struct TrackLog {
    std::vector<double> t, y, y_ref, u;
    double rms = 0.0;
    std::uint64_t uncovered = 0;  // steps where g_hat had no coverage
};

/// Feedforward-plus-feedback tracking on the ground-truth rig:
/// u = clamp((m*a_ref - g_hat(y))/hp + k_fb*(y_ref - y)); the feedforward
/// road-force term drops to zero in uncovered bins.
TrackLog transfer_control(const CausalModel& model, const HardwareSpec& target,
                          const Reference& ref, double feedback_gain, int steps,
                          double dt, const ForceProfile& g_true, double y0, double v0);

/// Remove incoming edges of the assigned variables and pin their values.
CausalModel do_intervene(const CausalModel& model,
                         const std::map<std::string, double>& assignments);

/// Named ground-truth road-force profiles ("bumpy", "const", "zero").
ForceProfile g_profile(const std::string& id);

/// End-to-end two-car transfer experiment: drive the source cars, infer the
/// road-force table, evaluate recovery, cross-car agreement, target-car
/// prediction, and feedforward-vs-naive tracking.
struct TwoCarConfig {
    double dt = 0.01;
    double bin_width = 0.25;
    std::vector<double> source_hp = {60.0, 120.0};
    double target_hp = 90.0;
    std::string profile = "bumpy";
    double feedback_gain = 0.05;
    double drive_seconds = 12.0;   // per source car
    double track_seconds = 20.0;   // reference duration
};

struct TwoCarResult {
    CausalModel model;
    double g_rel_l2_err = 0.0;        // learned table vs truth at bin centers
    double crosscar_disagreement = 0.0;  // per-car tables on shared bins
    double predict_rel_err = 0.0;     // target-car accel at covered bins
    std::uint64_t uncovered_queries = 0;  // probes outside coverage
    double rms_transfer = 0.0;
    double rms_naive = 0.0;
};

TwoCarResult run_two_car_experiment(const TwoCarConfig& cfg);

}  // namespace wayfind::causal
