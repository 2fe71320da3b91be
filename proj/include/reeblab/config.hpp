#ifndef REEBLAB_CONFIG_HPP
#define REEBLAB_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reeblab/flows.hpp"
#include "reeblab/metric.hpp"

namespace reeblab {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Line-oriented "key = value" text with [section] headers; '#' comments.
/// Parse errors carry line numbers.  Repeated keys are collected in order.
class ConfigFile {
public:
    static ConfigFile parse(std::istream& in);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    /// Single-valued lookup; throws config_error when repeated or missing
    /// without a default.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int_or(const std::string& section, const std::string& key,
                   int fallback) const;
    std::vector<std::string> get_all(const std::string& section,
                                     const std::string& key) const;
    const std::vector<std::string>& sections() const { return section_order_; }
    bool has_section(const std::string& section) const;

    /// Coefficient keys "c(l,m)" of a section, as a metric coefficient map.
    std::map<std::pair<int, int>, double> coefficient_map(
        const std::string& section) const;

private:
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, std::multimap<std::string, Entry>> data_;
    std::vector<std::string> section_order_;
};

/// Experiment configuration: metric (or family with a parameter grid),
/// task name and task parameters, tolerances, seed.
struct ExperimentConfig {
    std::string task;
    ConformalMetric metric;
    bool has_metric = false;

    // family for scans: u_eps = eps * sum c Y
    std::map<std::pair<int, int>, double> family_coefficients;
    std::vector<double> eps_grid;

    std::vector<PhasePoint> parse_guesses(const ConformalMetric& m) const;
    std::vector<std::string> guess_specs;

    double tol = 1e-9;
    unsigned long long seed = 0;
    double horizon = 10.0;      // integrate task
    std::string chart = "geodesic";
    int samples = 400;
    int grid = 32;              // birkhoff grid
    double s_coord = 0.0, theta_coord = M_PI / 2.0;
    bool with_self_linking = false;

    static ExperimentConfig from_file(const ConfigFile& cfg);
};

/// Atomically writes content to path (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace reeblab

#endif
