#include "reeblab/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace reeblab {

ConfigFile ConfigFile::parse(std::istream& in) {
    ConfigFile cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("config line " + std::to_string(lineno) +
                                   ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw config_error("config line " + std::to_string(lineno) +
                                   ": empty section name");
            if (!cfg.data_.count(section)) {
                cfg.data_[section];
                cfg.section_order_.push_back(section);
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw config_error("config line " + std::to_string(lineno) +
                               ": empty key");
        if (section.empty())
            throw config_error("config line " + std::to_string(lineno) +
                               ": key outside of any [section]");
        cfg.data_[section].insert({key, Entry{value, lineno}});
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    return parse(in);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

bool ConfigFile::has_section(const std::string& section) const {
    return data_.count(section) > 0;
}

std::string ConfigFile::get(const std::string& section,
                            const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end() || !s->second.count(key))
        throw config_error("config: missing [" + section + "] " + key);
    if (s->second.count(key) > 1)
        throw config_error("config: repeated key [" + section + "] " + key);
    return s->second.find(key)->second.value;
}

std::string ConfigFile::get_or(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config: [" + section + "] " + key +
                           " is not a number: " + v);
    }
}

double ConfigFile::get_double_or(const std::string& section,
                                 const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
    return has(section, key) ? int(get_double(section, key)) : fallback;
}

std::vector<std::string> ConfigFile::get_all(const std::string& section,
                                             const std::string& key) const {
    std::vector<std::string> out;
    const auto s = data_.find(section);
    if (s == data_.end()) return out;
    const auto [lo, hi] = s->second.equal_range(key);
    for (auto it = lo; it != hi; ++it) out.push_back(it->second.value);
    return out;
}

std::map<std::pair<int, int>, double> ConfigFile::coefficient_map(
    const std::string& section) const {
    std::map<std::pair<int, int>, double> coef;
    const auto s = data_.find(section);
    if (s == data_.end()) return coef;
    for (const auto& [key, entry] : s->second) {
        int l = 0, m = 0;
        if (std::sscanf(key.c_str(), "c(%d,%d)", &l, &m) == 2) {
            double value = 0.0;
            try {
                value = std::stod(entry.value);
            } catch (const std::exception&) {
                throw config_error("config line " + std::to_string(entry.line) +
                                   ": bad coefficient value");
            }
            if (coef.count({l, m}))
                throw config_error("config line " + std::to_string(entry.line) +
                                   ": duplicate coefficient " + key);
            coef[{l, m}] = value;
        }
    }
    return coef;
}

namespace {

PhasePoint guess_from_spec(const std::string& spec, const ConformalMetric& m) {
    auto sf = [&m](const Eigen::Vector3d& x, const Eigen::Vector3d& v) {
        return PhasePoint::surface(m, x, v);
    };
    if (spec == "equator") return sf({1, 0, 0}, {0, 1, 0});
    if (spec == "meridian-xz") return sf({1, 0, 0}, {0, 0, 1});
    if (spec == "meridian-yz") return sf({0, 1, 0}, {0, 0, 1});
    if (spec.rfind("tilt:", 0) == 0) {
        const double deg = std::stod(spec.substr(5));
        const double a = deg * M_PI / 180.0;
        return sf({1, 0, 0}, {0, std::cos(a), std::sin(a)});
    }
    // numeric "x,y,z;vx,vy,vz"
    Eigen::Vector3d x, v;
    char semi;
    std::istringstream ss(spec);
    char c1, c2, c3, c4;
    if (ss >> x[0] >> c1 >> x[1] >> c2 >> x[2] >> semi >> v[0] >> c3 >> v[1] >>
            c4 >> v[2] &&
        c1 == ',' && c2 == ',' && semi == ';' && c3 == ',' && c4 == ',')
        return sf(x, v);
    throw config_error("config: cannot parse guess spec: " + spec);
}

}  // namespace

std::vector<PhasePoint> ExperimentConfig::parse_guesses(
    const ConformalMetric& m) const {
    std::vector<PhasePoint> out;
    for (const std::string& spec : guess_specs)
        out.push_back(guess_from_spec(spec, m));
    return out;
}

ExperimentConfig ExperimentConfig::from_file(const ConfigFile& cfg) {
    ExperimentConfig ec;
    ec.task = cfg.get("task", "name");
    static const char* known[] = {"identities", "integrate", "find-orbit",
                                  "cz", "birkhoff", "scan"};
    bool ok = false;
    for (const char* k : known) ok = ok || ec.task == k;
    if (!ok) throw config_error("config: unknown task name: " + ec.task);

    if (cfg.has_section("metric")) {
        if (cfg.has("metric", "file")) {
            if (!cfg.coefficient_map("metric").empty())
                throw config_error(
                    "config: [metric] uses either a descriptor file or inline "
                    "coefficients, not both");
            try {
                ec.metric = ConformalMetric::load_file(cfg.get("metric", "file"));
            } catch (const std::exception& e) {
                throw config_error(std::string("config: [metric] file: ") +
                                   e.what());
            }
        } else {
            ec.metric = ConformalMetric(cfg.coefficient_map("metric"));
        }
        ec.has_metric = true;
    }
    if (cfg.has_section("family")) {
        ec.family_coefficients = cfg.coefficient_map("family");
        const double e0 = cfg.get_double_or("family", "eps_start", 0.01);
        const double e1 = cfg.get_double_or("family", "eps_end", 0.1);
        const int count = cfg.get_int_or("family", "eps_count", 10);
        if (count < 1 || (count > 1 && e1 < e0))
            throw config_error("config: [family] eps grid is not well-ordered");
        for (int i = 0; i < count; ++i)
            ec.eps_grid.push_back(count == 1 ? e0
                                             : e0 + (e1 - e0) * i / (count - 1));
    }
    ec.guess_specs = cfg.get_all("task", "guess");
    if (ec.guess_specs.empty()) ec.guess_specs = {"equator"};

    ec.tol = cfg.get_double_or("task", "tol", 1e-9);
    if (ec.tol <= 0.0) throw config_error("config: tol must be positive");
    ec.seed = (unsigned long long)cfg.get_double_or("task", "seed", 0.0);
    ec.horizon = cfg.get_double_or("task", "T", 10.0);
    ec.chart = cfg.get_or("task", "chart", "geodesic");
    if (ec.chart != "geodesic" && ec.chart != "reeb")
        throw config_error("config: chart must be geodesic or reeb");
    ec.samples = cfg.get_int_or("task", "samples", 400);
    ec.grid = cfg.get_int_or("task", "grid", 32);
    ec.s_coord = cfg.get_double_or("task", "s", 0.0);
    ec.theta_coord = cfg.get_double_or("task", "theta", M_PI / 2.0);
    ec.with_self_linking =
        cfg.get_or("task", "self_linking", "false") == "true";

    if (ec.task == "scan" && ec.eps_grid.empty())
        throw config_error("config: scan task needs a [family] section");
    if (ec.task != "scan" && !ec.has_metric)
        throw config_error("config: task needs a [metric] section");
    return ec;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() /
                         (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace reeblab
