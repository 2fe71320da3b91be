#ifndef REEBLAB_RUNNER_HPP
#define REEBLAB_RUNNER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "reeblab/config.hpp"
#include "reeblab/orbits.hpp"

namespace reeblab {

struct ScanCell {
    int eps_index = 0;
    double eps = 0.0;
    int guess_index = 0;
    std::string guess;
    bool converged = false;
    std::string error;
    ClosedOrbitRecord record;  // valid when converged
    bool parity_ok = false;    // meaningful when non-degenerate with an index
};

struct ScanReport {
    std::vector<ScanCell> rows;  // sorted by (eps, guess)
    std::optional<double> first_elliptic_eps;

    void write_csv(std::ostream& os) const;
};

/// Runs find_closed for every (eps, guess) cell of the family, classifies,
/// computes the Conley-Zehnder index where non-degenerate and checks the
/// parity equivalence.  Per-cell failures are recorded, the scan continues.
/// Cells run concurrently; the report order and contents are deterministic.
ScanReport elliptic_scan(
    const std::map<std::pair<int, int>, double>& family_coefficients,
    const std::vector<double>& eps_grid,
    const std::vector<std::string>& guess_specs, double tol = 1e-9,
    int threads = 0);

/// Dispatches an experiment configuration.  Writes outputs under out_dir
/// (atomically), returns the process exit code: 0 success, 1 validation
/// error, 2 numeric failure.
int run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                   std::ostream& log);

}  // namespace reeblab

#endif
