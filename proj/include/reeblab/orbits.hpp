#ifndef REEBLAB_ORBITS_HPP
#define REEBLAB_ORBITS_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "reeblab/flows.hpp"
#include "reeblab/linking.hpp"
#include "reeblab/winding.hpp"

namespace reeblab {

/// Persisted result of a closed-orbit analysis.  The monodromy, the
/// classification, the Conley-Zehnder index and the two cross-validation
/// traces all describe the lifted Reeb orbit over `reeb_period` (twice the
/// geodesic period when the lift ends at -q0).
struct ClosedOrbitRecord {
    static constexpr int kSchemaVersion = 1;

    PhasePoint initial;              // converged surface-chart point
    Quaternion lift_q0;              // lifted initial point on S^3
    double period = 0.0;             // minimal geodesic period
    bool lift_doubled = false;
    double reeb_period = 0.0;
    Eigen::Matrix2d monodromy = Eigen::Matrix2d::Identity();
    Stability classification = Stability::Degenerate;
    std::optional<int> cz_index;
    std::optional<int> self_linking;
    double winding_lo = 0.0, winding_hi = 0.0;
    double closure_gap = 0.0;
    double det_gap = 0.0;
    double jacobi_trace = 0.0;                 // oracle route 1
    Eigen::Matrix2d fd_monodromy = Eigen::Matrix2d::Identity();  // route 2
    int newton_iterations = 0;

    double fd_trace() const { return fd_monodromy.trace(); }

    /// Key/value text document, one field per line.  Schema versioned.
    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static ClosedOrbitRecord load(std::istream& is);
    static ClosedOrbitRecord load_file(const std::string& path);

    /// Re-checks the record invariants (det gap, trace/classification
    /// consistency); throws std::runtime_error on violation.
    void validate() const;
};

struct FindOrbitOptions {
    double tol = 1e-9;            // closure gap target
    int max_iterations = 50;
    double capture_radius = 0.8;  // accepted section-return distance
    double t_cap = 1000.0;        // give up if no return before this time
    double settle_time = 0.25;    // ignore section crossings earlier than this
    double newton_fd_step = 1e-6;
    IntegrateOptions integrate{};
    bool compute_cz = true;
    bool compute_self_linking = false;
};

struct find_closed_failure : std::runtime_error {
    find_closed_failure(const std::string& what, double residual, int iters)
        : std::runtime_error(what), last_residual(residual), iterations(iters) {}
    double last_residual;
    int iterations;
};

/// Newton shooting on the return map of the local transversal section
/// through the guess.  The converged record carries the monodromy from the
/// linearized flow, the finite-difference shooting monodromy and the Jacobi
/// trace as independent routes.  Degenerate orbits are flagged, not errors;
/// non-convergence raises find_closed_failure.
ClosedOrbitRecord find_closed(const ConformalMetric& metric,
                              const PhasePoint& guess,
                              const FindOrbitOptions& opt = {});

/// Self-linking number of a closed Reeb orbit: push-off along the
/// contact-frame section (jq), stereographic projection from a pole away
/// from both curves, Gauss linking integral with escalation.  The integer
/// residual must come out below 0.05.
int self_linking(const ContactForm& form, const Quaternion& q0,
                 double reeb_period, const IntegrateOptions& opt = {},
                 double push_off = 1e-3);
int self_linking(const ContactForm& form, const Trajectory& closed_orbit,
                 const IntegrateOptions& opt = {}, double push_off = 1e-3);

/// Parity equivalences applied to a record (needs a non-degenerate
/// classification and a computed index).
bool parity_check(const ClosedOrbitRecord& record);

}  // namespace reeblab

#endif
