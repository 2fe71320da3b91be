#ifndef REEBLAB_WINDING_HPP
#define REEBLAB_WINDING_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace reeblab {

/// Linear stability class of a determinant-one 2x2 monodromy matrix.
enum class Stability { Elliptic, HypPlus, HypMinus, Degenerate };

const char* to_string(Stability s);

/// Eigenvalues of a det-1 matrix by trace: a reciprocal real pair or a
/// conjugate unit-circle pair.
struct EigenPair {
    std::complex<double> mu1, mu2;
};

/// Trace rule: |tr| < 2 elliptic, tr > 2 (+)-hyperbolic, tr < -2
/// (-)-hyperbolic; | |tr| - 2 | <= 1e-6 reported Degenerate.
/// Rejects |det - 1| > 1e-6.
Stability classify(const Eigen::Matrix2d& monodromy);
EigenPair monodromy_eigenvalues(const Eigen::Matrix2d& monodromy);

/// Sampled path of invertible 2x2 matrices on a grid 0 = s_0 < ... < s_n = 1.
/// Consecutive samples must be close enough that no transported vector's
/// argument jumps by >= pi/2 between samples; winding computations reject
/// under-resolved arcs.
struct MatrixArc {
    std::vector<double> s;
    std::vector<Eigen::Matrix2d> phi;

    std::size_t size() const { return s.size(); }
    const Eigen::Matrix2d& end() const { return phi.back(); }
};

/// A MatrixArc validated as symplectic: phi(0) = I, det phi = 1 +- 1e-7.
struct SymplecticArc : MatrixArc {};

/// Validates and wraps; throws std::invalid_argument on violations.
SymplecticArc make_symplectic_arc(MatrixArc arc);

/// Winding number of s -> phi(s) z in full turns (continuous argument lift).
/// Scale invariant.  Throws refinement_needed if an argument jump >= pi/2
/// occurs between consecutive samples.
double winding(const MatrixArc& arc, const Eigen::Vector2d& z);

struct refinement_needed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Range of the winding number over all directions, computed on 64 uniform
/// angles in [0, pi) followed by golden-section refinement at both extremes.
/// The interval length can never exceed 1/2; violations beyond 1e-9 raise
/// std::logic_error (an arc-resolution bug, not a data condition).
struct WindingInterval {
    double lo = 0.0, hi = 0.0;
    double angle_lo = 0.0, angle_hi = 0.0;  // argmin / argmax directions

    double length() const { return hi - lo; }
};

WindingInterval winding_interval(const MatrixArc& arc, int n_angles = 64);

/// Conley-Zehnder index of a nondegenerate symplectic arc: 2k+1 when the
/// winding interval lies strictly between the consecutive integers k and
/// k+1, and 2k when the integer k lies in it (endpoint containment decided
/// at 1e-9).  Requires |tr phi(1) - 2| > 1e-6; throws otherwise.  An
/// interval containing an integer while phi(1) has no positive real
/// eigenvalue signals resolution failure (std::logic_error).
int cz_index(const SymplecticArc& arc);

/// Parity equivalences: an even index matches (+)-hyperbolic, an odd index
/// matches elliptic or (-)-hyperbolic.  Degenerate input rejected.
bool parity_check(Stability classification, int cz_index);

}  // namespace reeblab

#endif
