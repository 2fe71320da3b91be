#ifndef REEBLAB_RK45_HPP
#define REEBLAB_RK45_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

namespace reeblab {

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 1e-3;
    long max_steps = 20000000;
};

struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Embedded Dormand-Prince 5(4) stepper with an optional post-step
/// projection onto a constraint manifold and sign-change event location by
/// bisection (re-integrating the bracketing step from its start state).
template <int N>
class AdaptiveRk {
public:
    using State = Eigen::Matrix<double, N, 1>;
    using Rhs = std::function<void(double, const State&, State&)>;
    using Projector = std::function<void(State&)>;
    using Observer = std::function<void(double, const State&)>;
    using Level = std::function<double(double, const State&)>;
    using Accept = std::function<bool(double, const State&)>;

    AdaptiveRk(Rhs rhs, IntegrateOptions opt = {}, Projector project = nullptr)
        : rhs_(std::move(rhs)), opt_(opt), project_(std::move(project)) {}

    void set_state(double t, const State& y) {
        t_ = t;
        y_ = y;
        h_ = 0.0;
    }

    double time() const { return t_; }
    const State& state() const { return y_; }

    /// Integrates to exactly t_end.  The observer runs after every accepted
    /// (and projected) step, including the final clipped one.
    void advance_to(double t_end, const Observer& observe = nullptr) {
        const double dir = t_end >= t_ ? 1.0 : -1.0;
        if (t_end == t_) return;
        if (h_ == 0.0 || h_ * dir <= 0.0) h_ = dir * opt_.initial_step;
        long steps = 0;
        while (dir * (t_end - t_) > 0.0) {
            if (++steps > opt_.max_steps)
                throw integration_error("rk45: step budget exhausted");
            double h = dir * std::min({std::abs(h_), opt_.max_step,
                                       std::abs(t_end - t_)});
            State ynew;
            double err = 0.0;
            if (!try_step(h, ynew, err)) {
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(t_)))
                    throw integration_error("rk45: step size underflow");
                continue;
            }
            t_ += h;
            y_ = ynew;
            if (project_) project_(y_);
            h_ = h * std::min(5.0, std::max(0.2, 0.9 * std::pow(
                                                      std::max(err, 1e-16), -0.2)));
            if (observe) observe(t_, y_);
        }
    }

    struct CrossingOptions {
        int direction = +1;  // +1: minus-to-plus, -1: plus-to-minus, 0: any
        double refine_tol = 1e-12;
        double t_settle = 0.0;  // ignore crossings before this time offset
    };

    /// Integrates forward watching the sign of `level`.  On a directional
    /// sign change the crossing is refined by bisection; if `accept` passes
    /// (or is null) the state is left at the crossing and true is returned.
    /// Rejected crossings are skipped.  Returns false if no accepted
    /// crossing occurs before t_cap (state then at t_cap).
    bool advance_to_crossing(const Level& level, double t_cap,
                             const CrossingOptions& copt,
                             const Accept& accept = nullptr) {
        const double t_start = t_;
        const double dir = t_cap >= t_ ? 1.0 : -1.0;
        if (h_ == 0.0 || h_ * dir <= 0.0) h_ = dir * opt_.initial_step;
        double prev_level = level(t_, y_);
        long steps = 0;
        while (dir * (t_cap - t_) > 0.0) {
            if (++steps > opt_.max_steps)
                throw integration_error("rk45: step budget exhausted");
            const double t0 = t_;
            const State y0 = y_;
            double h = dir * std::min({std::abs(h_), opt_.max_step,
                                       std::abs(t_cap - t_)});
            State ynew;
            double err = 0.0;
            if (!try_step(h, ynew, err)) {
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(t_)))
                    throw integration_error("rk45: step size underflow");
                continue;
            }
            t_ += h;
            y_ = ynew;
            if (project_) project_(y_);
            h_ = h * std::min(5.0, std::max(0.2, 0.9 * std::pow(
                                                      std::max(err, 1e-16), -0.2)));
            const double cur_level = level(t_, y_);
            const bool crossed =
                (copt.direction >= 0 && prev_level < 0.0 && cur_level >= 0.0) ||
                (copt.direction <= 0 && prev_level > 0.0 && cur_level <= 0.0);
            if (crossed && std::abs(t0 - t_start) >= copt.t_settle) {
                const int cross_dir = prev_level < 0.0 ? +1 : -1;
                double ta = t0, tb = t_;
                // bisection: re-integrate the bracket from its start state
                while (std::abs(tb - ta) >
                       copt.refine_tol * std::max(1.0, std::abs(tb))) {
                    const double tm = 0.5 * (ta + tb);
                    AdaptiveRk<N> sub(rhs_, opt_, project_);
                    sub.set_state(t0, y0);
                    sub.advance_to(tm);
                    const double lm = level(tm, sub.state());
                    const bool same_side = cross_dir > 0 ? lm < 0.0 : lm > 0.0;
                    if (same_side)
                        ta = tm;
                    else
                        tb = tm;
                }
                AdaptiveRk<N> sub(rhs_, opt_, project_);
                sub.set_state(t0, y0);
                sub.advance_to(tb);
                if (!accept || accept(tb, sub.state())) {
                    t_ = tb;
                    y_ = sub.state();
                    return true;
                }
                // rejected: keep going from the step end (t_, y_)
            }
            prev_level = cur_level;
        }
        return false;
    }

private:
    /// One trial step of size h.  On success fills ynew and returns true;
    /// on failure returns false with err > 1.
    bool try_step(double h, State& ynew, double& err) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                                b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                                e3 = 500.0 / 1113 - 7571.0 / 16695,
                                e4 = 125.0 / 192 - 393.0 / 640,
                                e5 = -2187.0 / 6784 + 92097.0 / 339200,
                                e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

        State k1, k2, k3, k4, k5, k6, k7;
        rhs_(t_, y_, k1);
        rhs_(t_ + h * a21, y_ + h * a21 * k1, k2);
        rhs_(t_ + h * (3.0 / 10), y_ + h * (a31 * k1 + a32 * k2), k3);
        rhs_(t_ + h * (4.0 / 5), y_ + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
        rhs_(t_ + h * (8.0 / 9),
             y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
        rhs_(t_ + h,
             y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
             k6);
        ynew = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs_(t_ + h, ynew, k7);

        const State evec =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double sum = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc =
                opt_.atol +
                opt_.rtol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
            const double r = evec[i] / sc;
            sum += r * r;
        }
        err = std::sqrt(sum / N);
        return err <= 1.0;
    }

    Rhs rhs_;
    IntegrateOptions opt_;
    Projector project_;
    double t_ = 0.0;
    State y_ = State::Zero();
    double h_ = 0.0;
};

}  // namespace reeblab

#endif
