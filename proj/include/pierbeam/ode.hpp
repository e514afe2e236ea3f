#pragma once

#include "core.hpp"

#include <boost/numeric/odeint.hpp>

#include <vector>

namespace pierbeam {

using State = std::vector<double>;
using Rhs = std::function<void(const State&, State&, double)>;

struct Tolerances {
    double rtol = 1e-10;
    double atol = 1e-12;
};

// Sampled trajectory on a uniform time grid t_i = i*T/(n-1).
struct Trajectory {
    std::vector<double> t;
    std::vector<State> y;
};

namespace detail {
inline void guard_state(const State& y, double t)
{
    for (double v : y)
        if (!std::isfinite(v))
            throw NumericalError(ErrorCode::IntegrationFailure, "non-finite state at t=" + std::to_string(t));
}
} // namespace detail

// Final state at t1 by the controlled Fehlberg 7(8) pair.
inline State integrate_final(const Rhs& f, State y, double t1, Tolerances tol = {1e-11, 1e-13})
{
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(tol.atol, tol.rtol, ode::runge_kutta_fehlberg78<State>());
    try {
        ode::integrate_adaptive(stepper, f, y, 0.0, t1, t1 / 100, [](const State& s, double t) { detail::guard_state(s, t); });
    } catch (const ode::step_adjustment_error& e) {
        throw NumericalError(ErrorCode::IntegrationFailure, e.what());
    } catch (const ode::no_progress_error& e) {
        throw NumericalError(ErrorCode::IntegrationFailure, e.what());
    }
    return y;
}

// Dense-output Dormand-Prince 5(4) sampled at n uniform instants on [0, T].
inline Trajectory integrate_dense(const Rhs& f, const State& y0, double T, std::size_t n = 4001, Tolerances tol = {})
{
    namespace ode = boost::numeric::odeint;
    if (n < 2) n = 2;
    Trajectory tr;
    tr.t.reserve(n);
    tr.y.reserve(n);
    std::vector<double> times(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = T * double(i) / double(n - 1);
    State y = y0;
    auto stepper = ode::make_dense_output(tol.atol, tol.rtol, ode::runge_kutta_dopri5<State>());
    try {
        ode::integrate_times(stepper, f, y, times.begin(), times.end(), T / double(n - 1),
                             [&tr](const State& s, double t) {
                                 detail::guard_state(s, t);
                                 tr.t.push_back(t);
                                 tr.y.push_back(s);
                             });
    } catch (const ode::step_adjustment_error& e) {
        throw NumericalError(ErrorCode::IntegrationFailure, e.what());
    } catch (const ode::no_progress_error& e) {
        throw NumericalError(ErrorCode::IntegrationFailure, e.what());
    }
    return tr;
}

} // namespace pierbeam
