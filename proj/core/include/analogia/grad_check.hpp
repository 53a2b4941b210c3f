// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "analogia/error.hpp"
#include "analogia/tape.hpp"
#include "analogia/tensor.hpp"

namespace analogia {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_tensor = 0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t coordinates = 0;
};

/// |analytic - numeric| / max(1, |analytic|, |numeric|)
inline double gradient_rel_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

namespace detail {

template <typename T, typename Build>
Tape<T> record(Build& build, const std::vector<Tensor<double>>& params, bool tracking, std::vector<Var>& vars,
               Var& out) {
    Tape<T> tape(tracking);
    vars.clear();
    for (const auto& p : params) vars.push_back(tape.parameter(p.template cast<T>()));
    out = build(tape, std::span<const Var>(vars));
    return tape;
}

template <typename Build>
double evaluate(Build& build, const std::vector<Tensor<double>>& params) {
    std::vector<Var> vars;
    Var out;
    Tape<double> tape = record<double>(build, params, false, vars, out);
    const double v = tape.value(out).item();
    if (!std::isfinite(v)) throw DomainError("finite difference: function value is not finite");
    return v;
}

}  // namespace detail

/// Compares reverse-mode gradients against central differences.
///
/// `build(tape, params)` must record a scalar function of `params` on the tape
/// and return it; it is called with Tape<AnalyticT> once and with Tape<double>
/// for every perturbed coordinate, so a generic lambda is the usual choice.
/// The numeric side always runs in double.
template <typename AnalyticT = double, typename Build>
GradCheckResult check_gradients(Build&& build, const std::vector<Tensor<double>>& params, double eps) {
    if (!(eps > 0.0)) throw DomainError("finite difference: eps must be positive");

    std::vector<Var> vars;
    Var out;
    Tape<AnalyticT> tape = detail::record<AnalyticT>(build, params, true, vars, out);
    if (!std::isfinite(static_cast<double>(tape.value(out).item()))) {
        throw DomainError("finite difference: function value is not finite");
    }
    const Gradients<AnalyticT> grads = tape.backward(out);

    GradCheckResult result;
    std::vector<Tensor<double>> probe = params;
    for (std::size_t t = 0; t < params.size(); ++t) {
        const Tensor<AnalyticT> analytic = grads.of(vars[t]);
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            const double x0 = params[t][i];
            probe[t][i] = x0 + eps;
            const double up = detail::evaluate(build, probe);
            probe[t][i] = x0 - eps;
            const double down = detail::evaluate(build, probe);
            probe[t][i] = x0;

            const double numeric = (up - down) / (2.0 * eps);
            const double a = static_cast<double>(analytic[i]);
            const double err = gradient_rel_error(a, numeric);
            ++result.coordinates;
            if (err > result.max_rel_error || result.coordinates == 1) {
                result.max_rel_error = std::max(result.max_rel_error, err);
                result.worst_tensor = t;
                result.worst_index = i;
                result.analytic = a;
                result.numeric = numeric;
            }
        }
    }
    return result;
}

/// Single-tensor form: max relative error between the tape gradient of `f` at `x`
/// and its central difference with step `eps`.
template <typename AnalyticT = double, typename F>
double finite_difference_check(F&& f, const Tensor<double>& x, double eps) {
    auto build = [&f](auto& tape, std::span<const Var> vars) { return f(tape, vars[0]); };
    return check_gradients<AnalyticT>(build, std::vector<Tensor<double>>{x}, eps).max_rel_error;
}

}  // namespace analogia
