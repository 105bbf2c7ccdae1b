#pragma once

#include <optional>

#include "toric/scaling.hpp"

namespace toric {

// Qubit cost of hitting a target logical failure rate at physical rate p.
// omega = 2 * l_real^2 counts data qubits at the continuous distance the
// inverted model asks for; l_code is the smallest realizable lattice (odd,
// >= 3) at or above it, and achieved_p_fail re-evaluates the model there.
struct OverheadResult {
    double omega = 0.0;
    double l_real = 0.0;
    int l_code = 3;
    Regime regime = Regime::Crossover;
    double achieved_p_fail = 0.0;
};

// Inverts P = A * exp(-a * (p_c0 - p)^nu0 * L) for L. Requires p < p_c0 and
// target < A.
OverheadResult omega_ush(double p, double target,
                         const UniversalScalingParams& params = {});

// Inverts the low-p form P = 2L * C(L, L/2) * p^(L/2) for L, using
//   l_real = | (2 ln P - ln(-2 ln P)) / ln(4p) |,
// the closed form obtained from Stirling's approximation of the binomial.
// Requires 0 < p < 1/4 so ln(4p) is negative.
OverheadResult omega_lp(double p, double target);

// Both candidate inversions plus a verdict. `regime` is UniversalScaling or
// LowP when exactly one candidate lands inside its own validity window at
// its continuous l_real, Crossover otherwise.
struct OverheadPlan {
    Regime regime = Regime::Crossover;
    std::optional<OverheadResult> ush;
    std::optional<OverheadResult> lp;

    // The plan to act on. In the crossover case this is the candidate with
    // the larger omega: when neither form is trusted, the cheaper answer is
    // the one more likely to be an extrapolation artifact.
    const OverheadResult& recommended() const;
};

OverheadPlan plan_overhead(double p, double target,
                           const UniversalScalingParams& params = {});

}  // namespace toric
