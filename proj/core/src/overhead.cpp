#include "toric/overhead.hpp"

#include <cmath>
#include <stdexcept>

namespace toric {

namespace {

int code_distance(double l_real) {
    int l = std::max(3, static_cast<int>(std::ceil(l_real)));
    if (l % 2 == 0) {
        ++l;
    }
    return l;
}

void require_target(double target) {
    if (!(target > 0.0) || !(target < 1.0)) {
        throw std::invalid_argument("overhead: target must be in (0, 1)");
    }
}

}  // namespace

OverheadResult omega_ush(double p, double target,
                         const UniversalScalingParams& params) {
    require_target(target);
    if (!(p >= 0.0) || !(p < params.p_c0)) {
        throw std::domain_error("omega_ush: requires 0 <= p < p_c0");
    }
    if (!(target < params.A)) {
        throw std::domain_error(
            "omega_ush: target at or above the collapse amplitude A is met by any L");
    }

    OverheadResult result;
    result.regime = Regime::UniversalScaling;
    result.l_real = std::log(params.A / target) /
                    (params.a * std::pow(params.p_c0 - p, params.nu0));
    result.omega = 2.0 * result.l_real * result.l_real;
    result.l_code = code_distance(result.l_real);
    result.achieved_p_fail = p_fail_ush(result.l_code, p, params);
    return result;
}

OverheadResult omega_lp(double p, double target) {
    require_target(target);
    if (!(p > 0.0) || !(p < 0.25)) {
        throw std::domain_error("omega_lp: requires 0 < p < 1/4");
    }

    const double log_target = std::log(target);
    OverheadResult result;
    result.regime = Regime::LowP;
    result.l_real = std::fabs((2.0 * log_target - std::log(-2.0 * log_target)) /
                              std::log(4.0 * p));
    result.omega = 2.0 * result.l_real * result.l_real;
    result.l_code = code_distance(result.l_real);
    result.achieved_p_fail = p_fail_lowp(result.l_code, p);
    return result;
}

const OverheadResult& OverheadPlan::recommended() const {
    switch (regime) {
        case Regime::UniversalScaling:
            return *ush;
        case Regime::LowP:
            return *lp;
        case Regime::Crossover:
            break;
    }
    if (ush && lp) {
        return ush->omega >= lp->omega ? *ush : *lp;
    }
    if (ush) {
        return *ush;
    }
    if (lp) {
        return *lp;
    }
    throw std::logic_error("OverheadPlan: no candidate available");
}

OverheadPlan plan_overhead(double p, double target,
                           const UniversalScalingParams& params) {
    require_target(target);
    if (!(p > 0.0) || !(p <= 0.5)) {
        throw std::invalid_argument("plan_overhead: p must be in (0, 0.5]");
    }

    OverheadPlan plan;
    bool ush_valid = false;
    bool lp_valid = false;

    if (p < params.p_c0 && target < params.A) {
        plan.ush = omega_ush(p, target, params);
        // Trust the inversion only if its own answer sits inside the window
        // where the form applies.
        ush_valid = p >= p_ush_continuous(plan.ush->l_real);
    }
    if (p < 0.25) {
        plan.lp = omega_lp(p, target);
        // l_real can degenerate to ~0 for very loose targets; any lattice
        // works there, so the window check is moot.
        lp_valid = plan.lp->l_real <= 0.0 ||
                   p <= p_lp_continuous(plan.lp->l_real);
    }

    if (!plan.ush && !plan.lp) {
        throw std::domain_error("plan_overhead: no scaling form applies at this p");
    }

    if (ush_valid && !lp_valid) {
        plan.regime = Regime::UniversalScaling;
    } else if (lp_valid && !ush_valid) {
        plan.regime = Regime::LowP;
    } else {
        plan.regime = Regime::Crossover;
    }
    return plan;
}

}  // namespace toric
