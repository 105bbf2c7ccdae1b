#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace toric {

// One measured failure rate. sigma is the binomial standard error of p_fail.
struct DataPoint {
    int L = 0;
    double p = 0.0;
    double p_fail = 0.0;
    double sigma = 0.0;
};

// Scaling variable x = (p - p_c0) * L^(1/nu0). Near the threshold, failure
// rates for all L collapse onto one curve in x.
double rescale(int L, double p, double p_c0, double nu0);

// Thrown when a fit cannot produce a converged solution.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamEstimate {
    double value = 0.0;
    double uncertainty = 0.0;
};

// Near-threshold model:
//   P(L, p) = A + B*x + C*x^2 + D * L^(-1/mu),   x = (p - p_c0) * L^(1/nu0)
// The D term absorbs the leading finite-size correction at p_c0.
struct ThresholdFit {
    ParamEstimate A, B, C, D;
    ParamEstimate p_c0;
    ParamEstimate nu0;
    ParamEstimate mu;
    double chi2_per_dof = 0.0;
    int best_restart = -1;
    int converged_restarts = 0;
};

struct ThresholdStart {
    double A = 0.25;
    double B = 1.9;
    double C = 2.2;
    double D = -0.03;
    double p_c0 = 0.103;
    double nu0 = 1.5;
    double mu = 1.2;
};

struct ThresholdFitOptions {
    ThresholdStart start;
    int restarts = 16;
    std::uint64_t seed = 0;
    double xtol = 1e-9;
    std::size_t max_iterations = 200;
    // The correction exponent is poorly constrained by small datasets; fixing
    // it removes a soft direction from the fit.
    std::optional<double> freeze_mu;
};

// Weighted Levenberg-Marquardt fit of the near-threshold model. nu0 and mu
// are fit through their logarithms so they stay positive; the reported
// uncertainties are transformed back. Runs `restarts` starts (the first one
// exactly at `start`, the rest jittered deterministically from `seed`) and
// keeps the converged solution with the lowest chi^2. Throws FitError when
// no start converges.
ThresholdFit fit_threshold(const std::vector<DataPoint>& data,
                           const ThresholdFitOptions& options = {});

// Diagnostic fit of ln P = alpha + beta*L + gamma*L^2 over points that share
// one physical error rate. Pure exponential decay in L shows up as
// |gamma| * L_max << |beta|.
struct QuadraticLogFit {
    ParamEstimate alpha, beta, gamma;
    double chi2_per_dof = 0.0;
};

QuadraticLogFit fit_quadratic_logL(const std::vector<DataPoint>& data);

// Parameters of the universal scaling form below threshold,
//   P(L, p) = A * exp(-a * (p_c0 - p)^nu0 * L).
// Defaults are the reference values this codebase reproduces.
struct UniversalScalingParams {
    double A = 0.246;
    double a = 32.31;
    double p_c0 = 0.1028;
    double nu0 = 1.530;
};

struct DecayFit {
    ParamEstimate a;
    double chi2_per_dof = 0.0;
    int points_used = 0;
    int points_rejected = 0;
};

// Estimates the decay constant a by weighted least squares of
// ln(A / P) = a * t with t = (p_c0 - p)^nu0 * L, a one-parameter regression
// through the origin with a closed-form solution. Points outside the form's
// validity window (p >= p_c0, p <= p_ush(L), or P <= 0) are rejected and
// counted, not silently dropped into the fit.
DecayFit fit_decay_constant(const std::vector<DataPoint>& data, double A,
                            double p_c0, double nu0);

// Model evaluations.
double p_fail_ush(int L, double p, const UniversalScalingParams& params = {});

// Leading-order failure rate deep below threshold: the decoder first fails
// when ceil(L/2) flips line up along one row or column, so
//   P = 2L * C(L, floor(L/2)) * p^(ceil(L/2)).
// The combinatorial factor is exact up to L = 61, then evaluated in logs.
double p_fail_lowp(int L, double p);

// Validity limits of the two forms, from requiring the typical error weight
// to stay clear of the ceil(L/2) failure scale:
//   p_ush(L) = (L^2 + sqrt(2 L^3) + 2L) / (4 L^3)   (form valid above)
//   p_lp(L)  = (L^2 - sqrt(2 L^3) + 2L) / (4 L^3)   (form valid below)
double p_ush(int L);
double p_lp(int L);

// Same limits at non-integer L, for overhead planning where the code
// distance is still a continuous unknown.
double p_ush_continuous(double L);
double p_lp_continuous(double L);

enum class Regime { UniversalScaling, LowP, Crossover };

const char* regime_name(Regime regime);

// p >= p_ush(L) -> UniversalScaling, p <= p_lp(L) -> LowP, else Crossover.
Regime classify_regime(int L, double p);

}  // namespace toric
