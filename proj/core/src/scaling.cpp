#include "toric/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_matrix.h>
#include <gsl/gsl_multifit.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

#include "toric/noise.hpp"

namespace toric {

namespace {

// GSL's default error handler aborts the process; fits must instead report
// failure through return codes so restarts can continue.
void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

struct ThresholdContext {
    const std::vector<DataPoint>* points = nullptr;
    std::optional<double> freeze_mu;
};

// Parameter layout: [A, B, C, D, p_c0, ln(nu0), ln(mu)]; the last entry is
// absent when mu is frozen. Fitting logs keeps the exponents positive.
int threshold_residuals(const gsl_vector* x, void* params, gsl_vector* f) {
    const auto& ctx = *static_cast<const ThresholdContext*>(params);
    const double A = gsl_vector_get(x, 0);
    const double B = gsl_vector_get(x, 1);
    const double C = gsl_vector_get(x, 2);
    const double D = gsl_vector_get(x, 3);
    const double p_c0 = gsl_vector_get(x, 4);
    const double nu0 = std::exp(gsl_vector_get(x, 5));
    const double mu =
        ctx.freeze_mu ? *ctx.freeze_mu : std::exp(gsl_vector_get(x, 6));
    const auto& pts = *ctx.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const DataPoint& d = pts[i];
        const double xx = (d.p - p_c0) * std::pow(d.L, 1.0 / nu0);
        const double model =
            A + B * xx + C * xx * xx + D * std::pow(d.L, -1.0 / mu);
        const double r = (model - d.p_fail) / d.sigma;
        if (!std::isfinite(r)) {
            return GSL_EDOM;
        }
        gsl_vector_set(f, i, r);
    }
    return GSL_SUCCESS;
}

void require_clean_points(const std::vector<DataPoint>& data) {
    for (const DataPoint& d : data) {
        if (d.L < 3) {
            throw std::invalid_argument("fit data: L must be >= 3");
        }
        if (!(d.sigma > 0.0) || !std::isfinite(d.p_fail)) {
            throw std::invalid_argument(
                "fit data: every point needs a finite p_fail and sigma > 0");
        }
    }
}

}  // namespace

double rescale(int L, double p, double p_c0, double nu0) {
    if (L < 1) {
        throw std::invalid_argument("rescale: L must be >= 1");
    }
    if (!(nu0 > 0.0)) {
        throw std::invalid_argument("rescale: nu0 must be > 0");
    }
    return (p - p_c0) * std::pow(static_cast<double>(L), 1.0 / nu0);
}

ThresholdFit fit_threshold(const std::vector<DataPoint>& data,
                           const ThresholdFitOptions& options) {
    disable_gsl_abort();
    require_clean_points(data);
    if (options.restarts < 1) {
        throw std::invalid_argument("fit_threshold: restarts must be >= 1");
    }
    if (!(options.start.nu0 > 0.0) || !(options.start.mu > 0.0)) {
        throw std::invalid_argument("fit_threshold: start nu0 and mu must be > 0");
    }
    if (options.freeze_mu && !(*options.freeze_mu > 0.0)) {
        throw std::invalid_argument("fit_threshold: frozen mu must be > 0");
    }

    const std::size_t n = data.size();
    const std::size_t np = options.freeze_mu ? 6 : 7;
    if (n < np + 1) {
        throw std::invalid_argument("fit_threshold: need at least " +
                                    std::to_string(np + 1) + " points");
    }

    ThresholdContext ctx{&data, options.freeze_mu};

    gsl_multifit_nlinear_fdf fdf{};
    fdf.f = threshold_residuals;
    fdf.df = nullptr;  // forward-difference Jacobian
    fdf.fvv = nullptr;
    fdf.n = n;
    fdf.p = np;
    fdf.params = &ctx;

    gsl_multifit_nlinear_parameters fdf_params =
        gsl_multifit_nlinear_default_parameters();
    gsl_multifit_nlinear_workspace* w =
        gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fdf_params, n, np);
    gsl_vector* x0 = gsl_vector_alloc(np);
    gsl_matrix* covar = gsl_matrix_alloc(np, np);

    double best_chisq = 0.0;
    int best_restart = -1;
    int converged = 0;
    std::vector<double> best_params(np, 0.0);
    std::vector<double> best_errors(np, 0.0);

    for (int r = 0; r < options.restarts; ++r) {
        ThresholdStart s = options.start;
        if (r > 0) {
            Pcg32 rng(options.seed, static_cast<std::uint64_t>(r));
            auto jitter = [&rng] { return 2.0 * rng.next_double() - 1.0; };
            s.A *= 1.0 + 0.2 * jitter();
            s.B *= 1.0 + 0.2 * jitter();
            s.C *= 1.0 + 0.2 * jitter();
            s.D *= 1.0 + 0.2 * jitter();
            s.p_c0 += 0.005 * jitter();
            s.nu0 *= 1.0 + 0.15 * jitter();
            s.mu *= 1.0 + 0.3 * jitter();
        }
        gsl_vector_set(x0, 0, s.A);
        gsl_vector_set(x0, 1, s.B);
        gsl_vector_set(x0, 2, s.C);
        gsl_vector_set(x0, 3, s.D);
        gsl_vector_set(x0, 4, s.p_c0);
        gsl_vector_set(x0, 5, std::log(s.nu0));
        if (!options.freeze_mu) {
            gsl_vector_set(x0, 6, std::log(s.mu));
        }

        if (gsl_multifit_nlinear_init(x0, &fdf, w) != GSL_SUCCESS) {
            continue;
        }
        int info = 0;
        const int status = gsl_multifit_nlinear_driver(
            options.max_iterations, options.xtol, 1e-12, 0.0, nullptr, nullptr,
            &info, w);
        if (status != GSL_SUCCESS) {
            continue;
        }

        double chisq = 0.0;
        gsl_vector* f = gsl_multifit_nlinear_residual(w);
        gsl_blas_ddot(f, f, &chisq);
        if (!std::isfinite(chisq)) {
            continue;
        }
        ++converged;
        if (best_restart >= 0 && chisq >= best_chisq) {
            continue;
        }

        best_chisq = chisq;
        best_restart = r;
        gsl_vector* xf = gsl_multifit_nlinear_position(w);
        gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(w), 0.0, covar);
        for (std::size_t k = 0; k < np; ++k) {
            best_params[k] = gsl_vector_get(xf, k);
            best_errors[k] = std::sqrt(std::max(0.0, gsl_matrix_get(covar, k, k)));
        }
    }

    gsl_matrix_free(covar);
    gsl_vector_free(x0);
    gsl_multifit_nlinear_free(w);

    if (best_restart < 0) {
        throw FitError("fit_threshold: no restart converged");
    }

    ThresholdFit fit;
    fit.A = {best_params[0], best_errors[0]};
    fit.B = {best_params[1], best_errors[1]};
    fit.C = {best_params[2], best_errors[2]};
    fit.D = {best_params[3], best_errors[3]};
    fit.p_c0 = {best_params[4], best_errors[4]};
    const double nu0 = std::exp(best_params[5]);
    fit.nu0 = {nu0, nu0 * best_errors[5]};
    if (options.freeze_mu) {
        fit.mu = {*options.freeze_mu, 0.0};
    } else {
        const double mu = std::exp(best_params[6]);
        fit.mu = {mu, mu * best_errors[6]};
    }
    fit.chi2_per_dof = best_chisq / static_cast<double>(n - np);
    fit.best_restart = best_restart;
    fit.converged_restarts = converged;
    return fit;
}

QuadraticLogFit fit_quadratic_logL(const std::vector<DataPoint>& data) {
    disable_gsl_abort();
    require_clean_points(data);
    const std::size_t n = data.size();
    if (n < 4) {
        throw std::invalid_argument("fit_quadratic_logL: need at least 4 points");
    }
    for (const DataPoint& d : data) {
        if (!(d.p_fail > 0.0)) {
            throw std::invalid_argument(
                "fit_quadratic_logL: failure rates must be positive to take logs");
        }
    }

    gsl_matrix* X = gsl_matrix_alloc(n, 3);
    gsl_vector* y = gsl_vector_alloc(n);
    gsl_vector* wts = gsl_vector_alloc(n);
    gsl_vector* c = gsl_vector_alloc(3);
    gsl_matrix* cov = gsl_matrix_alloc(3, 3);
    gsl_multifit_linear_workspace* work = gsl_multifit_linear_alloc(n, 3);

    for (std::size_t i = 0; i < n; ++i) {
        const DataPoint& d = data[i];
        gsl_matrix_set(X, i, 0, 1.0);
        gsl_matrix_set(X, i, 1, static_cast<double>(d.L));
        gsl_matrix_set(X, i, 2, static_cast<double>(d.L) * d.L);
        gsl_vector_set(y, i, std::log(d.p_fail));
        // sigma(ln P) = sigma / P, so the weight is (P / sigma)^2.
        const double rel = d.p_fail / d.sigma;
        gsl_vector_set(wts, i, rel * rel);
    }

    double chisq = 0.0;
    const int status = gsl_multifit_wlinear(X, wts, y, c, cov, &chisq, work);

    QuadraticLogFit fit;
    if (status == GSL_SUCCESS) {
        fit.alpha = {gsl_vector_get(c, 0),
                     std::sqrt(std::max(0.0, gsl_matrix_get(cov, 0, 0)))};
        fit.beta = {gsl_vector_get(c, 1),
                    std::sqrt(std::max(0.0, gsl_matrix_get(cov, 1, 1)))};
        fit.gamma = {gsl_vector_get(c, 2),
                     std::sqrt(std::max(0.0, gsl_matrix_get(cov, 2, 2)))};
        fit.chi2_per_dof = chisq / static_cast<double>(n - 3);
    }

    gsl_multifit_linear_free(work);
    gsl_matrix_free(cov);
    gsl_vector_free(c);
    gsl_vector_free(wts);
    gsl_vector_free(y);
    gsl_matrix_free(X);

    if (status != GSL_SUCCESS) {
        throw FitError("fit_quadratic_logL: weighted least squares failed");
    }
    return fit;
}

DecayFit fit_decay_constant(const std::vector<DataPoint>& data, double A,
                            double p_c0, double nu0) {
    if (!(A > 0.0) || !(p_c0 > 0.0) || !(nu0 > 0.0)) {
        throw std::invalid_argument("fit_decay_constant: A, p_c0, nu0 must be > 0");
    }

    double swt2 = 0.0;
    double swty = 0.0;
    int used = 0;
    std::vector<double> ts;
    std::vector<double> ys;
    std::vector<double> ws;
    for (const DataPoint& d : data) {
        if (d.L < 3 || !(d.sigma > 0.0)) {
            throw std::invalid_argument("fit_decay_constant: malformed data point");
        }
        if (!(d.p_fail > 0.0) || !(d.p < p_c0) || !(d.p > p_ush(d.L))) {
            continue;
        }
        const double t = std::pow(p_c0 - d.p, nu0) * d.L;
        const double y = std::log(A / d.p_fail);
        const double rel = d.p_fail / d.sigma;
        const double weight = rel * rel;
        swt2 += weight * t * t;
        swty += weight * t * y;
        ts.push_back(t);
        ys.push_back(y);
        ws.push_back(weight);
        ++used;
    }

    DecayFit fit;
    fit.points_used = used;
    fit.points_rejected = static_cast<int>(data.size()) - used;
    if (used < 2 || !(swt2 > 0.0)) {
        throw FitError(
            "fit_decay_constant: fewer than two points inside the validity window");
    }

    const double a = swty / swt2;
    double chisq = 0.0;
    for (int i = 0; i < used; ++i) {
        const double r = ys[static_cast<std::size_t>(i)] -
                         a * ts[static_cast<std::size_t>(i)];
        chisq += ws[static_cast<std::size_t>(i)] * r * r;
    }
    fit.a = {a, 1.0 / std::sqrt(swt2)};
    fit.chi2_per_dof = chisq / static_cast<double>(used - 1);
    return fit;
}

double p_fail_ush(int L, double p, const UniversalScalingParams& params) {
    if (L < 3) {
        throw std::invalid_argument("p_fail_ush: L must be >= 3");
    }
    if (!(params.A > 0.0) || !(params.a > 0.0) || !(params.nu0 > 0.0)) {
        throw std::invalid_argument("p_fail_ush: scaling parameters must be > 0");
    }
    if (!(p < params.p_c0)) {
        throw std::domain_error("p_fail_ush: form only applies below p_c0");
    }
    return params.A *
           std::exp(-params.a * std::pow(params.p_c0 - p, params.nu0) * L);
}

double p_fail_lowp(int L, double p) {
    if (L < 3 || L % 2 == 0) {
        throw std::invalid_argument("p_fail_lowp: L must be odd and >= 3");
    }
    if (!(p >= 0.0) || !(p <= 0.5)) {
        throw std::invalid_argument("p_fail_lowp: p must be in [0, 0.5]");
    }
    if (p == 0.0) {
        return 0.0;
    }
    const int half_down = L / 2;
    const int half_up = (L + 1) / 2;
    if (L <= 61) {
        const double coeff =
            2.0 * L * static_cast<double>(ChainEnumerator::count(L, half_down));
        return coeff * std::pow(p, half_up);
    }
    const double log_coeff = std::log(2.0 * L) + std::lgamma(L + 1.0) -
                             std::lgamma(half_down + 1.0) -
                             std::lgamma(half_up + 1.0);
    return std::exp(log_coeff + half_up * std::log(p));
}

double p_ush_continuous(double L) {
    if (!(L > 0.0)) {
        throw std::domain_error("p_ush_continuous: L must be > 0");
    }
    return (L * L + std::sqrt(2.0 * L * L * L) + 2.0 * L) / (4.0 * L * L * L);
}

double p_lp_continuous(double L) {
    if (!(L > 0.0)) {
        throw std::domain_error("p_lp_continuous: L must be > 0");
    }
    return (L * L - std::sqrt(2.0 * L * L * L) + 2.0 * L) / (4.0 * L * L * L);
}

double p_ush(int L) {
    if (L < 3) {
        throw std::invalid_argument("p_ush: L must be >= 3");
    }
    return p_ush_continuous(static_cast<double>(L));
}

double p_lp(int L) {
    if (L < 3) {
        throw std::invalid_argument("p_lp: L must be >= 3");
    }
    return p_lp_continuous(static_cast<double>(L));
}

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::UniversalScaling:
            return "universal_scaling";
        case Regime::LowP:
            return "low_p";
        case Regime::Crossover:
            return "crossover";
    }
    return "unknown";
}

Regime classify_regime(int L, double p) {
    if (L < 3 || L % 2 == 0) {
        throw std::invalid_argument("classify_regime: L must be odd and >= 3");
    }
    if (!(p >= 0.0) || !(p <= 0.5)) {
        throw std::invalid_argument("classify_regime: p must be in [0, 0.5]");
    }
    if (p >= p_ush(L)) {
        return Regime::UniversalScaling;
    }
    if (p <= p_lp(L)) {
        return Regime::LowP;
    }
    return Regime::Crossover;
}

}  // namespace toric
