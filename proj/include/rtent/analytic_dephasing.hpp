// Closed-form coherence decay of a qubit under symmetric telegraph dephasing,
// and the two-qubit quantities that follow from it.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "rtent/error.hpp"
#include "rtent/quantum_state.hpp"
#include "rtent/rt_noise.hpp"

namespace rtent {

/// Noise on qubit A plus the bare qubit frequencies (rotating frame by default).
struct SystemParams {
    RTParams rt;
    double omega_a = 0.0;
    double omega_b = 0.0;

    explicit SystemParams(RTParams noise, double omega_a_ = 0.0, double omega_b_ = 0.0)
        : rt(noise), omega_a(omega_a_), omega_b(omega_b_) {
        detail::require_finite(omega_a, "omega_a");
        detail::require_finite(omega_b, "omega_b");
    }

    [[nodiscard]] double omega_sum() const noexcept { return omega_a + omega_b; }
};

/// |g - 1| below which the alpha -> 0 limit form is used.
inline constexpr double kDegenerateCouplingWidth = 1e-8;

/**
 * @brief alpha = sqrt(1 - g^2) and A = (1 + 1/alpha) / 2.
 *
 * For g > 1 alpha is the principal root i*sqrt(g^2 - 1). The other branch
 * swaps the two exponentials together with A <-> 1 - A and yields the same
 * q(t); `with_alpha` exists so that can be checked.
 */
class CoherenceParams {
public:
    explicit CoherenceParams(double g) : g_(g) {
        detail::require(std::isfinite(g) && g > 0.0, "coupling g must be finite and positive");
        detail::require(std::abs(g - 1.0) >= kDegenerateCouplingWidth,
                        "alpha vanishes at g = 1; use the limit form");
        alpha_ = g < 1.0 ? Complex(std::sqrt((1.0 - g) * (1.0 + g)), 0.0)
                         : Complex(0.0, std::sqrt((g - 1.0) * (g + 1.0)));
        a_coef_ = 0.5 * (1.0 + 1.0 / alpha_);
    }

    static CoherenceParams with_alpha(double g, Complex alpha) {
        CoherenceParams p(g);
        p.alpha_ = alpha;
        p.a_coef_ = 0.5 * (1.0 + 1.0 / alpha);
        return p;
    }

    [[nodiscard]] Complex alpha() const noexcept { return alpha_; }
    [[nodiscard]] Complex a_coef() const noexcept { return a_coef_; }
    [[nodiscard]] double g() const noexcept { return g_; }

private:
    double g_;
    Complex alpha_;
    Complex a_coef_;
};

namespace detail {
inline void require_time(double t) {
    require_finite(t, "time");
    require(t >= 0.0, "time must be non-negative");
}
} // namespace detail

/// q(t) in the frozen-noise limit: (1 + e^{-ivt}) / 2 = e^{-ivt/2} cos(vt/2).
inline Complex coherence_factor_static(double v, double t) {
    detail::require_time(t);
    detail::require_finite(v, "amplitude v");
    const double half = v * t / 2.0;
    return std::polar(std::cos(half), -half);
}

/// q(t) at g = 1: e^{-ivt/2} e^{-gamma t/2} (1 + gamma t/2).
inline Complex coherence_factor_g1(const RTParams &params, double t) {
    detail::require_time(t);
    detail::require(!params.is_static() &&
                        std::abs(params.g() - 1.0) < kDegenerateCouplingWidth,
                    "the g = 1 limit form requires v == gamma");
    const double x = params.gamma() * t / 2.0;
    return std::polar(std::exp(-x) * (1.0 + x), -params.v() * t / 2.0);
}

/// Direct evaluation of q(t) for a given (alpha, A) pair.
inline Complex coherence_factor_from(const CoherenceParams &cp, double v, double gamma,
                                     double t) {
    const Complex a = cp.a_coef();
    const Complex alpha = cp.alpha();
    const double half_gt = gamma * t / 2.0;
    const Complex bracket = a * std::exp(-half_gt * (1.0 - alpha)) +
                            (1.0 - a) * std::exp(-half_gt * (1.0 + alpha));
    return std::polar(1.0, -v * t / 2.0) * bracket;
}

/**
 * @brief Coherence decay factor q(t) of the noisy qubit.
 *
 * gamma == 0 routes to the static form and |g - 1| < 1e-8 to the g = 1
 * limit; everything else evaluates the two-exponential closed form.
 */
inline Complex coherence_factor(const RTParams &params, double t) {
    detail::require_time(t);
    if (params.is_static()) {
        return coherence_factor_static(params.v(), t);
    }
    if (std::abs(params.g() - 1.0) < kDegenerateCouplingWidth) {
        return coherence_factor_g1(params, t);
    }
    return coherence_factor_from(CoherenceParams(params.g()), params.v(), params.gamma(), t);
}

/// Strong-coupling estimate e^{-gamma t/2} [cos(vt/2) + sin(vt/2)/g].
/// Can be negative; compare against |q| by absolute value.
inline double coherence_factor_approx(const RTParams &params, double t) {
    detail::require_time(t);
    detail::require(params.g() > 1.0, "the strong-coupling approximation needs g > 1");
    const double half = params.v() * t / 2.0;
    const double inv_g = params.is_static() ? 0.0 : 1.0 / params.g();
    return std::exp(-params.gamma() * t / 2.0) * (std::cos(half) + inv_g * std::sin(half));
}

/**
 * @brief Two-qubit density matrix at time t for an initial |phi+>.
 *
 * Populations 1/2 on |00> and |11>; the |11><00| coherence is
 * q(t) e^{-i(wA+wB)t} / 2, which is what averaging the per-trajectory states
 * (|00> + e^{-i theta}|11>)/sqrt2 produces. The |00><11| entry is its
 * conjugate.
 */
inline DensityMatrix density_matrix(const SystemParams &system, double t) {
    const Complex q = coherence_factor(system.rt, t);
    const Complex coherence = 0.5 * q * std::polar(1.0, -system.omega_sum() * t);
    Matrix4c rho = Matrix4c::Zero();
    rho(0, 0) = 0.5;
    rho(3, 3) = 0.5;
    rho(3, 0) = coherence;
    rho(0, 3) = std::conj(coherence);
    return DensityMatrix(rho);
}

/// E_f(rho(t)) = f(|q(t)|).
inline double entanglement_of_formation_at(const RTParams &params, double t) {
    return entanglement_of_formation(std::min(1.0, std::abs(coherence_factor(params, t))));
}

/// Dashed upper curve f(e^{-gamma t/2}).
inline double envelope(const RTParams &params, double t) {
    detail::require_time(t);
    return entanglement_of_formation(std::exp(-params.gamma() * t / 2.0));
}

struct RevivalTimes {
    int n;
    double full;                   ///< t_n = 2 n pi / v, static-limit unit revival
    std::optional<double> peak;    ///< t_n* = t_n / sqrt(1 - 1/g^2), only for g > 1
    double dark;                   ///< (2n + 1) pi / v, static-limit zero
};

inline std::vector<RevivalTimes> revival_times(const RTParams &params, int n_max,
                                               bool with_peak = true) {
    detail::require(n_max >= 1, "n_max must be at least 1");
    detail::require(!with_peak || params.g() > 1.0,
                    "revival peaks t_n* exist only for g > 1");
    const double stretch =
        params.is_static() ? 1.0 : 1.0 / std::sqrt(1.0 - 1.0 / (params.g() * params.g()));
    std::vector<RevivalTimes> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double tn = 2.0 * n * std::numbers::pi / params.v();
        out.push_back({n, tn, with_peak ? std::optional<double>(tn * stretch) : std::nullopt,
                       (2.0 * n + 1.0) * std::numbers::pi / params.v()});
    }
    return out;
}

} // namespace rtent
