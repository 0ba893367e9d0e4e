// Two-qubit states and the entanglement measures built on them.
//
// Basis ordering is |00>, |01>, |10>, |11>; qubit A is the left factor.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rtent/error.hpp"

namespace rtent {

using Complex = std::complex<double>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

enum class Qubit { A, B };

namespace tolerance {
inline constexpr double norm = 1e-12;
inline constexpr double hermiticity = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double eigenvalue_floor = -1e-10;
inline constexpr double probability_sum = 1e-12;
inline constexpr double concurrence_range = 1e-12;
inline constexpr double hidden_floor = -1e-9;
} // namespace tolerance

class PureState {
public:
    explicit PureState(const Vector4c &amplitudes) : amplitudes_(amplitudes) {
        const double n = amplitudes_.norm();
        detail::require(std::isfinite(n), "state amplitudes must be finite");
        detail::require(std::abs(n - 1.0) <= tolerance::norm,
                        "state must be normalized (norm " + std::to_string(n) + ")");
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    static PureState normalized(const Vector4c &v) {
        const double n = v.norm();
        detail::require(std::isfinite(n) && n > 0.0, "cannot normalize a zero vector");
        return PureState(v / n);
    }

    [[nodiscard]] const Vector4c &amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] Complex operator[](int i) const { return amplitudes_(i); }

private:
    Vector4c amplitudes_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(const Matrix4c &entries) : entries_(entries) {
        detail::require(entries_.allFinite(), "density matrix entries must be finite");
        const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
        detail::require(asym <= tolerance::hermiticity,
                        "density matrix must be Hermitian (deviation " + std::to_string(asym) +
                            ")");
        const Complex tr = entries_.trace();
        detail::require(std::abs(tr - Complex(1.0, 0.0)) <= tolerance::trace,
                        "density matrix must have unit trace");
        const double min_eigenvalue =
            Eigen::SelfAdjointEigenSolver<Matrix4c>(entries_, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .minCoeff();
        detail::require(min_eigenvalue >= tolerance::eigenvalue_floor,
                        "density matrix must be positive semidefinite");
    }

    [[nodiscard]] const Matrix4c &entries() const noexcept { return entries_; }
    [[nodiscard]] Complex operator()(int r, int c) const { return entries_(r, c); }

private:
    Matrix4c entries_;
};

struct EnsembleMember {
    double probability;
    PureState state;
};

/// Finite ensemble of pure states with classical weights.
class WeightedEnsemble {
public:
    explicit WeightedEnsemble(std::vector<EnsembleMember> members)
        : members_(std::move(members)) {
        detail::require(!members_.empty(), "ensemble must have at least one member");
        double total = 0.0;
        for (const auto &m : members_) {
            detail::require(std::isfinite(m.probability) && m.probability >= 0.0,
                            "ensemble probabilities must be non-negative");
            total += m.probability;
        }
        detail::require(std::abs(total - 1.0) <= tolerance::probability_sum,
                        "ensemble probabilities must sum to 1");
    }

    [[nodiscard]] const std::vector<EnsembleMember> &members() const noexcept {
        return members_;
    }

private:
    std::vector<EnsembleMember> members_;
};

// -----------------------------------------------------------------------------
// States and maps
// -----------------------------------------------------------------------------

/// (|00> + |11>) / sqrt(2)
inline PureState bell_phi_plus() {
    const double s = std::numbers::sqrt2 / 2.0;
    Vector4c a;
    a << s, 0.0, 0.0, s;
    return PureState(a);
}

inline PureState basis_state(int index) {
    detail::require(index >= 0 && index < 4, "basis index must be in 0..3");
    Vector4c a = Vector4c::Zero();
    a(index) = 1.0;
    return PureState(a);
}

/// exp(-i * phase/2 * sigma_z) on `target`, identity on the other qubit.
inline PureState apply_local_phase(const PureState &state, double phase, Qubit target) {
    const Complex up = std::polar(1.0, -phase / 2.0);  // sigma_z = +1
    const Complex down = std::polar(1.0, phase / 2.0); // sigma_z = -1
    Vector4c out = state.amplitudes();
    for (int i = 0; i < 4; ++i) {
        const int bit = target == Qubit::A ? (i >> 1) & 1 : i & 1;
        out(i) *= bit == 0 ? up : down;
    }
    return PureState(out);
}

inline DensityMatrix density_of(const PureState &state) {
    const auto &a = state.amplitudes();
    return DensityMatrix(a * a.adjoint());
}

inline DensityMatrix maximally_mixed() { return DensityMatrix(Matrix4c::Identity() / 4.0); }

/// Probability-weighted mixture of the members' projectors.
inline DensityMatrix mixture_of(const WeightedEnsemble &ens) {
    Matrix4c rho = Matrix4c::Zero();
    for (const auto &m : ens.members()) {
        const auto &a = m.state.amplitudes();
        rho += m.probability * (a * a.adjoint());
    }
    return DensityMatrix(rho);
}

// -----------------------------------------------------------------------------
// Entanglement measures
// -----------------------------------------------------------------------------

/// sigma_y (x) sigma_y in the computational basis (real, antidiagonal).
inline Eigen::Matrix4d spin_flip() {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 3) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 0) = -1.0;
    return s;
}

/**
 * @brief Wootters concurrence max(0, l1 - l2 - l3 - l4).
 *
 * The l_i are the square roots of the eigenvalues of rho * rho~, with
 * rho~ = (sy x sy) rho* (sy x sy). They are obtained here as the singular
 * values of tau = W^T (sy x sy) W for any factor rho = W W^dagger, which
 * avoids taking square roots of round-off sized eigenvalues.
 */
inline double concurrence(const DensityMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho.entries());
    Matrix4c w = eig.eigenvectors();
    for (int k = 0; k < 4; ++k) {
        w.col(k) *= std::sqrt(std::max(0.0, eig.eigenvalues()(k)));
    }
    const Matrix4c tau = w.transpose() * spin_flip().cast<Complex>() * w;
    const Eigen::Vector4d lambda = Eigen::JacobiSVD<Matrix4c>(tau).singularValues();
    // singularValues() is sorted in decreasing order
    const double c = lambda(0) - lambda(1) - lambda(2) - lambda(3);
    return std::clamp(c, 0.0, 1.0);
}

/// -x log2 x - (1-x) log2 (1-x), continuous at the endpoints.
inline double binary_entropy(double x) {
    detail::require(x >= 0.0 && x <= 1.0, "binary entropy argument must be in [0, 1]");
    auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
    return term(x) + term(1.0 - x);
}

namespace detail {
inline double checked_concurrence(double c) {
    require(std::isfinite(c) && c >= -tolerance::concurrence_range &&
                c <= 1.0 + tolerance::concurrence_range,
            "concurrence must lie in [0, 1]");
    return std::clamp(c, 0.0, 1.0);
}
} // namespace detail

/// E_f = h((1 + sqrt(1 - C^2)) / 2).
inline double entanglement_of_formation(double concurrence_value) {
    const double c = detail::checked_concurrence(concurrence_value);
    const double x = (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0;
    return binary_entropy(std::min(x, 1.0));
}

/// dE_f/dC, finite on all of [0, 1] (C/ln 2 at C = 1, 0 at C = 0).
inline double entanglement_of_formation_slope(double concurrence_value) {
    const double c = detail::checked_concurrence(concurrence_value);
    if (c == 0.0) {
        return 0.0;
    }
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (s < 1e-6) {
        // log2((1-s)/(1+s)) * (-c / 2s) -> c / ln2 * (1 + s^2/3 + ...)
        return c / std::numbers::ln2 * (1.0 + s * s / 3.0);
    }
    return -c / (2.0 * s) * std::log2((1.0 - s) / (1.0 + s));
}

/// Von Neumann entropy (base 2) of qubit A's reduced state.
inline double entropy_of_entanglement(const PureState &state) {
    const auto &a = state.amplitudes();
    // det of the reduced density matrix is |a00 a11 - a01 a10|^2
    const double det_abs = std::abs(a(0) * a(3) - a(1) * a(2));
    const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * det_abs * det_abs));
    return binary_entropy(std::clamp((1.0 + disc) / 2.0, 0.0, 1.0));
}

inline double average_entanglement(const WeightedEnsemble &ens) {
    double total = 0.0;
    for (const auto &m : ens.members()) {
        total += m.probability * entropy_of_entanglement(m.state);
    }
    return total;
}

/// E_av(ensemble) - E_f(mixture); round-off negatives are clamped to zero.
inline double hidden_entanglement(const WeightedEnsemble &ens) {
    const double eh =
        average_entanglement(ens) - entanglement_of_formation(concurrence(mixture_of(ens)));
    return eh < 0.0 && eh >= tolerance::hidden_floor ? 0.0 : eh;
}

} // namespace rtent
