// Symmetric random telegraph process xi(t) in {0, v}.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rtent/error.hpp"

namespace rtent {

/**
 * @brief Amplitude and switching rate of a symmetric telegraph process.
 *
 * The process jumps 0 -> v and v -> 0 with equal rates gamma/2, so gamma is
 * the total switching rate. gamma == 0 is the frozen (static) process, for
 * which the coupling g = v/gamma is reported as +infinity.
 */
class RTParams {
public:
    RTParams(double amplitude, double switching_rate)
        : v_(amplitude), gamma_(switching_rate) {
        detail::require_finite(v_, "amplitude v");
        detail::require_finite(gamma_, "switching rate gamma");
        detail::require(v_ > 0.0, "amplitude v must be positive");
        detail::require(gamma_ >= 0.0, "switching rate gamma must be non-negative");
        g_ = gamma_ > 0.0 ? v_ / gamma_ : std::numeric_limits<double>::infinity();
    }

    /// Build from v and the dimensionless coupling g; g = +inf gives gamma = 0.
    static RTParams from_coupling(double amplitude, double coupling) {
        detail::require(!std::isnan(coupling) && coupling > 0.0,
                        "coupling g must be positive or inf");
        if (std::isinf(coupling)) {
            return RTParams(amplitude, 0.0);
        }
        return RTParams(amplitude, amplitude / coupling);
    }

    [[nodiscard]] double v() const noexcept { return v_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double g() const noexcept { return g_; }
    [[nodiscard]] bool is_static() const noexcept { return gamma_ == 0.0; }

private:
    double v_;
    double gamma_;
    double g_;
};

/**
 * @brief One realization of xi on [0, horizon].
 *
 * The level at time t is the initial level flipped once for every switch
 * time <= t.
 */
class RTTrajectory {
public:
    RTTrajectory(double amplitude, int initial_level, std::vector<double> switch_times,
                 double horizon)
        : v_(amplitude), initial_level_(initial_level),
          switch_times_(std::move(switch_times)), horizon_(horizon) {
        detail::require_finite(horizon_, "horizon");
        detail::require_finite(v_, "amplitude v");
        detail::require(horizon_ > 0.0, "horizon must be positive");
        detail::require(initial_level_ == 0 || initial_level_ == 1,
                        "initial level must be 0 or 1");
        double previous = 0.0;
        for (double s : switch_times_) {
            detail::require(s > previous && s <= horizon_,
                            "switch times must be strictly increasing within (0, horizon]");
            previous = s;
        }
    }

    [[nodiscard]] double amplitude() const noexcept { return v_; }
    [[nodiscard]] int initial_level() const noexcept { return initial_level_; }
    [[nodiscard]] std::span<const double> switch_times() const noexcept {
        return switch_times_;
    }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }

    /// Level bit (0 or 1) at time t.
    [[nodiscard]] int level_bit_at(double t) const {
        check_time(t);
        auto flips = std::upper_bound(switch_times_.begin(), switch_times_.end(), t) -
                     switch_times_.begin();
        return initial_level_ ^ static_cast<int>(flips & 1);
    }

    void check_time(double t) const {
        detail::require(t >= 0.0 && t <= horizon_,
                        "time " + std::to_string(t) + " outside trajectory horizon [0, " +
                            std::to_string(horizon_) + "]");
    }

private:
    double v_;
    int initial_level_;
    std::vector<double> switch_times_;
    double horizon_;
};

// -----------------------------------------------------------------------------
// Random streams
// -----------------------------------------------------------------------------

/// SplitMix64 finalizer, used to derive well separated per-index seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent generator for stream `index` under `master_seed`.
///
/// The mapping is a pure function of (master_seed, index), so any trajectory
/// can be regenerated without replaying the ones before it.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t index) {
    return std::mt19937_64(mix64(mix64(master_seed) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

// -----------------------------------------------------------------------------
// Sampling
// -----------------------------------------------------------------------------

/// Exact continuous-time sample: stationary initial level, exponential dwell
/// times with rate gamma/2 out of either level.
template <class Rng>
RTTrajectory sample_trajectory(const RTParams &params, double horizon, Rng &rng) {
    detail::require_finite(horizon, "horizon");
    detail::require(horizon > 0.0, "horizon must be positive");

    const int initial = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
    std::vector<double> switches;
    if (!params.is_static()) {
        std::exponential_distribution<double> dwell(params.gamma() / 2.0);
        double t = dwell(rng);
        while (t <= horizon) {
            // exponential draws can return exactly zero; keep times strictly increasing
            if (switches.empty() ? t > 0.0 : t > switches.back()) {
                switches.push_back(t);
            }
            t += dwell(rng);
        }
    }
    return RTTrajectory(params.v(), initial, std::move(switches), horizon);
}

inline RTTrajectory sample_trajectory(const RTParams &params, double horizon,
                                      std::uint64_t master_seed, std::uint64_t index) {
    auto rng = make_stream(master_seed, index);
    return sample_trajectory(params, horizon, rng);
}

/// xi(t): 0 or v.
inline double level_at(const RTTrajectory &traj, double t) {
    return traj.level_bit_at(t) != 0 ? traj.amplitude() : 0.0;
}

/// Integral of xi over [0, t], evaluated exactly from the switch times.
inline double accumulated_phase(const RTTrajectory &traj, double t) {
    traj.check_time(t);
    int level = traj.initial_level();
    double segment_start = 0.0;
    double dwell_high = 0.0;
    for (double s : traj.switch_times()) {
        if (s > t) {
            break;
        }
        if (level == 1) {
            dwell_high += s - segment_start;
        }
        segment_start = s;
        level ^= 1;
    }
    if (level == 1) {
        dwell_high += t - segment_start;
    }
    return traj.amplitude() * dwell_high;
}

/// Accumulated phase at every time of an increasing grid in one pass.
inline std::vector<double> accumulated_phases(const RTTrajectory &traj,
                                              std::span<const double> times) {
    std::vector<double> out;
    out.reserve(times.size());
    auto switches = traj.switch_times();
    std::size_t next = 0;
    int level = traj.initial_level();
    double segment_start = 0.0;
    double dwell_high = 0.0;
    double previous_t = 0.0;
    for (double t : times) {
        traj.check_time(t);
        detail::require(t >= previous_t, "time grid must be non-decreasing");
        previous_t = t;
        while (next < switches.size() && switches[next] <= t) {
            if (level == 1) {
                dwell_high += switches[next] - segment_start;
            }
            segment_start = switches[next];
            level ^= 1;
            ++next;
        }
        const double open = level == 1 ? t - segment_start : 0.0;
        out.push_back(traj.amplitude() * (dwell_high + open));
    }
    return out;
}

// -----------------------------------------------------------------------------
// Autocorrelation
// -----------------------------------------------------------------------------

struct CorrelationEstimate {
    double lag;
    double value;
    double standard_error;
};

/**
 * @brief Monte Carlo estimate of the normalized autocorrelation of xi.
 *
 * Uses the fluctuation xi - v/2 (the stationary mean), whose normalized
 * autocorrelation is exp(-gamma * lag). Each sample is a fresh stationary
 * trajectory from stream i of `master_seed`; all lags share that trajectory.
 */
inline std::vector<CorrelationEstimate> estimate_autocorrelation(const RTParams &params,
                                                                 std::span<const double> lags,
                                                                 std::size_t n_samples,
                                                                 std::uint64_t master_seed) {
    std::vector<CorrelationEstimate> out;
    if (lags.empty()) {
        return out;
    }
    detail::require(n_samples >= 1, "n_samples must be at least 1");
    double max_lag = 0.0;
    for (double lag : lags) {
        detail::require_finite(lag, "lag");
        detail::require(lag >= 0.0, "lags must be non-negative");
        max_lag = std::max(max_lag, lag);
    }
    const double horizon = max_lag > 0.0 ? max_lag : 1.0;

    std::vector<double> sum(lags.size(), 0.0);
    std::vector<double> sum_sq(lags.size(), 0.0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const auto traj = sample_trajectory(params, horizon, master_seed, i);
        const double x0 = traj.initial_level() != 0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < lags.size(); ++k) {
            const double product = x0 * (traj.level_bit_at(lags[k]) != 0 ? 1.0 : -1.0);
            sum[k] += product;
            sum_sq[k] += product * product;
        }
    }

    const auto n = static_cast<double>(n_samples);
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const double mean = sum[k] / n;
        double se = std::numeric_limits<double>::quiet_NaN();
        if (n_samples > 1) {
            const double var = std::max(0.0, (sum_sq[k] - n * mean * mean) / (n - 1.0));
            se = std::sqrt(var / n);
        }
        out.push_back({lags[k], mean, se});
    }
    return out;
}

} // namespace rtent
