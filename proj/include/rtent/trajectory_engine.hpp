// Monte Carlo unraveling of the telegraph dephasing channel into pure-state
// trajectories, and the ensemble statistics built from them.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rtent/analytic_dephasing.hpp"
#include "rtent/error.hpp"
#include "rtent/quantum_state.hpp"
#include "rtent/rt_noise.hpp"

namespace rtent {

struct RunConfig {
    SystemParams system;
    std::vector<double> t_grid;
    std::size_t n_trajectories = 1;
    std::uint64_t master_seed = 42;
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    /// Negative control only: every trajectory reuses stream 0.
    bool reuse_single_stream = false;
};

/// Statistics at one grid time.
struct EnsemblePoint {
    double t;
    DensityMatrix rho;
    Complex q_hat;       ///< mean of the per-trajectory coherence e^{-i int xi}
    double se_re;
    double se_im;
    double concurrence;  ///< Wootters concurrence of rho
    double e_f;
    double e_f_se;       ///< delta-method standard error of e_f
    double e_av;
    double e_av_se;
    double e_h;
};

struct EnsembleResult {
    std::vector<EnsemblePoint> points;
    std::uint64_t master_seed;
    std::size_t n_trajectories;
    double v;
    double gamma;
    double omega_a;
    double omega_b;
    /// Largest |E(|phi_xi(t)>) - 1| seen over all trajectories and times.
    double max_trajectory_entropy_deviation;
};

/// Trajectories per reduction block. Blocks are summed in index order, so
/// results do not depend on how blocks are scheduled across threads.
inline constexpr std::size_t kBlockSize = 256;
inline constexpr std::size_t kMaxTrajectories = 1'000'000'000;
inline constexpr std::size_t kMaxAccumulatorBytes = std::size_t{1} << 30;

// -----------------------------------------------------------------------------
// Single trajectory
// -----------------------------------------------------------------------------

namespace detail {

/// (|00> + e^{-i theta}|11>)/sqrt2, global phase dropped.
inline PureState dephased_bell(double theta) {
    const double s = std::numbers::sqrt2 / 2.0;
    Vector4c a = Vector4c::Zero();
    a(0) = s;
    a(3) = std::polar(s, -theta);
    return PureState(a);
}

/// Noise-only coherence 2 a11 a00* e^{i(wA+wB)t} of a trajectory state.
inline Complex trajectory_coherence(const PureState &state, double omega_sum, double t) {
    return 2.0 * state[3] * std::conj(state[0]) * std::polar(1.0, omega_sum * t);
}

} // namespace detail

/// Exact state at time t along one noise realization, starting from |phi+>.
inline PureState evolve_trajectory(const SystemParams &system, const RTTrajectory &traj,
                                   double t) {
    const double phase = accumulated_phase(traj, t);
    return detail::dephased_bell(system.omega_sum() * t + phase);
}

/// Revival index n when t = 2 n pi / v within 1e-9 relative, else throws.
inline int revival_index(double v, double t) {
    detail::require_finite(t, "revival time");
    const double turns = v * t / (2.0 * std::numbers::pi);
    const double n = std::round(turns);
    detail::require(n >= 1.0 && std::abs(turns - n) <= 1e-9 * n,
                    "time " + std::to_string(t) + " is not a revival time 2 n pi / v");
    return static_cast<int>(n);
}

/// Extra phase int_0^{t_n} xi - 2 pi n accumulated by a trajectory, reduced
/// to [-pi, pi). Shifts by 2 pi only flip the global sign of the correction.
inline double recovery_phase(const RTTrajectory &traj, double t_n) {
    const int n = revival_index(traj.amplitude(), t_n);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double theta = accumulated_phase(traj, t_n) - two_pi * n;
    return theta - two_pi * std::floor((theta + std::numbers::pi) / two_pi);
}

/**
 * @brief Trajectory state at t_n after the local correction
 * exp(-i theta/2 sigma_zA), theta = recovery_phase(traj, t_n).
 *
 * The correction multiplies the |11> amplitude by e^{+i theta} relative to
 * |00>, cancelling the noise phase up to a multiple of 2 pi.
 */
inline PureState recover_trajectory(const SystemParams &system, const RTTrajectory &traj,
                                     double t_n) {
    const double theta = recovery_phase(traj, t_n);
    return apply_local_phase(evolve_trajectory(system, traj, t_n), theta, Qubit::A);
}

/// Relative |11>/|00> phase left after removing the deterministic
/// e^{-i(wA+wB)t} part, wrapped to (-pi, pi].
inline double residual_phase(const PureState &state, const SystemParams &system, double t) {
    return -std::arg(detail::trajectory_coherence(state, system.omega_sum(), t));
}

/// The two-member ensemble {(1/2, xi = 0), (1/2, xi = v)} of frozen noise.
inline WeightedEnsemble static_ensemble(const SystemParams &system, double t) {
    detail::require(system.rt.is_static(), "the two-member ensemble needs gamma = 0");
    detail::require_time(t);
    const double base = system.omega_sum() * t;
    return WeightedEnsemble({{0.5, detail::dephased_bell(base)},
                             {0.5, detail::dephased_bell(base + system.rt.v() * t)}});
}

// -----------------------------------------------------------------------------
// Ensemble
// -----------------------------------------------------------------------------

namespace detail {

struct PointAccumulator {
    Matrix4c rho = Matrix4c::Zero();
    double re = 0.0;
    double im = 0.0;
    double re2 = 0.0;
    double im2 = 0.0;
    double reim = 0.0;
    double e = 0.0;
    double e2 = 0.0;

    void add(const PureState &state, Complex c, double entropy) {
        const auto &a = state.amplitudes();
        rho.noalias() += a * a.adjoint();
        re += c.real();
        im += c.imag();
        re2 += c.real() * c.real();
        im2 += c.imag() * c.imag();
        reim += c.real() * c.imag();
        e += entropy;
        e2 += entropy * entropy;
    }

    void merge(const PointAccumulator &o) {
        rho += o.rho;
        re += o.re;
        im += o.im;
        re2 += o.re2;
        im2 += o.im2;
        reim += o.reim;
        e += o.e;
        e2 += o.e2;
    }
};

struct BlockResult {
    std::vector<PointAccumulator> points;
    double max_entropy_deviation = 0.0;
};

inline void validate(const RunConfig &config) {
    require(!config.t_grid.empty(), "time grid must not be empty");
    require(config.n_trajectories >= 1, "n_trajectories must be at least 1");
    double previous = -1.0;
    for (double t : config.t_grid) {
        require_finite(t, "grid time");
        require(t >= 0.0, "grid times must be non-negative");
        require(t > previous, "time grid must be strictly increasing");
        previous = t;
    }
    if (config.n_trajectories > kMaxTrajectories) {
        throw ResourceLimit("n_trajectories " + std::to_string(config.n_trajectories) +
                            " exceeds the limit of " + std::to_string(kMaxTrajectories));
    }
    const std::size_t blocks = (config.n_trajectories + kBlockSize - 1) / kBlockSize;
    const std::size_t bytes = blocks * config.t_grid.size() * sizeof(PointAccumulator);
    if (bytes / sizeof(PointAccumulator) / config.t_grid.size() != blocks ||
        bytes > kMaxAccumulatorBytes) {
        throw ResourceLimit("n_trajectories x grid points needs more than " +
                            std::to_string(kMaxAccumulatorBytes >> 20) +
                            " MiB of accumulators; reduce n_trajectories or the grid");
    }
}

inline unsigned worker_count(unsigned requested, std::size_t blocks) {
    unsigned n = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, blocks));
}

/// Runs body(block_index) for every block on `threads` workers.
template <class Body>
void for_each_block(std::size_t blocks, unsigned threads, Body &&body) {
    threads = worker_count(threads, blocks);
    if (threads <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            body(b);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                try {
                    for (std::size_t b = next++; b < blocks; b = next++) {
                        body(b);
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next = blocks;
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

inline std::size_t stream_index(const RunConfig &config, std::size_t i) {
    return config.reuse_single_stream ? 0 : i;
}

} // namespace detail

/**
 * @brief Monte Carlo estimate of rho(t), E_f, E_av and E_h on a time grid.
 *
 * Trajectory i is sampled from stream (master_seed, i) and evolved exactly.
 * Output is bit-identical for a given config whatever the thread count.
 */
inline EnsembleResult run_ensemble(const RunConfig &config) {
    detail::validate(config);
    const auto &system = config.system;
    const std::size_t n_times = config.t_grid.size();
    const double horizon = std::max(config.t_grid.back(), 1e-300);
    const std::size_t blocks = (config.n_trajectories + kBlockSize - 1) / kBlockSize;

    std::vector<detail::BlockResult> partial(blocks);
    detail::for_each_block(blocks, config.threads, [&](std::size_t b) {
        auto &block = partial[b];
        block.points.assign(n_times, detail::PointAccumulator{});
        const std::size_t begin = b * kBlockSize;
        const std::size_t end = std::min(config.n_trajectories, begin + kBlockSize);
        for (std::size_t i = begin; i < end; ++i) {
            const auto traj = sample_trajectory(system.rt, horizon, config.master_seed,
                                                detail::stream_index(config, i));
            const auto phases = accumulated_phases(traj, config.t_grid);
            for (std::size_t k = 0; k < n_times; ++k) {
                const double t = config.t_grid[k];
                const auto state = detail::dephased_bell(system.omega_sum() * t + phases[k]);
                const double entropy = entropy_of_entanglement(state);
                block.max_entropy_deviation =
                    std::max(block.max_entropy_deviation, std::abs(entropy - 1.0));
                block.points[k].add(
                    state, detail::trajectory_coherence(state, system.omega_sum(), t), entropy);
            }
        }
    });

    std::vector<detail::PointAccumulator> total(n_times);
    double max_dev = 0.0;
    for (const auto &block : partial) {
        for (std::size_t k = 0; k < n_times; ++k) {
            total[k].merge(block.points[k]);
        }
        max_dev = std::max(max_dev, block.max_entropy_deviation);
    }

    const auto n = static_cast<double>(config.n_trajectories);
    auto sample_var = [n](double sum, double sum_sq) {
        if (n < 2.0) {
            return 0.0;
        }
        const double mean = sum / n;
        return std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    };

    EnsembleResult result{{},
                          config.master_seed,
                          config.n_trajectories,
                          system.rt.v(),
                          system.rt.gamma(),
                          system.omega_a,
                          system.omega_b,
                          max_dev};
    result.points.reserve(n_times);
    for (std::size_t k = 0; k < n_times; ++k) {
        const auto &acc = total[k];
        const DensityMatrix rho(acc.rho / n);
        const Complex q_hat(acc.re / n, acc.im / n);
        const double var_re = sample_var(acc.re, acc.re2);
        const double var_im = sample_var(acc.im, acc.im2);
        const double cov =
            n < 2.0 ? 0.0 : (acc.reim - n * q_hat.real() * q_hat.imag()) / (n - 1.0);

        const double c = concurrence(rho);
        const double e_f = entanglement_of_formation(c);
        // delta method along the direction of q_hat
        const double modulus = std::abs(q_hat);
        double var_modulus = var_re + var_im;
        if (modulus > 0.0) {
            const double ur = q_hat.real() / modulus;
            const double ui = q_hat.imag() / modulus;
            var_modulus = std::max(0.0, ur * ur * var_re + ui * ui * var_im + 2.0 * ur * ui * cov);
        }
        const double e_f_se = entanglement_of_formation_slope(std::min(modulus, 1.0)) *
                              std::sqrt(var_modulus / n);

        const double e_av = acc.e / n;
        const double e_av_se = std::sqrt(sample_var(acc.e, acc.e2) / n);
        result.points.push_back({config.t_grid[k], rho, q_hat, std::sqrt(var_re / n),
                                 std::sqrt(var_im / n), c, e_f, e_f_se, e_av, e_av_se,
                                 e_av - e_f});
    }
    return result;
}

struct RecoveryResult {
    int n;
    double t_n;
    double concurrence_before;
    double concurrence_after;
};

/**
 * @brief Ensemble concurrence at t_n = 2 n pi / v without and with the
 * per-trajectory local correction.
 *
 * Uses the same streams as run_ensemble; the grid in `config` is ignored.
 * Sampling consumes random numbers in time order, so trajectory i agrees
 * with its run_ensemble counterpart on the common part of the horizon.
 */
inline RecoveryResult recovered_ensemble_concurrence(const RunConfig &config, int n) {
    detail::require(n >= 1, "revival index n must be at least 1");
    detail::require(config.n_trajectories >= 1, "n_trajectories must be at least 1");
    if (config.n_trajectories > kMaxTrajectories) {
        throw ResourceLimit("n_trajectories exceeds the limit of " +
                            std::to_string(kMaxTrajectories));
    }
    const auto &system = config.system;
    const double t_n = 2.0 * std::numbers::pi * n / system.rt.v();
    const std::size_t blocks = (config.n_trajectories + kBlockSize - 1) / kBlockSize;

    struct Sums {
        Matrix4c before = Matrix4c::Zero();
        Matrix4c after = Matrix4c::Zero();
    };
    std::vector<Sums> partial(blocks);
    detail::for_each_block(blocks, config.threads, [&](std::size_t b) {
        const std::size_t begin = b * kBlockSize;
        const std::size_t end = std::min(config.n_trajectories, begin + kBlockSize);
        for (std::size_t i = begin; i < end; ++i) {
            const auto traj = sample_trajectory(system.rt, t_n, config.master_seed,
                                                detail::stream_index(config, i));
            const auto raw = evolve_trajectory(system, traj, t_n);
            const auto fixed = recover_trajectory(system, traj, t_n);
            partial[b].before.noalias() += raw.amplitudes() * raw.amplitudes().adjoint();
            partial[b].after.noalias() += fixed.amplitudes() * fixed.amplitudes().adjoint();
        }
    });

    Sums total;
    for (const auto &p : partial) {
        total.before += p.before;
        total.after += p.after;
    }
    const auto count = static_cast<double>(config.n_trajectories);
    return {n, t_n, concurrence(DensityMatrix(total.before / count)),
            concurrence(DensityMatrix(total.after / count))};
}

/// Uniform grid 0, step, 2 step, ... up to `max` (inclusive within 1e-9 step).
inline std::vector<double> uniform_grid(double max, double step) {
    detail::require_finite(max, "grid maximum");
    detail::require_finite(step, "grid step");
    detail::require(step > 0.0, "grid step must be positive");
    detail::require(max >= 0.0, "grid maximum must be non-negative");
    const auto count = static_cast<std::size_t>(std::floor(max / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = static_cast<double>(k) * step;
    }
    return grid;
}

} // namespace rtent
