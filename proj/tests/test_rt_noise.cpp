// Telegraph process sampling and statistics.
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "rtent/rt_noise.hpp"

using rtent::RTParams;
using rtent::RTTrajectory;

// =============================================================================
// Parameters and trajectory construction
// =============================================================================

TEST(RTParams, CouplingIsRatio) {
    RTParams p(2.0, 0.5);
    EXPECT_DOUBLE_EQ(p.g(), 4.0);
    EXPECT_FALSE(p.is_static());
}

TEST(RTParams, ZeroRateIsStaticWithInfiniteCoupling) {
    RTParams p(1.0, 0.0);
    EXPECT_TRUE(p.is_static());
    EXPECT_TRUE(std::isinf(p.g()));
    auto q = RTParams::from_coupling(3.0, std::numeric_limits<double>::infinity());
    EXPECT_EQ(q.gamma(), 0.0);
    EXPECT_DOUBLE_EQ(RTParams::from_coupling(3.0, 5.0).gamma(), 0.6);
}

TEST(RTParams, RejectsInvalid) {
    EXPECT_THROW(RTParams(0.0, 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTParams(-1.0, 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTParams(1.0, -1.0), rtent::InvalidInput);
    EXPECT_THROW(RTParams(std::nan(""), 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTParams(1.0, std::numeric_limits<double>::infinity()), rtent::InvalidInput);
    EXPECT_THROW(RTParams::from_coupling(1.0, 0.0), rtent::InvalidInput);
}

TEST(RTTrajectory, RejectsUnorderedOrOutOfRangeSwitches) {
    EXPECT_THROW(RTTrajectory(1.0, 0, {0.5, 0.5}, 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTTrajectory(1.0, 0, {0.7, 0.3}, 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTTrajectory(1.0, 0, {0.0}, 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTTrajectory(1.0, 0, {1.5}, 1.0), rtent::InvalidInput);
    EXPECT_THROW(RTTrajectory(1.0, 2, {}, 1.0), rtent::InvalidInput);
    EXPECT_NO_THROW(RTTrajectory(1.0, 1, {1.0}, 1.0));
}

// =============================================================================
// level_at / accumulated_phase
// =============================================================================

TEST(LevelAt, FollowsSwitchParity) {
    const double v = 3.0;
    EXPECT_EQ(rtent::level_at(RTTrajectory(v, 0, {}, 2.0), 1.0), 0.0);
    EXPECT_EQ(rtent::level_at(RTTrajectory(v, 0, {0.5}, 2.0), 1.0), v);
    EXPECT_EQ(rtent::level_at(RTTrajectory(v, 1, {0.3, 0.7}, 2.0), 1.0), v);
    // switch exactly at t counts as happened
    EXPECT_EQ(rtent::level_at(RTTrajectory(v, 0, {0.5}, 2.0), 0.5), v);
}

TEST(LevelAt, RejectsTimeOutsideHorizon) {
    RTTrajectory traj(1.0, 0, {}, 2.0);
    EXPECT_THROW(rtent::level_at(traj, -0.1), rtent::InvalidInput);
    EXPECT_THROW(rtent::level_at(traj, 2.1), rtent::InvalidInput);
    EXPECT_THROW(rtent::accumulated_phase(traj, 2.1), rtent::InvalidInput);
}

TEST(AccumulatedPhase, HandExamples) {
    const double T = 4.0;
    EXPECT_EQ(rtent::accumulated_phase(RTTrajectory(1.5, 0, {}, T), T), 0.0);
    EXPECT_DOUBLE_EQ(rtent::accumulated_phase(RTTrajectory(1.5, 1, {}, T), T), 1.5 * T);
    EXPECT_DOUBLE_EQ(rtent::accumulated_phase(RTTrajectory(2.0, 0, {1.0}, T), 3.0), 4.0);
}

TEST(AccumulatedPhase, MatchesFineRiemannSum) {
    RTTrajectory traj(2.0, 1, {0.37, 1.12, 1.9, 2.65}, 3.0);
    const int steps = 300000;
    const double dt = 3.0 / steps;
    double riemann = 0.0;
    for (int i = 0; i < steps; ++i) {
        riemann += rtent::level_at(traj, (i + 0.5) * dt) * dt;
    }
    EXPECT_NEAR(rtent::accumulated_phase(traj, 3.0), riemann, 1e-4);
}

TEST(AccumulatedPhase, GridPassAgreesWithPointwise) {
    auto traj = rtent::sample_trajectory(RTParams(1.0, 2.0), 10.0, 7, 3);
    std::vector<double> grid;
    for (int k = 0; k <= 100; ++k) {
        grid.push_back(0.1 * k);
    }
    const auto phases = rtent::accumulated_phases(traj, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_DOUBLE_EQ(phases[k], rtent::accumulated_phase(traj, grid[k]));
    }
}

// =============================================================================
// Sampling
// =============================================================================

TEST(SampleTrajectory, StaticHasNoSwitchesAndFairStart) {
    RTParams p(1.0, 0.0);
    const int n = 40000;
    int ones = 0;
    for (int i = 0; i < n; ++i) {
        auto traj = rtent::sample_trajectory(p, 10.0, 11, i);
        EXPECT_TRUE(traj.switch_times().empty());
        ones += traj.initial_level();
    }
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 3.0 / (2.0 * std::sqrt(n)));
}

TEST(SampleTrajectory, RejectsBadHorizon) {
    RTParams p(1.0, 1.0);
    EXPECT_THROW(rtent::sample_trajectory(p, 0.0, 1, 0), rtent::InvalidInput);
    EXPECT_THROW(rtent::sample_trajectory(p, std::nan(""), 1, 0), rtent::InvalidInput);
}

TEST(SampleTrajectory, PropertiesOverRandomParameters) {
    std::mt19937_64 meta(2024);
    std::uniform_real_distribution<double> amp(0.1, 5.0), rate(0.0, 5.0), hor(0.1, 20.0);
    for (int trial = 0; trial < 300; ++trial) {
        RTParams p(amp(meta), rate(meta));
        const double horizon = hor(meta);
        auto traj = rtent::sample_trajectory(p, horizon, 99, trial);
        auto s = traj.switch_times();
        for (std::size_t k = 1; k < s.size(); ++k) {
            ASSERT_LT(s[k - 1], s[k]);
        }
        // piecewise constant with one discontinuity per switch
        std::size_t jumps = 0;
        for (double x : s) {
            const double before = rtent::level_at(traj, std::nextafter(x, 0.0));
            if (before != rtent::level_at(traj, x)) {
                ++jumps;
            }
        }
        EXPECT_EQ(jumps, s.size());
        // phase non-decreasing, Lipschitz with constant v
        double last = 0.0;
        for (int k = 0; k <= 50; ++k) {
            const double t = std::min(horizon, horizon * k / 50.0);
            const double phi = rtent::accumulated_phase(traj, t);
            ASSERT_GE(phi, last - 1e-12);
            if (k > 0) {
                ASSERT_LE(phi - last, p.v() * horizon / 50.0 * (1 + 1e-12) + 1e-12);
            }
            last = phi;
        }
    }
}

TEST(SampleTrajectory, BitReproducible) {
    RTParams p(1.0, 3.0);
    auto a = rtent::sample_trajectory(p, 5.0, 123, 17);
    auto b = rtent::sample_trajectory(p, 5.0, 123, 17);
    ASSERT_EQ(a.switch_times().size(), b.switch_times().size());
    EXPECT_EQ(a.initial_level(), b.initial_level());
    for (std::size_t k = 0; k < a.switch_times().size(); ++k) {
        EXPECT_EQ(a.switch_times()[k], b.switch_times()[k]);
    }
    auto c = rtent::sample_trajectory(p, 5.0, 124, 17);
    EXPECT_FALSE(c.switch_times().size() == a.switch_times().size() &&
                 std::equal(a.switch_times().begin(), a.switch_times().end(),
                            c.switch_times().begin()));
}

TEST(SampleTrajectory, LongerHorizonExtendsSamePath) {
    RTParams p(1.0, 2.0);
    auto short_path = rtent::sample_trajectory(p, 3.0, 5, 9);
    auto long_path = rtent::sample_trajectory(p, 8.0, 5, 9);
    EXPECT_EQ(short_path.initial_level(), long_path.initial_level());
    ASSERT_LE(short_path.switch_times().size(), long_path.switch_times().size());
    for (std::size_t k = 0; k < short_path.switch_times().size(); ++k) {
        EXPECT_EQ(short_path.switch_times()[k], long_path.switch_times()[k]);
    }
}

TEST(SampleTrajectory, MeanSwitchCountIsPoissonMean) {
    // switch count on [0, T] is Poisson(gamma T / 2)
    RTParams p(1.0, 1.0);
    const double horizon = 10.0;
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<double>(rtent::sample_trajectory(p, horizon, 77, i)
                                               .switch_times()
                                               .size());
        sum += k;
        sum_sq += k * k;
    }
    const double mean = sum / n;
    const double var = (sum_sq - n * mean * mean) / (n - 1);
    EXPECT_NEAR(mean, 5.0, 3.0 * std::sqrt(var / n));
    EXPECT_NEAR(var, 5.0, 0.15); // Poisson: variance equals mean
}

TEST(SampleTrajectory, TimeAtHighLevelIsHalf) {
    RTParams p(1.0, 1.5);
    const int n = 20000;
    double fraction = 0.0;
    for (int i = 0; i < n; ++i) {
        fraction += rtent::accumulated_phase(rtent::sample_trajectory(p, 4.0, 3, i), 4.0) / 4.0;
    }
    EXPECT_NEAR(fraction / n, 0.5, 0.01);
}

// =============================================================================
// Autocorrelation
// =============================================================================

TEST(Autocorrelation, EmptyLagsGiveEmptyResult) {
    EXPECT_TRUE(rtent::estimate_autocorrelation(RTParams(1.0, 1.0), {}, 10, 1).empty());
}

TEST(Autocorrelation, RejectsNegativeLagAndZeroSamples) {
    const std::vector<double> bad{-1.0};
    const std::vector<double> ok{1.0};
    EXPECT_THROW(rtent::estimate_autocorrelation(RTParams(1.0, 1.0), bad, 10, 1),
                 rtent::InvalidInput);
    EXPECT_THROW(rtent::estimate_autocorrelation(RTParams(1.0, 1.0), ok, 0, 1),
                 rtent::InvalidInput);
}

TEST(Autocorrelation, ZeroLagIsExactlyOne) {
    const std::vector<double> lags{0.0};
    auto est = rtent::estimate_autocorrelation(RTParams(1.0, 1.0), lags, 1000, 5);
    EXPECT_EQ(est[0].value, 1.0);
    EXPECT_EQ(est[0].standard_error, 0.0);
}

TEST(Autocorrelation, MatchesExponentialDecay) {
    struct Case {
        double gamma, tau;
    };
    for (auto c : {Case{1.0, 1.0}, Case{2.0, 3.0}}) {
        const std::vector<double> lags{c.tau};
        auto est = rtent::estimate_autocorrelation(RTParams(1.0, c.gamma), lags, 100000, 31);
        EXPECT_NEAR(est[0].value, std::exp(-c.gamma * c.tau), 3.0 * est[0].standard_error)
            << "gamma=" << c.gamma << " tau=" << c.tau;
    }
}

TEST(Autocorrelation, StaticProcessStaysCorrelated) {
    const std::vector<double> lags{0.5, 5.0};
    auto est = rtent::estimate_autocorrelation(RTParams(1.0, 0.0), lags, 500, 2);
    EXPECT_EQ(est[0].value, 1.0);
    EXPECT_EQ(est[1].value, 1.0);
}
