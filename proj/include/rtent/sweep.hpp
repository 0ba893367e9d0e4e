// Parameter sweeps and report builders behind the rtent command line.
#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rtent/analytic_dephasing.hpp"
#include "rtent/error.hpp"
#include "rtent/rt_noise.hpp"
#include "rtent/trajectory_engine.hpp"

namespace rtent {

enum class SweepMode { Analytic, MonteCarlo, Both, Recovery, Autocorr };

struct SweepSpec {
    /// Couplings g = v/gamma; +inf is the static limit.
    std::vector<double> g_values{std::numeric_limits<double>::infinity(), 200.0, 50.0, 10.0,
                                 5.0};
    double v = 1.0;
    double vt_max = 6.0 * std::numbers::pi;
    double vt_step = 2.0 * std::numbers::pi / 200.0;
    std::size_t n_trajectories = 10'000;
    std::uint64_t master_seed = 42;
    SweepMode mode = SweepMode::Analytic;
    bool timestamp = true;
    unsigned threads = 0;
    int revival = 1;

    void validate() const {
        detail::require(!g_values.empty(), "at least one g value is required");
        for (double g : g_values) {
            detail::require(!std::isnan(g) && g > 0.0, "g values must be positive or inf");
        }
        detail::require_finite(v, "v");
        detail::require(v > 0.0, "v must be positive");
        detail::require_finite(vt_max, "vt-max");
        detail::require_finite(vt_step, "vt-step");
        detail::require(vt_step > 0.0, "vt-step must be positive");
        detail::require(vt_max >= 0.0, "vt-max must be non-negative");
        detail::require(n_trajectories >= 1, "n-traj must be at least 1");
    }

    [[nodiscard]] std::vector<double> vt_grid() const { return uniform_grid(vt_max, vt_step); }
};

// -----------------------------------------------------------------------------
// Text helpers
// -----------------------------------------------------------------------------

inline std::string_view mode_name(SweepMode mode) {
    switch (mode) {
    case SweepMode::Analytic: return "analytic";
    case SweepMode::MonteCarlo: return "mc";
    case SweepMode::Both: return "both";
    case SweepMode::Recovery: return "recovery";
    case SweepMode::Autocorr: return "autocorr";
    }
    return "analytic";
}

inline SweepMode parse_mode(std::string_view text) {
    for (auto m : {SweepMode::Analytic, SweepMode::MonteCarlo, SweepMode::Both,
                   SweepMode::Recovery, SweepMode::Autocorr}) {
        if (text == mode_name(m)) {
            return m;
        }
    }
    throw InvalidInput("unknown mode '" + std::string(text) +
                       "' (expected analytic|mc|both|recovery|autocorr)");
}

inline double parse_coupling(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "inf" || lower == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    double g = 0.0;
    try {
        g = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(g) || g <= 0.0) {
        throw InvalidInput("invalid g value '" + std::string(text) +
                           "' (expected a positive number or inf)");
    }
    return g;
}

/// Comma-separated couplings, e.g. "inf,200,50,10,5".
inline std::vector<double> parse_coupling_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const auto piece =
            text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                               : comma - start);
        out.push_back(parse_coupling(piece));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline std::string format_number(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

inline nlohmann::json coupling_json(double g) {
    return std::isinf(g) ? nlohmann::json("inf") : nlohmann::json(g);
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// -----------------------------------------------------------------------------
// Sweeps
// -----------------------------------------------------------------------------

/// One g value of a sweep: analytic curve always, ensemble when requested.
struct CurveRun {
    double g;
    RTParams rt;
    std::vector<double> vt;
    std::optional<EnsembleResult> mc;
};

inline RunConfig run_config_for(const SweepSpec &spec, const RTParams &rt,
                                std::vector<double> t_grid) {
    return RunConfig{SystemParams(rt), std::move(t_grid), spec.n_trajectories,
                     spec.master_seed, spec.threads, false};
}

inline std::vector<CurveRun> run_sweep(const SweepSpec &spec, bool with_mc) {
    spec.validate();
    const auto vt = spec.vt_grid();
    std::vector<CurveRun> runs;
    for (double g : spec.g_values) {
        CurveRun run{g, RTParams::from_coupling(spec.v, g), vt, std::nullopt};
        if (with_mc) {
            std::vector<double> t(vt.size());
            std::transform(vt.begin(), vt.end(), t.begin(),
                           [&](double x) { return x / spec.v; });
            run.mc = run_ensemble(run_config_for(spec, run.rt, std::move(t)));
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

/**
 * @brief CSV of E_f(vt) per coupling, with the f(e^{-gamma t/2}) envelope.
 *
 * Columns: vt,g,ef_analytic,envelope,ef_mc,ef_mc_se. The MC columns are
 * empty when the runs carry no ensemble. Leading '#' lines hold metadata.
 */
inline std::string figure_csv(const SweepSpec &spec, const std::vector<CurveRun> &runs) {
    std::ostringstream out;
    out << "# rtent figure1\n";
    out << "# mode=" << mode_name(spec.mode) << "\n";
    out << "# v=" << format_number(spec.v) << "\n";
    out << "# g=";
    for (std::size_t i = 0; i < spec.g_values.size(); ++i) {
        out << (i ? "," : "") << format_number(spec.g_values[i]);
    }
    out << "\n";
    out << "# vt_max=" << format_number(spec.vt_max) << "\n";
    out << "# vt_step=" << format_number(spec.vt_step) << "\n";
    out << "# n_traj=" << spec.n_trajectories << "\n";
    out << "# seed=" << spec.master_seed << "\n";
    if (spec.timestamp) {
        out << "# generated=" << utc_timestamp() << "\n";
    }
    out << "vt,g,ef_analytic,envelope,ef_mc,ef_mc_se\n";
    for (const auto &run : runs) {
        for (std::size_t k = 0; k < run.vt.size(); ++k) {
            const double t = run.vt[k] / spec.v;
            out << format_number(run.vt[k]) << ',' << format_number(run.g) << ','
                << format_number(entanglement_of_formation_at(run.rt, t)) << ','
                << format_number(envelope(run.rt, t)) << ',';
            if (run.mc) {
                const auto &p = run.mc->points[k];
                out << format_number(p.e_f) << ',' << format_number(p.e_f_se);
            } else {
                out << ',';
            }
            out << '\n';
        }
    }
    return out.str();
}

inline std::string cmd_figure1(const SweepSpec &spec) {
    const bool with_mc = spec.mode == SweepMode::MonteCarlo || spec.mode == SweepMode::Both;
    return figure_csv(spec, run_sweep(spec, with_mc));
}

// -----------------------------------------------------------------------------
// Reports
// -----------------------------------------------------------------------------

struct Report {
    nlohmann::json body;
    bool pass;
};

inline constexpr double kCompareSigmas = 4.0;
inline constexpr double kCompareMinFraction = 0.95;
inline constexpr double kCompareMaxDeviation = 0.05;
/// Absolute slack for points whose standard error is zero (e.g. t = 0).
inline constexpr double kCompareFloor = 1e-12;

inline nlohmann::json params_json(const SweepSpec &spec, const RTParams &rt) {
    return {{"v", rt.v()},
            {"g", coupling_json(rt.g())},
            {"gamma", rt.gamma()},
            {"n_trajectories", spec.n_trajectories},
            {"seed", spec.master_seed},
            {"vt_max", spec.vt_max},
            {"vt_step", spec.vt_step}};
}

/// MC mean coherence against the closed form for one curve.
inline Report compare_curve(const SweepSpec &spec, const CurveRun &run) {
    detail::require(run.mc.has_value(), "compare needs Monte Carlo results");
    nlohmann::json per_point = nlohmann::json::array();
    double max_dev = 0.0;
    std::size_t within = 0;
    for (std::size_t k = 0; k < run.vt.size(); ++k) {
        const auto &p = run.mc->points[k];
        const Complex q = coherence_factor(run.rt, p.t);
        const Complex dev = p.q_hat - q;
        max_dev = std::max(max_dev, std::abs(dev));
        const bool ok_re = std::abs(dev.real()) <= kCompareSigmas * p.se_re + kCompareFloor;
        const bool ok_im = std::abs(dev.imag()) <= kCompareSigmas * p.se_im + kCompareFloor;
        within += ok_re && ok_im ? 1 : 0;
        per_point.push_back({{"vt", run.vt[k]},
                             {"q_re", q.real()},
                             {"q_im", q.imag()},
                             {"qhat_re", p.q_hat.real()},
                             {"qhat_im", p.q_hat.imag()},
                             {"se_re", p.se_re},
                             {"se_im", p.se_im}});
    }
    const double fraction = static_cast<double>(within) / static_cast<double>(run.vt.size());
    const bool pass = fraction >= kCompareMinFraction && max_dev < kCompareMaxDeviation;
    nlohmann::json body{{"params", params_json(spec, run.rt)},
                        {"max_abs_dev", max_dev},
                        {"tolerance", kCompareSigmas},
                        {"pass", pass},
                        {"fraction_within", fraction},
                        {"min_fraction_within", kCompareMinFraction},
                        {"max_abs_dev_limit", kCompareMaxDeviation},
                        {"per_point", std::move(per_point)}};
    return {std::move(body), pass};
}

/// One report object per g; a single g gives the object itself, several an array.
inline Report compare_report(const SweepSpec &spec, const std::vector<CurveRun> &runs) {
    std::vector<Report> reports;
    for (const auto &run : runs) {
        reports.push_back(compare_curve(spec, run));
    }
    if (reports.size() == 1) {
        return std::move(reports.front());
    }
    nlohmann::json all = nlohmann::json::array();
    bool pass = true;
    for (auto &r : reports) {
        pass = pass && r.pass;
        all.push_back(std::move(r.body));
    }
    return {std::move(all), pass};
}

inline Report cmd_compare(const SweepSpec &spec) {
    return compare_report(spec, run_sweep(spec, true));
}

inline constexpr double kRecoveryTolerance = 1e-9;

inline Report cmd_recovery(const SweepSpec &spec, int n) {
    spec.validate();
    detail::require(n >= 1, "revival index n must be at least 1");
    nlohmann::json all = nlohmann::json::array();
    bool pass = true;
    for (double g : spec.g_values) {
        const auto rt = RTParams::from_coupling(spec.v, g);
        const auto res = recovered_ensemble_concurrence(run_config_for(spec, rt, {0.0}), n);
        const bool ok = std::abs(res.concurrence_after - 1.0) <= kRecoveryTolerance;
        pass = pass && ok;
        all.push_back({{"params", params_json(spec, rt)},
                       {"n", n},
                       {"t_n", res.t_n},
                       {"vt_n", rt.v() * res.t_n},
                       {"concurrence_before", res.concurrence_before},
                       {"concurrence_after", res.concurrence_after},
                       {"analytic_abs_q", std::abs(coherence_factor(rt, res.t_n))},
                       {"decay_estimate", std::exp(-rt.gamma() * res.t_n / 2.0)},
                       {"tolerance", kRecoveryTolerance},
                       {"pass", ok}});
    }
    if (all.size() == 1) {
        return {all.front(), pass};
    }
    return {std::move(all), pass};
}

inline constexpr double kAutocorrSigmas = 3.0;
inline const std::vector<double> kAutocorrGammaLags{0.0, 0.5, 1.0, 2.0, 3.0};

inline Report cmd_autocorr(const SweepSpec &spec) {
    spec.validate();
    nlohmann::json all = nlohmann::json::array();
    bool pass = true;
    for (double g : spec.g_values) {
        const auto rt = RTParams::from_coupling(spec.v, g);
        detail::require(!rt.is_static(), "autocorrelation check needs gamma > 0 (finite g)");
        std::vector<double> lags;
        for (double x : kAutocorrGammaLags) {
            lags.push_back(x / rt.gamma());
        }
        const auto est =
            estimate_autocorrelation(rt, lags, spec.n_trajectories, spec.master_seed);
        nlohmann::json rows = nlohmann::json::array();
        bool ok = true;
        for (const auto &e : est) {
            const double expected = std::exp(-rt.gamma() * e.lag);
            const double se = std::isnan(e.standard_error) ? 0.0 : e.standard_error;
            const bool within =
                std::abs(e.value - expected) <= kAutocorrSigmas * se + kCompareFloor;
            ok = ok && within;
            rows.push_back({{"tau", e.lag},
                            {"gamma_tau", rt.gamma() * e.lag},
                            {"empirical", e.value},
                            {"expected", expected},
                            {"se", se},
                            {"pass", within}});
        }

        // mean number of switches on [0, T] against gamma T / 2
        const double horizon = 10.0 / rt.gamma();
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < spec.n_trajectories; ++i) {
            const auto traj = sample_trajectory(rt, horizon, spec.master_seed + 1, i);
            const auto k = static_cast<double>(traj.switch_times().size());
            sum += k;
            sum_sq += k * k;
        }
        const auto count = static_cast<double>(spec.n_trajectories);
        const double mean = sum / count;
        const double se = count > 1 ? std::sqrt(std::max(0.0, (sum_sq - count * mean * mean) /
                                                                  (count - 1.0)) /
                                                count)
                                    : 0.0;
        const double expected = rt.gamma() * horizon / 2.0;
        const bool switches_ok = std::abs(mean - expected) <= kAutocorrSigmas * se + kCompareFloor;
        ok = ok && switches_ok;
        pass = pass && ok;
        all.push_back({{"params", params_json(spec, rt)},
                       {"rows", std::move(rows)},
                       {"switch_count",
                        {{"horizon", horizon},
                         {"mean", mean},
                         {"expected", expected},
                         {"se", se},
                         {"pass", switches_ok}}},
                       {"tolerance", kAutocorrSigmas},
                       {"pass", ok}});
    }
    if (all.size() == 1) {
        return {all.front(), pass};
    }
    return {std::move(all), pass};
}

} // namespace rtent
