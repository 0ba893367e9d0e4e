// rtent: sweeps, figure data and validation reports for two-qubit
// entanglement under telegraph dephasing.
//
// Exit status: 0 success/pass, 1 validation fail, 2 invalid input, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rtent/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output path '" + path + "' for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError("failed writing output path '" + path + "'");
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entanglement dynamics of two qubits, one under random telegraph dephasing"};
    app.set_config("--config", "", "Plain-text key=value file; command-line flags take precedence");

    std::string g_list = "inf,200,50,10,5";
    std::string mode = "analytic";
    std::string out_path = "-";
    std::string report_path;
    bool no_timestamp = false;
    rtent::SweepSpec spec;

    app.add_option("--g", g_list, "Comma-separated couplings g = v/gamma, 'inf' for static noise")
        ->capture_default_str();
    app.add_option("--v", spec.v, "Noise amplitude v (sets the time unit)")->capture_default_str();
    app.add_option("--vt-max", spec.vt_max, "Largest dimensionless time vt")->capture_default_str();
    app.add_option("--vt-step", spec.vt_step, "Grid step in vt")->capture_default_str();
    app.add_option("--n-traj", spec.n_trajectories, "Monte Carlo trajectories (or samples)")
        ->capture_default_str();
    app.add_option("--seed", spec.master_seed, "Master seed")->capture_default_str();
    app.add_option("--mode", mode, "analytic|mc|both|recovery|autocorr")->capture_default_str();
    app.add_option("--out", out_path, "Output path ('-' for stdout)")->capture_default_str();
    app.add_option("--report", report_path,
                   "JSON report path in 'both' mode (default: <out>.compare.json, or stdout)");
    app.add_flag("--no-timestamp", no_timestamp, "Omit the generation time from CSV metadata");
    app.add_option("--threads", spec.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    app.add_option("--revival", spec.revival, "Revival index n for recovery mode")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        spec.g_values = rtent::parse_coupling_list(g_list);
        spec.mode = rtent::parse_mode(mode);
        spec.timestamp = !no_timestamp;
        spec.validate();

        switch (spec.mode) {
        case rtent::SweepMode::Analytic:
        case rtent::SweepMode::MonteCarlo:
            write_text(out_path, rtent::cmd_figure1(spec));
            return kExitOk;
        case rtent::SweepMode::Both: {
            const auto runs = rtent::run_sweep(spec, true);
            write_text(out_path, rtent::figure_csv(spec, runs));
            const auto report = rtent::compare_report(spec, runs);
            std::string target = report_path;
            if (target.empty()) {
                target = out_path == "-" ? "-" : out_path + ".compare.json";
            }
            write_text(target, report.body.dump(2) + "\n");
            return report.pass ? kExitOk : kExitFail;
        }
        case rtent::SweepMode::Recovery: {
            const auto report = rtent::cmd_recovery(spec, spec.revival);
            write_text(out_path, report.body.dump(2) + "\n");
            return report.pass ? kExitOk : kExitFail;
        }
        case rtent::SweepMode::Autocorr: {
            const auto report = rtent::cmd_autocorr(spec);
            write_text(out_path, report.body.dump(2) + "\n");
            return report.pass ? kExitOk : kExitFail;
        }
        }
    } catch (const rtent::InvalidInput &e) {
        std::cerr << "rtent: invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const rtent::ResourceLimit &e) {
        std::cerr << "rtent: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const IoError &e) {
        std::cerr << "rtent: I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}
