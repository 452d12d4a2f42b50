#include "commands.hpp"

#include "l4l/bench.hpp"
#include "l4l/error.hpp"
#include "l4l/metrics_io.hpp"
#include "l4l/scenario_io.hpp"
#include "l4l/tower.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

namespace l4l::cli {

namespace {

namespace fs = std::filesystem;

Bytes read_key(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read key file " + path.string());
    Bytes key((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!key.empty() && (key.back() == '\n' || key.back() == '\r')) key.pop_back();
    if (key.empty()) throw Error(ErrorCode::InvalidArgument, "key file " + path.string() + " is empty");
    return key;
}

int report(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
    case ErrorCode::CorruptTower:
    case ErrorCode::InvalidProof:
        return kDomainFailure;
    default:
        return kUsageError;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

int cmd_mine(const MineOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const Bytes key = read_key(opt.key_file);
        tower::Tower t;
        if (fs::exists(opt.tower_file)) {
            t = tower::load_tower(opt.tower_file);
            if (t.owner_public_key != key) {
                err << "error: key file does not match the tower owner\n";
                return kDomainFailure;
            }
            if (opt.iterations && vdf::effective_iterations(*opt.iterations) != t.params.iterations) {
                err << "error: tower was built with t=" << t.params.iterations << '\n';
                return kUsageError;
            }
            out << "resumed tower at height " << t.height() << '\n';
        } else {
            vdf::SecurityParams security{opt.modulus_bits, opt.prime_length_bits,
                                         opt.iterations.value_or(kDefaultMineIterations), opt.genesis_seed};
            t = tower::init_tower(security, key, as_bytes(opt.endpoint));
            tower::save_tower(t, opt.tower_file);
            out << "initialised tower (t=" << t.params.iterations << ", " << opt.modulus_bits
                << "-bit modulus) height " << t.height() << '\n';
        }
        for (std::uint64_t i = 0; i < opt.proofs; ++i) {
            const auto start = std::chrono::steady_clock::now();
            t = tower::extend(std::move(t));
            tower::save_tower(t, opt.tower_file);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            out << "height " << t.height() << " (" << std::fixed << std::setprecision(1) << ms << " ms)\n";
        }
        return kOk;
    } catch (const Error& e) {
        return report(e, err);
    }
}

int cmd_verify_tower(const fs::path& tower_file, std::ostream& out, std::ostream& err) {
    if (!fs::exists(tower_file)) {
        err << "error: tower file not found: " << tower_file.string() << '\n';
        return kUsageError;
    }
    try {
        const tower::Tower t = tower::read_tower(tower_file);
        out << "tower height " << t.height() << ", t=" << t.params.iterations << '\n';
        auto observer = [&](std::size_t index, std::chrono::nanoseconds elapsed) {
            out << "record " << index << ": " << std::fixed << std::setprecision(3)
                << std::chrono::duration<double, std::milli>(elapsed).count() << " ms\n";
        };
        const auto check = tower::check_chain(t, observer);
        if (!check) {
            if (check.bad_index) {
                err << "invalid record at index " << *check.bad_index << ": " << check.reason << '\n';
            } else {
                err << "invalid tower: " << check.reason << '\n';
            }
            return kDomainFailure;
        }
        out << "tower valid: height " << t.height() << '\n';
        return kOk;
    } catch (const Error& e) {
        return report(e, err);
    }
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        if (opt.iterations_list.empty() || opt.samples == 0) {
            err << "error: need at least one iteration count and one sample\n";
            return kUsageError;
        }
        vdf::SecurityParams base = vdf::SecurityParams::test_profile();
        base.modulus_bits = opt.modulus_bits;
        const auto reports = bench::run_vdf_bench(base, opt.iterations_list, opt.samples);
        write_file(opt.out, bench::bench_csv(reports));
        out << std::left << std::setw(16) << "operation" << std::setw(12) << "t" << std::right << std::setw(12)
            << "mean_ms" << std::setw(12) << "median_ms" << '\n';
        for (const auto& r : reports) {
            out << std::left << std::setw(16) << r.operation << std::setw(12) << r.iterations << std::right
                << std::fixed << std::setprecision(4) << std::setw(12) << r.mean << std::setw(12) << r.median << '\n';
        }
        return kOk;
    } catch (const Error& e) {
        return report(e, err);
    }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const sim::Scenario scenario = sim::load_scenario(opt.scenario);
        const sim::SimMetrics metrics = sim::run(scenario);
        write_file(opt.out_csv, sim::metrics_csv(metrics));
        write_file(opt.out_summary, sim::metrics_summary_json(metrics));
        const auto rt = sim::recovery_time(metrics);
        out << "scenario " << metrics.scenario << ": " << metrics.epochs.size() << " epochs, "
            << metrics.total_committed << " committed, " << metrics.total_timeouts << " timeouts, recovery_time "
            << (rt ? std::to_string(*rt) : std::string("never")) << '\n';
        return kOk;
    } catch (const Error& e) {
        err << opt.scenario.string() << ": ";
        return report(e, err);
    }
}

int cmd_overhead(const OverheadOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        out << bench::format_overhead(
            bench::compute_overhead(opt.verify_ms, opt.proofs_per_epoch, opt.validators, opt.epoch_seconds));
        return kOk;
    } catch (const Error& e) {
        return report(e, err);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay towers and validator-set reconfiguration"};
    app.require_subcommand(1);

    MineOptions mine;
    std::uint64_t mine_iterations = 0;
    auto* mine_cmd = app.add_subcommand("mine", "Create or extend a delay tower");
    mine_cmd->add_option("--tower-file", mine.tower_file, "Tower file to create or extend")->required();
    auto* iter_opt = mine_cmd->add_option("--iterations", mine_iterations, "Squarings per proof (rounded up to 2^k)")
                         ->check(CLI::PositiveNumber);
    mine_cmd->add_option("--proofs", mine.proofs, "Proofs to append")->capture_default_str();
    mine_cmd->add_option("--key-file", mine.key_file, "File holding the owner key")->required();
    mine_cmd->add_option("--endpoint", mine.endpoint, "Declared network endpoint")->capture_default_str();
    mine_cmd->add_option("--modulus-bits", mine.modulus_bits, "RSA modulus size for new towers")
        ->capture_default_str()
        ->check(CLI::Range(64u, 16384u));

    std::filesystem::path verify_file;
    auto* verify_cmd = app.add_subcommand("verify-tower", "Validate every record of a tower file");
    verify_cmd->add_option("--tower-file", verify_file, "Tower file")->required();

    BenchOptions bench_opt;
    std::string iterations_list;
    auto* bench_cmd = app.add_subcommand("bench", "Time eval and verify");
    bench_cmd->add_option("--iterations-list", iterations_list, "Comma-separated t values")->required();
    bench_cmd->add_option("--samples", bench_opt.samples, "Samples per point")->capture_default_str();
    bench_cmd->add_option("--out", bench_opt.out, "CSV output path")->required();
    bench_cmd->add_option("--modulus-bits", bench_opt.modulus_bits, "RSA modulus size")
        ->capture_default_str()
        ->check(CLI::Range(64u, 16384u));

    SimulateOptions sim_opt;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario file");
    sim_cmd->add_option("--scenario", sim_opt.scenario, "Scenario YAML")->required();
    sim_cmd->add_option("--out-csv", sim_opt.out_csv, "Per-epoch CSV output")->required();
    sim_cmd->add_option("--out-summary", sim_opt.out_summary, "JSON summary output")->required();

    OverheadOptions over;
    auto* over_cmd = app.add_subcommand("overhead", "Verification overhead arithmetic");
    over_cmd->add_option("--verify-ms", over.verify_ms, "Mean verify time in ms")->required();
    over_cmd->add_option("--proofs-per-epoch", over.proofs_per_epoch, "Proofs per miner per epoch")->required();
    over_cmd->add_option("--validators", over.validators, "Validator set size")->required();
    over_cmd->add_option("--epoch-seconds", over.epoch_seconds, "Epoch length in seconds")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    if (*mine_cmd) {
        if (*iter_opt) mine.iterations = mine_iterations;
        return cmd_mine(mine, out, err);
    }
    if (*verify_cmd) return cmd_verify_tower(verify_file, out, err);
    if (*bench_cmd) {
        std::stringstream ss(iterations_list);
        for (std::string item; std::getline(ss, item, ',');) {
            try {
                std::size_t used = 0;
                const auto v = std::stoull(item, &used);
                if (used != item.size() || v == 0) throw std::invalid_argument(item);
                bench_opt.iterations_list.push_back(v);
            } catch (const std::exception&) {
                err << "error: bad iteration count '" << item << "'\n";
                return kUsageError;
            }
        }
        return cmd_bench(bench_opt, out, err);
    }
    if (*sim_cmd) return cmd_simulate(sim_opt, out, err);
    return cmd_overhead(over, out, err);
}

}  // namespace l4l::cli
