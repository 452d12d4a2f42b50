#include "l4l/bench.hpp"

#include "l4l/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace l4l::bench {

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

BenchReport summarize(std::string operation, std::uint64_t iterations, std::vector<double> samples_ms) {
    BenchReport r;
    r.operation = std::move(operation);
    r.iterations = iterations;
    r.samples_ms = std::move(samples_ms);
    if (r.samples_ms.empty()) return r;
    std::vector<double> sorted = r.samples_ms;
    std::sort(sorted.begin(), sorted.end());
    r.min = sorted.front();
    r.max = sorted.back();
    r.mean = std::clamp(std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size()),
                        r.min, r.max);
    r.median = percentile(sorted, 0.5);
    r.p25 = percentile(sorted, 0.25);
    r.p75 = percentile(sorted, 0.75);
    return r;
}

std::vector<BenchReport> run_vdf_bench(const vdf::SecurityParams& base, const std::vector<std::uint64_t>& iterations,
                                       std::size_t samples) {
    std::vector<BenchReport> reports;
    for (std::uint64_t t : iterations) {
        vdf::SecurityParams security = base;
        security.iterations = t;
        const auto pp = vdf::setup(security, as_bytes("bench"), as_bytes("127.0.0.1:6180"));
        {
            // Untimed warm-up so the first sample does not pay for cold caches.
            const auto x = vdf::hash_to_group(pp.input_digest, pp.modulus);
            const auto ev = vdf::eval(pp, x);
            (void)vdf::verify(pp, x, ev.output, ev.proof);
        }
        std::vector<double> eval_ms, verify_ms, invalid_ms;
        for (std::size_t i = 0; i < samples; ++i) {
            const auto input =
                vdf::hash_to_group(Sha256("l4l/bench/input").update_u64(i).finish(), pp.modulus);
            vdf::Evaluation ev;
            eval_ms.push_back(time_ms([&] { ev = vdf::eval(pp, input); }));

            bool ok = false;
            verify_ms.push_back(time_ms([&] {
                ok = !vdf::fast_reject(security, ev.proof) && vdf::verify(pp, input, ev.output, ev.proof);
            }));
            if (!ok) throw std::logic_error("bench: valid proof failed verification");

            vdf::VdfProof bad = ev.proof;
            bad.embedded_prime_length_bits -= 1;
            bool accepted = true;
            invalid_ms.push_back(time_ms([&] {
                accepted = !vdf::fast_reject(security, bad) && vdf::verify(pp, input, ev.output, bad);
            }));
            if (accepted) throw std::logic_error("bench: invalid proof accepted");
        }
        reports.push_back(summarize("eval", pp.iterations, std::move(eval_ms)));
        reports.push_back(summarize("verify_valid", pp.iterations, std::move(verify_ms)));
        reports.push_back(summarize("verify_invalid", pp.iterations, std::move(invalid_ms)));
    }
    return reports;
}

std::string bench_csv(const std::vector<BenchReport>& reports) {
    std::ostringstream out;
    out << kBenchCsvHeader << '\n' << std::setprecision(9);
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.samples_ms.size(); ++i) {
            out << r.operation << ',' << r.iterations << ",sample," << i << ',' << r.samples_ms[i] << '\n';
        }
        const std::pair<const char*, double> stats[] = {{"mean", r.mean}, {"median", r.median}, {"p25", r.p25},
                                                        {"p75", r.p75},   {"min", r.min},       {"max", r.max}};
        for (const auto& [kind, v] : stats) out << r.operation << ',' << r.iterations << ',' << kind << ",," << v << '\n';
    }
    return out.str();
}

OverheadReport compute_overhead(double verify_ms, std::uint64_t proofs_per_epoch, std::uint64_t validators,
                                double epoch_seconds) {
    if (!(verify_ms >= 0)) throw Error(ErrorCode::InvalidArgument, "verify time must be >= 0");
    if (validators == 0) throw Error(ErrorCode::InvalidArgument, "validators must be >= 1");
    if (!(epoch_seconds > 0)) throw Error(ErrorCode::InvalidArgument, "epoch length must be > 0");
    OverheadReport r;
    r.per_validator_seconds = verify_ms * static_cast<double>(proofs_per_epoch) / 1000.0;
    r.network_seconds = r.per_validator_seconds * static_cast<double>(validators);
    r.fraction_percent = r.network_seconds / (epoch_seconds * static_cast<double>(validators)) * 100.0;
    return r;
}

std::string format_overhead(const OverheadReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << "per_validator_seconds: " << report.per_validator_seconds << '\n'
        << "network_seconds: " << report.network_seconds << '\n';
    out << std::defaultfloat << std::setprecision(4) << "network_fraction_percent: " << report.fraction_percent
        << '\n';
    return out.str();
}

}  // namespace l4l::bench
