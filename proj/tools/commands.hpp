#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace l4l::cli {

/// Stable exit-code contract for scripting.
enum ExitCode : int {
    kOk = 0,
    kDomainFailure = 1,  // invalid proof or tower
    kUsageError = 2,     // bad flags, config or I/O
};

struct MineOptions {
    std::filesystem::path tower_file;
    std::optional<std::uint64_t> iterations;
    std::uint64_t proofs = 1;
    std::filesystem::path key_file;
    std::string endpoint = "127.0.0.1:6180";
    std::uint32_t modulus_bits = 2048;
    std::uint32_t prime_length_bits = 512;
    std::uint64_t genesis_seed = 0;
};

struct BenchOptions {
    std::vector<std::uint64_t> iterations_list;
    std::size_t samples = 20;
    std::filesystem::path out;
    std::uint32_t modulus_bits = 512;
};

struct SimulateOptions {
    std::filesystem::path scenario;
    std::filesystem::path out_csv;
    std::filesystem::path out_summary;
};

struct OverheadOptions {
    double verify_ms = 0;
    std::uint64_t proofs_per_epoch = 0;
    std::uint64_t validators = 0;
    double epoch_seconds = 0;
};

inline constexpr std::uint64_t kDefaultMineIterations = 1u << 12;

int cmd_mine(const MineOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify_tower(const std::filesystem::path& tower_file, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_overhead(const OverheadOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; the binary's main is a thin wrapper.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l4l::cli
