#include "l4l/scenario_io.hpp"

#include "l4l/error.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace l4l::sim {

namespace {

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& why) {
    const auto mark = node.Mark();
    if (mark.line >= 0) throw Error(ErrorCode::InvalidScenario, "line " + std::to_string(mark.line + 1) + ": " + why);
    throw Error(ErrorCode::InvalidScenario, why);
}

void expect_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    if (!map.IsMap()) fail_at(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) fail_at(kv.first, "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& name) {
    if (!node.IsScalar()) fail_at(node, "'" + name + "' must be a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail_at(node, "'" + name + "' has an invalid value '" + node.Scalar() + "'");
    }
}

std::uint64_t unsigned_field(const YAML::Node& node, const std::string& name) {
    if (node.IsScalar() && !node.Scalar().empty() && node.Scalar().front() == '-') {
        fail_at(node, "'" + name + "' must be non-negative");
    }
    return scalar<std::uint64_t>(node, name);
}

const YAML::Node required(const YAML::Node& map, const std::string& key) {
    YAML::Node n = map[key];
    if (!n) fail_at(map, "missing required key '" + key + "'");
    return n;
}

ledger::Rational rational_field(const YAML::Node& node, const std::string& name) {
    auto r = ledger::parse_rational(scalar<std::string>(node, name));
    if (!r) fail_at(node, "'" + name + "' must be a decimal or p/q fraction");
    return *r;
}

Behavior parse_behavior(const YAML::Node& node) {
    if (node.IsScalar()) {
        const auto name = node.Scalar();
        if (name == "honest") return Honest{};
        if (name == "crashed") return Crashed{0};
        fail_at(node, "unknown behavior '" + name + "'");
    }
    if (!node.IsMap() || node.size() != 1) fail_at(node, "behavior must be 'honest' or a single-key mapping");
    const auto kind = node.begin()->first.as<std::string>();
    const YAML::Node body = node.begin()->second;
    if (kind == "honest") return Honest{};
    if (kind == "crashed") {
        expect_keys(body, {"from_round"}, "crashed");
        return Crashed{body["from_round"] ? unsigned_field(body["from_round"], "from_round") : 0};
    }
    if (kind == "silent") {
        expect_keys(body, {"sign_probability"}, "silent");
        return Silent{rational_field(required(body, "sign_probability"), "sign_probability")};
    }
    fail_at(node, "unknown behavior '" + kind + "'");
}

struct AddressRange {
    std::string prefix;
    std::uint64_t start = 0;
    std::uint64_t count = 0;
    std::uint64_t width = 2;
};

std::vector<Address> expand(const AddressRange& r) {
    std::vector<Address> out;
    for (std::uint64_t i = r.start; i < r.start + r.count; ++i) {
        std::string idx = std::to_string(i);
        if (idx.size() < r.width) idx.insert(0, r.width - idx.size(), '0');
        out.push_back(r.prefix + idx);
    }
    return out;
}

AddressRange parse_range(const YAML::Node& node) {
    AddressRange r;
    r.prefix = scalar<std::string>(required(node, "prefix"), "prefix");
    r.count = unsigned_field(required(node, "count"), "count");
    if (node["start"]) r.start = unsigned_field(node["start"], "start");
    if (node["width"]) r.width = unsigned_field(node["width"], "width");
    if (r.count == 0) fail_at(node, "'count' must be >= 1");
    if (r.count > 1'000'000) fail_at(node, "'count' is unreasonably large");
    return r;
}

std::vector<Address> parse_address_list(const YAML::Node& node, const std::string& name) {
    if (node.IsSequence()) {
        std::vector<Address> out;
        for (const auto& item : node) out.push_back(scalar<std::string>(item, name));
        return out;
    }
    if (node.IsMap()) {
        expect_keys(node, {"prefix", "start", "count", "width"}, name);
        return expand(parse_range(node));
    }
    fail_at(node, "'" + name + "' must be a list or a {prefix, count} range");
}

void parse_population(const YAML::Node& node, Scenario& sc) {
    if (!node.IsSequence()) fail_at(node, "'population' must be a list");
    std::set<Address> seen;
    for (const auto& entry : node) {
        expect_keys(entry,
                    {"address", "prefix", "start", "count", "width", "behavior", "mining_rate", "real_vdf",
                     "initial_height", "join_epoch"},
                    "population entry");
        Participant proto;
        if (entry["behavior"]) proto.behavior = parse_behavior(entry["behavior"]);
        if (entry["mining_rate"]) proto.mining.rate = unsigned_field(entry["mining_rate"], "mining_rate");
        if (entry["real_vdf"]) proto.mining.real_vdf = scalar<bool>(entry["real_vdf"], "real_vdf");
        if (entry["initial_height"]) proto.initial_height = unsigned_field(entry["initial_height"], "initial_height");
        if (entry["join_epoch"]) {
            proto.join_epoch = unsigned_field(entry["join_epoch"], "join_epoch");
            if (proto.join_epoch >= sc.epochs) fail_at(entry["join_epoch"], "join_epoch must be < epochs");
        }
        if (const auto* silent = std::get_if<Silent>(&proto.behavior);
            silent && (silent->sign_probability < 0 || silent->sign_probability > 1)) {
            fail_at(entry["behavior"], "sign_probability must lie in [0, 1]");
        }

        std::vector<Address> addresses;
        if (entry["address"]) {
            if (entry["prefix"] || entry["count"]) fail_at(entry, "use either 'address' or 'prefix'/'count'");
            addresses.push_back(scalar<std::string>(entry["address"], "address"));
        } else if (entry["prefix"]) {
            addresses = expand(parse_range(entry));
        } else {
            fail_at(entry, "population entry needs 'address' or 'prefix'/'count'");
        }
        for (auto& a : addresses) {
            if (!seen.insert(a).second) fail_at(entry, "duplicate participant '" + a + "'");
            Participant p = proto;
            p.address = std::move(a);
            sc.population.push_back(std::move(p));
        }
    }
}

void parse_epoch_config(const YAML::Node& node, ledger::EpochConfig& cfg) {
    expect_keys(node,
                {"max_validators", "liveliness_threshold", "mining_threshold", "jail_sentence_epochs", "growth_cap",
                 "ranking"},
                "epoch_config");
    if (node["max_validators"]) cfg.max_validators = unsigned_field(node["max_validators"], "max_validators");
    if (node["liveliness_threshold"]) {
        cfg.liveliness_threshold = rational_field(node["liveliness_threshold"], "liveliness_threshold");
    }
    if (node["mining_threshold"]) cfg.mining_threshold = unsigned_field(node["mining_threshold"], "mining_threshold");
    if (node["jail_sentence_epochs"]) {
        cfg.jail_sentence_epochs = unsigned_field(node["jail_sentence_epochs"], "jail_sentence_epochs");
    }
    if (node["growth_cap"]) cfg.growth_cap = unsigned_field(node["growth_cap"], "growth_cap");
    if (node["ranking"]) {
        auto r = ledger::parse_ranking(scalar<std::string>(node["ranking"], "ranking"));
        if (!r) fail_at(node["ranking"], "ranking must be 'tower_height' or 'compliant_epochs'");
        cfg.ranking = *r;
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail_at(node, e.what());
    }
}

void parse_security(const YAML::Node& node, vdf::SecurityParams& s) {
    expect_keys(node, {"modulus_bits", "prime_length_bits", "iterations", "genesis_seed"}, "security");
    if (node["modulus_bits"]) s.modulus_bits = static_cast<std::uint32_t>(unsigned_field(node["modulus_bits"], "modulus_bits"));
    if (node["prime_length_bits"]) {
        s.prime_length_bits = static_cast<std::uint32_t>(unsigned_field(node["prime_length_bits"], "prime_length_bits"));
    }
    if (node["iterations"]) s.iterations = unsigned_field(node["iterations"], "iterations");
    if (node["genesis_seed"]) s.genesis_seed = unsigned_field(node["genesis_seed"], "genesis_seed");
    try {
        s.validate();
    } catch (const Error& e) {
        fail_at(node, e.what());
    }
}

}  // namespace

Scenario parse_scenario(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::InvalidScenario, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root || root.IsNull()) throw Error(ErrorCode::InvalidScenario, "line 1: empty scenario");
    expect_keys(root,
                {"name", "seed", "epochs", "rounds_per_epoch", "epoch_config", "security", "genesis_validators",
                 "population"},
                "scenario");
    Scenario sc;
    if (root["name"]) sc.name = scalar<std::string>(root["name"], "name");
    sc.seed = unsigned_field(required(root, "seed"), "seed");
    sc.epochs = unsigned_field(required(root, "epochs"), "epochs");
    sc.rounds_per_epoch = unsigned_field(required(root, "rounds_per_epoch"), "rounds_per_epoch");
    if (root["epoch_config"]) parse_epoch_config(root["epoch_config"], sc.epoch_config);
    if (root["security"]) parse_security(root["security"], sc.security);
    parse_population(required(root, "population"), sc);
    sc.genesis_validators = parse_address_list(required(root, "genesis_validators"), "genesis_validators");
    sc.epoch_config.rounds_per_epoch = sc.rounds_per_epoch;

    try {
        sc.validate();
    } catch (const Error& e) {
        // Whole-scenario checks anchor to the genesis list, where most of
        // them originate.
        fail_at(root["genesis_validators"], std::string(e.what()).substr(to_string(ErrorCode::InvalidScenario).size() + 2));
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open scenario " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace l4l::sim
