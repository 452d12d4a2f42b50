#pragma once

// Independent brute-force model of the end-of-epoch pipeline, plus a
// generator of random ledgers for differential testing.

#include "l4l/ledger.hpp"
#include "l4l/reconfig.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace l4l::testing {

struct OracleResult {
    std::vector<ledger::Address> jailed;
    std::vector<ledger::Address> proposed;
    std::vector<ledger::Address> validator_set;
    std::set<ledger::Address> jail_set;
    std::map<ledger::Address, std::uint64_t> sentences;
    std::vector<ledger::Address> released;
    bool skipped = false;
};

inline OracleResult oracle_advance(const ledger::LedgerState& s) {
    using ledger::Address;
    const auto& cfg = s.config;
    OracleResult out;

    // Jail: signed / total <= p/q  <=>  signed * q <= p * total.
    if (s.epoch_blocks_total > 0) {
        const auto p = cfg.liveliness_threshold.numerator();
        const auto q = cfg.liveliness_threshold.denominator();
        for (const auto& v : s.validator_set) {
            auto it = s.epoch_signatures.find(v);
            const std::int64_t signed_blocks = it == s.epoch_signatures.end() ? 0 : static_cast<std::int64_t>(it->second);
            if (signed_blocks * q <= p * static_cast<std::int64_t>(s.epoch_blocks_total)) out.jailed.push_back(v);
        }
    }
    out.jail_set = s.jail_set;
    out.jail_set.insert(out.jailed.begin(), out.jailed.end());

    // Universe and ranking.
    struct Cand {
        std::uint64_t weight;
        Address addr;
    };
    std::vector<Cand> universe;
    for (const auto& [addr, ms] : s.miner_pool) {
        const bool compliant = ms.num > cfg.mining_threshold;
        if (!compliant || out.jail_set.count(addr)) continue;
        const std::uint64_t w = cfg.ranking == ledger::Ranking::ByTowerHeight ? ms.height : ms.compliant_epochs + 1;
        universe.push_back({w, addr});
    }
    // Selection by repeated maximum, deliberately unlike a library sort.
    while (!universe.empty() && out.proposed.size() < cfg.max_validators) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < universe.size(); ++i) {
            const auto& a = universe[i];
            const auto& b = universe[best];
            if (a.weight > b.weight || (a.weight == b.weight && a.addr < b.addr)) best = i;
        }
        out.proposed.push_back(universe[best].addr);
        universe.erase(universe.begin() + static_cast<std::ptrdiff_t>(best));
    }
    out.skipped = out.proposed.size() < 4;
    out.validator_set = out.skipped ? s.validator_set : out.proposed;

    for (const auto& [addr, ms] : s.miner_pool) {
        std::uint64_t sentence = ms.jail_sentence;
        const bool fresh = std::find(out.jailed.begin(), out.jailed.end(), addr) != out.jailed.end();
        const bool in_vs =
            std::find(out.validator_set.begin(), out.validator_set.end(), addr) != out.validator_set.end();
        if (fresh) {
            sentence = cfg.jail_sentence_epochs;
        } else if (ms.jailed && ms.num > cfg.mining_threshold && !in_vs) {
            sentence -= 1;
            if (sentence == 0) {
                out.jail_set.erase(addr);
                out.released.push_back(addr);
            }
        }
        out.sentences[addr] = sentence;
    }
    return out;
}

/// Random consistent ledger with at most `max_miners` miners.
inline ledger::LedgerState random_ledger(std::mt19937_64& rng, std::size_t max_miners = 20) {
    auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
    ledger::LedgerState s;
    s.epoch = pick(0, 50);
    auto& cfg = s.config;
    cfg.max_validators = pick(4, 12);
    cfg.mining_threshold = pick(1, 6);
    cfg.growth_cap = cfg.mining_threshold + pick(0, 6);
    cfg.jail_sentence_epochs = pick(1, 3);
    static const ledger::Rational thresholds[] = {{0}, {1, 2}, {2, 3}, {9, 10}, {1}};
    cfg.liveliness_threshold = thresholds[pick(0, 4)];
    cfg.ranking = pick(0, 1) ? ledger::Ranking::ByTowerHeight : ledger::Ranking::ByCompliantEpochs;

    const std::size_t m = pick(4, max_miners);
    std::vector<ledger::Address> free_miners;
    for (std::size_t i = 0; i < m; ++i) {
        // Random names so map order and creation order differ.
        ledger::Address a = std::string(1, static_cast<char>('a' + pick(0, 25))) + std::to_string(pick(0, 999));
        if (s.miner_pool.count(a)) continue;
        ledger::MinerState ms;
        ms.height = pick(1, 6);  // narrow range forces ties
        ms.num = pick(0, 1) ? pick(0, cfg.growth_cap) : pick(cfg.mining_threshold, cfg.growth_cap);
        ms.compliant_epochs = pick(0, 4);
        ms.hash[0] = static_cast<std::uint8_t>(pick(0, 255));
        if (pick(0, 4) == 0) {
            ms.jailed = true;
            ms.jail_sentence = pick(1, 3);
            s.jail_set.insert(a);
        } else {
            free_miners.push_back(a);
        }
        s.miner_pool.emplace(a, ms);
    }
    while (free_miners.size() < 4) {
        ledger::Address a = "z" + std::to_string(free_miners.size());
        s.miner_pool.emplace(a, ledger::MinerState{pick(1, 6), {}, pick(0, cfg.growth_cap), false, 0, 0, {}, {}});
        free_miners.push_back(a);
    }
    std::shuffle(free_miners.begin(), free_miners.end(), rng);
    const std::size_t vs_size = pick(4, free_miners.size());
    s.validator_set.assign(free_miners.begin(), free_miners.begin() + static_cast<std::ptrdiff_t>(vs_size));

    s.epoch_blocks_total = pick(0, 3) == 0 ? 0 : pick(1, 20);
    for (const auto& v : s.validator_set) {
        const auto n = pick(0, s.epoch_blocks_total);
        if (n > 0 || pick(0, 1)) s.epoch_signatures[v] = n;
    }
    return s;
}

}  // namespace l4l::testing
