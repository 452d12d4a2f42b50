#include "l4l/sim.hpp"

#include "l4l/error.hpp"
#include "l4l/tower.hpp"

#include <algorithm>
#include <set>

namespace l4l::sim {

namespace {

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidScenario, why); }

bool draw_below(std::uint64_t draw, const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    // draw / 2^64 < num / den
    using u128 = unsigned __int128;
    return static_cast<u128>(draw) * static_cast<u128>(p.denominator()) <
           (static_cast<u128>(p.numerator()) << 64);
}

struct RealMiner {
    Bytes key;
    tower::Tower tower;
};

class Simulation {
public:
    Simulation(const Scenario& scenario, const Observer& observer)
        : sc_(scenario), observer_(observer) {
        for (const auto& p : sc_.population) by_address_.emplace(p.address, &p);
        ledger::EpochConfig cfg = sc_.epoch_config;
        cfg.rounds_per_epoch = sc_.rounds_per_epoch;
        state_ = ledger::make_genesis(cfg, sc_.security);
    }

    SimMetrics run() {
        SimMetrics metrics;
        metrics.scenario = sc_.name;
        metrics.seed = sc_.seed;
        metrics.rounds_per_epoch = sc_.rounds_per_epoch;
        for (std::uint64_t e = 0; e < sc_.epochs; ++e) {
            admit(e);
            if (e == 0) ledger::install_genesis_validators(state_, sc_.genesis_validators);
            notify(Phase::EpochStart, e);

            EpochMetrics em;
            em.epoch = e;
            em.validator_set = state_.validator_set;
            em.nakamoto_liveness = nakamoto_liveness(state_.validator_set.size());
            play_rounds(e, em);
            if (state_.epoch_blocks_total > 0) {
                for (const auto& v : state_.validator_set) em.liveliness.emplace(v, ledger::liveliness(state_, v));
            }

            mine(e);
            notify(Phase::BeforeReconfiguration, e);
            auto summary = reconfig::advance_epoch(state_);
            em.jailed = std::move(summary.jailed);
            em.released = std::move(summary.released);
            em.reconfiguration_skipped = summary.reconfiguration_skipped;

            metrics.total_committed += em.committed_blocks;
            metrics.total_timeouts += em.timeouts;
            metrics.epochs.push_back(std::move(em));
        }
        return metrics;
    }

private:
    void notify(Phase phase, std::uint64_t epoch) {
        if (observer_) observer_(phase, epoch, state_);
    }

    void admit(std::uint64_t epoch) {
        for (const auto& p : sc_.population) {
            if (p.join_epoch != epoch) continue;
            Bytes key(p.address.begin(), p.address.end());
            key.insert(key.begin(), {'k', 'e', 'y', ':'});
            std::string ep = p.address + ":6180";
            Bytes endpoint(ep.begin(), ep.end());
            if (p.mining.real_vdf) {
                RealMiner rm{key, tower::init_tower(sc_.security, key, endpoint, epoch)};
                ledger::Registration reg{p.address, key, endpoint, rm.tower.records.front(), {}};
                reg.signature = KeyedHashScheme::sign(key, ledger::registration_message(reg));
                ledger::register_miner(state_, reg, verifier_);
                real_.emplace(p.address, std::move(rm));
            } else {
                ledger::admit_genesis_miner(state_, {p.address, key, endpoint, p.initial_height, {}});
            }
        }
    }

    bool active(const Participant& p, std::uint64_t epoch, std::uint64_t round) const {
        if (std::holds_alternative<Honest>(p.behavior)) return true;
        if (const auto* c = std::get_if<Crashed>(&p.behavior)) return round < c->from_round;
        const auto& s = std::get<Silent>(p.behavior);
        return draw_below(keyed_draw(sc_.seed, epoch, round, p.address), s.sign_probability);
    }

    void play_rounds(std::uint64_t epoch, EpochMetrics& em) {
        const auto vs = state_.validator_set;
        for (std::uint64_t r = 0; r < sc_.rounds_per_epoch; ++r) {
            const std::uint64_t round = epoch * sc_.rounds_per_epoch + r;
            const Address& leader = vs[round % vs.size()];
            if (!active(*by_address_.at(leader), epoch, round)) {
                ++em.timeouts;
                continue;
            }
            std::set<Address> signers;
            for (const auto& v : vs) {
                if (active(*by_address_.at(v), epoch, round)) signers.insert(v);
            }
            if (ledger::record_block(state_, signers)) {
                ++em.committed_blocks;
            } else {
                ++em.timeouts;
            }
        }
    }

    void mine(std::uint64_t epoch) {
        const std::uint64_t epoch_end = (epoch + 1) * sc_.rounds_per_epoch;
        for (const auto& p : sc_.population) {
            if (p.join_epoch > epoch) continue;
            if (const auto* c = std::get_if<Crashed>(&p.behavior); c && c->from_round < epoch_end) continue;
            if (p.mining.real_vdf) {
                auto& rm = real_.at(p.address);
                for (std::uint64_t i = 0; i < p.mining.rate; ++i) {
                    rm.tower = tower::extend(std::move(rm.tower), epoch);
                    auto sub = ledger::make_submission(p.address, rm.tower, rm.key);
                    if (!ledger::submit_proof(state_, sub, verifier_)) {
                        throw std::logic_error("simulator: honest proof rejected for " + p.address);
                    }
                }
            } else {
                auto& ms = state_.miner_pool.at(p.address);
                ms.height += p.mining.rate;
                ms.num = std::min(ms.num + p.mining.rate, state_.config.growth_cap);
            }
        }
    }

    const Scenario& sc_;
    const Observer& observer_;
    std::map<Address, const Participant*> by_address_;
    std::map<Address, RealMiner> real_;
    ledger::LedgerState state_;
    KeyedHashScheme verifier_;
};

}  // namespace

void Scenario::validate() const {
    if (epochs < 1) invalid("epochs must be >= 1");
    if (rounds_per_epoch < 1) invalid("rounds_per_epoch must be >= 1");
    try {
        epoch_config.validate();
        security.validate();
    } catch (const Error& e) {
        invalid(e.what());
    }
    std::set<Address> addresses;
    for (const auto& p : population) {
        if (p.address.empty()) invalid("participant address must be non-empty");
        if (!addresses.insert(p.address).second) invalid("duplicate participant '" + p.address + "'");
        if (const auto* s = std::get_if<Silent>(&p.behavior);
            s && (s->sign_probability < 0 || s->sign_probability > 1)) {
            invalid("sign_probability for '" + p.address + "' must lie in [0, 1]");
        }
        if (p.join_epoch >= epochs) invalid("'" + p.address + "' joins after the last epoch");
    }
    if (genesis_validators.size() < 4) invalid("genesis_validators needs at least 4 members");
    std::set<Address> genesis;
    for (const auto& v : genesis_validators) {
        if (!genesis.insert(v).second) invalid("duplicate genesis validator '" + v + "'");
        auto it = std::find_if(population.begin(), population.end(), [&](const auto& p) { return p.address == v; });
        if (it == population.end()) invalid("genesis validator '" + v + "' is not in the population");
        if (it->join_epoch != 0) invalid("genesis validator '" + v + "' must join at epoch 0");
    }
}

SimMetrics run(const Scenario& scenario, const Observer& observer) {
    scenario.validate();
    return Simulation(scenario, observer).run();
}

std::uint64_t nakamoto_liveness(std::uint64_t n) { return n == 0 ? 0 : (n - 1) / 3; }

std::optional<std::uint64_t> recovery_time(const SimMetrics& metrics) {
    const auto& e = metrics.epochs;
    std::size_t onset = 0;
    while (onset < e.size() && e[onset].timeouts == 0) ++onset;
    if (onset == e.size()) return 0;
    for (std::size_t i = onset + 1; i < e.size(); ++i) {
        if (e[i].timeouts == 0) return i - onset;
    }
    return std::nullopt;
}

std::uint64_t keyed_draw(std::uint64_t seed, std::uint64_t epoch, std::uint64_t round, const Address& address) {
    Digest d = Sha256("l4l/sim/draw/v1")
                   .update_u64(seed)
                   .update_u64(epoch)
                   .update_u64(round)
                   .update_prefixed(as_bytes(address))
                   .finish();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return v;
}

}  // namespace l4l::sim
