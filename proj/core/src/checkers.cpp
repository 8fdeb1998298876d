#include "decloak/checkers.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace decloak {

bool CheckReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string CheckReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  " << c.detail << "\n";
    os << (all_pass() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    return os.str();
}

// Parties that follow the delivery protocol to the end (possibly via the
// on-chain response path); only these are owed outputs.
static bool compliant_party(const std::string& behavior) {
    return behavior != "withhold_input" && behavior != "mismatch_input";
}

static bool is_settled(const RunResult& r, const Address& a) {
    return std::find(r.settled_parties.begin(), r.settled_parties.end(), a) !=
           r.settled_parties.end();
}

CheckResult check_correctness(const RunResult& r) {
    CheckResult res{"correctness", true, "run did not complete; nothing to verify"};
    auto sta = r.final_sta();
    if (!sta || *sta != Sta::Completed) return res;

    const AppTransition* app = AppRegistry::instance().find(r.scenario.app);
    if (!app) return {"correctness", false, "unknown app " + r.scenario.app};
    const size_t n = r.settled_parties.size();
    if (n == 0) return {"correctness", false, "completed run with no settled parties"};

    std::vector<Bytes> s, x;
    for (size_t i = 0; i < n; ++i) {
        const ActorReport* a = r.actor_by_addr(r.settled_parties[i]);
        if (!a || !a->x) return {"correctness", false, "settled party without a known input"};
        x.push_back(*a->x);
        s.push_back(app->default_state(i, n));
    }
    AppResult expected = app->transition(s, x);

    size_t verified = 0;
    for (size_t i = 0; i < n; ++i) {
        const ActorReport* a = r.actor_by_addr(r.settled_parties[i]);
        if (!compliant_party(a->behavior)) continue;
        if (!a->learned_r) return {"correctness", false, a->label + " never learned its output"};
        if (*a->learned_r != expected.r[i])
            return {"correctness", false, a->label + " learned a wrong return value"};
        if (!a->learned_s || *a->learned_s != expected.s_next[i])
            return {"correctness", false, a->label + " learned a wrong next state"};
        ++verified;
    }

    const auto* out = r.contract->completed_output(r.id_p);
    if (!out) return {"correctness", false, "completed proposal without stored outputs"};
    if (r.contract->current_h_cs(r.scenario.app) != hash_commitment_array(out->c_s_next))
        return {"correctness", false, "state registry digest does not match stored commitments"};

    return {"correctness",
            true,
            "verified " + std::to_string(verified) + "/" + std::to_string(n) + " outputs"};
}

CheckResult check_financial_fairness(const RunResult& r) {
    auto sta = r.final_sta();
    bool aborted = sta && *sta == Sta::Aborted;
    static const std::set<std::string> punishable = {"withhold_input", "mismatch_input", "silent",
                                                    "detain_cmt", "drop_com"};
    uint64_t total_lost = 0;
    for (const auto& a : r.actors) {
        uint64_t before = r.balance_before.at(a.addr);
        uint64_t after = r.contract->balance(a.addr);
        if (after >= before) continue;
        if (!punishable.count(a.behavior))
            return {"financial_fairness", false,
                    a.label + " (" + a.behavior + ") lost " + std::to_string(before - after)};
        total_lost += before - after;
    }
    if (aborted && total_lost == 0)
        return {"financial_fairness", false, "aborted run punished nobody"};
    return {"financial_fairness", true,
            aborted ? "abort punished the misbehaving actors only" : "no honest balance decreased"};
}

CheckResult check_delivery_fairness(const RunResult& r) {
    std::vector<uint64_t> ticks;
    for (const auto& a : r.actors)
        if (a.role == "party" && compliant_party(a.behavior) && is_settled(r, a.addr) &&
            a.learned_r)
            ticks.push_back(a.learned_tick);
    if (ticks.size() < 2) return {"delivery_fairness", true, "fewer than two learners"};
    auto [lo, hi] = std::minmax_element(ticks.begin(), ticks.end());
    uint64_t spread = *hi - *lo;
    if (spread > r.scenario.delta)
        return {"delivery_fairness", false,
                "learning spread " + std::to_string(spread) + " ticks exceeds delta"};
    return {"delivery_fairness", true, "spread " + std::to_string(spread) + " ticks"};
}

CheckResult check_delivery_atomicity(const RunResult& r) {
    size_t owed = 0, got = 0;
    for (const auto& a : r.actors) {
        if (a.role != "party" || !compliant_party(a.behavior) || !is_settled(r, a.addr)) continue;
        ++owed;
        if (a.learned_r) ++got;
    }
    if (got != 0 && got != owed)
        return {"delivery_atomicity", false,
                std::to_string(got) + "/" + std::to_string(owed) + " compliant parties learned"};
    return {"delivery_atomicity", true,
            got ? "all compliant parties learned" : "no party learned (atomic abort)"};
}

CheckResult check_data_availability(const RunResult& r) {
    auto sta = r.final_sta();
    if (!sta || *sta != Sta::Completed)
        return {"data_availability", true, "run did not complete; nothing to reconstruct"};
    const auto* out = r.contract->completed_output(r.id_p);
    if (!out) return {"data_availability", false, "no stored outputs for completed proposal"};
    for (size_t i = 0; i < out->parties.size(); ++i) {
        if (!out->c_s_next[i].key_ct || !out->c_r[i].key_ct)
            return {"data_availability", false, "stored commitment missing its key slot"};
        const ActorReport* a = r.actor_by_addr(out->parties[i]);
        if (!a || !compliant_party(a->behavior)) continue;
        if (!a->learned_s || !a->learned_r)
            return {"data_availability", false,
                    a->label + " could not reconstruct from chain data"};
    }
    return {"data_availability", true, "all outputs reconstructible from chain data"};
}

CheckResult check_termination(const RunResult& r) {
    auto sta = r.final_sta();
    if (!sta)
        return {"termination", true, "no on-chain proposal; run ended quiescent"};
    if (*sta == Sta::Proposed)
        return {"termination", false, "proposal still pending at end of run"};
    return {"termination", true, std::string("final status ") + sta_name(*sta)};
}

CheckReport check_run(const RunResult& r) {
    CheckReport rep;
    rep.checks.push_back(check_correctness(r));
    rep.checks.push_back(check_financial_fairness(r));
    rep.checks.push_back(check_delivery_fairness(r));
    rep.checks.push_back(check_delivery_atomicity(r));
    rep.checks.push_back(check_data_availability(r));
    rep.checks.push_back(check_termination(r));
    return rep;
}

bool traces_equal(const Trace& a, const Trace& b) { return a.serialize() == b.serialize(); }

}  // namespace decloak
