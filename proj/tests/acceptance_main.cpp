// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include "decloak/checkers.hpp"
#include "decloak/gas.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace decloak;
using Clock = std::chrono::steady_clock;

namespace {

bool g_all_pass = true;

void report(int num, const std::string& label, bool pass, const std::string& detail = {}) {
    std::printf("criterion %d (%s): %s%s%s\n", num, label.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " - ", detail.c_str());
    if (!pass) g_all_pass = false;
}

double secs(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

std::string scen(const std::string& name) { return std::string(SCENARIO_DIR) + "/" + name; }

const std::vector<std::string> kApps = {"supply_chain", "scores", "erc20_transfer", "yundou",
                                        "oracle"};

std::string honest_input(const std::string& app, size_t i, size_t n) {
    if (app == "supply_chain") return i == 0 ? "int:500" : "int:" + std::to_string(20 + 3 * i);
    if (app == "scores") return "int:" + std::to_string(60 + 5 * i);
    if (app == "erc20_transfer") return i == 0 ? "erc20:" + std::to_string(n - 1) + ",7" : "";
    if (app == "yundou") return i == 0 ? "vote:y,1,5" : "vote:y";
    return "bytes:" + std::string(2 + 2 * (i % 4), 'a');  // oracle
}

Scenario honest_scenario(const std::string& app, size_t n, uint64_t seed) {
    Scenario sc;
    sc.name = app + "_" + std::to_string(n) + "p";
    sc.seed = seed;
    sc.app = app;
    sc.settlement = "offchain";
    for (size_t i = 0; i < n; ++i) sc.actors.push_back({"party", "honest", honest_input(app, i, n)});
    sc.actors.push_back({"executor", "honest", ""});
    sc.actors.push_back({"executor", "honest", ""});
    return sc;
}

// Accepted transactions of protocol kinds (everything past account setup).
size_t protocol_tx_count(const RunResult& r) {
    size_t count = 0;
    for (const auto& b : r.chain->blocks())
        for (size_t i = 0; i < b.txs.size(); ++i)
            if (b.receipts[i].ok && b.txs[i].kind != TxKind::Register &&
                b.txs[i].kind != TxKind::Deposit)
                ++count;
    return count;
}

bool compliant(const ActorReport& a) {
    return a.behavior != "withhold_input" && a.behavior != "mismatch_input";
}

bool punishable(const std::string& behavior) {
    static const std::set<std::string> bad = {"withhold_input", "mismatch_input", "silent",
                                              "detain_cmt", "drop_com"};
    return bad.count(behavior) > 0;
}

struct Corpus {
    std::vector<RunResult> runs;
};

// --- criterion 6 helper: rebuild outputs from chain data alone ---

struct ChainOutputs {
    std::vector<Address> parties;
    std::vector<Commitment> c_s_next;  // full: TX_cmt body + TX_com key slots
};

std::optional<ChainOutputs> outputs_from_chain(const RunResult& r) {
    std::optional<CmtPayload> cmt;
    std::optional<ComPayload> com;
    for (const auto& b : r.chain->blocks())
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (!b.receipts[i].ok) continue;
            if (b.txs[i].kind == TxKind::Cmt) {
                auto p = CmtPayload::decode(b.txs[i].payload);
                if (p.id_p == r.id_p) cmt = p;
            } else if (b.txs[i].kind == TxKind::Com) {
                auto p = ComPayload::decode(b.txs[i].payload);
                if (p.id_p == r.id_p) com = p;
            }
        }
    if (!cmt || !com) return std::nullopt;
    ChainOutputs out;
    out.parties = cmt->proposal.parties;
    for (size_t i = 0; i < out.parties.size(); ++i) {
        Commitment c = cmt->c_s_next[i];
        c.key_ct = com->key_s_cts[i];
        out.c_s_next.push_back(std::move(c));
    }
    return out;
}

// --- criteria ---

void criterion_1_and_2(Corpus& corpus) {
    bool count_ok = true, time_ok = true, gas_ok = true;
    std::string detail;
    for (const auto& app : kApps)
        for (size_t n : {2u, 3u, 10u, 11u}) {
            auto t0 = Clock::now();
            RunResult r = run_scenario(honest_scenario(app, n, 100 + n));
            double dt = secs(t0, Clock::now());
            if (dt >= 5.0) {
                time_ok = false;
                detail = app + "/" + std::to_string(n) + "p took " + std::to_string(dt) + "s";
            }
            size_t txs = protocol_tx_count(r);
            if (txs != 2 || r.final_sta() != Sta::Completed) {
                count_ok = false;
                detail = app + "/" + std::to_string(n) + "p: " + std::to_string(txs) +
                         " protocol txs, sta=" +
                         (r.final_sta() ? sta_name(*r.final_sta()) : "none");
            }
            auto gas = gas_report(r, GasTable::defaults());
            uint64_t mpt_gas = 0;
            for (const auto& row : gas.rows)
                if (row.op != "register" && row.op != "deposit") mpt_gas += row.total;
            if (mpt_gas != 215138) {
                gas_ok = false;
                detail = app + "/" + std::to_string(n) +
                         "p: protocol gas " + std::to_string(mpt_gas);
            }
            corpus.runs.push_back(std::move(r));
        }
    report(1, "optimistic path files exactly two transactions", count_ok && time_ok, detail);
    report(2, "optimistic per-run gas matches the default table", gas_ok,
           gas_ok ? "" : detail);
}

void criterion_3(Corpus& corpus) {
    const std::vector<std::string> shapes = {
        "withhold_punish.json", "mismatch_punish.json", "late_responder.json",
        "silent_executor.json", "drop_com_rescue.json", "detain_cmt.json",
        "nego_fail.json"};
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 200 && ok; ++i) {
        Scenario sc = Scenario::load(scen(shapes[i % shapes.size()]));
        sc.seed = 1000 + i;
        RunResult r = run_scenario(sc);
        for (const auto& a : r.actors)
            if (compliant(a) && a.behavior != "drop_com" && a.behavior != "silent" &&
                a.behavior != "detain_cmt" &&
                r.contract->balance(a.addr) < r.balance_before.at(a.addr)) {
                ok = false;
                detail = sc.name + "#" + std::to_string(sc.seed) + ": honest " + a.label +
                         " lost coins";
            }
        size_t punished = 0;
        for (const auto& a : r.actors)
            if (r.contract->balance(a.addr) < r.balance_before.at(a.addr)) {
                ++punished;
                if (!punishable(a.behavior)) {
                    ok = false;
                    detail = sc.name + ": punished well-behaved " + a.label;
                }
            }
        if (r.final_sta() == Sta::Aborted && punished == 0) {
            ok = false;
            detail = sc.name + "#" + std::to_string(sc.seed) + ": aborted without punishment";
        }
        corpus.runs.push_back(std::move(r));
    }
    double dt = secs(t0, Clock::now());
    if (dt >= 60.0) {
        ok = false;
        detail = "suite took " + std::to_string(dt) + "s";
    }
    report(3, "misbehavior never costs the honest side", ok, detail);
}

void criterion_4(Corpus& corpus) {
    std::mt19937_64 rng(424242);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 100 && ok; ++i) {
        std::string app = kApps[rng() % kApps.size()];
        size_t n = 2 + rng() % 4;
        Scenario sc = honest_scenario(app, n, rng());
        sc.delta = 1 + rng() % 6;
        sc.block_ticks = 6 + rng() % 9;
        if (rng() % 3 == 0) sc.actors.back().behavior = "drop_com";  // exec1; exec0 stays honest
        RunResult r = run_scenario(sc);

        uint64_t lo = UINT64_MAX, hi = 0;
        size_t learners = 0;
        for (const auto& a : r.actors) {
            if (a.role != "party" || !a.learned_r) continue;
            ++learners;
            lo = std::min(lo, a.learned_tick);
            hi = std::max(hi, a.learned_tick);
        }
        if (r.final_sta() == Sta::Completed) {
            if (learners == 0 || hi - lo > sc.delta) {
                ok = false;
                detail = sc.name + ": learning spread " + std::to_string(hi - lo) +
                         " exceeds delta " + std::to_string(sc.delta);
            }
        } else if (learners != 0) {
            ok = false;
            detail = sc.name + ": " + std::to_string(learners) + " learners without completion";
        }
        corpus.runs.push_back(std::move(r));
    }
    report(4, "outputs arrive within the delivery bound or not at all", ok, detail);
}

void criterion_5(const Corpus& corpus) {
    bool ok = true;
    std::string detail;
    for (const auto& r : corpus.runs) {
        bool completed = r.final_sta() == Sta::Completed;
        const auto* rec = r.contract->proposal(r.id_p);
        for (const auto& a : r.actors) {
            if (a.role != "party" || !a.learned_r) continue;
            if (!completed || rec == nullptr || rec->sta != Sta::Completed) {
                ok = false;
                detail = r.scenario.name + ": " + a.label + " knows an uncommitted output";
            }
        }
        auto atomicity = check_delivery_atomicity(r);
        if (!atomicity.pass) {
            ok = false;
            detail = r.scenario.name + ": " + atomicity.detail;
        }
    }

    // The checker must notice a deliberately injected partial leak.
    bool mutation_ok = false;
    for (const auto& r : corpus.runs) {
        if (r.final_sta() != Sta::Aborted) continue;
        RunResult leaked = r;
        for (auto& a : leaked.actors)
            if (a.role == "party") {
                a.learned_r = encode_i64(1234);
                a.learned_tick = 1;
                break;
            }
        mutation_ok = !check_delivery_atomicity(leaked).pass;
        break;
    }
    if (!mutation_ok) {
        ok = false;
        if (detail.empty()) detail = "injected leak not flagged";
    }
    report(5, "knowing an output implies a confirmed commit", ok, detail);
}

void criterion_6(const Corpus& corpus) {
    bool ok = true;
    bool saw_discarded = false;
    std::string detail;
    for (const auto& r : corpus.runs) {
        if (r.final_sta() != Sta::Completed) continue;
        auto chain_out = outputs_from_chain(r);
        if (!chain_out) {
            ok = false;
            detail = r.scenario.name + ": commit/complete pair missing from chain";
            continue;
        }
        for (const auto& a : r.actors)
            if (a.role == "executor" && (a.behavior == "drop_com" || a.behavior == "silent"))
                saw_discarded = true;

        uint64_t seed = r.scenario.seed;
        Account network = keygen_account(to_bytes("network:" + std::to_string(seed)));
        for (size_t i = 0; i < chain_out->parties.size() && ok; ++i) {
            const ActorReport* a = r.actor_by_addr(chain_out->parties[i]);
            if (a == nullptr || !a->learned_s) {
                ok = false;
                detail = r.scenario.name + ": settled party without a learned state";
                break;
            }
            Account party = keygen_account(to_bytes(a->label + ":" + std::to_string(seed)));
            Bytes ctx = commitment_context(r.id_p, "s'", static_cast<uint32_t>(i));
            Bytes via_party, via_network;
            try {
                via_party = construct_state(party.sk, network.pk, chain_out->c_s_next[i], ctx);
                via_network = construct_state(network.sk, party.pk, chain_out->c_s_next[i], ctx);
            } catch (const std::exception& e) {
                ok = false;
                detail = r.scenario.name + ": reconstruction failed: " + e.what();
                break;
            }
            if (via_party != via_network || via_party != *a->learned_s) {
                ok = false;
                detail = r.scenario.name + ": reconstructed state mismatch for " + a->label;
            }
        }
        if (!ok) break;
    }
    if (ok && !saw_discarded) {
        ok = false;
        detail = "no completed run with a discarded executor in the corpus";
    }
    report(6, "both key paths rebuild the state from chain data", ok, detail);
}

void criterion_7() {
    std::mt19937_64 rng(777);
    bool ok = true;
    std::string detail;
    Account network = keygen_account(to_bytes("oracle-eq-net"));
    for (const auto& name : kApps) {
        const AppTransition* app = AppRegistry::instance().find(name);
        for (int iter = 0; iter < 1000 && ok; ++iter) {
            size_t n = 2 + rng() % 5;
            std::vector<Account> accts;
            std::vector<Address> addrs;
            std::map<Address, PublicKey> pks;
            for (size_t i = 0; i < n; ++i) {
                accts.push_back(keygen_account(
                    to_bytes("oeq:" + std::to_string(iter) + ":" + std::to_string(i))));
                addrs.push_back(accts.back().ad);
                pks[accts.back().ad] = accts.back().pk;
            }
            std::vector<Bytes> s, x, k;
            for (size_t i = 0; i < n; ++i) {
                s.push_back(app->default_state(i, n));
                if (name == "erc20_transfer")
                    x.push_back(appenc::erc20_param(static_cast<int64_t>(rng() % (n + 1)) - 1,
                                                    static_cast<int64_t>(rng() % 200) - 20));
                else if (name == "yundou")
                    x.push_back(appenc::vote_param(rng() % 2 == 0,
                                                   static_cast<int64_t>(rng() % n),
                                                   static_cast<int64_t>(rng() % 50)));
                else if (name == "oracle") {
                    Bytes b(1 + rng() % 16);
                    for (auto& c : b) c = static_cast<uint8_t>(rng());
                    x.push_back(std::move(b));
                } else
                    x.push_back(encode_i64(static_cast<int64_t>(rng() % 2001) - 1000));
                auto kd = sha256(to_bytes("k:" + std::to_string(iter) + ":" + std::to_string(i)));
                k.emplace_back(kd.bytes.begin(), kd.bytes.end());
            }
            Digest id = sha256(to_bytes("oeq-id:" + std::to_string(iter)));
            KeyGen gen(iter);
            auto ev = eval(*app, app->make_policy(static_cast<uint32_t>(n)), id, x, k, {},
                           addrs, gen, network, pks);
            auto direct = app->transition(s, x);
            if (ev.s_next != direct.s_next || ev.r != direct.r) {
                ok = false;
                detail = name + ": iteration " + std::to_string(iter) + " diverged";
            }
        }
    }
    report(7, "enclave evaluation equals the bare transition", ok, detail);
}

void criterion_8() {
    bool ok = true;
    std::string detail;
    auto tmp = std::filesystem::temp_directory_path();
    for (const auto& name :
         {std::string("honest_scores.json"), std::string("withhold_punish.json"),
          std::string("drop_com_rescue.json")}) {
        for (uint64_t seed : {3ull, 91ull}) {
            Scenario sc = Scenario::load(scen(name));
            sc.seed = seed;
            auto p1 = tmp / ("det_a_" + std::to_string(seed) + "_" + name + ".log");
            auto p2 = tmp / ("det_b_" + std::to_string(seed) + "_" + name + ".log");
            run_scenario(sc).trace.save(p1.string());
            run_scenario(sc).trace.save(p2.string());
            std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
            std::string s1((std::istreambuf_iterator<char>(f1)), {});
            std::string s2((std::istreambuf_iterator<char>(f2)), {});
            if (s1.empty() || s1 != s2) {
                ok = false;
                detail = name + " seed " + std::to_string(seed) + ": traces differ";
            }
            std::filesystem::remove(p1);
            std::filesystem::remove(p2);
        }
    }
    report(8, "replays produce byte-identical traces", ok, detail);
}

void criterion_9(const Corpus& corpus) {
    bool ok = true;
    std::string detail;
    for (const auto& r : corpus.runs) {
        auto sta = r.final_sta();
        bool chaT_filed = false;
        for (const auto& b : r.chain->blocks())
            for (const auto& tx : b.txs)
                if (tx.kind == TxKind::ChaT) chaT_filed = true;
        bool terminal = sta == Sta::NegoFailed || sta == Sta::Aborted || sta == Sta::Completed;
        bool quiescent = (!sta || sta == Sta::Proposed) && !chaT_filed;
        if (!(terminal || quiescent)) {
            ok = false;
            detail = r.scenario.name + " ended in " + (sta ? sta_name(*sta) : "no record") +
                     (chaT_filed ? " with a filed challenge" : "");
        }
    }
    report(9, "every run reaches an absorbing status", ok, detail);
}

}  // namespace

int main() {
    Corpus corpus;
    criterion_1_and_2(corpus);
    criterion_3(corpus);
    criterion_4(corpus);
    criterion_5(corpus);
    criterion_6(corpus);
    criterion_7();
    criterion_8();
    criterion_9(corpus);
    std::printf("%s\n", g_all_pass ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED");
    return g_all_pass ? 0 : 1;
}
