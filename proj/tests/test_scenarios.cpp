#include <doctest.h>

#include "decloak/checkers.hpp"
#include "decloak/gas.hpp"

#include <filesystem>
#include <fstream>

using namespace decloak;

namespace {

std::string scenario_path(const std::string& name) {
    return std::string(SCENARIO_DIR) + "/" + name;
}

RunResult run_file(const std::string& name) {
    return run_scenario(Scenario::load(scenario_path(name)));
}

// Actors whose final ledger balance fell below their post-deposit balance.
std::vector<const ActorReport*> losers(const RunResult& r) {
    std::vector<const ActorReport*> out;
    for (const auto& a : r.actors)
        if (r.contract->balance(a.addr) < r.balance_before.at(a.addr)) out.push_back(&a);
    return out;
}

void expect_clean(const RunResult& r, std::optional<Sta> want) {
    CheckReport rep = check_run(r);
    INFO(rep.to_text());
    CHECK(rep.all_pass());
    CHECK(r.final_sta() == want);
}

}  // namespace

TEST_CASE("all-honest run completes with two protocol transactions") {
    auto r = run_file("honest_scores.json");
    expect_clean(r, Sta::Completed);

    size_t protocol_txs = 0;
    for (const auto& b : r.chain->blocks())
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (!b.receipts[i].ok) continue;
            if (b.txs[i].kind != TxKind::Register && b.txs[i].kind != TxKind::Deposit)
                ++protocol_txs;
        }
    CHECK(protocol_txs == 2);

    auto gas = gas_report(r, GasTable::defaults());
    uint64_t protocol_gas = 0;
    for (const auto& row : gas.rows)
        if (row.op == "commit" || row.op == "complete") protocol_gas += row.total;
    CHECK(protocol_gas == 215138);
}

TEST_CASE("withheld input leads to on-chain punishment") {
    auto r = run_file("withhold_punish.json");
    expect_clean(r, Sta::Aborted);
    auto lost = losers(r);
    REQUIRE(lost.size() == 1);
    CHECK(lost[0]->behavior == "withhold_input");
}

TEST_CASE("mismatched input is detected and punished") {
    auto r = run_file("mismatch_punish.json");
    expect_clean(r, Sta::Aborted);
    auto lost = losers(r);
    REQUIRE(lost.size() == 1);
    CHECK(lost[0]->behavior == "mismatch_input");
}

TEST_CASE("a late responder answers the challenge and the run resumes") {
    auto r = run_file("late_responder.json");
    expect_clean(r, Sta::Completed);
    CHECK(losers(r).empty());  // answering in time costs nothing
}

TEST_CASE("declined negotiation fails on-chain without touching deposits") {
    auto r = run_file("nego_fail.json");
    expect_clean(r, Sta::NegoFailed);
    for (const auto& [addr, before] : r.balance_before)
        CHECK(r.contract->balance(addr) == before);
}

TEST_CASE("a silent executor is punished after the completion window") {
    auto r = run_file("silent_executor.json");
    expect_clean(r, Sta::Aborted);
    auto lost = losers(r);
    REQUIRE(lost.size() == 1);
    CHECK(lost[0]->behavior == "silent");
}

TEST_CASE("a detained commit is punished after the completion window") {
    auto r = run_file("detain_cmt.json");
    expect_clean(r, Sta::Aborted);
    auto lost = losers(r);
    REQUIRE(lost.size() == 1);
    CHECK(lost[0]->behavior == "detain_cmt");
}

TEST_CASE("a second executor rescues a dropped key release") {
    auto r = run_file("drop_com_rescue.json");
    expect_clean(r, Sta::Completed);
    for (const auto& a : r.actors)
        if (a.role == "party") CHECK(a.learned_s.has_value());
}

TEST_CASE("on-chain acknowledgements settle the proposal") {
    auto r = run_file("onchain_acks.json");
    expect_clean(r, Sta::Completed);
    CHECK(r.settled_parties.size() == r.scenario.actors.size() - 1);
}

TEST_CASE("replaying a scenario reproduces the trace byte for byte") {
    Scenario sc = Scenario::load(scenario_path("honest_scores.json"));
    auto a = run_scenario(sc);
    auto b = run_scenario(sc);
    CHECK(traces_equal(a.trace, b.trace));
    CHECK(a.trace.serialize() == b.trace.serialize());

    sc.seed += 1;  // a different seed is a different world
    auto c = run_scenario(sc);
    CHECK(!traces_equal(a.trace, c.trace));
}

TEST_CASE("trace files round-trip through disk") {
    auto r = run_file("honest_scores.json");
    auto path = std::filesystem::temp_directory_path() / "decloak_trace_test.log";
    r.trace.save(path.string());
    Trace back = Trace::load(path.string());
    CHECK(traces_equal(r.trace, back));
    std::filesystem::remove(path);
}

TEST_CASE("gas table file parsing") {
    GasTable t = GasTable::load(scenario_path("gas.txt"));
    CHECK(t.entries == GasTable::defaults().entries);

    auto path = std::filesystem::temp_directory_path() / "decloak_gas_test.txt";
    {
        std::ofstream f(path);
        f << "# override one op\ncommit=999\n";
    }
    GasTable o = GasTable::load(path.string());
    CHECK(o.cost("commit") == 999);
    CHECK(o.cost("complete") == GasTable::defaults().cost("complete"));
    {
        std::ofstream f(path);
        f << "no_such_op=5\n";
    }
    CHECK_THROWS(GasTable::load(path.string()));
    std::filesystem::remove(path);
}

TEST_CASE("scenario json round-trips") {
    Scenario sc = Scenario::load(scenario_path("withhold_punish.json"));
    Scenario back = Scenario::from_json(sc.to_json());
    CHECK(back.name == sc.name);
    CHECK(back.seed == sc.seed);
    CHECK(back.actors.size() == sc.actors.size());
    for (size_t i = 0; i < sc.actors.size(); ++i) {
        CHECK(back.actors[i].role == sc.actors[i].role);
        CHECK(back.actors[i].behavior == sc.actors[i].behavior);
        CHECK(back.actors[i].input == sc.actors[i].input);
    }
    CHECK(back.settlement == sc.settlement);
}

TEST_CASE("the atomicity checker notices an injected partial leak") {
    auto r = run_file("withhold_punish.json");  // aborted: nobody may learn
    REQUIRE(check_delivery_atomicity(r).pass);
    for (auto& a : r.actors)
        if (a.role == "party") {
            a.learned_r = encode_i64(42);  // forge a leak
            a.learned_tick = 1;
            break;
        }
    CHECK(!check_delivery_atomicity(r).pass);

    auto ok = run_file("honest_scores.json");  // completed: all or nothing
    REQUIRE(check_delivery_atomicity(ok).pass);
    for (auto& a : ok.actors)
        if (a.role == "party" && a.learned_r) {
            a.learned_r.reset();
            a.learned_s.reset();
            break;
        }
    CHECK(!check_delivery_atomicity(ok).pass);
}
