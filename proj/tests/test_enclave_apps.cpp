#include <doctest.h>

#include "decloak/contract.hpp"
#include "decloak/enclave.hpp"

#include <memory>
#include <random>

using namespace decloak;

namespace {

Account mkacct(const std::string& seed) { return keygen_account(to_bytes(seed)); }

std::vector<Bytes> ints(std::initializer_list<int64_t> vs) {
    std::vector<Bytes> out;
    for (auto v : vs) out.push_back(encode_i64(v));
    return out;
}

std::vector<int64_t> as_ints(const std::vector<Bytes>& bs) {
    std::vector<int64_t> out;
    for (const auto& b : bs) out.push_back(decode_i64(b));
    return out;
}

const AppTransition& app(const std::string& name) {
    const AppTransition* a = AppRegistry::instance().find(name);
    REQUIRE(a != nullptr);
    return *a;
}

}  // namespace

TEST_CASE("supply chain: lowest bid wins, ties break to the earliest bidder") {
    auto& a = app("supply_chain");
    std::vector<Bytes> s = {encode_i64(100), encode_i64(100), encode_i64(100), encode_i64(100)};
    auto res = a.transition(s, ints({50, 40, 25, 25}));  // x[0] is the buyer's reserve
    CHECK(as_ints(res.r) == std::vector<int64_t>{0, 0, 1, 0});
    CHECK(as_ints(res.s_next) == std::vector<int64_t>{75, 100, 125, 100});
    // total balance is conserved
    int64_t before = 400, after = 0;
    for (auto v : as_ints(res.s_next)) after += v;
    CHECK(before == after);
}

TEST_CASE("scores: floor of the mean, negatives included") {
    auto& a = app("scores");
    std::vector<Bytes> s = {encode_i64(0), encode_i64(0), encode_i64(0)};
    auto res = a.transition(s, ints({1, 2, 4}));
    CHECK(as_ints(res.r) == std::vector<int64_t>{2, 2, 2});
    res = a.transition(s, ints({-1, -1, -1}));
    CHECK(as_ints(res.r) == std::vector<int64_t>{-1, -1, -1});
    res = a.transition(s, ints({-1, 0, 0}));
    CHECK(as_ints(res.r) == std::vector<int64_t>{-1, -1, -1});  // floor, not truncation
}

TEST_CASE("erc20 transfer variants") {
    std::vector<Bytes> s = {encode_i64(100), encode_i64(100)};
    SUBCASE("simple transfer moves funds and flags success") {
        auto res = app("erc20_transfer").transition(s, {appenc::erc20_param(1, 30), Bytes{}});
        CHECK(as_ints(res.s_next) == std::vector<int64_t>{70, 130});
        CHECK(decode_i64(res.r[0]) == 1);
    }
    SUBCASE("insufficient funds refuse the transfer") {
        auto res = app("erc20_transfer").transition(s, {appenc::erc20_param(1, 500), Bytes{}});
        CHECK(as_ints(res.s_next) == std::vector<int64_t>{100, 100});
        CHECK(decode_i64(res.r[0]) == 0);
    }
    SUBCASE("self-transfer is a flagged no-op") {
        auto res = app("erc20_transfer").transition(s, {appenc::erc20_param(0, 10), Bytes{}});
        CHECK(as_ints(res.s_next) == std::vector<int64_t>{100, 100});
        CHECK(decode_i64(res.r[0]) == 1);
    }
    SUBCASE("approve executes only on a matching counterpart") {
        auto res = app("erc20_approve")
                       .transition(s, {appenc::erc20_param(1, 30), appenc::erc20_param(0, 30)});
        CHECK(as_ints(res.s_next) == std::vector<int64_t>{70, 130});
        res = app("erc20_approve")
                  .transition(s, {appenc::erc20_param(1, 30), appenc::erc20_param(0, 31)});
        CHECK(as_ints(res.s_next) == std::vector<int64_t>{100, 100});
    }
    SUBCASE("batch applies every instruction in party order") {
        auto res = app("erc20_batch")
                       .transition(s, {appenc::erc20_param(1, 30), appenc::erc20_param(0, 130)});
        CHECK(as_ints(res.s_next) == std::vector<int64_t>{200, 0});
    }
}

TEST_CASE("majority-gated transfer needs a strict majority") {
    auto& a = app("yundou");
    std::vector<Bytes> s = {encode_i64(100), encode_i64(100), encode_i64(100), encode_i64(100)};
    std::vector<Bytes> x = {appenc::vote_param(true, 1, 20), appenc::vote_param(true, 0, 0),
                            appenc::vote_param(false, 0, 0), appenc::vote_param(false, 0, 0)};
    auto res = a.transition(s, x);  // 2/4: not a strict majority
    CHECK(as_ints(res.s_next) == std::vector<int64_t>{100, 100, 100, 100});
    x[2] = appenc::vote_param(true, 0, 0);  // 3/4
    res = a.transition(s, x);
    CHECK(as_ints(res.s_next) == std::vector<int64_t>{80, 120, 100, 100});
    CHECK(decode_i64(res.r[2]) == 1);
}

TEST_CASE("oracle output is shared, deterministic, and avalanche-sensitive") {
    auto& a = app("oracle");
    std::vector<Bytes> s = {encode_i64(0), encode_i64(0), encode_i64(0)};
    std::vector<Bytes> x = {to_bytes("aa"), to_bytes("bb"), to_bytes("cc")};
    auto r1 = a.transition(s, x);
    auto r2 = a.transition(s, x);
    CHECK(r1.r == r2.r);
    CHECK(r1.r[0] == r1.r[1]);
    CHECK(r1.r[1] == r1.r[2]);
    std::mt19937_64 rng(99);
    int changed = 0;
    for (int i = 0; i < 100; ++i) {
        auto x2 = x;
        size_t who = rng() % 3;
        size_t bit = rng() % (x2[who].size() * 8);
        x2[who][bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        if (a.transition(s, x2).r[0] != r1.r[0]) ++changed;
    }
    CHECK(changed == 100);
}

// ---- the evaluation core ----

namespace {

struct EvalRig {
    Account network = mkacct("ev-net");
    std::vector<Account> parties;
    std::vector<Address> addrs;
    std::map<Address, PublicKey> pks;
    Digest id_p = sha256(to_bytes("ev-proposal"));

    explicit EvalRig(size_t n) {
        for (size_t i = 0; i < n; ++i) {
            parties.push_back(mkacct("ev-p" + std::to_string(i)));
            addrs.push_back(parties.back().ad);
            pks[parties.back().ad] = parties.back().pk;
        }
    }

    std::vector<Bytes> keys(size_t n, uint8_t tag) const {
        std::vector<Bytes> out;
        for (size_t i = 0; i < n; ++i) {
            auto d = sha256(Bytes{tag, static_cast<uint8_t>(i)});
            out.emplace_back(d.bytes.begin(), d.bytes.end());
        }
        return out;
    }
};

}  // namespace

TEST_CASE("evaluation reproduces the bare transition and commits it consistently") {
    EvalRig rig(3);
    auto& a = app("scores");
    Policy pol = a.make_policy(3);
    auto x = ints({5, 7, 9});
    KeyGen gen(123);
    auto out = eval(a, pol, rig.id_p, x, rig.keys(3, 1), {}, rig.addrs, gen, rig.network, rig.pks);

    auto expected = a.transition({a.default_state(0, 3), a.default_state(1, 3),
                                  a.default_state(2, 3)},
                                 x);
    CHECK(out.s_next == expected.s_next);
    CHECK(out.r == expected.r);
    CHECK(out.proof.old_digest == hash_commitment_array({}));
    CHECK(out.proof.new_digest == hash_commitment_array(out.c_s_next));

    // each party can open its own slots; the network can open all of them
    for (uint32_t i = 0; i < 3; ++i) {
        Bytes ctx_s = commitment_context(rig.id_p, "s'", i);
        Bytes ctx_r = commitment_context(rig.id_p, "r", i);
        CHECK(open_commitment(rig.parties[i].sk, rig.network.pk, out.c_s_next[i], ctx_s) ==
              out.s_next[i]);
        CHECK(open_commitment(rig.network.sk, rig.parties[i].pk, out.c_r[i], ctx_r) == out.r[i]);
        if (i > 0)
            CHECK_THROWS(open_commitment(rig.parties[i].sk, rig.network.pk, out.c_s_next[0],
                                         commitment_context(rig.id_p, "s'", 0)));
    }
}

TEST_CASE("evaluation chains through a second round via stored commitments") {
    EvalRig rig(2);
    auto& a = app("erc20_transfer");
    Policy pol = a.make_policy(2);
    KeyGen gen(5);
    std::vector<Bytes> x1 = {appenc::erc20_param(1, 25), Bytes{}};
    auto out1 =
        eval(a, pol, rig.id_p, x1, rig.keys(2, 2), {}, rig.addrs, gen, rig.network, rig.pks);
    CHECK(as_ints(out1.s_next) == std::vector<int64_t>{75, 125});

    std::vector<StoredCommitment> stored;
    for (uint32_t i = 0; i < 2; ++i)
        stored.push_back({out1.c_s_next[i], commitment_context(rig.id_p, "s'", i)});
    Digest id2 = sha256(to_bytes("ev-proposal-2"));
    std::vector<Bytes> x2 = {appenc::erc20_param(1, 5), Bytes{}};
    auto out2 = eval(a, pol, id2, x2, rig.keys(2, 3), stored, rig.addrs, gen, rig.network, rig.pks);
    CHECK(as_ints(out2.s) == std::vector<int64_t>{75, 125});
    CHECK(as_ints(out2.s_next) == std::vector<int64_t>{70, 130});
    CHECK(out2.proof.old_digest == hash_commitment_array(out1.c_s_next));

    SUBCASE("a swapped owner is pinned to its index") {
        std::swap(stored[0], stored[1]);
        try {
            eval(a, pol, id2, x2, rig.keys(2, 3), stored, rig.addrs, gen, rig.network, rig.pks);
            FAIL("owner mismatch not detected");
        } catch (const EvalError& e) {
            CHECK(e.index == 0);
        }
    }
}

TEST_CASE("identically-shaped inputs yield identically-shaped payloads") {
    // Public material exposes sizes only: two evaluations over different
    // plaintexts of equal width must be indistinguishable by shape.
    EvalRig rig(2);
    auto& a = app("scores");
    Policy pol = a.make_policy(2);
    KeyGen g1(9), g2(9);
    auto o1 = eval(a, pol, rig.id_p, ints({10, 20}), rig.keys(2, 4), {}, rig.addrs, g1,
                   rig.network, rig.pks);
    auto o2 = eval(a, pol, rig.id_p, ints({99, -3}), rig.keys(2, 4), {}, rig.addrs, g2,
                   rig.network, rig.pks);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(o1.c_s_next[i].data_ct.size() == o2.c_s_next[i].data_ct.size());
        CHECK(o1.c_r[i].data_ct.size() == o2.c_r[i].data_ct.size());
        CHECK(o1.c_x[i].data_ct.size() == o2.c_x[i].data_ct.size());
        CHECK(o1.c_r[i].data_ct != o2.c_r[i].data_ct);
        CHECK(o1.c_x[i].data_ct != o2.c_x[i].data_ct);
    }
}

// ---- the enclave protocol machine ----

namespace {

struct EncRig {
    Account miner = mkacct("en-miner");
    Account network = mkacct("en-net");
    Account exec = mkacct("en-exec");
    std::vector<Account> parties;
    Chain chain{4, miner};
    std::unique_ptr<Contract> contract;
    std::unique_ptr<Enclave> enclave;
    ProposalBody body;
    Digest id;

    EncRig() {
        for (int i = 0; i < 2; ++i) parties.push_back(mkacct("en-p" + std::to_string(i)));
        ContractConfig cc;
        cc.tee_list = {exec.ad};
        cc.network_pk = network.pk;
        cc.treasury = network.ad;
        contract = std::make_unique<Contract>(cc);
        chain.set_hook(contract.get());

        EnclaveConfig ec;
        ec.network = network;
        ec.self_executor = exec.ad;
        ec.tee_list = {exec.ad};
        ec.checkpoint = {chain.genesis().digest(), 0};
        ec.miner_pk = miner.pk;
        ec.finality_depth = 4;
        ec.keygen_seed = 1;
        enclave = std::make_unique<Enclave>(std::move(ec));

        for (const auto& p : parties) {
            chain.submit_tx(make_tx(p, TxKind::Register, RegisterPayload{p.pk}.encode()), 0);
            chain.submit_tx(make_tx(p, TxKind::Deposit, DepositPayload{100}.encode()), 0);
        }
        chain.submit_tx(make_tx(exec, TxKind::Register, RegisterPayload{exec.pk}.encode()), 0);
        chain.submit_tx(make_tx(exec, TxKind::Deposit, DepositPayload{100}.encode()), 0);
        chain.mine_block();
        sync();

        const AppTransition* a = AppRegistry::instance().find("scores");
        body.app = "scores";
        body.policy = a->make_policy(2);
        body.q = 50;
        body.h_neg = 30;
        body.tau_com = 20;
        id = body.id();
    }

    void sync() {
        std::vector<Block> slice(chain.blocks().begin() + 1, chain.blocks().end());
        enclave->sync(slice);
    }

    PoP slice_pop() {
        PoP p;
        p.blocks.assign(chain.blocks().begin() + 1, chain.blocks().end());
        return p;
    }

    std::vector<Ack> all_acks() {
        std::vector<Ack> out;
        for (const auto& p : parties) out.push_back(Ack::make(p, id, true));
        return out;
    }

    InputSubmission input(size_t i, int64_t v) {
        Bytes k(32, static_cast<uint8_t>(0x10 + i));
        return InputSubmission::make(parties[i], id, encode_i64(v), k);
    }
};

}  // namespace

TEST_CASE("negotiation: conformance, collateral, idempotence") {
    EncRig r;
    auto sp = r.enclave->generate_idp(r.body);
    CHECK(sp.id_p == r.id);
    CHECK(verify_sig(r.network.pk, sp.signing_bytes(), sp.sig));

    SUBCASE("too few acceptances do not conform") {
        std::vector<Ack> one = {Ack::make(r.parties[0], r.id, true)};
        CHECK(!r.enclave->conform(one, r.body.policy));
        CHECK_THROWS_AS(r.enclave->negotiate(r.id, one), EnclaveAbort);
    }
    SUBCASE("a declined acknowledgement does not count") {
        std::vector<Ack> acks = {Ack::make(r.parties[0], r.id, true),
                                 Ack::make(r.parties[1], r.id, false)};
        CHECK(!r.enclave->conform(acks, r.body.policy));
    }
    SUBCASE("a forged acknowledgement is ignored") {
        auto acks = r.all_acks();
        acks[1].sig = sign(r.parties[0].sk, acks[1].signing_bytes());
        CHECK(!r.enclave->conform(acks, r.body.policy));
    }
    SUBCASE("duplicate acknowledgements count once") {
        std::vector<Ack> acks = {Ack::make(r.parties[0], r.id, true),
                                 Ack::make(r.parties[0], r.id, true)};
        CHECK(!r.enclave->conform(acks, r.body.policy));
    }
    SUBCASE("successful settlement is idempotent and binds arrival order") {
        auto s1 = r.enclave->negotiate(r.id, r.all_acks());
        auto s2 = r.enclave->negotiate(r.id, {});
        CHECK(s1.p2 == s2.p2);
        CHECK(s1.p2.parties == std::vector<Address>{r.parties[0].ad, r.parties[1].ad});
        CHECK(r.enclave->status() == EnclaveStatus::Negotiated);
    }
    SUBCASE("insufficient cached collateral rejects settlement") {
        ProposalBody rich = r.body;
        rich.q = 1000;  // more than anyone deposited
        EncRig r2;
        r2.enclave->generate_idp(rich);
        std::vector<Ack> acks;
        for (const auto& p : r2.parties) acks.push_back(Ack::make(p, rich.id(), true));
        CHECK_THROWS_AS(r2.enclave->negotiate(rich.id(), acks), EnclaveAbort);
    }
}

TEST_CASE("execution flags exactly the parties without valid submissions") {
    EncRig r;
    r.enclave->generate_idp(r.body);
    r.enclave->negotiate(r.id, r.all_acks());

    SUBCASE("missing submission") {
        auto out = r.enclave->execute(r.id, {r.input(0, 10)}, r.slice_pop());
        CHECK(!out.executed);
        CHECK(out.suspicious == std::vector<Address>{r.parties[1].ad});
    }
    SUBCASE("pledge-contradicting submission") {
        auto bad = r.input(1, 20);
        bad.x = encode_i64(21);  // no longer matches the signed pledge
        auto out = r.enclave->execute(r.id, {r.input(0, 10), bad}, r.slice_pop());
        CHECK(!out.executed);
        CHECK(out.suspicious == std::vector<Address>{r.parties[1].ad});
    }
    SUBCASE("all valid: executes and commits") {
        auto out = r.enclave->execute(r.id, {r.input(0, 10), r.input(1, 20)}, r.slice_pop());
        CHECK(out.executed);
        CHECK(r.enclave->status() == EnclaveStatus::Executed);
        CHECK_THROWS_AS(r.enclave->challenge_parties({}), EnclaveAbort);
    }
}

TEST_CASE("full commit/complete round-trip against the contract") {
    EncRig r;
    r.enclave->generate_idp(r.body);
    r.enclave->negotiate(r.id, r.all_acks());
    auto out = r.enclave->execute(r.id, {r.input(0, 10), r.input(1, 20)}, r.slice_pop());
    REQUIRE(out.executed);

    EnclaveTx cmt = r.enclave->commit(r.id);
    Transaction cmt_tx = make_tx(r.exec, cmt.kind, cmt.payload);
    REQUIRE(r.chain.submit_tx(cmt_tx, 10));
    r.chain.mine_block();
    REQUIRE(r.contract->proposal(r.id) != nullptr);
    CHECK(r.contract->proposal(r.id)->implicit);
    CHECK(r.contract->proposal(r.id)->sta == Sta::Proposed);
    CHECK(r.contract->app_state("scores")->locked);

    for (int i = 0; i < 4; ++i) r.chain.mine_block();
    auto pop = r.chain.get_pop(cmt_tx.id(), r.enclave->checkpoint().height);
    REQUIRE(pop.has_value());
    EnclaveTx com = r.enclave->complete(cmt_tx, *pop);
    REQUIRE(r.chain.submit_tx(make_tx(r.exec, com.kind, com.payload), 20));
    r.chain.mine_block();

    CHECK(r.contract->proposal(r.id)->sta == Sta::Completed);
    CHECK(!r.contract->app_state("scores")->locked);
    CHECK(r.enclave->status() == EnclaveStatus::Completed);

    // another enclave, state discarded, produces a bit-identical key release
    EnclaveConfig ec;
    ec.network = r.network;
    ec.self_executor = r.exec.ad;
    ec.tee_list = {r.exec.ad};
    ec.checkpoint = {r.chain.genesis().digest(), 0};
    ec.miner_pk = r.miner.pk;
    ec.finality_depth = 4;
    ec.keygen_seed = 777;  // different seed: key release must not depend on it
    Enclave fresh(std::move(ec));
    auto pop2 = r.chain.get_pop(cmt_tx.id(), 0);
    REQUIRE(pop2.has_value());
    EnclaveTx com2 = fresh.complete(cmt_tx, *pop2);
    CHECK(com2.payload == com.payload);

    // the stored outputs open for owners via the contract's completed record
    const auto* stored = r.contract->completed_output(r.id);
    REQUIRE(stored != nullptr);
    for (uint32_t i = 0; i < 2; ++i) {
        Bytes s = construct_state(r.parties[i].sk, r.network.pk, stored->c_s_next[i],
                                  commitment_context(r.id, "s'", i));
        CHECK(decode_i64(s) == 0);  // scores keeps state untouched
        Bytes rr = construct_state(r.network.sk, r.parties[i].pk, stored->c_r[i],
                                   commitment_context(r.id, "r", i));
        CHECK(decode_i64(rr) == 15);
    }
}

TEST_CASE("commit against a stale state digest is rejected") {
    EncRig r;
    r.enclave->generate_idp(r.body);
    r.enclave->negotiate(r.id, r.all_acks());
    auto out = r.enclave->execute(r.id, {r.input(0, 10), r.input(1, 20)}, r.slice_pop());
    REQUIRE(out.executed);
    EnclaveTx cmt = r.enclave->commit(r.id);

    // tamper the old-state digest: the registry no longer matches
    auto payload = CmtPayload::decode(cmt.payload);
    payload.proof.old_digest.bytes[0] ^= 1;
    payload.enclave_sig = sign(r.network.sk, payload.signing_bytes());
    Transaction bad = make_tx(r.exec, TxKind::Cmt, payload.encode());
    REQUIRE(r.chain.submit_tx(bad, 10));
    Block b = r.chain.mine_block();
    CHECK(!b.receipts.back().ok);
    CHECK(b.receipts.back().note == "stale old-state digest");
}

TEST_CASE("negotiation failure requires a published unanswered proposal") {
    EncRig r;
    // publish the proposal on-chain
    Transaction chaT = make_tx(r.parties[0], TxKind::ChaT, ChaTPayload{r.body}.encode());
    REQUIRE(r.chain.submit_tx(chaT, 5));
    r.chain.mine_block();
    while (r.chain.height() < r.body.h_neg + 2) r.chain.mine_block();

    auto pop = r.chain.get_pop(chaT.id(), 0);
    REQUIRE(pop.has_value());

    SUBCASE("conforming off-chain acks forbid failing") {
        CHECK_THROWS_AS(r.enclave->fail_negotiation(r.id, chaT, *pop, r.all_acks()),
                        EnclaveAbort);
    }
    SUBCASE("one acceptance is not enough: negotiation fails on-chain") {
        std::vector<Ack> one = {Ack::make(r.parties[0], r.id, true)};
        EnclaveTx f = r.enclave->fail_negotiation(r.id, chaT, *pop, one);
        Transaction ftx = make_tx(r.exec, f.kind, f.payload);
        REQUIRE(r.chain.submit_tx(ftx, 50));
        r.chain.mine_block();
        CHECK(r.contract->proposal(r.id)->sta == Sta::NegoFailed);
    }
}
