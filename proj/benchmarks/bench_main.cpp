#include <benchmark/benchmark.h>

#include "decloak/actors.hpp"

using namespace decloak;

namespace {

Scenario honest(size_t n) {
    Scenario sc;
    sc.name = "bench";
    sc.seed = 7;
    sc.app = "scores";
    for (size_t i = 0; i < n; ++i)
        sc.actors.push_back({"party", "honest", "int:" + std::to_string(50 + i)});
    sc.actors.push_back({"executor", "honest", ""});
    return sc;
}

void BM_Sign(benchmark::State& state) {
    Account a = keygen_account(to_bytes("bench-sign"));
    Bytes msg = to_bytes("a short protocol message");
    for (auto _ : state) benchmark::DoNotOptimize(sign(a.sk, msg));
}
BENCHMARK(BM_Sign);

void BM_VerifySig(benchmark::State& state) {
    Account a = keygen_account(to_bytes("bench-verify"));
    Bytes msg = to_bytes("a short protocol message");
    Bytes sig = sign(a.sk, msg);
    for (auto _ : state) benchmark::DoNotOptimize(verify_sig(a.pk, msg, sig));
}
BENCHMARK(BM_VerifySig);

void BM_CommitOpen(benchmark::State& state) {
    Account owner = keygen_account(to_bytes("bench-owner"));
    Account net = keygen_account(to_bytes("bench-net"));
    SharedKey shared = derive_shared(net.sk, owner.pk);
    Bytes data = encode_i64(123456);
    Bytes key(32, 0x5a);
    Bytes ctx = to_bytes("bench-ctx");
    for (auto _ : state) {
        Commitment c = commit_private(data, key, shared, owner.ad, ctx);
        benchmark::DoNotOptimize(open_commitment(owner.sk, net.pk, c, ctx));
    }
}
BENCHMARK(BM_CommitOpen);

void BM_MineBlock(benchmark::State& state) {
    Account miner = keygen_account(to_bytes("bench-miner"));
    Account sender = keygen_account(to_bytes("bench-sender"));
    for (auto _ : state) {
        state.PauseTiming();
        Chain chain(6, miner);
        for (uint64_t i = 0; i < 20; ++i)
            chain.submit_tx(make_tx(sender, TxKind::Deposit, DepositPayload{i + 1}.encode()), 0);
        state.ResumeTiming();
        benchmark::DoNotOptimize(chain.mine_block());
    }
}
BENCHMARK(BM_MineBlock);

void BM_HonestRun(benchmark::State& state) {
    Scenario sc = honest(static_cast<size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(sc));
}
BENCHMARK(BM_HonestRun)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
