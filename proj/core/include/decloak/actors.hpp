#pragma once

// Scenario-driven deterministic simulation: a tick-based scheduler drives
// parties, executor hosts (each wrapping an enclave) and the chain. Off-chain
// messages are delivered with a bounded delay; one block is mined every
// block_ticks ticks. The same scenario always produces a byte-identical
// trace.

#include "decloak/contract.hpp"
#include "decloak/enclave.hpp"
#include "decloak/trace.hpp"

#include <memory>

namespace decloak {

enum class PartyBehavior : uint8_t {
    Honest = 0,
    WithholdInput,   // acks, then never submits its input
    MismatchInput,   // submits an input that contradicts its signed pledge
    LateResponder,   // withholds off-chain, answers the on-chain challenge
    Decline,         // acknowledges with accept=false
    SilentAck,       // never acknowledges
    OnchainAck,      // acknowledges on-chain instead of off-chain
};

enum class ExecBehavior : uint8_t {
    Honest = 0,
    Silent,      // registers, then ignores the protocol entirely
    DropCom,     // publishes the commit but withholds the key release
    DetainCmt,   // executes but never publishes the commit
};

PartyBehavior party_behavior_from(const std::string& s);
ExecBehavior exec_behavior_from(const std::string& s);
const char* party_behavior_name(PartyBehavior b);
const char* exec_behavior_name(ExecBehavior b);

struct ActorSpec {
    std::string role;      // "party" | "executor"
    std::string behavior;  // see behavior enums; defaults to "honest"
    std::string input;     // party input spec, e.g. "int:42", "erc20:1,30"
};

// "int:<v>" | "erc20:<target>,<amount>" | "vote:<y|n>[,<target>,<amount>]" |
// "bytes:<hex>" | "" (empty byte string)
Bytes parse_input_spec(const std::string& spec);

struct Scenario {
    std::string name;
    uint64_t seed = 1;
    uint64_t finality_depth = 6;
    uint64_t block_ticks = 10;
    uint64_t delta = 3;  // off-chain delivery bound, in ticks
    std::string app = "scores";
    uint64_t q = 50;            // collateral
    uint64_t h_neg = 6;         // negotiation deadline, absolute block height
    uint64_t tau_com = 30;      // completion window after h_neg, in blocks
    std::string settlement = "offchain";  // "offchain" (optimistic) | "onchain"
    uint64_t deposit = 100;     // initial deposit per actor
    std::vector<ActorSpec> actors;
    uint64_t max_ticks = 3000;

    static Scenario from_json(const std::string& text);
    std::string to_json() const;
    static Scenario load(const std::string& path);
};

struct ActorReport {
    std::string label;  // "party0", "exec1", ...
    std::string role;
    std::string behavior;
    Address addr;
    std::optional<Bytes> x;            // the input an honest run would use
    std::optional<Bytes> learned_r;    // plaintext return learned by this party
    std::optional<Bytes> learned_s;    // plaintext next-state learned
    uint64_t learned_tick = 0;
};

struct RunResult {
    Scenario scenario;
    Trace trace;
    std::shared_ptr<Chain> chain;
    std::shared_ptr<Contract> contract;
    PublicKey network_pk;
    Digest id_p;
    std::vector<Address> settled_parties;
    std::vector<ActorReport> actors;
    std::map<Address, uint64_t> balance_before;  // after deposits, before protocol
    uint64_t ticks = 0;

    const ActorReport* actor_by_addr(const Address& a) const;
    std::optional<Sta> final_sta() const;
};

RunResult run_scenario(const Scenario& sc);

}  // namespace decloak
