#pragma once

// Privacy policy bound to a transition function: which variables it takes as
// parameters, reads, writes and returns, who owns each one, and when a
// negotiation counts as settled. Owner slots may start unsettled and get
// bound to ackers during negotiation.

#include "decloak/crypto.hpp"

#include <optional>
#include <vector>

namespace decloak {

struct PolicySlot {
    std::string var;
    std::optional<Address> owner;  // nullopt = unsettled, bound during negotiation

    Bytes encode() const;
    static PolicySlot decode(Reader& r);
    bool operator==(const PolicySlot&) const = default;
};

struct Policy {
    Digest f_hash;  // hash of the transition function (by registered app name here)
    std::vector<PolicySlot> params;
    std::vector<PolicySlot> reads;
    std::vector<PolicySlot> writes;
    std::vector<PolicySlot> returns;
    uint32_t min_parties = 1;
    std::vector<Address> required_owners;

    Bytes encode() const;
    static Policy decode(Reader& r);
    Digest digest() const { return sha256(encode()); }
    bool operator==(const Policy&) const = default;
};

// Proposal body p = (F, P, q, h_neg) plus the per-proposal windows.
struct ProposalBody {
    std::string app;
    Policy policy;
    uint64_t q = 0;        // collateral
    uint64_t h_neg = 0;    // negotiation deadline (block height)
    uint64_t tau_com = 0;  // completion window after h_neg

    Bytes encode() const;
    static ProposalBody decode(Reader& r);
    Digest id() const { return sha256(encode()); }
    bool operator==(const ProposalBody&) const = default;
};

// p': the proposal expanded with the settled party list.
struct SettledProposal {
    ProposalBody base;
    std::vector<Address> parties;

    Bytes encode() const;
    static SettledProposal decode(Reader& r);
    bool operator==(const SettledProposal&) const = default;
};

Bytes encode_address_list(const std::vector<Address>& as);
std::vector<Address> decode_address_list(Reader& r);

}  // namespace decloak
