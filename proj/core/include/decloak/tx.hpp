#pragma once

// On-chain message types: the nine protocol transactions plus register and
// deposit, with their payload codecs. Enclave-originated payloads carry a
// network-key signature so a Byzantine host cannot fabricate them.

#include "decloak/policy.hpp"

namespace decloak {

enum class TxKind : uint8_t {
    Register = 0,
    Deposit,
    ChaT,
    Ack,
    FNeg,
    ChaP,
    ResP,
    PnsP,
    Cmt,
    Com,
    PnsT,
};

const char* tx_kind_name(TxKind k);

struct Transaction {
    TxKind kind{};
    uint64_t nonce = 0;  // distinguishes intentional re-sends of one action
    Address sender;
    PublicKey sender_pk;
    Bytes payload;
    Bytes signature;

    Bytes signing_bytes() const;
    Bytes encode() const;
    static Transaction decode(Reader& r);
    Digest id() const { return sha256(encode()); }
    bool operator==(const Transaction&) const = default;
};

Transaction make_tx(const Account& sender, TxKind kind, Bytes payload, uint64_t nonce = 0);

// proof = [H_cs, H_cs']: digests over the full canonical commitment arrays
// before and after the transition.
struct Proof {
    Digest old_digest;
    Digest new_digest;

    Bytes encode() const;
    static Proof decode(Reader& r);
    bool operator==(const Proof&) const = default;
};

struct RegisterPayload {
    PublicKey pk;
    Bytes encode() const;
    static RegisterPayload decode(BytesView b);
};

struct DepositPayload {
    uint64_t amount = 0;
    Bytes encode() const;
    static DepositPayload decode(BytesView b);
};

struct ChaTPayload {
    ProposalBody p;
    Bytes encode() const;
    static ChaTPayload decode(BytesView b);
};

struct AckPayload {
    Digest id_p;
    Bytes enc_ack;
    Bytes encode() const;
    static AckPayload decode(BytesView b);
};

struct FNegPayload {
    Digest id_p;
    Bytes enclave_sig;
    Bytes encode() const;
    Bytes signing_bytes() const;
    static FNegPayload decode(BytesView b);
};

struct ChaPPayload {
    Digest id_p;
    std::vector<Address> suspicious;
    Bytes enclave_sig;
    Bytes encode() const;
    Bytes signing_bytes() const;
    static ChaPPayload decode(BytesView b);
};

struct ResPPayload {
    Digest id_p;
    Bytes enc_inputs;
    Bytes encode() const;
    static ResPPayload decode(BytesView b);
};

struct PnsPPayload {
    Digest id_p;
    std::vector<Address> guilty;
    Bytes enclave_sig;
    Bytes encode() const;
    Bytes signing_bytes() const;
    static PnsPPayload decode(BytesView b);
};

struct CmtPayload {
    Digest id_p;
    SettledProposal proposal;           // lets the contract admit an optimistic MPT
    Proof proof;
    std::vector<Commitment> c_s_next;   // stripped c*_{s'}
    std::vector<Commitment> c_r;        // stripped c*_r
    Bytes e_k;                          // Enc_{k_net}(k_{s'} || k_r)
    Digest h_f;                         // auxiliary metadata carried alongside the proof
    Digest h_p;
    Bytes enclave_sig;
    Bytes encode() const;
    Bytes signing_bytes() const;
    static CmtPayload decode(BytesView b);
};

struct ComPayload {
    Digest id_p;
    std::vector<Bytes> key_s_cts;  // Enc_{k_ie}(k_{s'_i}) per settled party
    std::vector<Bytes> key_r_cts;  // Enc_{k_ie}(k_{r_i}) per settled party
    Bytes enclave_sig;
    Bytes encode() const;
    Bytes signing_bytes() const;
    static ComPayload decode(BytesView b);
};

struct PnsTPayload {
    Digest id_p;
    Bytes encode() const;
    static PnsTPayload decode(BytesView b);
};

}  // namespace decloak
