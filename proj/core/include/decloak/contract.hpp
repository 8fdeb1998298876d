#pragma once

// The on-chain verifier: proposal lifecycle, coin ledger, punishment, and the
// state-commitment registry. State mutates only through the mining hook; the
// rest of the system sees read-only snapshots.

#include "decloak/chain.hpp"

namespace decloak {

enum class Sta : uint8_t { Proposed = 0, NegoFailed, Aborted, Completed };

const char* sta_name(Sta s);

struct ProposalRecord {
    Digest id_p;
    uint64_t q = 0;
    uint64_t h_neg = 0;
    uint64_t tau_resP = 0;
    uint64_t tau_com = 0;
    Address tee;
    Sta sta = Sta::Proposed;
    std::string app;
    bool implicit = false;  // created by an optimistic TX_cmt rather than TX_chaT
};

struct PendingOutput {
    CmtPayload cmt;
};

struct ContractEvent {
    uint64_t height = 0;
    Digest tx_id;
    TxKind kind{};
    Address sender;
    bool ok = false;
    std::string note;
};

struct ContractConfig {
    std::vector<Address> tee_list;  // ordered enclave/executor addresses
    PublicKey network_pk;           // verifies enclave-signed payloads
    uint64_t tau_resP = 10;
    bool burn_punished = true;      // burn vs. treasury; treasury credits the network address
    Address treasury;
};

class Contract : public TxHook {
public:
    explicit Contract(ContractConfig cfg);

    TxReceipt apply(const Transaction& tx, uint64_t height) override;

    // Read-only snapshots.
    const std::map<Address, uint64_t>& coins() const { return coins_; }
    uint64_t balance(const Address& a) const;
    const std::map<Address, PublicKey>& registered() const { return registered_; }
    const std::map<Digest, ProposalRecord>& proposals() const { return prsls_; }
    const ProposalRecord* proposal(const Digest& id_p) const;
    const std::vector<ContractEvent>& events() const { return log_; }
    const std::vector<Address>& tee_list() const { return cfg_.tee_list; }

    struct AppState {
        Digest h_cs;  // hash of the empty array until the first completed MPT
        std::vector<Commitment> c_s;  // full commitments, key slots attached at complete
        bool locked = false;
        Digest locked_by;
    };
    const AppState* app_state(const std::string& app) const;
    Digest current_h_cs(const std::string& app) const;

    // Completed outputs kept for reconstruction: returns commitments with the
    // TX_com key slots attached.
    struct CompletedOutput {
        std::vector<Address> parties;
        std::vector<Commitment> c_s_next;  // full
        std::vector<Commitment> c_r;       // full
    };
    const CompletedOutput* completed_output(const Digest& id_p) const;

private:
    TxReceipt fail(const Transaction& tx, uint64_t height, std::string note);
    TxReceipt okay(const Transaction& tx, uint64_t height, std::string note = {});
    bool is_tee(const Address& a) const;
    bool enclave_signed(BytesView msg, BytesView sig) const;
    void deduct(const Address& a, uint64_t q);

    ContractConfig cfg_;
    Digest empty_array_hash_;
    std::map<Address, uint64_t> coins_;
    std::map<Address, PublicKey> registered_;
    std::map<Digest, ProposalRecord> prsls_;
    std::map<std::string, AppState> apps_;
    std::map<Digest, PendingOutput> pending_;
    std::map<Digest, CompletedOutput> completed_;
    std::vector<ContractEvent> log_;
};

}  // namespace decloak
