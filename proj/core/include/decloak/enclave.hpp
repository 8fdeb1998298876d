#pragma once

// The trusted enclave program: proposal id generation, negotiation,
// evaluation, commitment, challenge-response and fair delivery. Runs as an
// in-process trusted module; the host sees only these operations and their
// returns, and every host-submittable payload the enclave produces carries a
// network-key signature the host cannot forge.

#include "decloak/apps.hpp"
#include "decloak/chain.hpp"
#include "decloak/contract.hpp"

namespace decloak {

struct EnclaveAbort : std::runtime_error {
    explicit EnclaveAbort(const std::string& what) : std::runtime_error(what) {}
};

// Commitment slot context: binds a ciphertext to (proposal, field role, index).
Bytes commitment_context(const Digest& id_p, const std::string& role, uint32_t index);

// Contexts for the party<->enclave ciphertexts travelling inside tx payloads.
Bytes ack_context(const Digest& id_p);    // AckPayload::enc_ack
Bytes resp_context(const Digest& id_p);   // ResPPayload::enc_inputs
Bytes keys_context(const Digest& id_p);   // CmtPayload::e_k

// Key ciphertext attachable to a stripped commitment's key slot, built the
// same way commit_private builds it so strip-then-attach round-trips.
Bytes attachable_key_ct(const SharedKey& shared, BytesView one_time_key, BytesView context);

struct Ack {
    Digest id_p;
    Address party;
    bool accept = true;
    Bytes sig;

    Bytes signing_bytes() const;
    Bytes encode() const;
    static Ack decode(BytesView b);
    static Ack make(const Account& party, const Digest& id_p, bool accept);
};

struct InputSubmission {
    Digest id_p;
    Address party;
    Bytes x;
    Bytes k_x;       // party-chosen one-time key for the parameter commitment
    Digest pledge;   // hash(x || k_x); the signed pledge misbehaviour is checked against
    Bytes sig;

    static Digest pledge_of(BytesView x, BytesView k_x);
    Bytes signing_bytes() const;
    Bytes encode() const;
    static InputSubmission decode(BytesView b);
    static InputSubmission make(const Account& party, const Digest& id_p, Bytes x, Bytes k_x);
};

struct SignedProposal {
    Digest id_p;
    ProposalBody p;
    Bytes sig;  // network key, over (id_p, p)

    Bytes signing_bytes() const;
};

struct SignedSettled {
    Digest id_p;
    SettledProposal p2;
    Bytes sig;

    Bytes signing_bytes() const;
};

// Enclave-produced transaction payload; the host wraps it into a Transaction
// under its own account.
struct EnclaveTx {
    TxKind kind{};
    Bytes payload;
};

// A chain commitment together with the context it was created under.
struct StoredCommitment {
    Commitment c;
    Bytes ctx;
};

struct EvalOutput {
    std::vector<Bytes> s, s_next, r;
    std::vector<Bytes> k_s_next, k_r;
    std::vector<Commitment> c_s_next, c_r, c_x;  // full, key slots present
    Proof proof;
};

struct EvalError : std::runtime_error {
    size_t index;
    EvalError(size_t i, const std::string& what) : std::runtime_error(what), index(i) {}
};

// Algorithm-style evaluation core: asserts the old commitments open under the
// network key and belong to the right owners, applies the transition, and
// rebuilds commitments under fresh one-time keys.
EvalOutput eval(const AppTransition& app, const Policy& policy, const Digest& id_p,
                const std::vector<Bytes>& x, const std::vector<Bytes>& k_x,
                const std::vector<StoredCommitment>& c_s, const std::vector<Address>& parties,
                KeyGen& gen, const Account& network,
                const std::map<Address, PublicKey>& party_pks);

// Data-availability reconstruction: either (sk_i, pk_net) or (sk_net, pk_i).
Bytes construct_state(const SecretKey& sk, const PublicKey& peer_pk, const Commitment& c,
                      BytesView ctx);

enum class EnclaveStatus : uint8_t { Empty = 0, Negotiated, Executed, Completed };

const char* enclave_status_name(EnclaveStatus s);

struct EnclaveConfig {
    Account network;                 // shared network account (sk never leaves the module)
    Address self_executor;           // host executor's chain address
    std::vector<Address> tee_list;   // registered enclave order; [0] is specified
    Checkpoint checkpoint;           // b_cp
    PublicKey miner_pk;
    uint64_t finality_depth = 6;
    uint64_t tau_resP = 10;
    uint64_t keygen_seed = 0;        // Gen(1^kappa) seed
    std::map<Address, PublicKey> party_pks;
    std::map<Address, uint64_t> cached_coins;
};

class Enclave {
public:
    explicit Enclave(EnclaveConfig cfg);

    SignedProposal generate_idp(const ProposalBody& p);

    // Verifies a chain slice starting at the checkpoint and folds it into the
    // enclave's view (registrations, deposits, completed state commitments).
    // Idempotent: already-ingested heights are skipped.
    void sync(const std::vector<Block>& blocks);

    // Decrypts and validates on-chain acknowledgement payloads from a
    // verified slice.
    std::vector<Ack> harvest_acks(const Digest& id_p, const std::vector<Block>& blocks);

    bool conform(const std::vector<Ack>& acks, const Policy& policy) const;

    SignedSettled negotiate(const Digest& id_p, const std::vector<Ack>& acks);

    EnclaveTx fail_negotiation(const Digest& id_p, const Transaction& chaT_tx, const PoP& pop,
                               const std::vector<Ack>& offchain_acks);

    struct ExecuteOutcome {
        bool executed = false;
        std::vector<Address> suspicious;
    };
    ExecuteOutcome execute(const Digest& id_p, const std::vector<InputSubmission>& inputs,
                           const PoP& pop_s);

    EnclaveTx commit(const Digest& id_p);

    EnclaveTx challenge_parties(const std::vector<Address>& suspicious);

    // Scans the proved slice for accepted responses; nullopt means every
    // challenged party answered and execution resumes via execute.
    std::optional<EnclaveTx> punish_parties(const Transaction& chaP_tx, const PoP& pop);

    EnclaveTx complete(const Transaction& cmt_tx, const PoP& pop_cmt);

    EnclaveStatus status() const { return status_; }
    const Checkpoint& checkpoint() const { return cfg_.checkpoint; }
    // Tip of the longest miner-signed extension this enclave has verified;
    // later syncs only need blocks past this height.
    const Checkpoint& trusted_tip() const { return trusted_tip_; }
    const std::optional<SettledProposal>& settled() const { return settled_; }
    uint64_t cached_balance(const Address& a) const;

    // Harness-only fingerprints of the plaintext outputs for trace checks.
    std::vector<Digest> trace_fingerprints_s() const;
    std::vector<Digest> trace_fingerprints_r() const;

private:
    struct AppView {
        Digest h_cs;
        std::vector<StoredCommitment> c_s;
    };

    bool is_specified() const;
    void ingest_blocks(const std::vector<Block>& blocks);
    const AppView& app_view(const std::string& app);
    std::optional<InputSubmission> valid_submission(const InputSubmission& in,
                                                    const Digest& id_p) const;
    Bytes net_sign(BytesView msg) const { return sign(cfg_.network.sk, msg); }

    EnclaveConfig cfg_;
    KeyGen keygen_;
    EnclaveStatus status_ = EnclaveStatus::Empty;
    std::optional<ProposalBody> proposal_;
    Digest id_p_;
    std::optional<SettledProposal> settled_;
    std::map<Address, InputSubmission> recovered_;  // valid on-chain responses
    std::vector<Address> last_suspicious_;
    std::map<std::string, AppView> app_views_;
    std::map<Digest, CmtPayload> pending_view_;  // accepted TX_cmt awaiting TX_com
    uint64_t ingested_height_ = 0;
    Checkpoint trusted_tip_;
    std::optional<EvalOutput> outputs_;
};

}  // namespace decloak
