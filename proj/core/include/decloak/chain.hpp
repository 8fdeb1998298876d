#pragma once

// Deterministic forkless blockchain: ordering, height, finality, and
// proof-of-publication. One block is mined per scheduler call; the pending
// pool drains FIFO with ties broken by sender address. Blocks are signed by
// the simulation's miner account so a verifier holding the miner's public
// key accepts only sequences this chain actually produced.

#include "decloak/tx.hpp"

#include <map>
#include <set>

namespace decloak {

struct TxReceipt {
    Digest tx_id;
    bool ok = false;
    std::string note;

    Bytes encode() const;
    static TxReceipt decode(Reader& r);
    bool operator==(const TxReceipt&) const = default;
};

struct Block {
    uint64_t height = 0;
    Digest parent;
    std::vector<Transaction> txs;
    std::vector<TxReceipt> receipts;
    Bytes miner_sig;

    Bytes signing_bytes() const;
    Digest digest() const;
    bool operator==(const Block&) const = default;
};

struct Checkpoint {
    Digest digest;
    uint64_t height = 0;
};

// Block slice proving publication: hash-linked, miner-signed, starting right
// after some checkpoint. When built by Chain::get_pop the first block is the
// target's inclusion block and the slice carries finality_depth blocks.
struct PoP {
    std::vector<Block> blocks;
    Digest target_tx_id;

    // Height through which this slice demonstrates finality.
    uint64_t confirmed_height(uint64_t finality_depth) const {
        if (blocks.empty()) return 0;
        uint64_t tip = blocks.back().height;
        return tip >= finality_depth - 1 ? tip - (finality_depth - 1) : 0;
    }
};

// Hook the chain runs for every mined transaction; rejected calls are
// included-but-failed.
class TxHook {
public:
    virtual ~TxHook() = default;
    virtual TxReceipt apply(const Transaction& tx, uint64_t height) = 0;
};

class Chain {
public:
    Chain(uint64_t finality_depth, Account miner);

    void set_hook(TxHook* hook) { hook_ = hook; }

    // Appends to the pending pool in submission order; returns false for a
    // bad signature or a duplicate tx id.
    bool submit_tx(Transaction tx, uint64_t tick);

    Block mine_block();

    uint64_t height() const { return blocks_.back().height; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& genesis() const { return blocks_.front(); }
    uint64_t finality_depth() const { return finality_depth_; }
    Checkpoint checkpoint_at(uint64_t height) const;
    const PublicKey& miner_pk() const { return miner_.pk; }

    bool is_confirmed(const Digest& tx_id) const;

    // Slice from from_height+1 through the tip. Fails (nullopt) when the
    // target is unknown or not yet buried finality_depth deep.
    std::optional<PoP> get_pop(const Digest& tx_id, uint64_t from_height) const;
    std::optional<PoP> get_pop(const Digest& tx_id) const;  // inclusion..inclusion+k-1

    // Accepted-tx receipt lookup across the whole chain.
    std::optional<TxReceipt> receipt_of(const Digest& tx_id) const;
    std::optional<uint64_t> inclusion_height(const Digest& tx_id) const;

    size_t pending_count() const { return pending_.size(); }

private:
    uint64_t finality_depth_;
    Account miner_;
    TxHook* hook_ = nullptr;
    std::vector<Block> blocks_;
    struct Pending {
        Transaction tx;
        uint64_t tick;
        uint64_t seq;
    };
    std::vector<Pending> pending_;
    uint64_t seq_ = 0;
    std::set<Digest> seen_;
    std::map<Digest, std::pair<uint64_t, size_t>> index_;  // tx id -> (height, slot)
};

// True iff pop links from the checkpoint, is hash- and signature-consistent,
// contains the target tx, and carries at least finality_depth blocks from the
// inclusion block onward.
bool verify_pop(const Checkpoint& cp, const PoP& pop, const Transaction& tx,
                uint64_t finality_depth, const PublicKey& miner_pk);

// Same structural checks as verify_pop without the target requirement; used
// for feeding plain chain suffixes into an enclave.
bool verify_slice(const Checkpoint& cp, const std::vector<Block>& blocks,
                  const PublicKey& miner_pk);

}  // namespace decloak
