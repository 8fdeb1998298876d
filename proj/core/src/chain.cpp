#include "decloak/chain.hpp"

#include <algorithm>

namespace decloak {

Bytes TxReceipt::encode() const {
    Writer w;
    w.fixed(tx_id.bytes);
    w.u8(ok ? 1 : 0);
    w.str(note);
    return w.take();
}

TxReceipt TxReceipt::decode(Reader& r) {
    TxReceipt rc;
    rc.tx_id.bytes = r.fixed<kDigestWidth>();
    rc.ok = r.u8() != 0;
    rc.note = r.str();
    return rc;
}

Bytes Block::signing_bytes() const {
    Writer w;
    w.u64(height);
    w.fixed(parent.bytes);
    w.u32(static_cast<uint32_t>(txs.size()));
    for (const auto& tx : txs) w.bytes(tx.encode());
    w.u32(static_cast<uint32_t>(receipts.size()));
    for (const auto& rc : receipts) w.bytes(rc.encode());
    return w.take();
}

Digest Block::digest() const {
    Writer w;
    w.bytes(signing_bytes());
    w.bytes(miner_sig);
    return digest_of(w);
}

Chain::Chain(uint64_t finality_depth, Account miner)
    : finality_depth_(finality_depth), miner_(std::move(miner)) {
    Block genesis;
    genesis.height = 0;
    genesis.miner_sig = sign(miner_.sk, genesis.signing_bytes());
    blocks_.push_back(std::move(genesis));
}

bool Chain::submit_tx(Transaction tx, uint64_t tick) {
    if (!verify_sig(tx.sender_pk, tx.signing_bytes(), tx.signature)) return false;
    Digest ad = sha256(tx.sender_pk.encode());
    if (!std::equal(tx.sender.bytes.begin(), tx.sender.bytes.end(), ad.bytes.begin()))
        return false;
    Digest id = tx.id();
    if (seen_.count(id)) return false;
    seen_.insert(id);
    pending_.push_back({std::move(tx), tick, seq_++});
    return true;
}

Block Chain::mine_block() {
    std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        if (a.tx.sender != b.tx.sender) return a.tx.sender < b.tx.sender;
        return a.seq < b.seq;
    });

    Block b;
    b.height = blocks_.back().height + 1;
    b.parent = blocks_.back().digest();
    for (auto& p : pending_) {
        TxReceipt rc;
        rc.tx_id = p.tx.id();
        if (hook_) {
            rc = hook_->apply(p.tx, b.height);
        } else {
            rc.ok = true;
        }
        index_[rc.tx_id] = {b.height, b.txs.size()};
        b.txs.push_back(std::move(p.tx));
        b.receipts.push_back(std::move(rc));
    }
    pending_.clear();
    b.miner_sig = sign(miner_.sk, b.signing_bytes());
    blocks_.push_back(b);
    return b;
}

Checkpoint Chain::checkpoint_at(uint64_t height) const {
    return {blocks_.at(height).digest(), height};
}

bool Chain::is_confirmed(const Digest& tx_id) const {
    auto it = index_.find(tx_id);
    if (it == index_.end()) return false;
    return height() >= it->second.first + finality_depth_ - 1;
}

std::optional<PoP> Chain::get_pop(const Digest& tx_id, uint64_t from_height) const {
    auto it = index_.find(tx_id);
    if (it == index_.end()) return std::nullopt;
    uint64_t incl = it->second.first;
    if (height() < incl + finality_depth_ - 1) return std::nullopt;  // not confirmed
    if (from_height >= incl) return std::nullopt;
    PoP pop;
    pop.target_tx_id = tx_id;
    for (uint64_t h = from_height + 1; h < blocks_.size(); ++h) pop.blocks.push_back(blocks_[h]);
    return pop;
}

std::optional<PoP> Chain::get_pop(const Digest& tx_id) const {
    auto it = index_.find(tx_id);
    if (it == index_.end()) return std::nullopt;
    uint64_t incl = it->second.first;
    if (height() < incl + finality_depth_ - 1) return std::nullopt;
    PoP pop;
    pop.target_tx_id = tx_id;
    for (uint64_t h = incl; h < incl + finality_depth_; ++h) pop.blocks.push_back(blocks_[h]);
    return pop;
}

std::optional<TxReceipt> Chain::receipt_of(const Digest& tx_id) const {
    auto it = index_.find(tx_id);
    if (it == index_.end()) return std::nullopt;
    return blocks_[it->second.first].receipts[it->second.second];
}

std::optional<uint64_t> Chain::inclusion_height(const Digest& tx_id) const {
    auto it = index_.find(tx_id);
    if (it == index_.end()) return std::nullopt;
    return it->second.first;
}

bool verify_slice(const Checkpoint& cp, const std::vector<Block>& blocks,
                  const PublicKey& miner_pk) {
    Digest prev = cp.digest;
    uint64_t h = cp.height;
    for (const auto& b : blocks) {
        if (b.height != h + 1) return false;
        if (b.parent != prev) return false;
        if (!verify_sig(miner_pk, b.signing_bytes(), b.miner_sig)) return false;
        prev = b.digest();
        h = b.height;
    }
    return true;
}

bool verify_pop(const Checkpoint& cp, const PoP& pop, const Transaction& tx,
                uint64_t finality_depth, const PublicKey& miner_pk) {
    if (pop.blocks.empty()) return false;
    if (pop.target_tx_id != tx.id()) return false;
    if (!verify_slice(cp, pop.blocks, miner_pk)) return false;
    for (size_t i = 0; i < pop.blocks.size(); ++i) {
        for (const auto& btx : pop.blocks[i].txs) {
            if (btx.id() == pop.target_tx_id) {
                // at least finality_depth blocks from inclusion onward
                return pop.blocks.size() - i >= finality_depth;
            }
        }
    }
    return false;
}

}  // namespace decloak
