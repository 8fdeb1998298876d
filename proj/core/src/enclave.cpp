#include "decloak/enclave.hpp"

#include <algorithm>
#include <set>

namespace decloak {

Bytes commitment_context(const Digest& id_p, const std::string& role, uint32_t index) {
    Writer w;
    w.fixed(id_p.bytes);
    w.str(role);
    w.u32(index);
    return w.take();
}

static Bytes tagged_context(const Digest& id_p, const char* tag) {
    Writer w;
    w.fixed(id_p.bytes);
    w.str(tag);
    return w.take();
}

Bytes ack_context(const Digest& id_p) { return tagged_context(id_p, "ack"); }
Bytes resp_context(const Digest& id_p) { return tagged_context(id_p, "resp"); }
Bytes keys_context(const Digest& id_p) { return tagged_context(id_p, "keys"); }

Bytes attachable_key_ct(const SharedKey& shared, BytesView one_time_key, BytesView context) {
    Writer wk;
    wk.bytes(context);
    wk.str("key");
    return sym_encrypt(BytesView(shared.key.data(), shared.key.size()), one_time_key, wk.out());
}

// ---- Ack ----

Bytes Ack::signing_bytes() const {
    Writer w;
    w.str("ack");
    w.fixed(id_p.bytes);
    w.fixed(party.bytes);
    w.u8(accept ? 1 : 0);
    return w.take();
}

Bytes Ack::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.fixed(party.bytes);
    w.u8(accept ? 1 : 0);
    w.bytes(sig);
    return w.take();
}

Ack Ack::decode(BytesView b) {
    Reader r(b);
    Ack a;
    a.id_p.bytes = r.fixed<kDigestWidth>();
    a.party.bytes = r.fixed<kAddressWidth>();
    a.accept = r.u8() != 0;
    a.sig = r.bytes();
    r.done();
    return a;
}

Ack Ack::make(const Account& party, const Digest& id_p, bool accept) {
    Ack a;
    a.id_p = id_p;
    a.party = party.ad;
    a.accept = accept;
    a.sig = sign(party.sk, a.signing_bytes());
    return a;
}

// ---- InputSubmission ----

Digest InputSubmission::pledge_of(BytesView x, BytesView k_x) {
    Writer w;
    w.bytes(x);
    w.bytes(k_x);
    return digest_of(w);
}

Bytes InputSubmission::signing_bytes() const {
    Writer w;
    w.str("input");
    w.fixed(id_p.bytes);
    w.fixed(party.bytes);
    w.fixed(pledge.bytes);
    return w.take();
}

Bytes InputSubmission::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.fixed(party.bytes);
    w.bytes(x);
    w.bytes(k_x);
    w.fixed(pledge.bytes);
    w.bytes(sig);
    return w.take();
}

InputSubmission InputSubmission::decode(BytesView b) {
    Reader r(b);
    InputSubmission in;
    in.id_p.bytes = r.fixed<kDigestWidth>();
    in.party.bytes = r.fixed<kAddressWidth>();
    in.x = r.bytes();
    in.k_x = r.bytes();
    in.pledge.bytes = r.fixed<kDigestWidth>();
    in.sig = r.bytes();
    r.done();
    return in;
}

InputSubmission InputSubmission::make(const Account& party, const Digest& id_p, Bytes x,
                                      Bytes k_x) {
    InputSubmission in;
    in.id_p = id_p;
    in.party = party.ad;
    in.x = std::move(x);
    in.k_x = std::move(k_x);
    in.pledge = pledge_of(in.x, in.k_x);
    in.sig = sign(party.sk, in.signing_bytes());
    return in;
}

// ---- signed proposal wrappers ----

Bytes SignedProposal::signing_bytes() const {
    Writer w;
    w.str("idp");
    w.fixed(id_p.bytes);
    w.bytes(p.encode());
    return w.take();
}

Bytes SignedSettled::signing_bytes() const {
    Writer w;
    w.str("settle");
    w.fixed(id_p.bytes);
    w.bytes(p2.encode());
    return w.take();
}

// ---- eval core ----

static Bytes shared_view(const SharedKey& k) { return Bytes(k.key.begin(), k.key.end()); }

EvalOutput eval(const AppTransition& app, const Policy& policy, const Digest& id_p,
                const std::vector<Bytes>& x, const std::vector<Bytes>& k_x,
                const std::vector<StoredCommitment>& c_s, const std::vector<Address>& parties,
                KeyGen& gen, const Account& network,
                const std::map<Address, PublicKey>& party_pks) {
    const size_t n = parties.size();
    if (x.size() != n || k_x.size() != n) throw EnclaveAbort("input arity mismatch");
    if (policy.params.size() != n) throw EnclaveAbort("policy arity mismatch");

    EvalOutput out;
    if (c_s.empty()) {
        for (size_t i = 0; i < n; ++i) out.s.push_back(app.default_state(i, n));
        out.proof.old_digest = hash_commitment_array({});
    } else {
        if (c_s.size() != n) throw EnclaveAbort("state commitment arity mismatch");
        std::vector<Commitment> fulls;
        for (size_t i = 0; i < n; ++i) {
            if (c_s[i].c.owner != parties[i]) throw EvalError(i, "state owner mismatch");
            auto pk = party_pks.find(parties[i]);
            if (pk == party_pks.end()) throw EvalError(i, "unknown party key");
            try {
                out.s.push_back(open_commitment(network.sk, pk->second, c_s[i].c, c_s[i].ctx));
            } catch (const std::exception&) {
                throw EvalError(i, "state commitment open failure");
            }
            fulls.push_back(c_s[i].c);
        }
        out.proof.old_digest = hash_commitment_array(fulls);
    }

    AppResult res = app.transition(out.s, x);
    if (res.s_next.size() != n || res.r.size() != n)
        throw EnclaveAbort("transition arity mismatch");
    out.s_next = res.s_next;
    out.r = res.r;

    for (size_t i = 0; i < n; ++i) {
        auto pk = party_pks.find(parties[i]);
        if (pk == party_pks.end()) throw EvalError(i, "unknown party key");
        SharedKey shared = derive_shared(network.sk, pk->second);
        Bytes ks = gen.next();
        Bytes kr = gen.next();
        out.c_s_next.push_back(commit_private(out.s_next[i], ks, shared, parties[i],
                                              commitment_context(id_p, "s'", (uint32_t)i)));
        out.c_r.push_back(commit_private(out.r[i], kr, shared, parties[i],
                                         commitment_context(id_p, "r", (uint32_t)i)));
        out.c_x.push_back(commit_private(x[i], k_x[i], shared, parties[i],
                                         commitment_context(id_p, "x", (uint32_t)i)));
        out.k_s_next.push_back(std::move(ks));
        out.k_r.push_back(std::move(kr));
    }
    out.proof.new_digest = hash_commitment_array(out.c_s_next);
    return out;
}

Bytes construct_state(const SecretKey& sk, const PublicKey& peer_pk, const Commitment& c,
                      BytesView ctx) {
    return open_commitment(sk, peer_pk, c, ctx);
}

const char* enclave_status_name(EnclaveStatus s) {
    switch (s) {
        case EnclaveStatus::Empty: return "EMPTY";
        case EnclaveStatus::Negotiated: return "NEGOTIATED";
        case EnclaveStatus::Executed: return "EXECUTED";
        case EnclaveStatus::Completed: return "COMPLETED";
    }
    return "?";
}

// ---- Enclave ----

Enclave::Enclave(EnclaveConfig cfg)
    : cfg_(std::move(cfg)), keygen_(cfg_.keygen_seed), trusted_tip_(cfg_.checkpoint) {}

bool Enclave::is_specified() const {
    return !cfg_.tee_list.empty() && cfg_.tee_list.front() == cfg_.self_executor;
}

uint64_t Enclave::cached_balance(const Address& a) const {
    auto it = cfg_.cached_coins.find(a);
    return it == cfg_.cached_coins.end() ? 0 : it->second;
}

SignedProposal Enclave::generate_idp(const ProposalBody& p) {
    if (proposal_ && !(p == *proposal_)) throw EnclaveAbort("proposal already loaded");
    proposal_ = p;
    id_p_ = p.id();
    SignedProposal sp{id_p_, p, {}};
    sp.sig = net_sign(sp.signing_bytes());
    return sp;
}

// Signature-valid, id-consistent, deduplicated-first-wins ack list.
static std::vector<Ack> valid_acks(const std::vector<Ack>& acks,
                                   const std::map<Address, PublicKey>& pks,
                                   const Digest& id_p) {
    std::vector<Ack> out;
    std::set<Address> seen;
    for (const auto& a : acks) {
        if (a.id_p != id_p) continue;
        auto pk = pks.find(a.party);
        if (pk == pks.end()) continue;
        if (!verify_sig(pk->second, a.signing_bytes(), a.sig)) continue;
        if (!seen.insert(a.party).second) continue;
        out.push_back(a);
    }
    return out;
}

bool Enclave::conform(const std::vector<Ack>& acks, const Policy& policy) const {
    if (acks.empty()) return false;
    auto good = valid_acks(acks, cfg_.party_pks, acks.front().id_p);
    std::vector<Address> accepted;
    for (const auto& a : good)
        if (a.accept) accepted.push_back(a.party);
    for (const auto& req : policy.required_owners)
        if (std::find(accepted.begin(), accepted.end(), req) == accepted.end()) return false;
    size_t unsettled = 0;
    for (const auto& slot : policy.params)
        if (!slot.owner) ++unsettled;
    return accepted.size() >= policy.min_parties && accepted.size() >= unsettled;
}

SignedSettled Enclave::negotiate(const Digest& id_p, const std::vector<Ack>& acks) {
    if (!proposal_ || id_p != id_p_) throw EnclaveAbort("unknown proposal");
    if (status_ == EnclaveStatus::Negotiated && settled_) {
        SignedSettled ss{id_p_, *settled_, {}};
        ss.sig = net_sign(ss.signing_bytes());
        return ss;
    }
    if (status_ != EnclaveStatus::Empty) throw EnclaveAbort("negotiation after execution");
    if (!conform(acks, proposal_->policy)) throw EnclaveAbort("acks do not conform to policy");

    auto good = valid_acks(acks, cfg_.party_pks, id_p_);
    std::vector<Address> accepted;
    for (const auto& a : good)
        if (a.accept) accepted.push_back(a.party);

    // Bind the policy's owner slots: pre-settled owners keep their slot,
    // unsettled slots consume accepted ackers in arrival order.
    std::vector<Address> parties;
    size_t next = 0;
    for (const auto& slot : proposal_->policy.params) {
        if (slot.owner) {
            parties.push_back(*slot.owner);
            continue;
        }
        while (next < accepted.size() &&
               std::find(parties.begin(), parties.end(), accepted[next]) != parties.end())
            ++next;
        if (next >= accepted.size()) throw EnclaveAbort("not enough ackers for owner slots");
        parties.push_back(accepted[next++]);
    }

    for (const auto& a : parties)
        if (cached_balance(a) < proposal_->q) throw EnclaveAbort("party collateral below q");
    if (cached_balance(cfg_.self_executor) < proposal_->q)
        throw EnclaveAbort("executor collateral below q");

    settled_ = SettledProposal{*proposal_, parties};
    status_ = EnclaveStatus::Negotiated;
    SignedSettled ss{id_p_, *settled_, {}};
    ss.sig = net_sign(ss.signing_bytes());
    return ss;
}

void Enclave::sync(const std::vector<Block>& blocks) {
    // Signatures up to trusted_tip_ were checked by an earlier sync, so only
    // the suffix beyond it needs verification.
    std::vector<Block> suffix;
    for (const auto& b : blocks)
        if (b.height > trusted_tip_.height) suffix.push_back(b);
    if (suffix.empty()) return;
    if (!verify_slice(trusted_tip_, suffix, cfg_.miner_pk))
        throw EnclaveAbort("unverifiable chain slice");
    trusted_tip_ = Checkpoint{suffix.back().digest(), suffix.back().height};
    ingest_blocks(suffix);
}

std::vector<Ack> Enclave::harvest_acks(const Digest& id_p, const std::vector<Block>& blocks) {
    std::vector<Ack> out;
    for (const auto& b : blocks) {
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (i >= b.receipts.size() || !b.receipts[i].ok) continue;
            if (b.txs[i].kind != TxKind::Ack) continue;
            auto ap = AckPayload::decode(b.txs[i].payload);
            if (ap.id_p != id_p) continue;
            SharedKey k = derive_shared(cfg_.network.sk, b.txs[i].sender_pk);
            auto pt = try_sym_decrypt(shared_view(k), ap.enc_ack, ack_context(id_p));
            if (!pt) continue;
            try {
                out.push_back(Ack::decode(*pt));
            } catch (const std::exception&) {
            }
        }
    }
    return out;
}

void Enclave::ingest_blocks(const std::vector<Block>& blocks) {
    for (const auto& b : blocks) {
        if (b.height <= ingested_height_) continue;
        ingested_height_ = b.height;
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (i >= b.receipts.size() || !b.receipts[i].ok) continue;
            const Transaction& tx = b.txs[i];
            switch (tx.kind) {
                case TxKind::Register: {
                    auto p = RegisterPayload::decode(tx.payload);
                    cfg_.party_pks[tx.sender] = p.pk;
                    break;
                }
                case TxKind::Deposit: {
                    auto p = DepositPayload::decode(tx.payload);
                    cfg_.cached_coins[tx.sender] += p.amount;
                    break;
                }
                case TxKind::Cmt: {
                    auto p = CmtPayload::decode(tx.payload);
                    pending_view_[p.id_p] = std::move(p);
                    break;
                }
                case TxKind::Com: {
                    auto p = ComPayload::decode(tx.payload);
                    auto it = pending_view_.find(p.id_p);
                    if (it == pending_view_.end()) break;
                    const CmtPayload& cmt = it->second;
                    size_t m = cmt.c_s_next.size();
                    if (p.key_s_cts.size() != m) break;
                    AppView v;
                    v.h_cs = cmt.proof.new_digest;
                    for (size_t j = 0; j < m; ++j) {
                        Commitment full = cmt.c_s_next[j];
                        full.key_ct = p.key_s_cts[j];
                        v.c_s.push_back(
                            {std::move(full), commitment_context(p.id_p, "s'", (uint32_t)j)});
                    }
                    app_views_[cmt.proposal.base.app] = std::move(v);
                    pending_view_.erase(it);
                    break;
                }
                default:
                    break;
            }
        }
    }
}

std::optional<InputSubmission> Enclave::valid_submission(const InputSubmission& in,
                                                         const Digest& id_p) const {
    if (in.id_p != id_p) return std::nullopt;
    if (!settled_) return std::nullopt;
    const auto& parties = settled_->parties;
    if (std::find(parties.begin(), parties.end(), in.party) == parties.end())
        return std::nullopt;
    auto pk = cfg_.party_pks.find(in.party);
    if (pk == cfg_.party_pks.end()) return std::nullopt;
    if (!verify_sig(pk->second, in.signing_bytes(), in.sig)) return std::nullopt;
    if (InputSubmission::pledge_of(in.x, in.k_x) != in.pledge) return std::nullopt;
    return in;
}

Enclave::ExecuteOutcome Enclave::execute(const Digest& id_p,
                                         const std::vector<InputSubmission>& inputs,
                                         const PoP& pop_s) {
    if (status_ != EnclaveStatus::Negotiated || !settled_ || id_p != id_p_)
        throw EnclaveAbort("execute without a negotiated proposal");
    if (!verify_slice(cfg_.checkpoint, pop_s.blocks, cfg_.miner_pk))
        throw EnclaveAbort("unverifiable chain slice");
    ingest_blocks(pop_s.blocks);

    std::map<Address, InputSubmission> subs = recovered_;
    for (const auto& in : inputs)
        if (auto v = valid_submission(in, id_p)) subs.emplace(v->party, *v);

    std::vector<Address> suspicious;
    for (const auto& p : settled_->parties)
        if (!subs.count(p)) suspicious.push_back(p);
    if (!suspicious.empty()) {
        last_suspicious_ = suspicious;
        return {false, suspicious};
    }

    const AppTransition* app = AppRegistry::instance().find(settled_->base.app);
    if (!app) throw EnclaveAbort("unknown application: " + settled_->base.app);
    std::vector<Bytes> xs, kxs;
    for (const auto& p : settled_->parties) {
        xs.push_back(subs.at(p).x);
        kxs.push_back(subs.at(p).k_x);
    }
    std::vector<StoredCommitment> c_s;
    if (auto it = app_views_.find(settled_->base.app); it != app_views_.end())
        c_s = it->second.c_s;

    outputs_ = eval(*app, settled_->base.policy, id_p_, xs, kxs, c_s, settled_->parties,
                    keygen_, cfg_.network, cfg_.party_pks);
    if (!pop_s.blocks.empty()) {
        const Block& tip = pop_s.blocks.back();
        cfg_.checkpoint = Checkpoint{tip.digest(), tip.height};
    }
    status_ = EnclaveStatus::Executed;
    last_suspicious_.clear();
    return {true, {}};
}

EnclaveTx Enclave::commit(const Digest& id_p) {
    if (status_ != EnclaveStatus::Executed || !outputs_ || id_p != id_p_)
        throw EnclaveAbort("commit before execution");
    const size_t n = settled_->parties.size();

    CmtPayload p;
    p.id_p = id_p_;
    p.proposal = *settled_;
    p.proof = outputs_->proof;
    for (size_t i = 0; i < n; ++i) {
        p.c_s_next.push_back(strip_key_slot(outputs_->c_s_next[i]));
        p.c_r.push_back(strip_key_slot(outputs_->c_r[i]));
    }
    Writer keys;
    keys.u32(static_cast<uint32_t>(n));
    for (size_t i = 0; i < n; ++i) {
        keys.bytes(outputs_->k_s_next[i]);
        keys.bytes(outputs_->k_r[i]);
    }
    SharedKey net = derive_shared(cfg_.network.sk, cfg_.network.pk);
    p.e_k = sym_encrypt(shared_view(net), keys.out(), keys_context(id_p_));
    p.h_f = settled_->base.policy.f_hash;
    p.h_p = sha256(settled_->encode());
    p.enclave_sig = net_sign(p.signing_bytes());
    return {TxKind::Cmt, p.encode()};
}

EnclaveTx Enclave::fail_negotiation(const Digest& id_p, const Transaction& chaT_tx,
                                    const PoP& pop, const std::vector<Ack>& offchain_acks) {
    if (status_ != EnclaveStatus::Empty)
        throw EnclaveAbort("negotiation already succeeded");
    if (chaT_tx.kind != TxKind::ChaT) throw EnclaveAbort("not a proposal transaction");
    auto chaT = ChaTPayload::decode(chaT_tx.payload);
    if (chaT.p.id() != id_p) throw EnclaveAbort("proposal id mismatch");
    if (!verify_pop(cfg_.checkpoint, pop, chaT_tx, cfg_.finality_depth, cfg_.miner_pk))
        throw EnclaveAbort("unverifiable publication proof");
    if (pop.blocks.back().height < chaT.p.h_neg)
        throw EnclaveAbort("negotiation window still open");
    ingest_blocks(pop.blocks);

    // Off-chain acks take precedence; on-chain acks only fill absent parties.
    std::vector<Ack> merged = offchain_acks;
    for (const auto& b : pop.blocks) {
        if (b.height >= chaT.p.h_neg) continue;
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (!b.receipts[i].ok || b.txs[i].kind != TxKind::Ack) continue;
            auto ap = AckPayload::decode(b.txs[i].payload);
            if (ap.id_p != id_p) continue;
            SharedKey k = derive_shared(cfg_.network.sk, b.txs[i].sender_pk);
            auto pt = try_sym_decrypt(shared_view(k), ap.enc_ack, ack_context(id_p));
            if (!pt) continue;
            try {
                merged.push_back(Ack::decode(*pt));
            } catch (const std::exception&) {
            }
        }
    }
    if (conform(merged, chaT.p.policy))
        throw EnclaveAbort("acks conform: negotiation must proceed");

    proposal_ = chaT.p;
    id_p_ = id_p;
    FNegPayload f;
    f.id_p = id_p;
    f.enclave_sig = net_sign(f.signing_bytes());
    return {TxKind::FNeg, f.encode()};
}

EnclaveTx Enclave::challenge_parties(const std::vector<Address>& suspicious) {
    if (status_ != EnclaveStatus::Negotiated || suspicious.empty())
        throw EnclaveAbort("nothing to challenge");
    last_suspicious_ = suspicious;
    ChaPPayload p;
    p.id_p = id_p_;
    p.suspicious = suspicious;
    p.enclave_sig = net_sign(p.signing_bytes());
    return {TxKind::ChaP, p.encode()};
}

std::optional<EnclaveTx> Enclave::punish_parties(const Transaction& chaP_tx, const PoP& pop) {
    if (status_ != EnclaveStatus::Negotiated || !settled_)
        throw EnclaveAbort("punish before negotiation");
    if (chaP_tx.kind != TxKind::ChaP) throw EnclaveAbort("not a challenge transaction");
    auto chaP = ChaPPayload::decode(chaP_tx.payload);
    if (chaP.id_p != id_p_) throw EnclaveAbort("challenge id mismatch");
    if (!verify_pop(cfg_.checkpoint, pop, chaP_tx, cfg_.finality_depth, cfg_.miner_pk))
        throw EnclaveAbort("unverifiable publication proof");
    const uint64_t deadline = settled_->base.h_neg + cfg_.tau_resP;
    if (pop.blocks.back().height + 1 < deadline + cfg_.finality_depth)
        throw EnclaveAbort("response window not yet final");
    ingest_blocks(pop.blocks);

    for (const auto& b : pop.blocks) {
        if (b.height >= deadline) continue;
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (!b.receipts[i].ok || b.txs[i].kind != TxKind::ResP) continue;
            auto rp = ResPPayload::decode(b.txs[i].payload);
            if (rp.id_p != id_p_) continue;
            SharedKey k = derive_shared(cfg_.network.sk, b.txs[i].sender_pk);
            auto pt = try_sym_decrypt(shared_view(k), rp.enc_inputs, resp_context(id_p_));
            if (!pt) continue;
            try {
                InputSubmission in = InputSubmission::decode(*pt);
                if (in.party != b.txs[i].sender) continue;
                if (auto v = valid_submission(in, id_p_)) recovered_.emplace(v->party, *v);
            } catch (const std::exception&) {
            }
        }
    }

    std::vector<Address> guilty;
    for (const auto& a : last_suspicious_)
        if (!recovered_.count(a)) guilty.push_back(a);
    if (guilty.empty()) return std::nullopt;

    PnsPPayload p;
    p.id_p = id_p_;
    p.guilty = std::move(guilty);
    p.enclave_sig = net_sign(p.signing_bytes());
    return EnclaveTx{TxKind::PnsP, p.encode()};
}

EnclaveTx Enclave::complete(const Transaction& cmt_tx, const PoP& pop_cmt) {
    if (status_ == EnclaveStatus::Completed) throw EnclaveAbort("already completed");
    if (cmt_tx.kind != TxKind::Cmt) throw EnclaveAbort("not a commit transaction");
    if (!verify_pop(cfg_.checkpoint, pop_cmt, cmt_tx, cfg_.finality_depth, cfg_.miner_pk))
        throw EnclaveAbort("unverifiable publication proof");
    ingest_blocks(pop_cmt.blocks);

    auto p = CmtPayload::decode(cmt_tx.payload);
    if (!verify_sig(cfg_.network.pk, p.signing_bytes(), p.enclave_sig))
        throw EnclaveAbort("commit not enclave-signed");

    // The commit must have been accepted by the contract, not merely included.
    bool accepted = false;
    Digest want = cmt_tx.id();
    for (const auto& b : pop_cmt.blocks)
        for (size_t i = 0; i < b.txs.size(); ++i)
            if (b.txs[i].id() == want && i < b.receipts.size() && b.receipts[i].ok)
                accepted = true;
    if (!accepted) throw EnclaveAbort("commit rejected by contract");

    SharedKey net = derive_shared(cfg_.network.sk, cfg_.network.pk);
    Bytes keys = sym_decrypt(shared_view(net), p.e_k, keys_context(p.id_p));
    Reader r(keys);
    uint32_t n = r.u32();
    if (n != p.proposal.parties.size()) throw EnclaveAbort("key bundle arity mismatch");
    std::vector<Bytes> ks, kr;
    for (uint32_t i = 0; i < n; ++i) {
        ks.push_back(r.bytes());
        kr.push_back(r.bytes());
    }
    r.done();

    ComPayload c;
    c.id_p = p.id_p;
    for (uint32_t i = 0; i < n; ++i) {
        const Address& owner = p.proposal.parties[i];
        auto pk = cfg_.party_pks.find(owner);
        if (pk == cfg_.party_pks.end()) throw EnclaveAbort("unregistered settled party");
        SharedKey shared = derive_shared(cfg_.network.sk, pk->second);
        c.key_s_cts.push_back(attachable_key_ct(shared, ks[i], commitment_context(p.id_p, "s'", i)));
        c.key_r_cts.push_back(attachable_key_ct(shared, kr[i], commitment_context(p.id_p, "r", i)));
    }
    c.enclave_sig = net_sign(c.signing_bytes());

    const Block& tip = pop_cmt.blocks.back();
    cfg_.checkpoint = Checkpoint{tip.digest(), tip.height};
    status_ = EnclaveStatus::Completed;
    return {TxKind::Com, c.encode()};
}

std::vector<Digest> Enclave::trace_fingerprints_s() const {
    std::vector<Digest> out;
    if (outputs_)
        for (const auto& s : outputs_->s_next) out.push_back(sha256(s));
    return out;
}

std::vector<Digest> Enclave::trace_fingerprints_r() const {
    std::vector<Digest> out;
    if (outputs_)
        for (const auto& rr : outputs_->r) out.push_back(sha256(rr));
    return out;
}

}  // namespace decloak
