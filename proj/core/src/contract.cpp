#include "decloak/contract.hpp"

namespace decloak {

const char* sta_name(Sta s) {
    switch (s) {
        case Sta::Proposed: return "PROPOSED";
        case Sta::NegoFailed: return "NEGOFAILED";
        case Sta::Aborted: return "ABORTED";
        case Sta::Completed: return "COMPLETED";
    }
    return "?";
}

Contract::Contract(ContractConfig cfg) : cfg_(std::move(cfg)) {
    empty_array_hash_ = hash_commitment_array({});
}

uint64_t Contract::balance(const Address& a) const {
    auto it = coins_.find(a);
    return it == coins_.end() ? 0 : it->second;
}

const ProposalRecord* Contract::proposal(const Digest& id_p) const {
    auto it = prsls_.find(id_p);
    return it == prsls_.end() ? nullptr : &it->second;
}

const Contract::AppState* Contract::app_state(const std::string& app) const {
    auto it = apps_.find(app);
    return it == apps_.end() ? nullptr : &it->second;
}

Digest Contract::current_h_cs(const std::string& app) const {
    auto it = apps_.find(app);
    return it == apps_.end() ? empty_array_hash_ : it->second.h_cs;
}

const Contract::CompletedOutput* Contract::completed_output(const Digest& id_p) const {
    auto it = completed_.find(id_p);
    return it == completed_.end() ? nullptr : &it->second;
}

bool Contract::is_tee(const Address& a) const {
    for (const auto& t : cfg_.tee_list)
        if (t == a) return true;
    return false;
}

bool Contract::enclave_signed(BytesView msg, BytesView sig) const {
    return verify_sig(cfg_.network_pk, msg, sig);
}

void Contract::deduct(const Address& a, uint64_t q) {
    uint64_t& bal = coins_[a];
    uint64_t cut = std::min(bal, q);
    bal -= cut;
    if (!cfg_.burn_punished) coins_[cfg_.treasury] += cut;
}

TxReceipt Contract::fail(const Transaction& tx, uint64_t height, std::string note) {
    log_.push_back({height, tx.id(), tx.kind, tx.sender, false, note});
    return {tx.id(), false, std::move(note)};
}

TxReceipt Contract::okay(const Transaction& tx, uint64_t height, std::string note) {
    log_.push_back({height, tx.id(), tx.kind, tx.sender, true, note});
    return {tx.id(), true, std::move(note)};
}

TxReceipt Contract::apply(const Transaction& tx, uint64_t height) {
    try {
        switch (tx.kind) {
            case TxKind::Register: {
                auto p = RegisterPayload::decode(tx.payload);
                if (registered_.count(tx.sender)) return fail(tx, height, "already registered");
                if (!(p.pk == tx.sender_pk)) return fail(tx, height, "pk mismatch");
                registered_[tx.sender] = p.pk;
                return okay(tx, height);
            }
            case TxKind::Deposit: {
                auto p = DepositPayload::decode(tx.payload);
                if (p.amount == 0) return fail(tx, height, "zero deposit");
                coins_[tx.sender] += p.amount;
                return okay(tx, height);
            }
            case TxKind::ChaT: {
                auto p = ChaTPayload::decode(tx.payload);
                if (!registered_.count(tx.sender)) return fail(tx, height, "sender not registered");
                Digest id_p = p.p.id();
                if (prsls_.count(id_p)) return fail(tx, height, "proposal exists");
                if (cfg_.tee_list.empty()) return fail(tx, height, "no registered tee");
                ProposalRecord rec;
                rec.id_p = id_p;
                rec.q = p.p.q;
                rec.h_neg = p.p.h_neg;
                rec.tau_resP = cfg_.tau_resP;
                rec.tau_com = p.p.tau_com;
                rec.tee = cfg_.tee_list[0];
                rec.sta = Sta::Proposed;
                rec.app = p.p.app;
                prsls_[id_p] = rec;
                return okay(tx, height, "tee challenged");
            }
            case TxKind::Ack: {
                auto p = AckPayload::decode(tx.payload);
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end()) return fail(tx, height, "unknown proposal");
                if (height >= it->second.h_neg) return fail(tx, height, "past h_neg");
                return okay(tx, height);
            }
            case TxKind::FNeg: {
                auto p = FNegPayload::decode(tx.payload);
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end()) return fail(tx, height, "unknown proposal");
                if (tx.sender != it->second.tee) return fail(tx, height, "not specified tee");
                if (it->second.sta != Sta::Proposed) return fail(tx, height, "terminal state");
                if (!enclave_signed(p.signing_bytes(), p.enclave_sig))
                    return fail(tx, height, "bad enclave signature");
                it->second.sta = Sta::NegoFailed;
                return okay(tx, height, "NEGOFAILED");
            }
            case TxKind::ChaP: {
                auto p = ChaPPayload::decode(tx.payload);
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end()) return fail(tx, height, "unknown proposal");
                if (tx.sender != it->second.tee) return fail(tx, height, "not specified tee");
                if (it->second.sta != Sta::Proposed) return fail(tx, height, "terminal state");
                if (p.suspicious.empty()) return fail(tx, height, "empty challenge");
                if (!enclave_signed(p.signing_bytes(), p.enclave_sig))
                    return fail(tx, height, "bad enclave signature");
                return okay(tx, height, "parties challenged");
            }
            case TxKind::ResP: {
                auto p = ResPPayload::decode(tx.payload);
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end()) return fail(tx, height, "unknown proposal");
                if (height >= it->second.h_neg + it->second.tau_resP)
                    return fail(tx, height, "past response window");
                return okay(tx, height);
            }
            case TxKind::PnsP: {
                auto p = PnsPPayload::decode(tx.payload);
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end()) return fail(tx, height, "unknown proposal");
                if (tx.sender != it->second.tee) return fail(tx, height, "not specified tee");
                if (it->second.sta != Sta::Proposed) return fail(tx, height, "terminal state");
                if (p.guilty.empty()) return fail(tx, height, "empty punish list");
                if (!enclave_signed(p.signing_bytes(), p.enclave_sig))
                    return fail(tx, height, "bad enclave signature");
                for (const auto& g : p.guilty) deduct(g, it->second.q);
                it->second.sta = Sta::Aborted;
                auto app = apps_.find(it->second.app);
                if (app != apps_.end() && app->second.locked &&
                    app->second.locked_by == p.id_p)
                    app->second.locked = false;
                return okay(tx, height, "ABORTED: parties punished");
            }
            case TxKind::Cmt: {
                auto p = CmtPayload::decode(tx.payload);
                if (p.proposal.base.id() != p.id_p) return fail(tx, height, "id mismatch");
                auto it = prsls_.find(p.id_p);
                if (it != prsls_.end()) {
                    if (tx.sender != it->second.tee) return fail(tx, height, "not specified tee");
                    if (it->second.sta != Sta::Proposed) return fail(tx, height, "terminal state");
                } else {
                    // Optimistic path: no challenge ever happened, the record is
                    // created here from the enclave-signed proposal.
                    if (cfg_.tee_list.empty() || tx.sender != cfg_.tee_list[0])
                        return fail(tx, height, "not specified tee");
                }
                if (!enclave_signed(p.signing_bytes(), p.enclave_sig))
                    return fail(tx, height, "bad enclave signature");
                if (pending_.count(p.id_p)) return fail(tx, height, "commit already pending");
                size_t n = p.proposal.parties.size();
                if (p.c_s_next.size() != n || p.c_r.size() != n)
                    return fail(tx, height, "array size mismatch");
                const std::string& app = p.proposal.base.app;
                if (current_h_cs(app) != p.proof.old_digest)
                    return fail(tx, height, "stale old-state digest");
                auto& st = apps_[app];
                if (st.c_s.empty() && st.h_cs == Digest{}) st.h_cs = empty_array_hash_;
                if (st.locked) return fail(tx, height, "states locked by pending commit");
                if (it == prsls_.end()) {
                    ProposalRecord rec;
                    rec.id_p = p.id_p;
                    rec.q = p.proposal.base.q;
                    rec.h_neg = p.proposal.base.h_neg;
                    rec.tau_resP = cfg_.tau_resP;
                    rec.tau_com = p.proposal.base.tau_com;
                    rec.tee = cfg_.tee_list[0];
                    rec.sta = Sta::Proposed;
                    rec.app = app;
                    rec.implicit = true;
                    prsls_[p.id_p] = rec;
                }
                st.locked = true;
                st.locked_by = p.id_p;
                pending_[p.id_p] = PendingOutput{std::move(p)};
                return okay(tx, height, "outputs committed, states locked");
            }
            case TxKind::Com: {
                auto p = ComPayload::decode(tx.payload);
                if (!is_tee(tx.sender)) return fail(tx, height, "caller not a registered tee");
                auto pit = pending_.find(p.id_p);
                if (pit == pending_.end()) return fail(tx, height, "no pending commit");
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end() || it->second.sta != Sta::Proposed)
                    return fail(tx, height, "terminal state");
                if (!enclave_signed(p.signing_bytes(), p.enclave_sig))
                    return fail(tx, height, "bad enclave signature");
                const CmtPayload& cmt = pit->second.cmt;
                size_t n = cmt.proposal.parties.size();
                if (p.key_s_cts.size() != n || p.key_r_cts.size() != n)
                    return fail(tx, height, "key array size mismatch");

                CompletedOutput out;
                out.parties = cmt.proposal.parties;
                out.c_s_next = cmt.c_s_next;
                out.c_r = cmt.c_r;
                for (size_t i = 0; i < n; ++i) {
                    out.c_s_next[i].key_ct = p.key_s_cts[i];
                    out.c_r[i].key_ct = p.key_r_cts[i];
                }
                auto& st = apps_[cmt.proposal.base.app];
                st.h_cs = cmt.proof.new_digest;
                st.c_s = out.c_s_next;
                st.locked = false;
                completed_[p.id_p] = std::move(out);
                pending_.erase(pit);
                it->second.sta = Sta::Completed;
                return okay(tx, height, "COMPLETED");
            }
            case TxKind::PnsT: {
                auto p = PnsTPayload::decode(tx.payload);
                auto it = prsls_.find(p.id_p);
                if (it == prsls_.end()) return fail(tx, height, "unknown proposal");
                if (height <= it->second.h_neg + it->second.tau_com)
                    return fail(tx, height, "too early");
                if (it->second.sta != Sta::Proposed) return fail(tx, height, "terminal state");
                deduct(it->second.tee, it->second.q);
                it->second.sta = Sta::Aborted;
                auto app = apps_.find(it->second.app);
                if (app != apps_.end() && app->second.locked &&
                    app->second.locked_by == p.id_p)
                    app->second.locked = false;
                pending_.erase(p.id_p);
                return okay(tx, height, "ABORTED: tee punished");
            }
        }
    } catch (const std::exception& e) {
        return fail(tx, height, std::string("malformed payload: ") + e.what());
    }
    return fail(tx, height, "unknown kind");
}

}  // namespace decloak
