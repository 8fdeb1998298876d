#include "decloak/actors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <variant>

namespace decloak {

using nlohmann::json;

// ---- behavior names ----

PartyBehavior party_behavior_from(const std::string& s) {
    if (s.empty() || s == "honest") return PartyBehavior::Honest;
    if (s == "withhold_input") return PartyBehavior::WithholdInput;
    if (s == "mismatch_input") return PartyBehavior::MismatchInput;
    if (s == "late_responder") return PartyBehavior::LateResponder;
    if (s == "decline") return PartyBehavior::Decline;
    if (s == "silent_ack") return PartyBehavior::SilentAck;
    if (s == "onchain_ack") return PartyBehavior::OnchainAck;
    throw std::runtime_error("unknown party behavior: " + s);
}

ExecBehavior exec_behavior_from(const std::string& s) {
    if (s.empty() || s == "honest") return ExecBehavior::Honest;
    if (s == "silent") return ExecBehavior::Silent;
    if (s == "drop_com") return ExecBehavior::DropCom;
    if (s == "detain_cmt") return ExecBehavior::DetainCmt;
    throw std::runtime_error("unknown executor behavior: " + s);
}

const char* party_behavior_name(PartyBehavior b) {
    switch (b) {
        case PartyBehavior::Honest: return "honest";
        case PartyBehavior::WithholdInput: return "withhold_input";
        case PartyBehavior::MismatchInput: return "mismatch_input";
        case PartyBehavior::LateResponder: return "late_responder";
        case PartyBehavior::Decline: return "decline";
        case PartyBehavior::SilentAck: return "silent_ack";
        case PartyBehavior::OnchainAck: return "onchain_ack";
    }
    return "?";
}

const char* exec_behavior_name(ExecBehavior b) {
    switch (b) {
        case ExecBehavior::Honest: return "honest";
        case ExecBehavior::Silent: return "silent";
        case ExecBehavior::DropCom: return "drop_com";
        case ExecBehavior::DetainCmt: return "detain_cmt";
    }
    return "?";
}

Bytes parse_input_spec(const std::string& spec) {
    if (spec.empty()) return {};
    auto colon = spec.find(':');
    std::string tag = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (tag == "int") return encode_i64(std::stoll(rest));
    if (tag == "bytes") return from_hex(rest);
    if (tag == "erc20") {
        auto comma = rest.find(',');
        if (comma == std::string::npos) throw std::runtime_error("erc20 input needs target,amount");
        return appenc::erc20_param(std::stoll(rest.substr(0, comma)),
                                   std::stoll(rest.substr(comma + 1)));
    }
    if (tag == "vote") {
        std::vector<std::string> parts;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (parts.empty()) throw std::runtime_error("vote input needs y|n");
        bool yes = parts[0] == "y" || parts[0] == "yes" || parts[0] == "1";
        if (parts.size() == 1) return appenc::vote_param(yes);
        if (parts.size() == 3)
            return appenc::vote_param(yes, std::stoll(parts[1]), std::stoll(parts[2]));
        throw std::runtime_error("vote input needs y|n or y|n,target,amount");
    }
    throw std::runtime_error("unknown input spec: " + spec);
}

// ---- scenario codec ----

Scenario Scenario::from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario sc;
    sc.name = j.value("name", "unnamed");
    sc.seed = j.value("seed", 1ull);
    if (j.contains("chain")) {
        sc.finality_depth = j["chain"].value("finality_depth", 6ull);
        sc.block_ticks = j["chain"].value("block_ticks", 10ull);
    }
    if (j.contains("network")) sc.delta = j["network"].value("delta", 3ull);
    if (j.contains("proposal")) {
        const auto& p = j["proposal"];
        sc.app = p.value("app", "scores");
        sc.q = p.value("q", 50ull);
        sc.h_neg = p.value("h_neg", 6ull);
        sc.tau_com = p.value("tau_com", 30ull);
        sc.settlement = p.value("settlement", "offchain");
    }
    sc.deposit = j.value("deposit", 100ull);
    sc.max_ticks = j.value("max_ticks", 3000ull);
    for (const auto& a : j.value("actors", json::array())) {
        ActorSpec spec;
        spec.role = a.value("role", "party");
        spec.behavior = a.value("behavior", "honest");
        spec.input = a.value("input", "");
        if (spec.role != "party" && spec.role != "executor")
            throw std::runtime_error("unknown actor role: " + spec.role);
        (void)party_behavior_from(spec.role == "party" ? spec.behavior : "honest");
        sc.actors.push_back(std::move(spec));
    }
    if (sc.settlement != "offchain" && sc.settlement != "onchain")
        throw std::runtime_error("settlement must be offchain or onchain");
    return sc;
}

std::string Scenario::to_json() const {
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["chain"] = {{"finality_depth", finality_depth}, {"block_ticks", block_ticks}};
    j["network"] = {{"delta", delta}};
    j["proposal"] = {{"app", app},
                     {"q", q},
                     {"h_neg", h_neg},
                     {"tau_com", tau_com},
                     {"settlement", settlement}};
    j["deposit"] = deposit;
    j["max_ticks"] = max_ticks;
    j["actors"] = json::array();
    for (const auto& a : actors)
        j["actors"].push_back({{"role", a.role}, {"behavior", a.behavior}, {"input", a.input}});
    return j.dump(2);
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json(ss.str());
}

const ActorReport* RunResult::actor_by_addr(const Address& a) const {
    for (const auto& r : actors)
        if (r.addr == a) return &r;
    return nullptr;
}

std::optional<Sta> RunResult::final_sta() const {
    if (const auto* rec = contract->proposal(id_p)) return rec->sta;
    return std::nullopt;
}

// ---- the simulation ----

namespace {

struct Message {
    uint64_t deliver_tick = 0;
    uint64_t seq = 0;
    size_t to = 0;
    std::string from;
    std::variant<ProposalBody, SignedProposal, SignedSettled, Ack, InputSubmission> body;
};

struct PartyActor {
    size_t idx = 0;
    std::string label;
    Account acct;
    PartyBehavior behavior = PartyBehavior::Honest;
    Bytes x;
    Bytes k_x;
    bool initiator = false;

    std::optional<SignedProposal> sp;
    std::optional<SignedSettled> ss;
    bool input_sent = false;
    bool chaT_sent = false;
    bool pnst_sent = false;
    bool resp_sent = false;
    std::optional<uint64_t> resp_at;
    std::optional<CmtPayload> seen_cmt;
    uint64_t seen_height = 0;

    std::optional<Bytes> learned_r, learned_s;
    uint64_t learned_tick = 0;
};

struct ExecActor {
    size_t idx = 0;
    std::string label;
    Account acct;
    ExecBehavior behavior = ExecBehavior::Honest;
    std::unique_ptr<Enclave> enclave;

    std::optional<ProposalBody> body;
    Digest id;
    std::optional<Transaction> chaT_tx;
    std::vector<Ack> acks;
    std::vector<InputSubmission> inputs;
    bool proposed = false, negotiated = false, executed = false;
    bool nego_failed = false;
    bool cmt_sent = false, com_sent = false, chap_sent = false, pnsp_done = false;
    std::optional<uint64_t> settle_tick;
    std::optional<Transaction> cmt_tx, chap_tx;
    uint64_t seen_height = 0;
    uint64_t synced_height = 0;

    // rescue of someone else's commit
    std::optional<std::pair<Transaction, uint64_t>> foreign_cmt;
    bool rescued = false;
};

class Sim {
public:
    explicit Sim(const Scenario& sc) : sc_(sc) {
        miner_ = keygen_account(to_bytes("miner:" + std::to_string(sc.seed)));
        network_ = keygen_account(to_bytes("network:" + std::to_string(sc.seed)));
        chain_ = std::make_shared<Chain>(sc.finality_depth, miner_);

        size_t pi = 0, ei = 0;
        for (size_t i = 0; i < sc.actors.size(); ++i) {
            const auto& spec = sc.actors[i];
            if (spec.role == "party") {
                PartyActor p;
                p.idx = i;
                p.label = "party" + std::to_string(pi);
                p.acct = keygen_account(to_bytes(p.label + ":" + std::to_string(sc.seed)));
                p.behavior = party_behavior_from(spec.behavior);
                p.x = parse_input_spec(spec.input);
                auto kd = sha256(to_bytes("kx:" + p.label + ":" + std::to_string(sc.seed)));
                p.k_x = Bytes(kd.bytes.begin(), kd.bytes.end());
                p.initiator = pi == 0;
                ++pi;
                parties_.push_back(std::move(p));
                slot_[i] = {true, parties_.size() - 1};
            } else {
                ExecActor e;
                e.idx = i;
                e.label = "exec" + std::to_string(ei);
                e.acct = keygen_account(to_bytes(e.label + ":" + std::to_string(sc.seed)));
                e.behavior = exec_behavior_from(spec.behavior);
                ++ei;
                execs_.push_back(std::move(e));
                slot_[i] = {false, execs_.size() - 1};
            }
        }
        if (parties_.empty() || execs_.empty())
            throw std::runtime_error("scenario needs at least one party and one executor");

        ContractConfig cc;
        for (const auto& e : execs_) cc.tee_list.push_back(e.acct.ad);
        cc.network_pk = network_.pk;
        cc.treasury = network_.ad;
        contract_ = std::make_shared<Contract>(cc);
        chain_->set_hook(contract_.get());

        Checkpoint genesis_cp{chain_->genesis().digest(), 0};
        for (size_t j = 0; j < execs_.size(); ++j) {
            EnclaveConfig ec;
            ec.network = network_;
            ec.self_executor = execs_[j].acct.ad;
            ec.tee_list = cc.tee_list;
            ec.checkpoint = genesis_cp;
            ec.miner_pk = miner_.pk;
            ec.finality_depth = sc.finality_depth;
            ec.tau_resP = cc.tau_resP;
            ec.keygen_seed = sc.seed * 1000 + j;
            execs_[j].enclave = std::make_unique<Enclave>(std::move(ec));
        }
    }

    RunResult run() {
        uint64_t terminal_since = 0;
        for (tick_ = 0; tick_ < sc_.max_ticks; ++tick_) {
            if (tick_ > 0 && tick_ % sc_.block_ticks == 0) mine();
            deliver();
            for (auto& p : parties_) step_party(p);
            for (auto& e : execs_) step_exec(e);

            if (auto rec = contract_->proposal(id_p_); rec && rec->sta != Sta::Proposed) {
                if (!terminal_since) terminal_since = tick_;
                if (tick_ - terminal_since > (sc_.finality_depth + 2) * sc_.block_ticks) break;
            }
            // A quiet run only counts as stalled once every open proposal has
            // outlived all of its challenge and completion windows.
            bool windows_open = false;
            for (const auto& [id, rec] : contract_->proposals())
                if (rec.sta == Sta::Proposed &&
                    height() <= rec.h_neg + rec.tau_resP + rec.tau_com + sc_.finality_depth + 4)
                    windows_open = true;
            if (!windows_open && tick_ - last_activity_ > 8 * sc_.block_ticks) break;
        }
        return compile_result();
    }

private:
    // -- infrastructure --

    uint64_t height() const { return chain_->height(); }

    void note(EventKind k, const std::string& actor, const std::string& what,
              const Digest& subject = {}, const std::string& text = {}) {
        trace_.add({tick_, height(), k, actor, what, subject, text});
    }

    void submit(const Account& from, TxKind kind, Bytes payload, const std::string& label) {
        Transaction tx = make_tx(from, kind, std::move(payload));
        Digest id = tx.id();
        if (chain_->submit_tx(std::move(tx), tick_)) {
            note(EventKind::TxSubmitted, label, tx_kind_name(kind), id);
            last_activity_ = tick_;
        }
    }

    void send(size_t to_idx, const std::string& from,
              std::variant<ProposalBody, SignedProposal, SignedSettled, Ack, InputSubmission> b,
              const char* what) {
        Message m;
        m.deliver_tick = tick_ + sc_.delta;
        m.seq = msg_seq_++;
        m.to = to_idx;
        m.from = from;
        m.body = std::move(b);
        note(EventKind::MsgSent, from, what);
        queue_.push_back(std::move(m));
        last_activity_ = tick_;
    }

    void mine() {
        Block b = chain_->mine_block();
        note(EventKind::BlockMined, "chain", "block", b.digest(),
             "height=" + std::to_string(b.height));
        for (size_t i = 0; i < b.txs.size(); ++i) {
            note(b.receipts[i].ok ? EventKind::TxAccepted : EventKind::TxRejected, "chain",
                 tx_kind_name(b.txs[i].kind), b.txs[i].id(), b.receipts[i].note);
            if (b.receipts[i].ok) last_activity_ = tick_;
        }
    }

    void deliver() {
        std::stable_sort(queue_.begin(), queue_.end(), [](const Message& a, const Message& b) {
            return std::pair(a.deliver_tick, a.seq) < std::pair(b.deliver_tick, b.seq);
        });
        std::vector<Message> due;
        std::vector<Message> rest;
        for (auto& m : queue_)
            (m.deliver_tick <= tick_ ? due : rest).push_back(std::move(m));
        queue_ = std::move(rest);
        for (auto& m : due) {
            auto [is_party, k] = slot_.at(m.to);
            note(EventKind::MsgDelivered, is_party ? parties_[k].label : execs_[k].label, "msg");
            if (is_party)
                on_party_msg(parties_[k], m);
            else
                on_exec_msg(execs_[k], m);
            last_activity_ = tick_;
        }
    }

    std::vector<Block> slice_from(uint64_t from_height) const {
        std::vector<Block> out;
        for (const auto& b : chain_->blocks())
            if (b.height > from_height) out.push_back(b);
        return out;
    }

    ProposalBody make_body(size_t n_parties) const {
        const AppTransition* app = AppRegistry::instance().find(sc_.app);
        if (!app) throw std::runtime_error("unknown app: " + sc_.app);
        ProposalBody p;
        p.app = sc_.app;
        p.policy = app->make_policy(static_cast<uint32_t>(n_parties));
        p.q = sc_.q;
        p.h_neg = sc_.h_neg;
        p.tau_com = sc_.tau_com;
        return p;
    }

    size_t exec0_idx() const { return execs_.front().idx; }

    // -- party logic --

    void on_party_msg(PartyActor& p, const Message& m) {
        if (auto* sp = std::get_if<SignedProposal>(&m.body)) {
            if (!verify_sig(network_.pk, sp->signing_bytes(), sp->sig)) return;
            if (p.sp) return;
            p.sp = *sp;
            send_ack(p);
        } else if (auto* ss = std::get_if<SignedSettled>(&m.body)) {
            if (!verify_sig(network_.pk, ss->signing_bytes(), ss->sig)) return;
            if (p.ss) return;
            p.ss = *ss;
            send_input(p);
        }
    }

    void send_ack(PartyActor& p) {
        const Digest& id = p.sp->id_p;
        switch (p.behavior) {
            case PartyBehavior::SilentAck:
                note(EventKind::ActorNote, p.label, "silent_ack", id);
                return;
            case PartyBehavior::Decline: {
                note(EventKind::ActorNote, p.label, "decline", id);
                Ack a = Ack::make(p.acct, id, false);
                send(exec0_idx(), p.label, a, "ack");
                return;
            }
            case PartyBehavior::OnchainAck: {
                Ack a = Ack::make(p.acct, id, true);
                SharedKey k = derive_shared(p.acct.sk, network_.pk);
                AckPayload pay;
                pay.id_p = id;
                pay.enc_ack = sym_encrypt(Bytes(k.key.begin(), k.key.end()), a.encode(),
                                          ack_context(id));
                submit(p.acct, TxKind::Ack, pay.encode(), p.label);
                return;
            }
            default: {
                Ack a = Ack::make(p.acct, id, true);
                send(exec0_idx(), p.label, a, "ack");
                return;
            }
        }
    }

    void send_input(PartyActor& p) {
        if (p.input_sent) return;
        const auto& parties = p.ss->p2.parties;
        if (std::find(parties.begin(), parties.end(), p.acct.ad) == parties.end()) return;
        switch (p.behavior) {
            case PartyBehavior::WithholdInput:
            case PartyBehavior::LateResponder:
                note(EventKind::ActorNote, p.label, "withhold_offchain", p.ss->id_p);
                return;
            case PartyBehavior::MismatchInput: {
                InputSubmission in = InputSubmission::make(p.acct, p.ss->id_p, p.x, p.k_x);
                if (in.x.empty()) in.x.push_back(0);
                in.x[0] ^= 0x01;  // contradicts the signed pledge
                note(EventKind::ActorNote, p.label, "mismatch_input", p.ss->id_p);
                send(exec0_idx(), p.label, in, "input");
                p.input_sent = true;
                return;
            }
            default: {
                InputSubmission in = InputSubmission::make(p.acct, p.ss->id_p, p.x, p.k_x);
                send(exec0_idx(), p.label, in, "input");
                p.input_sent = true;
                return;
            }
        }
    }

    void step_party(PartyActor& p) {
        if (tick_ == 0) {
            RegisterPayload reg{p.acct.pk};
            submit(p.acct, TxKind::Register, reg.encode(), p.label);
            DepositPayload dep{sc_.deposit};
            submit(p.acct, TxKind::Deposit, dep.encode(), p.label);
            if (p.initiator && sc_.settlement == "onchain") {
                ChaTPayload c{make_body(parties_.size())};
                submit(p.acct, TxKind::ChaT, c.encode(), p.label);
                if (id_p_ == Digest{}) id_p_ = c.p.id();
                p.chaT_sent = true;
            } else if (p.initiator) {
                send(exec0_idx(), p.label, make_body(parties_.size()), "propose");
            }
            return;
        }

        // Escalate a never-answered off-chain proposal on-chain after patience.
        if (p.initiator && sc_.settlement == "offchain" && !p.sp && !p.chaT_sent &&
            tick_ >= 4 * sc_.delta + sc_.block_ticks) {
            ChaTPayload c{make_body(parties_.size())};
            submit(p.acct, TxKind::ChaT, c.encode(), p.label);
            if (id_p_ == Digest{}) id_p_ = c.p.id();
            note(EventKind::ActorNote, p.label, "escalate_onchain", c.p.id());
            p.chaT_sent = true;
        }

        // Delayed response to an on-chain challenge.
        if (p.resp_at && tick_ >= *p.resp_at && !p.resp_sent) {
            const Digest& id = p.ss ? p.ss->id_p : p.sp->id_p;
            InputSubmission in = InputSubmission::make(p.acct, id, p.x, p.k_x);
            SharedKey k = derive_shared(p.acct.sk, network_.pk);
            ResPPayload pay;
            pay.id_p = id;
            pay.enc_inputs =
                sym_encrypt(Bytes(k.key.begin(), k.key.end()), in.encode(), resp_context(id));
            submit(p.acct, TxKind::ResP, pay.encode(), p.label);
            p.resp_sent = true;
        }

        watch_chain_party(p);

        // The deadline watchdog: a proposal stuck past its completion window
        // gets the executor punished.
        if (p.initiator && !p.pnst_sent && p.behavior == PartyBehavior::Honest) {
            Digest id{};
            if (p.ss)
                id = p.ss->id_p;
            else if (p.sp)
                id = p.sp->id_p;
            else if (p.chaT_sent)
                id = make_body(parties_.size()).id();
            if (!(id == Digest{})) {
                const auto* rec = contract_->proposal(id);
                if (rec && rec->sta == Sta::Proposed && height() > rec->h_neg + rec->tau_com) {
                    PnsTPayload pay{id};
                    submit(p.acct, TxKind::PnsT, pay.encode(), p.label);
                    p.pnst_sent = true;
                }
            }
        }
    }

    void watch_chain_party(PartyActor& p) {
        for (const auto& b : chain_->blocks()) {
            if (b.height <= p.seen_height) continue;
            for (size_t i = 0; i < b.txs.size(); ++i) {
                if (!b.receipts[i].ok) continue;
                const Transaction& tx = b.txs[i];
                if (tx.kind == TxKind::Cmt) {
                    auto cmt = CmtPayload::decode(tx.payload);
                    const auto& ps = cmt.proposal.parties;
                    if (std::find(ps.begin(), ps.end(), p.acct.ad) != ps.end())
                        p.seen_cmt = std::move(cmt);
                } else if (tx.kind == TxKind::Com && p.seen_cmt) {
                    auto com = ComPayload::decode(tx.payload);
                    if (com.id_p == p.seen_cmt->id_p) learn_outputs(p, *p.seen_cmt, com);
                } else if (tx.kind == TxKind::ChaP) {
                    auto chap = ChaPPayload::decode(tx.payload);
                    const auto& s = chap.suspicious;
                    if (std::find(s.begin(), s.end(), p.acct.ad) == s.end()) continue;
                    bool answers = p.behavior == PartyBehavior::Honest ||
                                   p.behavior == PartyBehavior::OnchainAck ||
                                   p.behavior == PartyBehavior::LateResponder;
                    if (!answers || p.resp_sent || p.resp_at) continue;
                    uint64_t delay =
                        p.behavior == PartyBehavior::LateResponder ? 2 * sc_.block_ticks : 0;
                    p.resp_at = tick_ + delay;
                }
            }
            p.seen_height = b.height;
        }
    }

    void learn_outputs(PartyActor& p, const CmtPayload& cmt, const ComPayload& com) {
        if (p.learned_r) return;
        const auto& ps = cmt.proposal.parties;
        auto it = std::find(ps.begin(), ps.end(), p.acct.ad);
        if (it == ps.end()) return;
        auto i = static_cast<uint32_t>(it - ps.begin());
        if (i >= com.key_r_cts.size() || i >= cmt.c_r.size()) return;
        Commitment cr = cmt.c_r[i];
        cr.key_ct = com.key_r_cts[i];
        Commitment cs = cmt.c_s_next[i];
        cs.key_ct = com.key_s_cts[i];
        try {
            p.learned_r = construct_state(p.acct.sk, network_.pk, cr,
                                          commitment_context(cmt.id_p, "r", i));
            p.learned_s = construct_state(p.acct.sk, network_.pk, cs,
                                          commitment_context(cmt.id_p, "s'", i));
            p.learned_tick = tick_;
            note(EventKind::OutputLearned, p.label, "return", sha256(*p.learned_r));
            last_activity_ = tick_;
        } catch (const std::exception& e) {
            note(EventKind::ActorNote, p.label, "output_open_failed", cmt.id_p, e.what());
        }
    }

    // -- executor logic --

    void on_exec_msg(ExecActor& e, const Message& m) {
        if (e.behavior == ExecBehavior::Silent) return;
        if (auto* body = std::get_if<ProposalBody>(&m.body)) {
            start_proposal(e, *body);
        } else if (auto* a = std::get_if<Ack>(&m.body)) {
            e.acks.push_back(*a);
        } else if (auto* in = std::get_if<InputSubmission>(&m.body)) {
            e.inputs.push_back(*in);
        }
    }

    void start_proposal(ExecActor& e, const ProposalBody& body) {
        if (e.proposed) return;
        sync_enclave(e);
        try {
            SignedProposal sp = e.enclave->generate_idp(body);
            e.body = body;
            e.id = sp.id_p;
            id_p_ = sp.id_p;
            e.proposed = true;
            note(EventKind::EnclaveOp, e.label, "generate_idp", sp.id_p);
            for (const auto& p : parties_) send(p.idx, e.label, sp, "proposal");
        } catch (const EnclaveAbort& ex) {
            note(EventKind::EnclaveOp, e.label, "generate_idp_failed", {}, ex.what());
        }
    }

    void sync_enclave(ExecActor& e) {
        if (height() <= e.synced_height) return;
        e.enclave->sync(slice_from(e.enclave->trusted_tip().height));
        e.synced_height = height();
    }

    void step_exec(ExecActor& e) {
        if (tick_ == 0) {
            RegisterPayload reg{e.acct.pk};
            submit(e.acct, TxKind::Register, reg.encode(), e.label);
            DepositPayload dep{sc_.deposit};
            submit(e.acct, TxKind::Deposit, dep.encode(), e.label);
            return;
        }
        if (e.behavior == ExecBehavior::Silent) return;

        watch_chain_exec(e);
        sync_enclave(e);

        bool specified = &e == &execs_.front();
        if (specified) {
            try_negotiate(e);
            try_execute(e);
            try_punish(e);
            try_complete(e);
        }
        try_rescue(e);
    }

    void watch_chain_exec(ExecActor& e) {
        for (const auto& b : chain_->blocks()) {
            if (b.height <= e.seen_height) continue;
            for (size_t i = 0; i < b.txs.size(); ++i) {
                if (!b.receipts[i].ok) continue;
                const Transaction& tx = b.txs[i];
                if (tx.kind == TxKind::ChaT) {
                    if (!e.chaT_tx) e.chaT_tx = tx;
                    if (&e == &execs_.front() && !e.proposed)
                        start_proposal(e, ChaTPayload::decode(tx.payload).p);
                } else if (tx.kind == TxKind::Cmt) {
                    if (tx.sender != e.acct.ad && !e.foreign_cmt) e.foreign_cmt = {tx, b.height};
                } else if (tx.kind == TxKind::Com) {
                    coms_seen_.insert(ComPayload::decode(tx.payload).id_p);
                }
            }
            e.seen_height = b.height;
        }
    }

    void try_negotiate(ExecActor& e) {
        if (!e.proposed || e.negotiated || e.nego_failed) return;
        std::vector<Ack> merged = e.acks;
        for (const auto& a : e.enclave->harvest_acks(e.id, slice_from(0))) merged.push_back(a);

        std::set<Address> accepted;
        for (const auto& a : merged)
            if (a.accept) accepted.insert(a.party);
        bool everyone = accepted.size() >= parties_.size();
        bool deadline = height() + 1 >= e.body->h_neg;
        if (!everyone && !deadline) return;

        try {
            SignedSettled ss = e.enclave->negotiate(e.id, merged);
            e.negotiated = true;
            e.settle_tick = tick_;
            note(EventKind::EnclaveOp, e.label, "negotiate", e.id);
            for (const auto& p : parties_) send(p.idx, e.label, ss, "settle");
            last_activity_ = tick_;
        } catch (const EnclaveAbort& ex) {
            if (!deadline) return;  // retry once more acks arrive
            note(EventKind::EnclaveOp, e.label, "negotiate_failed", e.id, ex.what());
            try_fail_negotiation(e);
        }
    }

    void try_fail_negotiation(ExecActor& e) {
        if (e.nego_failed || !e.chaT_tx) return;
        if (height() < e.body->h_neg) return;
        auto pop = chain_->get_pop(e.chaT_tx->id(), e.enclave->checkpoint().height);
        if (!pop || pop->blocks.back().height < e.body->h_neg) return;
        try {
            EnclaveTx f = e.enclave->fail_negotiation(e.id, *e.chaT_tx, *pop, e.acks);
            submit(e.acct, f.kind, f.payload, e.label);
            note(EventKind::EnclaveOp, e.label, "fail_negotiation", e.id);
            e.nego_failed = true;
        } catch (const EnclaveAbort& ex) {
            note(EventKind::EnclaveOp, e.label, "fail_negotiation_failed", e.id, ex.what());
            e.nego_failed = true;  // conforming acks: negotiation will proceed
        }
    }

    void try_execute(ExecActor& e) {
        if (!e.negotiated || e.executed || e.chap_sent) return;
        const auto& parties = e.enclave->settled()->parties;
        std::set<Address> have;
        for (const auto& in : e.inputs) have.insert(in.party);
        bool all = true;
        for (const auto& a : parties)
            if (!have.count(a)) all = false;
        bool patience = tick_ >= *e.settle_tick + 2 * sc_.delta + 2;
        if (!all && !patience) return;

        run_execute(e);
    }

    void run_execute(ExecActor& e) {
        PoP pop;
        pop.blocks = slice_from(e.enclave->checkpoint().height);
        try {
            auto outcome = e.enclave->execute(e.id, e.inputs, pop);
            if (outcome.executed) {
                e.executed = true;
                note(EventKind::EnclaveOp, e.label, "execute", e.id);
                if (e.behavior == ExecBehavior::DetainCmt) {
                    note(EventKind::ActorNote, e.label, "detain_cmt", e.id);
                    e.cmt_sent = true;  // pretends; never actually publishes
                    return;
                }
                EnclaveTx cmt = e.enclave->commit(e.id);
                Transaction tx = make_tx(e.acct, cmt.kind, cmt.payload);
                e.cmt_tx = tx;
                chain_->submit_tx(tx, tick_);
                note(EventKind::TxSubmitted, e.label, "Cmt", tx.id());
                e.cmt_sent = true;
                last_activity_ = tick_;
            } else {
                EnclaveTx chap = e.enclave->challenge_parties(outcome.suspicious);
                Transaction tx = make_tx(e.acct, chap.kind, chap.payload);
                e.chap_tx = tx;
                chain_->submit_tx(tx, tick_);
                note(EventKind::TxSubmitted, e.label, "ChaP", tx.id());
                e.chap_sent = true;
                last_activity_ = tick_;
            }
        } catch (const EnclaveAbort& ex) {
            note(EventKind::EnclaveOp, e.label, "execute_failed", e.id, ex.what());
        }
    }

    void try_punish(ExecActor& e) {
        if (!e.chap_sent || e.pnsp_done || e.executed || !e.chap_tx) return;
        uint64_t deadline = e.body->h_neg + 10;  // response window (tau_resP)
        if (height() + 1 < deadline + sc_.finality_depth) return;
        auto pop = chain_->get_pop(e.chap_tx->id(), e.enclave->checkpoint().height);
        if (!pop) return;
        try {
            auto pnsp = e.enclave->punish_parties(*e.chap_tx, *pop);
            e.pnsp_done = true;
            if (pnsp) {
                submit(e.acct, pnsp->kind, pnsp->payload, e.label);
                note(EventKind::EnclaveOp, e.label, "punish_parties", e.id);
            } else {
                note(EventKind::EnclaveOp, e.label, "responses_recovered", e.id);
                run_execute(e);  // resume with recovered inputs
            }
        } catch (const EnclaveAbort& ex) {
            note(EventKind::EnclaveOp, e.label, "punish_failed", e.id, ex.what());
        }
    }

    void try_complete(ExecActor& e) {
        if (!e.cmt_sent || e.com_sent || !e.cmt_tx) return;
        if (e.behavior == ExecBehavior::DropCom) {
            note(EventKind::ActorNote, e.label, "drop_com", e.id);
            e.com_sent = true;  // deliberately withholds the key release
            return;
        }
        auto pop = chain_->get_pop(e.cmt_tx->id(), e.enclave->checkpoint().height);
        if (!pop) return;
        try {
            EnclaveTx com = e.enclave->complete(*e.cmt_tx, *pop);
            submit(e.acct, com.kind, com.payload, e.label);
            note(EventKind::EnclaveOp, e.label, "complete", e.id);
            e.com_sent = true;
        } catch (const EnclaveAbort& ex) {
            note(EventKind::EnclaveOp, e.label, "complete_failed", e.id, ex.what());
        }
    }

    void try_rescue(ExecActor& e) {
        if (e.behavior != ExecBehavior::Honest || e.rescued || !e.foreign_cmt) return;
        const auto& [tx, incl] = *e.foreign_cmt;
        Digest id = CmtPayload::decode(tx.payload).id_p;
        if (coms_seen_.count(id)) return;
        if (height() < incl + sc_.finality_depth + 2) return;  // patience for the owner
        auto pop = chain_->get_pop(tx.id(), e.enclave->checkpoint().height);
        if (!pop) return;
        try {
            EnclaveTx com = e.enclave->complete(tx, *pop);
            submit(e.acct, com.kind, com.payload, e.label);
            note(EventKind::EnclaveOp, e.label, "rescue_complete", id);
            e.rescued = true;
        } catch (const EnclaveAbort& ex) {
            note(EventKind::EnclaveOp, e.label, "rescue_failed", id, ex.what());
            e.rescued = true;
        }
    }

    // -- result --

    RunResult compile_result() {
        RunResult r;
        r.scenario = sc_;
        r.trace = std::move(trace_);
        r.chain = chain_;
        r.contract = contract_;
        r.network_pk = network_.pk;
        r.id_p = id_p_;
        r.ticks = tick_;
        for (const auto& e : execs_)
            if (e.enclave->settled()) r.settled_parties = e.enclave->settled()->parties;
        if (r.settled_parties.empty() && !(id_p_ == Digest{})) {
            if (const auto* out = contract_->completed_output(id_p_))
                r.settled_parties = out->parties;
        }
        for (const auto& p : parties_) {
            ActorReport a;
            a.label = p.label;
            a.role = "party";
            a.behavior = party_behavior_name(p.behavior);
            a.addr = p.acct.ad;
            a.x = p.x;
            a.learned_r = p.learned_r;
            a.learned_s = p.learned_s;
            a.learned_tick = p.learned_tick;
            r.actors.push_back(std::move(a));
            r.balance_before[p.acct.ad] = sc_.deposit;
        }
        for (const auto& e : execs_) {
            ActorReport a;
            a.label = e.label;
            a.role = "executor";
            a.behavior = exec_behavior_name(e.behavior);
            a.addr = e.acct.ad;
            r.actors.push_back(std::move(a));
            r.balance_before[e.acct.ad] = sc_.deposit;
        }
        return r;
    }

    Scenario sc_;
    Account miner_, network_;
    std::shared_ptr<Chain> chain_;
    std::shared_ptr<Contract> contract_;
    Trace trace_;
    std::vector<PartyActor> parties_;
    std::vector<ExecActor> execs_;
    std::map<size_t, std::pair<bool, size_t>> slot_;  // actor index -> (is_party, vector slot)
    std::vector<Message> queue_;
    uint64_t msg_seq_ = 0;
    uint64_t tick_ = 0;
    uint64_t last_activity_ = 0;
    Digest id_p_{};
    std::set<Digest> coms_seen_;
};

}  // namespace

RunResult run_scenario(const Scenario& sc) { return Sim(sc).run(); }

}  // namespace decloak
