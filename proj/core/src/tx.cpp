#include "decloak/tx.hpp"

namespace decloak {

const char* tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::Register: return "register";
        case TxKind::Deposit: return "deposit";
        case TxKind::ChaT: return "challengeTEE";
        case TxKind::Ack: return "acknowledge";
        case TxKind::FNeg: return "failNegotiation";
        case TxKind::ChaP: return "challengeParties";
        case TxKind::ResP: return "partyResponse";
        case TxKind::PnsP: return "punishParties";
        case TxKind::Cmt: return "commit";
        case TxKind::Com: return "complete";
        case TxKind::PnsT: return "punishTEE";
    }
    return "?";
}

Bytes Transaction::signing_bytes() const {
    Writer w;
    w.u8(static_cast<uint8_t>(kind));
    w.u64(nonce);
    w.fixed(sender.bytes);
    w.bytes(sender_pk.encode());
    w.bytes(payload);
    return w.take();
}

Bytes Transaction::encode() const {
    Writer w;
    w.u8(static_cast<uint8_t>(kind));
    w.u64(nonce);
    w.fixed(sender.bytes);
    w.bytes(sender_pk.encode());
    w.bytes(payload);
    w.bytes(signature);
    return w.take();
}

Transaction Transaction::decode(Reader& r) {
    Transaction tx;
    tx.kind = static_cast<TxKind>(r.u8());
    tx.nonce = r.u64();
    tx.sender.bytes = r.fixed<kAddressWidth>();
    Bytes pk = r.bytes();
    Reader rp(pk);
    tx.sender_pk = PublicKey::decode(rp);
    tx.payload = r.bytes();
    tx.signature = r.bytes();
    return tx;
}

Transaction make_tx(const Account& sender, TxKind kind, Bytes payload, uint64_t nonce) {
    Transaction tx;
    tx.kind = kind;
    tx.nonce = nonce;
    tx.sender = sender.ad;
    tx.sender_pk = sender.pk;
    tx.payload = std::move(payload);
    tx.signature = sign(sender.sk, tx.signing_bytes());
    return tx;
}

Bytes Proof::encode() const {
    Writer w;
    w.fixed(old_digest.bytes);
    w.fixed(new_digest.bytes);
    return w.take();
}

Proof Proof::decode(Reader& r) {
    Proof p;
    p.old_digest.bytes = r.fixed<kDigestWidth>();
    p.new_digest.bytes = r.fixed<kDigestWidth>();
    return p;
}

namespace {

void put_commitments(Writer& w, const std::vector<Commitment>& cs) {
    w.u32(static_cast<uint32_t>(cs.size()));
    for (const auto& c : cs) w.bytes(c.encode());
}

std::vector<Commitment> get_commitments(Reader& r) {
    uint32_t n = r.u32();
    std::vector<Commitment> out;
    out.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        Bytes b = r.bytes();
        Reader rr(b);
        out.push_back(Commitment::decode(rr));
    }
    return out;
}

void put_bytes_list(Writer& w, const std::vector<Bytes>& bs) {
    w.u32(static_cast<uint32_t>(bs.size()));
    for (const auto& b : bs) w.bytes(b);
}

std::vector<Bytes> get_bytes_list(Reader& r) {
    uint32_t n = r.u32();
    std::vector<Bytes> out;
    out.reserve(n);
    for (uint32_t i = 0; i < n; ++i) out.push_back(r.bytes());
    return out;
}

}  // namespace

Bytes RegisterPayload::encode() const {
    Writer w;
    w.bytes(pk.encode());
    return w.take();
}

RegisterPayload RegisterPayload::decode(BytesView b) {
    Reader r(b);
    Bytes pk = r.bytes();
    Reader rp(pk);
    return RegisterPayload{PublicKey::decode(rp)};
}

Bytes DepositPayload::encode() const {
    Writer w;
    w.u64(amount);
    return w.take();
}

DepositPayload DepositPayload::decode(BytesView b) {
    Reader r(b);
    return DepositPayload{r.u64()};
}

Bytes ChaTPayload::encode() const {
    Writer w;
    w.bytes(p.encode());
    return w.take();
}

ChaTPayload ChaTPayload::decode(BytesView b) {
    Reader r(b);
    Bytes pb = r.bytes();
    Reader rp(pb);
    return ChaTPayload{ProposalBody::decode(rp)};
}

Bytes AckPayload::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.bytes(enc_ack);
    return w.take();
}

AckPayload AckPayload::decode(BytesView b) {
    Reader r(b);
    AckPayload p;
    p.id_p.bytes = r.fixed<kDigestWidth>();
    p.enc_ack = r.bytes();
    return p;
}

Bytes FNegPayload::signing_bytes() const {
    Writer w;
    w.str("fneg");
    w.fixed(id_p.bytes);
    return w.take();
}

Bytes FNegPayload::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.bytes(enclave_sig);
    return w.take();
}

FNegPayload FNegPayload::decode(BytesView b) {
    Reader r(b);
    FNegPayload p;
    p.id_p.bytes = r.fixed<kDigestWidth>();
    p.enclave_sig = r.bytes();
    return p;
}

Bytes ChaPPayload::signing_bytes() const {
    Writer w;
    w.str("chaP");
    w.fixed(id_p.bytes);
    w.bytes(encode_address_list(suspicious));
    return w.take();
}

Bytes ChaPPayload::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.bytes(encode_address_list(suspicious));
    w.bytes(enclave_sig);
    return w.take();
}

ChaPPayload ChaPPayload::decode(BytesView b) {
    Reader r(b);
    ChaPPayload p;
    p.id_p.bytes = r.fixed<kDigestWidth>();
    Bytes al = r.bytes();
    Reader ra(al);
    p.suspicious = decode_address_list(ra);
    p.enclave_sig = r.bytes();
    return p;
}

Bytes ResPPayload::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.bytes(enc_inputs);
    return w.take();
}

ResPPayload ResPPayload::decode(BytesView b) {
    Reader r(b);
    ResPPayload p;
    p.id_p.bytes = r.fixed<kDigestWidth>();
    p.enc_inputs = r.bytes();
    return p;
}

Bytes PnsPPayload::signing_bytes() const {
    Writer w;
    w.str("pnsP");
    w.fixed(id_p.bytes);
    w.bytes(encode_address_list(guilty));
    return w.take();
}

Bytes PnsPPayload::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    w.bytes(encode_address_list(guilty));
    w.bytes(enclave_sig);
    return w.take();
}

PnsPPayload PnsPPayload::decode(BytesView b) {
    Reader r(b);
    PnsPPayload p;
    p.id_p.bytes = r.fixed<kDigestWidth>();
    Bytes al = r.bytes();
    Reader ra(al);
    p.guilty = decode_address_list(ra);
    p.enclave_sig = r.bytes();
    return p;
}

Bytes CmtPayload::signing_bytes() const {
    Writer w;
    w.str("cmt");
    w.fixed(id_p.bytes);
    w.bytes(proposal.encode());
    w.bytes(proof.encode());
    put_commitments(w, c_s_next);
    put_commitments(w, c_r);
    w.bytes(e_k);
    w.fixed(h_f.bytes);
    w.fixed(h_p.bytes);
    return w.take();
}

Bytes CmtPayload::encode() const {
    Writer w;
    w.bytes(signing_bytes());
    w.bytes(enclave_sig);
    return w.take();
}

CmtPayload CmtPayload::decode(BytesView b) {
    Reader outer(b);
    Bytes body = outer.bytes();
    Bytes sig = outer.bytes();
    Reader r(body);
    CmtPayload p;
    r.str();  // tag
    p.id_p.bytes = r.fixed<kDigestWidth>();
    Bytes sp = r.bytes();
    Reader rs(sp);
    p.proposal = SettledProposal::decode(rs);
    Bytes pf = r.bytes();
    Reader rp(pf);
    p.proof = Proof::decode(rp);
    p.c_s_next = get_commitments(r);
    p.c_r = get_commitments(r);
    p.e_k = r.bytes();
    p.h_f.bytes = r.fixed<kDigestWidth>();
    p.h_p.bytes = r.fixed<kDigestWidth>();
    p.enclave_sig = sig;
    return p;
}

Bytes ComPayload::signing_bytes() const {
    Writer w;
    w.str("com");
    w.fixed(id_p.bytes);
    put_bytes_list(w, key_s_cts);
    put_bytes_list(w, key_r_cts);
    return w.take();
}

Bytes ComPayload::encode() const {
    Writer w;
    w.bytes(signing_bytes());
    w.bytes(enclave_sig);
    return w.take();
}

ComPayload ComPayload::decode(BytesView b) {
    Reader outer(b);
    Bytes body = outer.bytes();
    Bytes sig = outer.bytes();
    Reader r(body);
    ComPayload p;
    r.str();  // tag
    p.id_p.bytes = r.fixed<kDigestWidth>();
    p.key_s_cts = get_bytes_list(r);
    p.key_r_cts = get_bytes_list(r);
    p.enclave_sig = sig;
    return p;
}

Bytes PnsTPayload::encode() const {
    Writer w;
    w.fixed(id_p.bytes);
    return w.take();
}

PnsTPayload PnsTPayload::decode(BytesView b) {
    Reader r(b);
    PnsTPayload p;
    p.id_p.bytes = r.fixed<kDigestWidth>();
    return p;
}

}  // namespace decloak
