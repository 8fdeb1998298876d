#include "decloak/policy.hpp"

namespace decloak {

Bytes PolicySlot::encode() const {
    Writer w;
    w.str(var);
    w.u8(owner ? 1 : 0);
    if (owner) w.fixed(owner->bytes);
    return w.take();
}

PolicySlot PolicySlot::decode(Reader& r) {
    PolicySlot s;
    s.var = r.str();
    if (r.u8()) {
        Address a;
        a.bytes = r.fixed<kAddressWidth>();
        s.owner = a;
    }
    return s;
}

namespace {

void put_slots(Writer& w, const std::vector<PolicySlot>& ss) {
    w.u32(static_cast<uint32_t>(ss.size()));
    for (const auto& s : ss) w.bytes(s.encode());
}

std::vector<PolicySlot> get_slots(Reader& r) {
    uint32_t n = r.u32();
    std::vector<PolicySlot> out;
    out.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        Bytes b = r.bytes();
        Reader rr(b);
        out.push_back(PolicySlot::decode(rr));
    }
    return out;
}

}  // namespace

Bytes encode_address_list(const std::vector<Address>& as) {
    Writer w;
    w.u32(static_cast<uint32_t>(as.size()));
    for (const auto& a : as) w.fixed(a.bytes);
    return w.take();
}

std::vector<Address> decode_address_list(Reader& r) {
    uint32_t n = r.u32();
    std::vector<Address> out(n);
    for (auto& a : out) a.bytes = r.fixed<kAddressWidth>();
    return out;
}

Bytes Policy::encode() const {
    Writer w;
    w.fixed(f_hash.bytes);
    put_slots(w, params);
    put_slots(w, reads);
    put_slots(w, writes);
    put_slots(w, returns);
    w.u32(min_parties);
    w.bytes(encode_address_list(required_owners));
    return w.take();
}

Policy Policy::decode(Reader& r) {
    Policy p;
    p.f_hash.bytes = r.fixed<kDigestWidth>();
    p.params = get_slots(r);
    p.reads = get_slots(r);
    p.writes = get_slots(r);
    p.returns = get_slots(r);
    p.min_parties = r.u32();
    Bytes al = r.bytes();
    Reader ra(al);
    p.required_owners = decode_address_list(ra);
    return p;
}

Bytes ProposalBody::encode() const {
    Writer w;
    w.str(app);
    w.bytes(policy.encode());
    w.u64(q);
    w.u64(h_neg);
    w.u64(tau_com);
    return w.take();
}

ProposalBody ProposalBody::decode(Reader& r) {
    ProposalBody p;
    p.app = r.str();
    Bytes pb = r.bytes();
    Reader rp(pb);
    p.policy = Policy::decode(rp);
    p.q = r.u64();
    p.h_neg = r.u64();
    p.tau_com = r.u64();
    return p;
}

Bytes SettledProposal::encode() const {
    Writer w;
    w.bytes(base.encode());
    w.bytes(encode_address_list(parties));
    return w.take();
}

SettledProposal SettledProposal::decode(Reader& r) {
    SettledProposal p;
    Bytes bb = r.bytes();
    Reader rb(bb);
    p.base = ProposalBody::decode(rb);
    Bytes al = r.bytes();
    Reader ra(al);
    p.parties = decode_address_list(ra);
    return p;
}

}  // namespace decloak
