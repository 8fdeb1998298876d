#include "decloak/apps.hpp"

namespace decloak {

namespace appenc {

Bytes erc20_param(int64_t target, int64_t amount) {
    Writer w;
    w.u64(static_cast<uint64_t>(target));
    w.u64(static_cast<uint64_t>(amount));
    return w.take();
}

void decode_erc20_param(BytesView b, int64_t& target, int64_t& amount) {
    Reader r(b);
    target = static_cast<int64_t>(r.u64());
    amount = static_cast<int64_t>(r.u64());
}

Bytes vote_param(bool approve) {
    return vote_param(approve, 0, 0);
}

Bytes vote_param(bool approve, int64_t target, int64_t amount) {
    Writer w;
    w.u8(approve ? 1 : 0);
    w.u64(static_cast<uint64_t>(target));
    w.u64(static_cast<uint64_t>(amount));
    return w.take();
}

bool decode_vote_param(BytesView b) {
    Reader r(b);
    return r.u8() != 0;
}

}  // namespace appenc

namespace {

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Bytes zero_state(size_t, size_t) { return encode_i64(0); }

// Party 0 acts as buyer: the winning (lowest) bid moves from the buyer's
// balance to the winner's, so total balances are conserved.
AppResult supply_chain(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    size_t n = s.size();
    size_t winner = 0;
    int64_t best = decode_i64(x[0]);
    for (size_t i = 1; i < n; ++i) {
        int64_t bid = decode_i64(x[i]);
        if (bid < best) {
            best = bid;
            winner = i;
        }
    }
    AppResult out;
    out.s_next.reserve(n);
    for (const auto& si : s) out.s_next.push_back(si);
    int64_t buyer_bal = decode_i64(out.s_next[0]);
    int64_t winner_bal = decode_i64(out.s_next[winner]);
    if (winner == 0) {
        // self-award: payment is a no-op
    } else {
        buyer_bal -= best;
        winner_bal += best;
        out.s_next[0] = encode_i64(buyer_bal);
        out.s_next[winner] = encode_i64(winner_bal);
    }
    for (size_t i = 0; i < n; ++i) out.r.push_back(encode_i64(i == winner ? 1 : 0));
    return out;
}

AppResult scores_mean(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    int64_t sum = 0;
    for (const auto& xi : x) sum += decode_i64(xi);
    int64_t mean = floor_div(sum, static_cast<int64_t>(x.size()));
    AppResult out;
    out.s_next = s;
    for (size_t i = 0; i < x.size(); ++i) out.r.push_back(encode_i64(mean));
    return out;
}

bool do_transfer(std::vector<int64_t>& bal, size_t from, int64_t target, int64_t amount) {
    if (amount < 0) return false;
    if (target < 0 || static_cast<size_t>(target) >= bal.size()) return false;
    if (static_cast<size_t>(target) == from) return true;  // self-transfer: no-op
    if (bal[from] < amount) return false;                  // insufficient funds
    bal[from] -= amount;
    bal[static_cast<size_t>(target)] += amount;
    return true;
}

std::vector<int64_t> balances_of(const std::vector<Bytes>& s) {
    std::vector<int64_t> bal;
    bal.reserve(s.size());
    for (const auto& si : s) bal.push_back(decode_i64(si));
    return bal;
}

AppResult pack_balances(const std::vector<int64_t>& bal, const std::vector<int64_t>& flags) {
    AppResult out;
    for (int64_t b : bal) out.s_next.push_back(encode_i64(b));
    for (int64_t f : flags) out.r.push_back(encode_i64(f));
    return out;
}

// Variant 1: only the initiator's instruction executes.
AppResult erc20_transfer(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    auto bal = balances_of(s);
    std::vector<int64_t> flags(s.size(), 0);
    int64_t target = 0, amount = 0;
    appenc::decode_erc20_param(x[0], target, amount);
    flags[0] = do_transfer(bal, 0, target, amount) ? 1 : 0;
    return pack_balances(bal, flags);
}

// Variant 2: approve-style, the transfer executes only when the receiving
// party submitted a matching instruction.
AppResult erc20_approve(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    auto bal = balances_of(s);
    std::vector<int64_t> flags(s.size(), 0);
    int64_t target = 0, amount = 0;
    appenc::decode_erc20_param(x[0], target, amount);
    bool matched = false;
    if (target >= 0 && static_cast<size_t>(target) < x.size()) {
        int64_t t2 = 0, a2 = 0;
        appenc::decode_erc20_param(x[static_cast<size_t>(target)], t2, a2);
        matched = (t2 == 0 && a2 == amount);
    }
    if (matched) flags[0] = do_transfer(bal, 0, target, amount) ? 1 : 0;
    return pack_balances(bal, flags);
}

// Variant 3: batched, every party's instruction executes in party order.
AppResult erc20_batch(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    auto bal = balances_of(s);
    std::vector<int64_t> flags(s.size(), 0);
    for (size_t i = 0; i < x.size(); ++i) {
        int64_t target = 0, amount = 0;
        appenc::decode_erc20_param(x[i], target, amount);
        flags[i] = do_transfer(bal, i, target, amount) ? 1 : 0;
    }
    return pack_balances(bal, flags);
}

// Co-managed transfer: every manager votes; the initiator's (target, amount)
// executes iff approving votes form a strict majority. Votes never appear in
// the returns beyond the shared boolean outcome.
AppResult yundou_vote_transfer(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    auto bal = balances_of(s);
    size_t n = s.size();
    size_t yes = 0;
    for (const auto& xi : x) {
        Reader r(xi);
        if (r.u8()) ++yes;
    }
    bool pass = n > 0 && 2 * yes > n;
    int64_t executed = 0;
    if (pass) {
        Reader r(x[0]);
        r.u8();
        int64_t target = static_cast<int64_t>(r.u64());
        int64_t amount = static_cast<int64_t>(r.u64());
        executed = do_transfer(bal, 0, target, amount) ? 1 : 0;
    }
    std::vector<int64_t> flags(n, executed);
    return pack_balances(bal, flags);
}

AppResult oracle_random(const std::vector<Bytes>& s, const std::vector<Bytes>& x) {
    Writer w;
    w.u32(static_cast<uint32_t>(x.size()));
    for (const auto& xi : x) w.bytes(xi);
    Digest d = digest_of(w);
    // the random output: digest prefix as an unsigned integer
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(d.bytes[i]) << (8 * i);
    AppResult out;
    out.s_next = s;
    for (size_t i = 0; i < x.size(); ++i) out.r.push_back(encode_i64(static_cast<int64_t>(v)));
    return out;
}

Bytes funded_state(size_t, size_t) { return encode_i64(100); }

}  // namespace

Policy AppTransition::make_policy(uint32_t min_parties) const {
    Policy p;
    p.f_hash = f_hash();
    p.min_parties = min_parties;
    for (uint32_t i = 0; i < min_parties; ++i) {
        std::string idx = std::to_string(i);
        p.params.push_back({"x" + idx, std::nullopt});
        p.reads.push_back({"s" + idx, std::nullopt});
        p.writes.push_back({"s" + idx + "'", std::nullopt});
        p.returns.push_back({"r" + idx, std::nullopt});
    }
    return p;
}

AppRegistry::AppRegistry() {
    auto add = [this](std::string name, auto fn, auto init) {
        AppTransition t;
        t.name = name;
        t.transition = fn;
        t.default_state = init;
        apps_[name] = std::move(t);
    };
    add("supply_chain", supply_chain, funded_state);
    add("scores", scores_mean, zero_state);
    add("erc20_transfer", erc20_transfer, funded_state);
    add("erc20_approve", erc20_approve, funded_state);
    add("erc20_batch", erc20_batch, funded_state);
    add("yundou", yundou_vote_transfer, funded_state);
    add("oracle", oracle_random, zero_state);
}

const AppRegistry& AppRegistry::instance() {
    static AppRegistry reg;
    return reg;
}

const AppTransition* AppRegistry::find(const std::string& name) const {
    auto it = apps_.find(name);
    return it == apps_.end() ? nullptr : &it->second;
}

std::vector<std::string> AppRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : apps_) out.push_back(k);
    return out;
}

}  // namespace decloak
