#pragma once

// The evaluation applications as pure policy-governed transition functions
// F(s, x) -> (s', r). Values in the plaintext domain are byte strings; each
// app encodes its own integers via the canonical little-endian helpers.

#include "decloak/policy.hpp"

#include <functional>
#include <map>

namespace decloak {

struct AppResult {
    std::vector<Bytes> s_next;
    std::vector<Bytes> r;
};

struct AppTransition {
    std::string name;
    // Pure and deterministic; array lengths equal the settled party count.
    std::function<AppResult(const std::vector<Bytes>& s, const std::vector<Bytes>& x)> transition;
    // Initial per-party state before any on-chain commitment exists.
    std::function<Bytes(size_t party_index, size_t n)> default_state;

    Digest f_hash() const { return sha256(to_bytes(name)); }
    Policy make_policy(uint32_t min_parties) const;
};

// Registry keyed by name for scenario configs.
class AppRegistry {
public:
    static const AppRegistry& instance();

    const AppTransition* find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    AppRegistry();
    std::map<std::string, AppTransition> apps_;
};

// x encodings used by the individual apps.
namespace appenc {

// erc20 / yundou parameter: (target party index, amount) or (vote flag).
Bytes erc20_param(int64_t target, int64_t amount);
void decode_erc20_param(BytesView b, int64_t& target, int64_t& amount);
Bytes vote_param(bool approve);
Bytes vote_param(bool approve, int64_t target, int64_t amount);
bool decode_vote_param(BytesView b);

}  // namespace appenc

}  // namespace decloak
