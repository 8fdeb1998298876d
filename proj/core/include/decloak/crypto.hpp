#pragma once

// Cryptographic primitives and the commitment structure every other module
// treats as ideal. Backed by OpenSSL: SHA-256, Ed25519 signatures, X25519 key
// agreement, AES-256-GCM authenticated encryption. Nonces are derived
// deterministically from (key, context, plaintext) so whole simulation runs
// replay bit-identically.

#include "decloak/bytes.hpp"
#include "decloak/serial.hpp"

#include <compare>
#include <optional>

namespace decloak {

constexpr size_t kDigestWidth = 32;
constexpr size_t kAddressWidth = 20;
constexpr size_t kSymKeyWidth = 32;

struct AuthFailure : std::runtime_error {
    explicit AuthFailure(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidKey : std::runtime_error {
    explicit InvalidKey(const std::string& what) : std::runtime_error(what) {}
};

struct MissingKeySlot : std::runtime_error {
    explicit MissingKeySlot(const std::string& what) : std::runtime_error(what) {}
};

struct Digest {
    std::array<uint8_t, kDigestWidth> bytes{};

    auto operator<=>(const Digest&) const = default;
    std::string hex() const;
};

Digest sha256(BytesView data);
Digest digest_of(const Writer& w);

struct Address {
    std::array<uint8_t, kAddressWidth> bytes{};

    auto operator<=>(const Address&) const = default;
    std::string hex() const;
};

struct SecretKey {
    Bytes sign_sk;  // 32-byte Ed25519 seed
    Bytes dh_sk;    // 32-byte X25519 scalar
};

struct PublicKey {
    Bytes sign_pk;
    Bytes dh_pk;

    Bytes encode() const;
    static PublicKey decode(Reader& r);
    bool operator==(const PublicKey&) const = default;
};

struct Account {
    SecretKey sk;
    PublicKey pk;
    Address ad;
};

// Deterministic: the same seed always yields the same account.
// ad = sha256(pk) truncated to the address width.
Account keygen_account(BytesView seed);

struct SharedKey {
    std::array<uint8_t, kSymKeyWidth> key{};

    bool operator==(const SharedKey&) const = default;
};

// X25519 agreement hashed to a symmetric key. Commutative:
// derive_shared(sk_a, pk_b) == derive_shared(sk_b, pk_a).
SharedKey derive_shared(const SecretKey& sk, const PublicKey& pk);

Bytes sign(const SecretKey& sk, BytesView message);
bool verify_sig(const PublicKey& pk, BytesView message, BytesView signature);

// Authenticated encryption; context is bound as associated data so a
// ciphertext cannot be replayed into a different (proposal, field) slot.
Bytes sym_encrypt(BytesView key, BytesView plaintext, BytesView context);
Bytes sym_decrypt(BytesView key, BytesView ciphertext, BytesView context);  // throws AuthFailure
std::optional<Bytes> try_sym_decrypt(BytesView key, BytesView ciphertext, BytesView context);

struct Commitment {
    Bytes data_ct;                 // Enc_{k_d}(data)
    std::optional<Bytes> key_ct;   // Enc_{shared}(k_d); absent in the stripped form
    Address owner;

    Bytes encode() const;
    static Commitment decode(Reader& r);
    Digest digest() const;
    bool operator==(const Commitment&) const = default;
};

Commitment commit_private(BytesView data, BytesView one_time_key, const SharedKey& shared,
                          const Address& owner, BytesView context);

// Stripped form c*: key slot removed, data_ct and owner unchanged. Idempotent.
Commitment strip_key_slot(Commitment c);

// Recovers the plaintext through the key slot: k_d from key_ct under
// derive_shared(sk, peer_pk), then the data under k_d. Works for the owner
// (sk_i, pk_net) and for the network (sk_net, pk_i); anyone else fails.
Bytes open_commitment(const SecretKey& sk, const PublicKey& peer_pk, const Commitment& c,
                      BytesView context);

// Seeded deterministic generator for one-time keys; owned by the simulation
// so runs replay bit-identically.
class KeyGen {
public:
    explicit KeyGen(uint64_t seed);
    Bytes next();

private:
    std::array<uint8_t, kDigestWidth> state_{};
    uint64_t counter_ = 0;
};

Digest hash_commitment_array(const std::vector<Commitment>& cs);

}  // namespace decloak
