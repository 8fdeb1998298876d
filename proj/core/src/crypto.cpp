#include "decloak/crypto.hpp"

#include <openssl/evp.h>

#include <memory>

namespace decloak {

namespace {

using PkeyPtr = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using CtxPtr = std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)>;
using MdPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;
using CipherPtr = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

constexpr size_t kNonceLen = 12;
constexpr size_t kTagLen = 16;

PkeyPtr raw_private(int type, BytesView key) {
    EVP_PKEY* p = EVP_PKEY_new_raw_private_key(type, nullptr, key.data(), key.size());
    if (!p) throw InvalidKey("bad raw private key");
    return PkeyPtr(p, EVP_PKEY_free);
}

PkeyPtr raw_public(int type, BytesView key) {
    if (key.size() != 32) throw InvalidKey("bad public key length");
    EVP_PKEY* p = EVP_PKEY_new_raw_public_key(type, nullptr, key.data(), key.size());
    if (!p) throw InvalidKey("bad raw public key");
    return PkeyPtr(p, EVP_PKEY_free);
}

Bytes raw_public_of(EVP_PKEY* sk) {
    size_t len = 0;
    EVP_PKEY_get_raw_public_key(sk, nullptr, &len);
    Bytes out(len);
    if (EVP_PKEY_get_raw_public_key(sk, out.data(), &len) != 1)
        throw InvalidKey("cannot extract public key");
    out.resize(len);
    return out;
}

}  // namespace

std::string hex(BytesView b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

Bytes from_hex(const std::string& s) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::runtime_error("from_hex: bad digit");
    };
    if (s.size() % 2) throw std::runtime_error("from_hex: odd length");
    Bytes out(s.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<uint8_t>(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
    return out;
}

Digest sha256(BytesView data) {
    Digest d;
    unsigned int len = 0;
    MdPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx.get(), data.data(), data.size());
    EVP_DigestFinal_ex(ctx.get(), d.bytes.data(), &len);
    return d;
}

Digest digest_of(const Writer& w) { return sha256(w.out()); }

std::string Digest::hex() const { return decloak::hex(BytesView(bytes.data(), bytes.size())); }
std::string Address::hex() const { return decloak::hex(BytesView(bytes.data(), bytes.size())); }

Bytes PublicKey::encode() const {
    Writer w;
    w.bytes(sign_pk);
    w.bytes(dh_pk);
    return w.take();
}

PublicKey PublicKey::decode(Reader& r) {
    PublicKey pk;
    pk.sign_pk = r.bytes();
    pk.dh_pk = r.bytes();
    return pk;
}

Account keygen_account(BytesView seed) {
    Writer ws;
    ws.bytes(seed);
    ws.str("sign");
    Digest sign_seed = digest_of(ws);

    Writer wd;
    wd.bytes(seed);
    wd.str("dh");
    Digest dh_seed = digest_of(wd);

    Account acc;
    acc.sk.sign_sk.assign(sign_seed.bytes.begin(), sign_seed.bytes.end());
    acc.sk.dh_sk.assign(dh_seed.bytes.begin(), dh_seed.bytes.end());

    auto sign_key = raw_private(EVP_PKEY_ED25519, acc.sk.sign_sk);
    auto dh_key = raw_private(EVP_PKEY_X25519, acc.sk.dh_sk);
    acc.pk.sign_pk = raw_public_of(sign_key.get());
    acc.pk.dh_pk = raw_public_of(dh_key.get());

    Digest ad = sha256(acc.pk.encode());
    std::copy_n(ad.bytes.begin(), kAddressWidth, acc.ad.bytes.begin());
    return acc;
}

SharedKey derive_shared(const SecretKey& sk, const PublicKey& pk) {
    auto priv = raw_private(EVP_PKEY_X25519, sk.dh_sk);
    auto peer = raw_public(EVP_PKEY_X25519, pk.dh_pk);
    CtxPtr ctx(EVP_PKEY_CTX_new(priv.get(), nullptr), EVP_PKEY_CTX_free);
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
        EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) != 1)
        throw InvalidKey("X25519 derive setup failed");
    size_t len = 0;
    EVP_PKEY_derive(ctx.get(), nullptr, &len);
    Bytes secret(len);
    if (EVP_PKEY_derive(ctx.get(), secret.data(), &len) != 1)
        throw InvalidKey("X25519 derive failed");
    secret.resize(len);
    SharedKey out;
    out.key = sha256(secret).bytes;
    return out;
}

Bytes sign(const SecretKey& sk, BytesView message) {
    auto key = raw_private(EVP_PKEY_ED25519, sk.sign_sk);
    MdPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
        throw InvalidKey("sign init failed");
    size_t len = 0;
    EVP_DigestSign(ctx.get(), nullptr, &len, message.data(), message.size());
    Bytes sig(len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1)
        throw InvalidKey("sign failed");
    sig.resize(len);
    return sig;
}

bool verify_sig(const PublicKey& pk, BytesView message, BytesView signature) {
    try {
        auto key = raw_public(EVP_PKEY_ED25519, pk.sign_pk);
        MdPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
        if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
            return false;
        return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                                message.size()) == 1;
    } catch (const InvalidKey&) {
        return false;
    }
}

Bytes sym_encrypt(BytesView key, BytesView plaintext, BytesView context) {
    if (key.size() != kSymKeyWidth) throw InvalidKey("symmetric key must be 32 bytes");

    // Deterministic SIV-style nonce: a function of key, context and plaintext.
    Writer wn;
    wn.bytes(key);
    wn.bytes(context);
    wn.bytes(plaintext);
    wn.str("nonce");
    Digest nd = digest_of(wn);

    Bytes out(kNonceLen + kTagLen + plaintext.size());
    std::copy_n(nd.bytes.begin(), kNonceLen, out.begin());

    CipherPtr ctx_(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    EVP_EncryptInit_ex(ctx_.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr);
    EVP_CIPHER_CTX_ctrl(ctx_.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr);
    EVP_EncryptInit_ex(ctx_.get(), nullptr, nullptr, key.data(), out.data());
    int outl = 0;
    if (!context.empty())
        EVP_EncryptUpdate(ctx_.get(), nullptr, &outl, context.data(), context.size());
    EVP_EncryptUpdate(ctx_.get(), out.data() + kNonceLen + kTagLen, &outl, plaintext.data(),
                      plaintext.size());
    int fin = 0;
    EVP_EncryptFinal_ex(ctx_.get(), out.data() + kNonceLen + kTagLen + outl, &fin);
    EVP_CIPHER_CTX_ctrl(ctx_.get(), EVP_CTRL_GCM_GET_TAG, kTagLen, out.data() + kNonceLen);
    return out;
}

std::optional<Bytes> try_sym_decrypt(BytesView key, BytesView ciphertext, BytesView context) {
    if (key.size() != kSymKeyWidth) return std::nullopt;
    if (ciphertext.size() < kNonceLen + kTagLen) return std::nullopt;

    const uint8_t* nonce = ciphertext.data();
    Bytes tag(ciphertext.begin() + kNonceLen, ciphertext.begin() + kNonceLen + kTagLen);
    const uint8_t* ct = ciphertext.data() + kNonceLen + kTagLen;
    size_t ct_len = ciphertext.size() - kNonceLen - kTagLen;

    Bytes out(ct_len);
    CipherPtr ctx_(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    EVP_DecryptInit_ex(ctx_.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr);
    EVP_CIPHER_CTX_ctrl(ctx_.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr);
    EVP_DecryptInit_ex(ctx_.get(), nullptr, nullptr, key.data(), nonce);
    int outl = 0;
    if (!context.empty())
        EVP_DecryptUpdate(ctx_.get(), nullptr, &outl, context.data(), context.size());
    EVP_DecryptUpdate(ctx_.get(), out.data(), &outl, ct, ct_len);
    EVP_CIPHER_CTX_ctrl(ctx_.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data());
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx_.get(), out.data() + outl, &fin) != 1) return std::nullopt;
    return out;
}

Bytes sym_decrypt(BytesView key, BytesView ciphertext, BytesView context) {
    auto pt = try_sym_decrypt(key, ciphertext, context);
    if (!pt) throw AuthFailure("decryption failed: wrong key or tampered ciphertext");
    return *pt;
}

Bytes Commitment::encode() const {
    Writer w;
    w.bytes(data_ct);
    w.opt_bytes(key_ct);
    w.fixed(owner.bytes);
    return w.take();
}

Commitment Commitment::decode(Reader& r) {
    Commitment c;
    c.data_ct = r.bytes();
    c.key_ct = r.opt_bytes();
    c.owner.bytes = r.fixed<kAddressWidth>();
    return c;
}

Digest Commitment::digest() const { return sha256(encode()); }

Commitment commit_private(BytesView data, BytesView one_time_key, const SharedKey& shared,
                          const Address& owner, BytesView context) {
    Writer wd;
    wd.bytes(context);
    wd.str("data");
    Writer wk;
    wk.bytes(context);
    wk.str("key");
    Commitment c;
    c.data_ct = sym_encrypt(one_time_key, data, wd.out());
    c.key_ct = sym_encrypt(BytesView(shared.key.data(), shared.key.size()), one_time_key, wk.out());
    c.owner = owner;
    return c;
}

Commitment strip_key_slot(Commitment c) {
    c.key_ct.reset();
    return c;
}

Bytes open_commitment(const SecretKey& sk, const PublicKey& peer_pk, const Commitment& c,
                      BytesView context) {
    if (!c.key_ct) throw MissingKeySlot("commitment is stripped");
    SharedKey shared = derive_shared(sk, peer_pk);
    Writer wk;
    wk.bytes(context);
    wk.str("key");
    Bytes k_d = sym_decrypt(BytesView(shared.key.data(), shared.key.size()), *c.key_ct, wk.out());
    Writer wd;
    wd.bytes(context);
    wd.str("data");
    return sym_decrypt(k_d, c.data_ct, wd.out());
}

KeyGen::KeyGen(uint64_t seed) {
    Writer w;
    w.u64(seed);
    w.str("keygen");
    state_ = digest_of(w).bytes;
}

Bytes KeyGen::next() {
    Writer w;
    w.fixed(state_);
    w.u64(counter_++);
    Digest d = digest_of(w);
    return Bytes(d.bytes.begin(), d.bytes.end());
}

Digest hash_commitment_array(const std::vector<Commitment>& cs) {
    Writer w;
    w.u32(static_cast<uint32_t>(cs.size()));
    for (const auto& c : cs) w.fixed(c.digest().bytes);
    return digest_of(w);
}

}  // namespace decloak
