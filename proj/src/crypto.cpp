#include "sshlab/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/params.h>

#include <stdexcept>

namespace sshlab::crypto
{

namespace
{

[[noreturn]] void fail(const char* what)
{
	throw std::runtime_error(std::string("openssl: ") + what);
}

struct CipherCtxDeleter
{
	void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

struct BnDeleter
{
	void operator()(BIGNUM* b) const { BN_free(b); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;

Bn to_bn(ByteView b)
{
	Bn bn(BN_bin2bn(b.data(), static_cast<int>(b.size()), nullptr));
	if (!bn)
		fail("BN_bin2bn");
	return bn;
}

Bytes from_bn(const BIGNUM* bn)
{
	Bytes out(static_cast<std::size_t>(BN_num_bytes(bn)));
	BN_bn2bin(bn, out.data());
	return out;
}

} // namespace

Bytes sha256(ByteView data)
{
	Bytes out(sha256_size);
	unsigned int len = 0;
	if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1)
		fail("EVP_Digest");
	return out;
}

struct Sha256::Impl
{
	EVP_MD_CTX* ctx = EVP_MD_CTX_new();
	~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>())
{
	if (EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1)
		fail("EVP_DigestInit_ex");
}

Sha256::~Sha256() = default;

Sha256& Sha256::update(ByteView data)
{
	if (EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1)
		fail("EVP_DigestUpdate");
	return *this;
}

Bytes Sha256::finish()
{
	Bytes out(sha256_size);
	unsigned int len = 0;
	if (EVP_DigestFinal_ex(impl_->ctx, out.data(), &len) != 1)
		fail("EVP_DigestFinal_ex");
	return out;
}

Bytes hmac_sha256(ByteView key, ByteView data)
{
	Bytes out(sha256_size);
	unsigned int len = 0;
	if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len))
		fail("HMAC");
	return out;
}

bool constant_time_equal(ByteView a, ByteView b)
{
	return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

// --------------------------------------------------------------------

struct Aes128::Impl
{
	CipherCtx enc{EVP_CIPHER_CTX_new()};
	CipherCtx dec{EVP_CIPHER_CTX_new()};
};

Aes128::Aes128(ByteView key) : impl_(std::make_unique<Impl>())
{
	if (key.size() != 16)
		throw std::invalid_argument("AES-128 key must be 16 bytes");
	if (EVP_EncryptInit_ex(impl_->enc.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1 ||
		EVP_DecryptInit_ex(impl_->dec.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1)
		fail("AES init");
	EVP_CIPHER_CTX_set_padding(impl_->enc.get(), 0);
	EVP_CIPHER_CTX_set_padding(impl_->dec.get(), 0);
}

Aes128::~Aes128() = default;
Aes128::Aes128(Aes128&&) noexcept = default;
Aes128& Aes128::operator=(Aes128&&) noexcept = default;

Aes128::Block Aes128::encrypt(const Block& in) const
{
	Block out{};
	int len = 0;
	if (EVP_EncryptUpdate(impl_->enc.get(), out.data(), &len, in.data(), block_size) != 1 || len != block_size)
		fail("AES encrypt");
	return out;
}

Aes128::Block Aes128::decrypt(const Block& in) const
{
	Block out{};
	int len = 0;
	if (EVP_DecryptUpdate(impl_->dec.get(), out.data(), &len, in.data(), block_size) != 1 || len != block_size)
		fail("AES decrypt");
	return out;
}

// --------------------------------------------------------------------

Bytes aes128_gcm_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext)
{
	CipherCtx ctx(EVP_CIPHER_CTX_new());
	int len = 0;
	if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
		EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr) != 1 ||
		EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1 ||
		EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
		fail("GCM seal init");

	Bytes out(plaintext.size() + 16);
	if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1)
		fail("GCM seal");
	int fin = 0;
	if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1 ||
		EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, 16, out.data() + plaintext.size()) != 1)
		fail("GCM tag");
	return out;
}

std::optional<Bytes> aes128_gcm_open(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext_and_tag)
{
	if (ciphertext_and_tag.size() < 16)
		return std::nullopt;
	auto ct = ciphertext_and_tag.first(ciphertext_and_tag.size() - 16);
	Bytes tag(ciphertext_and_tag.end() - 16, ciphertext_and_tag.end());

	CipherCtx ctx(EVP_CIPHER_CTX_new());
	int len = 0;
	if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
		EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr) != 1 ||
		EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1 ||
		EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
		fail("GCM open init");

	Bytes out(ct.size());
	if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct.data(), static_cast<int>(ct.size())) != 1)
		fail("GCM open");
	if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, 16, tag.data()) != 1)
		fail("GCM set tag");
	int fin = 0;
	if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
		return std::nullopt;
	return out;
}

// --------------------------------------------------------------------

Bytes chacha20_xor(ByteView key, std::uint64_t nonce, std::uint64_t counter, ByteView data)
{
	if (key.size() != 32)
		throw std::invalid_argument("ChaCha20 key must be 32 bytes");

	// OpenSSL takes a 16-byte IV holding state words 12..15 little-endian.
	// Words 12/13 are the 64-bit block counter, 14/15 the 64-bit nonce, which
	// the SSH construction sets to the big-endian sequence number.
	std::uint8_t iv[16];
	for (int i = 0; i < 8; ++i)
		iv[i] = static_cast<std::uint8_t>(counter >> (8 * i));
	for (int i = 0; i < 8; ++i)
		iv[8 + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));

	CipherCtx ctx(EVP_CIPHER_CTX_new());
	Bytes out(data.size());
	int len = 0;
	if (EVP_EncryptInit_ex(ctx.get(), EVP_chacha20(), nullptr, key.data(), iv) != 1 ||
		(!data.empty() && EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(), static_cast<int>(data.size())) != 1))
		fail("ChaCha20");
	return out;
}

Bytes poly1305(ByteView key, ByteView data)
{
	EVP_MAC* mac = EVP_MAC_fetch(nullptr, "POLY1305", nullptr);
	if (!mac)
		fail("EVP_MAC_fetch POLY1305");
	EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
	Bytes out(16);
	std::size_t len = 0;
	bool ok = ctx && EVP_MAC_init(ctx, key.data(), key.size(), nullptr) == 1 &&
			  EVP_MAC_update(ctx, data.data(), data.size()) == 1 && EVP_MAC_final(ctx, out.data(), &len, out.size()) == 1;
	EVP_MAC_CTX_free(ctx);
	EVP_MAC_free(mac);
	if (!ok || len != 16)
		fail("Poly1305");
	return out;
}

// --------------------------------------------------------------------

struct Ed25519Key::Impl
{
	EVP_PKEY* key = nullptr;
	~Impl() { EVP_PKEY_free(key); }
};

Ed25519Key::Ed25519Key(Ed25519Key&&) noexcept = default;
Ed25519Key& Ed25519Key::operator=(Ed25519Key&&) noexcept = default;
Ed25519Key::~Ed25519Key() = default;

Ed25519Key Ed25519Key::from_seed(ByteView seed)
{
	if (seed.size() != 32)
		throw std::invalid_argument("Ed25519 seed must be 32 bytes");

	Ed25519Key k;
	k.impl_ = std::make_unique<Impl>();
	k.impl_->key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size());
	if (!k.impl_->key)
		fail("Ed25519 key");

	std::size_t len = 32;
	k.public_.resize(32);
	if (EVP_PKEY_get_raw_public_key(k.impl_->key, k.public_.data(), &len) != 1)
		fail("Ed25519 public key");
	return k;
}

Bytes Ed25519Key::sign(ByteView message) const
{
	EVP_MD_CTX* ctx = EVP_MD_CTX_new();
	Bytes sig(64);
	std::size_t len = sig.size();
	bool ok = EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, impl_->key) == 1 &&
			  EVP_DigestSign(ctx, sig.data(), &len, message.data(), message.size()) == 1;
	EVP_MD_CTX_free(ctx);
	if (!ok)
		fail("Ed25519 sign");
	return sig;
}

bool Ed25519Key::verify(ByteView public_key, ByteView message, ByteView signature)
{
	if (public_key.size() != 32 || signature.size() != 64)
		return false;
	EVP_PKEY* key = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size());
	if (!key)
		return false;
	EVP_MD_CTX* ctx = EVP_MD_CTX_new();
	bool ok = EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
			  EVP_DigestVerify(ctx, signature.data(), signature.size(), message.data(), message.size()) == 1;
	EVP_MD_CTX_free(ctx);
	EVP_PKEY_free(key);
	return ok;
}

// --------------------------------------------------------------------

Bytes mod_exp(ByteView base, ByteView exponent, ByteView modulus)
{
	auto b = to_bn(base);
	auto e = to_bn(exponent);
	auto m = to_bn(modulus);
	Bn r(BN_new());
	BN_CTX* ctx = BN_CTX_new();
	bool ok = r && ctx && BN_mod_exp(r.get(), b.get(), e.get(), m.get(), ctx) == 1;
	BN_CTX_free(ctx);
	if (!ok)
		fail("BN_mod_exp");
	return from_bn(r.get());
}

int compare_magnitudes(ByteView a, ByteView b)
{
	auto x = to_bn(a);
	auto y = to_bn(b);
	return BN_cmp(x.get(), y.get());
}

Bytes sub_word(ByteView a, std::uint32_t w)
{
	auto x = to_bn(a);
	if (BN_sub_word(x.get(), w) != 1)
		fail("BN_sub_word");
	return from_bn(x.get());
}

} // namespace sshlab::crypto
