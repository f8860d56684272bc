#pragma once

// Thin RAII wrappers over OpenSSL primitives. Everything mode-specific (CBC
// chaining, CTR counters, the SSH ChaCha20-Poly1305 construction) lives in
// cipher.cpp on top of these.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>

#include "sshlab/wire.hpp"

namespace sshlab::crypto
{

inline constexpr std::size_t sha256_size = 32;

Bytes sha256(ByteView data);

class Sha256
{
  public:
	Sha256();
	~Sha256();
	Sha256(const Sha256&) = delete;
	Sha256& operator=(const Sha256&) = delete;

	Sha256& update(ByteView data);
	Bytes finish();

  private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

Bytes hmac_sha256(ByteView key, ByteView data);

bool constant_time_equal(ByteView a, ByteView b);

/// Raw AES-128 block transform (ECB on exactly one block).
class Aes128
{
  public:
	static constexpr std::size_t block_size = 16;
	using Block = std::array<std::uint8_t, block_size>;

	explicit Aes128(ByteView key);
	~Aes128();
	Aes128(Aes128&&) noexcept;
	Aes128& operator=(Aes128&&) noexcept;
	Aes128(const Aes128&) = delete;
	Aes128& operator=(const Aes128&) = delete;

	Block encrypt(const Block& in) const;
	Block decrypt(const Block& in) const;

  private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

/// AES-128-GCM. Output of seal is ciphertext || 16-byte tag.
Bytes aes128_gcm_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext);
std::optional<Bytes> aes128_gcm_open(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext_and_tag);

/// Original ChaCha20 (64-bit nonce, 64-bit block counter) keystream XOR.
Bytes chacha20_xor(ByteView key, std::uint64_t nonce, std::uint64_t counter, ByteView data);

Bytes poly1305(ByteView key, ByteView data);

class Ed25519Key
{
  public:
	static Ed25519Key from_seed(ByteView seed);

	Ed25519Key(Ed25519Key&&) noexcept;
	Ed25519Key& operator=(Ed25519Key&&) noexcept;
	~Ed25519Key();

	Bytes public_key() const { return public_; }
	Bytes sign(ByteView message) const;

	static bool verify(ByteView public_key, ByteView message, ByteView signature);

  private:
	Ed25519Key() = default;
	struct Impl;
	std::unique_ptr<Impl> impl_;
	Bytes public_;
};

// Big integers as big-endian magnitudes.

/// base^exponent mod modulus
Bytes mod_exp(ByteView base, ByteView exponent, ByteView modulus);
/// -1, 0, 1
int compare_magnitudes(ByteView a, ByteView b);
Bytes sub_word(ByteView a, std::uint32_t w);

} // namespace sshlab::crypto
