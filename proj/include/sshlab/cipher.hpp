#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "sshlab/crypto.hpp"
#include "sshlab/modes.hpp"
#include "sshlab/packet.hpp"

namespace sshlab
{

/// Key material for one direction as produced by the KDF.
struct KeyMaterial
{
	Bytes iv;
	Bytes enc_key;
	Bytes mac_key;
	bool operator==(const KeyMaterial&) const = default;
};

struct OpenFailure
{
	enum class Kind
	{
		MacMismatch,
		LengthImplausible,
	};
	Kind kind;
	std::string detail;
};

struct NeedMoreData
{
};

inline constexpr std::uint32_t max_plausible_length = 35000;

/// Per-direction BPP cipher state. Inactive until NewKeys, in which case
/// seal/open are plain framing without MAC.
class DirectionalCipherState
{
  public:
	DirectionalCipherState() = default;
	DirectionalCipherState(ModeId mode, KeyMaterial keys);

	bool active() const { return mode_.has_value(); }
	std::optional<ModeId> mode() const { return mode_; }

	/// Alignment parameters for frame_payload.
	std::size_t block_size() const;
	bool length_encrypted() const;

	/// Seals a packet under sequence number `seqno` and advances the state.
	Bytes seal(std::uint32_t seqno, const BinaryPacket& packet);

	/// Total wire size of the next packet once its first bytes are buffered.
	/// Does not modify the state.
	std::variant<std::size_t, NeedMoreData, OpenFailure> next_packet_size(ByteView buffered, std::uint32_t seqno) const;

	/// Verifies and decrypts exactly one packet. On success returns the
	/// plaintext packet (length field followed by the body) and advances the state.
	std::variant<Bytes, OpenFailure> open(std::uint32_t seqno, ByteView wire);

	const KeyMaterial& keys() const { return keys_; }
	/// CBC: IV for the next packet. CTR: next counter block. GCM: fixed||invocation counter.
	const Bytes& chain_state() const { return chain_; }

	bool operator==(const DirectionalCipherState& o) const { return mode_ == o.mode_ && keys_ == o.keys_ && chain_ == o.chain_; }

  private:
	Bytes cbc_encrypt(ByteView plain);
	Bytes cbc_decrypt(ByteView ct);
	Bytes ctr_xor(ByteView data);
	std::uint32_t peek_encrypted_length(ByteView first_block) const;
	Bytes gcm_nonce() const;
	void gcm_increment();

	std::optional<ModeId> mode_;
	KeyMaterial keys_;
	Bytes chain_;
	std::optional<crypto::Aes128> aes_;
};

/// RFC 4253 key derivation: HASH(K || H || letter || session_id), extended as needed.
Bytes derive_key(ByteView shared_secret, ByteView exchange_hash, char letter, ByteView session_id, std::size_t length);

struct KeySizes
{
	std::size_t iv;
	std::size_t enc;
	std::size_t mac;
};
KeySizes key_sizes(ModeId mode);

KeyMaterial derive_key_material(
	ByteView shared_secret, ByteView exchange_hash, ByteView session_id, ModeId mode, Direction direction);

DirectionalCipherState derive_directional_keys(
	ByteView shared_secret, ByteView exchange_hash, ByteView session_id, ModeId mode, Direction direction);

/// The MAC input of the HMAC modes, exposed so tests can recompute it externally.
Bytes eam_mac_input(std::uint32_t seqno, ByteView plaintext_packet);
Bytes etm_mac_input(std::uint32_t seqno, ByteView length_field, ByteView ciphertext);

} // namespace sshlab
