#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "sshlab/crypto.hpp"
#include "sshlab/messages.hpp"
#include "sshlab/modes.hpp"
#include "sshlab/packet.hpp"
#include "sshlab/random.hpp"

namespace sshlab
{

class HandshakeError : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

class NegotiationError : public HandshakeError
{
  public:
	using HandshakeError::HandshakeError;
};

namespace names
{
inline constexpr std::string_view kex_dh_group14 = "diffie-hellman-group14-sha256";
inline constexpr std::string_view ssh_ed25519 = "ssh-ed25519";
inline constexpr std::string_view compression_none = "none";
} // namespace names

/// Pseudo-algorithm names carried in the kex list to signal features.
struct Signals
{
	std::string ext_info_c = "ext-info-c";
	std::string ext_info_s = "ext-info-s";
	std::string seq_reset_c = "seq-reset-c";
	std::string seq_reset_s = "seq-reset-s";
	std::string xmac_c = "xmac-c";
	std::string xmac_s = "xmac-s";

	bool is_indicator(std::string_view name) const;
};

struct NegotiationResult
{
	std::string kex;
	std::string host_key;
	/// Indexed by Direction.
	std::array<std::string, 2> cipher;
	std::array<std::string, 2> mac;
	std::array<ModeId, 2> mode{};

	/// The client signaled ext-info-c: the server may send ExtInfo.
	bool ext_info_enabled = false;
	/// The server signaled ext-info-s: the client may send ExtInfo.
	bool client_ext_info_enabled = false;
	bool seq_reset_enabled = false;
	bool transcript_mac_enabled = false;

	ModeId mode_for(Direction d) const { return mode[static_cast<std::size_t>(d)]; }
	bool operator==(const NegotiationResult&) const = default;
};

/// Picks, per list, the first client algorithm the server also offers.
/// Indicator names never take part. Throws NegotiationError.
NegotiationResult negotiate(const KexInit& client, const KexInit& server, const Signals& signals = {});

// --------------------------------------------------------------------
// Diffie-Hellman over the 2048-bit MODP group 14

const Bytes& group14_prime();
inline constexpr std::size_t dh_exponent_bytes = 32;

struct DhKeyPair
{
	Bytes secret;
	Bytes pub;
};

DhKeyPair dh_generate(RandomSource& ephemeral_source);
DhKeyPair dh_from_secret(ByteView secret);
/// 2 <= v <= p - 2
bool dh_value_in_range(ByteView v);
/// Throws HandshakeError when the peer value is out of range.
Bytes dh_shared_secret(const DhKeyPair& own, ByteView peer_pub);

// --------------------------------------------------------------------
// Exchange hash

struct TranscriptInputs
{
	VersionBanner v_c;
	VersionBanner v_s;
	Bytes i_c;
	Bytes i_s;
	Bytes k_s;
	Bytes e;
	Bytes f;
	Bytes k;
};

/// SHA-256 over string V_C, string V_S, string I_C, string I_S, string K_S,
/// mpint e, mpint f, mpint K.
Bytes exchange_hash(const TranscriptInputs& t);

// --------------------------------------------------------------------
// Host key

/// Fixed seed of the lab's test host key.
const Bytes& default_host_key_seed();

Bytes encode_host_key_blob(ByteView ed25519_public);
Bytes sign_exchange_hash(const crypto::Ed25519Key& key, ByteView exchange_hash);
/// Parses both blobs; any mismatch or parse error rejects.
bool verify_exchange_hash(ByteView host_key_blob, ByteView exchange_hash, ByteView signature_blob);

// --------------------------------------------------------------------
// Full transcript for the transcript-MAC countermeasure

class FullTranscript
{
  public:
	struct Entry
	{
		Direction direction;
		Bytes packet;
		bool operator==(const Entry&) const = default;
	};

	void set_banners(VersionBanner v_c, VersionBanner v_s);
	void append(Direction d, Bytes plaintext_packet);

	const std::vector<Entry>& entries() const { return entries_; }
	std::size_t size() const { return entries_.size(); }

	/// string V_C, string V_S, then per direction (C->S first) a u32 count
	/// followed by each packet as a string.
	Bytes mac_input() const;

	bool operator==(const FullTranscript&) const = default;

  private:
	VersionBanner v_c_;
	VersionBanner v_s_;
	std::vector<Entry> entries_;
};

/// HMAC-SHA-256 over mac_input(), keyed with HASH(K || H || "T" || session_id).
Bytes transcript_mac(const FullTranscript& ft, ByteView shared_secret, ByteView exchange_hash, ByteView session_id);

} // namespace sshlab
