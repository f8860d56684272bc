#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "sshlab/messages.hpp"
#include "sshlab/random.hpp"
#include "sshlab/registry.hpp"
#include "sshlab/wire.hpp"

namespace sshlab
{

inline constexpr std::size_t max_payload_size = 32768;
inline constexpr std::size_t min_padding = 4;

/// One BPP packet in plaintext form.
struct BinaryPacket
{
	std::uint32_t packet_length = 0;
	std::uint8_t padding_length = 0;
	Bytes payload;
	Bytes padding;

	/// length || padding_length || payload || padding
	Bytes serialize() const;
	bool operator==(const BinaryPacket&) const = default;
};

/// Frames an encoded payload. With `length_encrypted` the 4 length bytes take
/// part in the alignment (classic modes); otherwise only packet_length is
/// aligned (EtM, GCM, ChaCha20-Poly1305).
BinaryPacket frame_payload(Bytes payload, std::size_t block_size, bool length_encrypted, RandomSource& padding_source);

BinaryPacket encode_packet(const Message& msg, std::size_t block_size, bool length_encrypted, RandomSource& padding_source);

/// Checks the structural invariants of an outgoing packet for a given alignment rule.
bool satisfies_alignment(const BinaryPacket& p, std::size_t block_size, bool length_encrypted);

struct CriticallyCorrupt
{
	std::string reason;
	bool operator==(const CriticallyCorrupt&) const = default;
};

/// Well-formed padding, but the message id is not recognized.
struct EvasivelyCorrupt
{
	std::uint8_t id = 0;
	bool operator==(const EvasivelyCorrupt&) const = default;
};

using DecodeResult = std::variant<Message, CriticallyCorrupt, EvasivelyCorrupt>;

struct DecodeOptions
{
	const MessageIdRegistry* registry = &MessageIdRegistry::default_profile();
	/// Accept a ServiceAccept without service name (OpenSSH, PuTTY, Dropbear, libssh).
	bool allow_empty_service_accept = false;
};

/// Decodes a plaintext packet given as length field followed by the body.
/// A packet is well-formed iff 4 <= padding_length <= packet_length - 2.
DecodeResult decode_packet(ByteView plaintext, const DecodeOptions& options = {});

inline bool is_critically_corrupt(const DecodeResult& r) { return std::holds_alternative<CriticallyCorrupt>(r); }
inline bool is_evasively_corrupt(const DecodeResult& r) { return std::holds_alternative<EvasivelyCorrupt>(r); }
std::string describe(const DecodeResult& r);

// --------------------------------------------------------------------
// Version banner

inline constexpr std::size_t max_banner_line = 255;

struct VersionBanner
{
	std::string text;

	/// Validates the "SSH-2.0-" prefix, the absence of CR/LF and the line limit.
	static VersionBanner make(std::string text);
	Bytes line() const;
	bool operator==(const VersionBanner&) const = default;
};

/// Extracts the identification line from the start of a byte stream. Lines not
/// starting with "SSH-" are skipped. Returns the banner and the number of
/// bytes consumed, or nullopt if more data is needed.
std::optional<std::pair<VersionBanner, std::size_t>> parse_banner(ByteView stream);

} // namespace sshlab
