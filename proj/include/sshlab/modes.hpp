#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace sshlab
{

enum class Direction
{
	ClientToServer,
	ServerToClient,
};

inline Direction opposite(Direction d)
{
	return d == Direction::ClientToServer ? Direction::ServerToClient : Direction::ClientToServer;
}

std::string to_string(Direction d);

enum class ModeId
{
	CbcEaM,
	CbcEtM,
	CtrEaM,
	CtrEtM,
	Gcm,
	ChaCha20Poly1305,
};

inline constexpr std::array<ModeId, 6> all_modes{
	ModeId::CbcEaM, ModeId::CbcEtM, ModeId::CtrEaM, ModeId::CtrEtM, ModeId::Gcm, ModeId::ChaCha20Poly1305};

/// Exposure of a mode to prefix truncation.
enum class Taxonomy
{
	NotVulnerable,
	VulnerableExploitable,
	VulnerableNotExploitable,
	VulnerableProbabilistic,
};

namespace names
{
inline constexpr std::string_view aes128_cbc = "aes128-cbc";
inline constexpr std::string_view aes128_ctr = "aes128-ctr";
inline constexpr std::string_view aes128_gcm = "aes128-gcm@openssh.com";
inline constexpr std::string_view chacha20_poly1305 = "chacha20-poly1305@openssh.com";
inline constexpr std::string_view hmac_sha2_256 = "hmac-sha2-256";
inline constexpr std::string_view hmac_sha2_256_etm = "hmac-sha2-256-etm@openssh.com";
inline constexpr std::string_view etm_suffix = "-etm@openssh.com";
} // namespace names

/// Everything about a mode that can be known without keys: framing and taxonomy.
struct ModeInfo
{
	ModeId id;
	std::string_view label;
	std::string_view cipher_name;
	/// Empty for AEAD modes.
	std::string_view mac_name;
	std::size_t block_size;
	/// Bytes of MAC or tag appended after the packet.
	std::size_t tag_size;
	bool length_in_clear;
	Taxonomy taxonomy;

	bool aead() const { return mac_name.empty(); }
};

const ModeInfo& mode_info(ModeId id);

/// Maps a negotiated (cipher, mac) pair to a mode; AEAD ciphers ignore the MAC.
std::optional<ModeId> mode_from_names(std::string_view cipher, std::string_view mac);
std::optional<ModeId> parse_mode(std::string_view label);
std::string to_string(ModeId id);
std::string to_string(Taxonomy t);

bool is_aead_cipher(std::string_view cipher);

} // namespace sshlab
