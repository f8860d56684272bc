#include "sshlab/modes.hpp"

#include <algorithm>
#include <cctype>

namespace sshlab
{

namespace
{

constexpr std::array<ModeInfo, 6> table{{
	{ModeId::CbcEaM, "cbc-eam", names::aes128_cbc, names::hmac_sha2_256, 16, 32, false, Taxonomy::NotVulnerable},
	{ModeId::CbcEtM, "cbc-etm", names::aes128_cbc, names::hmac_sha2_256_etm, 16, 32, true,
		Taxonomy::VulnerableProbabilistic},
	{ModeId::CtrEaM, "ctr-eam", names::aes128_ctr, names::hmac_sha2_256, 16, 32, false, Taxonomy::NotVulnerable},
	{ModeId::CtrEtM, "ctr-etm", names::aes128_ctr, names::hmac_sha2_256_etm, 16, 32, true,
		Taxonomy::VulnerableNotExploitable},
	{ModeId::Gcm, "gcm", names::aes128_gcm, "", 16, 16, true, Taxonomy::NotVulnerable},
	{ModeId::ChaCha20Poly1305, "chacha20-poly1305", names::chacha20_poly1305, "", 8, 16, false,
		Taxonomy::VulnerableExploitable},
}};

bool ends_with(std::string_view s, std::string_view suffix)
{
	return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace

const ModeInfo& mode_info(ModeId id)
{
	return table[static_cast<std::size_t>(id)];
}

bool is_aead_cipher(std::string_view cipher)
{
	return cipher == names::aes128_gcm || cipher == names::chacha20_poly1305;
}

std::optional<ModeId> mode_from_names(std::string_view cipher, std::string_view mac)
{
	if (cipher == names::chacha20_poly1305)
		return ModeId::ChaCha20Poly1305;
	if (cipher == names::aes128_gcm)
		return ModeId::Gcm;

	bool etm = ends_with(mac, names::etm_suffix);
	if (mac != names::hmac_sha2_256 && mac != names::hmac_sha2_256_etm)
		return std::nullopt;
	if (cipher == names::aes128_cbc)
		return etm ? ModeId::CbcEtM : ModeId::CbcEaM;
	if (cipher == names::aes128_ctr)
		return etm ? ModeId::CtrEtM : ModeId::CtrEaM;
	return std::nullopt;
}

std::optional<ModeId> parse_mode(std::string_view label)
{
	std::string l(label);
	std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	if (l == "chacha" || l == "chacha20")
		return ModeId::ChaCha20Poly1305;
	for (const auto& m : table)
		if (m.label == l)
			return m.id;
	return std::nullopt;
}

std::string to_string(Direction d)
{
	return d == Direction::ClientToServer ? "C->S" : "S->C";
}

std::string to_string(ModeId id)
{
	return std::string(mode_info(id).label);
}

std::string to_string(Taxonomy t)
{
	switch (t)
	{
		case Taxonomy::NotVulnerable: return "not_vulnerable";
		case Taxonomy::VulnerableExploitable: return "vulnerable_exploitable";
		case Taxonomy::VulnerableNotExploitable: return "vulnerable_not_exploitable";
		case Taxonomy::VulnerableProbabilistic: return "vulnerable_probabilistic";
	}
	return "?";
}

} // namespace sshlab
