#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sshlab/messages.hpp"
#include "sshlab/peer.hpp"

namespace sshlab
{

enum class CipherFamily
{
	ChaCha20Poly1305,
	AesCtr,
	AesGcm,
	AesCbc,
	Other,
	Unknown,
};

/// Cipher mode combined with the MAC construction; AEAD modes ignore MACs.
enum class AeMode
{
	ChaCha20Poly1305,
	CtrEaM,
	Gcm,
	CtrEtM,
	CbcEaM,
	CbcEtM,
	Other,
	Unknown,
};

enum class Exposure
{
	PerfectlyExploitable,
	ProbabilisticallyExploitable,
	VulnerableNotExploitable,
	NotVulnerable,
};

std::string to_string(CipherFamily f);
std::string to_string(AeMode m);
std::string to_string(Exposure e);

CipherFamily cipher_family(std::string_view cipher);
/// EtM iff the MAC name carries the EtM suffix.
AeMode ae_mode(std::string_view cipher, std::string_view mac);

struct ServerObservation
{
	std::string target;
	std::optional<std::string> banner;
	std::optional<KexInit> kexinit;
	bool ext_info_signaled = false;
	/// Content of the first ExtInfo, when the key exchange completed.
	ExtensionList extensions_offered;
	std::set<std::string> countermeasure_signals;
	bool handshake_completed = false;
	std::optional<std::string> error;
};

/// Fills the signal fields from the server's kex list.
void read_signals(ServerObservation& obs);

struct ExposureClassification
{
	CipherFamily preferred_family = CipherFamily::Unknown;
	AeMode preferred_mode = AeMode::Unknown;
	std::set<CipherFamily> supported_families;
	std::set<AeMode> supported_modes;
	Exposure verdict = Exposure::NotVulnerable;
	bool prefers_vulnerable = false;
};

/// Pure function of the server-to-client lists. Without a KexInit the
/// server lands in the Unknown bucket.
ExposureClassification classify(const ServerObservation& obs);

struct FleetReport
{
	std::size_t total = 0;
	std::map<CipherFamily, std::size_t> family_preferred;
	std::map<CipherFamily, std::size_t> family_supported;
	std::map<AeMode, std::size_t> mode_preferred;
	std::map<AeMode, std::size_t> mode_supported;
	std::map<Exposure, std::size_t> verdicts;
	/// Supports ChaCha20-Poly1305 or CBC-EtM.
	std::size_t vulnerable_support = 0;
	/// Supports both ChaCha20-Poly1305 and CBC-EtM.
	std::size_t both_vulnerable = 0;
	std::size_t prefers_vulnerable = 0;
	std::size_t ext_info_signaled = 0;
	std::map<std::string, std::size_t> extensions_offered;
	std::map<std::string, std::size_t> countermeasure_signals;
	std::size_t errors = 0;

	static double percent(std::size_t count, std::size_t total);
};

FleetReport aggregate(const std::vector<ServerObservation>& observations);

nlohmann::json to_json(const ServerObservation& obs);
nlohmann::json to_json(const FleetReport& r);
/// name,preferred,preferred_pct,supported,supported_pct
std::string family_csv(const FleetReport& r);
std::string mode_csv(const FleetReport& r);
/// name,offered,offered_pct
std::string extension_csv(const FleetReport& r);
std::string format_tables(const FleetReport& r);

// --------------------------------------------------------------------
// Simulated fleet

struct FleetGroup
{
	std::string name;
	std::size_t count = 0;
	std::string software = "OpenSSH_9.3";
	std::vector<std::string> ciphers;
	std::vector<std::string> macs;
	ExtensionList extensions;
	bool signal_ext_info = true;
	bool send_kexinit = true;
	Countermeasures countermeasures;
	/// Expected classification, carried through untouched for tests.
	nlohmann::json expect;
};

struct FleetConfig
{
	std::vector<FleetGroup> groups;

	std::size_t size() const;
	static FleetConfig from_json(const nlohmann::json& j);
	static FleetConfig load(const std::string& path);
};

PeerConfig server_config(const FleetGroup& group, std::uint64_t seed);
/// Banner, KexInit and first ExtInfo of an in-process server; never requests a service.
ServerObservation probe_simulated(const PeerConfig& server, std::string target, std::uint64_t seed = 1);
std::vector<ServerObservation> scan_fleet(const FleetConfig& fleet, std::uint64_t seed = 1, unsigned threads = 0);

// --------------------------------------------------------------------
// Live TCP

class ScanRefused : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

struct Target
{
	std::string host;
	std::uint16_t port = 22;
	std::string label() const { return host + ":" + std::to_string(port); }
};

/// One host[:port] per line; '#' starts a comment.
std::vector<Target> parse_targets(const std::string& text);

/// Exact hosts, host:port pairs and IPv4 CIDR ranges.
class Blocklist
{
  public:
	static Blocklist parse(const std::string& text);
	static Blocklist load(const std::string& path);
	bool blocks(const Target& t) const;
	std::size_t size() const { return exact_.size() + ranges_.size(); }

  private:
	std::set<std::string> exact_;
	std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges_;
};

struct LiveScanOptions
{
	/// Must be set explicitly; live scanning is refused otherwise.
	bool acknowledged = false;
	double rate_per_second = 10;
	unsigned workers = 4;
	std::chrono::milliseconds connect_timeout{3000};
	std::chrono::milliseconds read_timeout{5000};
	std::string client_banner = "SSH-2.0-SSHLab_scanner_1.0 research scan; opt-out via blocklist";
	Blocklist blocklist;
};

/// Parses the server's first bytes: banner, then one plaintext KexInit packet.
/// Returns nullopt while more bytes are needed.
std::optional<ServerObservation> observe_server_bytes(std::string target, ByteView data);

/// Sends the client banner only and reads banner + KexInit.
ServerObservation probe_tcp(const Target& target, const LiveScanOptions& options);
/// Throws ScanRefused unless options.acknowledged; blocked targets are skipped.
std::vector<ServerObservation> scan_live(const std::vector<Target>& targets, const LiveScanOptions& options);

} // namespace sshlab
