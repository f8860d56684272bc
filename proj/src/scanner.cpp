#include "sshlab/scanner.hpp"

#include <algorithm>
#include <arpa/inet.h>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <netdb.h>
#include <poll.h>
#include <sstream>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>

#include "sshlab/fabric.hpp"
#include "sshlab/packet.hpp"

namespace sshlab
{

std::string to_string(CipherFamily f)
{
	switch (f)
	{
		case CipherFamily::ChaCha20Poly1305: return "ChaCha20-Poly1305";
		case CipherFamily::AesCtr: return "AES-CTR";
		case CipherFamily::AesGcm: return "AES-GCM";
		case CipherFamily::AesCbc: return "AES-CBC";
		case CipherFamily::Other: return "Other";
		case CipherFamily::Unknown: return "Unknown / No KexInit";
	}
	return "?";
}

std::string to_string(AeMode m)
{
	switch (m)
	{
		case AeMode::ChaCha20Poly1305: return "ChaCha20-Poly1305";
		case AeMode::CtrEaM: return "CTR-EaM";
		case AeMode::Gcm: return "GCM";
		case AeMode::CtrEtM: return "CTR-EtM";
		case AeMode::CbcEaM: return "CBC-EaM";
		case AeMode::CbcEtM: return "CBC-EtM";
		case AeMode::Other: return "Other";
		case AeMode::Unknown: return "Unknown / No KexInit";
	}
	return "?";
}

std::string to_string(Exposure e)
{
	switch (e)
	{
		case Exposure::PerfectlyExploitable: return "perfectly_exploitable";
		case Exposure::ProbabilisticallyExploitable: return "probabilistically_exploitable";
		case Exposure::VulnerableNotExploitable: return "vulnerable_not_exploitable";
		case Exposure::NotVulnerable: return "not_vulnerable";
	}
	return "?";
}

CipherFamily cipher_family(std::string_view c)
{
	if (c == "chacha20-poly1305@openssh.com")
		return CipherFamily::ChaCha20Poly1305;
	if (c.starts_with("aes") && c.ends_with("-ctr"))
		return CipherFamily::AesCtr;
	if (c.starts_with("aes") && (c.ends_with("-gcm@openssh.com") || c.ends_with("-gcm")))
		return CipherFamily::AesGcm;
	if ((c.starts_with("aes") && c.ends_with("-cbc")) || c == "rijndael-cbc@lysator.liu.se")
		return CipherFamily::AesCbc;
	return CipherFamily::Other;
}

AeMode ae_mode(std::string_view cipher, std::string_view mac)
{
	const bool etm = mac.ends_with(names::etm_suffix);
	switch (cipher_family(cipher))
	{
		case CipherFamily::ChaCha20Poly1305: return AeMode::ChaCha20Poly1305;
		case CipherFamily::AesGcm: return AeMode::Gcm;
		case CipherFamily::AesCtr: return etm ? AeMode::CtrEtM : AeMode::CtrEaM;
		case CipherFamily::AesCbc: return etm ? AeMode::CbcEtM : AeMode::CbcEaM;
		default: return AeMode::Other;
	}
}

namespace
{

bool aead(CipherFamily f)
{
	return f == CipherFamily::ChaCha20Poly1305 || f == CipherFamily::AesGcm;
}

bool vulnerable(AeMode m)
{
	return m == AeMode::ChaCha20Poly1305 || m == AeMode::CbcEtM;
}

} // namespace

void read_signals(ServerObservation& obs)
{
	obs.ext_info_signaled = false;
	obs.countermeasure_signals.clear();
	if (!obs.kexinit)
		return;
	const Signals s;
	for (const auto& name : obs.kexinit->kex_algorithms)
	{
		if (name == s.ext_info_s)
			obs.ext_info_signaled = true;
		else if (name == s.seq_reset_s || name == s.xmac_s || name == "kex-strict-s-v00@openssh.com")
			obs.countermeasure_signals.insert(name);
	}
}

ExposureClassification classify(const ServerObservation& obs)
{
	ExposureClassification c;
	if (!obs.kexinit || obs.kexinit->ciphers_s2c.empty())
		return c;

	const auto& ciphers = obs.kexinit->ciphers_s2c;
	const auto& macs = obs.kexinit->macs_s2c;

	c.preferred_family = cipher_family(ciphers.front());
	if (aead(c.preferred_family))
		c.preferred_mode = ae_mode(ciphers.front(), "");
	else if (c.preferred_family == CipherFamily::Other || macs.empty())
		c.preferred_mode = AeMode::Other;
	else
		c.preferred_mode = ae_mode(ciphers.front(), macs.front());

	for (const auto& cipher : ciphers)
	{
		const auto f = cipher_family(cipher);
		if (f == CipherFamily::Other)
			continue;
		c.supported_families.insert(f);
		if (aead(f))
			c.supported_modes.insert(ae_mode(cipher, ""));
		else
			for (const auto& mac : macs)
				c.supported_modes.insert(ae_mode(cipher, mac));
	}

	if (c.supported_modes.contains(AeMode::ChaCha20Poly1305))
		c.verdict = Exposure::PerfectlyExploitable;
	else if (c.supported_modes.contains(AeMode::CbcEtM))
		c.verdict = Exposure::ProbabilisticallyExploitable;
	else if (c.supported_modes.contains(AeMode::CtrEtM))
		c.verdict = Exposure::VulnerableNotExploitable;
	c.prefers_vulnerable = vulnerable(c.preferred_mode);
	return c;
}

double FleetReport::percent(std::size_t count, std::size_t total)
{
	return total ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
}

FleetReport aggregate(const std::vector<ServerObservation>& observations)
{
	if (observations.empty())
		throw std::invalid_argument("nothing to aggregate");

	FleetReport r;
	for (const auto& obs : observations)
	{
		++r.total;
		const auto c = classify(obs);
		++r.family_preferred[c.preferred_family];
		++r.mode_preferred[c.preferred_mode];
		for (auto f : c.supported_families)
			++r.family_supported[f];
		for (auto m : c.supported_modes)
			++r.mode_supported[m];
		++r.verdicts[c.verdict];
		const bool chacha = c.supported_modes.contains(AeMode::ChaCha20Poly1305);
		const bool cbc_etm = c.supported_modes.contains(AeMode::CbcEtM);
		r.vulnerable_support += chacha || cbc_etm;
		r.both_vulnerable += chacha && cbc_etm;
		r.prefers_vulnerable += c.prefers_vulnerable;
		r.ext_info_signaled += obs.ext_info_signaled;
		std::set<std::string> names;
		for (const auto& [name, value] : obs.extensions_offered)
			names.insert(name);
		for (const auto& n : names)
			++r.extensions_offered[n];
		for (const auto& s : obs.countermeasure_signals)
			++r.countermeasure_signals[s];
		r.errors += obs.error.has_value();
	}
	return r;
}

nlohmann::json to_json(const ServerObservation& obs)
{
	nlohmann::json j;
	j["target"] = obs.target;
	j["banner"] = obs.banner ? nlohmann::json(*obs.banner) : nlohmann::json();
	if (obs.kexinit)
	{
		const auto& k = *obs.kexinit;
		j["kexinit"] = {{"kex_algorithms", k.kex_algorithms}, {"host_key_algorithms", k.host_key_algorithms},
			{"ciphers_c2s", k.ciphers_c2s}, {"ciphers_s2c", k.ciphers_s2c}, {"macs_c2s", k.macs_c2s},
			{"macs_s2c", k.macs_s2c}, {"compression_c2s", k.compression_c2s}, {"compression_s2c", k.compression_s2c},
			{"languages_c2s", k.languages_c2s}, {"languages_s2c", k.languages_s2c}};
	}
	else
		j["kexinit"] = nullptr;
	j["ext_info_signaled"] = obs.ext_info_signaled;
	auto ext = nlohmann::json::array();
	for (const auto& [k, v] : obs.extensions_offered)
		ext.push_back({k, v});
	j["extensions_offered"] = ext;
	j["countermeasure_signals"] = obs.countermeasure_signals;
	j["handshake_completed"] = obs.handshake_completed;
	j["error"] = obs.error ? nlohmann::json(*obs.error) : nlohmann::json();
	const auto c = classify(obs);
	j["classification"] = {{"preferred_family", to_string(c.preferred_family)},
		{"preferred_mode", to_string(c.preferred_mode)}, {"verdict", to_string(c.verdict)},
		{"prefers_vulnerable", c.prefers_vulnerable}};
	return j;
}

namespace
{

constexpr CipherFamily family_rows[] = {CipherFamily::ChaCha20Poly1305, CipherFamily::AesCtr, CipherFamily::AesGcm,
	CipherFamily::AesCbc, CipherFamily::Other, CipherFamily::Unknown};
constexpr AeMode mode_rows[] = {AeMode::ChaCha20Poly1305, AeMode::CtrEaM, AeMode::Gcm, AeMode::CtrEtM,
	AeMode::CbcEaM, AeMode::CbcEtM, AeMode::Other, AeMode::Unknown};

template <typename K>
std::size_t at(const std::map<K, std::size_t>& m, const K& k)
{
	auto it = m.find(k);
	return it == m.end() ? 0 : it->second;
}

std::string pct(double v)
{
	std::ostringstream os;
	os << std::fixed << std::setprecision(2) << v;
	return os.str();
}

/// Other and Unknown have no supported column.
template <typename K>
bool has_support_column(K k)
{
	if constexpr (std::is_same_v<K, CipherFamily>)
		return k != CipherFamily::Other && k != CipherFamily::Unknown;
	else
		return k != AeMode::Other && k != AeMode::Unknown;
}

template <typename K, std::size_t N>
nlohmann::json table_json(const K (&rows)[N], const std::map<K, std::size_t>& preferred,
	const std::map<K, std::size_t>& supported, std::size_t total)
{
	auto arr = nlohmann::json::array();
	for (auto k : rows)
	{
		nlohmann::json row{{"name", to_string(k)}, {"preferred", at(preferred, k)},
			{"preferred_pct", FleetReport::percent(at(preferred, k), total)}};
		if (has_support_column(k))
		{
			row["supported"] = at(supported, k);
			row["supported_pct"] = FleetReport::percent(at(supported, k), total);
		}
		else
		{
			row["supported"] = nullptr;
			row["supported_pct"] = nullptr;
		}
		arr.push_back(row);
	}
	return arr;
}

template <typename K, std::size_t N>
std::string table_csv(const K (&rows)[N], const std::map<K, std::size_t>& preferred,
	const std::map<K, std::size_t>& supported, std::size_t total)
{
	std::ostringstream os;
	os << "name,preferred,preferred_pct,supported,supported_pct\n";
	for (auto k : rows)
	{
		os << '"' << to_string(k) << "\"," << at(preferred, k) << ',' << pct(FleetReport::percent(at(preferred, k), total));
		if (has_support_column(k))
			os << ',' << at(supported, k) << ',' << pct(FleetReport::percent(at(supported, k), total));
		else
			os << ",,";
		os << '\n';
	}
	os << "\"Total\"," << total << ",100.00,,\n";
	return os.str();
}

} // namespace

nlohmann::json to_json(const FleetReport& r)
{
	nlohmann::json j;
	j["schema"] = "sshlab.scan/1";
	j["total"] = r.total;
	j["errors"] = r.errors;
	j["cipher_families"] = table_json(family_rows, r.family_preferred, r.family_supported, r.total);
	j["authenticated_encryption_modes"] = table_json(mode_rows, r.mode_preferred, r.mode_supported, r.total);
	j["supported_columns_are_exclusive"] = false;
	j["vulnerable_support"] = {{"count", r.vulnerable_support}, {"pct", FleetReport::percent(r.vulnerable_support, r.total)}};
	j["both_vulnerable"] = {{"count", r.both_vulnerable}, {"pct", FleetReport::percent(r.both_vulnerable, r.total)}};
	j["prefers_vulnerable"] = {{"count", r.prefers_vulnerable}, {"pct", FleetReport::percent(r.prefers_vulnerable, r.total)}};
	nlohmann::json verdicts;
	for (const auto& [v, n] : r.verdicts)
		verdicts[to_string(v)] = n;
	j["verdicts"] = verdicts;
	j["ext_info_signaled"] = r.ext_info_signaled;
	auto ext = nlohmann::json::array();
	for (const auto& [name, n] : r.extensions_offered)
		ext.push_back({{"name", name}, {"offered", n}, {"offered_pct", FleetReport::percent(n, r.total)}});
	j["extensions"] = ext;
	j["countermeasure_signals"] = r.countermeasure_signals;
	return j;
}

std::string family_csv(const FleetReport& r)
{
	return table_csv(family_rows, r.family_preferred, r.family_supported, r.total);
}

std::string mode_csv(const FleetReport& r)
{
	return table_csv(mode_rows, r.mode_preferred, r.mode_supported, r.total);
}

std::string extension_csv(const FleetReport& r)
{
	std::vector<std::pair<std::string, std::size_t>> rows(r.extensions_offered.begin(), r.extensions_offered.end());
	std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
	std::ostringstream os;
	os << "name,offered,offered_pct\n";
	for (const auto& [name, n] : rows)
		os << '"' << name << "\"," << n << ',' << pct(FleetReport::percent(n, r.total)) << '\n';
	return os.str();
}

std::string format_tables(const FleetReport& r)
{
	std::ostringstream os;
	auto table = [&](const char* title, const auto& rows, const auto& preferred, const auto& supported) {
		os << title << '\n';
		os << "  " << std::left << std::setw(24) << "name" << std::right << std::setw(8) << "pref" << std::setw(9)
		   << "pref%" << std::setw(8) << "supp" << std::setw(9) << "supp%" << '\n';
		for (auto k : rows)
		{
			os << "  " << std::left << std::setw(24) << to_string(k) << std::right << std::setw(8) << at(preferred, k)
			   << std::setw(9) << pct(FleetReport::percent(at(preferred, k), r.total));
			if (has_support_column(k))
				os << std::setw(8) << at(supported, k) << std::setw(9) << pct(FleetReport::percent(at(supported, k), r.total));
			else
				os << std::setw(8) << "-" << std::setw(9) << "-";
			os << '\n';
		}
		os << "  " << std::left << std::setw(24) << "Total" << std::right << std::setw(8) << r.total << std::setw(9)
		   << "100.00" << '\n';
	};
	table("Cipher families", family_rows, r.family_preferred, r.family_supported);
	os << '\n';
	table("Authenticated encryption modes", mode_rows, r.mode_preferred, r.mode_supported);
	os << "\nSupported columns overlap: a server counts once per supported entry.\n";
	os << "Vulnerable mode supported: " << r.vulnerable_support << " (" << pct(FleetReport::percent(r.vulnerable_support, r.total))
	   << "%), both: " << r.both_vulnerable << " (" << pct(FleetReport::percent(r.both_vulnerable, r.total))
	   << "%), preferred: " << r.prefers_vulnerable << " ("
	   << pct(FleetReport::percent(r.prefers_vulnerable, r.total)) << "%)\n";
	os << "\nExtensions offered\n";
	std::istringstream csv(extension_csv(r));
	std::string line;
	std::getline(csv, line);
	while (std::getline(csv, line))
		os << "  " << line << '\n';
	if (r.errors)
		os << "\nprobe errors: " << r.errors << '\n';
	return os.str();
}

// --------------------------------------------------------------------

std::size_t FleetConfig::size() const
{
	std::size_t n = 0;
	for (const auto& g : groups)
		n += g.count;
	return n;
}

FleetConfig FleetConfig::from_json(const nlohmann::json& j)
{
	FleetConfig f;
	for (const auto& g : j.at("groups"))
	{
		FleetGroup grp;
		grp.name = g.at("name").get<std::string>();
		grp.count = g.at("count").get<std::size_t>();
		grp.software = g.value("software", grp.software);
		grp.ciphers = g.value("ciphers", std::vector<std::string>{});
		grp.macs = g.value("macs", std::vector<std::string>{});
		if (g.contains("extensions"))
			for (const auto& e : g.at("extensions"))
				grp.extensions.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
		grp.signal_ext_info = g.value("signal_ext_info", !grp.extensions.empty());
		grp.send_kexinit = g.value("send_kexinit", true);
		if (g.contains("countermeasures"))
		{
			auto cm = Countermeasures::named(g.at("countermeasures").get<std::string>());
			if (!cm)
				throw std::invalid_argument("unknown countermeasure in group " + grp.name);
			grp.countermeasures = *cm;
		}
		grp.expect = g.value("expect", nlohmann::json::object());
		if (grp.send_kexinit && grp.ciphers.empty())
			throw std::invalid_argument("group " + grp.name + " offers no ciphers");
		f.groups.push_back(std::move(grp));
	}
	if (f.size() == 0)
		throw std::invalid_argument("fleet is empty");
	return f;
}

FleetConfig FleetConfig::load(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open " + path);
	return from_json(nlohmann::json::parse(in));
}

PeerConfig server_config(const FleetGroup& g, std::uint64_t seed)
{
	auto c = PeerConfig::server_defaults();
	c.software = g.software;
	c.ciphers = g.ciphers;
	c.macs = g.macs;
	c.extensions = g.extensions;
	c.signal_ext_info = g.signal_ext_info;
	c.send_kexinit = g.send_kexinit;
	c.countermeasures = g.countermeasures;
	c.seed = seed;
	return c;
}

ServerObservation probe_simulated(const PeerConfig& server_cfg, std::string target, std::uint64_t seed)
{
	auto client_cfg = PeerConfig::client_defaults();
	client_cfg.software = "SSHLab_scanner_1.0";
	client_cfg.scan_only = true;
	client_cfg.seed = seed;
	ClientPeer client(client_cfg);
	ServerPeer server(server_cfg);
	Fabric(client, server).run();

	const auto& s = client.session();
	ServerObservation obs;
	obs.target = std::move(target);
	obs.banner = s.peer_banner;
	obs.kexinit = s.peer_kexinit;
	read_signals(obs);
	obs.extensions_offered = s.received_extensions;
	obs.handshake_completed = s.activation_rcv.has_value();
	if (!obs.kexinit)
		obs.error = "no KexInit: " + s.termination_detail;
	else if (s.has_error())
		obs.error = to_string(*s.termination) + ": " + s.termination_detail;
	return obs;
}

std::vector<ServerObservation> scan_fleet(const FleetConfig& fleet, std::uint64_t seed, unsigned threads)
{
	std::vector<std::pair<const FleetGroup*, std::size_t>> jobs;
	for (const auto& g : fleet.groups)
		for (std::size_t i = 0; i < g.count; ++i)
			jobs.emplace_back(&g, i);

	std::vector<ServerObservation> out(jobs.size());
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t k; (k = next++) < jobs.size();)
		{
			const auto& [g, i] = jobs[k];
			out[k] = probe_simulated(server_config(*g, derive_seed(seed, 2 * k)), g->name + "#" + std::to_string(i),
				derive_seed(seed, 2 * k + 1));
		}
	};
	if (threads == 0)
		threads = std::max(1u, std::thread::hardware_concurrency());
	std::vector<std::thread> pool;
	for (unsigned t = 0; t < threads; ++t)
		pool.emplace_back(worker);
	for (auto& t : pool)
		t.join();
	return out;
}

// --------------------------------------------------------------------
// Live TCP

namespace
{

std::string trim(std::string s)
{
	if (auto hash = s.find('#'); hash != std::string::npos)
		s.erase(hash);
	const auto b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

std::optional<std::uint32_t> ipv4(const std::string& s)
{
	in_addr a{};
	if (inet_pton(AF_INET, s.c_str(), &a) != 1)
		return std::nullopt;
	return ntohl(a.s_addr);
}

std::uint32_t read_u32(ByteView b)
{
	return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | b[3];
}

class Socket
{
  public:
	explicit Socket(int fd) : fd_(fd) {}
	~Socket()
	{
		if (fd_ >= 0)
			::close(fd_);
	}
	Socket(const Socket&) = delete;
	Socket& operator=(const Socket&) = delete;
	int fd() const { return fd_; }

  private:
	int fd_;
};

/// Global spacing between connection attempts.
class RateLimiter
{
  public:
	explicit RateLimiter(double per_second)
		: interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
			  std::chrono::duration<double>(per_second > 0 ? 1.0 / per_second : 0.0)))
	{
	}
	void wait()
	{
		std::chrono::steady_clock::time_point slot;
		{
			std::lock_guard lock(m_);
			const auto now = std::chrono::steady_clock::now();
			slot = std::max(now, next_);
			next_ = slot + interval_;
		}
		std::this_thread::sleep_until(slot);
	}

  private:
	std::chrono::steady_clock::duration interval_;
	std::chrono::steady_clock::time_point next_{};
	std::mutex m_;
};

} // namespace

std::vector<Target> parse_targets(const std::string& text)
{
	std::vector<Target> out;
	std::istringstream in(text);
	std::string line;
	while (std::getline(in, line))
	{
		line = trim(line);
		if (line.empty())
			continue;
		Target t;
		const auto colon = line.rfind(':');
		if (colon != std::string::npos && line.find(':') == colon)
		{
			t.host = line.substr(0, colon);
			const int port = std::stoi(line.substr(colon + 1));
			if (port <= 0 || port > 65535)
				throw std::invalid_argument("bad port in target " + line);
			t.port = static_cast<std::uint16_t>(port);
		}
		else
			t.host = line;
		out.push_back(t);
	}
	return out;
}

Blocklist Blocklist::parse(const std::string& text)
{
	Blocklist b;
	std::istringstream in(text);
	std::string line;
	while (std::getline(in, line))
	{
		line = trim(line);
		if (line.empty())
			continue;
		if (auto slash = line.find('/'); slash != std::string::npos)
		{
			auto base = ipv4(line.substr(0, slash));
			const int bits = std::stoi(line.substr(slash + 1));
			if (!base || bits < 0 || bits > 32)
				throw std::invalid_argument("bad CIDR range " + line);
			const std::uint32_t mask = bits == 0 ? 0 : ~std::uint32_t(0) << (32 - bits);
			b.ranges_.emplace_back(*base & mask, mask);
		}
		else
			b.exact_.insert(line);
	}
	return b;
}

Blocklist Blocklist::load(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open blocklist " + path);
	std::stringstream ss;
	ss << in.rdbuf();
	return parse(ss.str());
}

bool Blocklist::blocks(const Target& t) const
{
	if (exact_.contains(t.host) || exact_.contains(t.label()))
		return true;
	if (auto a = ipv4(t.host))
		for (const auto& [net, mask] : ranges_)
			if ((*a & mask) == net)
				return true;
	return false;
}

std::optional<ServerObservation> observe_server_bytes(std::string target, ByteView data)
{
	ServerObservation obs;
	obs.target = std::move(target);
	std::optional<std::pair<VersionBanner, std::size_t>> banner;
	try
	{
		banner = parse_banner(data);
	}
	catch (const CodecError& e)
	{
		obs.error = std::string("bad banner: ") + e.what();
		return obs;
	}
	if (!banner)
		return std::nullopt;
	obs.banner = banner->first.text;

	const auto rest = data.subspan(banner->second);
	if (rest.size() < 4)
		return std::nullopt;
	const std::uint32_t len = read_u32(rest);
	if (len < 12 || len > 35000)
	{
		obs.error = "implausible packet length " + std::to_string(len);
		return obs;
	}
	if (rest.size() < 4 + std::size_t(len))
		return std::nullopt;

	const auto r = decode_packet(rest.subspan(0, 4 + std::size_t(len)));
	const auto* m = std::get_if<Message>(&r);
	const auto* k = m ? std::get_if<KexInit>(m) : nullptr;
	if (!k)
	{
		obs.error = "first packet is not a KexInit: " + describe(r);
		return obs;
	}
	obs.kexinit = *k;
	read_signals(obs);
	return obs;
}

ServerObservation probe_tcp(const Target& target, const LiveScanOptions& options)
{
	ServerObservation failed;
	failed.target = target.label();
	using clock = std::chrono::steady_clock;

	addrinfo hints{};
	hints.ai_family = AF_UNSPEC;
	hints.ai_socktype = SOCK_STREAM;
	addrinfo* res = nullptr;
	if (int rc = getaddrinfo(target.host.c_str(), std::to_string(target.port).c_str(), &hints, &res); rc != 0)
	{
		failed.error = std::string("resolve: ") + gai_strerror(rc);
		return failed;
	}
	std::unique_ptr<addrinfo, decltype(&freeaddrinfo)> guard(res, &freeaddrinfo);

	Socket sock(::socket(res->ai_family, res->ai_socktype | SOCK_NONBLOCK | SOCK_CLOEXEC, res->ai_protocol));
	if (sock.fd() < 0)
	{
		failed.error = std::string("socket: ") + std::strerror(errno);
		return failed;
	}
	if (::connect(sock.fd(), res->ai_addr, res->ai_addrlen) != 0 && errno != EINPROGRESS)
	{
		failed.error = std::string("connect: ") + std::strerror(errno);
		return failed;
	}
	pollfd p{sock.fd(), POLLOUT, 0};
	if (::poll(&p, 1, static_cast<int>(options.connect_timeout.count())) <= 0)
	{
		failed.error = "timeout: connect";
		return failed;
	}
	int soerr = 0;
	socklen_t soerr_len = sizeof soerr;
	getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &soerr, &soerr_len);
	if (soerr != 0)
	{
		failed.error = std::string("connect: ") + std::strerror(soerr);
		return failed;
	}

	const auto line = VersionBanner::make(options.client_banner).line();
	for (std::size_t sent = 0; sent < line.size();)
	{
		const auto n = ::send(sock.fd(), line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
		if (n < 0 && errno != EAGAIN)
		{
			failed.error = std::string("send: ") + std::strerror(errno);
			return failed;
		}
		if (n < 0)
		{
			pollfd w{sock.fd(), POLLOUT, 0};
			::poll(&w, 1, 100);
			continue;
		}
		sent += static_cast<std::size_t>(n);
	}

	Bytes data;
	const auto deadline = clock::now() + options.read_timeout;
	std::uint8_t buf[4096];
	for (;;)
	{
		if (auto obs = observe_server_bytes(target.label(), data))
			return *obs;
		if (data.size() > 64 * 1024)
		{
			failed.error = "no KexInit within 64 KiB";
			return failed;
		}
		const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
		pollfd r{sock.fd(), POLLIN, 0};
		if (left.count() <= 0 || ::poll(&r, 1, static_cast<int>(left.count())) <= 0)
		{
			failed.error = data.empty() ? "timeout: no banner" : "timeout: no KexInit";
			break;
		}
		const auto n = ::recv(sock.fd(), buf, sizeof buf, 0);
		if (n == 0)
		{
			failed.error = "connection closed before KexInit";
			break;
		}
		if (n < 0 && errno != EAGAIN && errno != EINTR)
		{
			failed.error = std::string("recv: ") + std::strerror(errno);
			break;
		}
		if (n > 0)
			data.insert(data.end(), buf, buf + n);
	}
	// Keep a banner that arrived without a KexInit.
	if (auto b = parse_banner(data))
		failed.banner = b->first.text;
	return failed;
}

std::vector<ServerObservation> scan_live(const std::vector<Target>& targets, const LiveScanOptions& options)
{
	if (!options.acknowledged)
		throw ScanRefused("live scanning requires an explicit acknowledgement");
	if (targets.empty())
		throw std::invalid_argument("no targets");

	std::vector<const Target*> allowed;
	for (const auto& t : targets)
		if (!options.blocklist.blocks(t))
			allowed.push_back(&t);

	std::vector<ServerObservation> out(allowed.size());
	RateLimiter limiter(options.rate_per_second);
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t k; (k = next++) < allowed.size();)
		{
			limiter.wait();
			out[k] = probe_tcp(*allowed[k], options);
		}
	};
	std::vector<std::thread> pool;
	for (unsigned w = 0; w < std::max(1u, options.workers); ++w)
		pool.emplace_back(worker);
	for (auto& t : pool)
		t.join();
	return out;
}

} // namespace sshlab
