#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "sshlab/scanner.hpp"

using namespace sshlab;

namespace
{

ServerObservation observed(std::vector<std::string> ciphers, std::vector<std::string> macs)
{
	ServerObservation o;
	o.target = "t";
	KexInit k;
	k.kex_algorithms = {"diffie-hellman-group14-sha256"};
	k.ciphers_s2c = std::move(ciphers);
	k.macs_s2c = std::move(macs);
	// client-to-server lists are deliberately different: only s2c counts
	k.ciphers_c2s = {"aes256-gcm@openssh.com"};
	k.macs_c2s = {"hmac-sha1"};
	o.kexinit = k;
	return o;
}

const std::string etm = "hmac-sha2-256-etm@openssh.com";
const std::string eam = "hmac-sha2-256";
const std::string chacha = "chacha20-poly1305@openssh.com";

FleetGroup group(std::string name, std::size_t count, std::vector<std::string> ciphers, std::vector<std::string> macs)
{
	FleetGroup g;
	g.name = std::move(name);
	g.count = count;
	g.ciphers = std::move(ciphers);
	g.macs = std::move(macs);
	return g;
}

/// Accepts one connection and answers with what a server peer emits first.
class LoopbackServer
{
  public:
	LoopbackServer()
	{
		fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
		sockaddr_in a{};
		a.sin_family = AF_INET;
		a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
		::bind(fd_, reinterpret_cast<sockaddr*>(&a), sizeof a);
		::listen(fd_, 1);
		socklen_t len = sizeof a;
		::getsockname(fd_, reinterpret_cast<sockaddr*>(&a), &len);
		port_ = ntohs(a.sin_port);
		thread_ = std::thread([this] { serve(); });
	}
	~LoopbackServer()
	{
		thread_.join();
		::close(fd_);
	}
	std::uint16_t port() const { return port_; }
	std::string received;

  private:
	void serve()
	{
		const int c = ::accept(fd_, nullptr, nullptr);
		if (c < 0)
			return;
		ServerPeer peer;
		peer.start();
		for (const auto& seg : peer.take_output())
			(void)::send(c, seg.data(), seg.size(), MSG_NOSIGNAL);
		char buf[512];
		const auto n = ::recv(c, buf, sizeof buf, 0);
		if (n > 0)
			received.assign(buf, static_cast<std::size_t>(n));
		::close(c);
	}

	int fd_ = -1;
	std::uint16_t port_ = 0;
	std::thread thread_;
};

} // namespace

TEST(Classify, FamiliesAndModes)
{
	EXPECT_EQ(cipher_family("aes256-ctr"), CipherFamily::AesCtr);
	EXPECT_EQ(cipher_family("aes128-gcm@openssh.com"), CipherFamily::AesGcm);
	EXPECT_EQ(cipher_family("aes256-gcm"), CipherFamily::AesGcm);
	EXPECT_EQ(cipher_family("rijndael-cbc@lysator.liu.se"), CipherFamily::AesCbc);
	EXPECT_EQ(cipher_family("3des-cbc"), CipherFamily::Other);
	EXPECT_EQ(ae_mode("aes192-cbc", etm), AeMode::CbcEtM);
	EXPECT_EQ(ae_mode("aes192-cbc", "hmac-sha1"), AeMode::CbcEaM);
	EXPECT_EQ(ae_mode(chacha, eam), AeMode::ChaCha20Poly1305);
	EXPECT_EQ(ae_mode("aes128-ctr", "umac-64-etm@openssh.com"), AeMode::CtrEtM);
}

TEST(Classify, StrongestApplicableVerdict)
{
	auto c = classify(observed({"aes128-ctr", chacha}, {eam}));
	EXPECT_EQ(c.preferred_mode, AeMode::CtrEaM);
	EXPECT_EQ(c.verdict, Exposure::PerfectlyExploitable);
	EXPECT_FALSE(c.prefers_vulnerable);

	c = classify(observed({"aes128-ctr", "aes128-cbc"}, {eam, etm}));
	EXPECT_EQ(c.verdict, Exposure::ProbabilisticallyExploitable);
	EXPECT_TRUE(c.supported_modes.contains(AeMode::CbcEtM));

	c = classify(observed({"aes128-ctr"}, {etm}));
	EXPECT_EQ(c.verdict, Exposure::VulnerableNotExploitable);

	c = classify(observed({"aes128-gcm@openssh.com", "aes128-ctr"}, {eam}));
	EXPECT_EQ(c.verdict, Exposure::NotVulnerable);
	EXPECT_EQ(c.preferred_mode, AeMode::Gcm);

	c = classify(observed({chacha}, {}));
	EXPECT_TRUE(c.prefers_vulnerable);
}

TEST(Classify, MissingKexInitIsUnknown)
{
	ServerObservation o;
	o.target = "x";
	o.error = "closed";
	const auto c = classify(o);
	EXPECT_EQ(c.preferred_family, CipherFamily::Unknown);
	EXPECT_EQ(c.preferred_mode, AeMode::Unknown);
	EXPECT_TRUE(c.supported_modes.empty());
}

TEST(Fleet, EveryServerMatchesItsGroupExpectation)
{
	const auto fleet = FleetConfig::load(std::string(SSHLAB_DATA_DIR) + "/fleet_published_shares.json");
	ASSERT_EQ(fleet.size(), 1000u);
	const auto obs = scan_fleet(fleet, 7);
	ASSERT_EQ(obs.size(), 1000u);

	std::map<std::string, const FleetGroup*> by_name;
	for (const auto& g : fleet.groups)
		by_name[g.name] = &g;
	for (const auto& o : obs)
	{
		const auto* g = by_name.at(o.target.substr(0, o.target.find('#')));
		const auto c = classify(o);
		const auto& e = g->expect;
		EXPECT_EQ(to_string(c.preferred_family), e["preferred_family"]) << o.target;
		EXPECT_EQ(to_string(c.preferred_mode), e["preferred_mode"]) << o.target;
		EXPECT_EQ(to_string(c.verdict), e["verdict"]) << o.target;
		std::set<std::string> supported;
		for (auto m : c.supported_modes)
			supported.insert(to_string(m));
		EXPECT_EQ(supported, e["supports"].get<std::set<std::string>>()) << o.target;
	}
}

TEST(Fleet, AggregateCounts)
{
	FleetConfig f;
	f.groups = {
		group("chacha", 57, {chacha, "aes128-ctr"}, {etm}),
		group("cbc-etm-later", 20, {"aes128-ctr", "aes128-cbc"}, {eam, etm}),
		group("hardened", 23, {"aes128-gcm@openssh.com", "aes128-ctr"}, {eam}),
	};
	f.groups[0].extensions = {{"ping@openssh.com", "0"}};
	const auto r = aggregate(scan_fleet(f, 3, 2));
	EXPECT_EQ(r.total, 100u);
	EXPECT_EQ(r.vulnerable_support, 77u);
	EXPECT_EQ(r.prefers_vulnerable, 57u);
	EXPECT_EQ(r.both_vulnerable, 0u);
	EXPECT_EQ(r.mode_preferred.at(AeMode::CtrEaM), 20u);
	EXPECT_EQ(r.mode_preferred.at(AeMode::Gcm), 23u);
	EXPECT_EQ(r.family_supported.at(CipherFamily::AesCtr), 100u);
	EXPECT_EQ(r.extensions_offered.at("ping@openssh.com"), 57u);
	EXPECT_EQ(r.ext_info_signaled, 100u);
	EXPECT_DOUBLE_EQ(FleetReport::percent(77, 100), 77.0);

	const auto csv = mode_csv(r);
	EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,preferred,preferred_pct,supported,supported_pct");
	EXPECT_NE(csv.find("\"Total\",100,100.00"), std::string::npos);
	EXPECT_EQ(to_json(r)["schema"], "sshlab.scan/1");
	EXPECT_THROW(aggregate({}), std::invalid_argument);
}

TEST(Fleet, ScanIsDeterministic)
{
	const auto fleet = FleetConfig::load(std::string(SSHLAB_DATA_DIR) + "/fleet_100.json");
	const auto a = scan_fleet(fleet, 9, 1);
	const auto b = scan_fleet(fleet, 9, 4);
	ASSERT_EQ(a.size(), b.size());
	for (std::size_t i = 0; i < a.size(); ++i)
	{
		EXPECT_EQ(a[i].target, b[i].target);
		EXPECT_EQ(a[i].kexinit, b[i].kexinit);
	}
}

TEST(Fleet, CountermeasureSignalsAreRead)
{
	FleetConfig f;
	f.groups = {group("cm", 2, {chacha}, {etm})};
	f.groups[0].countermeasures = {true, true};
	const auto r = aggregate(scan_fleet(f));
	EXPECT_EQ(r.countermeasure_signals.at("seq-reset-s"), 2u);
	EXPECT_EQ(r.countermeasure_signals.at("xmac-s"), 2u);
}

TEST(Live, ParsesBannerAndKexInit)
{
	ServerPeer peer;
	peer.start();
	Bytes stream = to_bytes("preamble line\r\n");
	for (const auto& s : peer.take_output())
		stream.insert(stream.end(), s.begin(), s.end());

	EXPECT_FALSE(observe_server_bytes("x", ByteView(stream).first(30)));
	EXPECT_FALSE(observe_server_bytes("x", ByteView(stream).first(stream.size() - 1)));
	auto o = observe_server_bytes("x", stream);
	ASSERT_TRUE(o);
	EXPECT_EQ(o->banner, "SSH-2.0-SSHLab_1.0 server");
	ASSERT_TRUE(o->kexinit);
	EXPECT_TRUE(o->ext_info_signaled);
	EXPECT_EQ(classify(*o).preferred_mode, AeMode::ChaCha20Poly1305);
}

TEST(Live, ProbesLoopbackServer)
{
	LoopbackServer srv;
	LiveScanOptions opt;
	opt.acknowledged = true;
	opt.connect_timeout = std::chrono::milliseconds(2000);
	opt.read_timeout = std::chrono::milliseconds(2000);
	const auto o = probe_tcp({"127.0.0.1", srv.port()}, opt);
	EXPECT_FALSE(o.error) << *o.error;
	ASSERT_TRUE(o.kexinit);
	EXPECT_EQ(classify(o).verdict, Exposure::PerfectlyExploitable);
	EXPECT_FALSE(o.handshake_completed);
}

TEST(Live, UnreachablePortReportsError)
{
	// Bind then close to get a port nothing listens on.
	const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
	sockaddr_in a{};
	a.sin_family = AF_INET;
	a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
	::bind(fd, reinterpret_cast<sockaddr*>(&a), sizeof a);
	socklen_t len = sizeof a;
	::getsockname(fd, reinterpret_cast<sockaddr*>(&a), &len);
	const auto port = ntohs(a.sin_port);
	::close(fd);

	LiveScanOptions opt;
	opt.acknowledged = true;
	opt.connect_timeout = std::chrono::milliseconds(500);
	const auto o = probe_tcp({"127.0.0.1", port}, opt);
	EXPECT_TRUE(o.error);
	EXPECT_FALSE(o.kexinit);
}

TEST(Live, RefusedWithoutAcknowledgement)
{
	EXPECT_THROW(scan_live({{"127.0.0.1", 22}}, LiveScanOptions{}), ScanRefused);
}

TEST(Live, BlocklistAndTargets)
{
	const auto b = Blocklist::parse("# comment\n10.0.0.0/8\nexample.org\n192.168.1.5:2222\n");
	EXPECT_EQ(b.size(), 3u);
	EXPECT_TRUE(b.blocks({"10.20.30.40", 22}));
	EXPECT_FALSE(b.blocks({"11.0.0.1", 22}));
	EXPECT_TRUE(b.blocks({"example.org", 22}));
	EXPECT_TRUE(b.blocks({"192.168.1.5", 2222}));
	EXPECT_FALSE(b.blocks({"192.168.1.5", 22}));

	const auto t = parse_targets("# fleet\nhost-a\nhost-b:2200\n\n");
	ASSERT_EQ(t.size(), 2u);
	EXPECT_EQ(t[0].label(), "host-a:22");
	EXPECT_EQ(t[1].port, 2200);

	LiveScanOptions opt;
	opt.acknowledged = true;
	opt.blocklist = Blocklist::parse("127.0.0.0/8\n");
	EXPECT_TRUE(scan_live({{"127.0.0.1", 1}}, opt).empty());
}
