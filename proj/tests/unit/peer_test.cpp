#include <gtest/gtest.h>

#include "sshlab/attacks.hpp"
#include "sshlab/scenario.hpp"

using namespace sshlab;

namespace
{

struct Pair
{
	PeerConfig client = PeerConfig::client_defaults();
	PeerConfig server = PeerConfig::server_defaults();

	Pair()
	{
		client.workload = {Ping{to_bytes("k1")}, Ignore{to_bytes("x")}, Ping{to_bytes("k2")}};
	}

	Pair& mode(ModeId m)
	{
		client.restrict_to(m);
		server.restrict_to(m);
		return *this;
	}

	SessionPair run(const AttackScript& s = attacks::passthrough()) const { return run_pair(client, server, s); }
};

/// Adds one unknown-id packet toward the server right after the client's KexInit.
AttackScript inject_unknown_to_server()
{
	AttackScript s;
	s.name = "inject-unknown";
	s.rules.push_back({"unknown", PacketMatch{Direction::ClientToServer, Phase::PreNewKeys, msgid::kexinit, std::nullopt},
		Inject{{{attacks::unknown_message(), 1}}, Direction::ClientToServer, false}});
	return s;
}

class BaselineModes : public ::testing::TestWithParam<ModeId>
{
};

} // namespace

TEST_P(BaselineModes, EstablishesAndDeliversWorkload)
{
	auto r = Pair().mode(GetParam()).run();
	ASSERT_TRUE(r.client.established) << r.client.termination_detail;
	ASSERT_TRUE(r.server.established) << r.server.termination_detail;
	EXPECT_EQ(r.server.authenticated_user, "alice");
	EXPECT_TRUE(r.client.host_key_verified);
	EXPECT_EQ(r.client.exchange_hash, r.server.exchange_hash);
	EXPECT_EQ(r.client.negotiated->mode_for(Direction::ClientToServer), GetParam());
	EXPECT_FALSE(r.client.has_error());
	EXPECT_FALSE(r.server.has_error());

	// Each direction: what one side sent is what the other received.
	EXPECT_EQ(r.client.channel_sent, r.server.channel_received);
	EXPECT_EQ(r.server.channel_sent, r.client.channel_received);
	EXPECT_EQ(r.client.counters.snd, r.server.counters.rcv);
	EXPECT_EQ(r.client.counters.rcv, r.server.counters.snd);

	// Server answers both pings.
	std::size_t pongs = 0;
	for (const auto& m : r.client.channel_received)
		pongs += std::holds_alternative<Pong>(m);
	EXPECT_EQ(pongs, 2u);
}

INSTANTIATE_TEST_SUITE_P(Peer, BaselineModes, ::testing::ValuesIn(all_modes),
	[](const auto& info) {
		std::string s = to_string(info.param);
		std::erase_if(s, [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); });
		return s;
	});

TEST(Peer, ServerExtInfoReachesClient)
{
	auto r = Pair().run();
	EXPECT_TRUE(r.client.keystroke_countermeasure_active());
	EXPECT_EQ(r.client.received_extensions, PeerConfig::server_defaults().extensions);
}

TEST(Peer, NoExtInfoWithoutClientSignal)
{
	Pair p;
	p.client.signal_ext_info = false;
	auto r = p.run();
	EXPECT_TRUE(r.client.established);
	EXPECT_TRUE(r.client.received_extensions.empty());
}

TEST(Peer, WrongPasswordRejected)
{
	Pair p;
	p.client.password = "guess";
	auto r = p.run();
	EXPECT_EQ(r.client.termination, Termination::CredentialsRejected);
	EXPECT_FALSE(r.server.established);
}

TEST(Peer, PinnedHostKeyMismatch)
{
	Pair p;
	p.client.expected_host_key = from_hex("00");
	auto r = p.run();
	EXPECT_EQ(r.client.termination, Termination::HostKeyRejected);
}

TEST(Peer, NoCommonCipher)
{
	Pair p;
	p.client.restrict_to(ModeId::Gcm);
	p.server.restrict_to(ModeId::CbcEaM);
	auto r = p.run();
	EXPECT_TRUE(r.client.termination == Termination::NegotiationFailure ||
				r.server.termination == Termination::NegotiationFailure);
}

TEST(Peer, SequenceResetZeroesCountersAtActivation)
{
	Pair p;
	p.client.countermeasures.seq_reset = p.server.countermeasures.seq_reset = true;
	auto r = p.run();
	ASSERT_TRUE(r.client.established);
	ASSERT_TRUE(r.client.negotiated->seq_reset_enabled);
	for (const auto* s : {&r.client, &r.server})
	{
		EXPECT_EQ(s->activation_snd, 0u);
		EXPECT_EQ(s->activation_rcv, 0u);
	}
}

TEST(Peer, WithoutResetCountersContinueAcrossNewKeys)
{
	auto r = Pair().run();
	// Banner is not a packet; KexInit, DH and NewKeys are three per direction.
	EXPECT_EQ(r.client.activation_snd, 3u);
	EXPECT_EQ(r.client.activation_rcv, 3u);
}

TEST(Peer, TranscriptMacVerifiedOnBothSides)
{
	for (auto m : all_modes)
	{
		Pair p;
		p.mode(m);
		p.client.countermeasures.transcript_mac = p.server.countermeasures.transcript_mac = true;
		auto r = p.run();
		ASSERT_TRUE(r.client.established) << to_string(m) << ' ' << r.client.termination_detail;
		EXPECT_TRUE(r.client.transcript_mac_verified);
		EXPECT_TRUE(r.server.transcript_mac_verified);
		EXPECT_EQ(r.client_transcript.mac_input(), r.server_transcript.mac_input());
	}
}

TEST(Peer, OneSidedSignalNegotiatesNothing)
{
	Pair p;
	p.client.countermeasures.transcript_mac = true;
	auto r = p.run();
	EXPECT_TRUE(r.client.established);
	EXPECT_FALSE(r.client.negotiated->transcript_mac_enabled);
	EXPECT_FALSE(r.client.transcript_mac_verified);
}

TEST(Peer, StrictProfileDetectsRollover)
{
	Pair p;
	p.client.seq_bits = p.server.seq_bits = 3;
	auto r = p.run();
	EXPECT_TRUE(r.client.termination == Termination::RolloverDetected ||
				r.server.termination == Termination::RolloverDetected);
}

TEST(Peer, LenientPeersWrapInLockstep)
{
	Pair p;
	p.client.seq_bits = p.server.seq_bits = 3;
	p.client.profile = p.server.profile = StrictnessProfile::lenient();
	auto r = p.run();
	EXPECT_TRUE(r.client.established);
	EXPECT_FALSE(r.client.has_error());
	EXPECT_EQ(r.client.counters.snd, r.server.counters.rcv);
	EXPECT_LT(r.client.counters.snd, 8u);
}

TEST(Peer, UnknownIdAnsweredOrDisconnected)
{
	Pair strict;
	auto r = strict.run(inject_unknown_to_server());
	EXPECT_EQ(r.injected, 1u);
	EXPECT_GE(r.server.count(Event::Kind::ReceivedEvasive), 1u);
	// Unanswered injection desynchronizes the counters, so the first channel packet fails authentication.
	EXPECT_EQ(r.server.termination, Termination::AuthFailure);

	Pair drop;
	drop.server.profile = StrictnessProfile::dropbear();
	auto d = drop.run(inject_unknown_to_server());
	EXPECT_EQ(d.server.termination, Termination::Disconnected);
	EXPECT_EQ(d.client.termination, Termination::PeerDisconnected);
}

TEST(Peer, KnownButUnmodelledIdIsAViolation)
{
	AttackScript s;
	s.rules.push_back({"raw", PacketMatch{Direction::ClientToServer, Phase::PreNewKeys, msgid::kexinit, std::nullopt},
		Inject{{{RawMessage{90, {}}, 1}}, Direction::ClientToServer, false}});
	auto r = Pair().run(s);
	EXPECT_EQ(r.server.termination, Termination::ProtocolViolation);
}

TEST(Peer, BannerOnlyServerClosesClean)
{
	Pair p;
	p.server.send_kexinit = false;
	auto r = p.run();
	EXPECT_EQ(r.server.termination, Termination::ConnectionClosed);
	EXPECT_TRUE(r.client.peer_banner.has_value());
	EXPECT_FALSE(r.client.peer_kexinit.has_value());
}

TEST(Peer, ScanOnlyClientStopsAfterExtInfo)
{
	Pair p;
	p.client.scan_only = true;
	auto r = p.run();
	EXPECT_EQ(r.client.termination, Termination::ConnectionClosed);
	EXPECT_FALSE(r.client.established);
	ASSERT_TRUE(r.client.peer_kexinit.has_value());
	EXPECT_EQ(r.client.received_extensions.size(), 3u);
}
