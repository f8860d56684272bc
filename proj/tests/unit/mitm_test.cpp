#include <gtest/gtest.h>

#include "sshlab/attacks.hpp"
#include "sshlab/scenario.hpp"

using namespace sshlab;

namespace
{

struct Harness
{
	ClientPeer client;
	ServerPeer server;
	Mitm mitm;

	Harness(AttackScript script, ModeId mode = ModeId::ChaCha20Poly1305, std::uint64_t seed = 1)
		: client(config(PeerConfig::client_defaults(), mode, seed))
		, server(config(PeerConfig::server_defaults(), mode, seed + 1000))
		, mitm(std::move(script))
	{
		Fabric(client, server, &mitm).run();
	}

	static PeerConfig config(PeerConfig c, ModeId mode, std::uint64_t seed)
	{
		c.restrict_to(mode);
		c.seed = seed;
		c.workload = {Ping{to_bytes("a")}, Ping{to_bytes("b")}, Ping{to_bytes("c")}};
		return c;
	}
};

Rule rule(Direction d, Phase p, std::optional<std::uint8_t> id, std::optional<std::size_t> index, Action a)
{
	return {"test", PacketMatch{d, p, id, index}, std::move(a)};
}

AttackScript script_of(std::vector<Rule> rules)
{
	AttackScript s;
	s.name = "test";
	s.rules = std::move(rules);
	return s;
}

constexpr auto c2s = Direction::ClientToServer;
constexpr auto s2c = Direction::ServerToClient;

} // namespace

TEST(Mitm, ObservesWithoutChanging)
{
	Harness h(script_of({}));
	EXPECT_TRUE(h.client.established());
	EXPECT_EQ(h.mitm.observed(s2c, Phase::PreNewKeys), 3u);
	EXPECT_EQ(h.mitm.observed(c2s, Phase::PreNewKeys), 3u);
	EXPECT_EQ(h.mitm.observed(c2s, Phase::PostNewKeys), h.client.session().channel_sent.size());
	EXPECT_EQ(h.mitm.observed(s2c, Phase::PostNewKeys), h.server.session().channel_sent.size());
	ASSERT_TRUE(h.mitm.negotiated());
	EXPECT_EQ(h.mitm.negotiated()->mode_for(c2s), ModeId::ChaCha20Poly1305);
	EXPECT_TRUE(h.mitm.log().empty());
}

TEST(Mitm, DeletionAloneBreaksTheNextPacket)
{
	Harness h(script_of({rule(s2c, Phase::PostNewKeys, std::nullopt, 0, Delete{})}));
	EXPECT_EQ(h.mitm.deleted(), 1u);
	EXPECT_EQ(h.client.session().termination, Termination::AuthFailure);
}

TEST(Mitm, InjectionPlusDeletionKeepsCountersAligned)
{
	Harness h(script_of({
		rule(s2c, Phase::PreNewKeys, msgid::newkeys, std::nullopt, Inject{{{Ignore{}, 1}}, s2c, true}),
		rule(s2c, Phase::PostNewKeys, std::nullopt, 0, Delete{}),
	}));
	EXPECT_EQ(h.mitm.injected(), 1u);
	EXPECT_EQ(h.mitm.deleted(), 1u);
	EXPECT_TRUE(h.client.established()) << h.client.session().termination_detail;
	EXPECT_EQ(h.client.session().counters.rcv, h.server.session().counters.snd);
	// The server's ExtInfo never arrived.
	EXPECT_TRUE(h.client.session().received_extensions.empty());
}

TEST(Mitm, MatchByIdAndHitLimit)
{
	AttackScript s = script_of({rule(c2s, Phase::PreNewKeys, msgid::kexinit, std::nullopt,
		Inject{{{Ignore{}, 2}, {Debug{}, 1}}, c2s, false})});
	s.rules[0].max_hits = 5;
	Harness h(s);
	// Only one KexInit passes, so the rule fires once.
	EXPECT_EQ(h.mitm.injected(), 3u);
	ASSERT_EQ(h.mitm.log().size(), 1u);
	EXPECT_NE(h.mitm.log()[0].find("2x Ignore + 1x Debug toward server"), std::string::npos);
}

TEST(Mitm, UnlimitedDeletionLogsOnce)
{
	AttackScript s = script_of({rule(c2s, Phase::PostNewKeys, std::nullopt, std::nullopt, Delete{})});
	s.rules[0].max_hits = unlimited_hits;
	Harness h(s);
	EXPECT_EQ(h.mitm.deleted(), h.mitm.observed(c2s, Phase::PostNewKeys));
	EXPECT_EQ(h.mitm.log().size(), 1u);
	EXPECT_FALSE(h.server.established());
}

TEST(Mitm, HoldReleasesAfterWatchedCount)
{
	// Hold the server's first channel packet until the client sent two; it still arrives in order for the client.
	Harness h(script_of({rule(s2c, Phase::PostNewKeys, std::nullopt, 0, Hold{c2s, 2})}));
	const auto& log = h.mitm.log();
	ASSERT_GE(log.size(), 2u);
	EXPECT_NE(log[0].find("hold"), std::string::npos);
	EXPECT_NE(log[1].find("release"), std::string::npos);
	EXPECT_TRUE(h.client.established());
}

TEST(Mitm, CutClosesTheStreamWithoutAnError)
{
	Harness h(script_of({rule(s2c, Phase::PostNewKeys, std::nullopt, 2, Cut{})}));
	const auto& c = h.client.session();
	EXPECT_EQ(c.termination, Termination::ConnectionClosed);
	EXPECT_EQ(c.channel_received.size(), 2u);
	EXPECT_EQ(h.mitm.observed(s2c, Phase::PostNewKeys), 3u);
}

TEST(Mitm, GuessedLengthsFrameEncryptedLengthModes)
{
	// A wrong guess strands the stream tail in the interceptor, so the client never sees its last packets intact.
	for (auto mode : {ModeId::CbcEaM, ModeId::CtrEaM})
	{
		AttackScript wrong = script_of({rule(s2c, Phase::PostNewKeys, std::nullopt, 50, Delete{})});
		wrong.length_knowledge = LengthKnowledge::Guess;
		wrong.guessed_length = 48;
		Harness h(wrong, mode);
		EXPECT_TRUE(h.client.session().has_error()) << to_string(mode);
	}
}

TEST(Mitm, DecisionsIgnoreKeyMaterial)
{
	// Different peer seeds give different keys; the interceptor's decisions do not move.
	const auto script = attacks::prefix_truncate(1, 0);
	Harness a(script, ModeId::ChaCha20Poly1305, 1);
	Harness b(script, ModeId::ChaCha20Poly1305, 77);
	ASSERT_NE(a.client.session().exchange_hash, b.client.session().exchange_hash);
	EXPECT_EQ(a.mitm.log(), b.mitm.log());
	EXPECT_EQ(a.mitm.injected(), b.mitm.injected());
	EXPECT_EQ(a.mitm.deleted(), b.mitm.deleted());
}
