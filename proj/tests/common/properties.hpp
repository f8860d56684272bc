#pragma once

// Randomized property checks shared by the unit suite and the acceptance runner.

#include <sstream>
#include <string>

#include "sshlab/attacks.hpp"
#include "sshlab/scenario.hpp"

namespace props
{

using namespace sshlab;

struct Outcome
{
	std::size_t cases = 0;
	std::size_t failures = 0;
	std::string first_failure;

	void fail(std::size_t i, const std::string& why)
	{
		if (failures++ == 0)
			first_failure = "case " + std::to_string(i) + ": " + why;
	}
};

struct Gen
{
	SeededRandom rng;

	explicit Gen(std::uint64_t seed) : rng(seed) {}

	std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng.uniform(n)); }
	bool coin() { return below(2) == 1; }
	Bytes bytes(std::size_t max) { return rng.bytes(below(max + 1)); }

	std::string text(std::size_t max, bool allow_comma = true)
	{
		std::string s(below(max + 1), ' ');
		for (auto& c : s)
		{
			c = static_cast<char>(0x21 + below(0x5e));
			if (!allow_comma && c == ',')
				c = '-';
		}
		return s;
	}

	std::vector<std::string> namelist()
	{
		std::vector<std::string> v(below(5));
		for (auto& s : v)
			s = text(12, false) + "x";
		return v;
	}

	/// Big-endian magnitude without leading zeros.
	Bytes magnitude()
	{
		Bytes b = bytes(40);
		if (!b.empty() && b[0] == 0)
			b[0] = 1;
		return b;
	}

	ExtInfo ext_info()
	{
		ExtInfo e;
		for (std::size_t i = below(4); i > 0; --i)
			e.extensions.emplace_back(text(15), text(15));
		return e;
	}

	Message message()
	{
		switch (below(18))
		{
			case 0: return Disconnect{static_cast<std::uint32_t>(rng.next_u64()), text(30), text(5)};
			case 1: return Ignore{bytes(60)};
			case 2: return Unimplemented{static_cast<std::uint32_t>(rng.next_u64())};
			case 3: return Debug{coin(), text(30), text(5)};
			case 4: return ServiceRequest{text(20)};
			case 5: return coin() ? ServiceAccept{text(20)} : ServiceAccept{};
			case 6: return ext_info();
			case 7: return TranscriptMac{rng.bytes(32)};
			case 8:
			{
				KexInit k;
				auto cookie = rng.bytes(16);
				std::copy(cookie.begin(), cookie.end(), k.cookie.begin());
				for (auto* l : {&k.kex_algorithms, &k.host_key_algorithms, &k.ciphers_c2s, &k.ciphers_s2c, &k.macs_c2s,
						 &k.macs_s2c, &k.compression_c2s, &k.compression_s2c, &k.languages_c2s, &k.languages_s2c})
					*l = namelist();
				k.first_kex_packet_follows = coin();
				return k;
			}
			case 9: return NewKeys{};
			case 10: return KexDhInit{magnitude()};
			case 11: return KexDhReply{bytes(40), magnitude(), bytes(70)};
			case 12: return UserAuthRequest{text(10), text(14), "password", text(12)};
			case 13: return UserAuthFailure{namelist(), coin()};
			case 14: return UserAuthSuccess{};
			case 15: return Ping{bytes(80)};
			case 16: return Pong{bytes(80)};
			default:
			{
				std::uint8_t id = 0;
				do
					id = static_cast<std::uint8_t>(below(256));
				while (is_modelled_id(id));
				return RawMessage{id, bytes(50)};
			}
		}
	}
};

/// encode/decode of the message and of a framed packet at a random alignment.
inline Outcome codec_round_trip(std::size_t n, std::uint64_t seed)
{
	Outcome out;
	Gen g(seed);
	const auto all = MessageIdRegistry::all_known();
	DecodeOptions opts{&all, true};
	for (std::size_t i = 0; i < n; ++i, ++out.cases)
	{
		const Message m = g.message();
		try
		{
			if (decode_message(encode_message(m)) != m)
			{
				out.fail(i, "payload round trip changed " + describe(m));
				continue;
			}
			const std::size_t block = g.coin() ? 8 : 16;
			const bool len_enc = g.coin();
			const auto p = encode_packet(m, block, len_enc, g.rng);
			if (!satisfies_alignment(p, block, len_enc))
			{
				out.fail(i, "misaligned packet for " + describe(m));
				continue;
			}
			const auto r = decode_packet(p.serialize(), opts);
			if (!std::holds_alternative<Message>(r) || std::get<Message>(r) != m)
				out.fail(i, "packet round trip gave " + describe(r));
		}
		catch (const std::exception& e)
		{
			out.fail(i, describe(m) + " threw " + e.what());
		}
	}
	return out;
}

/// Ignore, Unknown and ExtInfo packets injected toward the client before
/// NewKeys never change the exchange hash; the full transcript sees them.
inline Outcome exchange_hash_blindness(std::size_t n, std::uint64_t seed)
{
	Outcome out;
	Gen g(seed);
	for (std::size_t i = 0; i < n; ++i, ++out.cases)
	{
		auto client = PeerConfig::client_defaults();
		auto server = PeerConfig::server_defaults();
		client.seed = derive_seed(seed, 2 * i);
		server.seed = derive_seed(seed, 2 * i + 1);
		// accepts every injected kind without disconnecting
		client.profile = StrictnessProfile::asyncssh();

		const auto clean = run_pair(client, server, attacks::passthrough());

		Inject in;
		in.toward = Direction::ServerToClient;
		in.before = true;
		for (std::size_t k = 1 + g.below(3); k > 0; --k)
		{
			const std::size_t count = 1 + g.below(4);
			switch (g.below(3))
			{
				case 0: in.items.emplace_back(Ignore{g.bytes(20)}, count); break;
				case 1: in.items.emplace_back(g.ext_info(), count); break;
				default: in.items.emplace_back(attacks::unknown_message(), count); break;
			}
		}
		const auto target = g.coin() ? msgid::newkeys : msgid::kexdh_reply;
		AttackScript s;
		s.name = "inject";
		s.rules.push_back({"inject", PacketMatch{Direction::ServerToClient, Phase::PreNewKeys, target, std::nullopt}, in});
		const auto attacked = run_pair(client, server, s);

		if (clean.client.exchange_hash.empty())
			out.fail(i, "clean run computed no exchange hash");
		else if (attacked.client.exchange_hash != clean.client.exchange_hash)
			out.fail(i, "client exchange hash moved");
		else if (attacked.server.exchange_hash != clean.server.exchange_hash)
			out.fail(i, "server exchange hash moved");
		else if (attacked.client_transcript.mac_input() == clean.client_transcript.mac_input())
			out.fail(i, "full transcript missed the injection");
	}
	return out;
}

/// Without an attacker: each send counter equals the packets sent (mod 2^w,
/// restarted at activation under sequence reset), counters pair up across the
/// peers, and each channel delivers exactly what was sent.
inline Outcome counter_law_and_stream_equality(std::size_t n, std::uint64_t seed)
{
	Outcome out;
	Gen g(seed);
	for (std::size_t i = 0; i < n; ++i, ++out.cases)
	{
		auto client = PeerConfig::client_defaults();
		auto server = PeerConfig::server_defaults();
		client.seed = derive_seed(seed, 2 * i);
		server.seed = derive_seed(seed, 2 * i + 1);
		const auto mode = all_modes[g.below(all_modes.size())];
		client.restrict_to(mode);
		server.restrict_to(mode);
		const unsigned bits = g.coin() ? 32 : 4 + static_cast<unsigned>(g.below(4));
		client.seq_bits = server.seq_bits = bits;
		client.profile = server.profile = StrictnessProfile::lenient();
		for (std::size_t k = g.below(25); k > 0; --k)
			client.workload.push_back(g.coin() ? Message{Ping{g.bytes(30)}} : Message{Ignore{g.bytes(30)}});
		if (g.coin())
			client.countermeasures.seq_reset = server.countermeasures.seq_reset = true;

		const auto r = run_pair(client, server, attacks::passthrough());
		if (!r.client.established || !r.server.established)
		{
			out.fail(i, "session did not establish: " + r.client.termination_detail + r.server.termination_detail);
			continue;
		}
		const std::uint64_t m = std::uint64_t(1) << bits;
		bool ok = true;
		for (const auto* s : {&r.client, &r.server})
		{
			const bool reset = s->negotiated->seq_reset_enabled;
			const std::uint64_t sent = s->count(Event::Kind::Sent, reset);
			ok = ok && s->counters.snd == sent % m;
		}
		if (!ok)
			out.fail(i, "send counter differs from packets sent");
		else if (r.client.counters.snd != r.server.counters.rcv || r.server.counters.snd != r.client.counters.rcv)
			out.fail(i, "counters do not pair up");
		else if (r.client.channel_sent != r.server.channel_received || r.server.channel_sent != r.client.channel_received)
			out.fail(i, "received stream differs from sent stream");
	}
	return out;
}

} // namespace props
