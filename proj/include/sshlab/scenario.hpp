#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sshlab/attacks.hpp"
#include "sshlab/mitm.hpp"
#include "sshlab/peer.hpp"

#include <json.hpp>

namespace sshlab
{

struct ScenarioSpec
{
	std::string name = "baseline";
	std::optional<ModeId> mode;
	std::size_t n_s = 1;
	std::size_t n_c = 0;
	bool use_ping = false;
	/// Overrides the profile of the scenario's victim peer(s).
	std::optional<std::string> profile;
	Countermeasures client_countermeasures;
	Countermeasures server_countermeasures;
	std::optional<unsigned> seq_bits;
	std::uint64_t seed = 1;

	/// technique-*
	Role target = Role::Client;
	std::size_t technique_n = 1;
	/// rogue-session
	int strategy = 1;
	UserAuthRequest attacker{"mallory", "ssh-connection", "password", "mallory-pass"};
	/// rogue-extension
	ExtensionList rogue_payload{{"server-sig-algs", "ssh-rsa"}};
	/// suffix-truncate
	std::size_t cut_after = 3;
	/// server
	bool send_second_ext_info = false;

	void set_countermeasures(const Countermeasures& both)
	{
		client_countermeasures = both;
		server_countermeasures = both;
	}
};

const std::vector<std::string>& scenario_names();
bool is_scenario(std::string_view name);

enum class TruncationOutcome
{
	CleanDeletion,
	ConnectionFailure,
	MacPassCorrupted,
};

std::string to_string(TruncationOutcome o);

struct TechniqueCounters
{
	std::optional<std::uint32_t> target_snd, target_rcv, peer_snd, peer_rcv;
	bool operator==(const TechniqueCounters&) const = default;
};

struct RunResult
{
	std::string scenario;
	std::string script;
	bool success = false;
	/// "SUCCESS" or "FAILED(<reason>)"
	std::string verdict;

	PeerSession client;
	PeerSession server;
	std::vector<std::string> mitm_log;
	std::size_t injected = 0;
	std::size_t deleted = 0;

	std::optional<TruncationOutcome> truncation;
	/// Verdict kind of the first corrupted channel packet, if any.
	std::string corruption;
	std::optional<TechniqueCounters> technique_baseline;
	std::optional<TechniqueCounters> technique_attack;
};

struct ScenarioSetup
{
	PeerConfig client;
	PeerConfig server;
	AttackScript script;
};

ScenarioSetup make_setup(const ScenarioSpec& spec);
RunResult run_scenario(const ScenarioSpec& spec);

/// Runs client and server through the fabric with the given script.
struct SessionPair
{
	PeerSession client;
	PeerSession server;
	std::vector<std::string> mitm_log;
	std::size_t injected = 0;
	std::size_t deleted = 0;
	FullTranscript client_transcript;
	FullTranscript server_transcript;
};
SessionPair run_pair(const PeerConfig& client, const PeerConfig& server, const AttackScript& script, std::uint64_t mitm_seed = 0);

TruncationOutcome classify_truncation(const PeerSession& client, const PeerSession& server, std::size_t n_s,
	std::size_t n_c, std::string* corruption = nullptr);

nlohmann::json to_json(const PeerSession& s);
nlohmann::json to_json(const RunResult& r);
std::string format_report(const RunResult& r);

} // namespace sshlab
