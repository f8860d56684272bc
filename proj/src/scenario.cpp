#include "sshlab/scenario.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "sshlab/fabric.hpp"

namespace sshlab
{

const std::vector<std::string>& scenario_names()
{
	static const std::vector<std::string> names{"baseline", "prefix-truncate", "ext-downgrade-chacha",
		"ext-downgrade-cbc-etm", "rogue-extension", "rogue-session", "suffix-truncate", "technique-rcv-inc",
		"technique-rcv-dec", "technique-snd-inc", "technique-snd-dec"};
	return names;
}

bool is_scenario(std::string_view name)
{
	const auto& n = scenario_names();
	return std::find(n.begin(), n.end(), name) != n.end();
}

std::string to_string(TruncationOutcome o)
{
	switch (o)
	{
		case TruncationOutcome::CleanDeletion: return "clean-deletion";
		case TruncationOutcome::ConnectionFailure: return "connection-failure";
		case TruncationOutcome::MacPassCorrupted: return "mac-pass-corrupted";
	}
	return "?";
}

namespace
{

bool is_technique(std::string_view name)
{
	return name.starts_with("technique-");
}

StrictnessProfile profile_or(const ScenarioSpec& spec, StrictnessProfile fallback)
{
	if (!spec.profile)
		return fallback;
	auto p = StrictnessProfile::named(*spec.profile);
	if (!p)
		throw std::invalid_argument("unknown profile " + *spec.profile);
	return *p;
}

std::string failed(const std::string& why)
{
	return "FAILED(" + why + ")";
}

std::string termination_of(const PeerSession& s)
{
	if (!s.termination)
		return "none";
	return to_string(*s.termination) + ": " + s.termination_detail;
}

const Event* first_channel_receive(const PeerSession& s)
{
	for (const auto& e : s.events)
		if (e.encrypted && (e.kind == Event::Kind::Received || e.kind == Event::Kind::ReceivedEvasive ||
							   e.kind == Event::Kind::ReceivedCritical))
			return &e;
	return nullptr;
}

const Event* sent_at(const PeerSession& s, std::uint32_t seqno)
{
	for (const auto& e : s.events)
		if (e.kind == Event::Kind::Sent && e.encrypted && e.seqno == seqno)
			return &e;
	return nullptr;
}

std::size_t channel_receives(const PeerSession& s)
{
	return s.count(Event::Kind::Received, true) + s.count(Event::Kind::ReceivedEvasive, true) +
		   s.count(Event::Kind::ReceivedCritical, true);
}

/// Receiver-side view of a deletion: did the first channel packet open, and
/// does it match what the sender sealed under that sequence number?
TruncationOutcome classify_receiver(const PeerSession& receiver, const PeerSession& sender, std::string* corruption)
{
	const auto* e = first_channel_receive(receiver);
	if (!e)
		return TruncationOutcome::ConnectionFailure;
	const auto* s = sent_at(sender, e->seqno);
	if (s && s->plaintext == e->plaintext)
		return TruncationOutcome::CleanDeletion;
	if (corruption)
	{
		switch (e->kind)
		{
			case Event::Kind::ReceivedEvasive: *corruption = "evasive"; break;
			case Event::Kind::ReceivedCritical: *corruption = "critical"; break;
			default: *corruption = "decoded-" + message_name(e->msg_id); break;
		}
	}
	return TruncationOutcome::MacPassCorrupted;
}

TechniqueCounters technique_counters(const SessionPair& p, Role target)
{
	const auto& t = target == Role::Client ? p.client : p.server;
	const auto& o = target == Role::Client ? p.server : p.client;
	return {t.activation_snd, t.activation_rcv, o.activation_snd, o.activation_rcv};
}

} // namespace

TruncationOutcome classify_truncation(
	const PeerSession& client, const PeerSession& server, std::size_t n_s, std::size_t n_c, std::string* corruption)
{
	std::vector<TruncationOutcome> seen;
	if (n_s || !n_c)
		seen.push_back(classify_receiver(client, server, corruption));
	if (n_c)
		seen.push_back(classify_receiver(server, client, corruption));

	if (std::find(seen.begin(), seen.end(), TruncationOutcome::MacPassCorrupted) != seen.end())
		return TruncationOutcome::MacPassCorrupted;
	if (std::find(seen.begin(), seen.end(), TruncationOutcome::ConnectionFailure) != seen.end())
		return TruncationOutcome::ConnectionFailure;
	if (client.has_error() || server.has_error() || !client.established)
		return TruncationOutcome::ConnectionFailure;
	return TruncationOutcome::CleanDeletion;
}

SessionPair run_pair(const PeerConfig& client_cfg, const PeerConfig& server_cfg, const AttackScript& script,
	std::uint64_t mitm_seed)
{
	ClientPeer client(client_cfg);
	ServerPeer server(server_cfg);
	Mitm mitm(script, mitm_seed);
	Fabric fabric(client, server, script.rules.empty() ? nullptr : &mitm);
	fabric.run();

	SessionPair p;
	p.client = client.session();
	p.server = server.session();
	p.mitm_log = mitm.log();
	p.injected = mitm.injected();
	p.deleted = mitm.deleted();
	p.client_transcript = client.transcript();
	p.server_transcript = server.transcript();
	return p;
}

ScenarioSetup make_setup(const ScenarioSpec& spec)
{
	if (!is_scenario(spec.name))
		throw std::invalid_argument("unknown scenario " + spec.name);

	ScenarioSetup s;
	s.client = PeerConfig::client_defaults();
	s.server = PeerConfig::server_defaults();
	s.client.seed = derive_seed(spec.seed, 1);
	s.server.seed = derive_seed(spec.seed, 2);
	s.client.countermeasures = spec.client_countermeasures;
	s.server.countermeasures = spec.server_countermeasures;
	s.client.workload = {Ping{to_bytes("keystroke-1")}, Ignore{to_bytes("chaff")}, Ping{to_bytes("keystroke-2")},
		Debug{false, "workload", ""}, Ping{to_bytes("keystroke-3")}};
	s.server.send_second_ext_info = spec.send_second_ext_info;

	const unsigned bits = spec.seq_bits.value_or(is_technique(spec.name) ? 16u : 32u);
	s.client.seq_bits = s.server.seq_bits = bits;

	ModeId mode = spec.mode.value_or(ModeId::ChaCha20Poly1305);
	const auto& n = spec.name;
	auto& victim_client = s.client.profile;
	auto& victim_server = s.server.profile;

	if (n == "baseline" || n == "prefix-truncate" || n == "suffix-truncate")
	{
		victim_client = victim_server = profile_or(spec, StrictnessProfile::strict());
		if (n == "prefix-truncate")
			s.script = attacks::prefix_truncate(spec.n_s, spec.n_c);
		else if (n == "suffix-truncate")
			s.script = attacks::suffix_truncate(spec.cut_after);
	}
	else if (n == "ext-downgrade-chacha")
	{
		mode = ModeId::ChaCha20Poly1305;
		victim_client = profile_or(spec, StrictnessProfile::strict());
		s.script = attacks::extension_downgrade_chacha();
	}
	else if (n == "ext-downgrade-cbc-etm")
	{
		mode = ModeId::CbcEtM;
		victim_client = profile_or(spec, StrictnessProfile::lenient());
		s.script = attacks::extension_downgrade_cbc_etm(spec.use_ping);
	}
	else if (n == "rogue-extension")
	{
		victim_client = profile_or(spec, StrictnessProfile::asyncssh());
		s.script = attacks::rogue_extension(ExtInfo{spec.rogue_payload});
	}
	else if (n == "rogue-session")
	{
		victim_server = profile_or(spec, StrictnessProfile::asyncssh());
		const bool client_ext = spec.strategy == 1;
		if (!client_ext)
			s.client.extensions.clear();
		s.script = attacks::rogue_session(spec.attacker, spec.strategy, client_ext);
	}
	else
	{
		auto& target = spec.target == Role::Client ? victim_client : victim_server;
		target = profile_or(spec, StrictnessProfile::lenient());
		const auto k = spec.technique_n;
		if (n == "technique-rcv-inc")
			s.script = attacks::rcv_increase(spec.target, k);
		else if (n == "technique-rcv-dec")
			s.script = attacks::rcv_decrease(spec.target, k, bits);
		else if (n == "technique-snd-inc")
			s.script = attacks::snd_increase(spec.target, k, bits);
		else
			s.script = attacks::snd_decrease(spec.target, k, bits);
	}

	s.client.restrict_to(mode);
	s.server.restrict_to(mode);
	return s;
}

RunResult run_scenario(const ScenarioSpec& spec)
{
	auto setup = make_setup(spec);
	const auto mitm_seed = derive_seed(spec.seed, 3);
	auto pair = run_pair(setup.client, setup.server, setup.script, mitm_seed);

	RunResult r;
	r.scenario = spec.name;
	r.script = setup.script.name;
	r.client = pair.client;
	r.server = pair.server;
	r.mitm_log = pair.mitm_log;
	r.injected = pair.injected;
	r.deleted = pair.deleted;

	const auto& c = r.client;
	const auto& s = r.server;
	const auto& n = spec.name;
	const bool clean_client = c.established && !c.has_error();
	std::string why;

	if (n == "baseline")
	{
		r.success = clean_client && s.established && !s.has_error();
		why = c.has_error() ? "client " + termination_of(c) : "server " + termination_of(s);
	}
	else if (n == "prefix-truncate")
	{
		r.truncation = classify_truncation(c, s, spec.n_s, spec.n_c, &r.corruption);
		r.success = *r.truncation == TruncationOutcome::CleanDeletion;
		why = to_string(*r.truncation) + (r.corruption.empty() ? "" : " " + r.corruption) + "; client " +
			  termination_of(c);
	}
	else if (n == "ext-downgrade-chacha" || n == "ext-downgrade-cbc-etm")
	{
		r.truncation = classify_truncation(c, s, 1, 0, &r.corruption);
		r.success = clean_client && s.established && !s.has_error() && c.received_extensions.empty() &&
					!c.keystroke_countermeasure_active();
		if (!clean_client)
			why = "client " + termination_of(c);
		else if (!c.received_extensions.empty())
			why = "client holds " + std::to_string(c.received_extensions.size()) + " server extensions";
		else
			why = "server " + termination_of(s);
	}
	else if (n == "rogue-extension")
	{
		r.success = clean_client && c.received_extensions == spec.rogue_payload;
		why = clean_client ? "client extensions differ from the payload" : "client " + termination_of(c);
	}
	else if (n == "rogue-session")
	{
		r.success = clean_client && s.authenticated_user == spec.attacker.user;
		why = clean_client ? "server user is " + s.authenticated_user.value_or("<none>") : "client " + termination_of(c);
	}
	else if (n == "suffix-truncate")
	{
		const auto got = channel_receives(c);
		r.success = !c.has_error() && got == spec.cut_after;
		why = c.has_error() ? "client " + termination_of(c)
							: "client received " + std::to_string(got) + " channel packets";
	}
	else
	{
		auto base = run_pair(setup.client, setup.server, attacks::passthrough(), mitm_seed);
		auto before = technique_counters(base, spec.target);
		auto after = technique_counters(pair, spec.target);
		r.technique_baseline = before;
		r.technique_attack = after;

		const auto& t = spec.target == Role::Client ? c : s;
		const std::uint64_t mod = std::uint64_t(1) << setup.client.seq_bits;
		const bool decrease = n == "technique-rcv-dec" || n == "technique-snd-dec";
		const bool on_snd = n == "technique-snd-inc" || n == "technique-snd-dec";
		auto shifted = [&](std::optional<std::uint32_t> v) -> std::optional<std::uint32_t> {
			if (!v)
				return std::nullopt;
			const std::uint64_t k = spec.technique_n % mod;
			return static_cast<std::uint32_t>((*v + (decrease ? mod - k : k)) % mod);
		};
		auto expected = before;
		if (on_snd)
			expected.target_snd = shifted(before.target_snd);
		else
			expected.target_rcv = shifted(before.target_rcv);

		const bool activated = after.target_snd && after.target_rcv;
		const bool xmac = t.negotiated && t.negotiated->transcript_mac_enabled;
		r.success = activated && after == expected && (!xmac || t.transcript_mac_verified);
		if (!activated)
			why = "target aborted before key activation: " + termination_of(t);
		else if (!(after == expected))
			why = "counters did not move as intended";
		else
			why = "target failed transcript MAC verification";
	}

	r.verdict = r.success ? (n == "suffix-truncate" ? "SUCCESS(silent truncation)" : "SUCCESS") : failed(why);
	return r;
}

// --------------------------------------------------------------------

nlohmann::json to_json(const PeerSession& s)
{
	nlohmann::json j;
	j["role"] = to_string(s.role);
	j["established"] = s.established;
	j["authenticated_user"] = s.authenticated_user ? nlohmann::json(*s.authenticated_user) : nlohmann::json();
	j["termination"] = s.termination ? nlohmann::json(to_string(*s.termination)) : nlohmann::json();
	j["termination_detail"] = s.termination_detail;
	j["counters"] = {{"snd", s.counters.snd}, {"rcv", s.counters.rcv}, {"bits", s.counters.bits}};
	j["activation"] = {{"snd", s.activation_snd ? nlohmann::json(*s.activation_snd) : nlohmann::json()},
		{"rcv", s.activation_rcv ? nlohmann::json(*s.activation_rcv) : nlohmann::json()}};
	auto ext = nlohmann::json::array();
	for (const auto& [k, v] : s.received_extensions)
		ext.push_back({k, v});
	j["received_extensions"] = ext;
	j["keystroke_countermeasure_active"] = s.keystroke_countermeasure_active();
	j["transcript_mac_verified"] = s.transcript_mac_verified;
	if (s.negotiated)
	{
		j["negotiated"] = {{"c2s", to_string(s.negotiated->mode_for(Direction::ClientToServer))},
			{"s2c", to_string(s.negotiated->mode_for(Direction::ServerToClient))},
			{"seq_reset", s.negotiated->seq_reset_enabled}, {"transcript_mac", s.negotiated->transcript_mac_enabled}};
	}
	// Bulk injections would swamp the log; keep the first and last events.
	auto events = nlohmann::json::array();
	const std::size_t limit = 200;
	for (std::size_t i = 0; i < s.events.size(); ++i)
	{
		if (s.events.size() > limit && i == limit / 2)
		{
			events.push_back("... " + std::to_string(s.events.size() - limit) + " events elided ...");
			i = s.events.size() - limit / 2;
		}
		events.push_back(format_event(s.events[i]));
	}
	j["events"] = events;
	return j;
}

nlohmann::json to_json(const RunResult& r)
{
	nlohmann::json j;
	j["schema"] = "sshlab.run/1";
	j["scenario"] = r.scenario;
	j["script"] = r.script;
	j["success"] = r.success;
	j["verdict"] = r.verdict;
	if (r.truncation)
		j["truncation"] = to_string(*r.truncation);
	if (!r.corruption.empty())
		j["corruption"] = r.corruption;
	auto counters = [](const TechniqueCounters& t) {
		auto opt = [](const std::optional<std::uint32_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
		return nlohmann::json{{"target_snd", opt(t.target_snd)}, {"target_rcv", opt(t.target_rcv)},
			{"peer_snd", opt(t.peer_snd)}, {"peer_rcv", opt(t.peer_rcv)}};
	};
	if (r.technique_baseline)
		j["technique_baseline"] = counters(*r.technique_baseline);
	if (r.technique_attack)
		j["technique_attack"] = counters(*r.technique_attack);
	j["mitm"] = {{"injected", r.injected}, {"deleted", r.deleted}, {"log", r.mitm_log}};
	j["client"] = to_json(r.client);
	j["server"] = to_json(r.server);
	return j;
}

std::string format_report(const RunResult& r)
{
	std::ostringstream os;
	os << "scenario: " << r.scenario << "  script: " << r.script << '\n';
	for (const auto* side : {&r.client, &r.server})
	{
		os << "\n[" << to_string(side->role) << "]\n";
		const auto j = to_json(*side);
		for (const auto& e : j["events"])
			os << "  " << e.get<std::string>() << '\n';
	}
	os << "\n[mitm] injected=" << r.injected << " deleted=" << r.deleted << '\n';
	for (const auto& l : r.mitm_log)
		os << "  " << l << '\n';
	os << "\nclient extensions:";
	if (r.client.received_extensions.empty())
		os << " (none)";
	for (const auto& [k, v] : r.client.received_extensions)
		os << ' ' << k << '=' << v;
	os << "\nserver authenticated user: " << r.server.authenticated_user.value_or("(none)") << '\n';
	os << "verdict: " << r.verdict << '\n';
	return os.str();
}

} // namespace sshlab
