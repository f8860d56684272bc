// Command-line entry point: demo, montecarlo, scan, analyze.
//
// Exit codes: 0 = ran to a verdict (attack failure included), 1 = usage, 2 = internal error.

#include <bit>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sshlab/analysis.hpp"
#include "sshlab/scanner.hpp"
#include "sshlab/scenario.hpp"

using namespace sshlab;

namespace
{

struct UsageError : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

struct SpecArgs
{
	std::string scenario = "baseline";
	std::string mode;
	std::string profile;
	std::string countermeasure = "none";
	std::string countermeasure_side = "both";
	std::uint64_t seq_modulus = 0;
	std::uint64_t seed = 1;
	std::size_t n_s = 1;
	std::size_t n_c = 0;
	bool ping = false;
	std::string target = "client";
	std::size_t technique_n = 1;
	int strategy = 1;
	std::size_t cut_after = 3;
};

void add_spec_options(CLI::App& app, SpecArgs& a)
{
	app.add_option("--scenario", a.scenario, "Scenario name")->check(CLI::IsMember(scenario_names()));
	app.add_option("--mode", a.mode, "cbc-eam | cbc-etm | ctr-eam | ctr-etm | gcm | chacha20-poly1305");
	app.add_option("--profile", a.profile, "Victim profile")->check(CLI::IsMember(StrictnessProfile::names()));
	app.add_option("--countermeasure", a.countermeasure, "Countermeasure to signal")
		->check(CLI::IsMember({"none", "seq-reset", "transcript-mac", "both"}));
	app.add_option("--countermeasure-side", a.countermeasure_side, "Which peers signal it")
		->check(CLI::IsMember({"both", "client", "server"}));
	app.add_option("--seq-modulus", a.seq_modulus, "Counter width in bits (<= 32) or the modulus 2^w");
	app.add_option("--seed", a.seed, "Master seed");
	app.add_option("--n-s", a.n_s, "prefix-truncate: packets deleted toward the client");
	app.add_option("--n-c", a.n_c, "prefix-truncate: packets deleted toward the server");
	app.add_flag("--ping", a.ping, "ext-downgrade-cbc-etm: bet on the Pong instead of Unimplemented");
	app.add_option("--target", a.target, "technique-*: peer whose counter moves")->check(CLI::IsMember({"client", "server"}));
	app.add_option("--n", a.technique_n, "technique-*: counter offset");
	app.add_option("--strategy", a.strategy, "rogue-session strategy")->check(CLI::IsMember({1, 2}));
	app.add_option("--cut-after", a.cut_after, "suffix-truncate: channel packets let through");
}

unsigned seq_bits(std::uint64_t v)
{
	if (v == 0)
		return 0;
	if (v <= 32)
		return static_cast<unsigned>(v);
	if (std::has_single_bit(v) && v <= (std::uint64_t(1) << 32))
		return static_cast<unsigned>(std::countr_zero(v));
	throw UsageError("--seq-modulus must be a bit width <= 32 or a power of two <= 2^32");
}

ScenarioSpec make_spec(const SpecArgs& a)
{
	ScenarioSpec s;
	s.name = a.scenario;
	if (!a.mode.empty())
	{
		s.mode = parse_mode(a.mode);
		if (!s.mode)
			throw UsageError("unknown mode " + a.mode);
	}
	if (!a.profile.empty())
		s.profile = a.profile;
	const auto cm = Countermeasures::named(a.countermeasure);
	if (a.countermeasure_side != "server")
		s.client_countermeasures = *cm;
	if (a.countermeasure_side != "client")
		s.server_countermeasures = *cm;
	if (auto bits = seq_bits(a.seq_modulus))
		s.seq_bits = bits;
	s.seed = a.seed;
	s.n_s = a.n_s;
	s.n_c = a.n_c;
	s.use_ping = a.ping;
	s.target = a.target == "server" ? Role::Server : Role::Client;
	s.technique_n = a.technique_n;
	s.strategy = a.strategy;
	s.cut_after = a.cut_after;
	return s;
}

void write_file(const std::string& path, const std::string& content)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw std::runtime_error("cannot write " + path);
	out << content;
}

std::string read_file(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw UsageError("cannot read " + path);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"SSH binary packet protocol attack lab"};
	app.require_subcommand(1);

	SpecArgs demo_args;
	std::string demo_out;
	bool demo_json = false;
	auto* demo = app.add_subcommand("demo", "Run one scripted session and print the event logs and verdict");
	add_spec_options(*demo, demo_args);
	demo->add_option("--out", demo_out, "Write the JSON report here");
	demo->add_flag("--json", demo_json, "Print JSON instead of the text report");

	SpecArgs mc_args;
	mc_args.scenario = "ext-downgrade-cbc-etm";
	std::size_t trials = 1000;
	unsigned threads = 0;
	std::string mc_out;
	bool mc_json = false;
	auto* mc = app.add_subcommand("montecarlo", "Repeat a scenario with per-trial seeds and compare to the closed form");
	add_spec_options(*mc, mc_args);
	mc->add_option("--trials", trials, "Number of trials");
	mc->add_option("--threads", threads, "Worker threads (0 = hardware)");
	mc->add_option("--out", mc_out, "Write the JSON report here");
	mc->add_flag("--json", mc_json, "Print JSON instead of the table");

	std::string fleet_path;
	std::string targets_path;
	std::string scan_out;
	bool live = false;
	bool acknowledged = false;
	LiveScanOptions live_opts;
	std::string blocklist_path;
	std::uint64_t scan_seed = 1;
	auto* scan = app.add_subcommand("scan", "Classify servers by authenticated-encryption posture");
	auto* fleet_opt = scan->add_option("--fleet", fleet_path, "Simulated fleet config (JSON)");
	auto* targets_opt = scan->add_option("--targets", targets_path, "host[:port] per line (requires --live)");
	fleet_opt->excludes(targets_opt);
	scan->add_option("--out", scan_out, "Output prefix: <out>.json, <out>_families.csv, <out>_modes.csv, <out>_extensions.csv");
	scan->add_flag("--live", live, "Probe real TCP endpoints");
	scan->add_flag("--i-understand-scanning", acknowledged, "Acknowledge that live probes reach third-party hosts");
	scan->add_option("--rate", live_opts.rate_per_second, "Live probes per second");
	scan->add_option("--workers", live_opts.workers, "Concurrent live probes");
	scan->add_option("--blocklist", blocklist_path, "Hosts, host:port or IPv4 CIDR ranges never to probe");
	scan->add_option("--banner", live_opts.client_banner, "Client identification string");
	scan->add_option("--seed", scan_seed, "Seed for the simulated fleet");

	std::size_t ell = 16;
	std::string registry_path;
	auto* analyze = app.add_subcommand("analyze", "Closed-form probabilities and the counting oracle for one length");
	analyze->add_option("--ell", ell, "Packet length of the corrupted packet")->check(CLI::Range(2, 1024));
	analyze->add_option("--registry", registry_path, "Known-id registry (JSON)");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError& e)
	{
		const int rc = app.exit(e);
		return rc == 0 ? 0 : 1;
	}

	try
	{
		if (*demo)
		{
			const auto r = run_scenario(make_spec(demo_args));
			const auto j = to_json(r);
			if (!demo_out.empty())
				write_file(demo_out, j.dump(2) + "\n");
			std::cout << (demo_json ? j.dump(2) + "\n" : format_report(r));
			return 0;
		}
		if (*mc)
		{
			if (trials == 0)
				throw UsageError("--trials must be positive");
			const auto rep = run_monte_carlo(make_spec(mc_args), trials, mc_args.seed, threads);
			const auto j = to_json(rep);
			if (!mc_out.empty())
				write_file(mc_out, j.dump(2) + "\n");
			std::cout << (mc_json ? j.dump(2) + "\n" : format_table(rep));
			return 0;
		}
		if (*scan)
		{
			std::vector<ServerObservation> obs;
			if (live)
			{
				if (!acknowledged)
				{
					std::cerr << "refusing to scan live hosts without --i-understand-scanning\n";
					return 1;
				}
				if (targets_path.empty())
					throw UsageError("--live needs --targets");
				live_opts.acknowledged = true;
				if (!blocklist_path.empty())
					live_opts.blocklist = Blocklist::load(blocklist_path);
				const auto targets = parse_targets(read_file(targets_path));
				if (targets.empty())
					throw UsageError("no targets in " + targets_path);
				obs = scan_live(targets, live_opts);
				if (obs.empty())
					throw UsageError("every target is blocklisted");
			}
			else
			{
				if (!targets_path.empty())
					throw UsageError("--targets probes real hosts and needs --live");
				if (fleet_path.empty())
					fleet_path = std::string(SSHLAB_DATA_DIR) + "/fleet_100.json";
				obs = scan_fleet(FleetConfig::load(fleet_path), scan_seed);
			}
			const auto report = aggregate(obs);
			if (!scan_out.empty())
			{
				auto j = to_json(report);
				j["observations"] = nlohmann::json::array();
				for (const auto& o : obs)
					j["observations"].push_back(to_json(o));
				write_file(scan_out + ".json", j.dump(2) + "\n");
				write_file(scan_out + "_families.csv", family_csv(report));
				write_file(scan_out + "_modes.csv", mode_csv(report));
				write_file(scan_out + "_extensions.csv", extension_csv(report));
			}
			std::cout << format_tables(report);
			return 0;
		}
		if (*analyze)
		{
			const auto registry =
				registry_path.empty() ? MessageIdRegistry::default_profile() : MessageIdRegistry::load(registry_path);
			auto j = to_json(scenario2_prob(ell, registry));
			j["ell"] = ell;
			j["known_ids"] = registry.known_count();
			j["brute_force_evasive_pairs"] = brute_force_verdict_count(ell, registry);
			std::cout << j.dump(2) << '\n';
			return 0;
		}
	}
	catch (const UsageError& e)
	{
		std::cerr << "usage error: " << e.what() << '\n';
		return 1;
	}
	catch (const std::invalid_argument& e)
	{
		std::cerr << "usage error: " << e.what() << '\n';
		return 1;
	}
	catch (const std::exception& e)
	{
		std::cerr << "internal error: " << e.what() << '\n';
		return 2;
	}
	return 1;
}
