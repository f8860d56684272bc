#include "sshlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sshlab
{

double to_double(const Rational& r)
{
	return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_string(const Rational& r)
{
	return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational well_formed_prob(std::size_t ell)
{
	const std::int64_t valid = std::clamp<std::int64_t>(static_cast<std::int64_t>(ell) - 5, 0, 252);
	return {valid, 256};
}

Rational unrecognized_prob(const MessageIdRegistry& registry)
{
	return {static_cast<std::int64_t>(registry.unknown_count()), 256};
}

ProbabilityEstimate scenario2_prob(std::size_t ell, const MessageIdRegistry& registry)
{
	ProbabilityEstimate p;
	p.well_formed = well_formed_prob(ell);
	p.unrecognized = unrecognized_prob(registry);
	p.combined = p.well_formed * p.unrecognized;
	// The lower bound needs only one unknown id; it is 0 when every id is known.
	const Rational one_unknown{std::min<std::int64_t>(1, static_cast<std::int64_t>(registry.unknown_count())), 256};
	p.lower_bound = well_formed_prob(std::min<std::size_t>(ell, 16)) * one_unknown;
	p.upper_bound = Rational{252, 256} * p.unrecognized;
	return p;
}

LeadingPairCounts enumerate_leading_pairs(ByteView packet, const DecodeOptions& options)
{
	if (packet.size() < 6)
		throw std::invalid_argument("packet must hold a length field and two body bytes");
	Bytes work(packet.begin(), packet.end());
	LeadingPairCounts counts;
	for (unsigned p = 0; p < 256; ++p)
	{
		for (unsigned id = 0; id < 256; ++id)
		{
			work[4] = static_cast<std::uint8_t>(p);
			work[5] = static_cast<std::uint8_t>(id);
			const auto r = decode_packet(work, options);
			if (is_critically_corrupt(r))
				++counts.critical;
			else if (is_evasively_corrupt(r))
				++counts.evasive;
			else
				++counts.decoded[static_cast<std::uint8_t>(id)];
		}
	}
	return counts;
}

std::size_t brute_force_verdict_count(std::size_t ell, const MessageIdRegistry& registry)
{
	if (ell < 2 || ell > 1024)
		throw std::invalid_argument("ell must be in [2, 1024]");
	WireWriter w;
	w.u32(static_cast<std::uint32_t>(ell));
	Bytes packet = std::move(w).bytes();
	packet.resize(4 + ell, 0);
	DecodeOptions options;
	options.registry = &registry;
	return enumerate_leading_pairs(packet, options).evasive;
}

std::size_t downgrade_target_length(bool use_ping)
{
	SeededRandom rng(0);
	const Message m = use_ping ? Message{Pong{std::get<Ping>(attacks::large_ping()).data}} : Message{Unimplemented{0}};
	const auto& info = mode_info(ModeId::CbcEtM);
	return encode_packet(m, info.block_size, false, rng).packet_length;
}

std::optional<Rational> expected_rate(const ScenarioSpec& spec)
{
	if (spec.name == "baseline")
		return Rational{1};
	const auto& c = spec.client_countermeasures;
	const auto& s = spec.server_countermeasures;
	if ((c.seq_reset && s.seq_reset) || (c.transcript_mac && s.transcript_mac))
		return Rational{0};
	if (spec.name == "ext-downgrade-cbc-etm")
	{
		const auto setup = make_setup(spec);
		if (!setup.client.profile.respond_unimplemented_to_unknown)
			return Rational{0};
		return scenario2_prob(downgrade_target_length(spec.use_ping), setup.client.registry).combined;
	}
	return std::nullopt;
}

std::pair<double, double> binomial_interval(double p, std::size_t n, double sigmas)
{
	const double half = sigmas * std::sqrt(p * (1 - p) / static_cast<double>(n));
	return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

std::string outcome_label(const RunResult& r)
{
	std::string label = r.success ? "success" : "failure";
	if (r.truncation)
	{
		label += ":" + to_string(*r.truncation);
		if (!r.corruption.empty())
			label += "/" + r.corruption;
	}
	else if (!r.success)
	{
		const auto& side = r.client.has_error() ? r.client : r.server;
		label += side.termination ? ":" + to_string(side.role) + "/" + to_string(*side.termination) : ":unmet-goal";
	}
	return label;
}

TrialReport run_monte_carlo(const ScenarioSpec& spec, std::size_t trials, std::uint64_t seed, unsigned threads)
{
	if (trials == 0)
		throw std::invalid_argument("trials must be positive");

	std::vector<char> success(trials, 0);
	std::vector<std::string> labels(trials);

	auto run_range = [&](std::size_t first, std::size_t step) {
		for (std::size_t i = first; i < trials; i += step)
		{
			auto s = spec;
			s.seed = derive_seed(seed, i);
			const auto r = run_scenario(s);
			success[i] = r.success;
			labels[i] = outcome_label(r);
		}
	};

	if (threads == 0)
		threads = std::max(1u, std::thread::hardware_concurrency());
	threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
	std::vector<std::thread> pool;
	std::vector<std::exception_ptr> errors(threads);
	for (unsigned t = 0; t < threads; ++t)
		pool.emplace_back([&, t] {
			try
			{
				run_range(t, threads);
			}
			catch (...)
			{
				errors[t] = std::current_exception();
			}
		});
	for (auto& th : pool)
		th.join();
	for (auto& e : errors)
		if (e)
			std::rethrow_exception(e);

	const auto setup = make_setup(spec);
	TrialReport rep;
	rep.scenario = spec.name;
	rep.script = setup.script.name;
	if (!setup.client.ciphers.empty())
		rep.mode = setup.client.ciphers.front();
	if (!setup.client.macs.empty() && !rep.mode.ends_with("@openssh.com"))
		rep.mode += "+" + setup.client.macs.front();
	rep.seed = seed;
	rep.trials = trials;
	rep.successes = static_cast<std::size_t>(std::count(success.begin(), success.end(), 1));
	rep.empirical_rate = static_cast<double>(rep.successes) / static_cast<double>(trials);
	for (const auto& l : labels)
		++rep.outcomes[l];

	rep.expected = expected_rate(spec);
	if (rep.expected)
	{
		std::tie(rep.interval_low, rep.interval_high) = binomial_interval(to_double(*rep.expected), trials);
		// A degenerate interval demands the exact count.
		if (*rep.expected == Rational{0} || *rep.expected == Rational{1})
			rep.pass = rep.empirical_rate == to_double(*rep.expected);
		else
			rep.pass = rep.empirical_rate >= rep.interval_low && rep.empirical_rate <= rep.interval_high;
	}
	else
	{
		rep.interval_low = rep.interval_high = rep.empirical_rate;
		rep.pass = rep.successes == 0 || rep.successes == trials;
	}
	return rep;
}

nlohmann::json to_json(const ProbabilityEstimate& p)
{
	auto entry = [](const Rational& r) { return nlohmann::json{{"exact", to_string(r)}, {"value", to_double(r)}}; };
	return {{"well_formed", entry(p.well_formed)}, {"unrecognized", entry(p.unrecognized)},
		{"combined", entry(p.combined)}, {"lower_bound", entry(p.lower_bound)}, {"upper_bound", entry(p.upper_bound)}};
}

nlohmann::json to_json(const TrialReport& r)
{
	nlohmann::json j;
	j["schema"] = "sshlab.montecarlo/1";
	j["scenario"] = r.scenario;
	j["script"] = r.script;
	j["mode"] = r.mode;
	j["seed"] = r.seed;
	j["trials"] = r.trials;
	j["successes"] = r.successes;
	j["empirical_rate"] = r.empirical_rate;
	if (r.expected)
		j["expected_rate"] = {{"exact", to_string(*r.expected)}, {"value", to_double(*r.expected)}};
	else
		j["expected_rate"] = nullptr;
	j["interval_3sigma"] = {r.interval_low, r.interval_high};
	j["pass"] = r.pass;
	j["outcomes"] = r.outcomes;
	return j;
}

std::string format_table(const TrialReport& r)
{
	std::ostringstream os;
	os << std::fixed << std::setprecision(4);
	os << "scenario        " << r.scenario << " (" << r.script << ", " << r.mode << ")\n";
	os << "trials          " << r.trials << "  seed " << r.seed << '\n';
	os << "successes       " << r.successes << '\n';
	os << "empirical rate  " << r.empirical_rate << '\n';
	if (r.expected)
		os << "expected rate   " << to_double(*r.expected) << " (" << to_string(*r.expected) << ")\n";
	else
		os << "expected rate   n/a (deterministic scenario)\n";
	os << "3-sigma range   [" << r.interval_low << ", " << r.interval_high << "]\n";
	os << "pass            " << (r.pass ? "yes" : "no") << '\n';
	os << "outcomes\n";
	for (const auto& [label, n] : r.outcomes)
		os << "  " << std::setw(8) << n << "  " << label << '\n';
	return os.str();
}

} // namespace sshlab
