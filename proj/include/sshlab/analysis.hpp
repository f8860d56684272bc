#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <boost/rational.hpp>
#include <json.hpp>

#include "sshlab/packet.hpp"
#include "sshlab/registry.hpp"
#include "sshlab/scenario.hpp"

namespace sshlab
{

using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// Probabilities for a corrupted first block of a packet whose encrypted part
/// is `ell` bytes long (the packet_length of an EtM packet).
struct ProbabilityEstimate
{
	Rational well_formed;
	Rational unrecognized;
	Rational combined;
	/// At ell = 16 with a single unknown id.
	Rational lower_bound;
	/// At the maximal well-formed share with the full registry gap.
	Rational upper_bound;
};

/// min(252, ell - 5) / 256, clamped at 0.
Rational well_formed_prob(std::size_t ell);
/// (256 - |known|) / 256
Rational unrecognized_prob(const MessageIdRegistry& registry);
ProbabilityEstimate scenario2_prob(std::size_t ell, const MessageIdRegistry& registry = MessageIdRegistry::default_profile());

/// Outcome counts over all 2^16 values of the first two body bytes
/// (padding length, message id) of a plaintext packet.
struct LeadingPairCounts
{
	std::size_t critical = 0;
	std::size_t evasive = 0;
	/// Decoded messages keyed by message id.
	std::map<std::uint8_t, std::size_t> decoded;
};

/// `packet` is length field || body; bytes 4 and 5 are substituted.
LeadingPairCounts enumerate_leading_pairs(ByteView packet, const DecodeOptions& options = {});

/// Evasively corrupt pairs for an ell-byte body. Equals min(252, ell-5) * (256 - |known|).
std::size_t brute_force_verdict_count(std::size_t ell, const MessageIdRegistry& registry = MessageIdRegistry::default_profile());

/// Ciphertext length of the packet the downgrade bets on: Unimplemented or
/// the Pong answering the large Ping.
std::size_t downgrade_target_length(bool use_ping);

/// Analytic success rate, if the scenario has one. Scenarios with active
/// countermeasures or a disconnect-on-unknown victim have rate 0.
std::optional<Rational> expected_rate(const ScenarioSpec& spec);

struct TrialReport
{
	std::string scenario;
	std::string script;
	std::string mode;
	std::uint64_t seed = 0;
	std::size_t trials = 0;
	std::size_t successes = 0;
	double empirical_rate = 0;
	/// Absent for scenarios without a closed form; those must be all-or-nothing.
	std::optional<Rational> expected;
	double interval_low = 0;
	double interval_high = 0;
	bool pass = false;
	/// Outcome label -> count
	std::map<std::string, std::size_t> outcomes;
};

/// expected +- 3 sqrt(p(1-p)/n), clamped to [0, 1].
std::pair<double, double> binomial_interval(double p, std::size_t n, double sigmas = 3.0);

/// Runs `trials` independent sessions; trial i uses seed derive_seed(seed, i).
/// Results do not depend on `threads`.
TrialReport run_monte_carlo(const ScenarioSpec& spec, std::size_t trials, std::uint64_t seed, unsigned threads = 0);

std::string outcome_label(const RunResult& r);

nlohmann::json to_json(const ProbabilityEstimate& p);
nlohmann::json to_json(const TrialReport& r);
std::string format_table(const TrialReport& r);

} // namespace sshlab
