#include <gtest/gtest.h>

#include "sshlab/analysis.hpp"

using namespace sshlab;

namespace
{

/// Counts evasive (padding, id) pairs straight from the well-formedness rule.
std::size_t count_evasive(std::size_t ell, const MessageIdRegistry& reg)
{
	std::size_t n = 0;
	for (std::size_t p = 0; p < 256; ++p)
		for (std::size_t id = 0; id < 256; ++id)
			n += (p >= 4 && p + 2 <= ell && !reg.known(static_cast<std::uint8_t>(id)));
	return n;
}

} // namespace

TEST(Analysis, ClosedFormsAtSixteen)
{
	const auto e = scenario2_prob(16);
	EXPECT_EQ(e.well_formed, Rational(11, 256));
	EXPECT_EQ(e.unrecognized, Rational(213, 256));
	EXPECT_EQ(e.combined, Rational(2343, 65536));
	EXPECT_EQ(e.lower_bound, Rational(11, 65536));
	EXPECT_EQ(e.upper_bound, Rational(13419, 16384));
	EXPECT_NEAR(to_double(e.upper_bound), 0.8190, 5e-5);
	EXPECT_EQ(to_string(Rational(2343, 65536)), "2343/65536");
}

TEST(Analysis, WellFormedShareSaturates)
{
	EXPECT_EQ(well_formed_prob(4), Rational(0));
	EXPECT_EQ(well_formed_prob(5), Rational(0));
	EXPECT_EQ(well_formed_prob(257), Rational(252, 256));
	EXPECT_EQ(well_formed_prob(100000), Rational(252, 256));
	for (std::size_t ell = 1; ell < 600; ++ell)
		EXPECT_LE(well_formed_prob(ell), well_formed_prob(ell + 1));
}

TEST(Analysis, BruteForceMatchesCountingOracle)
{
	for (std::size_t ell : {8u, 16u, 32u, 264u, 272u, 512u})
	{
		const auto& reg = MessageIdRegistry::default_profile();
		const std::size_t n = brute_force_verdict_count(ell, reg);
		EXPECT_EQ(n, count_evasive(ell, reg)) << ell;
		EXPECT_EQ(Rational(static_cast<std::int64_t>(n), 65536), scenario2_prob(ell, reg).combined) << ell;
	}
}

TEST(Analysis, RegistryExtremes)
{
	EXPECT_EQ(brute_force_verdict_count(16, MessageIdRegistry::all_known()), 0u);
	EXPECT_EQ(brute_force_verdict_count(16, MessageIdRegistry::none_known()), 11u * 256u);
	EXPECT_EQ(unrecognized_prob(MessageIdRegistry::none_known()), Rational(1));
	EXPECT_EQ(MessageIdRegistry::default_profile().known_count(), 43u);
}

TEST(Analysis, EnumerationPartitionsAllPairs)
{
	WireWriter w;
	w.u32(32).u8(0).raw(Bytes(31, 0));
	const auto c = enumerate_leading_pairs(w.bytes());
	std::size_t decoded = 0;
	for (const auto& [id, n] : c.decoded)
		decoded += n;
	EXPECT_EQ(c.critical + c.evasive + decoded, 65536u);
	EXPECT_EQ(c.evasive, 27u * 213u);
}

TEST(Analysis, DowngradeTargets)
{
	EXPECT_EQ(downgrade_target_length(false), 16u);
	EXPECT_EQ(downgrade_target_length(true), 272u);
}

TEST(Analysis, ExpectedRates)
{
	ScenarioSpec s;
	EXPECT_EQ(expected_rate(s), Rational(1));

	s.set_countermeasures({true, false});
	EXPECT_EQ(expected_rate(s), Rational(1));
	s.name = "prefix-truncate";
	EXPECT_EQ(expected_rate(s), Rational(0));

	ScenarioSpec d;
	d.name = "ext-downgrade-cbc-etm";
	EXPECT_EQ(expected_rate(d), scenario2_prob(16).combined);
	d.use_ping = true;
	EXPECT_EQ(expected_rate(d), scenario2_prob(272).combined);
	d.profile = "dropbear";
	EXPECT_EQ(expected_rate(d), Rational(0));

	ScenarioSpec r;
	r.name = "rogue-session";
	EXPECT_FALSE(expected_rate(r).has_value());
}

TEST(Analysis, BinomialInterval)
{
	auto [lo, hi] = binomial_interval(0.5, 10000);
	EXPECT_NEAR(lo, 0.485, 1e-12);
	EXPECT_NEAR(hi, 0.515, 1e-12);
	auto [z0, z1] = binomial_interval(0.0, 100);
	EXPECT_EQ(z0, 0.0);
	EXPECT_EQ(z1, 0.0);
	auto [c0, c1] = binomial_interval(0.999, 10);
	EXPECT_LE(c1, 1.0);
	EXPECT_GE(c0, 0.0);
}

TEST(Analysis, MonteCarloIndependentOfThreadCount)
{
	ScenarioSpec s;
	s.name = "ext-downgrade-cbc-etm";
	const auto one = run_monte_carlo(s, 300, 42, 1);
	const auto many = run_monte_carlo(s, 300, 42, 4);
	EXPECT_EQ(one.successes, many.successes);
	EXPECT_EQ(one.outcomes, many.outcomes);
	EXPECT_EQ(one.trials, 300u);
	const auto other = run_monte_carlo(s, 300, 43, 4);
	EXPECT_NE(one.outcomes, other.outcomes);
}

TEST(Analysis, MonteCarloDeterministicScenario)
{
	ScenarioSpec s;
	s.name = "prefix-truncate";
	const auto r = run_monte_carlo(s, 20, 5, 2);
	EXPECT_EQ(r.successes, 20u);
	EXPECT_TRUE(r.pass);
	EXPECT_EQ(to_json(r)["schema"], "sshlab.montecarlo/1");
	EXPECT_NE(format_table(r).find("prefix-truncate"), std::string::npos);
}

TEST(Analysis, RejectsZeroTrials)
{
	EXPECT_THROW(run_monte_carlo(ScenarioSpec{}, 0, 1), std::invalid_argument);
}
