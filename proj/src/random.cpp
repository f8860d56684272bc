#include "sshlab/random.hpp"

#include <openssl/rand.h>

#include <stdexcept>

namespace sshlab
{

Bytes RandomSource::bytes(std::size_t n)
{
	Bytes out(n);
	fill(out);
	return out;
}

std::uint64_t RandomSource::next_u64()
{
	std::uint8_t b[8];
	fill(b);
	std::uint64_t v = 0;
	for (auto c : b)
		v = (v << 8) | c;
	return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound)
{
	if (bound == 0)
		return 0;
	// rejection sampling to avoid modulo bias
	std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
	for (;;)
	{
		auto v = next_u64();
		if (v < limit)
			return v % bound;
	}
}

void SeededRandom::fill(std::span<std::uint8_t> out)
{
	std::size_t i = 0;
	while (i < out.size())
	{
		auto v = engine_();
		for (int k = 0; k < 8 && i < out.size(); ++k, ++i)
			out[i] = static_cast<std::uint8_t>(v >> (8 * k));
	}
}

void SystemRandom::fill(std::span<std::uint8_t> out)
{
	if (out.empty())
		return;
	if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
		throw std::runtime_error("RAND_bytes failed");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
	// splitmix64 over a combination of both inputs
	std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
	return z ^ (z >> 31);
}

} // namespace sshlab
