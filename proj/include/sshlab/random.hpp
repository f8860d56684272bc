#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "sshlab/wire.hpp"

namespace sshlab
{

/// Source of random bytes for padding, cookies and ephemeral keys.
class RandomSource
{
  public:
	virtual ~RandomSource() = default;
	virtual void fill(std::span<std::uint8_t> out) = 0;

	Bytes bytes(std::size_t n);
	std::uint64_t next_u64();
	/// Uniform in [0, bound).
	std::uint64_t uniform(std::uint64_t bound);
};

/// Deterministic generator; identical seeds yield identical streams on every platform.
class SeededRandom final : public RandomSource
{
  public:
	explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
	void fill(std::span<std::uint8_t> out) override;

  private:
	std::mt19937_64 engine_;
};

/// OS-backed randomness for live use.
class SystemRandom final : public RandomSource
{
  public:
	void fill(std::span<std::uint8_t> out) override;
};

/// Derives an independent per-trial seed from (master, index); schedule-independent.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace sshlab
