#pragma once

// The meddler sees wire bytes only. It links against the codec and the mode
// metadata (ModeInfo), never against cipher state or key derivation.

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sshlab/fabric.hpp"
#include "sshlab/handshake.hpp"
#include "sshlab/messages.hpp"
#include "sshlab/modes.hpp"
#include "sshlab/random.hpp"

namespace sshlab
{

enum class Phase
{
	/// Plaintext packets up to and including NewKeys.
	PreNewKeys,
	PostNewKeys,
};

struct PacketMatch
{
	Direction direction = Direction::ServerToClient;
	Phase phase = Phase::PreNewKeys;
	/// Only visible before NewKeys.
	std::optional<std::uint8_t> msg_id;
	/// Position among the sender's original packets in this phase, from 0.
	std::optional<std::size_t> index;
};

struct Inject
{
	std::vector<std::pair<Message, std::size_t>> items;
	/// Direction of the stream the packets are added to.
	Direction toward = Direction::ServerToClient;
	bool before = true;
};

struct Delete
{
};

/// Keeps the packet until `release_after` post-NewKeys packets were observed in `watch`.
struct Hold
{
	Direction watch = Direction::ServerToClient;
	std::size_t release_after = 0;
};

/// Drops this packet and everything after it in the same direction, then closes the stream.
struct Cut
{
};

using Action = std::variant<Inject, Delete, Hold, Cut>;

struct Rule
{
	std::string label;
	PacketMatch match;
	Action action;
	std::size_t max_hits = 1;
};

inline constexpr std::size_t unlimited_hits = std::numeric_limits<std::size_t>::max();

/// How post-NewKeys packet boundaries are found when the length is encrypted.
enum class LengthKnowledge
{
	/// Segment boundaries of the fabric reveal the true lengths.
	Oracle,
	/// Assume every packet has `guessed_length` wire bytes.
	Guess,
};

struct AttackScript
{
	std::string name = "passthrough";
	std::vector<Rule> rules;
	LengthKnowledge length_knowledge = LengthKnowledge::Oracle;
	std::size_t guessed_length = 0;
};

class Mitm final : public Interceptor
{
  public:
	explicit Mitm(AttackScript script, std::uint64_t seed = 0);

	void on_segment(Direction d, Bytes segment, Link& link) override;

	const std::vector<std::string>& log() const { return log_; }
	std::size_t observed(Direction d, Phase p) const { return streams_[idx(d)].count[static_cast<std::size_t>(p)]; }
	std::size_t injected() const { return injected_; }
	std::size_t deleted() const { return deleted_; }
	const std::optional<NegotiationResult>& negotiated() const { return negotiated_; }
	const AttackScript& script() const { return script_; }

  private:
	struct Stream
	{
		Bytes buffer;
		bool banner_done = false;
		bool post = false;
		bool cut = false;
		std::array<std::size_t, 2> count{};
		std::optional<KexInit> kexinit;
	};

	struct Held
	{
		Direction direction;
		Bytes packet;
		Hold hold;
	};

	static std::size_t idx(Direction d) { return static_cast<std::size_t>(d); }
	void frame(Direction d, bool segment_end, Link& link);
	void on_packet(Direction d, Bytes packet, std::optional<std::uint8_t> id, Link& link);
	void inject(const Inject& in, Link& link, const std::string& label);
	void release_held(Link& link);
	std::optional<std::size_t> post_packet_size(Direction d, const Bytes& buffer, bool segment_end) const;

	AttackScript script_;
	std::vector<std::size_t> hits_;
	SeededRandom rng_;
	std::array<Stream, 2> streams_;
	std::optional<NegotiationResult> negotiated_;
	std::vector<Held> held_;
	std::vector<std::string> log_;
	std::size_t injected_ = 0;
	std::size_t deleted_ = 0;
};

} // namespace sshlab
