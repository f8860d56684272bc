#pragma once

#include <array>
#include <cstddef>
#include <deque>

#include "sshlab/modes.hpp"
#include "sshlab/peer.hpp"
#include "sshlab/wire.hpp"

namespace sshlab
{

/// Where an interceptor puts the segments it lets through or creates.
class Link
{
  public:
	virtual ~Link() = default;
	virtual void forward(Direction d, Bytes segment) = 0;
	/// No further segments will be delivered in this direction; the receiver sees EOF once the queue drains.
	virtual void close(Direction d) = 0;
};

class Interceptor
{
  public:
	virtual ~Interceptor() = default;
	/// Called for every segment a peer emits, in emission order.
	virtual void on_segment(Direction d, Bytes segment, Link& link) = 0;
};

/// Two ordered, lossless byte streams between a client and a server, with an
/// optional interception point. Scheduling is deterministic: pending segments
/// are delivered alternately to the server and to the client, one at a time.
class Fabric final : public Link
{
  public:
	Fabric(Peer& client, Peer& server, Interceptor* interceptor = nullptr);

	/// Runs until no segment is pending, then signals quiescence to both peers.
	void run(std::size_t max_deliveries = 20'000'000);

	void forward(Direction d, Bytes segment) override;
	void close(Direction d) override;

	std::size_t delivered(Direction d) const { return delivered_[index(d)]; }

  private:
	static std::size_t index(Direction d) { return static_cast<std::size_t>(d); }
	Peer& sender(Direction d) { return d == Direction::ClientToServer ? client_ : server_; }
	Peer& receiver(Direction d) { return d == Direction::ClientToServer ? server_ : client_; }
	void pump();
	bool step(Direction d);

	Peer& client_;
	Peer& server_;
	Interceptor* interceptor_;
	std::array<std::deque<Bytes>, 2> queues_;
	std::array<bool, 2> closed_{};
	std::array<bool, 2> eof_delivered_{};
	std::array<std::size_t, 2> delivered_{};
};

} // namespace sshlab
