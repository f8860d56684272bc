#include "sshlab/fabric.hpp"

#include <stdexcept>

namespace sshlab
{

Fabric::Fabric(Peer& client, Peer& server, Interceptor* interceptor)
	: client_(client)
	, server_(server)
	, interceptor_(interceptor)
{
	if (client.role() != Role::Client || server.role() != Role::Server)
		throw std::invalid_argument("fabric needs a client and a server");
}

void Fabric::forward(Direction d, Bytes segment)
{
	if (!closed_[index(d)])
		queues_[index(d)].push_back(std::move(segment));
}

void Fabric::close(Direction d)
{
	closed_[index(d)] = true;
}

void Fabric::pump()
{
	for (auto d : {Direction::ClientToServer, Direction::ServerToClient})
	{
		auto& peer = sender(d);
		for (auto& seg : peer.take_output())
		{
			if (interceptor_)
				interceptor_->on_segment(d, std::move(seg), *this);
			else
				forward(d, std::move(seg));
		}
		if (peer.closed())
			close(d);
	}
}

bool Fabric::step(Direction d)
{
	auto i = index(d);
	auto& rx = receiver(d);
	if (!queues_[i].empty())
	{
		Bytes seg = std::move(queues_[i].front());
		queues_[i].pop_front();
		if (!rx.closed())
		{
			rx.on_bytes(seg);
			++delivered_[i];
		}
		pump();
		return true;
	}
	if (closed_[i] && !eof_delivered_[i])
	{
		eof_delivered_[i] = true;
		rx.on_eof();
		pump();
		return true;
	}
	return false;
}

void Fabric::run(std::size_t max_deliveries)
{
	client_.start();
	server_.start();
	pump();

	std::size_t steps = 0;
	for (;;)
	{
		bool progress = step(Direction::ClientToServer);
		progress = step(Direction::ServerToClient) || progress;
		if (!progress)
			break;
		if (++steps > max_deliveries)
			throw std::runtime_error("fabric did not quiesce");
	}

	client_.on_quiescent();
	server_.on_quiescent();
	pump();
}

} // namespace sshlab
