#include "sshlab/mitm.hpp"

#include <sstream>

#include "sshlab/packet.hpp"

namespace sshlab
{

namespace
{

std::uint32_t read_u32(const Bytes& b)
{
	return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | b[3];
}

std::string describe_items(const Inject& in)
{
	std::ostringstream os;
	bool first = true;
	for (const auto& [msg, n] : in.items)
	{
		os << (first ? "" : " + ") << n << "x " << message_name(message_id(msg));
		first = false;
	}
	os << (in.toward == Direction::ServerToClient ? " toward client" : " toward server");
	return os.str();
}

} // namespace

Mitm::Mitm(AttackScript script, std::uint64_t seed)
	: script_(std::move(script))
	, hits_(script_.rules.size(), 0)
	, rng_(derive_seed(seed, 0x6d69746d))
{
}

void Mitm::on_segment(Direction d, Bytes segment, Link& link)
{
	auto& s = streams_[idx(d)];
	if (s.cut)
		return;
	s.buffer.insert(s.buffer.end(), segment.begin(), segment.end());
	frame(d, true, link);
}

std::optional<std::size_t> Mitm::post_packet_size(Direction d, const Bytes& buffer, bool segment_end) const
{
	if (negotiated_)
	{
		const auto& info = mode_info(negotiated_->mode_for(d));
		if (info.length_in_clear)
		{
			if (buffer.size() < 4)
				return std::nullopt;
			return 4 + std::size_t(read_u32(buffer)) + info.tag_size;
		}
	}
	if (script_.length_knowledge == LengthKnowledge::Guess)
		return script_.guessed_length;
	return segment_end ? std::optional<std::size_t>(buffer.size()) : std::nullopt;
}

void Mitm::frame(Direction d, bool segment_end, Link& link)
{
	auto& s = streams_[idx(d)];
	if (!s.banner_done)
	{
		auto parsed = parse_banner(s.buffer);
		if (!parsed)
			return;
		Bytes line(s.buffer.begin(), s.buffer.begin() + static_cast<std::ptrdiff_t>(parsed->second));
		s.buffer.erase(s.buffer.begin(), s.buffer.begin() + static_cast<std::ptrdiff_t>(parsed->second));
		s.banner_done = true;
		link.forward(d, std::move(line));
	}

	while (!s.cut && !s.buffer.empty())
	{
		std::optional<std::size_t> size;
		if (!s.post)
			size = s.buffer.size() >= 4 ? std::optional<std::size_t>(4 + read_u32(s.buffer)) : std::nullopt;
		else
			size = post_packet_size(d, s.buffer, segment_end);
		if (!size || *size == 0 || s.buffer.size() < *size)
			return;

		Bytes packet(s.buffer.begin(), s.buffer.begin() + static_cast<std::ptrdiff_t>(*size));
		s.buffer.erase(s.buffer.begin(), s.buffer.begin() + static_cast<std::ptrdiff_t>(*size));
		std::optional<std::uint8_t> id;
		if (!s.post && packet.size() > 5)
			id = packet[5];
		on_packet(d, std::move(packet), id, link);
	}
}

void Mitm::inject(const Inject& in, Link& link, const std::string& label)
{
	for (const auto& [msg, n] : in.items)
	{
		for (std::size_t i = 0; i < n; ++i)
		{
			auto packet = encode_packet(msg, 8, true, rng_);
			link.forward(in.toward, packet.serialize());
		}
		injected_ += n;
	}
	log_.push_back(label + ": inject " + describe_items(in));
}

void Mitm::release_held(Link& link)
{
	for (auto it = held_.begin(); it != held_.end();)
	{
		if (streams_[idx(it->hold.watch)].count[static_cast<std::size_t>(Phase::PostNewKeys)] >= it->hold.release_after)
		{
			log_.push_back(to_string(it->direction) + ": release held packet");
			link.forward(it->direction, std::move(it->packet));
			it = held_.erase(it);
		}
		else
			++it;
	}
}

void Mitm::on_packet(Direction d, Bytes packet, std::optional<std::uint8_t> id, Link& link)
{
	auto& s = streams_[idx(d)];
	const Phase phase = s.post ? Phase::PostNewKeys : Phase::PreNewKeys;
	const std::size_t index = s.count[static_cast<std::size_t>(phase)]++;

	std::ostringstream where;
	where << to_string(d) << (s.post ? " post#" : " pre#") << index;
	if (id)
		where << ' ' << message_name(*id);
	const std::string label = where.str();

	std::vector<const Rule*> matched;
	std::vector<std::size_t> matched_hits;
	for (std::size_t i = 0; i < script_.rules.size(); ++i)
	{
		const auto& r = script_.rules[i];
		const auto& m = r.match;
		if (hits_[i] >= r.max_hits || m.direction != d || m.phase != phase)
			continue;
		if (m.msg_id && (!id || *id != *m.msg_id))
			continue;
		if (m.index && *m.index != index)
			continue;
		++hits_[i];
		matched.push_back(&r);
		matched_hits.push_back(hits_[i]);
	}

	for (const auto* r : matched)
		if (auto* in = std::get_if<Inject>(&r->action); in && in->before)
			inject(*in, link, label);

	bool forward = true;
	for (std::size_t k = 0; k < matched.size(); ++k)
	{
		const auto* r = matched[k];
		if (std::holds_alternative<Delete>(r->action))
		{
			if (forward)
			{
				++deleted_;
				// bulk deletions are logged on the first hit only
				if (r->max_hits != unlimited_hits || matched_hits[k] == 1)
					log_.push_back(label + ": delete" + (r->max_hits == unlimited_hits ? " (and all further matches)" : ""));
			}
			forward = false;
		}
		else if (auto* h = std::get_if<Hold>(&r->action))
		{
			if (forward)
			{
				held_.push_back({d, packet, *h});
				log_.push_back(label + ": hold until " + std::to_string(h->release_after) + " " + to_string(h->watch) +
							   " channel packets were seen");
			}
			forward = false;
		}
		else if (std::holds_alternative<Cut>(r->action))
		{
			s.cut = true;
			s.buffer.clear();
			link.close(d);
			log_.push_back(label + ": cut stream");
			forward = false;
		}
	}
	if (forward)
		link.forward(d, packet);

	for (const auto* r : matched)
		if (auto* in = std::get_if<Inject>(&r->action); in && !in->before)
			inject(*in, link, label);

	if (id && *id == msgid::kexinit && !s.post)
	{
		try
		{
			auto len = read_u32(packet);
			std::size_t pad = packet[4];
			if (pad + 1 > len || 4 + std::size_t(len) > packet.size())
				throw CodecError("malformed KexInit packet");
			auto msg = decode_message(ByteView(packet).subspan(5, len - pad - 1));
			s.kexinit = std::get<KexInit>(msg);
			const auto& c = streams_[idx(Direction::ClientToServer)].kexinit;
			const auto& sv = streams_[idx(Direction::ServerToClient)].kexinit;
			if (c && sv)
				negotiated_ = negotiate(*c, *sv);
		}
		catch (const std::exception& e)
		{
			log_.push_back(label + ": cannot follow negotiation: " + e.what());
		}
	}
	if (id && *id == msgid::newkeys && !s.post)
		s.post = true;

	release_held(link);
}

} // namespace sshlab
