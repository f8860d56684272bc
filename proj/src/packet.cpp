#include "sshlab/packet.hpp"

#include <algorithm>

namespace sshlab
{

Bytes BinaryPacket::serialize() const
{
	WireWriter w;
	w.u32(packet_length).u8(padding_length).raw(payload).raw(padding);
	return std::move(w).bytes();
}

BinaryPacket frame_payload(Bytes payload, std::size_t block_size, bool length_encrypted, RandomSource& padding_source)
{
	if (payload.empty())
		throw CodecError("empty payload");
	if (payload.size() > max_payload_size)
		throw CodecError("payload exceeds " + std::to_string(max_payload_size) + " bytes");

	const std::size_t align = std::max<std::size_t>(8, block_size);
	const std::size_t covered = (length_encrypted ? 4 : 0) + 1 + payload.size();

	std::size_t pad = align - covered % align;
	if (pad < min_padding)
		pad += align;

	BinaryPacket p;
	p.padding_length = static_cast<std::uint8_t>(pad);
	p.packet_length = static_cast<std::uint32_t>(1 + payload.size() + pad);
	p.payload = std::move(payload);
	p.padding = padding_source.bytes(pad);
	return p;
}

BinaryPacket encode_packet(const Message& msg, std::size_t block_size, bool length_encrypted, RandomSource& padding_source)
{
	return frame_payload(encode_message(msg), block_size, length_encrypted, padding_source);
}

bool satisfies_alignment(const BinaryPacket& p, std::size_t block_size, bool length_encrypted)
{
	const std::size_t align = std::max<std::size_t>(8, block_size);
	if (p.padding_length < min_padding || p.padding.size() != p.padding_length)
		return false;
	if (p.packet_length != 1 + p.payload.size() + p.padding.size())
		return false;
	std::size_t covered = p.packet_length + (length_encrypted ? 4 : 0);
	return covered % align == 0;
}

DecodeResult decode_packet(ByteView plaintext, const DecodeOptions& options)
{
	if (plaintext.size() < 6)
		return CriticallyCorrupt{"packet too short"};

	WireReader r(plaintext);
	const std::uint32_t length = r.u32();
	if (length != plaintext.size() - 4)
		return CriticallyCorrupt{"length field does not match packet size"};

	const std::uint8_t padding = plaintext[4];
	if (padding < min_padding || padding > length - 2)
		return CriticallyCorrupt{"invalid padding length " + std::to_string(padding)};

	auto payload = plaintext.subspan(5, length - 1 - padding);
	const std::uint8_t id = payload[0];

	if (!options.registry->known(id))
		return EvasivelyCorrupt{id};

	try
	{
		auto msg = decode_message(payload);
		if (auto* accept = std::get_if<ServiceAccept>(&msg); accept && !accept->service && !options.allow_empty_service_accept)
			return CriticallyCorrupt{"ServiceAccept without service name"};
		return msg;
	}
	catch (const CodecError& e)
	{
		return CriticallyCorrupt{std::string("malformed ") + message_name(id) + ": " + e.what()};
	}
}

std::string describe(const DecodeResult& r)
{
	if (auto* m = std::get_if<Message>(&r))
		return describe(*m);
	if (auto* c = std::get_if<CriticallyCorrupt>(&r))
		return "critically corrupt (" + c->reason + ")";
	return "evasively corrupt (id " + std::to_string(std::get<EvasivelyCorrupt>(r).id) + ")";
}

// --------------------------------------------------------------------

VersionBanner VersionBanner::make(std::string text)
{
	if (text.rfind("SSH-2.0-", 0) != 0)
		throw CodecError("banner must start with SSH-2.0-");
	if (text.find_first_of("\r\n") != std::string::npos)
		throw CodecError("banner must not contain CR or LF");
	if (text.size() + 2 > max_banner_line)
		throw CodecError("banner line exceeds 255 bytes");
	return VersionBanner{std::move(text)};
}

Bytes VersionBanner::line() const
{
	Bytes out = to_bytes(text);
	out.push_back('\r');
	out.push_back('\n');
	return out;
}

std::optional<std::pair<VersionBanner, std::size_t>> parse_banner(ByteView stream)
{
	std::size_t pos = 0;
	for (;;)
	{
		auto rest = stream.subspan(pos);
		auto lf = std::find(rest.begin(), rest.end(), std::uint8_t('\n'));
		if (lf == rest.end())
		{
			if (rest.size() > max_banner_line)
				throw CodecError("identification line too long");
			return std::nullopt;
		}

		std::size_t line_len = static_cast<std::size_t>(lf - rest.begin());
		if (line_len + 1 > max_banner_line)
			throw CodecError("identification line too long");

		std::string line(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(line_len));
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		pos += line_len + 1;

		if (line.rfind("SSH-", 0) == 0)
		{
			if (line.rfind("SSH-2.0-", 0) != 0 && line.rfind("SSH-1.99-", 0) != 0)
				throw CodecError("unsupported protocol version: " + line);
			return std::make_pair(VersionBanner{line}, pos);
		}
	}
}

} // namespace sshlab
