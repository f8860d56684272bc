#include <gtest/gtest.h>

#include "sshlab/packet.hpp"

using namespace sshlab;

namespace
{

Bytes packet_bytes(std::uint32_t length, std::uint8_t padding, Bytes body)
{
	WireWriter w;
	w.u32(length).u8(padding).raw(body);
	return std::move(w).bytes();
}

} // namespace

TEST(Packet, ClassicAlignmentCoversLengthField)
{
	SeededRandom rng(1);
	for (std::size_t n = 1; n < 200; ++n)
	{
		auto p = frame_payload(Bytes(n, 0x41), 16, true, rng);
		EXPECT_EQ((4 + p.packet_length) % 16, 0u) << n;
		EXPECT_GE(p.padding_length, 4);
		EXPECT_LT(p.padding_length, 4 + 16);
		EXPECT_TRUE(satisfies_alignment(p, 16, true));
	}
}

TEST(Packet, EtmAlignmentExcludesLengthField)
{
	SeededRandom rng(2);
	for (std::size_t n = 1; n < 200; ++n)
	{
		auto p = frame_payload(Bytes(n, 0x41), 8, false, rng);
		EXPECT_EQ(p.packet_length % 8, 0u) << n;
		EXPECT_TRUE(satisfies_alignment(p, 8, false));
		EXPECT_FALSE(satisfies_alignment(p, 8, true) && p.packet_length % 8 == 0 && (p.packet_length + 4) % 8 == 0);
	}
}

TEST(Packet, KnownSizesUnderCbcEtm)
{
	SeededRandom rng(3);
	// 1 + 5 payload bytes, padded to one block
	EXPECT_EQ(encode_packet(Unimplemented{7}, 16, false, rng).packet_length, 16u);
	// 1 + 260 payload bytes
	EXPECT_EQ(encode_packet(Pong{Bytes(255, 0x41)}, 16, false, rng).packet_length, 272u);
	// Service name fills the second block exactly in the classic layout: 0x0e padding bytes.
	auto sa = encode_packet(ServiceAccept{"ssh-userauth"}, 16, false, rng);
	EXPECT_EQ(sa.packet_length, 32u);
	EXPECT_EQ(sa.padding_length, 0x0e);
}

TEST(Packet, SerializeAndDecodeRoundTrip)
{
	SeededRandom rng(4);
	const Message m = ServiceRequest{"ssh-userauth"};
	auto p = encode_packet(m, 16, true, rng);
	auto r = decode_packet(p.serialize());
	ASSERT_TRUE(std::holds_alternative<Message>(r));
	EXPECT_EQ(std::get<Message>(r), m);
}

TEST(Packet, PayloadLimits)
{
	SeededRandom rng(5);
	EXPECT_THROW(frame_payload({}, 16, true, rng), CodecError);
	EXPECT_NO_THROW(frame_payload(Bytes(max_payload_size, 1), 16, true, rng));
	EXPECT_THROW(frame_payload(Bytes(max_payload_size + 1, 1), 16, true, rng), CodecError);
}

TEST(Packet, PaddingBoundsDecideWellFormedness)
{
	// ell = 16: padding 4..14 is well-formed.
	Bytes body(15, 0);
	body[0] = 200;
	EXPECT_TRUE(is_critically_corrupt(decode_packet(packet_bytes(16, 3, body))));
	EXPECT_TRUE(is_evasively_corrupt(decode_packet(packet_bytes(16, 4, body))));
	EXPECT_TRUE(is_evasively_corrupt(decode_packet(packet_bytes(16, 14, body))));
	EXPECT_TRUE(is_critically_corrupt(decode_packet(packet_bytes(16, 15, body))));
}

TEST(Packet, EvasiveCarriesTheId)
{
	Bytes body(15, 0);
	body[0] = 0xc8;
	auto r = decode_packet(packet_bytes(16, 4, body));
	ASSERT_TRUE(is_evasively_corrupt(r));
	EXPECT_EQ(std::get<EvasivelyCorrupt>(r).id, 0xc8);
}

TEST(Packet, KnownIdWithBadBodyIsCritical)
{
	// Ignore with a string length far beyond the packet
	Bytes body{msgid::ignore, 0xff, 0xff, 0xff, 0xff, 0, 0, 0, 0, 0, 0};
	EXPECT_TRUE(is_critically_corrupt(decode_packet(packet_bytes(12, 4, body))));
}

TEST(Packet, LengthMismatchIsCritical)
{
	Bytes body(15, 0);
	EXPECT_TRUE(is_critically_corrupt(decode_packet(packet_bytes(20, 4, body))));
}

TEST(Packet, EmptyServiceAcceptDependsOnOptions)
{
	// p = 0x1e leaves a one-byte payload in a 32-byte packet.
	Bytes body(31, 0x55);
	body[0] = msgid::service_accept;
	const auto plain = packet_bytes(32, 0x1e, body);

	EXPECT_TRUE(is_critically_corrupt(decode_packet(plain)));

	DecodeOptions lenient;
	lenient.allow_empty_service_accept = true;
	auto r = decode_packet(plain, lenient);
	ASSERT_TRUE(std::holds_alternative<Message>(r));
	EXPECT_EQ(std::get<Message>(r), Message{ServiceAccept{}});
}

TEST(Packet, RegistryDecidesRecognition)
{
	Bytes body(15, 0);
	body[0] = msgid::ignore;
	auto none = MessageIdRegistry::none_known();
	DecodeOptions o;
	o.registry = &none;
	EXPECT_TRUE(is_evasively_corrupt(decode_packet(packet_bytes(16, 10, body), o)));
}

TEST(Banner, SkipsPreambleLines)
{
	const std::string stream = "hello there\r\nSSH-2.0-OpenSSH_9.3 comment\r\nrest";
	auto r = parse_banner(to_bytes(stream));
	ASSERT_TRUE(r);
	EXPECT_EQ(r->first.text, "SSH-2.0-OpenSSH_9.3 comment");
	EXPECT_EQ(r->second, stream.size() - 4);
}

TEST(Banner, NeedsCompleteLine)
{
	EXPECT_FALSE(parse_banner(to_bytes("SSH-2.0-partial")));
}

TEST(Banner, RejectsOldVersionsAndLongLines)
{
	EXPECT_THROW(parse_banner(to_bytes("SSH-1.5-old\r\n")), CodecError);
	EXPECT_TRUE(parse_banner(to_bytes("SSH-1.99-compat\r\n")));
	EXPECT_THROW(parse_banner(to_bytes(std::string(300, 'x'))), CodecError);
}

TEST(Banner, LineFormat)
{
	auto b = VersionBanner::make("SSH-2.0-SSHLab_1.0");
	EXPECT_EQ(to_string(b.line()), "SSH-2.0-SSHLab_1.0\r\n");
	EXPECT_THROW(VersionBanner::make("SSH-2.0-bad\nline"), CodecError);
	EXPECT_THROW(VersionBanner::make("HTTP/1.1"), CodecError);
}
