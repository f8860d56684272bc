#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "oracle.hpp"
#include "sshlab/cipher.hpp"
#include "sshlab/handshake.hpp"

using namespace sshlab;

namespace
{

KexInit client_kexinit()
{
	KexInit k;
	k.kex_algorithms = {std::string(names::kex_dh_group14), "ext-info-c", "seq-reset-c"};
	k.host_key_algorithms = {std::string(names::ssh_ed25519)};
	k.ciphers_c2s = k.ciphers_s2c = {"aes128-ctr", std::string(names::chacha20_poly1305)};
	k.macs_c2s = k.macs_s2c = {std::string(names::hmac_sha2_256_etm), std::string(names::hmac_sha2_256)};
	k.compression_c2s = k.compression_s2c = {"none"};
	return k;
}

KexInit server_kexinit()
{
	KexInit k = client_kexinit();
	k.kex_algorithms = {"ext-info-s", std::string(names::kex_dh_group14), "seq-reset-s"};
	k.ciphers_c2s = k.ciphers_s2c = {std::string(names::chacha20_poly1305), "aes128-ctr"};
	k.macs_c2s = k.macs_s2c = {std::string(names::hmac_sha2_256)};
	return k;
}

using boost::multiprecision::cpp_int;

cpp_int to_int(ByteView b)
{
	cpp_int v = 0;
	for (auto x : b)
		v = (v << 8) | x;
	return v;
}

Bytes to_bytes_be(cpp_int v)
{
	Bytes out;
	while (v > 0)
	{
		out.insert(out.begin(), static_cast<std::uint8_t>(v & 0xff));
		v >>= 8;
	}
	return out;
}

} // namespace

TEST(Negotiate, ClientPreferenceWins)
{
	auto r = negotiate(client_kexinit(), server_kexinit());
	EXPECT_EQ(r.kex, names::kex_dh_group14);
	EXPECT_EQ(r.cipher[0], "aes128-ctr");
	EXPECT_EQ(r.mac[0], names::hmac_sha2_256);
	EXPECT_EQ(r.mode_for(Direction::ClientToServer), ModeId::CtrEaM);
	EXPECT_TRUE(r.ext_info_enabled);
	EXPECT_TRUE(r.client_ext_info_enabled);
	EXPECT_TRUE(r.seq_reset_enabled);
	EXPECT_FALSE(r.transcript_mac_enabled);
}

TEST(Negotiate, AeadIgnoresMacList)
{
	auto c = client_kexinit();
	c.ciphers_c2s = c.ciphers_s2c = {std::string(names::chacha20_poly1305)};
	c.macs_c2s = c.macs_s2c = {"hmac-nothing-in-common"};
	auto r = negotiate(c, server_kexinit());
	EXPECT_EQ(r.mode_for(Direction::ServerToClient), ModeId::ChaCha20Poly1305);
	EXPECT_TRUE(r.mac[1].empty());
}

TEST(Negotiate, IndicatorsNeverSelected)
{
	auto c = client_kexinit();
	c.kex_algorithms = {"ext-info-c", "seq-reset-s"};
	auto s = server_kexinit();
	s.kex_algorithms.push_back("ext-info-c");
	EXPECT_THROW(negotiate(c, s), NegotiationError);
}

TEST(Negotiate, CountermeasureNeedsBothSides)
{
	auto c = client_kexinit();
	c.kex_algorithms.push_back("xmac-c");
	EXPECT_FALSE(negotiate(c, server_kexinit()).transcript_mac_enabled);
	auto s = server_kexinit();
	s.kex_algorithms.push_back("xmac-s");
	EXPECT_TRUE(negotiate(c, s).transcript_mac_enabled);
}

TEST(Negotiate, NoCommonCipher)
{
	auto s = server_kexinit();
	s.ciphers_s2c = {"3des-cbc"};
	EXPECT_THROW(negotiate(client_kexinit(), s), NegotiationError);
}

TEST(Dh, SmallExponentsAgainstBigIntOracle)
{
	const cpp_int p = to_int(group14_prime());
	for (unsigned x : {1u, 2u, 16u, 1000u})
	{
		cpp_int expected = powm(cpp_int(2), cpp_int(x), p);
		auto kp = dh_from_secret(to_bytes_be(x));
		EXPECT_EQ(to_int(kp.pub), expected) << x;
	}
}

TEST(Dh, SharedSecretAgrees)
{
	SeededRandom rng(11);
	auto a = dh_generate(rng);
	auto b = dh_generate(rng);
	EXPECT_EQ(dh_shared_secret(a, b.pub), dh_shared_secret(b, a.pub));
	const cpp_int p = to_int(group14_prime());
	EXPECT_EQ(to_int(dh_shared_secret(a, b.pub)), powm(to_int(b.pub), to_int(a.secret), p));
}

TEST(Dh, RangeCheck)
{
	const cpp_int p = to_int(group14_prime());
	EXPECT_FALSE(dh_value_in_range(from_hex("01")));
	EXPECT_FALSE(dh_value_in_range({}));
	EXPECT_TRUE(dh_value_in_range(from_hex("02")));
	EXPECT_TRUE(dh_value_in_range(to_bytes_be(p - 2)));
	EXPECT_FALSE(dh_value_in_range(to_bytes_be(p - 1)));
	EXPECT_FALSE(dh_value_in_range(group14_prime()));
	SeededRandom rng(12);
	auto a = dh_generate(rng);
	EXPECT_THROW(dh_shared_secret(a, to_bytes_be(p - 1)), HandshakeError);
}

TEST(ExchangeHash, MatchesManualEncoding)
{
	TranscriptInputs t;
	t.v_c = VersionBanner::make("SSH-2.0-client");
	t.v_s = VersionBanner::make("SSH-2.0-server");
	t.i_c = from_hex("14aa");
	t.i_s = from_hex("14bb");
	t.k_s = from_hex("0102");
	t.e = from_hex("80");
	t.f = from_hex("7f");
	t.k = from_hex("00ff");
	// "SSH-2.0-client" and "SSH-2.0-server" as 14-byte strings; mpint 0x80 gains a zero byte, 0x00ff loses one.
	const Bytes manual = from_hex("0000000e5353482d322e302d636c69656e74"
								  "0000000e5353482d322e302d736572766572"
								  "0000000214aa"
								  "0000000214bb"
								  "000000020102"
								  "000000020080"
								  "000000017f"
								  "00000002" "00ff");
	EXPECT_EQ(exchange_hash(t), crypto::sha256(manual));
}

TEST(HostKey, SignAndVerify)
{
	auto key = crypto::Ed25519Key::from_seed(default_host_key_seed());
	const Bytes h = crypto::sha256(to_bytes("transcript"));
	const Bytes blob = encode_host_key_blob(key.public_key());
	const Bytes sig = sign_exchange_hash(key, h);
	EXPECT_TRUE(verify_exchange_hash(blob, h, sig));
	Bytes other = h;
	other[0] ^= 1;
	EXPECT_FALSE(verify_exchange_hash(blob, other, sig));
	EXPECT_FALSE(verify_exchange_hash(blob, h, from_hex("00")));
	Bytes bad_alg = WireWriter().string("ssh-rsa").string(key.sign(h)).bytes();
	EXPECT_FALSE(verify_exchange_hash(blob, h, bad_alg));
}

TEST(Transcript, MacInputGroupsByDirection)
{
	FullTranscript ft;
	ft.set_banners(VersionBanner::make("SSH-2.0-c"), VersionBanner::make("SSH-2.0-s"));
	ft.append(Direction::ServerToClient, from_hex("aa"));
	ft.append(Direction::ClientToServer, from_hex("bbcc"));
	ft.append(Direction::ServerToClient, from_hex("dd"));
	const Bytes expected = WireWriter()
							   .string("SSH-2.0-c")
							   .string("SSH-2.0-s")
							   .u32(1)
							   .string(from_hex("bbcc"))
							   .u32(2)
							   .string(from_hex("aa"))
							   .string(from_hex("dd"))
							   .bytes();
	EXPECT_EQ(ft.mac_input(), expected);

	const Bytes k = from_hex("05"), h = crypto::sha256(to_bytes("h"));
	EXPECT_EQ(transcript_mac(ft, k, h, h), crypto::hmac_sha256(derive_key(k, h, 'T', h, 32), expected));
}

TEST(Transcript, AnyDeletionChangesTheMac)
{
	FullTranscript full, cut;
	for (auto* t : {&full, &cut})
		t->set_banners(VersionBanner::make("SSH-2.0-c"), VersionBanner::make("SSH-2.0-s"));
	full.append(Direction::ServerToClient, from_hex("01"));
	full.append(Direction::ServerToClient, from_hex("02"));
	cut.append(Direction::ServerToClient, from_hex("02"));
	const Bytes k = from_hex("05"), h = crypto::sha256(to_bytes("h"));
	EXPECT_NE(transcript_mac(full, k, h, h), transcript_mac(cut, k, h, h));
}
