#include "sshlab/handshake.hpp"

#include <algorithm>

#include "sshlab/cipher.hpp"

namespace sshlab
{

bool Signals::is_indicator(std::string_view name) const
{
	return name == ext_info_c || name == ext_info_s || name == seq_reset_c || name == seq_reset_s || name == xmac_c ||
		   name == xmac_s;
}

namespace
{

bool contains(const std::vector<std::string>& list, std::string_view name)
{
	return std::find(list.begin(), list.end(), name) != list.end();
}

std::string pick(const std::vector<std::string>& client, const std::vector<std::string>& server, const char* what,
	const Signals& signals)
{
	for (const auto& c : client)
	{
		if (signals.is_indicator(c))
			continue;
		if (contains(server, c))
			return c;
	}
	throw NegotiationError(std::string("no common ") + what + " algorithm");
}

} // namespace

NegotiationResult negotiate(const KexInit& client, const KexInit& server, const Signals& signals)
{
	NegotiationResult r;
	r.kex = pick(client.kex_algorithms, server.kex_algorithms, "kex", signals);
	r.host_key = pick(client.host_key_algorithms, server.host_key_algorithms, "host key", signals);

	const auto c2s = static_cast<std::size_t>(Direction::ClientToServer);
	const auto s2c = static_cast<std::size_t>(Direction::ServerToClient);
	r.cipher[c2s] = pick(client.ciphers_c2s, server.ciphers_c2s, "cipher", signals);
	r.cipher[s2c] = pick(client.ciphers_s2c, server.ciphers_s2c, "cipher", signals);

	// AEAD ciphers make the MAC list irrelevant for that direction.
	for (auto [idx, cl, sl] : {std::tuple{c2s, &client.macs_c2s, &server.macs_c2s},
			 std::tuple{s2c, &client.macs_s2c, &server.macs_s2c}})
	{
		if (!is_aead_cipher(r.cipher[idx]))
			r.mac[idx] = pick(*cl, *sl, "mac", signals);
		auto mode = mode_from_names(r.cipher[idx], r.mac[idx]);
		if (!mode)
			throw NegotiationError("unsupported cipher/mac pair " + r.cipher[idx] + "/" + r.mac[idx]);
		r.mode[idx] = *mode;
	}

	pick(client.compression_c2s, server.compression_c2s, "compression", signals);
	pick(client.compression_s2c, server.compression_s2c, "compression", signals);

	const auto& ck = client.kex_algorithms;
	const auto& sk = server.kex_algorithms;
	r.ext_info_enabled = contains(ck, signals.ext_info_c);
	r.client_ext_info_enabled = contains(sk, signals.ext_info_s);
	r.seq_reset_enabled = contains(ck, signals.seq_reset_c) && contains(sk, signals.seq_reset_s);
	r.transcript_mac_enabled = contains(ck, signals.xmac_c) && contains(sk, signals.xmac_s);
	return r;
}

// --------------------------------------------------------------------

const Bytes& group14_prime()
{
	static const Bytes p = from_hex(
		"FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74020BBEA63B139B22514A08798E3404DD"
		"EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
		"EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
		"83655D23DCA3AD961C62F356208552BB9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
		"E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
		"15728E5A8AACAA68FFFFFFFFFFFFFFFF");
	return p;
}

DhKeyPair dh_from_secret(ByteView secret)
{
	static const Bytes g{2};
	DhKeyPair kp;
	kp.secret = normalize_magnitude(secret);
	kp.pub = crypto::mod_exp(g, kp.secret, group14_prime());
	return kp;
}

DhKeyPair dh_generate(RandomSource& ephemeral_source)
{
	for (;;)
	{
		auto x = ephemeral_source.bytes(dh_exponent_bytes);
		auto kp = dh_from_secret(x);
		if (dh_value_in_range(kp.pub))
			return kp;
	}
}

bool dh_value_in_range(ByteView v)
{
	static const Bytes two{2};
	static const Bytes p_minus_2 = crypto::sub_word(group14_prime(), 2);
	return crypto::compare_magnitudes(v, two) >= 0 && crypto::compare_magnitudes(v, p_minus_2) <= 0;
}

Bytes dh_shared_secret(const DhKeyPair& own, ByteView peer_pub)
{
	if (!dh_value_in_range(peer_pub))
		throw HandshakeError("DH public value out of range");
	return crypto::mod_exp(peer_pub, own.secret, group14_prime());
}

// --------------------------------------------------------------------

Bytes exchange_hash(const TranscriptInputs& t)
{
	WireWriter w;
	w.string(t.v_c.text).string(t.v_s.text);
	w.string(t.i_c).string(t.i_s).string(t.k_s);
	w.mpint(t.e).mpint(t.f).mpint(t.k);
	return crypto::sha256(w.bytes());
}

// --------------------------------------------------------------------

const Bytes& default_host_key_seed()
{
	static const Bytes seed = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
	return seed;
}

Bytes encode_host_key_blob(ByteView ed25519_public)
{
	return WireWriter().string(names::ssh_ed25519).string(ed25519_public).bytes();
}

Bytes sign_exchange_hash(const crypto::Ed25519Key& key, ByteView exchange_hash)
{
	return WireWriter().string(names::ssh_ed25519).string(key.sign(exchange_hash)).bytes();
}

bool verify_exchange_hash(ByteView host_key_blob, ByteView exchange_hash, ByteView signature_blob)
{
	try
	{
		WireReader k(host_key_blob);
		if (k.text() != names::ssh_ed25519)
			return false;
		auto pub = k.string();
		k.expect_end();

		WireReader s(signature_blob);
		if (s.text() != names::ssh_ed25519)
			return false;
		auto sig = s.string();
		s.expect_end();

		return crypto::Ed25519Key::verify(pub, exchange_hash, sig);
	}
	catch (const CodecError&)
	{
		return false;
	}
}

// --------------------------------------------------------------------

void FullTranscript::set_banners(VersionBanner v_c, VersionBanner v_s)
{
	v_c_ = std::move(v_c);
	v_s_ = std::move(v_s);
}

void FullTranscript::append(Direction d, Bytes plaintext_packet)
{
	entries_.push_back({d, std::move(plaintext_packet)});
}

Bytes FullTranscript::mac_input() const
{
	WireWriter w;
	w.string(v_c_.text).string(v_s_.text);
	for (auto d : {Direction::ClientToServer, Direction::ServerToClient})
	{
		auto n = std::count_if(entries_.begin(), entries_.end(), [d](const Entry& e) { return e.direction == d; });
		w.u32(static_cast<std::uint32_t>(n));
		for (const auto& e : entries_)
			if (e.direction == d)
				w.string(e.packet);
	}
	return std::move(w).bytes();
}

Bytes transcript_mac(const FullTranscript& ft, ByteView shared_secret, ByteView exchange_hash, ByteView session_id)
{
	auto key = derive_key(shared_secret, exchange_hash, 'T', session_id, crypto::sha256_size);
	return crypto::hmac_sha256(key, ft.mac_input());
}

} // namespace sshlab
