#include "sshlab/cipher.hpp"

#include <algorithm>
#include <cstring>

namespace sshlab
{

namespace
{

using Block = crypto::Aes128::Block;

Block to_block(ByteView b)
{
	Block out{};
	std::copy_n(b.begin(), out.size(), out.begin());
	return out;
}

std::uint32_t read_u32(ByteView b)
{
	return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | b[3];
}

void increment_be(Bytes& counter, std::size_t from, std::size_t to)
{
	for (std::size_t i = to; i-- > from;)
		if (++counter[i] != 0)
			break;
}

Bytes mpint_encoding(ByteView magnitude)
{
	return WireWriter().mpint(magnitude).bytes();
}

std::uint64_t chacha_nonce(std::uint32_t seqno)
{
	return seqno;
}

} // namespace

// --------------------------------------------------------------------

DirectionalCipherState::DirectionalCipherState(ModeId mode, KeyMaterial keys)
	: mode_(mode)
	, keys_(std::move(keys))
{
	auto sizes = key_sizes(mode);
	if (keys_.iv.size() != sizes.iv || keys_.enc_key.size() != sizes.enc || keys_.mac_key.size() != sizes.mac)
		throw std::invalid_argument("key material does not match mode " + to_string(mode));

	chain_ = keys_.iv;
	if (mode != ModeId::ChaCha20Poly1305 && mode != ModeId::Gcm)
		aes_.emplace(keys_.enc_key);
}

std::size_t DirectionalCipherState::block_size() const
{
	return mode_ ? mode_info(*mode_).block_size : 8;
}

bool DirectionalCipherState::length_encrypted() const
{
	if (!mode_)
		return true;
	return *mode_ == ModeId::CbcEaM || *mode_ == ModeId::CtrEaM;
}

Bytes DirectionalCipherState::cbc_encrypt(ByteView plain)
{
	Bytes out(plain.size());
	Block iv = to_block(chain_);
	for (std::size_t off = 0; off < plain.size(); off += 16)
	{
		Block b = to_block(plain.subspan(off, 16));
		for (std::size_t i = 0; i < 16; ++i)
			b[i] ^= iv[i];
		iv = aes_->encrypt(b);
		std::copy(iv.begin(), iv.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
	}
	chain_.assign(iv.begin(), iv.end());
	return out;
}

Bytes DirectionalCipherState::cbc_decrypt(ByteView ct)
{
	Bytes out(ct.size());
	Block iv = to_block(chain_);
	for (std::size_t off = 0; off < ct.size(); off += 16)
	{
		Block c = to_block(ct.subspan(off, 16));
		Block p = aes_->decrypt(c);
		for (std::size_t i = 0; i < 16; ++i)
			out[off + i] = p[i] ^ iv[i];
		iv = c;
	}
	chain_.assign(iv.begin(), iv.end());
	return out;
}

Bytes DirectionalCipherState::ctr_xor(ByteView data)
{
	Bytes out(data.size());
	for (std::size_t off = 0; off < data.size(); off += 16)
	{
		Block ks = aes_->encrypt(to_block(chain_));
		increment_be(chain_, 0, 16);
		for (std::size_t i = 0; i < 16 && off + i < data.size(); ++i)
			out[off + i] = data[off + i] ^ ks[i];
	}
	return out;
}

std::uint32_t DirectionalCipherState::peek_encrypted_length(ByteView first_block) const
{
	Block c = to_block(first_block);
	Block p{};
	if (*mode_ == ModeId::CbcEaM)
	{
		p = aes_->decrypt(c);
		for (std::size_t i = 0; i < 4; ++i)
			p[i] ^= chain_[i];
	}
	else
	{
		Block ks = aes_->encrypt(to_block(chain_));
		for (std::size_t i = 0; i < 4; ++i)
			p[i] = c[i] ^ ks[i];
	}
	return read_u32(p);
}

Bytes DirectionalCipherState::gcm_nonce() const
{
	return chain_;
}

void DirectionalCipherState::gcm_increment()
{
	// only the 64-bit invocation counter moves; the 4-byte fixed field stays
	increment_be(chain_, 4, 12);
}

Bytes DirectionalCipherState::seal(std::uint32_t seqno, const BinaryPacket& packet)
{
	Bytes plain = packet.serialize();
	if (!mode_)
		return plain;

	ByteView pv(plain);
	auto length_field = pv.first(4);
	auto body = pv.subspan(4);

	switch (*mode_)
	{
		case ModeId::CbcEaM:
		case ModeId::CtrEaM:
		{
			auto mac = crypto::hmac_sha256(keys_.mac_key, eam_mac_input(seqno, plain));
			Bytes out = *mode_ == ModeId::CbcEaM ? cbc_encrypt(plain) : ctr_xor(plain);
			out.insert(out.end(), mac.begin(), mac.end());
			return out;
		}
		case ModeId::CbcEtM:
		case ModeId::CtrEtM:
		{
			Bytes ct = *mode_ == ModeId::CbcEtM ? cbc_encrypt(body) : ctr_xor(body);
			auto mac = crypto::hmac_sha256(keys_.mac_key, etm_mac_input(seqno, length_field, ct));
			Bytes out(length_field.begin(), length_field.end());
			out.insert(out.end(), ct.begin(), ct.end());
			out.insert(out.end(), mac.begin(), mac.end());
			return out;
		}
		case ModeId::Gcm:
		{
			// the sequence number takes no part in GCM
			auto sealed = crypto::aes128_gcm_seal(keys_.enc_key, gcm_nonce(), length_field, body);
			gcm_increment();
			Bytes out(length_field.begin(), length_field.end());
			out.insert(out.end(), sealed.begin(), sealed.end());
			return out;
		}
		case ModeId::ChaCha20Poly1305:
		{
			ByteView main_key = ByteView(keys_.enc_key).first(32);
			ByteView length_key = ByteView(keys_.enc_key).subspan(32, 32);
			auto nonce = chacha_nonce(seqno);

			Bytes out = crypto::chacha20_xor(length_key, nonce, 0, length_field);
			auto enc_body = crypto::chacha20_xor(main_key, nonce, 1, body);
			out.insert(out.end(), enc_body.begin(), enc_body.end());

			auto poly_key = crypto::chacha20_xor(main_key, nonce, 0, Bytes(32, 0));
			auto tag = crypto::poly1305(poly_key, out);
			out.insert(out.end(), tag.begin(), tag.end());
			return out;
		}
	}
	return plain;
}

std::variant<std::size_t, NeedMoreData, OpenFailure> DirectionalCipherState::next_packet_size(
	ByteView buffered, std::uint32_t seqno) const
{
	const std::size_t header = (mode_ && length_encrypted()) ? 16 : 4;
	if (buffered.size() < header)
		return NeedMoreData{};

	std::uint32_t length = 0;
	if (!mode_)
		length = read_u32(buffered);
	else if (*mode_ == ModeId::ChaCha20Poly1305)
	{
		auto dec = crypto::chacha20_xor(ByteView(keys_.enc_key).subspan(32, 32), chacha_nonce(seqno), 0, buffered.first(4));
		length = read_u32(dec);
	}
	else if (length_encrypted())
		length = peek_encrypted_length(buffered.first(16));
	else
		length = read_u32(buffered);

	const std::size_t align = std::max<std::size_t>(8, block_size());
	const std::size_t covered = length + (length_encrypted() ? 4 : 0);
	if (length < 5 || length > max_plausible_length || covered % align != 0)
		return OpenFailure{OpenFailure::Kind::LengthImplausible, "implausible packet length " + std::to_string(length)};

	return std::size_t(4) + length + (mode_ ? mode_info(*mode_).tag_size : 0);
}

std::variant<Bytes, OpenFailure> DirectionalCipherState::open(std::uint32_t seqno, ByteView wire)
{
	if (!mode_)
		return Bytes(wire.begin(), wire.end());

	const auto& info = mode_info(*mode_);
	if (wire.size() < 4 + info.tag_size + 8)
		return OpenFailure{OpenFailure::Kind::LengthImplausible, "packet too short"};

	auto mac_failure = [] { return OpenFailure{OpenFailure::Kind::MacMismatch, "message authentication failed"}; };

	auto tag = wire.last(info.tag_size);
	auto sealed = wire.first(wire.size() - info.tag_size);

	switch (*mode_)
	{
		case ModeId::CbcEaM:
		case ModeId::CtrEaM:
		{
			if (sealed.size() % 16 != 0)
				return OpenFailure{OpenFailure::Kind::LengthImplausible, "ciphertext not block aligned"};
			Bytes plain = *mode_ == ModeId::CbcEaM ? cbc_decrypt(sealed) : ctr_xor(sealed);
			if (read_u32(plain) != plain.size() - 4)
				return OpenFailure{OpenFailure::Kind::LengthImplausible, "decrypted length does not match packet"};
			auto mac = crypto::hmac_sha256(keys_.mac_key, eam_mac_input(seqno, plain));
			if (!crypto::constant_time_equal(mac, tag))
				return mac_failure();
			return plain;
		}
		case ModeId::CbcEtM:
		case ModeId::CtrEtM:
		{
			auto length_field = sealed.first(4);
			auto ct = sealed.subspan(4);
			if (read_u32(length_field) != ct.size() || ct.size() % 16 != 0)
				return OpenFailure{OpenFailure::Kind::LengthImplausible, "length field does not match packet"};
			auto mac = crypto::hmac_sha256(keys_.mac_key, etm_mac_input(seqno, length_field, ct));
			if (!crypto::constant_time_equal(mac, tag))
				return mac_failure();
			Bytes plain(length_field.begin(), length_field.end());
			auto body = *mode_ == ModeId::CbcEtM ? cbc_decrypt(ct) : ctr_xor(ct);
			plain.insert(plain.end(), body.begin(), body.end());
			return plain;
		}
		case ModeId::Gcm:
		{
			auto length_field = wire.first(4);
			if (read_u32(length_field) != wire.size() - 4 - info.tag_size)
				return OpenFailure{OpenFailure::Kind::LengthImplausible, "length field does not match packet"};
			auto body = crypto::aes128_gcm_open(keys_.enc_key, gcm_nonce(), length_field, wire.subspan(4));
			if (!body)
				return mac_failure();
			gcm_increment();
			Bytes plain(length_field.begin(), length_field.end());
			plain.insert(plain.end(), body->begin(), body->end());
			return plain;
		}
		case ModeId::ChaCha20Poly1305:
		{
			ByteView main_key = ByteView(keys_.enc_key).first(32);
			ByteView length_key = ByteView(keys_.enc_key).subspan(32, 32);
			auto nonce = chacha_nonce(seqno);

			auto poly_key = crypto::chacha20_xor(main_key, nonce, 0, Bytes(32, 0));
			if (!crypto::constant_time_equal(crypto::poly1305(poly_key, sealed), tag))
				return mac_failure();

			Bytes plain = crypto::chacha20_xor(length_key, nonce, 0, sealed.first(4));
			if (read_u32(plain) != sealed.size() - 4)
				return OpenFailure{OpenFailure::Kind::LengthImplausible, "length field does not match packet"};
			auto body = crypto::chacha20_xor(main_key, nonce, 1, sealed.subspan(4));
			plain.insert(plain.end(), body.begin(), body.end());
			return plain;
		}
	}
	return mac_failure();
}

// --------------------------------------------------------------------

Bytes eam_mac_input(std::uint32_t seqno, ByteView plaintext_packet)
{
	return WireWriter().u32(seqno).raw(plaintext_packet).bytes();
}

Bytes etm_mac_input(std::uint32_t seqno, ByteView length_field, ByteView ciphertext)
{
	return WireWriter().u32(seqno).raw(length_field).raw(ciphertext).bytes();
}

Bytes derive_key(ByteView shared_secret, ByteView exchange_hash, char letter, ByteView session_id, std::size_t length)
{
	if (exchange_hash.empty() || session_id.empty())
		throw std::invalid_argument("key derivation needs a non-empty exchange hash and session id");

	const Bytes k = mpint_encoding(shared_secret);

	crypto::Sha256 first;
	first.update(k).update(exchange_hash);
	const std::uint8_t l = static_cast<std::uint8_t>(letter);
	first.update(ByteView(&l, 1)).update(session_id);
	Bytes out = first.finish();

	while (out.size() < length)
	{
		crypto::Sha256 next;
		next.update(k).update(exchange_hash).update(out);
		auto more = next.finish();
		out.insert(out.end(), more.begin(), more.end());
	}
	out.resize(length);
	return out;
}

KeySizes key_sizes(ModeId mode)
{
	switch (mode)
	{
		case ModeId::CbcEaM:
		case ModeId::CbcEtM:
		case ModeId::CtrEaM:
		case ModeId::CtrEtM: return {16, 16, 32};
		case ModeId::Gcm: return {12, 16, 0};
		case ModeId::ChaCha20Poly1305: return {0, 64, 0};
	}
	return {0, 0, 0};
}

KeyMaterial derive_key_material(
	ByteView shared_secret, ByteView exchange_hash, ByteView session_id, ModeId mode, Direction direction)
{
	const bool c2s = direction == Direction::ClientToServer;
	auto sizes = key_sizes(mode);
	KeyMaterial km;
	if (sizes.iv)
		km.iv = derive_key(shared_secret, exchange_hash, c2s ? 'A' : 'B', session_id, sizes.iv);
	km.enc_key = derive_key(shared_secret, exchange_hash, c2s ? 'C' : 'D', session_id, sizes.enc);
	if (sizes.mac)
		km.mac_key = derive_key(shared_secret, exchange_hash, c2s ? 'E' : 'F', session_id, sizes.mac);
	return km;
}

DirectionalCipherState derive_directional_keys(
	ByteView shared_secret, ByteView exchange_hash, ByteView session_id, ModeId mode, Direction direction)
{
	return DirectionalCipherState(mode, derive_key_material(shared_secret, exchange_hash, session_id, mode, direction));
}

} // namespace sshlab
