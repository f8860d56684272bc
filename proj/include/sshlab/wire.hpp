#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sshlab
{

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Thrown for anything that cannot be represented on, or parsed from, the wire.
class CodecError : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

Bytes to_bytes(std::string_view s);
std::string to_string(ByteView b);
std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

Bytes concat(ByteView a, ByteView b);

/// Big-endian writer for the RFC 4251 data types.
class WireWriter
{
  public:
	WireWriter& u8(std::uint8_t v);
	WireWriter& u32(std::uint32_t v);
	WireWriter& u64(std::uint64_t v);
	WireWriter& boolean(bool v) { return u8(v ? 1 : 0); }
	WireWriter& raw(ByteView b);
	WireWriter& string(ByteView b);
	WireWriter& string(std::string_view s);
	/// Non-negative integer given as a big-endian magnitude (leading zeros allowed).
	WireWriter& mpint(ByteView magnitude);
	WireWriter& namelist(const std::vector<std::string>& names);

	const Bytes& bytes() const& { return buf_; }
	Bytes&& bytes() && { return std::move(buf_); }

  private:
	Bytes buf_;
};

/// Bounds-checked reader; every accessor throws CodecError on underrun.
class WireReader
{
  public:
	explicit WireReader(ByteView data) : data_(data) {}

	std::uint8_t u8();
	std::uint32_t u32();
	std::uint64_t u64();
	/// Strict: only 0 and 1 are accepted.
	bool boolean();
	Bytes raw(std::size_t n);
	Bytes string();
	std::string text();
	/// Returns the minimal big-endian magnitude; negative values are rejected.
	Bytes mpint();
	std::vector<std::string> namelist();

	std::size_t remaining() const { return data_.size() - pos_; }
	bool empty() const { return remaining() == 0; }
	void expect_end() const;

  private:
	ByteView data_;
	std::size_t pos_ = 0;
};

Bytes encode_namelist(const std::vector<std::string>& names);
std::vector<std::string> decode_namelist(ByteView wire);

/// Strips leading zero bytes from a big-endian magnitude.
Bytes normalize_magnitude(ByteView magnitude);

} // namespace sshlab
