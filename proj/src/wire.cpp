#include "sshlab/wire.hpp"

#include <algorithm>

namespace sshlab
{

Bytes to_bytes(std::string_view s)
{
	return Bytes(s.begin(), s.end());
}

std::string to_string(ByteView b)
{
	return std::string(b.begin(), b.end());
}

std::string to_hex(ByteView b)
{
	static const char digits[] = "0123456789abcdef";
	std::string out;
	out.reserve(b.size() * 2);
	for (auto c : b)
	{
		out.push_back(digits[c >> 4]);
		out.push_back(digits[c & 0x0f]);
	}
	return out;
}

Bytes from_hex(std::string_view hex)
{
	auto nibble = [](char c) -> int {
		if (c >= '0' && c <= '9')
			return c - '0';
		if (c >= 'a' && c <= 'f')
			return c - 'a' + 10;
		if (c >= 'A' && c <= 'F')
			return c - 'A' + 10;
		throw CodecError("invalid hex digit");
	};

	if (hex.size() % 2 != 0)
		throw CodecError("odd-length hex string");

	Bytes out(hex.size() / 2);
	for (std::size_t i = 0; i < out.size(); ++i)
		out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
	return out;
}

Bytes concat(ByteView a, ByteView b)
{
	Bytes out(a.begin(), a.end());
	out.insert(out.end(), b.begin(), b.end());
	return out;
}

Bytes normalize_magnitude(ByteView magnitude)
{
	auto first = std::find_if(magnitude.begin(), magnitude.end(), [](std::uint8_t c) { return c != 0; });
	return Bytes(first, magnitude.end());
}

// --------------------------------------------------------------------

WireWriter& WireWriter::u8(std::uint8_t v)
{
	buf_.push_back(v);
	return *this;
}

WireWriter& WireWriter::u32(std::uint32_t v)
{
	for (int shift = 24; shift >= 0; shift -= 8)
		buf_.push_back(static_cast<std::uint8_t>(v >> shift));
	return *this;
}

WireWriter& WireWriter::u64(std::uint64_t v)
{
	for (int shift = 56; shift >= 0; shift -= 8)
		buf_.push_back(static_cast<std::uint8_t>(v >> shift));
	return *this;
}

WireWriter& WireWriter::raw(ByteView b)
{
	buf_.insert(buf_.end(), b.begin(), b.end());
	return *this;
}

WireWriter& WireWriter::string(ByteView b)
{
	u32(static_cast<std::uint32_t>(b.size()));
	return raw(b);
}

WireWriter& WireWriter::string(std::string_view s)
{
	u32(static_cast<std::uint32_t>(s.size()));
	buf_.insert(buf_.end(), s.begin(), s.end());
	return *this;
}

WireWriter& WireWriter::mpint(ByteView magnitude)
{
	Bytes m = normalize_magnitude(magnitude);
	if (!m.empty() && (m.front() & 0x80))
		m.insert(m.begin(), 0);
	return string(m);
}

WireWriter& WireWriter::namelist(const std::vector<std::string>& names)
{
	std::string joined;
	for (const auto& name : names)
	{
		if (name.find(',') != std::string::npos)
			throw CodecError("name-list entry contains a comma: " + name);
		if (name.empty())
			throw CodecError("empty name in name-list");
		if (!joined.empty())
			joined.push_back(',');
		joined += name;
	}
	return string(joined);
}

// --------------------------------------------------------------------

std::uint8_t WireReader::u8()
{
	if (remaining() < 1)
		throw CodecError("truncated u8");
	return data_[pos_++];
}

std::uint32_t WireReader::u32()
{
	if (remaining() < 4)
		throw CodecError("truncated u32");
	std::uint32_t v = 0;
	for (int i = 0; i < 4; ++i)
		v = (v << 8) | data_[pos_++];
	return v;
}

std::uint64_t WireReader::u64()
{
	if (remaining() < 8)
		throw CodecError("truncated u64");
	std::uint64_t v = 0;
	for (int i = 0; i < 8; ++i)
		v = (v << 8) | data_[pos_++];
	return v;
}

bool WireReader::boolean()
{
	auto v = u8();
	if (v > 1)
		throw CodecError("boolean out of range");
	return v == 1;
}

Bytes WireReader::raw(std::size_t n)
{
	if (remaining() < n)
		throw CodecError("truncated field");
	Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
	pos_ += n;
	return out;
}

Bytes WireReader::string()
{
	auto len = u32();
	return raw(len);
}

std::string WireReader::text()
{
	auto b = string();
	return std::string(b.begin(), b.end());
}

Bytes WireReader::mpint()
{
	auto b = string();
	if (!b.empty() && (b.front() & 0x80))
		throw CodecError("negative mpint");
	return normalize_magnitude(b);
}

std::vector<std::string> WireReader::namelist()
{
	auto s = text();
	std::vector<std::string> names;
	if (s.empty())
		return names;

	std::size_t start = 0;
	for (;;)
	{
		auto comma = s.find(',', start);
		auto name = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
		if (name.empty())
			throw CodecError("empty name in name-list");
		names.push_back(std::move(name));
		if (comma == std::string::npos)
			break;
		start = comma + 1;
	}
	return names;
}

void WireReader::expect_end() const
{
	if (!empty())
		throw CodecError("trailing bytes after message body");
}

// --------------------------------------------------------------------

Bytes encode_namelist(const std::vector<std::string>& names)
{
	return WireWriter().namelist(names).bytes();
}

std::vector<std::string> decode_namelist(ByteView wire)
{
	WireReader r(wire);
	auto names = r.namelist();
	r.expect_end();
	return names;
}

} // namespace sshlab
