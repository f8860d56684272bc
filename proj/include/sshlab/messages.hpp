#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sshlab/wire.hpp"

namespace sshlab
{

namespace msgid
{
inline constexpr std::uint8_t disconnect = 1;
inline constexpr std::uint8_t ignore = 2;
inline constexpr std::uint8_t unimplemented = 3;
inline constexpr std::uint8_t debug = 4;
inline constexpr std::uint8_t service_request = 5;
inline constexpr std::uint8_t service_accept = 6;
inline constexpr std::uint8_t ext_info = 7;
/// Full-transcript MAC, taken from the unassigned transport range.
inline constexpr std::uint8_t transcript_mac = 8;
inline constexpr std::uint8_t kexinit = 20;
inline constexpr std::uint8_t newkeys = 21;
inline constexpr std::uint8_t kexdh_init = 30;
inline constexpr std::uint8_t kexdh_reply = 31;
inline constexpr std::uint8_t userauth_request = 50;
inline constexpr std::uint8_t userauth_failure = 51;
inline constexpr std::uint8_t userauth_success = 52;
inline constexpr std::uint8_t ping = 192;
inline constexpr std::uint8_t pong = 193;
} // namespace msgid

struct Disconnect
{
	std::uint32_t reason = 2; // SSH_DISCONNECT_PROTOCOL_ERROR
	std::string description;
	std::string language;
	bool operator==(const Disconnect&) const = default;
};

struct Ignore
{
	Bytes data;
	bool operator==(const Ignore&) const = default;
};

struct Unimplemented
{
	std::uint32_t seqno = 0;
	bool operator==(const Unimplemented&) const = default;
};

struct Debug
{
	bool always_display = false;
	std::string message;
	std::string language;
	bool operator==(const Debug&) const = default;
};

struct ServiceRequest
{
	std::string service;
	bool operator==(const ServiceRequest&) const = default;
};

/// The service name is optional on the wire for lenient receivers; an empty
/// body decodes to std::nullopt.
struct ServiceAccept
{
	std::optional<std::string> service;
	bool operator==(const ServiceAccept&) const = default;
};

struct ExtInfo
{
	std::vector<std::pair<std::string, std::string>> extensions;
	bool operator==(const ExtInfo&) const = default;
};

struct TranscriptMac
{
	Bytes mac;
	bool operator==(const TranscriptMac&) const = default;
};

struct KexInit
{
	std::array<std::uint8_t, 16> cookie{};
	std::vector<std::string> kex_algorithms;
	std::vector<std::string> host_key_algorithms;
	std::vector<std::string> ciphers_c2s;
	std::vector<std::string> ciphers_s2c;
	std::vector<std::string> macs_c2s;
	std::vector<std::string> macs_s2c;
	std::vector<std::string> compression_c2s;
	std::vector<std::string> compression_s2c;
	std::vector<std::string> languages_c2s;
	std::vector<std::string> languages_s2c;
	bool first_kex_packet_follows = false;
	std::uint32_t reserved = 0;
	bool operator==(const KexInit&) const = default;
};

struct NewKeys
{
	bool operator==(const NewKeys&) const = default;
};

/// DH values are carried as big-endian magnitudes without leading zeros.
struct KexDhInit
{
	Bytes e;
	bool operator==(const KexDhInit&) const = default;
};

struct KexDhReply
{
	Bytes host_key;
	Bytes f;
	Bytes signature;
	bool operator==(const KexDhReply&) const = default;
};

/// Only the "none" and "password" methods are modelled; other methods are
/// treated as password-equivalent single messages.
struct UserAuthRequest
{
	std::string user;
	std::string service = "ssh-connection";
	std::string method = "password";
	std::string password;
	bool operator==(const UserAuthRequest&) const = default;
};

struct UserAuthFailure
{
	std::vector<std::string> can_continue;
	bool partial_success = false;
	bool operator==(const UserAuthFailure&) const = default;
};

struct UserAuthSuccess
{
	bool operator==(const UserAuthSuccess&) const = default;
};

struct Ping
{
	Bytes data;
	bool operator==(const Ping&) const = default;
};

struct Pong
{
	Bytes data;
	bool operator==(const Pong&) const = default;
};

/// Any message without a dedicated variant: either a registered id this lab
/// does not model (channel messages, ...) or an id nobody recognizes.
struct RawMessage
{
	std::uint8_t id = 0;
	Bytes body;
	bool operator==(const RawMessage&) const = default;
};

using Message = std::variant<Disconnect, Ignore, Unimplemented, Debug, ServiceRequest, ServiceAccept, ExtInfo,
	TranscriptMac, KexInit, NewKeys, KexDhInit, KexDhReply, UserAuthRequest, UserAuthFailure, UserAuthSuccess, Ping,
	Pong, RawMessage>;

std::uint8_t message_id(const Message& m);
std::string message_name(std::uint8_t id);
std::string describe(const Message& m);

/// Serializes id + body.
Bytes encode_message(const Message& m);

/// Parses a payload. Ids without a dedicated variant become RawMessage.
/// Throws CodecError when the body does not match the layout for its id.
Message decode_message(ByteView payload);

/// True for ids that have a dedicated variant.
bool is_modelled_id(std::uint8_t id);

} // namespace sshlab
