#pragma once

#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <string>

namespace sshlab
{

/// Message ids an implementation recognizes. Anything else is "unknown" and
/// must be answered with Unimplemented (or, for Dropbear-like peers, a disconnect).
class MessageIdRegistry
{
  public:
	MessageIdRegistry() = default;
	MessageIdRegistry(std::initializer_list<std::uint8_t> ids);

	/// 43 ids in active use: the transport, kex, auth and connection ids of
	/// RFC 4250-4254 and RFC 4256/4462, ExtInfo, the transcript-MAC id and
	/// the OpenSSH ping/pong pair.
	static const MessageIdRegistry& default_profile();
	static MessageIdRegistry all_known();
	static MessageIdRegistry none_known() { return {}; }

	/// Loads {"known_ids": [...]} from a JSON file.
	static MessageIdRegistry load(const std::string& path);
	std::string to_json() const;

	bool known(std::uint8_t id) const { return ids_.test(id); }
	void add(std::uint8_t id) { ids_.set(id); }
	void remove(std::uint8_t id) { ids_.reset(id); }
	std::size_t known_count() const { return ids_.count(); }
	std::size_t unknown_count() const { return 256 - ids_.count(); }

	bool operator==(const MessageIdRegistry&) const = default;

  private:
	std::bitset<256> ids_;
};

} // namespace sshlab
