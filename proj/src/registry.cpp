#include "sshlab/registry.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sshlab
{

MessageIdRegistry::MessageIdRegistry(std::initializer_list<std::uint8_t> ids)
{
	for (auto id : ids)
		ids_.set(id);
}

const MessageIdRegistry& MessageIdRegistry::default_profile()
{
	static const MessageIdRegistry registry{
		// transport
		1, 2, 3, 4, 5, 6, 7, 8, 20, 21,
		// key exchange (DH, GEX, GSS-API kex)
		30, 31, 32, 33, 34, 40, 41,
		// user authentication (RFC 4252, 4256, 4462)
		50, 51, 52, 53, 60, 61, 63, 64, 65, 66,
		// connection
		80, 81, 82, 90, 91, 92, 93, 94, 95, 96, 97, 98, 99, 100,
		// OpenSSH transport-level ping
		192, 193};
	return registry;
}

MessageIdRegistry MessageIdRegistry::all_known()
{
	MessageIdRegistry r;
	r.ids_.set();
	return r;
}

MessageIdRegistry MessageIdRegistry::load(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open registry file " + path);
	auto doc = nlohmann::json::parse(in);

	MessageIdRegistry r;
	for (const auto& id : doc.at("known_ids"))
	{
		auto v = id.get<int>();
		if (v < 0 || v > 255)
			throw std::runtime_error("message id out of range in " + path);
		r.add(static_cast<std::uint8_t>(v));
	}
	return r;
}

std::string MessageIdRegistry::to_json() const
{
	nlohmann::json ids = nlohmann::json::array();
	for (int i = 0; i < 256; ++i)
		if (ids_.test(static_cast<std::size_t>(i)))
			ids.push_back(i);
	return nlohmann::json{{"known_ids", ids}}.dump();
}

} // namespace sshlab
