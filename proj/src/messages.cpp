#include "sshlab/messages.hpp"

#include <sstream>

namespace sshlab
{

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
	using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::uint8_t message_id(const Message& m)
{
	return std::visit(overloaded{
						  [](const Disconnect&) { return msgid::disconnect; },
						  [](const Ignore&) { return msgid::ignore; },
						  [](const Unimplemented&) { return msgid::unimplemented; },
						  [](const Debug&) { return msgid::debug; },
						  [](const ServiceRequest&) { return msgid::service_request; },
						  [](const ServiceAccept&) { return msgid::service_accept; },
						  [](const ExtInfo&) { return msgid::ext_info; },
						  [](const TranscriptMac&) { return msgid::transcript_mac; },
						  [](const KexInit&) { return msgid::kexinit; },
						  [](const NewKeys&) { return msgid::newkeys; },
						  [](const KexDhInit&) { return msgid::kexdh_init; },
						  [](const KexDhReply&) { return msgid::kexdh_reply; },
						  [](const UserAuthRequest&) { return msgid::userauth_request; },
						  [](const UserAuthFailure&) { return msgid::userauth_failure; },
						  [](const UserAuthSuccess&) { return msgid::userauth_success; },
						  [](const Ping&) { return msgid::ping; },
						  [](const Pong&) { return msgid::pong; },
						  [](const RawMessage& r) { return r.id; },
					  },
		m);
}

bool is_modelled_id(std::uint8_t id)
{
	switch (id)
	{
		case msgid::disconnect:
		case msgid::ignore:
		case msgid::unimplemented:
		case msgid::debug:
		case msgid::service_request:
		case msgid::service_accept:
		case msgid::ext_info:
		case msgid::transcript_mac:
		case msgid::kexinit:
		case msgid::newkeys:
		case msgid::kexdh_init:
		case msgid::kexdh_reply:
		case msgid::userauth_request:
		case msgid::userauth_failure:
		case msgid::userauth_success:
		case msgid::ping:
		case msgid::pong:
			return true;
		default:
			return false;
	}
}

std::string message_name(std::uint8_t id)
{
	switch (id)
	{
		case msgid::disconnect: return "Disconnect";
		case msgid::ignore: return "Ignore";
		case msgid::unimplemented: return "Unimplemented";
		case msgid::debug: return "Debug";
		case msgid::service_request: return "ServiceRequest";
		case msgid::service_accept: return "ServiceAccept";
		case msgid::ext_info: return "ExtInfo";
		case msgid::transcript_mac: return "TranscriptMac";
		case msgid::kexinit: return "KexInit";
		case msgid::newkeys: return "NewKeys";
		case msgid::kexdh_init: return "KexDhInit";
		case msgid::kexdh_reply: return "KexDhReply";
		case msgid::userauth_request: return "UserAuthRequest";
		case msgid::userauth_failure: return "UserAuthFailure";
		case msgid::userauth_success: return "UserAuthSuccess";
		case msgid::ping: return "Ping";
		case msgid::pong: return "Pong";
		default: return "Msg" + std::to_string(id);
	}
}

std::string describe(const Message& m)
{
	std::ostringstream s;
	s << message_name(message_id(m));
	std::visit(overloaded{
				   [&](const Disconnect& d) { s << "(" << d.reason << ", \"" << d.description << "\")"; },
				   [&](const Ignore& i) { s << "(" << i.data.size() << " bytes)"; },
				   [&](const Unimplemented& u) { s << "(seq " << u.seqno << ")"; },
				   [&](const ServiceRequest& r) { s << "(\"" << r.service << "\")"; },
				   [&](const ServiceAccept& a) { s << "(" << (a.service ? "\"" + *a.service + "\"" : "<empty>") << ")"; },
				   [&](const ExtInfo& e) {
					   s << "(";
					   for (std::size_t i = 0; i < e.extensions.size(); ++i)
						   s << (i ? ", " : "") << e.extensions[i].first;
					   s << ")";
				   },
				   [&](const UserAuthRequest& u) { s << "(user \"" << u.user << "\", " << u.method << ")"; },
				   [&](const Ping& p) { s << "(" << p.data.size() << " bytes)"; },
				   [&](const Pong& p) { s << "(" << p.data.size() << " bytes)"; },
				   [&](const RawMessage& r) { s << "(" << r.body.size() << " bytes)"; },
				   [](const auto&) {},
			   },
		m);
	return s.str();
}

Bytes encode_message(const Message& m)
{
	WireWriter w;
	w.u8(message_id(m));
	std::visit(overloaded{
				   [&](const Disconnect& d) { w.u32(d.reason).string(d.description).string(d.language); },
				   [&](const Ignore& i) { w.string(i.data); },
				   [&](const Unimplemented& u) { w.u32(u.seqno); },
				   [&](const Debug& d) { w.boolean(d.always_display).string(d.message).string(d.language); },
				   [&](const ServiceRequest& r) { w.string(r.service); },
				   [&](const ServiceAccept& a) {
					   if (a.service)
						   w.string(*a.service);
				   },
				   [&](const ExtInfo& e) {
					   w.u32(static_cast<std::uint32_t>(e.extensions.size()));
					   for (const auto& [name, value] : e.extensions)
						   w.string(name).string(value);
				   },
				   [&](const TranscriptMac& t) { w.string(t.mac); },
				   [&](const KexInit& k) {
					   w.raw(k.cookie);
					   w.namelist(k.kex_algorithms).namelist(k.host_key_algorithms);
					   w.namelist(k.ciphers_c2s).namelist(k.ciphers_s2c);
					   w.namelist(k.macs_c2s).namelist(k.macs_s2c);
					   w.namelist(k.compression_c2s).namelist(k.compression_s2c);
					   w.namelist(k.languages_c2s).namelist(k.languages_s2c);
					   w.boolean(k.first_kex_packet_follows).u32(k.reserved);
				   },
				   [&](const NewKeys&) {},
				   [&](const KexDhInit& k) { w.mpint(k.e); },
				   [&](const KexDhReply& k) { w.string(k.host_key).mpint(k.f).string(k.signature); },
				   [&](const UserAuthRequest& u) {
					   w.string(u.user).string(u.service).string(u.method);
					   if (u.method != "none")
						   w.boolean(false).string(u.password);
				   },
				   [&](const UserAuthFailure& f) { w.namelist(f.can_continue).boolean(f.partial_success); },
				   [&](const UserAuthSuccess&) {},
				   [&](const Ping& p) { w.string(p.data); },
				   [&](const Pong& p) { w.string(p.data); },
				   [&](const RawMessage& r) { w.raw(r.body); },
			   },
		m);
	return std::move(w).bytes();
}

Message decode_message(ByteView payload)
{
	if (payload.empty())
		throw CodecError("empty payload");

	auto id = payload[0];
	WireReader r(payload.subspan(1));

	auto finish = [&](Message m) {
		r.expect_end();
		return m;
	};

	switch (id)
	{
		case msgid::disconnect:
		{
			Disconnect d;
			d.reason = r.u32();
			d.description = r.text();
			d.language = r.text();
			return finish(std::move(d));
		}
		case msgid::ignore: return finish(Ignore{r.string()});
		case msgid::unimplemented: return finish(Unimplemented{r.u32()});
		case msgid::debug:
		{
			Debug d;
			d.always_display = r.boolean();
			d.message = r.text();
			d.language = r.text();
			return finish(std::move(d));
		}
		case msgid::service_request: return finish(ServiceRequest{r.text()});
		case msgid::service_accept:
		{
			if (r.empty())
				return ServiceAccept{};
			return finish(ServiceAccept{r.text()});
		}
		case msgid::ext_info:
		{
			ExtInfo e;
			auto n = r.u32();
			if (n > r.remaining() / 8)
				throw CodecError("implausible extension count");
			for (std::uint32_t i = 0; i < n; ++i)
			{
				auto name = r.text();
				auto value = r.text();
				e.extensions.emplace_back(std::move(name), std::move(value));
			}
			return finish(std::move(e));
		}
		case msgid::transcript_mac: return finish(TranscriptMac{r.string()});
		case msgid::kexinit:
		{
			KexInit k;
			auto cookie = r.raw(16);
			std::copy(cookie.begin(), cookie.end(), k.cookie.begin());
			k.kex_algorithms = r.namelist();
			k.host_key_algorithms = r.namelist();
			k.ciphers_c2s = r.namelist();
			k.ciphers_s2c = r.namelist();
			k.macs_c2s = r.namelist();
			k.macs_s2c = r.namelist();
			k.compression_c2s = r.namelist();
			k.compression_s2c = r.namelist();
			k.languages_c2s = r.namelist();
			k.languages_s2c = r.namelist();
			k.first_kex_packet_follows = r.boolean();
			k.reserved = r.u32();
			return finish(std::move(k));
		}
		case msgid::newkeys: return finish(NewKeys{});
		case msgid::kexdh_init: return finish(KexDhInit{r.mpint()});
		case msgid::kexdh_reply:
		{
			KexDhReply k;
			k.host_key = r.string();
			k.f = r.mpint();
			k.signature = r.string();
			return finish(std::move(k));
		}
		case msgid::userauth_request:
		{
			UserAuthRequest u;
			u.user = r.text();
			u.service = r.text();
			u.method = r.text();
			if (u.method != "none")
			{
				if (r.boolean())
					throw CodecError("password change requests are not supported");
				u.password = r.text();
			}
			return finish(std::move(u));
		}
		case msgid::userauth_failure:
		{
			UserAuthFailure f;
			f.can_continue = r.namelist();
			f.partial_success = r.boolean();
			return finish(std::move(f));
		}
		case msgid::userauth_success: return finish(UserAuthSuccess{});
		case msgid::ping: return finish(Ping{r.string()});
		case msgid::pong: return finish(Pong{r.string()});
		default: return RawMessage{id, Bytes(payload.begin() + 1, payload.end())};
	}
}

} // namespace sshlab
