#include "sshlab/peer.hpp"

#include <algorithm>
#include <sstream>

namespace sshlab
{

std::string to_string(Role r)
{
	return r == Role::Client ? "client" : "server";
}

// --------------------------------------------------------------------

StrictnessProfile StrictnessProfile::strict()
{
	return {};
}

StrictnessProfile StrictnessProfile::lenient()
{
	StrictnessProfile p;
	p.name = "lenient";
	p.accept_empty_service_accept = true;
	p.detect_seqno_rollover = false;
	return p;
}

StrictnessProfile StrictnessProfile::asyncssh()
{
	StrictnessProfile p;
	p.name = "asyncssh";
	p.accept_early_ext_info = true;
	p.accept_early_userauth = true;
	p.ignore_extra_userauth_after_success = true;
	p.detect_seqno_rollover = false;
	return p;
}

StrictnessProfile StrictnessProfile::dropbear()
{
	StrictnessProfile p;
	p.name = "dropbear";
	p.accept_empty_service_accept = true;
	p.respond_unimplemented_to_unknown = false;
	p.detect_seqno_rollover = false;
	return p;
}

StrictnessProfile StrictnessProfile::openssh()
{
	StrictnessProfile p;
	p.name = "openssh";
	p.accept_empty_service_accept = true;
	return p;
}

std::optional<StrictnessProfile> StrictnessProfile::named(std::string_view name)
{
	if (name == "strict")
		return strict();
	if (name == "lenient" || name == "putty")
		return lenient();
	if (name == "asyncssh")
		return asyncssh();
	if (name == "dropbear")
		return dropbear();
	if (name == "openssh")
		return openssh();
	return std::nullopt;
}

std::vector<std::string> StrictnessProfile::names()
{
	return {"strict", "lenient", "asyncssh", "dropbear", "openssh"};
}

std::optional<Countermeasures> Countermeasures::named(std::string_view name)
{
	if (name == "none")
		return Countermeasures{};
	if (name == "seq-reset")
		return Countermeasures{true, false};
	if (name == "transcript-mac")
		return Countermeasures{false, true};
	if (name == "both")
		return Countermeasures{true, true};
	return std::nullopt;
}

std::string to_string(Termination t)
{
	switch (t)
	{
		case Termination::AuthFailure: return "auth-failure";
		case Termination::Disconnected: return "disconnected";
		case Termination::PeerDisconnected: return "peer-disconnected";
		case Termination::NegotiationFailure: return "negotiation-failure";
		case Termination::HostKeyRejected: return "host-key-rejected";
		case Termination::TranscriptMacMismatch: return "transcript-mac-mismatch";
		case Termination::CorruptPacket: return "corrupt-packet";
		case Termination::ProtocolViolation: return "protocol-violation";
		case Termination::RolloverDetected: return "rollover-detected";
		case Termination::CredentialsRejected: return "credentials-rejected";
		case Termination::Timeout: return "timeout";
		case Termination::ConnectionClosed: return "connection-closed";
	}
	return "?";
}

std::string to_string(Event::Kind k)
{
	switch (k)
	{
		case Event::Kind::Sent: return "sent";
		case Event::Kind::Received: return "recv";
		case Event::Kind::ReceivedEvasive: return "recv-evasive";
		case Event::Kind::ReceivedCritical: return "recv-critical";
		case Event::Kind::KeysActivated: return "keys";
		case Event::Kind::Note: return "note";
		case Event::Kind::Terminated: return "terminated";
	}
	return "?";
}

std::string format_event(const Event& e)
{
	std::ostringstream os;
	os << to_string(e.kind);
	if (e.kind == Event::Kind::Sent || e.kind == Event::Kind::Received || e.kind == Event::Kind::ReceivedEvasive ||
		e.kind == Event::Kind::ReceivedCritical)
		os << (e.encrypted ? " [enc]" : " [plain]") << " seq=" << e.seqno;
	if (!e.detail.empty())
		os << ' ' << e.detail;
	return os.str();
}

// --------------------------------------------------------------------

PeerConfig& PeerConfig::restrict_to(ModeId mode)
{
	const auto& info = mode_info(mode);
	ciphers = {std::string(info.cipher_name)};
	if (!info.aead())
		macs = {std::string(info.mac_name)};
	return *this;
}

PeerConfig PeerConfig::client_defaults()
{
	PeerConfig c;
	c.software = "SSHLab_1.0 client";
	c.extensions = {{"ext-info-in-auth@openssh.com", "0"}};
	return c;
}

PeerConfig PeerConfig::server_defaults()
{
	PeerConfig c;
	c.software = "SSHLab_1.0 server";
	c.seed = 2;
	c.extensions = {
		{"server-sig-algs", "ssh-ed25519,rsa-sha2-512,rsa-sha2-256"},
		{"publickey-hostbound@openssh.com", "0"},
		{"ping@openssh.com", "0"},
	};
	return c;
}

bool PeerSession::keystroke_countermeasure_active() const
{
	return std::any_of(received_extensions.begin(), received_extensions.end(),
		[](const auto& e) { return e.first == "ping@openssh.com"; });
}

std::size_t PeerSession::count(Event::Kind kind, bool encrypted_only) const
{
	return static_cast<std::size_t>(std::count_if(events.begin(), events.end(),
		[&](const Event& e) { return e.kind == kind && (!encrypted_only || e.encrypted); }));
}

// --------------------------------------------------------------------

namespace
{

Bytes payload_of(const Bytes& plain)
{
	std::uint32_t len = (std::uint32_t(plain[0]) << 24) | (std::uint32_t(plain[1]) << 16) |
						(std::uint32_t(plain[2]) << 8) | plain[3];
	std::size_t pad = plain[4];
	return Bytes(plain.begin() + 5, plain.begin() + 4 + (len - pad));
}

} // namespace

Peer::Peer(Role role, PeerConfig config)
	: cfg_(std::move(config))
	, role_(role)
	, key_rng_(derive_seed(cfg_.seed, 0))
	, padding_rng_(derive_seed(cfg_.seed, 1))
	, own_banner_(VersionBanner::make("SSH-2.0-" + cfg_.software))
{
	session_.role = role;
	session_.counters.bits = cfg_.seq_bits;
	if (cfg_.seq_bits < 1 || cfg_.seq_bits > 32)
		throw std::invalid_argument("sequence counter width must be in [1, 32]");
}

Direction Peer::send_direction() const
{
	return role_ == Role::Client ? Direction::ClientToServer : Direction::ServerToClient;
}

KexInit Peer::build_kexinit()
{
	KexInit k;
	auto cookie = key_rng_.bytes(16);
	std::copy(cookie.begin(), cookie.end(), k.cookie.begin());

	const bool client = role_ == Role::Client;
	const auto& s = cfg_.signals;
	k.kex_algorithms = cfg_.kex_algorithms;
	if (cfg_.signal_ext_info)
		k.kex_algorithms.push_back(client ? s.ext_info_c : s.ext_info_s);
	if (cfg_.countermeasures.seq_reset)
		k.kex_algorithms.push_back(client ? s.seq_reset_c : s.seq_reset_s);
	if (cfg_.countermeasures.transcript_mac)
		k.kex_algorithms.push_back(client ? s.xmac_c : s.xmac_s);

	k.host_key_algorithms = cfg_.host_key_algorithms;
	k.ciphers_c2s = k.ciphers_s2c = cfg_.ciphers;
	k.macs_c2s = k.macs_s2c = cfg_.macs;
	k.compression_c2s = k.compression_s2c = {std::string(names::compression_none)};
	return k;
}

void Peer::start()
{
	if (started_)
		return;
	started_ = true;
	out_.push_back(own_banner_.line());
	note("banner " + own_banner_.text);
	if (!cfg_.send_kexinit)
	{
		terminate(Termination::ConnectionClosed, "closing after banner", false);
		return;
	}
	own_kexinit_ = build_kexinit();
	own_kexinit_payload_ = encode_message(own_kexinit_);
	send(own_kexinit_);
}

std::vector<Bytes> Peer::take_output()
{
	return std::exchange(out_, {});
}

void Peer::note(std::string detail)
{
	session_.events.push_back({Event::Kind::Note, false, 0, 0, std::move(detail), {}});
}

void Peer::send(const Message& m)
{
	if (closed())
		return;

	auto packet = encode_packet(m, tx_.block_size(), tx_.length_encrypted(), padding_rng_);
	Bytes plain = packet.serialize();
	const bool encrypted = tx_.active();
	const std::uint32_t seq = session_.counters.snd;
	out_.push_back(tx_.seal(seq, packet));

	if (!sent_newkeys_)
		transcript_.append(send_direction(), plain);
	session_.events.push_back(
		{Event::Kind::Sent, encrypted, seq, message_id(m), describe(m), encrypted ? std::move(plain) : Bytes{}});
	if (encrypted)
		session_.channel_sent.push_back(m);

	if (session_.counters.advance(session_.counters.snd) && cfg_.profile.detect_seqno_rollover)
		terminate(Termination::RolloverDetected, "send sequence number wrapped", false);
}

void Peer::terminate(Termination t, std::string detail, bool send_disconnect)
{
	if (closed())
		return;
	if (send_disconnect)
		send(Disconnect{2, detail, ""});
	if (closed())
		return;
	session_.termination = t;
	session_.termination_detail = detail;
	session_.events.push_back({Event::Kind::Terminated, false, 0, 0, to_string(t) + ": " + detail, {}});
}

void Peer::on_bytes(ByteView data)
{
	if (closed())
		return;
	in_.insert(in_.end(), data.begin(), data.end());
	process_input();
}

void Peer::on_eof()
{
	terminate(Termination::ConnectionClosed, "transport closed", false);
}

void Peer::on_quiescent()
{
	if (closed() || established())
		return;
	if (cfg_.scan_only && session_.activation_rcv)
		terminate(Termination::ConnectionClosed, "scan complete", false);
	else
		terminate(Termination::Timeout, "no progress", false);
}

void Peer::handle_unknown(std::uint32_t seqno)
{
	if (cfg_.profile.respond_unimplemented_to_unknown)
		send(Unimplemented{seqno});
	else
		terminate(Termination::Disconnected, "unknown message", true);
}

void Peer::activate_send_keys()
{
	const auto dir = send_direction();
	tx_ = derive_directional_keys(shared_secret_, session_.exchange_hash, session_id_, session_.negotiated->mode_for(dir), dir);
	if (session_.negotiated->seq_reset_enabled)
		session_.counters.snd = 0;
	session_.activation_snd = session_.counters.snd;
	session_.events.push_back({Event::Kind::KeysActivated, false, session_.counters.snd, 0,
		"send " + to_string(session_.negotiated->mode_for(dir)), {}});
}

void Peer::activate_receive_keys()
{
	const auto dir = receive_direction();
	rx_ = derive_directional_keys(shared_secret_, session_.exchange_hash, session_id_, session_.negotiated->mode_for(dir), dir);
	if (session_.negotiated->seq_reset_enabled)
		session_.counters.rcv = 0;
	session_.activation_rcv = session_.counters.rcv;
	session_.events.push_back({Event::Kind::KeysActivated, false, session_.counters.rcv, 0,
		"receive " + to_string(session_.negotiated->mode_for(dir)), {}});
}

Bytes Peer::own_transcript_mac() const
{
	return transcript_mac(transcript_, shared_secret_, session_.exchange_hash, session_id_);
}

void Peer::process_input()
{
	if (!peer_banner_)
	{
		auto parsed = parse_banner(in_);
		if (!parsed)
		{
			if (in_.size() > 8192)
				terminate(Termination::ProtocolViolation, "no version banner", false);
			return;
		}
		peer_banner_ = parsed->first;
		in_.erase(in_.begin(), in_.begin() + static_cast<std::ptrdiff_t>(parsed->second));
		note("peer banner " + peer_banner_->text);
		session_.peer_banner = peer_banner_->text;
		if (role_ == Role::Client)
			transcript_.set_banners(own_banner_, *peer_banner_);
		else
			transcript_.set_banners(*peer_banner_, own_banner_);
	}

	while (!closed())
	{
		auto size = rx_.next_packet_size(in_, session_.counters.rcv);
		if (std::holds_alternative<NeedMoreData>(size))
			return;
		if (auto* f = std::get_if<OpenFailure>(&size))
		{
			terminate(Termination::AuthFailure, f->detail, false);
			return;
		}
		const auto n = std::get<std::size_t>(size);
		if (in_.size() < n)
			return;

		Bytes wire(in_.begin(), in_.begin() + static_cast<std::ptrdiff_t>(n));
		in_.erase(in_.begin(), in_.begin() + static_cast<std::ptrdiff_t>(n));

		const bool encrypted = rx_.active();
		const std::uint32_t seq = session_.counters.rcv;
		auto opened = rx_.open(seq, wire);
		if (auto* f = std::get_if<OpenFailure>(&opened))
		{
			terminate(Termination::AuthFailure, f->detail, false);
			return;
		}
		Bytes plain = std::get<Bytes>(std::move(opened));

		if (!received_newkeys_)
			transcript_.append(receive_direction(), plain);
		if (session_.counters.advance(session_.counters.rcv) && cfg_.profile.detect_seqno_rollover)
		{
			terminate(Termination::RolloverDetected, "receive sequence number wrapped", false);
			return;
		}

		DecodeOptions opts{&cfg_.registry, cfg_.profile.accept_empty_service_accept};
		dispatch(seq, encrypted, plain, decode_packet(plain, opts));
	}
}

void Peer::dispatch(std::uint32_t seqno, bool encrypted, const Bytes& plain, const DecodeResult& r)
{
	auto record = [&](Event::Kind kind, std::uint8_t id, std::string detail) {
		session_.events.push_back({kind, encrypted, seqno, id, std::move(detail), encrypted ? plain : Bytes{}});
	};

	if (auto* c = std::get_if<CriticallyCorrupt>(&r))
	{
		record(Event::Kind::ReceivedCritical, plain.size() > 5 ? plain[5] : 0, c->reason);
		terminate(Termination::CorruptPacket, c->reason, true);
		return;
	}
	if (auto* e = std::get_if<EvasivelyCorrupt>(&r))
	{
		record(Event::Kind::ReceivedEvasive, e->id, "unknown id " + std::to_string(e->id));
		handle_unknown(seqno);
		return;
	}

	const auto& m = std::get<Message>(r);
	record(Event::Kind::Received, message_id(m), describe(m));
	if (encrypted)
		session_.channel_received.push_back(m);

	if (encrypted && session_.negotiated && session_.negotiated->transcript_mac_enabled && !session_.transcript_mac_verified)
	{
		auto* tm = std::get_if<TranscriptMac>(&m);
		if (!tm)
			terminate(Termination::TranscriptMacMismatch, "first channel message is not the transcript MAC", true);
		else if (!crypto::constant_time_equal(tm->mac, own_transcript_mac()))
			terminate(Termination::TranscriptMacMismatch, "transcript views differ", true);
		else
		{
			session_.transcript_mac_verified = true;
			note("transcript MAC verified");
		}
		return;
	}
	if (encrypted)
		++channel_messages_;

	if (std::holds_alternative<Disconnect>(m))
	{
		terminate(Termination::PeerDisconnected, std::get<Disconnect>(m).description, false);
		return;
	}
	if (std::holds_alternative<Ignore>(m) || std::holds_alternative<Debug>(m) ||
		std::holds_alternative<Unimplemented>(m) || std::holds_alternative<Pong>(m))
		return;
	if (auto* ping = std::get_if<Ping>(&m))
	{
		if (cfg_.supports_ping)
			send(Pong{ping->data});
		else
			handle_unknown(seqno);
		return;
	}
	// Recognized but not modelled here: unexpected in every state.
	if (std::holds_alternative<RawMessage>(m))
	{
		terminate(Termination::ProtocolViolation, "unexpected " + message_name(message_id(m)), true);
		return;
	}
	if (auto* k = std::get_if<KexInit>(&m))
	{
		if (peer_kexinit_ || encrypted)
		{
			terminate(Termination::ProtocolViolation, "re-keying is not supported", true);
			return;
		}
		peer_kexinit_ = *k;
		session_.peer_kexinit = *k;
		peer_kexinit_payload_ = payload_of(plain);
		on_kexinit_pair();
		return;
	}

	if (!handle(m, encrypted))
		terminate(Termination::ProtocolViolation, "unexpected " + message_name(message_id(m)), true);
}

// --------------------------------------------------------------------
// Client

void ClientPeer::on_kexinit_pair()
{
	try
	{
		session_.negotiated = negotiate(own_kexinit_, *peer_kexinit_, cfg_.signals);
	}
	catch (const NegotiationError& e)
	{
		terminate(Termination::NegotiationFailure, e.what(), true);
		return;
	}
	dh_ = dh_generate(key_rng_);
	send(KexDhInit{dh_.pub});
	state_ = State::AwaitDhReply;
}

void ClientPeer::merge_extensions(const ExtInfo& ext)
{
	for (const auto& [name, value] : ext.extensions)
	{
		auto it = std::find_if(session_.received_extensions.begin(), session_.received_extensions.end(),
			[&](const auto& e) { return e.first == name; });
		if (it != session_.received_extensions.end())
			it->second = value;
		else
			session_.received_extensions.emplace_back(name, value);
	}
}

void ClientPeer::after_newkeys()
{
	if (session_.negotiated->transcript_mac_enabled)
		send(TranscriptMac{own_transcript_mac()});
	if (cfg_.scan_only)
		return;
	if (session_.negotiated->client_ext_info_enabled && !cfg_.extensions.empty())
		send(ExtInfo{cfg_.extensions});
	send(ServiceRequest{"ssh-userauth"});
	state_ = State::AwaitServiceAccept;
}

bool ClientPeer::handle(const Message& m, bool encrypted)
{
	if (auto* reply = std::get_if<KexDhReply>(&m))
	{
		if (state_ != State::AwaitDhReply)
			return false;
		try
		{
			shared_secret_ = dh_shared_secret(dh_, reply->f);
		}
		catch (const HandshakeError& e)
		{
			terminate(Termination::ProtocolViolation, e.what(), true);
			return true;
		}
		if (cfg_.expected_host_key && *cfg_.expected_host_key != reply->host_key)
		{
			terminate(Termination::HostKeyRejected, "unexpected host key", true);
			return true;
		}
		TranscriptInputs t{own_banner_, *peer_banner_, own_kexinit_payload_, peer_kexinit_payload_, reply->host_key,
			dh_.pub, reply->f, shared_secret_};
		session_.exchange_hash = exchange_hash(t);
		session_id_ = session_.exchange_hash;
		if (!verify_exchange_hash(reply->host_key, session_.exchange_hash, reply->signature))
		{
			terminate(Termination::HostKeyRejected, "bad exchange hash signature", true);
			return true;
		}
		session_.host_key_verified = true;
		note("host key signature verified");

		send(NewKeys{});
		sent_newkeys_ = true;
		activate_send_keys();
		state_ = State::AwaitNewKeys;
		return true;
	}
	if (std::holds_alternative<NewKeys>(m))
	{
		if (state_ != State::AwaitNewKeys || encrypted)
			return false;
		received_newkeys_ = true;
		activate_receive_keys();
		after_newkeys();
		return true;
	}
	if (auto* ext = std::get_if<ExtInfo>(&m))
	{
		if (!encrypted)
		{
			if (!cfg_.profile.accept_early_ext_info)
				return false;
			merge_extensions(*ext);
			note("accepted ExtInfo before NewKeys");
			return true;
		}
		if (!session_.negotiated->ext_info_enabled)
			return false;
		if (channel_messages_ != 1 && state_ != State::AwaitAuth)
			return false;
		merge_extensions(*ext);
		if (cfg_.scan_only)
			terminate(Termination::ConnectionClosed, "scan complete", false);
		return true;
	}
	if (auto* acc = std::get_if<ServiceAccept>(&m))
	{
		if (state_ != State::AwaitServiceAccept || !encrypted)
			return false;
		if (acc->service && *acc->service != "ssh-userauth")
			return false;
		send(UserAuthRequest{cfg_.user, "ssh-connection", "password", cfg_.password});
		state_ = State::AwaitAuth;
		return true;
	}
	if (std::holds_alternative<UserAuthSuccess>(m))
	{
		if (state_ != State::AwaitAuth || !encrypted)
			return false;
		state_ = State::Established;
		session_.established = true;
		session_.authenticated_user = cfg_.user;
		note("authenticated as " + cfg_.user);
		for (const auto& w : cfg_.workload)
			send(w);
		return true;
	}
	if (std::holds_alternative<UserAuthFailure>(m))
	{
		if (state_ != State::AwaitAuth || !encrypted)
			return false;
		terminate(Termination::CredentialsRejected, "password rejected", true);
		return true;
	}
	return false;
}

// --------------------------------------------------------------------
// Server

void ServerPeer::on_kexinit_pair()
{
	try
	{
		session_.negotiated = negotiate(*peer_kexinit_, own_kexinit_, cfg_.signals);
	}
	catch (const NegotiationError& e)
	{
		terminate(Termination::NegotiationFailure, e.what(), true);
		return;
	}
	state_ = State::AwaitDhInit;
}

void ServerPeer::send_ext_info()
{
	if (cfg_.signal_ext_info && session_.negotiated->ext_info_enabled && !cfg_.extensions.empty())
		send(ExtInfo{cfg_.extensions});
}

bool ServerPeer::process_userauth(const UserAuthRequest& req)
{
	if (session_.authenticated_user)
	{
		if (!cfg_.profile.ignore_extra_userauth_after_success)
			return false;
		note("ignored UserAuthRequest for " + req.user + " after success");
		return true;
	}
	auto it = cfg_.credentials.find(req.user);
	if (req.method == "password" && it != cfg_.credentials.end() && it->second == req.password)
	{
		if (cfg_.send_second_ext_info)
			send_ext_info();
		send(UserAuthSuccess{});
		session_.authenticated_user = req.user;
		session_.established = true;
		state_ = State::Running;
		note("authenticated " + req.user);
	}
	else
		send(UserAuthFailure{{"password"}, false});
	return true;
}

bool ServerPeer::handle(const Message& m, bool encrypted)
{
	if (auto* init = std::get_if<KexDhInit>(&m))
	{
		if (state_ != State::AwaitDhInit)
			return false;
		if (!dh_value_in_range(init->e))
		{
			terminate(Termination::ProtocolViolation, "DH public value out of range", true);
			return true;
		}
		dh_ = dh_generate(key_rng_);
		shared_secret_ = dh_shared_secret(dh_, init->e);

		auto key = crypto::Ed25519Key::from_seed(cfg_.host_key_seed);
		auto k_s = encode_host_key_blob(key.public_key());
		TranscriptInputs t{*peer_banner_, own_banner_, peer_kexinit_payload_, own_kexinit_payload_, k_s, init->e,
			dh_.pub, shared_secret_};
		session_.exchange_hash = exchange_hash(t);
		session_id_ = session_.exchange_hash;

		send(KexDhReply{k_s, dh_.pub, sign_exchange_hash(key, session_.exchange_hash)});
		send(NewKeys{});
		sent_newkeys_ = true;
		activate_send_keys();
		// Under the transcript MAC nothing may precede it, so ExtInfo waits for the client's NewKeys.
		if (!session_.negotiated->transcript_mac_enabled)
			send_ext_info();
		state_ = State::AwaitNewKeys;
		return true;
	}
	if (std::holds_alternative<NewKeys>(m))
	{
		if (state_ != State::AwaitNewKeys || encrypted)
			return false;
		received_newkeys_ = true;
		activate_receive_keys();
		if (session_.negotiated->transcript_mac_enabled)
		{
			send(TranscriptMac{own_transcript_mac()});
			send_ext_info();
		}
		state_ = State::AwaitService;
		return true;
	}
	if (auto* ext = std::get_if<ExtInfo>(&m))
	{
		if (!encrypted)
		{
			if (!cfg_.profile.accept_early_ext_info)
				return false;
			note("accepted ExtInfo before NewKeys");
		}
		else if (!session_.negotiated->client_ext_info_enabled || channel_messages_ != 1)
			return false;
		for (const auto& e : ext->extensions)
			session_.received_extensions.push_back(e);
		return true;
	}
	if (auto* req = std::get_if<ServiceRequest>(&m))
	{
		if (!encrypted || service_accepted_ || state_ != State::AwaitService)
			return false;
		if (req->service != "ssh-userauth")
		{
			terminate(Termination::ProtocolViolation, "service not available: " + req->service, true);
			return true;
		}
		send(ServiceAccept{std::string("ssh-userauth")});
		service_accepted_ = true;
		auto deferred = std::exchange(deferred_, {});
		for (const auto& d : deferred)
			if (!process_userauth(d))
				return false;
		return true;
	}
	if (auto* req = std::get_if<UserAuthRequest>(&m))
	{
		if (!service_accepted_)
		{
			if (!cfg_.profile.accept_early_userauth)
				return false;
			deferred_.push_back(*req);
			note("deferred early UserAuthRequest for " + req->user);
			return true;
		}
		return process_userauth(*req);
	}
	return false;
}

} // namespace sshlab
