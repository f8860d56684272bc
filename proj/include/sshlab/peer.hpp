#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sshlab/cipher.hpp"
#include "sshlab/handshake.hpp"
#include "sshlab/messages.hpp"
#include "sshlab/packet.hpp"
#include "sshlab/random.hpp"
#include "sshlab/registry.hpp"

namespace sshlab
{

enum class Role
{
	Client,
	Server,
};

std::string to_string(Role r);

/// Flags emulating documented implementation behaviour. The default is strict.
struct StrictnessProfile
{
	std::string name = "strict";
	bool accept_empty_service_accept = false;
	/// false: disconnect on unknown ids (Dropbear)
	bool respond_unimplemented_to_unknown = true;
	/// Accept ExtInfo before NewKeys (AsyncSSH client).
	bool accept_early_ext_info = false;
	/// Defer UserAuthRequest received before the service was accepted (AsyncSSH server).
	bool accept_early_userauth = false;
	bool ignore_extra_userauth_after_success = false;
	/// Terminate when a sequence number wraps (OpenSSH).
	bool detect_seqno_rollover = true;

	static StrictnessProfile strict();
	/// PuTTY-like: empty ServiceAccept, no rollover detection.
	static StrictnessProfile lenient();
	static StrictnessProfile asyncssh();
	static StrictnessProfile dropbear();
	static StrictnessProfile openssh();
	static std::optional<StrictnessProfile> named(std::string_view name);
	static std::vector<std::string> names();
};

struct Countermeasures
{
	bool seq_reset = false;
	bool transcript_mac = false;

	static std::optional<Countermeasures> named(std::string_view name);
};

struct SequenceCounters
{
	std::uint32_t snd = 0;
	std::uint32_t rcv = 0;
	/// Counters live modulo 2^bits.
	unsigned bits = 32;

	std::uint64_t modulus() const { return std::uint64_t(1) << bits; }
	/// Increments and reports whether the counter wrapped to 0.
	bool advance(std::uint32_t& counter) const
	{
		counter = static_cast<std::uint32_t>((std::uint64_t(counter) + 1) % modulus());
		return counter == 0;
	}
};

enum class Termination
{
	AuthFailure,
	Disconnected,
	PeerDisconnected,
	NegotiationFailure,
	HostKeyRejected,
	TranscriptMacMismatch,
	CorruptPacket,
	ProtocolViolation,
	RolloverDetected,
	CredentialsRejected,
	Timeout,
	/// EOF from the transport. Not an error: SSH has no way to tell it from a normal close.
	ConnectionClosed,
};

std::string to_string(Termination t);
inline bool is_error(Termination t) { return t != Termination::ConnectionClosed; }

struct Event
{
	enum class Kind
	{
		Sent,
		Received,
		ReceivedEvasive,
		ReceivedCritical,
		KeysActivated,
		Note,
		Terminated,
	};

	Kind kind;
	bool encrypted = false;
	std::uint32_t seqno = 0;
	std::uint8_t msg_id = 0;
	std::string detail;
	/// Plaintext packet; recorded for encrypted packets only.
	Bytes plaintext;
};

std::string to_string(Event::Kind k);
std::string format_event(const Event& e);

using ExtensionList = std::vector<std::pair<std::string, std::string>>;

struct PeerConfig
{
	std::string software = "SSHLab_1.0";
	std::vector<std::string> kex_algorithms{std::string(names::kex_dh_group14)};
	std::vector<std::string> host_key_algorithms{std::string(names::ssh_ed25519)};
	std::vector<std::string> ciphers{std::string(names::chacha20_poly1305), std::string(names::aes128_gcm),
		std::string(names::aes128_ctr), std::string(names::aes128_cbc)};
	std::vector<std::string> macs{std::string(names::hmac_sha2_256_etm), std::string(names::hmac_sha2_256)};

	bool signal_ext_info = true;
	/// Content of this peer's ExtInfo.
	ExtensionList extensions;
	bool supports_ping = true;
	/// false: send the banner, then close (no KexInit).
	bool send_kexinit = true;

	StrictnessProfile profile;
	Countermeasures countermeasures;
	Signals signals;
	unsigned seq_bits = 32;
	MessageIdRegistry registry = MessageIdRegistry::default_profile();
	std::uint64_t seed = 1;

	// client
	std::string user = "alice";
	std::string password = "wonderland";
	/// Sent once authenticated.
	std::vector<Message> workload;
	std::optional<Bytes> expected_host_key;
	/// Stop after the key exchange and the first ExtInfo; never request a service.
	bool scan_only = false;

	// server
	std::map<std::string, std::string> credentials{{"alice", "wonderland"}, {"mallory", "mallory-pass"}};
	Bytes host_key_seed = default_host_key_seed();
	/// Send a second ExtInfo right before UserAuthSuccess.
	bool send_second_ext_info = false;

	/// Offer exactly one mode.
	PeerConfig& restrict_to(ModeId mode);

	static PeerConfig client_defaults();
	static PeerConfig server_defaults();
};

struct PeerSession
{
	Role role = Role::Client;
	SequenceCounters counters;
	std::optional<NegotiationResult> negotiated;
	ExtensionList received_extensions;
	std::optional<std::string> peer_banner;
	std::optional<KexInit> peer_kexinit;
	std::optional<std::string> authenticated_user;
	bool established = false;
	bool host_key_verified = false;
	bool transcript_mac_verified = false;
	Bytes exchange_hash;

	/// Counter values in force for the first packet under the new keys.
	std::optional<std::uint32_t> activation_snd;
	std::optional<std::uint32_t> activation_rcv;

	std::optional<Termination> termination;
	std::string termination_detail;

	std::vector<Event> events;
	/// Messages sent and received under encryption, in order.
	std::vector<Message> channel_sent;
	std::vector<Message> channel_received;

	bool keystroke_countermeasure_active() const;
	bool has_error() const { return termination && is_error(*termination); }
	std::size_t count(Event::Kind kind, bool encrypted_only = false) const;
};

/// Event-driven SSH peer. The owner feeds bytes in and collects output
/// segments (one per packet; the banner is its own segment).
class Peer
{
  public:
	Peer(Role role, PeerConfig config);
	virtual ~Peer() = default;
	Peer(const Peer&) = delete;
	Peer& operator=(const Peer&) = delete;

	void start();
	void on_bytes(ByteView data);
	void on_eof();
	/// Called when no more input can arrive; an unfinished handshake times out.
	void on_quiescent();
	std::vector<Bytes> take_output();

	bool closed() const { return session_.termination.has_value(); }
	bool established() const { return session_.established; }
	Role role() const { return role_; }
	const PeerSession& session() const { return session_; }
	const PeerConfig& config() const { return cfg_; }
	const FullTranscript& transcript() const { return transcript_; }

  protected:
	Direction send_direction() const;
	Direction receive_direction() const { return opposite(send_direction()); }

	void send(const Message& m);
	void terminate(Termination t, std::string detail, bool send_disconnect);
	void note(std::string detail);
	void handle_unknown(std::uint32_t seqno);

	void activate_send_keys();
	void activate_receive_keys();
	Bytes own_transcript_mac() const;

	/// Returns false when the message is not acceptable in the current state.
	virtual bool handle(const Message& m, bool encrypted) = 0;
	virtual void on_kexinit_pair() = 0;

	PeerConfig cfg_;
	Role role_;
	PeerSession session_;
	SeededRandom key_rng_;
	SeededRandom padding_rng_;

	VersionBanner own_banner_;
	std::optional<VersionBanner> peer_banner_;
	KexInit own_kexinit_;
	Bytes own_kexinit_payload_;
	std::optional<KexInit> peer_kexinit_;
	Bytes peer_kexinit_payload_;

	DhKeyPair dh_;
	Bytes shared_secret_;
	Bytes session_id_;

	DirectionalCipherState tx_;
	DirectionalCipherState rx_;
	bool sent_newkeys_ = false;
	bool received_newkeys_ = false;
	/// Decoded channel messages received, excluding the transcript MAC.
	std::size_t channel_messages_ = 0;

	FullTranscript transcript_;

  private:
	void process_input();
	void dispatch(std::uint32_t seqno, bool encrypted, const Bytes& plain, const DecodeResult& r);
	KexInit build_kexinit();

	Bytes in_;
	std::vector<Bytes> out_;
	bool started_ = false;
};

class ClientPeer final : public Peer
{
  public:
	explicit ClientPeer(PeerConfig config = PeerConfig::client_defaults()) : Peer(Role::Client, std::move(config)) {}

  private:
	enum class State
	{
		AwaitKexInit,
		AwaitDhReply,
		AwaitNewKeys,
		AwaitServiceAccept,
		AwaitAuth,
		Established,
	};

	bool handle(const Message& m, bool encrypted) override;
	void on_kexinit_pair() override;
	void after_newkeys();
	void merge_extensions(const ExtInfo& ext);

	State state_ = State::AwaitKexInit;
};

class ServerPeer final : public Peer
{
  public:
	explicit ServerPeer(PeerConfig config = PeerConfig::server_defaults()) : Peer(Role::Server, std::move(config)) {}

  private:
	enum class State
	{
		AwaitKexInit,
		AwaitDhInit,
		AwaitNewKeys,
		AwaitService,
		Running,
	};

	bool handle(const Message& m, bool encrypted) override;
	void on_kexinit_pair() override;
	void send_ext_info();
	bool process_userauth(const UserAuthRequest& req);

	State state_ = State::AwaitKexInit;
	bool service_accepted_ = false;
	std::vector<UserAuthRequest> deferred_;
};

} // namespace sshlab
