#pragma once

#include <cstddef>

#include "sshlab/mitm.hpp"
#include "sshlab/peer.hpp"

namespace sshlab::attacks
{

/// Id 200 is outside every registry profile shipped here.
inline constexpr std::uint8_t unknown_id = 200;
Message unknown_message();
/// Ping with a payload that makes the Pong reply span at least 264 bytes.
Message large_ping(std::size_t payload = 255);

AttackScript passthrough();

// Sequence-number techniques. Injections go right after the KexInit the
// target receives; Unimplemented replies of the target are deleted.
AttackScript rcv_increase(Role target, std::size_t n);
AttackScript rcv_decrease(Role target, std::size_t n, unsigned seq_bits);
AttackScript snd_increase(Role target, std::size_t n, unsigned seq_bits);
AttackScript snd_decrease(Role target, std::size_t n, unsigned seq_bits);

/// n_s Ignore to the client and n_c Ignore to the server before the
/// respective NewKeys, then deletes the first n_s / n_c channel packets.
AttackScript prefix_truncate(std::size_t n_s, std::size_t n_c);

AttackScript extension_downgrade_chacha();
/// Unknown to the client before KexDhReply (its Unimplemented is deleted),
/// Unknown or a large Ping to the server after the server's NewKeys, and the
/// server's ExtInfo deleted.
AttackScript extension_downgrade_cbc_etm(bool use_ping);

AttackScript rogue_extension(const ExtInfo& payload);

/// Strategy 1 deletes the client's first channel message; strategy 2 moves the
/// deficit to the server with an Unknown to the client.
AttackScript rogue_session(const UserAuthRequest& attacker, int strategy, bool client_sends_ext_info = true);

/// Cuts the server-to-client stream after `after` channel packets.
AttackScript suffix_truncate(std::size_t after);

} // namespace sshlab::attacks
