#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "commlab/script/registry.hpp"

namespace commlab::comm {

/// Signal-chain builtins: text2bitseq ... hist, randbits.
void register_comm(script::BuiltinRegistry& reg);

/// Stop-and-wait skeleton builtins: sw_init, sw_events, sw_send, sw_delivered.
void register_stopwait(script::BuiltinRegistry& reg);

// Hidden workspace names written by the stop-and-wait builtins.
inline constexpr std::string_view kCurSeq = "__cur_seq";
inline constexpr std::string_view kSwSent = "__sw_sent";
inline constexpr std::string_view kSwAcks = "__sw_acks";
inline constexpr std::string_view kSwDelivered = "__sw_delivered";
inline constexpr std::string_view kSwConfig = "__sw_config";  // [N p dmin dmax TO T]
inline constexpr std::string_view kSwSteps = "__sw_steps";

/// Shared immutable registry for a named profile ("core", "comm", "stopwait",
/// "full"); null for an unknown name.
std::shared_ptr<const script::BuiltinRegistry> registry_for_profile(std::string_view profile);

std::vector<std::string> profile_names();

}  // namespace commlab::comm
