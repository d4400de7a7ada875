#pragma once

#include <optional>
#include <string>
#include <vector>

#include "commlab/comm/stopwait.hpp"
#include "commlab/script/workspace.hpp"

namespace commlab::grader {

struct Violation {
    int rule = 0;  // 1: missed send after ACK, 2: missed resend after timeout, 3: unwarranted send
    long long t = 0;
    std::string message;
};

struct ProtocolVerdict {
    std::vector<Violation> violations;
    bool complete = false;  // all N packets delivered and all T steps simulated
    std::vector<std::string> problems;  // completeness problems

    bool pass() const { return violations.empty() && complete; }
    /// Violations (capped at `max_listed`) followed by completeness problems
    /// when there are no violations.
    std::string message(std::size_t max_listed = 10) const;
};

/// Replays a sender's log against the three sender rules, recomputing every
/// step's events from the ACK log, and checks completeness.
ProtocolVerdict check_protocol_trace(const comm::ProtocolTrace& trace, const comm::NetConfig& cfg);

struct RecordedRun {
    comm::ProtocolTrace trace;
    comm::NetConfig cfg;
};

/// Reads the hidden stop-and-wait variables; nullopt when sw_init never ran.
std::optional<RecordedRun> read_recorded_run(const script::Workspace& ws);

}  // namespace commlab::grader
