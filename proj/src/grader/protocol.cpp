#include "commlab/grader/protocol.hpp"

#include <cmath>
#include <map>

#include "commlab/comm/builtins.hpp"

namespace commlab::grader {

namespace {

std::string rule_message(int rule, long long t) {
    const std::string at = "At time step " + std::to_string(t) + ": ";
    switch (rule) {
    case 1: return at + "an ACK for the current packet was received, but the sender did not send the next packet.";
    case 2: return at + "the timeout expired, but the sender did not resend the current packet.";
    default: return at + "the sender sent a packet, but no packet should have been sent.";
    }
}

}  // namespace

std::string ProtocolVerdict::message(std::size_t max_listed) const {
    std::string out;
    for (std::size_t i = 0; i < violations.size() && i < max_listed; ++i) {
        if (!out.empty()) out += '\n';
        out += violations[i].message;
    }
    if (violations.size() > max_listed)
        out += "\n... and " + std::to_string(violations.size() - max_listed) + " more.";
    if (violations.empty())
        for (const auto& p : problems) {
            if (!out.empty()) out += '\n';
            out += p;
        }
    return out;
}

ProtocolVerdict check_protocol_trace(const comm::ProtocolTrace& trace, const comm::NetConfig& cfg) {
    ProtocolVerdict v;
    const long long n = trace.packets;
    std::map<long long, std::vector<long long>> acks_at;
    for (const auto& [t, seq] : trace.acks) acks_at[t].push_back(seq);
    std::map<long long, int> sends_at;
    for (const auto& [t, seq] : trace.sent) ++sends_at[t];

    long long cur = 1;
    long long deadline = -1;
    for (long long t = 1; t <= trace.steps; ++t) {
        bool ack = t == 1;
        if (auto it = acks_at.find(t); it != acks_at.end())
            for (long long seq : it->second)
                if (seq == cur && cur <= n) {
                    ack = true;
                    ++cur;
                    deadline = -1;
                }
        bool expired = false;
        if (deadline == t) {
            expired = true;
            deadline = -1;
        }
        const bool sent = sends_at.contains(t);
        const bool must_send_next = ack && cur <= n;
        if (must_send_next && !sent) v.violations.push_back({1, t, rule_message(1, t)});
        if (expired && !sent && !must_send_next) v.violations.push_back({2, t, rule_message(2, t)});
        if (sent && !must_send_next && !expired) v.violations.push_back({3, t, rule_message(3, t)});
        if (sent && cur <= n) deadline = t + cfg.timeout;
    }

    if (trace.steps < cfg.horizon)
        v.problems.push_back("The simulation ran for only " + std::to_string(trace.steps) + " of " +
                             std::to_string(cfg.horizon) + " time steps.");
    if (static_cast<long long>(trace.delivered.size()) < n)
        v.problems.push_back("Only " + std::to_string(trace.delivered.size()) + " of " + std::to_string(n) +
                             " packets were delivered within " + std::to_string(trace.steps) + " time steps.");
    v.complete = v.problems.empty();
    return v;
}

namespace {

std::optional<std::vector<std::pair<long long, long long>>> read_pairs(const script::Workspace& ws,
                                                                       std::string_view name) {
    const auto* v = ws.find(name);
    if (!v || !v->is_list()) return std::nullopt;
    std::vector<std::pair<long long, long long>> out;
    for (const auto& item : v->list()) {
        if (!item.is_numeric() || item.length() != 2) return std::nullopt;
        const auto d = item.to_doubles();
        out.emplace_back(std::llround(d[0]), std::llround(d[1]));
    }
    return out;
}

}  // namespace

std::optional<RecordedRun> read_recorded_run(const script::Workspace& ws) {
    const auto* cfgv = ws.find(comm::kSwConfig);
    const auto* delivered = ws.find(comm::kSwDelivered);
    const auto* steps = ws.find(comm::kSwSteps);
    if (!cfgv || !delivered || !steps || !cfgv->is_numeric() || cfgv->length() != 6) return std::nullopt;
    auto sent = read_pairs(ws, comm::kSwSent);
    auto acks = read_pairs(ws, comm::kSwAcks);
    if (!sent || !acks) return std::nullopt;
    const auto c = cfgv->to_doubles();
    RecordedRun run;
    run.trace.packets = std::llround(c[0]);
    run.cfg.p = c[1];
    run.cfg.dmin = std::llround(c[2]);
    run.cfg.dmax = std::llround(c[3]);
    run.cfg.timeout = std::llround(c[4]);
    run.cfg.horizon = std::llround(c[5]);
    run.trace.sent = std::move(*sent);
    run.trace.acks = std::move(*acks);
    for (double d : delivered->to_doubles()) run.trace.delivered.push_back(std::llround(d));
    run.trace.steps = std::llround(steps->scalar("steps"));
    return run;
}

}  // namespace commlab::grader
