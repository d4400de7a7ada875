#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "commlab/comm/signal.hpp"
#include "commlab/rng.hpp"

namespace commlab::comm {

struct NetConfig {
    double p = 0.2;          // loss probability, data and ACK independently
    long long dmin = 1;      // delay bounds, time steps
    long long dmax = 3;
    long long timeout = 8;
    long long horizon = 600;  // T

    friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Throws CommError unless 0 <= p <= 1 and 0 <= dmin <= dmax < timeout <= horizon.
void validate(const NetConfig& cfg);

struct ProtocolTrace {
    long long packets = 0;                               // N
    std::vector<std::pair<long long, long long>> sent;   // (time step, seq)
    std::vector<std::pair<long long, long long>> acks;   // (time step, seq) arrivals at the sender
    std::vector<long long> delivered;                    // in-order deliveries at the receiver
    long long steps = 0;                                 // time steps actually simulated
};

/// What the sender sees at the start of a time step.
struct SenderView {
    long long t = 0;
    long long cur_seq = 1;  // lowest unacknowledged sequence number, N+1 once all are acknowledged
    bool ack_arrived = false;
    bool timer_expired = false;
};

/// Discrete-time stop-and-wait link, driven one step at a time.
///
/// Each step: data packets arriving now reach the receiver, which delivers
/// in-order packets and ACKs every arrival (duplicates are re-ACKed, not
/// re-delivered); ACKs arriving now reach the sender; an ACK for cur_seq
/// advances cur_seq and stops the timer; otherwise the one-shot timer expires
/// TO steps after the last send. The sender then decides whether to send
/// cur_seq, which restarts the timer. A virtual ACK at t = 1 asks for packet 1.
/// Every transmission is lost with probability p or arrives after an integer
/// delay drawn uniformly from [dmin, dmax] (at least one step).
class StopWaitSim {
public:
    StopWaitSim(long long packets, NetConfig cfg, Rng& rng);

    bool finished() const { return t_ >= cfg_.horizon && !in_step_; }
    bool in_step() const { return in_step_; }

    /// Advances to the next time step and reports the sender's events.
    SenderView begin_step();
    /// Completes the current step. A send after every packet is acknowledged
    /// is logged (as packet N) but nothing is transmitted.
    void end_step(bool do_send);

    const ProtocolTrace& trace() const { return trace_; }
    const NetConfig& config() const { return cfg_; }
    long long cur_seq() const { return cur_seq_; }

private:
    struct InFlight {
        long long arrival;
        long long seq;
    };
    void transmit(std::vector<InFlight>& link, long long seq);

    long long n_;
    NetConfig cfg_;
    Rng& rng_;
    ProtocolTrace trace_;
    long long t_ = 0;
    bool in_step_ = false;
    long long cur_seq_ = 1;
    long long expected_ = 1;  // receiver
    std::optional<long long> timer_deadline_;
    std::vector<InFlight> data_, acks_;
};

using SenderHook = std::function<bool(const SenderView&)>;

/// Runs all T steps with `sender` deciding each step's send.
ProtocolTrace stopwait_simulate(long long packets, const NetConfig& cfg, const SenderHook& sender, Rng& rng);

/// The textbook sender: send on a fresh ACK while packets remain, resend on timeout.
bool correct_sender(const SenderView& v, long long packets);

}  // namespace commlab::comm
