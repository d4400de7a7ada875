#include "commlab/comm/stopwait.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "commlab/script/value.hpp"

namespace commlab::comm {

void validate(const NetConfig& cfg) {
    if (!(cfg.p >= 0 && cfg.p <= 1))
        throw CommError("loss probability must be in [0, 1], got " + script::format_number(cfg.p));
    if (cfg.dmin < 0) throw CommError("dmin must be nonnegative");
    if (cfg.dmax < cfg.dmin) throw CommError("dmax must be at least dmin");
    if (cfg.timeout <= cfg.dmax) throw CommError("timeout must exceed dmax");
    if (cfg.horizon < cfg.timeout) throw CommError("horizon T must be at least the timeout");
    if (cfg.horizon > 1'000'000) throw CommError("horizon T is too large");
}

StopWaitSim::StopWaitSim(long long packets, NetConfig cfg, Rng& rng) : n_(packets), cfg_(cfg), rng_(rng) {
    if (packets < 1) throw CommError("the number of packets must be at least 1");
    if (packets > 1'000'000) throw CommError("too many packets");
    validate(cfg_);
    trace_.packets = packets;
}

void StopWaitSim::transmit(std::vector<InFlight>& link, long long seq) {
    // draw both values every time so the stream position does not depend on the loss outcome
    const bool lost = rng_.bernoulli(cfg_.p);
    const long long delay = rng_.uniform_int(cfg_.dmin, cfg_.dmax);
    if (!lost) link.push_back({t_ + std::max<long long>(1, delay), seq});
}

SenderView StopWaitSim::begin_step() {
    if (in_step_) end_step(false);
    if (t_ >= cfg_.horizon) throw CommError("the simulation horizon of " + std::to_string(cfg_.horizon) +
                                            " steps is exhausted");
    ++t_;
    in_step_ = true;
    trace_.steps = t_;
    SenderView v;
    v.t = t_;

    auto due = [this](std::vector<InFlight>& link) {
        std::vector<InFlight> now;
        auto it = std::stable_partition(link.begin(), link.end(), [this](const InFlight& f) { return f.arrival != t_; });
        now.assign(it, link.end());
        link.erase(it, link.end());
        return now;
    };

    for (const auto& pkt : due(data_)) {
        if (pkt.seq == expected_) {
            trace_.delivered.push_back(pkt.seq);
            ++expected_;
        }
        if (pkt.seq < expected_) transmit(acks_, pkt.seq);
    }
    for (const auto& ack : due(acks_)) {
        trace_.acks.emplace_back(t_, ack.seq);
        if (ack.seq == cur_seq_ && cur_seq_ <= n_) {
            v.ack_arrived = true;
            ++cur_seq_;
            timer_deadline_.reset();
        }
    }
    if (t_ == 1) v.ack_arrived = true;
    if (timer_deadline_ && *timer_deadline_ == t_) {
        v.timer_expired = true;
        timer_deadline_.reset();
    }
    v.cur_seq = cur_seq_;
    return v;
}

void StopWaitSim::end_step(bool do_send) {
    if (!in_step_) throw CommError("no time step is in progress");
    in_step_ = false;
    if (!do_send) return;
    trace_.sent.emplace_back(t_, std::min(cur_seq_, n_));
    if (cur_seq_ > n_) return;
    transmit(data_, cur_seq_);
    timer_deadline_ = t_ + cfg_.timeout;
}

ProtocolTrace stopwait_simulate(long long packets, const NetConfig& cfg, const SenderHook& sender, Rng& rng) {
    StopWaitSim sim(packets, cfg, rng);
    while (!sim.finished()) {
        const SenderView v = sim.begin_step();
        sim.end_step(sender(v));
    }
    return sim.trace();
}

bool correct_sender(const SenderView& v, long long packets) {
    return (v.ack_arrived || v.timer_expired) && v.cur_seq <= packets;
}

}  // namespace commlab::comm
