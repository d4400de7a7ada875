#include "commlab/comm/builtins.hpp"

#include <cmath>
#include <mutex>

#include "commlab/comm/signal.hpp"
#include "commlab/comm/stopwait.hpp"
#include "commlab/script/builtin_util.hpp"
#include "commlab/script/core_builtins.hpp"

namespace commlab::comm {

using script::arg_bits;
using script::arg_count;
using script::arg_scalar;
using script::arg_string;
using script::arg_vector;
using script::BuiltinRegistry;
using script::CallContext;
using script::one;
using script::Value;

namespace {

using Args = std::span<const Value>;
using Out = std::vector<Value>;

Value vec(std::vector<double> v) { return Value::numeric(std::move(v)); }

// product of two counts against the vector cap, without overflow
void check_product(CallContext& ctx, std::size_t a, long long b) {
    if (a != 0 && b > 0 && static_cast<unsigned long long>(b) > (1ull << 40) / a) ctx.check_length(SIZE_MAX);
    ctx.check_length(a * static_cast<std::size_t>(std::max<long long>(b, 0)));
}

ChannelModel channel_args(CallContext& ctx, Args a, std::size_t first) {
    ChannelModel ch;
    if (a.size() > first) ch.a = arg_scalar(ctx, a[first], "a");
    if (a.size() > first + 1) ch.delay = arg_count(ctx, a[first + 1], "delay");
    if (a.size() > first + 2) ch.sigma = arg_scalar(ctx, a[first + 2], "sigma");
    return ch;
}

}  // namespace

void register_comm(BuiltinRegistry& reg) {
    reg.add("text2bitseq", {1, 1, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto& msg = arg_string(ctx, a[0], "message");
        check_product(ctx, msg.size(), 8);
        return one(vec(text2bitseq(msg)));
    });
    reg.add("bitseq2text", {1, 1, 1}, [](CallContext& ctx, Args a) -> Out {
        return one(Value(bitseq2text(arg_vector(ctx, a[0], "bit sequence"))));
    });
    reg.add("bitseq2waveform", {2, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto bs = arg_bits(ctx, a[0], "bit sequence");
        const auto spb = arg_count(ctx, a[1], "SPB", 1);
        check_product(ctx, bs.size(), spb);
        return one(vec(bitseq2waveform(bs, spb)));
    });
    reg.add("waveform2bitseq", {2, 4, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto w = arg_vector(ctx, a[0], "waveform");
        const auto spb = arg_count(ctx, a[1], "SPB", 1);
        const double threshold = a.size() > 2 ? arg_scalar(ctx, a[2], "threshold") : 0.5;
        const long long delay = a.size() > 3 ? arg_count(ctx, a[3], "delay") : 0;
        return one(vec(waveform2bitseq(w, spb, threshold, delay)));
    });
    reg.add("channel", {1, 4, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto w = arg_vector(ctx, a[0], "waveform");
        const auto ch = channel_args(ctx, a, 1);
        check_product(ctx, 1, static_cast<long long>(w.size()) + ch.delay);
        return one(vec(channel_transmit(w, ch, &ctx.rng())));
    });
    reg.add("step_response", {1, 3, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto n = arg_count(ctx, a[0], "length", 1);
        const auto ch = channel_args(ctx, a, 1);
        check_product(ctx, 1, n + ch.delay);
        return one(vec(channel_step_response(ch, n)));
    });
    reg.add("ber", {2, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        return one(Value(ber(arg_bits(ctx, a[0], "first bit sequence"), arg_bits(ctx, a[1], "second bit sequence"))));
    });
    reg.add("rep_encode", {2, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto bs = arg_bits(ctx, a[0], "bit sequence");
        const auto k = arg_count(ctx, a[1], "k", 1);
        check_product(ctx, bs.size(), k);
        return one(vec(repetition_encode(bs, k)));
    });
    reg.add("rep_decode", {2, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        return one(vec(repetition_decode(arg_vector(ctx, a[0], "bit sequence"), arg_count(ctx, a[1], "k", 1))));
    });
    reg.add("parity_encode", {1, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        const long long blk = a.size() > 1 ? arg_count(ctx, a[1], "block size", 1) : 8;
        return one(vec(parity_encode(arg_vector(ctx, a[0], "bit sequence"), blk)));
    });
    reg.add("parity_check", {1, 2, 2}, [](CallContext& ctx, Args a) -> Out {
        const long long blk = a.size() > 1 ? arg_count(ctx, a[1], "block size", 1) : 8;
        auto r = parity_check(arg_vector(ctx, a[0], "bit sequence"), blk);
        return {vec(std::move(r.data)), vec(std::move(r.flags))};
    });
    reg.add("eye_diagram", {2, 2, 0}, [](CallContext& ctx, Args a) -> Out {
        auto fig = eye_diagram(arg_vector(ctx, a[0], "waveform"), arg_count(ctx, a[1], "SPB", 1));
        auto& target = ctx.new_figure();
        target.title = fig.title;
        for (auto& c : fig.curves) ctx.add_curve(std::move(c));
        return {};
    });
    reg.add("eq_design", {3, 3, 1}, [](CallContext& ctx, Args a) -> Out {
        return one(vec(equalizer_design(arg_vector(ctx, a[0], "received training"),
                                        arg_vector(ctx, a[1], "transmitted training"),
                                        arg_count(ctx, a[2], "number of taps", 1))));
    });
    reg.add("eq_apply", {2, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        return one(vec(equalize(arg_vector(ctx, a[0], "waveform"), arg_vector(ctx, a[1], "taps"))));
    });
    reg.add("noise", {2, 2, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto n = arg_count(ctx, a[0], "n", 1);
        check_product(ctx, 1, n);
        return one(vec(noise(n, arg_scalar(ctx, a[1], "sigma"), ctx.rng())));
    });
    reg.add("hist", {2, 2, 2}, [](CallContext& ctx, Args a) -> Out {
        const auto nb = arg_count(ctx, a[1], "number of bins", 1);
        check_product(ctx, 1, nb);
        auto h = histogram(arg_vector(ctx, a[0], "data"), nb);
        script::Curve c{h.centers, h.counts, std::nullopt};
        ctx.add_curve(std::move(c));
        return {vec(std::move(h.counts)), vec(std::move(h.centers))};
    });
    reg.add("randbits", {1, 1, 1}, [](CallContext& ctx, Args a) -> Out {
        const auto n = arg_count(ctx, a[0], "n", 1);
        check_product(ctx, 1, n);
        return one(vec(random_bits(n, ctx.rng())));
    });
}

namespace {

const char* const kSlot = "stopwait";

std::shared_ptr<StopWaitSim> sim_of(CallContext& ctx) {
    auto& slot = ctx.slot(kSlot);
    if (!slot.has_value()) ctx.fail("call sw_init first");
    return std::any_cast<std::shared_ptr<StopWaitSim>>(slot);
}

Value pairs(const std::vector<std::pair<long long, long long>>& log) {
    script::List items;
    items.reserve(log.size());
    for (const auto& [t, seq] : log)
        items.push_back(Value::numeric({static_cast<double>(t), static_cast<double>(seq)}));
    return Value::list(std::move(items));
}

void publish(CallContext& ctx, const StopWaitSim& sim) {
    const auto& tr = sim.trace();
    ctx.set_hidden(std::string(kSwSent), pairs(tr.sent));
    ctx.set_hidden(std::string(kSwAcks), pairs(tr.acks));
    std::vector<double> delivered(tr.delivered.begin(), tr.delivered.end());
    ctx.set_hidden(std::string(kSwDelivered), Value::numeric(std::move(delivered)));
    ctx.set_hidden(std::string(kSwSteps), Value(static_cast<double>(tr.steps)));
    ctx.set_hidden(std::string(kCurSeq), Value(static_cast<double>(sim.cur_seq())));
}

}  // namespace

void register_stopwait(BuiltinRegistry& reg) {
    reg.add("sw_init", {6, 6, 0}, [](CallContext& ctx, Args a) -> Out {
        auto& slot = ctx.slot(kSlot);
        if (slot.has_value()) ctx.fail("the simulation is already initialized");
        const auto n = arg_count(ctx, a[0], "N", 1);
        NetConfig cfg;
        cfg.p = arg_scalar(ctx, a[1], "p");
        cfg.dmin = arg_count(ctx, a[2], "dmin");
        cfg.dmax = arg_count(ctx, a[3], "dmax");
        cfg.timeout = arg_count(ctx, a[4], "TO", 1);
        cfg.horizon = arg_count(ctx, a[5], "T", 1);
        auto sim = std::make_shared<StopWaitSim>(n, cfg, ctx.rng());
        slot = sim;
        ctx.set_hidden(std::string(kSwConfig),
                       Value::numeric({static_cast<double>(n), cfg.p, static_cast<double>(cfg.dmin),
                                       static_cast<double>(cfg.dmax), static_cast<double>(cfg.timeout),
                                       static_cast<double>(cfg.horizon)}));
        publish(ctx, *sim);
        return {};
    });
    reg.add("sw_events", {0, 0, 2}, [](CallContext& ctx, Args) -> Out {
        auto sim = sim_of(ctx);
        if (sim->trace().steps >= sim->config().horizon)
            ctx.fail("all " + std::to_string(sim->config().horizon) + " time steps have been simulated");
        const SenderView v = sim->begin_step();
        publish(ctx, *sim);
        return {Value(v.ack_arrived), Value(v.timer_expired)};
    });
    reg.add("sw_send", {1, 1, 0}, [](CallContext& ctx, Args a) -> Out {
        auto sim = sim_of(ctx);
        if (!sim->in_step()) ctx.fail("call sw_events before sw_send, and sw_send at most once per time step");
        if (a[0].is_list() || a[0].is_string() || a[0].length() != 1) ctx.fail("do_send must be a scalar");
        sim->end_step(a[0].to_doubles()[0] != 0);
        publish(ctx, *sim);
        return {};
    });
    reg.add("sw_delivered", {0, 0, 1}, [](CallContext& ctx, Args) -> Out {
        auto sim = sim_of(ctx);
        if (sim->in_step()) sim->end_step(false);
        publish(ctx, *sim);
        const auto& d = sim->trace().delivered;
        return one(Value::numeric(std::vector<double>(d.begin(), d.end())));
    });
}

std::shared_ptr<const BuiltinRegistry> registry_for_profile(std::string_view profile) {
    static std::once_flag once;
    static std::shared_ptr<const BuiltinRegistry> core, comm, stopwait, full;
    std::call_once(once, [] {
        auto make = [](bool with_comm, bool with_sw) {
            auto r = std::make_shared<BuiltinRegistry>();
            script::register_core(*r);
            if (with_comm) register_comm(*r);
            if (with_sw) register_stopwait(*r);
            return std::shared_ptr<const BuiltinRegistry>(std::move(r));
        };
        core = make(false, false);
        comm = make(true, false);
        stopwait = make(false, true);
        full = make(true, true);
    });
    if (profile == "core") return core;
    if (profile == "comm") return comm;
    if (profile == "stopwait") return stopwait;
    if (profile == "full") return full;
    return nullptr;
}

std::vector<std::string> profile_names() { return {"core", "comm", "stopwait", "full"}; }

}  // namespace commlab::comm
