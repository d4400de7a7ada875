#include <doctest.h>

#include <bitset>
#include <cmath>
#include <random>
#include <set>

#include "commlab/comm/builtins.hpp"
#include "commlab/comm/signal.hpp"
#include "commlab/comm/stopwait.hpp"
#include "commlab/script/interpreter.hpp"

using namespace commlab;
using namespace commlab::comm;

namespace {

// base-2 conversion through std::bitset, independent of the library code
Bits ascii_oracle(const std::string& s) {
    Bits out;
    for (unsigned char c : s)
        for (char ch : std::bitset<8>(c).to_string()) out.push_back(ch == '1' ? 1.0 : 0.0);
    return out;
}

// straightforward iteration of the channel recursion
std::vector<double> iterate_channel(const std::vector<double>& x, double a, int d) {
    std::vector<double> y;
    double prev = 0;
    for (int n = 1; n <= static_cast<int>(x.size()) + d; ++n) {
        const double in = n - d >= 1 ? x[static_cast<std::size_t>(n - d - 1)] : 0.0;
        prev = a * prev + (1 - a) * in;
        y.push_back(prev);
    }
    return y;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

// taps from the normal equations in long double, solved by Gaussian elimination with pivoting
std::vector<double> ls_oracle(const std::vector<double>& rx, const std::vector<double>& tx, int n) {
    using LD = long double;
    std::vector<std::vector<LD>> M(n, std::vector<LD>(n + 1, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            for (std::size_t k = 0; k < rx.size(); ++k)
                if (static_cast<int>(k) >= i && static_cast<int>(k) >= j)
                    M[i][j] += static_cast<LD>(rx[k - i]) * rx[k - j];
        for (std::size_t k = static_cast<std::size_t>(i); k < rx.size(); ++k) M[i][n] += static_cast<LD>(rx[k - i]) * tx[k];
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(static_cast<double>(M[r][c])) > std::fabs(static_cast<double>(M[piv][c]))) piv = r;
        std::swap(M[c], M[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const LD f = M[r][c] / M[c][c];
            for (int k = c; k <= n; ++k) M[r][k] -= f * M[c][k];
        }
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = static_cast<double>(M[i][n] / M[i][i]);
    return w;
}

}  // namespace

TEST_CASE("text2bitseq") {
    CHECK(text2bitseq("").empty());
    CHECK(text2bitseq("F") == Bits{0, 1, 0, 0, 0, 1, 1, 0});
    CHECK(text2bitseq("F") == ascii_oracle("F"));
    auto bs = text2bitseq("Finished!");
    CHECK(bs.size() == 72);
    CHECK(Bits(bs.begin(), bs.begin() + 8) == ascii_oracle("F"));
    CHECK(bs == ascii_oracle("Finished!"));
    CHECK_THROWS_AS(text2bitseq("caf\xc3\xa9"), CommError);
}

TEST_CASE("bitseq2text") {
    CHECK(bitseq2text({}).empty());
    CHECK(bitseq2text(text2bitseq("Hello!")) == "Hello!");
    CHECK_THROWS_AS(bitseq2text(Bits(9, 0.0)), CommError);
    CHECK_THROWS_AS(bitseq2text(Bits{0, 1, 2, 0, 0, 0, 0, 0}), CommError);
}

TEST_CASE("bitseq2waveform") {
    CHECK(bitseq2waveform({1, 0, 1}, 2) == Samples{1, 1, 0, 0, 1, 1});
    CHECK(bitseq2waveform(text2bitseq("Finished!"), 20).size() == 1440);
    CHECK(bitseq2waveform({1}, 10) == Samples(10, 1.0));
    CHECK_THROWS_AS(bitseq2waveform({1}, 0), CommError);
    CHECK_THROWS_AS(bitseq2waveform({0.5}, 2), CommError);
}

TEST_CASE("channel") {
    Samples x{0.3, 1, 0, 0.7};
    CHECK(channel_transmit(x, {0, 0, 0}, nullptr) == x);

    Samples step(30, 1.0);
    auto y = channel_transmit(step, {0.5, 0, 0}, nullptr);
    auto it = iterate_channel(step, 0.5, 0);
    for (std::size_t n = 1; n <= step.size(); ++n) {
        CHECK(y[n - 1] == doctest::Approx(1 - std::pow(0.5, static_cast<double>(n))).epsilon(1e-15));
        CHECK(y[n - 1] == it[n - 1]);
    }
    CHECK(channel_transmit({1, 0}, {0, 3, 0}, nullptr) == Samples{0, 0, 0, 1, 0});
    CHECK_THROWS_AS(channel_transmit(x, {1.0, 0, 0}, nullptr), CommError);
    CHECK_THROWS_AS(channel_transmit(x, {0.5, -1, 0}, nullptr), CommError);
}

TEST_CASE("channel noise is additive with the requested spread") {
    Rng rng(11);
    Samples x(200000, 0.0);
    auto y = channel_transmit(x, {0.5, 0, 0.1}, &rng);
    double s = 0, s2 = 0;
    for (double v : y) s += v, s2 += v * v;
    const double n = static_cast<double>(y.size());
    CHECK(std::fabs(s / n) < 0.001);
    CHECK(std::sqrt(s2 / n) == doctest::Approx(0.1).epsilon(0.01));
}

TEST_CASE("step response") {
    CHECK(channel_step_response({0, 0, 0}, 4) == Samples{1, 1, 1, 1});
    CHECK(channel_step_response({0.5, 0, 0}, 3) == iterate_channel(Samples(3, 1.0), 0.5, 0));
    CHECK(channel_step_response({0.5, 0, 0}, 3) == Samples{0.5, 0.75, 0.875});
    CHECK(channel_step_response({0, 2, 0}, 3) == Samples{0, 0, 1, 1, 1});
    CHECK(channel_step_response({0.5, 0, 0.3}, 3) == Samples{0.5, 0.75, 0.875});
    CHECK_THROWS_AS(channel_step_response({0, 0, 0}, 0), CommError);
}

TEST_CASE("waveform2bitseq") {
    CHECK(waveform2bitseq(Samples(40, 0.5), 20, 0.5, 0) == Bits{1, 1});
    CHECK(waveform2bitseq(Samples{1, 0, 0, 1, 1, 0}, 2) == Bits{1, 0, 1});
    CHECK(waveform2bitseq(Samples{9, 9, 9, 1, 0, 1, 0}, 2, 0.5, 3) == Bits{1, 1});
    CHECK_THROWS_AS(waveform2bitseq(Samples{1}, 2), CommError);
    CHECK_THROWS_AS(waveform2bitseq(Samples{1, 1}, 0), CommError);

    std::mt19937_64 g(5);
    for (int trial = 0; trial < 50; ++trial) {
        Bits b(1 + g() % 60);
        for (auto& v : b) v = static_cast<double>(g() % 2);
        // end to end through a noiseless a = 0.5 channel at the default SPB
        auto rx = channel_transmit(bitseq2waveform(b, 20), {0.5, 0, 0}, nullptr);
        CHECK(waveform2bitseq(rx, 20, 0.5, 0) == b);
    }
}

TEST_CASE("ber") {
    Bits x{1, 0, 1, 1};
    CHECK(ber(x, x) == 0);
    CHECK(ber({1, 0, 1, 1}, {1, 1, 1, 0}) == 0.5);
    CHECK(ber({1, 1, 1, 0}, {1, 0, 1, 1}) == 0.5);
    CHECK_THROWS_AS(ber({1}, {1, 0}), CommError);
    CHECK_THROWS_AS(ber({}, {}), CommError);
}

TEST_CASE("repetition code") {
    CHECK(repetition_encode({1, 0}, 3) == Bits{1, 1, 1, 0, 0, 0});
    CHECK(repetition_decode({1, 1, 0}, 3) == Bits{1});
    CHECK_THROWS_AS(repetition_encode({1}, 2), CommError);
    CHECK_THROWS_AS(repetition_decode({1, 1}, 3), CommError);
}

TEST_CASE("parity code") {
    CHECK(parity_encode({1, 0, 1}, 3) == Bits{1, 0, 1, 0});
    auto enc = parity_encode({1, 0, 1, 1, 1, 1}, 3);
    auto r = parity_check(enc, 3);
    CHECK(r.data == Bits{1, 0, 1, 1, 1, 1});
    CHECK(r.flags == Bits{0, 0});
    enc[5] = 1 - enc[5];
    CHECK(parity_check(enc, 3).flags == Bits{0, 1});
    CHECK_THROWS_AS(parity_encode({1, 0}, 3), CommError);
    CHECK_THROWS_AS(parity_check({1, 0, 1}, 3), CommError);
}

TEST_CASE("eye diagram") {
    auto f = eye_diagram(Samples(80, 0.0), 20);
    REQUIRE(f.curves.size() == 2);
    CHECK(f.curves[0].y.size() == 40);
    CHECK(f.curves[0].x.front() == 1);
    CHECK(f.curves[0].x.back() == 40);
    CHECK(eye_diagram(Samples(40, 0.0), 20).curves.size() == 1);
    CHECK(eye_diagram(Samples(79, 0.0), 20).curves.size() == 1);
    CHECK_THROWS_AS(eye_diagram(Samples(39, 0.0), 20), CommError);

    // alternating bits: every 2*SPB window is the same "10" pattern
    Bits alt;
    for (int i = 0; i < 10; ++i) alt.push_back(i % 2 == 0);
    auto w = bitseq2waveform(alt, 5);
    auto eye = eye_diagram(w, 5);
    REQUIRE(eye.curves.size() == 5);
    Samples expected(10, 0.0);
    for (int i = 0; i < 5; ++i) expected[static_cast<std::size_t>(i)] = 1;
    for (auto& c : eye.curves) CHECK(c.y == expected);
}

TEST_CASE("equalizer basics") {
    Samples t{0.3, 1, 0.2, 0.9, 0.4};
    auto w = equalizer_design(t, t, 1);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == doctest::Approx(1).epsilon(1e-14));
    Samples r2;
    for (double v : t) r2.push_back(2 * v);
    CHECK(equalizer_design(r2, t, 1)[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(equalizer_design(Samples(10, 0.0), Samples(10, 1.0), 2), CommError);
    CHECK_THROWS_AS(equalizer_design(t, Samples{1}, 1), CommError);
    CHECK(equalize({1, 2, 3}, {1, -1}) == Samples{1, 1, 1});
}

TEST_CASE("equalizer matches the normal-equation oracle and is locally optimal") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        auto bits = random_bits(60, rng);
        auto tx = bitseq2waveform(bits, 4);
        auto rx = channel_transmit(tx, {0.7, 0, 0.02}, &rng);
        rx.resize(tx.size());
        auto taps = equalizer_design(rx, tx, 8);
        auto oracle = ls_oracle(rx, tx, 8);
        for (std::size_t j = 0; j < taps.size(); ++j) CHECK(taps[j] == doctest::Approx(oracle[j]).epsilon(1e-8));

        const double best = mse(equalize(rx, taps), tx);
        for (std::size_t j = 0; j < taps.size(); ++j)
            for (double h : {1e-6, -1e-6}) {
                auto p = taps;
                p[j] += h;
                CHECK(mse(equalize(rx, p), tx) >= best);
            }
    }
}

TEST_CASE("equalization recovers bits the raw receiver gets wrong") {
    Rng rng(8);
    auto bits = random_bits(400, rng);
    for (auto [a, spb] : {std::pair{0.6, 1LL}, std::pair{0.9, 4LL}}) {
        auto tx = bitseq2waveform(bits, spb);
        auto rx = channel_transmit(tx, {a, 0, 0}, nullptr);
        rx.resize(tx.size());
        CHECK(ber(bits, waveform2bitseq(rx, spb)) > 0.05);
        auto taps = equalizer_design(rx, tx, 8);
        CHECK(waveform2bitseq(equalize(rx, taps), spb) == bits);
    }
}

TEST_CASE("noise and histogram") {
    Rng rng(1);
    CHECK(noise(5, 0, rng) == Samples(5, 0.0));
    Rng r2(2024);
    auto n = noise(100000, 1, r2);
    double m = 0;
    for (double v : n) m += v;
    m /= static_cast<double>(n.size());
    double var = 0;
    for (double v : n) var += (v - m) * (v - m);
    var /= static_cast<double>(n.size() - 1);
    CHECK(var >= 0.98);
    CHECK(var <= 1.02);

    auto h = histogram({1, 1, 2}, 2);
    CHECK(h.counts == std::vector<double>{2, 1});
    CHECK(h.centers == std::vector<double>{1.25, 1.75});
    auto flat = histogram({3, 3}, 1);
    CHECK(flat.counts == std::vector<double>{2});
    CHECK(flat.centers == std::vector<double>{3});
}

TEST_CASE("property: noiseless channel is linear") {
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> u(0, 1);
    const double eps = std::ldexp(1.0, -52);
    for (int trial = 0; trial < 200; ++trial) {
        ChannelModel ch{u(g) * 0.95, static_cast<long long>(g() % 5), 0};
        Samples x(1 + g() % 200), y(x.size()), s(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(g);
            y[i] = u(g);
            s[i] = x[i] + y[i];
        }
        auto cx = channel_transmit(x, ch, nullptr), cy = channel_transmit(y, ch, nullptr),
             cs = channel_transmit(s, ch, nullptr);
        for (std::size_t i = 0; i < cs.size(); ++i)
            REQUIRE(std::fabs(cs[i] - (cx[i] + cy[i])) <= 4 * eps * std::max(1.0, std::fabs(cs[i])));
    }
}

TEST_CASE("stop-and-wait: lossless link") {
    Rng rng(1);
    NetConfig cfg{0, 1, 1, 5, 50};
    auto tr = stopwait_simulate(3, cfg, [](const SenderView& v) { return correct_sender(v, 3); }, rng);
    CHECK(tr.sent.size() == 3);
    CHECK(tr.delivered == std::vector<long long>{1, 2, 3});
    CHECK(tr.steps == 50);
}

TEST_CASE("stop-and-wait: a timeout shorter than the round trip forces a resend") {
    Rng rng(1);
    NetConfig cfg{0, 3, 3, 4, 40};
    auto tr = stopwait_simulate(1, cfg, [](const SenderView& v) { return correct_sender(v, 1); }, rng);
    CHECK(tr.sent.size() == 2);
    CHECK(tr.delivered == std::vector<long long>{1});
}

TEST_CASE("stop-and-wait: total loss and a sender that never resends") {
    Rng rng(1);
    NetConfig cfg{1, 1, 2, 5, 40};
    auto tr = stopwait_simulate(3, cfg, [](const SenderView& v) { return v.ack_arrived && v.cur_seq <= 3; }, rng);
    CHECK(tr.sent.size() == 1);
    CHECK(tr.delivered.empty());
}

TEST_CASE("stop-and-wait: lossy link with a correct sender") {
    Rng rng(20240601);
    NetConfig cfg{0.2, 1, 3, 8, 600};
    auto tr = stopwait_simulate(10, cfg, [](const SenderView& v) { return correct_sender(v, 10); }, rng);
    std::vector<long long> all{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(tr.delivered == all);
    CHECK(tr.sent.size() > 10);  // some retransmissions happened
}

TEST_CASE("property: p = 0 and a correct sender send exactly N packets") {
    std::mt19937_64 g(4);
    for (int trial = 0; trial < 100; ++trial) {
        const long long n = 1 + static_cast<long long>(g() % 20);
        const long long dmin = static_cast<long long>(g() % 4), dmax = dmin + static_cast<long long>(g() % 4);
        // the round trip (two one-way delays of at least one step) must fit inside the timeout
        const long long rtt = 2 * std::max<long long>(1, dmax);
        NetConfig cfg{0, dmin, dmax, rtt + 1 + static_cast<long long>(g() % 5), 1000};
        Rng rng(g());
        auto tr = stopwait_simulate(n, cfg, [n](const SenderView& v) { return correct_sender(v, n); }, rng);
        CHECK(static_cast<long long>(tr.sent.size()) == n);
        std::set<long long> unique(tr.delivered.begin(), tr.delivered.end());
        CHECK(unique.size() == tr.delivered.size());
        CHECK(static_cast<long long>(tr.delivered.size()) == n);
    }
}

TEST_CASE("property: trace invariants under loss and arbitrary senders") {
    std::mt19937_64 g(12);
    for (int trial = 0; trial < 100; ++trial) {
        const long long n = 1 + static_cast<long long>(g() % 8);
        NetConfig cfg{0.3, 0, 3, 6, 200};
        Rng rng(g());
        std::mt19937_64 coin(g());
        auto tr = stopwait_simulate(n, cfg, [&](const SenderView&) { return coin() % 3 == 0; }, rng);
        for (std::size_t i = 1; i < tr.sent.size(); ++i) CHECK(tr.sent[i - 1].first <= tr.sent[i].first);
        for (std::size_t i = 1; i < tr.acks.size(); ++i) CHECK(tr.acks[i - 1].first <= tr.acks[i].first);
        for (auto& [t, s] : tr.sent) CHECK((s >= 1 && s <= n));
        for (auto& [t, s] : tr.acks) CHECK((s >= 1 && s <= n));
        for (std::size_t i = 0; i < tr.delivered.size(); ++i) CHECK(tr.delivered[i] == static_cast<long long>(i + 1));
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate(NetConfig{1.5, 1, 2, 5, 10}), CommError);
    CHECK_THROWS_AS(validate(NetConfig{0.1, 3, 2, 5, 10}), CommError);
    CHECK_THROWS_AS(validate(NetConfig{0.1, 1, 5, 5, 10}), CommError);
    CHECK_THROWS_AS(validate(NetConfig{0.1, 1, 2, 5, 4}), CommError);
}

TEST_CASE("builtins through the interpreter") {
    auto reg = registry_for_profile("full");
    REQUIRE(reg);
    CHECK_FALSE(registry_for_profile("nope"));
    for (const char* name : {"text2bitseq", "bitseq2text", "bitseq2waveform", "waveform2bitseq", "channel",
                             "step_response", "ber", "rep_encode", "rep_decode", "parity_encode", "parity_check",
                             "eye_diagram", "eq_design", "eq_apply", "noise", "hist", "plot", "figure", "double",
                             "char", "xor", "zeros", "ones", "length", "floor", "mod"})
        CHECK_MESSAGE(reg->contains(name), name);
    CHECK_FALSE(registry_for_profile("core")->contains("text2bitseq"));

    script::ExecLimits lim;
    lim.seed = 5;
    auto o = script::run_source(R"(bs = text2bitseq('Hi');
w = bitseq2waveform(bs, 4);
rx = channel(w, 0, 0, 0);
back = bitseq2text(waveform2bitseq(rx, 4));
[d, f] = parity_check(parity_encode([1 0 1 1 0 0 1 0]));
c = hist([1 1 2], 2);
eye_diagram(w, 4);
bad = 1;
)", *reg, lim);
    REQUIRE(o.ok());
    CHECK(o.workspace.find("back")->string() == "Hi");
    CHECK(o.workspace.find("f")->number() == 0);
    CHECK(o.workspace.find("c")->to_doubles() == std::vector<double>{2, 1});
    REQUIRE(o.figures.size() == 2);
    CHECK(o.figures[1].curves.size() == 8);

    auto err = script::run_source("x = bitseq2text([1 0 1]);", *reg, lim);
    REQUIRE(err.status == script::ExecStatus::ScriptError);
    CHECK(err.error->message.find("bitseq2text") != std::string::npos);
    CHECK(err.error->pos.known());
}

TEST_CASE("stop-and-wait builtins") {
    auto reg = registry_for_profile("stopwait");
    script::ExecLimits lim;
    lim.seed = 77;
    auto o = script::run_source(R"(N = 4;
sw_init(N, 0, 1, 1, 5, 60);
for t = 1:60
    [ack_arrived, timer_expired] = sw_events();
    do_send = (ack_arrived || timer_expired) && __cur_seq <= N;
    sw_send(do_send);
end
delivered = sw_delivered();
)", *reg, lim);
    REQUIRE(o.ok());
    CHECK(o.workspace.find("delivered")->to_doubles() == std::vector<double>{1, 2, 3, 4});
    CHECK(o.workspace.find("__sw_sent")->list().size() == 4);
    CHECK(o.workspace.find("__sw_steps")->number() == 60);
    CHECK(o.workspace.find("__cur_seq")->number() == 5);

    auto over = script::run_source("sw_init(1, 0, 1, 1, 5, 10);\nfor t = 1:11\n [a, b] = sw_events();\n sw_send(0);\nend",
                                   *reg, lim);
    CHECK(over.status == script::ExecStatus::ScriptError);
    auto twice = script::run_source("sw_init(1, 0, 1, 1, 5, 10);\n[a, b] = sw_events();\nsw_send(1);\nsw_send(1);",
                                    *reg, lim);
    CHECK(twice.status == script::ExecStatus::ScriptError);
    auto noinit = script::run_source("[a, b] = sw_events();", *reg, lim);
    CHECK(noinit.status == script::ExecStatus::ScriptError);
}
