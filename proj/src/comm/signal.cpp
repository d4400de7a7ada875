#include "commlab/comm/signal.hpp"

#include <algorithm>
#include <cmath>

#include "commlab/script/value.hpp"

namespace commlab::comm {

using script::format_number;

namespace {

void check_bits(const Bits& bs, const char* what) {
    for (std::size_t i = 0; i < bs.size(); ++i)
        if (bs[i] != 0 && bs[i] != 1)
            throw CommError(std::string(what) + " must contain only 0 and 1; element " + std::to_string(i + 1) +
                            " is " + format_number(bs[i]));
}

void check_positive(long long v, const char* what) {
    if (v < 1) throw CommError(std::string(what) + " must be at least 1, got " + std::to_string(v));
}

constexpr long long kHugeLength = 1'000'000'000;

}  // namespace

Bits text2bitseq(std::string_view msg) {
    Bits out;
    out.reserve(msg.size() * 8);
    for (std::size_t k = 0; k < msg.size(); ++k) {
        const auto code = static_cast<unsigned char>(msg[k]);
        if (code > 127)
            throw CommError("character " + std::to_string(k + 1) + " is not ASCII (code " + std::to_string(code) +
                            ")");
        for (int b = 7; b >= 0; --b) out.push_back((code >> b) & 1 ? 1.0 : 0.0);
    }
    return out;
}

std::string bitseq2text(const Bits& bs) {
    if (bs.size() % 8 != 0)
        throw CommError("bit sequence length " + std::to_string(bs.size()) + " is not a multiple of 8");
    check_bits(bs, "bit sequence");
    std::string out;
    out.reserve(bs.size() / 8);
    for (std::size_t i = 0; i < bs.size(); i += 8) {
        unsigned code = 0;
        for (std::size_t b = 0; b < 8; ++b) code = code * 2 + static_cast<unsigned>(bs[i + b]);
        out += static_cast<char>(code);
    }
    return out;
}

Samples bitseq2waveform(const Bits& bs, long long spb) {
    check_positive(spb, "SPB");
    check_bits(bs, "bit sequence");
    if (!bs.empty() && spb > kHugeLength / static_cast<long long>(bs.size()))
        throw CommError("waveform would be too long");
    Samples out;
    out.reserve(bs.size() * static_cast<std::size_t>(spb));
    for (double b : bs) out.insert(out.end(), static_cast<std::size_t>(spb), b);
    return out;
}

Bits waveform2bitseq(const Samples& w, long long spb, double threshold, long long delay) {
    check_positive(spb, "SPB");
    if (delay < 0) throw CommError("delay must be nonnegative, got " + std::to_string(delay));
    const auto len = static_cast<long long>(w.size());
    if (len < delay + spb)
        throw CommError("waveform of " + std::to_string(len) + " samples is shorter than delay + SPB = " +
                        std::to_string(delay + spb));
    const long long nbits = (len - delay) / spb;
    const long long mid = (spb + 1) / 2;  // ceil(spb/2)
    Bits out(static_cast<std::size_t>(nbits));
    for (long long k = 1; k <= nbits; ++k) {
        const long long i = delay + (k - 1) * spb + mid;  // 1-based
        out[static_cast<std::size_t>(k - 1)] = w[static_cast<std::size_t>(i - 1)] >= threshold ? 1.0 : 0.0;
    }
    return out;
}

void validate(const ChannelModel& ch) {
    if (!(ch.a >= 0 && ch.a < 1)) throw CommError("channel coefficient a must be in [0, 1), got " + format_number(ch.a));
    if (ch.delay < 0) throw CommError("channel delay must be nonnegative, got " + std::to_string(ch.delay));
    if (ch.delay > kHugeLength) throw CommError("channel delay is too large");
    if (!(ch.sigma >= 0) || !std::isfinite(ch.sigma))
        throw CommError("noise sigma must be nonnegative, got " + format_number(ch.sigma));
}

Samples channel_transmit(const Samples& w, const ChannelModel& ch, Rng* rng) {
    validate(ch);
    const std::size_t d = static_cast<std::size_t>(ch.delay);
    Samples y(w.size() + d);
    double s = 0;
    for (std::size_t n = 0; n < y.size(); ++n) {
        const double x = n >= d ? w[n - d] : 0.0;
        s = ch.a * s + (1 - ch.a) * x;
        y[n] = s;
    }
    if (ch.sigma > 0) {
        if (!rng) throw CommError("a noisy channel needs a random stream");
        for (auto& v : y) v += ch.sigma * rng->gaussian();
    }
    return y;
}

Samples channel_step_response(const ChannelModel& ch, long long n) {
    check_positive(n, "length");
    if (n > kHugeLength) throw CommError("length is too large");
    ChannelModel quiet = ch;
    quiet.sigma = 0;
    return channel_transmit(Samples(static_cast<std::size_t>(n), 1.0), quiet, nullptr);
}

double ber(const Bits& tx, const Bits& rx) {
    if (tx.empty() || rx.empty()) throw CommError("bit sequences must not be empty");
    if (tx.size() != rx.size())
        throw CommError("bit sequences differ in length (" + std::to_string(tx.size()) + " vs " +
                        std::to_string(rx.size()) + ")");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errors += (tx[i] != 0) != (rx[i] != 0);
    return static_cast<double>(errors) / static_cast<double>(tx.size());
}

Bits repetition_encode(const Bits& bs, long long k) {
    check_positive(k, "k");
    if (k % 2 == 0) throw CommError("k must be odd, got " + std::to_string(k));
    check_bits(bs, "bit sequence");
    if (!bs.empty() && k > kHugeLength / static_cast<long long>(bs.size())) throw CommError("code would be too long");
    Bits out;
    out.reserve(bs.size() * static_cast<std::size_t>(k));
    for (double b : bs) out.insert(out.end(), static_cast<std::size_t>(k), b);
    return out;
}

Bits repetition_decode(const Bits& bs, long long k) {
    check_positive(k, "k");
    if (k % 2 == 0) throw CommError("k must be odd, got " + std::to_string(k));
    check_bits(bs, "bit sequence");
    const auto uk = static_cast<std::size_t>(k);
    if (bs.size() % uk != 0)
        throw CommError("length " + std::to_string(bs.size()) + " is not a multiple of k = " + std::to_string(k));
    Bits out;
    out.reserve(bs.size() / uk);
    for (std::size_t i = 0; i < bs.size(); i += uk) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < uk; ++j) ones += bs[i + j] != 0;
        out.push_back(2 * ones > uk ? 1.0 : 0.0);
    }
    return out;
}

Bits parity_encode(const Bits& bs, long long blk) {
    check_positive(blk, "block size");
    check_bits(bs, "bit sequence");
    const auto ub = static_cast<std::size_t>(blk);
    if (bs.size() % ub != 0)
        throw CommError("length " + std::to_string(bs.size()) + " is not a multiple of the block size " +
                        std::to_string(blk));
    Bits out;
    out.reserve(bs.size() + bs.size() / ub);
    for (std::size_t i = 0; i < bs.size(); i += ub) {
        int parity = 0;
        for (std::size_t j = 0; j < ub; ++j) {
            out.push_back(bs[i + j]);
            parity ^= static_cast<int>(bs[i + j]);
        }
        out.push_back(parity);
    }
    return out;
}

ParityResult parity_check(const Bits& bs, long long blk) {
    check_positive(blk, "block size");
    check_bits(bs, "bit sequence");
    const auto ub = static_cast<std::size_t>(blk) + 1;
    if (bs.size() % ub != 0)
        throw CommError("length " + std::to_string(bs.size()) + " is not a multiple of block size + 1 = " +
                        std::to_string(ub));
    ParityResult r;
    for (std::size_t i = 0; i < bs.size(); i += ub) {
        int parity = 0;
        for (std::size_t j = 0; j < ub; ++j) {
            parity ^= static_cast<int>(bs[i + j]);
            if (j + 1 < ub) r.data.push_back(bs[i + j]);
        }
        r.flags.push_back(parity);
    }
    return r;
}

script::FigureData eye_diagram(const Samples& w, long long spb) {
    check_positive(spb, "SPB");
    if (spb > kHugeLength) throw CommError("SPB is too large");
    const auto win = static_cast<std::size_t>(2 * spb);
    if (w.size() < win)
        throw CommError("waveform of " + std::to_string(w.size()) + " samples is shorter than 2*SPB = " +
                        std::to_string(win));
    script::FigureData fig;
    fig.title = "Eye diagram";
    std::vector<double> x(win);
    for (std::size_t i = 0; i < win; ++i) x[i] = static_cast<double>(i + 1);
    for (std::size_t start = 0; start + win <= w.size(); start += win) {
        script::Curve c;
        c.x = x;
        c.y.assign(w.begin() + static_cast<std::ptrdiff_t>(start), w.begin() + static_cast<std::ptrdiff_t>(start + win));
        fig.curves.push_back(std::move(c));
    }
    return fig;
}

std::vector<double> equalizer_design(const Samples& rx, const Samples& tx, long long ntaps) {
    check_positive(ntaps, "number of taps");
    if (rx.size() != tx.size())
        throw CommError("training sequences differ in length (" + std::to_string(rx.size()) + " vs " +
                        std::to_string(tx.size()) + ")");
    if (static_cast<long long>(rx.size()) < ntaps)
        throw CommError("training sequence of " + std::to_string(rx.size()) + " samples is shorter than " +
                        std::to_string(ntaps) + " taps");
    const std::size_t m = rx.size(), n = static_cast<std::size_t>(ntaps);
    // A(i, j) = rx[i - j]; column-major so Householder works on contiguous columns
    std::vector<double> A(m * n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < m; ++i) A[j * m + i] = rx[i - j];
    std::vector<double> b = tx;

    double scale = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double* col = &A[j * m];
        double norm = 0;
        for (std::size_t i = j; i < m; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        scale = std::max(scale, norm);
        if (norm == 0) throw CommError("ill-conditioned training: the training data do not excite all taps");
        const double alpha = col[j] > 0 ? -norm : norm;
        std::vector<double> v(col + j, col + m);
        v[0] -= alpha;
        double vv = 0;
        for (double t : v) vv += t * t;
        if (vv > 0) {
            for (std::size_t k = j; k < n; ++k) {
                double* ck = &A[k * m];
                double dot = 0;
                for (std::size_t i = j; i < m; ++i) dot += v[i - j] * ck[i];
                const double f = 2 * dot / vv;
                for (std::size_t i = j; i < m; ++i) ck[i] -= f * v[i - j];
            }
            double dot = 0;
            for (std::size_t i = j; i < m; ++i) dot += v[i - j] * b[i];
            const double f = 2 * dot / vv;
            for (std::size_t i = j; i < m; ++i) b[i] -= f * v[i - j];
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        if (std::fabs(A[j * m + j]) <= 1e-10 * scale)
            throw CommError("ill-conditioned training: the least-squares system is singular");
    std::vector<double> taps(n);
    for (std::size_t jj = n; jj-- > 0;) {
        double s = b[jj];
        for (std::size_t k = jj + 1; k < n; ++k) s -= A[k * m + jj] * taps[k];
        taps[jj] = s / A[jj * m + jj];
    }
    return taps;
}

Samples equalize(const Samples& w, const std::vector<double>& taps) {
    if (taps.empty()) throw CommError("at least one tap is required");
    Samples out(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < taps.size() && j <= i; ++j) s += taps[j] * w[i - j];
        out[i] = s;
    }
    return out;
}

Samples noise(long long n, double sigma, Rng& rng) {
    check_positive(n, "n");
    if (n > kHugeLength) throw CommError("n is too large");
    if (!(sigma >= 0) || !std::isfinite(sigma)) throw CommError("sigma must be nonnegative, got " + format_number(sigma));
    Samples out(static_cast<std::size_t>(n));
    for (auto& v : out) v = sigma == 0 ? 0.0 : sigma * rng.gaussian();
    return out;
}

Histogram histogram(const std::vector<double>& x, long long nbins) {
    check_positive(nbins, "number of bins");
    if (nbins > kHugeLength) throw CommError("too many bins");
    if (x.empty()) throw CommError("cannot take the histogram of an empty vector");
    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const auto nb = static_cast<std::size_t>(nbins);
    const double width = (hi - lo) / static_cast<double>(nb);
    Histogram h;
    h.counts.assign(nb, 0.0);
    h.centers.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) h.centers[k] = lo + (static_cast<double>(k) + 0.5) * width;
    for (double v : x) {
        auto k = static_cast<std::size_t>(std::floor((v - lo) / width));
        if (k >= nb) k = nb - 1;
        h.counts[k] += 1;
    }
    return h;
}

Bits random_bits(long long n, Rng& rng) {
    if (n < 0) throw CommError("n must be nonnegative");
    if (n > kHugeLength) throw CommError("n is too large");
    Bits out(static_cast<std::size_t>(n));
    for (auto& b : out) b = rng.uniform() < 0.5 ? 0.0 : 1.0;
    return out;
}

}  // namespace commlab::comm
