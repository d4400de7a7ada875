#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "commlab/rng.hpp"
#include "commlab/script/workspace.hpp"

namespace commlab::comm {

using Bits = std::vector<double>;      // 0.0 / 1.0
using Samples = std::vector<double>;

/// Bad arguments to a simulation block.
class CommError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Text <-> bits, 8 bits per character, most significant bit first.
Bits text2bitseq(std::string_view msg);
std::string bitseq2text(const Bits& bs);

/// NRZ: every bit is held for `spb` samples at amplitude 0 or 1.
Samples bitseq2waveform(const Bits& bs, long long spb);

/// Mid-bit sampling receiver. Bit k is read at 1-based sample
/// delay + (k-1)*spb + ceil(spb/2) and decided 1 when >= threshold.
Bits waveform2bitseq(const Samples& w, long long spb, double threshold = 0.5, long long delay = 0);

struct ChannelModel {
    double a = 0.5;       // lowpass memory, 0 <= a < 1
    long long delay = 0;  // samples
    double sigma = 0.05;  // noise standard deviation
};

void validate(const ChannelModel& ch);

/// s[n] = a*s[n-1] + (1-a)*x[n-d], then y[n] = s[n] + N(0, sigma^2).
/// Output has len(w) + d samples. `rng` may be null only when sigma == 0.
Samples channel_transmit(const Samples& w, const ChannelModel& ch, Rng* rng);

/// Noiseless response of the channel to n ones.
Samples channel_step_response(const ChannelModel& ch, long long n);

/// Fraction of differing positions.
double ber(const Bits& tx, const Bits& rx);

Bits repetition_encode(const Bits& bs, long long k);
Bits repetition_decode(const Bits& bs, long long k);

/// Appends one even-parity bit after every `blk` data bits.
Bits parity_encode(const Bits& bs, long long blk);

struct ParityResult {
    Bits data;
    Bits flags;  // one per block, 1 when the block's parity fails
};
ParityResult parity_check(const Bits& bs, long long blk);

/// Non-overlapping windows of 2*spb samples, one curve each, x = 1..2*spb.
script::FigureData eye_diagram(const Samples& w, long long spb);

/// Least-squares causal FIR taps mapping rx_training onto tx_training.
std::vector<double> equalizer_design(const Samples& rx_training, const Samples& tx_training, long long ntaps);

/// Causal FIR filtering, output truncated to the input length.
Samples equalize(const Samples& w, const std::vector<double>& taps);

Samples noise(long long n, double sigma, Rng& rng);

struct Histogram {
    std::vector<double> centers;
    std::vector<double> counts;
};

/// Equal-width bins spanning [min(x), max(x)]; the last bin includes max(x).
Histogram histogram(const std::vector<double>& x, long long nbins);

Bits random_bits(long long n, Rng& rng);

}  // namespace commlab::comm
