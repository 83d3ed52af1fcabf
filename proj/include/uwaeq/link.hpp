#pragma once

#include "uwaeq/channel.hpp"
#include "uwaeq/noise.hpp"

#include <optional>

namespace uwaeq {

// One transmitted OFDM symbol.
struct Transmission {
    CVec symbols;           // frequency-domain QPSK symbols S
    ComplexSignal tx_cp;    // time domain with cyclic prefix
    double signal_power;    // mean |s(n)|^2 over the N-sample body
};

Transmission random_transmission(const OfdmConfig& cfg, Rng& rng);

// Channel output before noise; optionally clipped at clip_ratio * RMS.
ComplexSignal propagate(const Transmission& tx, const Cir& cir, const OfdmConfig& cfg,
                        std::optional<double> clip_ratio = std::nullopt);

// Noise of the requested kind for `n` samples at spec.snr_db relative to signal_power.
// `recording` must be provided for NoiseKind::File.
ComplexSignal make_noise(std::size_t n, double signal_power, const NoiseSpec& spec, Rng& rng,
                         const NoiseRecording* recording = nullptr);

// remove_cp followed by fft_rx.
CVec demodulate(const CVec& rx_cp, const OfdmConfig& cfg);

// Frequency-domain noise variance per subcarrier for time-domain noise power p.
inline double freq_noise_var(double time_noise_power, const OfdmConfig& cfg) {
    return time_noise_power * static_cast<double>(cfg.n_subcarriers);
}

}  // namespace uwaeq
