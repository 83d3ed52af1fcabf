#include "uwaeq/link.hpp"

namespace uwaeq {

Transmission random_transmission(const OfdmConfig& cfg, Rng& rng) {
    std::vector<std::uint8_t> bits(2 * cfg.n_subcarriers);
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));
    ComplexSignal freq = qpsk_modulate(bits);
    ComplexSignal time = ifft_tx(freq, cfg);
    const double power = time.samples().squaredNorm() / static_cast<double>(cfg.n_subcarriers);
    return {freq.samples(), add_cp(time, cfg), power};
}

ComplexSignal propagate(const Transmission& tx, const Cir& cir, const OfdmConfig& cfg,
                        std::optional<double> clip_ratio) {
    ComplexSignal rx = apply_channel(tx.tx_cp, cir, cfg);
    if (clip_ratio) {
        if (!(*clip_ratio > 0.0)) throw ParameterError("clipping ratio must be positive");
        rx = clip(rx, *clip_ratio * rms(rx.samples()));
    }
    return rx;
}

ComplexSignal make_noise(std::size_t n, double signal_power, const NoiseSpec& spec, Rng& rng,
                         const NoiseRecording* recording) {
    switch (spec.kind) {
        case NoiseKind::Gaussian: return awgn(n, signal_power, spec.snr_db, rng);
        case NoiseKind::AlphaStable: return alpha_stable_noise(n, signal_power, spec, rng);
        case NoiseKind::File:
            if (recording == nullptr) throw ParameterError("file noise requested without a loaded recording");
            return noise_from_samples(*recording, n, signal_power, spec.snr_db, rng);
    }
    throw ParameterError("unknown noise kind");
}

CVec demodulate(const CVec& rx_cp, const OfdmConfig& cfg) {
    return fft_rx(remove_cp(ComplexSignal(rx_cp, Domain::Time), cfg), cfg).samples();
}

}  // namespace uwaeq
