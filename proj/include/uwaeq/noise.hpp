#pragma once

#include "uwaeq/signal.hpp"

#include <filesystem>

namespace uwaeq {

enum class NoiseKind { Gaussian, AlphaStable, File };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Gaussian;
    double snr_db = 25.0;
    double alpha = 1.5;
    double beta = 0.0;
    // AlphaStable: multiplier on the Gaussian-equivalent dispersion implied by the SNR.
    double scale = 1.0;
    std::filesystem::path path;

    void validate() const;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Noise power that puts `signal_power` at `snr_db`.
double noise_power_for(double signal_power, double snr_db);

// Circular complex Gaussian with E|z|^2 = signal_power / 10^(snr_db/10).
ComplexSignal awgn(std::size_t n, double signal_power, double snr_db, Rng& rng);

// Chambers-Mallows-Stuck draws from S(alpha, beta, scale, 0) in the S1
// parameterization (location 0, no tan shift).
// alpha = 2 gives a Gaussian with standard deviation sqrt(2) * scale.
RVec alpha_stable(std::size_t n, double alpha, double beta, double scale, Rng& rng);

// Complex alpha-stable noise (independent real and imaginary parts) whose
// dispersion matches Gaussian noise of the requested SNR; `spec.scale`
// multiplies that dispersion.
ComplexSignal alpha_stable_noise(std::size_t n, double signal_power, const NoiseSpec& spec, Rng& rng);

struct NoiseRecording {
    CVec samples;
    bool is_real = true;
};

// Recorded noise samples: raw little-endian f32 (real) or a two-column re,im .csv.
NoiseRecording load_noise_samples(const std::filesystem::path& path);

// Random contiguous window of a recording, mean removed, scaled to the exact
// target power. Real recordings are lifted to their analytic signal first.
ComplexSignal noise_from_file(const std::filesystem::path& path, std::size_t n, double signal_power,
                              double snr_db, Rng& rng);
ComplexSignal noise_from_samples(const NoiseRecording& recording, std::size_t n, double signal_power, double snr_db,
                                 Rng& rng);

}  // namespace uwaeq
