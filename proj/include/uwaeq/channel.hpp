#pragma once

#include "uwaeq/signal.hpp"

#include <filesystem>
#include <utility>
#include <vector>

namespace uwaeq {

// Time-varying impulse response h(n, l): rows are time samples, columns taps.
class Cir {
public:
    explicit Cir(CMat taps);

    const CMat& taps() const noexcept { return taps_; }
    std::size_t sample_count() const noexcept { return static_cast<std::size_t>(taps_.rows()); }
    std::size_t tap_count() const noexcept { return static_cast<std::size_t>(taps_.cols()); }
    cd operator()(std::size_t n, std::size_t l) const {
        return taps_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    }

    // Samples [offset, offset + length) as a new response.
    Cir window(std::size_t offset, std::size_t length) const;

    bool operator==(const Cir& other) const { return taps_ == other.taps_; }

private:
    CMat taps_;
};

class FreqChannelMatrix {
public:
    explicit FreqChannelMatrix(CMat h);

    const CMat& h_freq() const noexcept { return h_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(h_.rows()); }
    // [[Re, -Im], [Im, Re]], derived on request (4x the memory of h_freq).
    RMat stacked() const;

private:
    CMat h_;
};

struct CsiError {
    double sigma = 0.0;
};

struct SynthCirParams {
    std::size_t tap_count = 8;
    double delay_power_decay_db = 1.0;  // per tap
    double doppler_spread = 0.0;        // cycles per sample
    std::uint64_t seed = 0;

    static constexpr std::size_t kSinusoidsPerTap = 8;
    void validate() const;
};

struct SlidingPlan {
    std::size_t n = 0;
    std::size_t block_size = 0;
    std::size_t block_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> boundaries;  // [begin, end)
};

// y(n) = sum_l h(n, l) s_cp(n - l), noise excluded.
ComplexSignal apply_channel(const ComplexSignal& s_cp, const Cir& cir, const OfdmConfig& cfg);

// M with remove_cp(apply_channel(add_cp(s))) == M s.
CMat time_matrix(const Cir& cir, const OfdmConfig& cfg);
// H = F M F^-1, so that Y = H S for the whole OFDM chain.
FreqChannelMatrix freq_matrix(const Cir& cir, const OfdmConfig& cfg);

Cir quasi_static_collapse(const Cir& cir);
Cir perturb_csi(const Cir& cir, CsiError err, Rng& rng);

SlidingPlan make_sliding_plan(std::size_t n, std::size_t block_size);
std::vector<CMat> extract_blocks(const FreqChannelMatrix& h, const SlidingPlan& plan);
std::vector<CVec> split_vector(const CVec& v, const SlidingPlan& plan);
CVec join_vector(const std::vector<CVec>& parts, const SlidingPlan& plan);
// Frobenius energy of H outside the diagonal blocks.
double discarded_energy(const FreqChannelMatrix& h, const SlidingPlan& plan);

// Energy fractions of H by distance from the diagonal (circular distance).
struct BandStats {
    double total_energy = 0.0;
    double diagonal_fraction = 0.0;
    std::vector<std::pair<std::size_t, double>> band_fraction;  // half-width -> fraction within band
    double in_block_fraction = 0.0;
};
BandStats band_statistics(const FreqChannelMatrix& h, std::size_t block_size);

Cir synth_cir(const SynthCirParams& params, std::size_t n_samples, Rng& rng);

// UCIR1 binary, or the n,l,re,im text form when the extension is .csv.
Cir load_cir(const std::filesystem::path& path);
void save_cir(const Cir& cir, const std::filesystem::path& path);

}  // namespace uwaeq
