#include "uwaeq/channel.hpp"

#include "uwaeq/fft.hpp"

#include <cmath>
#include <numbers>

namespace uwaeq {

Cir::Cir(CMat taps) : taps_(std::move(taps)) {
    if (taps_.rows() == 0) throw DimensionError("CIR must have at least one time sample");
    if (taps_.cols() == 0) throw DimensionError("CIR must have at least one tap (L >= 1)");
    if (!taps_.allFinite()) throw ParameterError("CIR contains non-finite values");
}

Cir Cir::window(std::size_t offset, std::size_t length) const {
    if (offset + length > sample_count())
        throw DimensionError("CIR window [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                             ") exceeds " + std::to_string(sample_count()) + " samples");
    return Cir(taps_.middleRows(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(length)));
}

FreqChannelMatrix::FreqChannelMatrix(CMat h) : h_(std::move(h)) {
    if (h_.rows() != h_.cols() || h_.rows() == 0) throw DimensionError("frequency channel matrix must be square");
}

RMat FreqChannelMatrix::stacked() const { return to_stacked_real(h_); }

void SynthCirParams::validate() const {
    if (tap_count < 1) throw ParameterError("tap_count must be >= 1");
    if (!(doppler_spread >= 0.0)) throw ParameterError("doppler_spread must be >= 0");
    if (!(delay_power_decay_db >= 0.0)) throw ParameterError("delay_power_decay_db must be >= 0");
}

namespace {

void check_channel_fits(const Cir& cir, const OfdmConfig& cfg) {
    cfg.validate();
    if (cfg.cp_len + 1 < cir.tap_count())
        throw ParameterError("cyclic prefix of " + std::to_string(cfg.cp_len) + " samples is shorter than the " +
                             std::to_string(cir.tap_count() - 1) + "-sample channel delay spread");
    const std::size_t needed = cfg.n_subcarriers + cfg.cp_len;
    if (cir.sample_count() < needed)
        throw DimensionError("CIR covers " + std::to_string(cir.sample_count()) + " samples, OFDM symbol needs " +
                             std::to_string(needed));
}

}  // namespace

ComplexSignal apply_channel(const ComplexSignal& s_cp, const Cir& cir, const OfdmConfig& cfg) {
    check_channel_fits(cir, cfg);
    const std::size_t len = cfg.n_subcarriers + cfg.cp_len;
    if (s_cp.size() != len)
        throw DimensionError("apply_channel: expected " + std::to_string(len) + " samples, got " +
                             std::to_string(s_cp.size()));
    const auto& s = s_cp.samples();
    CVec y = CVec::Zero(static_cast<Eigen::Index>(len));
    const std::size_t taps = cir.tap_count();
    for (std::size_t n = 0; n < len; ++n) {
        cd acc = 0.0;
        for (std::size_t l = 0; l < taps && l <= n; ++l) acc += cir(n, l) * s[static_cast<Eigen::Index>(n - l)];
        y[static_cast<Eigen::Index>(n)] = acc;
    }
    return {std::move(y), Domain::Time};
}

CMat time_matrix(const Cir& cir, const OfdmConfig& cfg) {
    check_channel_fits(cir, cfg);
    const std::size_t n_sc = cfg.n_subcarriers;
    CMat m = CMat::Zero(static_cast<Eigen::Index>(n_sc), static_cast<Eigen::Index>(n_sc));
    for (std::size_t n = 0; n < n_sc; ++n)
        for (std::size_t l = 0; l < cir.tap_count(); ++l) {
            const std::size_t col = (n + n_sc - l) % n_sc;
            m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(col)) += cir(n + cfg.cp_len, l);
        }
    return m;
}

FreqChannelMatrix freq_matrix(const Cir& cir, const OfdmConfig& cfg) {
    const CMat m = time_matrix(cir, cfg);
    const std::size_t n = cfg.n_subcarriers;
    const auto ni = static_cast<Eigen::Index>(n);
    const double inv_n = 1.0 / static_cast<double>(n);

    // A = M F^-1; F^-1 is symmetric, so each row of A is F^-1 applied to a row of M.
    CMat mt = m.transpose();
    CVec tmp(ni);
    for (Eigen::Index c = 0; c < ni; ++c) {
        fft::backward(mt.col(c).data(), tmp.data(), n);
        mt.col(c) = tmp * inv_n;
    }
    CMat h = mt.transpose();
    for (Eigen::Index c = 0; c < ni; ++c) {
        fft::forward(h.col(c).data(), tmp.data(), n);
        h.col(c) = tmp;
    }
    return FreqChannelMatrix(std::move(h));
}

Cir quasi_static_collapse(const Cir& cir) {
    const Eigen::RowVectorXcd mean = cir.taps().colwise().mean();
    return Cir(mean.replicate(cir.taps().rows(), 1));
}

Cir perturb_csi(const Cir& cir, CsiError err, Rng& rng) {
    if (!(err.sigma >= 0.0)) throw ParameterError("CSI error sigma must be >= 0");
    if (err.sigma == 0.0) return cir;
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMat taps = cir.taps();
    for (Eigen::Index l = 0; l < taps.cols(); ++l)
        for (Eigen::Index n = 0; n < taps.rows(); ++n) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            taps(n, l) += err.sigma * cd(re, im);
        }
    return Cir(std::move(taps));
}

SlidingPlan make_sliding_plan(std::size_t n, std::size_t block_size) {
    if (n == 0 || block_size == 0) throw ParameterError("sliding plan needs positive sizes");
    if (n % block_size != 0)
        throw ParameterError("block size " + std::to_string(block_size) + " does not divide " + std::to_string(n));
    SlidingPlan plan;
    plan.n = n;
    plan.block_size = block_size;
    plan.block_count = n / block_size;
    for (std::size_t j = 0; j < plan.block_count; ++j)
        plan.boundaries.emplace_back(j * block_size, (j + 1) * block_size);
    return plan;
}

namespace {

void check_plan(std::size_t n, const SlidingPlan& plan) {
    if (plan.n != n || plan.block_size * plan.block_count != n || plan.boundaries.size() != plan.block_count)
        throw DimensionError("sliding plan for N=" + std::to_string(plan.n) + " does not fit length " +
                             std::to_string(n));
}

}  // namespace

std::vector<CMat> extract_blocks(const FreqChannelMatrix& h, const SlidingPlan& plan) {
    check_plan(h.size(), plan);
    std::vector<CMat> blocks;
    blocks.reserve(plan.block_count);
    const auto b = static_cast<Eigen::Index>(plan.block_size);
    for (auto [begin, end] : plan.boundaries) {
        const auto s = static_cast<Eigen::Index>(begin);
        blocks.emplace_back(h.h_freq().block(s, s, b, b));
    }
    return blocks;
}

std::vector<CVec> split_vector(const CVec& v, const SlidingPlan& plan) {
    check_plan(static_cast<std::size_t>(v.size()), plan);
    std::vector<CVec> parts;
    parts.reserve(plan.block_count);
    for (auto [begin, end] : plan.boundaries)
        parts.emplace_back(v.segment(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)));
    return parts;
}

CVec join_vector(const std::vector<CVec>& parts, const SlidingPlan& plan) {
    if (parts.size() != plan.block_count)
        throw DimensionError("join_vector: expected " + std::to_string(plan.block_count) + " parts, got " +
                             std::to_string(parts.size()));
    CVec out(static_cast<Eigen::Index>(plan.n));
    for (std::size_t j = 0; j < parts.size(); ++j) {
        const auto [begin, end] = plan.boundaries[j];
        if (static_cast<std::size_t>(parts[j].size()) != end - begin)
            throw DimensionError("join_vector: part " + std::to_string(j) + " has wrong length");
        out.segment(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) = parts[j];
    }
    return out;
}

double discarded_energy(const FreqChannelMatrix& h, const SlidingPlan& plan) {
    double kept = 0.0;
    for (const auto& b : extract_blocks(h, plan)) kept += b.squaredNorm();
    return h.h_freq().squaredNorm() - kept;
}

BandStats band_statistics(const FreqChannelMatrix& h, std::size_t block_size) {
    const std::size_t n = h.size();
    const auto& m = h.h_freq();
    std::vector<double> by_distance(n / 2 + 1, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t d = (r + n - c) % n;
            by_distance[std::min(d, n - d)] +=
                std::norm(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
    BandStats stats;
    stats.total_energy = m.squaredNorm();
    const double total = stats.total_energy > 0.0 ? stats.total_energy : 1.0;
    stats.diagonal_fraction = by_distance[0] / total;
    double cum = 0.0;
    std::size_t next = 1;
    for (std::size_t w = 0; w < by_distance.size(); ++w) {
        cum += by_distance[w];
        if (w == next) {
            stats.band_fraction.emplace_back(w, cum / total);
            next *= 2;
        }
    }
    if (block_size > 0 && n % block_size == 0)
        stats.in_block_fraction = 1.0 - discarded_energy(h, make_sliding_plan(n, block_size)) / total;
    return stats;
}

Cir synth_cir(const SynthCirParams& params, std::size_t n_samples, Rng& rng) {
    params.validate();
    if (n_samples == 0) throw ParameterError("synth_cir needs at least one sample");
    const std::size_t taps = params.tap_count;
    const std::size_t k_sin = SynthCirParams::kSinusoidsPerTap;

    std::vector<double> power(taps);
    double total = 0.0;
    for (std::size_t l = 0; l < taps; ++l) {
        power[l] = std::pow(10.0, -params.delay_power_decay_db * static_cast<double>(l) / 10.0);
        total += power[l];
    }

    std::uniform_real_distribution<double> freq(-params.doppler_spread, params.doppler_spread);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    CMat h = CMat::Zero(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(taps));
    for (std::size_t l = 0; l < taps; ++l) {
        const double amp = std::sqrt(power[l] / total / static_cast<double>(k_sin));
        for (std::size_t k = 0; k < k_sin; ++k) {
            const double f = params.doppler_spread > 0.0 ? freq(rng) : 0.0;
            const double phi = phase(rng);
            for (std::size_t n = 0; n < n_samples; ++n)
                h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)) +=
                    std::polar(amp, 2.0 * std::numbers::pi * f * static_cast<double>(n) + phi);
        }
    }
    return Cir(std::move(h));
}

}  // namespace uwaeq
