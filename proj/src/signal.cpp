#include "uwaeq/signal.hpp"

#include "uwaeq/fft.hpp"

#include <cmath>
#include <limits>

namespace uwaeq {

void OfdmConfig::validate() const {
    if (n_subcarriers == 0 || (n_subcarriers & (n_subcarriers - 1)) != 0)
        throw ParameterError("n_subcarriers must be a power of two, got " + std::to_string(n_subcarriers));
    if (cp_len >= n_subcarriers)
        throw ParameterError("cp_len (" + std::to_string(cp_len) + ") must be smaller than n_subcarriers (" +
                             std::to_string(n_subcarriers) + ")");
}

ComplexSignal::ComplexSignal(CVec samples, Domain domain) : samples_(std::move(samples)), domain_(domain) {
    if (samples_.size() == 0) throw DimensionError("ComplexSignal must not be empty");
}

const Constellation& Constellation::qpsk() {
    static const Constellation c = [] {
        const double a = 1.0 / std::sqrt(2.0);
        Constellation k;
        k.points = {cd(a, a), cd(-a, a), cd(-a, -a), cd(a, -a)};
        k.bits = {{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
        return k;
    }();
    return c;
}

std::size_t Constellation::nearest(cd x) const {
    std::size_t best = 0;
    double best_d = std::norm(x - points[0]);
    for (std::size_t i = 1; i < kSize; ++i) {
        const double d = std::norm(x - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::size_t Constellation::index_of(cd x, double tol) const {
    for (std::size_t i = 0; i < kSize; ++i)
        if (std::abs(x - points[i]) <= tol) return i;
    throw ParameterError("value (" + std::to_string(x.real()) + ", " + std::to_string(x.imag()) +
                         ") is not a constellation point");
}

double Constellation::max_coordinate() const {
    double m = 0.0;
    for (auto p : points) m = std::max({m, std::abs(p.real()), std::abs(p.imag())});
    return m;
}

ComplexSignal qpsk_modulate(std::span<const std::uint8_t> bits) {
    if (bits.empty() || bits.size() % 2 != 0)
        throw DimensionError("qpsk_modulate needs a nonzero even bit count, got " + std::to_string(bits.size()));
    const auto& c = Constellation::qpsk();
    CVec out(static_cast<Eigen::Index>(bits.size() / 2));
    for (std::size_t k = 0; k < bits.size() / 2; ++k) {
        const std::uint8_t b0 = bits[2 * k] & 1u;
        const std::uint8_t b1 = bits[2 * k + 1] & 1u;
        std::size_t idx = 0;
        for (; idx < Constellation::kSize; ++idx)
            if (c.bits[idx][0] == b0 && c.bits[idx][1] == b1) break;
        out[static_cast<Eigen::Index>(k)] = c.points[idx];
    }
    return {std::move(out), Domain::Frequency};
}

std::vector<std::uint8_t> qpsk_demodulate_hard(const ComplexSignal& symbols) {
    const auto& c = Constellation::qpsk();
    std::vector<std::uint8_t> bits;
    bits.reserve(2 * symbols.size());
    for (Eigen::Index k = 0; k < symbols.samples().size(); ++k) {
        const auto idx = c.nearest(symbols.samples()[k]);
        bits.push_back(c.bits[idx][0]);
        bits.push_back(c.bits[idx][1]);
    }
    return bits;
}

namespace {

void require_length(const ComplexSignal& x, std::size_t expected, const char* what) {
    if (x.size() != expected)
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) + ", got " +
                             std::to_string(x.size()));
}

}  // namespace

ComplexSignal ifft_tx(const ComplexSignal& freq, const OfdmConfig& cfg) {
    require_length(freq, cfg.n_subcarriers, "ifft_tx");
    CVec s = fft::backward(freq.samples());
    s /= static_cast<double>(cfg.n_subcarriers);
    return {std::move(s), Domain::Time};
}

ComplexSignal fft_rx(const ComplexSignal& time, const OfdmConfig& cfg) {
    require_length(time, cfg.n_subcarriers, "fft_rx");
    return {fft::forward(time.samples()), Domain::Frequency};
}

ComplexSignal add_cp(const ComplexSignal& s, const OfdmConfig& cfg) {
    require_length(s, cfg.n_subcarriers, "add_cp");
    const auto n = static_cast<Eigen::Index>(cfg.n_subcarriers);
    const auto cp = static_cast<Eigen::Index>(cfg.cp_len);
    CVec out(n + cp);
    out.head(cp) = s.samples().tail(cp);
    out.tail(n) = s.samples();
    return {std::move(out), Domain::Time};
}

ComplexSignal remove_cp(const ComplexSignal& y, const OfdmConfig& cfg) {
    require_length(y, cfg.n_subcarriers + cfg.cp_len, "remove_cp");
    return {y.samples().tail(static_cast<Eigen::Index>(cfg.n_subcarriers)), Domain::Time};
}

ComplexSignal clip(const ComplexSignal& c, double threshold) {
    if (!(threshold > 0.0)) throw ParameterError("clipping threshold must be positive");
    // polar() can land a few ulp above the threshold; the slack keeps clip idempotent
    const double limit = threshold * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
    CVec out = c.samples();
    for (auto& v : out) {
        const double mag = std::abs(v);
        if (mag > limit) v = std::polar(threshold, std::arg(v));
    }
    return {std::move(out), c.domain()};
}

double rms(const CVec& x) {
    if (x.size() == 0) return 0.0;
    return std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
}

RVec to_stacked_real(const CVec& x) {
    const auto n = x.size();
    RVec out(2 * n);
    out.head(n) = x.real();
    out.tail(n) = x.imag();
    return out;
}

RMat to_stacked_real(const CMat& h) {
    const auto r = h.rows();
    const auto c = h.cols();
    RMat out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = h.real();
    out.topRightCorner(r, c) = -h.imag();
    out.bottomLeftCorner(r, c) = h.imag();
    out.bottomRightCorner(r, c) = h.real();
    return out;
}

CVec from_stacked_real(const RVec& x) {
    if (x.size() % 2 != 0) throw DimensionError("from_stacked_real: odd-length vector");
    const auto n = x.size() / 2;
    CVec out(n);
    out.real() = x.head(n);
    out.imag() = x.tail(n);
    return out;
}

CMat from_stacked_real(const RMat& h) {
    if (h.rows() % 2 != 0 || h.cols() % 2 != 0) throw DimensionError("from_stacked_real: odd matrix dimension");
    const auto r = h.rows() / 2;
    const auto c = h.cols() / 2;
    CMat out(r, c);
    out.real() = h.topLeftCorner(r, c);
    out.imag() = h.bottomLeftCorner(r, c);
    return out;
}

RMat one_hot_encode(const ComplexSignal& symbols) {
    const auto& c = Constellation::qpsk();
    RMat q = RMat::Zero(symbols.samples().size(), Constellation::kSize);
    for (Eigen::Index k = 0; k < q.rows(); ++k)
        q(k, static_cast<Eigen::Index>(c.index_of(symbols.samples()[k]))) = 1.0;
    return q;
}

namespace {

void require_stochastic(const RMat& q) {
    if (q.rows() == 0 || q.cols() != static_cast<Eigen::Index>(Constellation::kSize))
        throw DimensionError("probability matrix must be N x 4");
    for (Eigen::Index k = 0; k < q.rows(); ++k) {
        if ((q.row(k).array() < 0.0).any() || std::abs(q.row(k).sum() - 1.0) > 1e-6)
            throw ParameterError("row " + std::to_string(k) + " is not a probability distribution");
    }
}

}  // namespace

ComplexSignal one_hot_demap_hard(const RMat& q) {
    require_stochastic(q);
    const auto& c = Constellation::qpsk();
    CVec out(q.rows());
    for (Eigen::Index k = 0; k < q.rows(); ++k) {
        Eigen::Index idx = 0;
        q.row(k).maxCoeff(&idx);  // first maximum on ties
        out[k] = c.points[static_cast<std::size_t>(idx)];
    }
    return {std::move(out), Domain::Frequency};
}

ComplexSignal one_hot_demap_soft(const RMat& q) {
    require_stochastic(q);
    const auto& c = Constellation::qpsk();
    CVec out = CVec::Zero(q.rows());
    for (Eigen::Index k = 0; k < q.rows(); ++k)
        for (std::size_t i = 0; i < Constellation::kSize; ++i)
            out[k] += q(k, static_cast<Eigen::Index>(i)) * c.points[i];
    return {std::move(out), Domain::Frequency};
}

std::size_t symbol_errors(const CVec& est, const CVec& truth) {
    if (est.size() != truth.size())
        throw DimensionError("symbol_errors: length mismatch " + std::to_string(est.size()) + " vs " +
                             std::to_string(truth.size()));
    const auto& c = Constellation::qpsk();
    std::size_t errors = 0;
    for (Eigen::Index k = 0; k < est.size(); ++k)
        if (c.nearest(est[k]) != c.nearest(truth[k])) ++errors;
    return errors;
}

double ser(const ComplexSignal& est, const ComplexSignal& truth) {
    return static_cast<double>(symbol_errors(est.samples(), truth.samples())) / static_cast<double>(truth.size());
}

CVec hard_slice(const CVec& x) {
    const auto& c = Constellation::qpsk();
    CVec out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = c.points[c.nearest(x[k])];
    return out;
}

}  // namespace uwaeq
