#pragma once

#include "uwaeq/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace uwaeq {

enum class ConstellationKind { Qpsk };

struct OfdmConfig {
    std::size_t n_subcarriers = 512;
    std::size_t cp_len = 128;
    ConstellationKind constellation = ConstellationKind::Qpsk;

    // Throws ParameterError unless N is a power of two and cp_len < N.
    void validate() const;
};

enum class Domain { Time, Frequency };

// A nonempty sample vector tagged with the domain that produced it.
class ComplexSignal {
public:
    ComplexSignal(CVec samples, Domain domain);

    const CVec& samples() const noexcept { return samples_; }
    Domain domain() const noexcept { return domain_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(samples_.size()); }
    cd operator[](std::size_t i) const { return samples_[static_cast<Eigen::Index>(i)]; }

private:
    CVec samples_;
    Domain domain_;
};

// Unit-energy Gray-coded QPSK. Index i (0-based) corresponds to c_{i+1}:
// c1 = (1+j)/sqrt2, c2 = (-1+j)/sqrt2, c3 = (-1-j)/sqrt2, c4 = (1-j)/sqrt2,
// carrying the bit pairs 00, 01, 11, 10.
struct Constellation {
    static constexpr std::size_t kSize = 4;

    std::array<cd, kSize> points;
    std::array<std::array<std::uint8_t, 2>, kSize> bits;

    static const Constellation& qpsk();

    // Nearest point by Euclidean distance; ties go to the lowest index.
    std::size_t nearest(cd x) const;
    // Index of an exact point (within tol); throws ParameterError otherwise.
    std::size_t index_of(cd x, double tol = 1e-9) const;
    // Largest |Re| or |Im| over all points.
    double max_coordinate() const;
};

ComplexSignal qpsk_modulate(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> qpsk_demodulate_hard(const ComplexSignal& symbols);

// s = (1/N) * inverse DFT of S.
ComplexSignal ifft_tx(const ComplexSignal& freq, const OfdmConfig& cfg);
// Unscaled forward DFT; exact inverse of ifft_tx.
ComplexSignal fft_rx(const ComplexSignal& time, const OfdmConfig& cfg);

ComplexSignal add_cp(const ComplexSignal& s, const OfdmConfig& cfg);
ComplexSignal remove_cp(const ComplexSignal& y, const OfdmConfig& cfg);

// Magnitude saturation at `threshold`, phase preserved.
ComplexSignal clip(const ComplexSignal& c, double threshold);
double rms(const CVec& x);

// Real decomposition: vector -> [Re; Im], matrix -> [[Re, -Im], [Im, Re]].
RVec to_stacked_real(const CVec& x);
RMat to_stacked_real(const CMat& h);
CVec from_stacked_real(const RVec& x);
CMat from_stacked_real(const RMat& h);

// Rows are per-symbol distributions over the 4 constellation points.
RMat one_hot_encode(const ComplexSignal& symbols);
ComplexSignal one_hot_demap_hard(const RMat& q);
// Expectation sum_i q_i c_i.
ComplexSignal one_hot_demap_soft(const RMat& q);

// Fraction of positions whose nearest constellation points differ.
double ser(const ComplexSignal& est, const ComplexSignal& truth);
std::size_t symbol_errors(const CVec& est, const CVec& truth);

// Nearest-point slicing of every entry.
CVec hard_slice(const CVec& x);

}  // namespace uwaeq
