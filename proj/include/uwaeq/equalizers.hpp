#pragma once

#include "uwaeq/channel.hpp"

#include <functional>
#include <string>

namespace uwaeq {

inline constexpr double kSingularConditionLimit = 1e12;
inline constexpr std::size_t kMaxMlBlock = 8;

// Least-squares solve of H S = Y. Throws SingularChannelError(block_index)
// when the condition estimate exceeds kSingularConditionLimit.
CVec zf(const CVec& y, const CMat& h, std::size_t block_index = 0);

// (H^H H + noise_var I)^-1 H^H Y for unit-energy symbols; noise_var = 0 is zf.
CVec mmse(const CVec& y, const CMat& h, double noise_var, std::size_t block_index = 0);

// Ordered successive interference cancellation: strongest column first, each
// stage an MMSE filter over the undetected columns, hard decisions fed back.
CVec dfe(const CVec& y, const CMat& h, double noise_var, std::size_t block_index = 0);

// Exhaustive search over all 4^B candidate vectors (B <= kMaxMlBlock).
// Ties resolve to the lexicographically smallest index vector.
CVec ml_bruteforce(const CVec& y, const CMat& h, const Constellation& constellation = Constellation::qpsk());

enum class EqualizerKind { Zf, Mmse, Dfe, Ml };

struct EqualizerSpec {
    EqualizerKind kind = EqualizerKind::Mmse;
    double noise_var = 0.0;
};

std::string to_string(EqualizerKind kind);

using BlockEqualizer = std::function<CVec(const CVec& y, const CMat& h, std::size_t block_index)>;

BlockEqualizer make_block_equalizer(EqualizerSpec spec);

// Equalizes each diagonal block of H independently and joins the results.
CVec sliding_equalize(const CVec& y, const FreqChannelMatrix& h, const SlidingPlan& plan, const BlockEqualizer& eq);
CVec sliding_equalize(const CVec& y, const FreqChannelMatrix& h, const SlidingPlan& plan, EqualizerSpec spec);

}  // namespace uwaeq
