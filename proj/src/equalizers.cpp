#include "uwaeq/equalizers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace uwaeq {
namespace {

void check_square(const CVec& y, const CMat& h, const char* what) {
    if (h.rows() != h.cols() || h.rows() != y.size() || y.size() == 0)
        throw DimensionError(std::string(what) + ": need square H matching Y, got " + std::to_string(h.rows()) + "x" +
                             std::to_string(h.cols()) + " and " + std::to_string(y.size()));
}

CMat gram(const CMat& h, double noise_var) {
    CMat g = h.adjoint() * h;
    g.diagonal().array() += noise_var;
    return g;
}

// rcond() alone misses exactly singular inputs (it can report 1 with a zero
// pivot), so the pivot spread of U is checked as well.
void check_conditioning(const Eigen::PartialPivLU<CMat>& lu, std::size_t block_index) {
    const RVec pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double spread = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
    const double rc = std::min(lu.rcond(), spread);
    if (!(rc * kSingularConditionLimit >= 1.0))
        throw SingularChannelError(block_index, rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
}

}  // namespace

CVec zf(const CVec& y, const CMat& h, std::size_t block_index) {
    check_square(y, h, "zf");
    Eigen::PartialPivLU<CMat> lu(h);
    check_conditioning(lu, block_index);
    return lu.solve(y);
}

CVec mmse(const CVec& y, const CMat& h, double noise_var, std::size_t block_index) {
    check_square(y, h, "mmse");
    if (!(noise_var >= 0.0)) throw ParameterError("mmse: noise variance must be >= 0");
    if (noise_var == 0.0) return zf(y, h, block_index);
    Eigen::LDLT<CMat> ldlt(gram(h, noise_var));
    return ldlt.solve(h.adjoint() * y);
}

CVec dfe(const CVec& y, const CMat& h, double noise_var, std::size_t block_index) {
    check_square(y, h, "dfe");
    if (!(noise_var >= 0.0)) throw ParameterError("dfe: noise variance must be >= 0");
    if (noise_var == 0.0) check_conditioning(Eigen::PartialPivLU<CMat>(h), block_index);
    const auto b = h.cols();
    const auto& constellation = Constellation::qpsk();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(b));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const RVec norms = h.colwise().squaredNorm().transpose();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto c) { return norms[a] > norms[c]; });

    CVec residual = y;
    CVec decided(b);
    for (std::size_t step = 0; step < order.size(); ++step) {
        const auto remaining = static_cast<Eigen::Index>(order.size() - step);
        CMat sub(h.rows(), remaining);
        for (Eigen::Index c = 0; c < remaining; ++c) sub.col(c) = h.col(order[step + static_cast<std::size_t>(c)]);
        cd estimate;
        if (noise_var > 0.0) {
            Eigen::LDLT<CMat> ldlt(gram(sub, noise_var));
            estimate = ldlt.solve(sub.adjoint() * residual)[0];
        } else {
            estimate = sub.colPivHouseholderQr().solve(residual)[0];
        }
        const auto col = order[step];
        const cd symbol = constellation.points[constellation.nearest(estimate)];
        decided[col] = symbol;
        residual -= h.col(col) * symbol;
    }
    return decided;
}

CVec ml_bruteforce(const CVec& y, const CMat& h, const Constellation& constellation) {
    check_square(y, h, "ml_bruteforce");
    const auto b = static_cast<std::size_t>(h.cols());
    if (b > kMaxMlBlock)
        throw ParameterError("ml_bruteforce: block size " + std::to_string(b) + " exceeds the limit of " +
                             std::to_string(kMaxMlBlock) + " (4^B candidates)");
    const std::size_t q = Constellation::kSize;

    // Depth-first, lexicographic order; partial[d] = y - sum_{i<d} h_i c_{idx_i}.
    std::vector<CVec> partial(b + 1, CVec(y.size()));
    partial[0] = y;
    std::vector<std::size_t> idx(b, 0), best(b, 0);
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t depth = 0;
    while (true) {
        if (depth == b) {
            const double cost = partial[b].squaredNorm();
            if (cost < best_cost) {
                best_cost = cost;
                best = idx;
            }
            // backtrack to the deepest digit that can still advance
            while (depth > 0 && idx[depth - 1] + 1 == q) {
                idx[depth - 1] = 0;
                --depth;
            }
            if (depth == 0) break;
            ++idx[depth - 1];
            const auto col = static_cast<Eigen::Index>(depth - 1);
            partial[depth] = partial[depth - 1] - h.col(col) * constellation.points[idx[depth - 1]];
            continue;
        }
        const auto col = static_cast<Eigen::Index>(depth);
        partial[depth + 1] = partial[depth] - h.col(col) * constellation.points[idx[depth]];
        ++depth;
    }
    CVec out(static_cast<Eigen::Index>(b));
    for (std::size_t i = 0; i < b; ++i) out[static_cast<Eigen::Index>(i)] = constellation.points[best[i]];
    return out;
}

std::string to_string(EqualizerKind kind) {
    switch (kind) {
        case EqualizerKind::Zf: return "zf";
        case EqualizerKind::Mmse: return "mmse";
        case EqualizerKind::Dfe: return "dfe";
        case EqualizerKind::Ml: return "ml";
    }
    return "?";
}

BlockEqualizer make_block_equalizer(EqualizerSpec spec) {
    switch (spec.kind) {
        case EqualizerKind::Zf:
            return [](const CVec& y, const CMat& h, std::size_t j) { return zf(y, h, j); };
        case EqualizerKind::Mmse:
            return [v = spec.noise_var](const CVec& y, const CMat& h, std::size_t j) { return mmse(y, h, v, j); };
        case EqualizerKind::Dfe:
            return [v = spec.noise_var](const CVec& y, const CMat& h, std::size_t j) { return dfe(y, h, v, j); };
        case EqualizerKind::Ml:
            return [](const CVec& y, const CMat& h, std::size_t) { return ml_bruteforce(y, h); };
    }
    throw ParameterError("unknown equalizer kind");
}

CVec sliding_equalize(const CVec& y, const FreqChannelMatrix& h, const SlidingPlan& plan, const BlockEqualizer& eq) {
    const auto blocks = extract_blocks(h, plan);
    const auto parts = split_vector(y, plan);
    std::vector<CVec> out(parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j) {
        try {
            out[j] = eq(parts[j], blocks[j], j);
        } catch (const SingularChannelError& e) {
            if (e.block_index() == j) throw;
            throw SingularChannelError(j, e.condition());
        }
    }
    return join_vector(out, plan);
}

CVec sliding_equalize(const CVec& y, const FreqChannelMatrix& h, const SlidingPlan& plan, EqualizerSpec spec) {
    return sliding_equalize(y, h, plan, make_block_equalizer(spec));
}

}  // namespace uwaeq
