#include "oracles.hpp"
#include "uwaeq/equalizers.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace uwaeq;

namespace {

// Enumerates index vectors as base-4 counters, first entry most significant,
// so the first minimum found is the lexicographically smallest.
CVec ml_enumerate(const CVec& y, const CMat& h) {
    const auto& c = Constellation::qpsk();
    const auto b = static_cast<std::size_t>(h.cols());
    std::size_t total = 1;
    for (std::size_t i = 0; i < b; ++i) total *= 4;
    double best = std::numeric_limits<double>::infinity();
    CVec best_s;
    for (std::size_t code = 0; code < total; ++code) {
        CVec s(static_cast<Eigen::Index>(b));
        std::size_t rest = code;
        for (std::size_t i = b; i-- > 0;) {
            s[static_cast<Eigen::Index>(i)] = c.points[rest % 4];
            rest /= 4;
        }
        const double cost = (y - h * s).squaredNorm();
        if (cost < best) {
            best = cost;
            best_s = s;
        }
    }
    return best_s;
}

CMat block_diagonal(const std::vector<CMat>& blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    CMat h = CMat::Zero(n, n);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        h.block(at, at, b.rows(), b.cols()) = b;
        at += b.rows();
    }
    return h;
}

}  // namespace

TEST(Zf, ExactInverseWithoutNoise) {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 50; ++t) {
        const CMat h = oracle::random_cmat(16, 16, rng);
        const CVec s = oracle::random_qpsk(16, rng);
        EXPECT_LT((zf(h * s, h) - s).norm(), 1e-9);
    }
}

TEST(Zf, SingularBlockReported) {
    CMat h = CMat::Identity(4, 4);
    h.col(2).setZero();
    try {
        zf(CVec::Ones(4), h, 7);
        FAIL() << "expected SingularChannelError";
    } catch (const SingularChannelError& e) {
        EXPECT_EQ(e.block_index(), 7u);
    }

    std::mt19937_64 rng(52);
    const FreqChannelMatrix full(block_diagonal({oracle::random_cmat(4, 4, rng), h, oracle::random_cmat(4, 4, rng)}));
    try {
        sliding_equalize(CVec::Ones(12), full, make_sliding_plan(12, 4), EqualizerSpec{EqualizerKind::Zf, 0.0});
        FAIL() << "expected SingularChannelError";
    } catch (const SingularChannelError& e) {
        EXPECT_EQ(e.block_index(), 1u);
    }
}

TEST(Zf, DimensionChecks) {
    EXPECT_THROW(zf(CVec::Ones(3), CMat::Identity(4, 4)), DimensionError);
    EXPECT_THROW(zf(CVec::Ones(4), CMat::Identity(4, 3)), DimensionError);
    EXPECT_THROW(mmse(CVec::Ones(3), CMat::Identity(4, 4), 0.1), DimensionError);
    EXPECT_THROW(ml_bruteforce(CVec::Ones(3), CMat::Identity(4, 4)), DimensionError);
}

TEST(Mmse, MatchesDenseFormulaAndPushThroughForm) {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 50; ++t) {
        const CMat h = oracle::random_cmat(8, 8, rng);
        const CVec y = oracle::random_cvec(8, rng);
        const double v = 0.01 + 0.1 * t;
        const CMat i8 = CMat::Identity(8, 8);
        const CVec a = (h.adjoint() * h + v * i8).inverse() * h.adjoint() * y;
        const CVec b = h.adjoint() * (h * h.adjoint() + v * i8).inverse() * y;
        const CVec got = mmse(y, h, v);
        EXPECT_LT((got - a).norm(), 1e-10 * a.norm());
        EXPECT_LT((got - b).norm(), 1e-10 * b.norm());
    }
}

TEST(Mmse, Limits) {
    std::mt19937_64 rng(54);
    const CMat h = oracle::random_cmat(6, 6, rng);
    const CVec y = oracle::random_cvec(6, rng);
    EXPECT_EQ(mmse(y, h, 0.0), zf(y, h));
    EXPECT_LT((mmse(y, h, 1e-12) - zf(y, h)).norm(), 1e-6 * zf(y, h).norm());
    // large noise: matched filter scaled by 1/v
    const double v = 1e8;
    const CVec mf = h.adjoint() * y / v;
    EXPECT_LT((mmse(y, h, v) - mf).norm(), 1e-6 * mf.norm());
    EXPECT_THROW(mmse(y, h, -1.0), ParameterError);
}

TEST(Dfe, NoiselessRecoversSymbols) {
    std::mt19937_64 rng(55);
    for (int t = 0; t < 50; ++t) {
        const CMat h = CMat::Identity(8, 8) + 0.3 * oracle::random_cmat(8, 8, rng);
        const CVec s = oracle::random_qpsk(8, rng);
        EXPECT_LT((dfe(h * s, h, 0.0) - s).norm(), 1e-12);
        EXPECT_LT((dfe(h * s, h, 1e-3) - s).norm(), 1e-12);
    }
}

TEST(Dfe, DiagonalChannelIsPerSymbolSlicing) {
    std::mt19937_64 rng(56);
    const CVec d = oracle::random_cvec(8, rng);
    const CMat h = d.asDiagonal();
    const CVec y = oracle::random_cvec(8, rng);
    const CVec want = hard_slice(CVec(y.cwiseQuotient(d)));
    EXPECT_EQ(dfe(y, h, 0.5), want);
    EXPECT_EQ(dfe(y, h, 0.0), want);
}

TEST(Dfe, OutputsConstellationPoints) {
    std::mt19937_64 rng(57);
    const auto& c = Constellation::qpsk();
    const CMat h = oracle::random_cmat(8, 8, rng);
    const CVec out = dfe(oracle::random_cvec(8, rng), h, 0.2);
    for (const auto& v : out) EXPECT_NO_THROW(c.index_of(v));
}

TEST(Ml, MatchesExhaustiveEnumeration) {
    std::mt19937_64 rng(58);
    for (std::size_t b = 1; b <= 4; ++b)
        for (int t = 0; t < 100; ++t) {
            const CMat h = oracle::random_cmat(b, b, rng);
            const CVec y = h * oracle::random_qpsk(b, rng) + oracle::random_cvec(b, rng, 0.7);
            EXPECT_EQ(ml_bruteforce(y, h), ml_enumerate(y, h));
        }
}

TEST(Ml, TiesGoToSmallestIndexVector) {
    // zero channel: every candidate has the same cost
    const CVec out = ml_bruteforce(CVec::Ones(3), CMat::Zero(3, 3));
    const auto& c = Constellation::qpsk();
    for (const auto& v : out) EXPECT_EQ(v, c.points[0]);
}

TEST(Ml, NoiselessAndLimits) {
    std::mt19937_64 rng(59);
    const CMat h = oracle::random_cmat(6, 6, rng);
    const CVec s = oracle::random_qpsk(6, rng);
    EXPECT_EQ(ml_bruteforce(h * s, h), s);
    EXPECT_THROW(ml_bruteforce(CVec::Ones(9), CMat::Identity(9, 9)), ParameterError);
}

TEST(Sliding, BlockDiagonalChannelMatchesFullSolve) {
    std::mt19937_64 rng(60);
    std::vector<CMat> blocks;
    for (int j = 0; j < 4; ++j) blocks.push_back(oracle::random_cmat(8, 8, rng));
    const FreqChannelMatrix h(block_diagonal(blocks));
    const CVec y = oracle::random_cvec(32, rng);
    const auto plan = make_sliding_plan(32, 8);
    EXPECT_LT((sliding_equalize(y, h, plan, EqualizerSpec{EqualizerKind::Zf, 0.0}) - zf(y, h.h_freq())).norm(), 1e-9);
    EXPECT_LT((sliding_equalize(y, h, plan, EqualizerSpec{EqualizerKind::Mmse, 0.3}) - mmse(y, h.h_freq(), 0.3)).norm(),
              1e-10);
    EXPECT_EQ(sliding_equalize(y, h, plan, EqualizerSpec{EqualizerKind::Dfe, 0.3}), dfe(y, h.h_freq(), 0.3));
}

TEST(Sliding, IgnoresOffBlockEntries) {
    std::mt19937_64 rng(61);
    const CMat inner = block_diagonal({oracle::random_cmat(4, 4, rng), oracle::random_cmat(4, 4, rng)});
    CMat leaky = inner;
    leaky.topRightCorner(4, 4) = oracle::random_cmat(4, 4, rng);
    const CVec y = oracle::random_cvec(8, rng);
    const auto plan = make_sliding_plan(8, 4);
    const EqualizerSpec spec{EqualizerKind::Mmse, 0.1};
    EXPECT_EQ(sliding_equalize(y, FreqChannelMatrix(leaky), plan, spec),
              sliding_equalize(y, FreqChannelMatrix(inner), plan, spec));
}

TEST(Equalizers, Names) {
    EXPECT_EQ(to_string(EqualizerKind::Zf), "zf");
    EXPECT_EQ(to_string(EqualizerKind::Mmse), "mmse");
    EXPECT_EQ(to_string(EqualizerKind::Dfe), "dfe");
    EXPECT_EQ(to_string(EqualizerKind::Ml), "ml");
}
