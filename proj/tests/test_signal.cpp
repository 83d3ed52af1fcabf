#include "oracles.hpp"
#include "uwaeq/fft.hpp"
#include "uwaeq/signal.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace uwaeq;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

OfdmConfig cfg_n(std::size_t n, std::size_t cp = 0) {
    OfdmConfig c;
    c.n_subcarriers = n;
    c.cp_len = cp;
    return c;
}

double rel_err(const CVec& a, const CVec& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(OfdmConfig, RejectsBadSizes) {
    EXPECT_THROW(cfg_n(48).validate(), ParameterError);
    EXPECT_THROW(cfg_n(64, 64).validate(), ParameterError);
    EXPECT_NO_THROW(cfg_n(64, 0).validate());
}

TEST(Qpsk, ConstellationMatchesOneHotTable) {
    const auto& c = Constellation::qpsk();
    EXPECT_EQ(c.points[0], cd(1, 1) * kInvSqrt2);
    EXPECT_EQ(c.points[1], cd(-1, 1) * kInvSqrt2);
    EXPECT_EQ(c.points[2], cd(-1, -1) * kInvSqrt2);
    EXPECT_EQ(c.points[3], cd(1, -1) * kInvSqrt2);
    for (const auto& p : c.points) EXPECT_NEAR(std::abs(p), 1.0, 1e-15);
}

TEST(Qpsk, GrayMappingNeighboursDifferInOneBit) {
    const auto& c = Constellation::qpsk();
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& a = c.bits[i];
        const auto& b = c.bits[(i + 1) % 4];
        EXPECT_EQ((a[0] != b[0]) + (a[1] != b[1]), 1);
    }
}

TEST(Qpsk, ZeroBitsMapToFirstPoint) {
    std::vector<std::uint8_t> bits(128, 0);
    const auto s = qpsk_modulate(bits);
    ASSERT_EQ(s.size(), 64u);
    EXPECT_EQ(s.domain(), Domain::Frequency);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], cd(kInvSqrt2, kInvSqrt2));
}

TEST(Qpsk, RoundTripRandomBits) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::uint8_t> bits(2 * (1 + trial % 37));
        for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));
        ASSERT_EQ(qpsk_demodulate_hard(qpsk_modulate(bits)), bits);
    }
}

TEST(Qpsk, OddOrEmptyBitsRejected) {
    std::vector<std::uint8_t> odd(3, 0), none;
    EXPECT_THROW(qpsk_modulate(odd), DimensionError);
    EXPECT_THROW(qpsk_modulate(none), DimensionError);
}

TEST(Qpsk, NearestNeighbourAndTies) {
    const auto& c = Constellation::qpsk();
    EXPECT_EQ(c.nearest(cd(0.9, 0.8) * kInvSqrt2), 0u);
    // on the imaginary axis c1 and c2 are equidistant
    EXPECT_EQ(c.nearest(cd(0.0, 0.5)), 0u);
    EXPECT_EQ(c.nearest(cd(0.0, -0.5)), 2u);
    EXPECT_EQ(c.nearest(cd(0.0, 0.0)), 0u);
    const auto bits = qpsk_demodulate_hard(ComplexSignal(CVec::Constant(1, cd(0.9, 0.8) * kInvSqrt2), Domain::Frequency));
    EXPECT_EQ(bits, (std::vector<std::uint8_t>{0, 0}));
}

TEST(Fft, MatchesDirectDft) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {1u, 2u, 16u, 64u, 128u}) {
        const CVec x = oracle::random_cvec(n, rng);
        EXPECT_LT(rel_err(fft::forward(x), oracle::dft(x, -1)), 1e-12) << n;
        EXPECT_LT(rel_err(fft::backward(x), oracle::dft(x, +1)), 1e-12) << n;
    }
}

TEST(Fft, AllOnesGivesUnitImpulse) {
    const auto cfg = cfg_n(16);
    const auto s = ifft_tx(ComplexSignal(CVec::Ones(16), Domain::Frequency), cfg);
    EXPECT_EQ(s.domain(), Domain::Time);
    EXPECT_NEAR(std::abs(s[0] - 1.0), 0.0, 1e-15);
    for (std::size_t i = 1; i < 16; ++i) EXPECT_NEAR(std::abs(s[i]), 0.0, 1e-15);
}

TEST(Fft, RoundTripAndParseval) {
    std::mt19937_64 rng(3);
    for (std::size_t n : {16u, 64u, 512u}) {
        const auto cfg = cfg_n(n);
        for (int t = 0; t < 1000; ++t) {
            const CVec s = oracle::random_cvec(n, rng);
            const auto time = ifft_tx(ComplexSignal(s, Domain::Frequency), cfg);
            ASSERT_LT(rel_err(fft_rx(time, cfg).samples(), s), 1e-12);
            if (t < 5) {
                const CVec direct = oracle::dft(s, +1) / static_cast<double>(n);
                EXPECT_LT(rel_err(time.samples(), direct), 1e-12);
                EXPECT_NEAR(time.samples().squaredNorm() * static_cast<double>(n) / s.squaredNorm(), 1.0, 1e-12);
            }
        }
    }
}

TEST(Fft, LengthMismatchRejected) {
    EXPECT_THROW(ifft_tx(ComplexSignal(CVec::Ones(8), Domain::Frequency), cfg_n(16)), DimensionError);
    EXPECT_THROW(fft_rx(ComplexSignal(CVec::Ones(8), Domain::Time), cfg_n(16)), DimensionError);
}

TEST(CyclicPrefix, Definition) {
    OfdmConfig cfg;
    cfg.n_subcarriers = 4;
    cfg.cp_len = 2;
    CVec s(4);
    s << 1.0, 2.0, 3.0, 4.0;
    const auto with = add_cp(ComplexSignal(s, Domain::Time), cfg);
    CVec expect(6);
    expect << 3.0, 4.0, 1.0, 2.0, 3.0, 4.0;
    EXPECT_EQ(with.samples(), expect);
    EXPECT_EQ(remove_cp(with, cfg).samples(), s);
    EXPECT_THROW(remove_cp(ComplexSignal(s, Domain::Time), cfg), DimensionError);
}

TEST(CyclicPrefix, ZeroLengthIsIdentity) {
    std::mt19937_64 rng(4);
    const auto cfg = cfg_n(16, 0);
    const CVec s = oracle::random_cvec(16, rng);
    EXPECT_EQ(add_cp(ComplexSignal(s, Domain::Time), cfg).samples(), s);
    EXPECT_EQ(remove_cp(ComplexSignal(s, Domain::Time), cfg).samples(), s);
}

TEST(Clip, Examples) {
    CVec c(2);
    c << cd(0.5, 0.0), std::polar(3.0, std::numbers::pi / 4);
    const auto out = clip(ComplexSignal(c, Domain::Time), 1.0).samples();
    EXPECT_EQ(out[0], cd(0.5, 0.0));
    EXPECT_NEAR(std::abs(out[1] - std::polar(1.0, std::numbers::pi / 4)), 0.0, 1e-15);
    EXPECT_THROW(clip(ComplexSignal(c, Domain::Time), 0.0), ParameterError);
    EXPECT_THROW(clip(ComplexSignal(c, Domain::Time), -1.0), ParameterError);
}

TEST(Clip, BoundedPhasePreservingIdempotent) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const CVec c = oracle::random_cvec(256, rng);
        const double a = rms(c);
        const auto once = clip(ComplexSignal(c, Domain::Time), a);
        const auto twice = clip(once, a);
        EXPECT_EQ(once.samples(), twice.samples());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            EXPECT_LE(std::abs(once.samples()[i]), a * (1 + 1e-14));
            if (std::abs(c[i]) <= a) EXPECT_EQ(once.samples()[i], c[i]);
            else EXPECT_NEAR(std::arg(once.samples()[i]), std::arg(c[i]), 1e-14);
        }
    }
}

TEST(StackedReal, Definition) {
    CVec x(1);
    x << cd(1, 2);
    EXPECT_EQ(to_stacked_real(x), (RVec(2) << 1, 2).finished());
    CMat h(1, 1);
    h << cd(3, 4);
    EXPECT_EQ(to_stacked_real(h), (RMat(2, 2) << 3, -4, 4, 3).finished());
    EXPECT_THROW(from_stacked_real(RVec(RVec::Zero(3))), DimensionError);
}

TEST(StackedReal, HomomorphismAndRoundTrip) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        const CMat h = oracle::random_cmat(8, 8, rng);
        const CMat g = oracle::random_cmat(8, 8, rng);
        const CVec s = oracle::random_cvec(8, rng);
        const RVec lhs = to_stacked_real(h) * to_stacked_real(s);
        EXPECT_LT((lhs - to_stacked_real(CVec(h * s))).norm(), 1e-12 * lhs.norm());
        EXPECT_LT((to_stacked_real(h) * to_stacked_real(g) - to_stacked_real(CMat(h * g))).norm(), 1e-12 * h.norm() * g.norm());
        EXPECT_EQ(to_stacked_real(CMat(h.adjoint())), to_stacked_real(h).transpose());
        EXPECT_EQ(from_stacked_real(to_stacked_real(s)), s);
        EXPECT_EQ(from_stacked_real(to_stacked_real(h)), h);
    }
}

TEST(OneHot, EncodeTable) {
    const auto& c = Constellation::qpsk();
    CVec pts(4);
    for (int i = 0; i < 4; ++i) pts[i] = c.points[static_cast<std::size_t>(i)];
    const RMat q = one_hot_encode(ComplexSignal(pts, Domain::Frequency));
    EXPECT_EQ(q, RMat::Identity(4, 4));
    EXPECT_EQ(one_hot_demap_hard(q).samples(), pts);
    EXPECT_LT((one_hot_demap_soft(q).samples() - pts).norm(), 1e-15);
}

TEST(OneHot, SoftDemapOfUniformIsCentroid) {
    const RMat q = RMat::Constant(3, 4, 0.25);
    EXPECT_LT(one_hot_demap_soft(q).samples().norm(), 1e-15);
}

TEST(OneHot, RejectsInvalidInput) {
    EXPECT_THROW(one_hot_encode(ComplexSignal(CVec::Constant(1, cd(0.3, 0.1)), Domain::Frequency)), ParameterError);
    RMat bad = RMat::Constant(1, 4, 0.3);
    EXPECT_THROW(one_hot_demap_hard(bad), ParameterError);
    bad << 1.2, -0.2, 0.0, 0.0;
    EXPECT_THROW(one_hot_demap_soft(bad), ParameterError);
    EXPECT_THROW(one_hot_demap_soft(RMat::Constant(1, 3, 1.0 / 3)), DimensionError);
}

TEST(Ser, Counting) {
    std::mt19937_64 rng(7);
    const CVec truth = oracle::random_qpsk(512, rng);
    const ComplexSignal t(truth, Domain::Frequency);
    EXPECT_EQ(ser(t, t), 0.0);
    EXPECT_EQ(ser(ComplexSignal(-truth, Domain::Frequency), t), 1.0);
    CVec one = truth;
    one[100] = -one[100];
    EXPECT_DOUBLE_EQ(ser(ComplexSignal(one, Domain::Frequency), t), 1.0 / 512.0);
    EXPECT_THROW(ser(ComplexSignal(truth.head(10), Domain::Frequency), t), DimensionError);
}

TEST(ComplexSignal, EmptyRejected) { EXPECT_THROW(ComplexSignal(CVec(), Domain::Time), DimensionError); }
