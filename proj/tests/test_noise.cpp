#include "oracles.hpp"
#include "uwaeq/fft.hpp"
#include "uwaeq/link.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace uwaeq;
namespace fs = std::filesystem;

namespace {

// Kolmogorov-Smirnov statistic of `x` against `cdf`.
template <class Cdf>
double ks_statistic(RVec x, Cdf cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    return d;
}

// 0.1% critical value for large samples.
double ks_critical(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

fs::path temp_path(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "uwaeq_test_noise";
    fs::create_directories(dir);
    return dir / name;
}

void write_f32(const fs::path& p, const std::vector<float>& v) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(float)));
}

}  // namespace

TEST(Awgn, PowerAndCircularity) {
    Rng rng(31);
    const std::size_t n = 400000;
    for (double snr : {0.0, 10.0, 25.0}) {
        const CVec z = awgn(n, 2.0, snr, rng).samples();
        const double want = 2.0 / std::pow(10.0, snr / 10.0);
        EXPECT_NEAR(z.squaredNorm() / n / want, 1.0, 0.01);
        EXPECT_NEAR(z.real().squaredNorm() / z.imag().squaredNorm(), 1.0, 0.02);
        EXPECT_LT(std::abs(z.real().dot(z.imag())) / z.squaredNorm(), 0.01);
        EXPECT_LT(std::abs(z.mean()) / std::sqrt(want), 0.01);
    }
    EXPECT_THROW(awgn(0, 1.0, 10.0, rng), ParameterError);
    EXPECT_THROW(awgn(10, 0.0, 10.0, rng), ParameterError);
}

TEST(Awgn, GaussianMarginal) {
    Rng rng(32);
    const CVec z = awgn(100000, 2.0, 0.0, rng).samples();
    const RVec re = z.real();
    EXPECT_LT(ks_statistic(re, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }), ks_critical(100000));
}

TEST(AlphaStable, AlphaTwoIsGaussian) {
    Rng rng(33);
    const double scale = 0.7;
    const RVec x = alpha_stable(200000, 2.0, 0.0, scale, rng);
    EXPECT_NEAR(x.squaredNorm() / 200000.0, 2 * scale * scale, 0.02 * 2 * scale * scale);
    const double sd = std::sqrt(2.0) * scale;
    EXPECT_LT(ks_statistic(x, [sd](double v) { return 0.5 * std::erfc(-v / (sd * std::sqrt(2.0))); }),
              ks_critical(200000));
}

TEST(AlphaStable, AlphaOneIsCauchy) {
    Rng rng(34);
    const double scale = 1.3;
    const RVec x = alpha_stable(100000, 1.0, 0.0, scale, rng);
    EXPECT_LT(ks_statistic(x, [scale](double v) { return 0.5 + std::atan(v / scale) / std::numbers::pi; }),
              ks_critical(100000));
}

TEST(AlphaStable, HalfTotallySkewedIsLevy) {
    Rng rng(35);
    const double scale = 0.4;
    const RVec x = alpha_stable(100000, 0.5, 1.0, scale, rng);
    EXPECT_GE(x.minCoeff(), 0.0);
    EXPECT_LT(ks_statistic(x,
                           [scale](double v) { return v <= 0 ? 0.0 : std::erfc(std::sqrt(scale / (2.0 * v))); }),
              ks_critical(100000));
}

TEST(AlphaStable, SymmetricAndScaleEquivariant) {
    Rng a(36), b(36);
    const RVec x = alpha_stable(50000, 1.5, 0.0, 1.0, a);
    const RVec y = alpha_stable(50000, 1.5, 0.0, 3.0, b);
    EXPECT_LT((3.0 * x - y).cwiseAbs().maxCoeff(), 1e-9 * y.cwiseAbs().maxCoeff());
    RVec sorted = x;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_NEAR(sorted[25000], 0.0, 0.03);
    EXPECT_NEAR(sorted[12500], -sorted[37500], 0.05);
}

TEST(AlphaStable, RejectsBadParameters) {
    Rng rng(1);
    EXPECT_THROW(alpha_stable(10, 0.0, 0.0, 1.0, rng), ParameterError);
    EXPECT_THROW(alpha_stable(10, 2.1, 0.0, 1.0, rng), ParameterError);
    EXPECT_THROW(alpha_stable(10, 1.5, 1.5, 1.0, rng), ParameterError);
    EXPECT_THROW(alpha_stable(10, 1.5, 0.0, 0.0, rng), ParameterError);
    NoiseSpec spec;
    spec.kind = NoiseKind::AlphaStable;
    spec.alpha = 3.0;
    EXPECT_THROW(spec.validate(), ParameterError);
}

TEST(AlphaStableNoise, GaussianLimitMatchesSnr) {
    Rng rng(37);
    NoiseSpec spec;
    spec.kind = NoiseKind::AlphaStable;
    spec.alpha = 2.0;
    spec.snr_db = 10.0;
    const CVec z = alpha_stable_noise(200000, 1.0, spec, rng).samples();
    EXPECT_NEAR(z.squaredNorm() / 200000.0, 0.1, 0.003);
}

TEST(NoiseKindNames, RoundTrip) {
    for (auto k : {NoiseKind::Gaussian, NoiseKind::AlphaStable, NoiseKind::File})
        EXPECT_EQ(noise_kind_from_string(to_string(k)), k);
    EXPECT_THROW(noise_kind_from_string("pink"), ParameterError);
}

TEST(FileNoise, RealRecordingIsScaledAnalyticSignal) {
    std::vector<float> raw(5000);
    Rng gen(38);
    std::normal_distribution<float> nd;
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = 3.0f + std::sin(0.05f * static_cast<float>(i)) + 0.2f * nd(gen);
    const auto p = temp_path("rec.f32");
    write_f32(p, raw);

    Rng rng(39);
    const std::size_t n = 512;
    const CVec w = noise_from_file(p, n, 2.0, 20.0, rng).samples();
    EXPECT_NEAR(w.squaredNorm() / n, 0.02, 1e-12);
    EXPECT_LT(std::abs(w.mean()), 1e-12);

    // the real part is the mean-removed window up to a positive gain
    Rng again(39);
    std::uniform_int_distribution<std::size_t> pick(0, raw.size() - n);
    const std::size_t off = pick(again);
    RVec x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = raw[off + i];
    x.array() -= x.mean();
    const RVec re = w.real();
    const double gain = re.dot(x) / x.squaredNorm();
    EXPECT_GT(gain, 0.0);
    EXPECT_LT((re - gain * x).norm(), 1e-9 * re.norm());

    // no energy at negative frequencies
    const CVec spec = fft::forward(w);
    EXPECT_LT(spec.tail(n / 2 - 1).squaredNorm(), 1e-20 * spec.squaredNorm());
}

TEST(FileNoise, ComplexCsvWindow) {
    const auto p = temp_path("rec.csv");
    {
        std::ofstream out(p);
        out << "re,im\n";
        for (int i = 0; i < 300; ++i) out << std::cos(0.3 * i) << ',' << std::sin(0.7 * i) << '\n';
    }
    const NoiseRecording rec = load_noise_samples(p);
    EXPECT_FALSE(rec.is_real);
    ASSERT_EQ(rec.samples.size(), 300);
    Rng rng(40);
    const CVec w = noise_from_samples(rec, 100, 1.0, 0.0, rng).samples();
    EXPECT_NEAR(w.squaredNorm() / 100.0, 1.0, 1e-12);
}

TEST(FileNoise, Errors) {
    const auto flat = temp_path("flat.f32");
    write_f32(flat, std::vector<float>(200, 1.5f));
    Rng rng(41);
    EXPECT_THROW(noise_from_file(flat, 64, 1.0, 10.0, rng), ParameterError);
    EXPECT_THROW(noise_from_file(flat, 300, 1.0, 10.0, rng), ParameterError);

    const auto odd = temp_path("odd.f32");
    {
        std::ofstream out(odd, std::ios::binary);
        out << "abcdefg";
    }
    EXPECT_THROW(load_noise_samples(odd), FormatError);

    const auto bad = temp_path("bad.csv");
    {
        std::ofstream out(bad);
        out << "re,im\n1,2\n3\n";
    }
    EXPECT_THROW(load_noise_samples(bad), FormatError);

    NoiseSpec spec;
    spec.kind = NoiseKind::File;
    EXPECT_THROW(spec.validate(), ParameterError);
    EXPECT_THROW(make_noise(10, 1.0, spec, rng), ParameterError);
}

TEST(MakeNoise, DispatchesOnKind) {
    NoiseSpec spec;
    spec.snr_db = 5.0;
    Rng a(42), b(42);
    EXPECT_EQ(make_noise(64, 1.0, spec, a).samples(), awgn(64, 1.0, 5.0, b).samples());
}

TEST(NoisePower, DecibelConversion) {
    EXPECT_DOUBLE_EQ(noise_power_for(1.0, 0.0), 1.0);
    EXPECT_NEAR(noise_power_for(3.0, 10.0), 0.3, 1e-15);
    OfdmConfig cfg;
    cfg.n_subcarriers = 64;
    EXPECT_DOUBLE_EQ(freq_noise_var(0.5, cfg), 32.0);
}
