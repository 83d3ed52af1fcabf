#include "uwaeq/noise.hpp"

#include "binio.hpp"
#include "uwaeq/fft.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace uwaeq {

void NoiseSpec::validate() const {
    if (kind == NoiseKind::AlphaStable) {
        if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
        if (!(beta >= -1.0 && beta <= 1.0)) throw ParameterError("beta must lie in [-1, 1]");
        if (!(scale > 0.0)) throw ParameterError("alpha-stable scale must be positive");
    }
    if (kind == NoiseKind::File && path.empty()) throw ParameterError("file noise needs a path");
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::Gaussian: return "gaussian";
        case NoiseKind::AlphaStable: return "alpha";
        case NoiseKind::File: return "file";
    }
    return "?";
}

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "gaussian" || name == "awgn") return NoiseKind::Gaussian;
    if (name == "alpha" || name == "alpha-stable" || name == "alpha_stable") return NoiseKind::AlphaStable;
    if (name == "file") return NoiseKind::File;
    throw ParameterError("unknown noise kind '" + name + "' (expected gaussian, alpha or file)");
}

double noise_power_for(double signal_power, double snr_db) {
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

ComplexSignal awgn(std::size_t n, double signal_power, double snr_db, Rng& rng) {
    if (n == 0) throw ParameterError("awgn needs n > 0");
    if (!(signal_power > 0.0)) throw ParameterError("awgn needs positive signal power");
    const double sigma = std::sqrt(noise_power_for(signal_power, snr_db) / 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec z(static_cast<Eigen::Index>(n));
    for (auto& v : z) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v = sigma * cd(re, im);
    }
    return {std::move(z), Domain::Time};
}

RVec alpha_stable(std::size_t n, double alpha, double beta, double scale, Rng& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
    if (!(beta >= -1.0 && beta <= 1.0)) throw ParameterError("beta must lie in [-1, 1]");
    if (!(scale > 0.0)) throw ParameterError("alpha-stable scale must be positive");

    constexpr double pi = std::numbers::pi;
    std::uniform_real_distribution<double> uniform(-pi / 2.0, pi / 2.0);
    std::exponential_distribution<double> expo(1.0);
    RVec x(static_cast<Eigen::Index>(n));

    if (alpha == 1.0) {
        for (auto& v : x) {
            const double u = uniform(rng);
            const double w = expo(rng);
            const double a = pi / 2.0 + beta * u;
            const double std_draw = (2.0 / pi) * (a * std::tan(u) - beta * std::log((pi / 2.0) * w * std::cos(u) / a));
            v = scale * std_draw + (2.0 / pi) * beta * scale * std::log(scale);
        }
        return x;
    }

    const double t = beta * std::tan(pi * alpha / 2.0);
    const double shift = std::atan(t) / alpha;
    const double factor = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    for (auto& v : x) {
        const double u = uniform(rng);
        const double w = expo(rng);
        const double num = std::sin(alpha * (u + shift));
        const double den = std::pow(std::cos(u), 1.0 / alpha);
        const double tail = std::pow(std::cos(u - alpha * (u + shift)) / w, (1.0 - alpha) / alpha);
        v = scale * factor * num / den * tail;
    }
    return x;
}

ComplexSignal alpha_stable_noise(std::size_t n, double signal_power, const NoiseSpec& spec, Rng& rng) {
    if (n == 0) throw ParameterError("alpha_stable_noise needs n > 0");
    if (!(signal_power > 0.0)) throw ParameterError("alpha_stable_noise needs positive signal power");
    // Per component, a Gaussian of variance P/2 has stable scale sqrt(P/4).
    const double scale = spec.scale * std::sqrt(noise_power_for(signal_power, spec.snr_db) / 4.0);
    const RVec re = alpha_stable(n, spec.alpha, spec.beta, scale, rng);
    const RVec im = alpha_stable(n, spec.alpha, spec.beta, scale, rng);
    CVec z(static_cast<Eigen::Index>(n));
    z.real() = re;
    z.imag() = im;
    return {std::move(z), Domain::Time};
}

NoiseRecording load_noise_samples(const std::filesystem::path& path) {
    NoiseRecording rec;
    if (path.extension() == ".csv") {
        std::ifstream in(path);
        if (!in) throw Error("cannot open " + path.string() + " for reading");
        std::vector<cd> values;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::string a, b;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
                if (line_no == 1) continue;
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected two columns re,im");
            }
            try {
                values.emplace_back(std::stod(a), std::stod(b));
            } catch (const std::logic_error&) {
                if (line_no == 1) continue;  // header
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": unparsable number");
            }
        }
        rec.samples = Eigen::Map<CVec>(values.data(), static_cast<Eigen::Index>(values.size()));
        rec.is_real = false;
    } else {
        const auto buf = detail::read_file(path.string());
        if (buf.size() % 4 != 0)
            throw FormatError(path.string() + ": raw f32 noise file has " + std::to_string(buf.size()) +
                              " bytes, not a multiple of 4");
        detail::ByteReader in(buf, path.string());
        rec.samples.resize(static_cast<Eigen::Index>(buf.size() / 4));
        for (auto& v : rec.samples) v = cd(in.f32(), 0.0);
        rec.is_real = true;
    }
    if (!rec.samples.allFinite()) throw FormatError(path.string() + ": non-finite noise sample");
    return rec;
}

ComplexSignal noise_from_samples(const NoiseRecording& recording, std::size_t n, double signal_power,
                                 double snr_db, Rng& rng) {
    if (n == 0) throw ParameterError("noise window must be nonempty");
    if (!(signal_power > 0.0)) throw ParameterError("noise_from_file needs positive signal power");
    const auto len = static_cast<std::size_t>(recording.samples.size());
    if (len < n)
        throw ParameterError("noise recording has " + std::to_string(len) + " samples, need " + std::to_string(n));
    std::uniform_int_distribution<std::size_t> pick(0, len - n);
    const std::size_t offset = pick(rng);

    CVec w = recording.samples.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(n));
    w.array() -= w.mean();
    if (recording.is_real) {
        // Analytic signal: keep DC and Nyquist, double positive, drop negative frequencies.
        CVec spec = fft::forward(w);
        for (std::size_t k = 1; k < n; ++k) {
            if (2 * k < n)
                spec[static_cast<Eigen::Index>(k)] *= 2.0;
            else if (2 * k > n)
                spec[static_cast<Eigen::Index>(k)] = 0.0;
        }
        w = fft::backward(spec) / static_cast<double>(n);
        w.array() -= w.mean();
    }
    const double power = w.squaredNorm() / static_cast<double>(n);
    if (!(power > 1e-300)) throw ParameterError("degenerate noise file: window is constant after mean removal");
    w *= std::sqrt(noise_power_for(signal_power, snr_db) / power);
    return {std::move(w), Domain::Time};
}

ComplexSignal noise_from_file(const std::filesystem::path& path, std::size_t n, double signal_power,
                              double snr_db, Rng& rng) {
    return noise_from_samples(load_noise_samples(path), n, signal_power, snr_db, rng);
}

}  // namespace uwaeq
