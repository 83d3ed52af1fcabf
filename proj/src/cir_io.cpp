#include "uwaeq/channel.hpp"

#include "binio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace uwaeq {
namespace {

constexpr char kCirMagic[4] = {'U', 'C', 'I', 'R'};
constexpr std::uint32_t kCirVersion = 1;

bool is_csv(const std::filesystem::path& path) { return path.extension() == ".csv"; }

Cir load_cir_binary(const std::filesystem::path& path) {
    const auto buf = detail::read_file(path.string());
    detail::ByteReader in(buf, path.string());
    char magic[4];
    in.bytes(magic, 4);
    if (!std::equal(magic, magic + 4, kCirMagic)) throw FormatError(path.string() + ": not a UCIR file (bad magic)");
    const auto version = in.u32();
    if (version != kCirVersion)
        throw FormatError(path.string() + ": unsupported UCIR version " + std::to_string(version));
    const auto samples = in.u32();
    const auto taps = in.u32();
    if (samples == 0) throw FormatError(path.string() + ": header declares zero time samples");
    if (taps == 0) throw FormatError(path.string() + ": header declares L = 0 taps");
    const std::size_t expected = 16 + std::size_t{samples} * taps * 8;
    if (buf.size() != expected)
        throw FormatError(path.string() + ": expected " + std::to_string(expected) + " bytes for " +
                          std::to_string(samples) + "x" + std::to_string(taps) + " taps, found " +
                          std::to_string(buf.size()));
    CMat h(samples, taps);
    for (std::uint32_t n = 0; n < samples; ++n)
        for (std::uint32_t l = 0; l < taps; ++l) {
            const float re = in.f32();
            const float im = in.f32();
            if (!std::isfinite(re) || !std::isfinite(im))
                throw FormatError(path.string() + ": non-finite tap at n=" + std::to_string(n) +
                                  ", l=" + std::to_string(l));
            h(n, l) = cd(re, im);
        }
    return Cir(std::move(h));
}

Cir load_cir_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string() + " for reading");
    std::map<std::pair<std::size_t, std::size_t>, cd> entries;
    std::size_t max_n = 0, max_l = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.find_first_of("nN") == 0) continue;  // header
        std::stringstream ss(line);
        std::string field[4];
        for (auto& f : field)
            if (!std::getline(ss, f, ','))
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 4 columns n,l,re,im");
        try {
            const auto n = static_cast<std::size_t>(std::stoull(field[0]));
            const auto l = static_cast<std::size_t>(std::stoull(field[1]));
            const double re = std::stod(field[2]);
            const double im = std::stod(field[3]);
            if (!std::isfinite(re) || !std::isfinite(im))
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
            entries[{n, l}] = cd(re, im);
            max_n = std::max(max_n, n);
            max_l = std::max(max_l, l);
        } catch (const std::logic_error&) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": unparsable number");
        }
    }
    if (entries.empty()) throw FormatError(path.string() + ": no taps found");
    const std::size_t samples = max_n + 1, taps = max_l + 1;
    if (entries.size() != samples * taps)
        throw FormatError(path.string() + ": expected " + std::to_string(samples * taps) + " entries for " +
                          std::to_string(samples) + "x" + std::to_string(taps) + " taps, found " +
                          std::to_string(entries.size()));
    CMat h(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(taps));
    for (const auto& [key, v] : entries)
        h(static_cast<Eigen::Index>(key.first), static_cast<Eigen::Index>(key.second)) = v;
    return Cir(std::move(h));
}

}  // namespace

Cir load_cir(const std::filesystem::path& path) {
    return is_csv(path) ? load_cir_csv(path) : load_cir_binary(path);
}

void save_cir(const Cir& cir, const std::filesystem::path& path) {
    if (is_csv(path)) {
        std::ofstream out(path);
        if (!out) throw Error("cannot open " + path.string() + " for writing");
        out << "n,l,re,im\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (std::size_t n = 0; n < cir.sample_count(); ++n)
            for (std::size_t l = 0; l < cir.tap_count(); ++l)
                out << n << ',' << l << ',' << cir(n, l).real() << ',' << cir(n, l).imag() << '\n';
        if (!out) throw Error("failed writing " + path.string());
        return;
    }
    detail::ByteWriter w;
    w.bytes(kCirMagic, 4);
    w.u32(kCirVersion);
    w.u32(static_cast<std::uint32_t>(cir.sample_count()));
    w.u32(static_cast<std::uint32_t>(cir.tap_count()));
    for (std::size_t n = 0; n < cir.sample_count(); ++n)
        for (std::size_t l = 0; l < cir.tap_count(); ++l) {
            w.f32(static_cast<float>(cir(n, l).real()));
            w.f32(static_cast<float>(cir(n, l).imag()));
        }
    detail::write_file(path.string(), w.data());
}

}  // namespace uwaeq
