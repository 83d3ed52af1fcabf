#include "uwaeq/harness.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace uwaeq {
namespace {

constexpr const char* kCsvHeader =
    "method,channel_id,snr_db,csi_sigma,clipped,noise_kind,symbols_tested,symbol_errors,ser,wall_time_per_symbol";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_field(const std::string& s, const std::string& what, std::size_t line) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("CSV line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
    return v;
}

}  // namespace

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    if (result.rows.empty()) throw ParameterError("refusing to write an empty sweep result");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << kCsvHeader << '\n' << std::setprecision(17);
    for (const auto& r : result.rows) {
        for (const auto* s : {&r.method, &r.channel_id, &r.noise_kind})
            if (s->find_first_of(",\n") != std::string::npos) throw ParameterError("CSV field contains a separator: " + *s);
        out << r.method << ',' << r.channel_id << ',' << r.snr_db << ',' << r.csi_sigma << ',' << (r.clipped ? 1 : 0)
            << ',' << r.noise_kind << ',' << r.symbols_tested << ',' << r.symbol_errors << ',' << r.ser << ','
            << r.wall_time_per_symbol << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

SweepResult read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw FormatError(path.string() + ": unexpected CSV header");
    SweepResult result;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 10)
            throw FormatError(path.string() + " line " + std::to_string(lineno) + ": expected 10 fields, found " +
                              std::to_string(f.size()));
        SweepRow r;
        r.method = f[0];
        r.channel_id = f[1];
        r.snr_db = parse_field<double>(f[2], "snr_db", lineno);
        r.csi_sigma = parse_field<double>(f[3], "csi_sigma", lineno);
        r.clipped = parse_field<int>(f[4], "clipped", lineno) != 0;
        r.noise_kind = f[5];
        r.symbols_tested = parse_field<std::size_t>(f[6], "symbols_tested", lineno);
        r.symbol_errors = parse_field<std::size_t>(f[7], "symbol_errors", lineno);
        r.ser = parse_field<double>(f[8], "ser", lineno);
        r.wall_time_per_symbol = parse_field<double>(f[9], "wall_time_per_symbol", lineno);
        result.rows.push_back(std::move(r));
    }
    return result;
}

void emit_plot_script(const SweepResult& result, const std::filesystem::path& csv_path,
                      const std::filesystem::path& script_path) {
    if (result.rows.empty()) throw ParameterError("refusing to plot an empty sweep result");
    std::vector<std::string> methods;
    std::set<std::string> seen;
    for (const auto& r : result.rows)
        if (seen.insert(r.method).second) methods.push_back(r.method);

    std::ofstream out(script_path);
    if (!out) throw Error("cannot write " + script_path.string());
    const std::string csv = csv_path.string();
    out << "# SER versus SNR, one series per method.\n"
        << "# Run with: gnuplot -p <this script>\n"
        << "set datafile separator ','\n"
        << "set logscale y\n"
        << "set format y '10^{%L}'\n"
        << "set xlabel 'SNR (dB)'\n"
        << "set ylabel 'SER'\n"
        << "set grid\n"
        << "set key bottom left\n"
        << "data = '" << csv << "'\n"
        << "plot \\\n";
    for (std::size_t i = 0; i < methods.size(); ++i) {
        out << "  data every ::1 using 3:(strcol(1) eq '" << methods[i] << "' && $9 > 0 ? $9 : 1/0) with linespoints title '"
            << methods[i] << "'" << (i + 1 < methods.size() ? ", \\\n" : "\n");
    }
    if (!out) throw Error("failed writing " + script_path.string());
}

std::string format_band_stats(const BandStats& stats) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "total energy        " << stats.total_energy << '\n';
    os << "diagonal fraction   " << stats.diagonal_fraction << '\n';
    for (const auto& [w, f] : stats.band_fraction) os << "band |k-m| <= " << std::setw(5) << w << "  " << f << '\n';
    os << "in-block fraction   " << stats.in_block_fraction << '\n';
    return os.str();
}

}  // namespace uwaeq
