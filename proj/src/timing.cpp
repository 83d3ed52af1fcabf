#include "methods.hpp"
#include "uwaeq/link.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>

namespace uwaeq {
namespace {

constexpr std::uint64_t kTimingStream = 20;
constexpr double kTimingSnrDb = 25.0;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<TimingRow> run_timing(const ExperimentConfig& cfg, const std::vector<std::size_t>& subcarriers,
                                  const std::vector<std::string>& methods, const UdnetModel* model,
                                  std::size_t min_symbols, std::size_t min_repetitions) {
    if (subcarriers.empty() || methods.empty()) throw ParameterError("timing needs subcarrier sizes and methods");
    if (min_repetitions == 0) throw ParameterError("timing needs at least one repetition");
    detail::check_methods(methods, model, cfg.block_size);

    std::vector<TimingRow> rows;
    for (const std::size_t n : subcarriers) {
        OfdmConfig ofdm = cfg.ofdm;
        ofdm.n_subcarriers = n;
        ofdm.validate();
        if (n % cfg.block_size != 0)
            throw ParameterError("block size " + std::to_string(cfg.block_size) + " does not divide N=" +
                                 std::to_string(n));
        const SlidingPlan plan = make_sliding_plan(n, cfg.block_size);
        const SlidingPlan full_plan = make_sliding_plan(n, n);
        const detail::MethodContext ctx{ofdm, plan, full_plan, model, nullptr};

        Rng rng = derive_rng(cfg.seed, {kTimingStream, n});
        SynthCirParams synth = cfg.channel.synth;
        const Cir cir = synth_cir(synth, n + ofdm.cp_len, rng);
        const Transmission tx = random_transmission(ofdm, rng);
        NoiseSpec noise;
        noise.snr_db = kTimingSnrDb;
        CVec rx = propagate(tx, cir, ofdm).samples();
        rx += make_noise(static_cast<std::size_t>(rx.size()), tx.signal_power, noise, rng).samples();
        const CVec y = demodulate(rx, ofdm);
        const FreqChannelMatrix h = freq_matrix(cir, ofdm);
        const double noise_var = freq_noise_var(noise_power_for(tx.signal_power, kTimingSnrDb), ofdm);

        const std::size_t reps = std::max(min_repetitions, (min_symbols + n - 1) / n);
        for (const auto& method : methods) {
            (void)detail::run_method(method, y, h, noise_var, ctx);  // warm-up: FFT plans, allocations
            std::vector<double> seconds;
            seconds.reserve(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                const auto start = std::chrono::steady_clock::now();
                const CVec est = detail::run_method(method, y, h, noise_var, ctx);
                seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
                if (est.size() != y.size()) throw Error("equalizer returned the wrong length");
            }
            TimingRow row{method, n, reps, median(seconds), 0.0};
            row.median_seconds_per_symbol = row.median_seconds_per_ofdm_symbol / static_cast<double>(n);
            spdlog::info("{:>9} N={:>5}  {:.3e} s per OFDM symbol, {:.3e} s per symbol ({} runs)", method, n,
                         row.median_seconds_per_ofdm_symbol, row.median_seconds_per_symbol, reps);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace uwaeq
