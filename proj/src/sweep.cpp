#include "methods.hpp"
#include "uwaeq/link.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace uwaeq {
namespace detail {

void check_methods(const std::vector<std::string>& methods, const UdnetModel* model, std::size_t block_size) {
    for (const auto& m : methods) {
        if (!is_known_method(m)) throw ParameterError("unknown equalizer '" + m + "'");
        if (m == "udnet") {
            if (model == nullptr) throw ParameterError("method udnet needs a trained model (--model)");
            if (model->block_size != block_size)
                throw ParameterError("model block size " + std::to_string(model->block_size) +
                                     " differs from sweep.block_size " + std::to_string(block_size));
        }
        if (m == "ml" && block_size > kMaxMlBlock)
            throw ParameterError("method ml needs sweep.block_size <= " + std::to_string(kMaxMlBlock));
    }
}

CVec run_method(const std::string& method, const CVec& y, const FreqChannelMatrix& h, double noise_var,
                const MethodContext& ctx) {
    if (method == "udnet") return equalize(*ctx.model, y, h, ctx.plan);

    const bool full = method == "zf-full" || method == "mmse-full";
    EqualizerSpec spec;
    if (method == "zf" || method == "zf-full") spec.kind = EqualizerKind::Zf;
    else if (method == "mmse" || method == "mmse-full") spec.kind = EqualizerKind::Mmse;
    else if (method == "dfe") spec.kind = EqualizerKind::Dfe;
    else if (method == "ml") spec.kind = EqualizerKind::Ml;
    else throw ParameterError("unknown equalizer '" + method + "'");
    spec.noise_var = noise_var;

    // A singular block yields zeros (sliced to a fixed point) and is counted, not fatal.
    BlockEqualizer eq = [inner = make_block_equalizer(spec), &ctx, &method](const CVec& yb, const CMat& hb,
                                                                          std::size_t j) -> CVec {
        try {
            return inner(yb, hb, j);
        } catch (const SingularChannelError& e) {
            if (ctx.block_failures) ++*ctx.block_failures;
            spdlog::debug("{}: {}", method, e.what());
            return CVec::Zero(yb.size());
        }
    };
    CVec est = sliding_equalize(y, h, full ? ctx.full_plan : ctx.plan, eq);
    return hard_slice(est);
}

}  // namespace detail

namespace {

constexpr std::uint64_t kTrialStream = 10;
constexpr std::uint64_t kNoiseStream = 11;
constexpr std::uint64_t kCsiStream = 12;

using Clock = std::chrono::steady_clock;

struct PointResult {
    std::vector<std::size_t> errors;
    std::vector<double> seconds;
    std::size_t trials = 0;
};

PointResult run_point(const ExperimentConfig& cfg, double snr_db, const std::vector<Cir>& test_cirs,
                      const UdnetModel* model, const NoiseRecording* recording) {
    const auto& ofdm = cfg.ofdm;
    const std::size_t n = ofdm.n_subcarriers;
    const SlidingPlan plan = make_sliding_plan(n, cfg.block_size);
    const SlidingPlan full_plan = make_sliding_plan(n, n);
    std::atomic<std::size_t> failures{0};
    const detail::MethodContext ctx{ofdm, plan, full_plan, model, &failures};
    NoiseSpec noise = cfg.noise;
    noise.snr_db = snr_db;

    const std::size_t m = cfg.equalizers.size();
    PointResult out{std::vector<std::size_t>(m, 0), std::vector<double>(m, 0.0), 0};
    const std::size_t window = n + ofdm.cp_len;
    for (std::size_t t = 0;; ++t) {
        const bool enough_trials = t >= cfg.trials_per_point;
        const bool enough_errors =
            cfg.min_errors == 0 || *std::min_element(out.errors.begin(), out.errors.end()) >= cfg.min_errors;
        if ((enough_trials && enough_errors) || t >= cfg.max_trials) break;

        Rng rng = derive_rng(cfg.seed, {kTrialStream, t});
        const Cir& source = test_cirs[t % test_cirs.size()];
        if (source.sample_count() < window)
            throw ParameterError("test CIR has " + std::to_string(source.sample_count()) + " samples, need " +
                                 std::to_string(window));
        std::uniform_int_distribution<std::size_t> offset(0, source.sample_count() - window);
        const Cir cir = source.window(offset(rng), window);
        const Transmission tx = random_transmission(ofdm, rng);

        Rng noise_rng = derive_rng(cfg.seed, {kNoiseStream, t});
        CVec rx = propagate(tx, cir, ofdm, cfg.clipping).samples();
        rx += make_noise(static_cast<std::size_t>(rx.size()), tx.signal_power, noise, noise_rng, recording).samples();
        const CVec y = demodulate(rx, ofdm);

        Rng csi_rng = derive_rng(cfg.seed, {kCsiStream, t});
        const FreqChannelMatrix h = freq_matrix(perturb_csi(cir, CsiError{cfg.csi_sigma}, csi_rng), ofdm);
        const double noise_var = freq_noise_var(noise_power_for(tx.signal_power, snr_db), ofdm);

        for (std::size_t k = 0; k < m; ++k) {
            const auto start = Clock::now();
            const CVec est = detail::run_method(cfg.equalizers[k], y, h, noise_var, ctx);
            out.seconds[k] += std::chrono::duration<double>(Clock::now() - start).count();
            out.errors[k] += symbol_errors(est, tx.symbols);
        }
        out.trials = t + 1;
    }
    if (failures > 0) spdlog::warn("SNR {} dB: {} singular blocks were zero-filled", snr_db, failures.load());
    return out;
}

}  // namespace

std::size_t worker_count() {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("UWA_EQ_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw ParameterError(std::string("UWA_EQ_THREADS must be a non-negative integer, got '") +
                                                    env + "'");
    return v == 0 ? hw : static_cast<std::size_t>(v);
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::vector<Cir>& test_cirs, const UdnetModel* model) {
    cfg.validate();
    detail::check_methods(cfg.equalizers, model, cfg.block_size);
    if (test_cirs.empty()) throw ParameterError("sweep needs at least one test CIR");
    if (cfg.channel.id.find(',') != std::string::npos) throw ParameterError("channel.id must not contain commas");

    std::optional<NoiseRecording> recording;
    if (cfg.noise.kind == NoiseKind::File) recording = load_noise_samples(cfg.noise.path);

    const std::size_t jobs = cfg.snr_list_db.size();
    std::vector<PointResult> points(jobs);
    std::vector<std::exception_ptr> failures(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j; (j = next++) < jobs;) {
            try {
                points[j] = run_point(cfg, cfg.snr_list_db[j], test_cirs, model, recording ? &*recording : nullptr);
            } catch (...) {
                failures[j] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(worker_count(), jobs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    SweepResult result;
    const double n = static_cast<double>(cfg.ofdm.n_subcarriers);
    for (std::size_t j = 0; j < jobs; ++j) {
        const auto& p = points[j];
        for (std::size_t k = 0; k < cfg.equalizers.size(); ++k) {
            SweepRow row;
            row.method = cfg.equalizers[k];
            row.channel_id = cfg.channel.id;
            row.snr_db = cfg.snr_list_db[j];
            row.csi_sigma = cfg.csi_sigma;
            row.clipped = cfg.clipping.has_value();
            row.noise_kind = to_string(cfg.noise.kind);
            row.symbols_tested = p.trials * cfg.ofdm.n_subcarriers;
            row.symbol_errors = p.errors[k];
            row.ser = static_cast<double>(row.symbol_errors) / static_cast<double>(row.symbols_tested);
            row.wall_time_per_symbol = p.seconds[k] / (static_cast<double>(p.trials) * n);
            const double half = 1.96 * std::sqrt(row.ser * (1.0 - row.ser) / static_cast<double>(row.symbols_tested));
            spdlog::info("{:>9} snr {:>5} dB  SER {:.4e} +/- {:.2e} ({} errors / {} symbols)", row.method,
                         row.snr_db, row.ser, half, row.symbol_errors, row.symbols_tested);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

UdnetModel train_model(const ExperimentConfig& cfg, const std::vector<Cir>& train_cirs, TrainResult* history) {
    cfg.validate();
    Rng init_rng = derive_rng(cfg.train.seed, {0xC0FFEE});
    UdnetModel model = init_model(cfg.block_size, cfg.resolved_hidden_dim(), cfg.layers, init_rng);
    CirPoolSource source(train_cirs);
    const SlidingPlan plan = make_sliding_plan(cfg.ofdm.n_subcarriers, cfg.block_size);
    const auto start = Clock::now();
    TrainResult res = train(source, model, cfg.train, cfg.ofdm, plan, cfg.noise,
                            [&](std::size_t epoch, double loss, double acc) {
                                if (epoch % 10 == 0 || epoch + 1 == cfg.train.epochs)
                                    spdlog::info("epoch {:>4}  loss {:.5f}  accuracy {:.5f}  ({:.0f} s)", epoch, loss,
                                                 acc,
                                                 std::chrono::duration<double>(Clock::now() - start).count());
                            });
    if (history) *history = std::move(res);
    return model;
}

}  // namespace uwaeq
