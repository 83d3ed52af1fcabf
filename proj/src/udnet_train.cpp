#include "uwaeq/link.hpp"
#include "uwaeq/udnet.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <optional>

namespace uwaeq {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ParameterError("learning rate must be > 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ParameterError("learning-rate decay must lie in (0, 1]");
    if (batch_size == 0) throw ParameterError("batch size must be >= 1");
    if (epochs == 0 || steps_per_epoch == 0) throw ParameterError("epochs and steps per epoch must be >= 1");
    if (!std::isfinite(train_snr_db)) throw ParameterError("training SNR must be finite");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw ParameterError("Adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw ParameterError("Adam epsilon must be > 0");
}

CirPoolSource::CirPoolSource(std::vector<Cir> pool) : pool_(std::move(pool)) {
    if (pool_.empty()) throw ParameterError("CIR pool is empty");
}

Cir CirPoolSource::draw(std::size_t length, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
    const Cir& cir = pool_[pick(rng)];
    if (cir.sample_count() < length)
        throw ParameterError("CIR pool entry has " + std::to_string(cir.sample_count()) + " samples, need " +
                             std::to_string(length));
    std::uniform_int_distribution<std::size_t> offset(0, cir.sample_count() - length);
    return cir.window(offset(rng), length);
}

namespace {

struct TrainingBatch {
    BlockBatch blocks;
    RMat labels;
};

TrainingBatch make_training_batch(ChannelSource& source, const TrainConfig& cfg, const OfdmConfig& ofdm,
                                  const SlidingPlan& plan, const NoiseSpec& noise, const NoiseRecording* recording,
                                  Rng& rng) {
    std::vector<CVec> ys, symbols;
    std::vector<CMat> hs;
    ys.reserve(cfg.batch_size + plan.block_count);
    while (ys.size() < cfg.batch_size) {
        const Cir cir = source.draw(ofdm.n_subcarriers + ofdm.cp_len, rng);
        const Transmission tx = random_transmission(ofdm, rng);
        CVec rx = propagate(tx, cir, ofdm).samples();
        rx += make_noise(static_cast<std::size_t>(rx.size()), tx.signal_power, noise, rng, recording).samples();
        const CVec y = demodulate(rx, ofdm);
        auto hb = extract_blocks(freq_matrix(cir, ofdm), plan);
        auto yb = split_vector(y, plan);
        auto sb = split_vector(tx.symbols, plan);
        for (std::size_t j = 0; j < plan.block_count && ys.size() < cfg.batch_size; ++j) {
            ys.push_back(std::move(yb[j]));
            hs.push_back(std::move(hb[j]));
            symbols.push_back(std::move(sb[j]));
        }
    }
    return {make_block_batch(ys, hs), make_labels(symbols)};
}

double hard_accuracy(const RMat& q, const RMat& labels) {
    std::size_t correct = 0;
    const Eigen::Index groups = q.rows() / 4;
    for (Eigen::Index c = 0; c < q.cols(); ++c)
        for (Eigen::Index g = 0; g < groups; ++g) {
            Eigen::Index best = 0;
            q.col(c).segment<4>(4 * g).maxCoeff(&best);
            if (labels(4 * g + best, c) == 1.0) ++correct;
        }
    return static_cast<double>(correct) / static_cast<double>(q.cols() * groups);
}

}  // namespace

TrainResult train(ChannelSource& source, UdnetModel& model, const TrainConfig& cfg, const OfdmConfig& ofdm,
                  const SlidingPlan& plan, const NoiseSpec& noise, const TrainProgress& progress) {
    cfg.validate();
    ofdm.validate();
    model.validate();
    if (plan.block_size != model.block_size || plan.n != ofdm.n_subcarriers)
        throw DimensionError("train: plan (N=" + std::to_string(plan.n) + ", B=" + std::to_string(plan.block_size) +
                             ") does not match model B=" + std::to_string(model.block_size) +
                             " and N=" + std::to_string(ofdm.n_subcarriers));
    NoiseSpec train_noise = noise;
    train_noise.snr_db = cfg.train_snr_db;
    train_noise.validate();
    std::optional<NoiseRecording> recording;
    if (train_noise.kind == NoiseKind::File) recording = load_noise_samples(train_noise.path);

    AdamState adam = make_adam_state(model);
    TrainConfig step_cfg = cfg;
    TrainResult result;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        step_cfg.learning_rate = cfg.learning_rate * std::pow(cfg.lr_decay, static_cast<double>(epoch));
        double loss_sum = 0.0, acc_sum = 0.0;
        for (std::size_t step = 0; step < cfg.steps_per_epoch; ++step) {
            Rng rng = derive_rng(cfg.seed, {epoch, step});
            const auto batch = make_training_batch(source, cfg, ofdm, plan, train_noise,
                                                   recording ? &*recording : nullptr, rng);
            const ForwardTrace trace = forward(model, batch.blocks);
            const double loss = loss_kl(trace, batch.labels);
            if (!std::isfinite(loss))
                throw Error("training diverged: loss " + std::to_string(loss) + " at epoch " + std::to_string(epoch) +
                            ", step " + std::to_string(step) + " (try a smaller learning rate)");
            loss_sum += loss;
            acc_sum += hard_accuracy(trace.final_q(), batch.labels);
            adam_step(model, backward(model, trace, batch.labels), adam, step_cfg);
        }
        const double steps = static_cast<double>(cfg.steps_per_epoch);
        result.epoch_loss.push_back(loss_sum / steps);
        result.epoch_accuracy.push_back(acc_sum / steps);
        spdlog::debug("epoch {} loss {:.6f} accuracy {:.6f}", epoch, result.epoch_loss.back(),
                      result.epoch_accuracy.back());
        if (progress) progress(epoch, result.epoch_loss.back(), result.epoch_accuracy.back());
    }
    return result;
}

CVec equalize(const UdnetModel& model, const CVec& y, const FreqChannelMatrix& h, const SlidingPlan& plan) {
    model.validate();
    if (plan.block_size != model.block_size)
        throw DimensionError("equalize: plan block size " + std::to_string(plan.block_size) +
                             " does not match model block size " + std::to_string(model.block_size));
    if (static_cast<std::size_t>(y.size()) != plan.n || h.size() != plan.n)
        throw DimensionError("equalize: Y and H must have length " + std::to_string(plan.n));
    const BlockBatch batch = make_block_batch(split_vector(y, plan), extract_blocks(h, plan));

    std::optional<LayerOutput> prev;
    for (const auto& layer : model.layers) {
        const RMat& s = prev ? prev->s_next : batch.s0;
        LayerOutput out = layer_forward(layer, s, batch.hty, batch.gram, prev ? &prev->v : nullptr,
                                        prev ? &prev->logits : nullptr);
        prev = std::move(out);
    }

    const auto& c = Constellation::qpsk();
    const auto b = static_cast<Eigen::Index>(model.block_size);
    std::vector<CVec> parts(plan.block_count, CVec(b));
    for (std::size_t j = 0; j < plan.block_count; ++j)
        for (Eigen::Index k = 0; k < b; ++k) {
            Eigen::Index best = 0;
            prev->q.col(static_cast<Eigen::Index>(j)).segment<4>(4 * k).maxCoeff(&best);
            parts[j][k] = c.points[static_cast<std::size_t>(best)];
        }
    return join_vector(parts, plan);
}

}  // namespace uwaeq
