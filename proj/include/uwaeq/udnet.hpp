#pragma once

#include "uwaeq/channel.hpp"
#include "uwaeq/noise.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace uwaeq {

// One unfolded layer. With B complex symbols per block and R = 2B:
//   v  = tanh(w1 [S; lambda1 H^T Y; lambda2 H^T H S] + b1 (+ v_prev))
//   z  = w2 v + b2 (+ z_prev),   q = softmax over each group of 4 rows of z
//   S' = stacked-real expectation of the constellation under q
struct LayerParams {
    RMat w1;  // hidden x 3R
    RVec b1;  // hidden
    RMat w2;  // 4B x hidden
    RVec b2;  // 4B
    double lambda1 = 1.0;
    double lambda2 = 1.0;

    static LayerParams zeros(std::size_t block_size, std::size_t hidden_dim);
    std::size_t parameter_count() const;
};

struct UdnetModel {
    std::vector<LayerParams> layers;
    std::size_t block_size = 0;
    std::size_t hidden_dim = 0;

    std::size_t layer_count() const noexcept { return layers.size(); }
    std::size_t real_dim() const noexcept { return 2 * block_size; }
    std::size_t parameter_count() const;
    // Throws DimensionError unless every layer has the shapes implied by B and hidden_dim.
    void validate() const;
};

// Gradients share the model's shape.
using UdnetGradients = UdnetModel;

inline constexpr std::size_t kDefaultHiddenPerSymbol = 8;

UdnetModel init_model(std::size_t block_size, std::size_t hidden_dim, std::size_t layers, Rng& rng);

// A batch of blocks in stacked-real form, one column per block.
struct BlockBatch {
    std::vector<RMat> gram;  // H^T H per block, R x R
    RMat hty;                // H^T Y, R x batch
    RMat s0;                 // ZF start, R x batch
    std::vector<bool> zf_fallback;

    std::size_t size() const noexcept { return gram.size(); }
};

// Builds the stacked-real inputs; a singular block starts from S0 = 0 and is flagged.
BlockBatch make_block_batch(const std::vector<CVec>& y_blocks, const std::vector<CMat>& h_blocks);

// One-hot labels (4B x batch) for the transmitted symbols of each block.
RMat make_labels(const std::vector<CVec>& symbol_blocks);

struct LayerOutput {
    RMat input;   // concatenated [S; lambda1 H^T Y; lambda2 H^T H S], 3R x batch
    RMat gs;      // H^T H S, R x batch
    RMat v;       // tanh output, hidden x batch
    RMat logits;  // residual-summed pre-softmax, 4B x batch
    RMat q;       // per-symbol probabilities, 4B x batch
    RMat s_next;  // soft-demapped stacked-real estimate, R x batch
};

// prev_v / prev_logits are null for the first layer.
LayerOutput layer_forward(const LayerParams& layer, const RMat& s, const RMat& hty, const std::vector<RMat>& gram,
                          const RMat* prev_v, const RMat* prev_logits);

struct ForwardTrace {
    std::vector<LayerOutput> layers;
    RMat s0;
    std::vector<RMat> gram;  // copied from the batch so backward is self-contained
    RMat hty;
    std::vector<bool> zf_fallback;

    const RMat& final_q() const { return layers.back().q; }
};

ForwardTrace forward(const UdnetModel& model, const BlockBatch& batch);

// Batch mean of the per-layer cross entropies summed over layers and symbols.
double loss_kl(const ForwardTrace& trace, const RMat& labels);

// Exact gradient of loss_kl with respect to every parameter.
UdnetGradients backward(const UdnetModel& model, const ForwardTrace& trace, const RMat& labels);

struct TrainConfig {
    double learning_rate = 1e-3;
    double lr_decay = 1.0;  // multiplies the learning rate after every epoch
    std::size_t batch_size = 2000;
    std::size_t epochs = 200;
    std::size_t steps_per_epoch = 50;
    double train_snr_db = 25.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 1;

    void validate() const;
};

struct AdamState {
    UdnetModel m;
    UdnetModel v;
    std::size_t step = 0;
};

AdamState make_adam_state(const UdnetModel& model);
void adam_step(UdnetModel& model, const UdnetGradients& grads, AdamState& state, const TrainConfig& cfg);

// Source of training channels; draw() returns a response covering at least
// one CP-extended OFDM symbol.
class ChannelSource {
public:
    virtual ~ChannelSource() = default;
    virtual Cir draw(std::size_t length, Rng& rng) = 0;
};

// Uniformly picks a response from a fixed pool and a random window inside it.
class CirPoolSource : public ChannelSource {
public:
    explicit CirPoolSource(std::vector<Cir> pool);
    Cir draw(std::size_t length, Rng& rng) override;

private:
    std::vector<Cir> pool_;
};

struct TrainResult {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_accuracy;  // hard decisions of the last layer
};

using TrainProgress = std::function<void(std::size_t epoch, double loss, double accuracy)>;

TrainResult train(ChannelSource& source, UdnetModel& model, const TrainConfig& cfg, const OfdmConfig& ofdm,
                  const SlidingPlan& plan, const NoiseSpec& noise, const TrainProgress& progress = {});

// Hard decisions for a whole OFDM symbol, block by block.
CVec equalize(const UdnetModel& model, const CVec& y, const FreqChannelMatrix& h, const SlidingPlan& plan);

void save_model(const UdnetModel& model, const std::filesystem::path& path);
UdnetModel load_model(const std::filesystem::path& path);

}  // namespace uwaeq
