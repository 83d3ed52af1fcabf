#include "uwaeq/udnet.hpp"

#include "uwaeq/equalizers.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace uwaeq {

LayerParams LayerParams::zeros(std::size_t block_size, std::size_t hidden_dim) {
    const auto r = static_cast<Eigen::Index>(2 * block_size);
    const auto h = static_cast<Eigen::Index>(hidden_dim);
    const auto out = static_cast<Eigen::Index>(4 * block_size);
    LayerParams p;
    p.w1 = RMat::Zero(h, 3 * r);
    p.b1 = RVec::Zero(h);
    p.w2 = RMat::Zero(out, h);
    p.b2 = RVec::Zero(out);
    p.lambda1 = 0.0;
    p.lambda2 = 0.0;
    return p;
}

std::size_t LayerParams::parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size()) + 2;
}

std::size_t UdnetModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.parameter_count();
    return n;
}

void UdnetModel::validate() const {
    if (layers.empty()) throw DimensionError("UDNet model needs at least one layer");
    if (block_size == 0 || hidden_dim == 0) throw DimensionError("UDNet block size and hidden width must be positive");
    const auto r = static_cast<Eigen::Index>(2 * block_size);
    const auto h = static_cast<Eigen::Index>(hidden_dim);
    const auto out = static_cast<Eigen::Index>(4 * block_size);
    for (std::size_t m = 0; m < layers.size(); ++m) {
        const auto& l = layers[m];
        if (l.w1.rows() != h || l.w1.cols() != 3 * r || l.b1.size() != h || l.w2.rows() != out ||
            l.w2.cols() != h || l.b2.size() != out)
            throw DimensionError("UDNet layer " + std::to_string(m) + " does not match B=" +
                                 std::to_string(block_size) + ", hidden=" + std::to_string(hidden_dim));
        if (!l.w1.allFinite() || !l.b1.allFinite() || !l.w2.allFinite() || !l.b2.allFinite() ||
            !std::isfinite(l.lambda1) || !std::isfinite(l.lambda2))
            throw ParameterError("UDNet layer " + std::to_string(m) + " has non-finite parameters");
    }
}

UdnetModel init_model(std::size_t block_size, std::size_t hidden_dim, std::size_t layers, Rng& rng) {
    if (layers == 0) throw ParameterError("UDNet needs at least one layer");
    if (block_size == 0 || hidden_dim == 0) throw ParameterError("UDNet block size and hidden width must be positive");
    UdnetModel model;
    model.block_size = block_size;
    model.hidden_dim = hidden_dim;
    // Glorot uniform: variance 2 / (fan_in + fan_out).
    auto glorot = [&rng](RMat& w) {
        const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    };
    for (std::size_t m = 0; m < layers; ++m) {
        LayerParams p = LayerParams::zeros(block_size, hidden_dim);
        glorot(p.w1);
        glorot(p.w2);
        p.lambda1 = 1.0;
        p.lambda2 = 1.0;
        model.layers.push_back(std::move(p));
    }
    return model;
}

BlockBatch make_block_batch(const std::vector<CVec>& y_blocks, const std::vector<CMat>& h_blocks) {
    if (y_blocks.size() != h_blocks.size() || y_blocks.empty())
        throw DimensionError("make_block_batch: need matching, nonempty Y and H block lists");
    const auto b = y_blocks.front().size();
    const auto r = 2 * b;
    const auto n = static_cast<Eigen::Index>(y_blocks.size());
    BlockBatch batch;
    batch.gram.reserve(y_blocks.size());
    batch.hty.resize(r, n);
    batch.s0.resize(r, n);
    batch.zf_fallback.assign(y_blocks.size(), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& y = y_blocks[static_cast<std::size_t>(i)];
        const auto& h = h_blocks[static_cast<std::size_t>(i)];
        if (y.size() != b || h.rows() != b || h.cols() != b)
            throw DimensionError("make_block_batch: block " + std::to_string(i) + " has inconsistent size");
        batch.gram.push_back(to_stacked_real(CMat(h.adjoint() * h)));
        batch.hty.col(i) = to_stacked_real(CVec(h.adjoint() * y));
        try {
            batch.s0.col(i) = to_stacked_real(zf(y, h, static_cast<std::size_t>(i)));
        } catch (const SingularChannelError& e) {
            spdlog::warn("UDNet: {}; starting that block from zero", e.what());
            batch.s0.col(i).setZero();
            batch.zf_fallback[static_cast<std::size_t>(i)] = true;
        }
    }
    return batch;
}

RMat make_labels(const std::vector<CVec>& symbol_blocks) {
    if (symbol_blocks.empty()) throw DimensionError("make_labels: no blocks");
    const auto b = symbol_blocks.front().size();
    const auto& c = Constellation::qpsk();
    RMat labels = RMat::Zero(4 * b, static_cast<Eigen::Index>(symbol_blocks.size()));
    for (std::size_t i = 0; i < symbol_blocks.size(); ++i) {
        if (symbol_blocks[i].size() != b) throw DimensionError("make_labels: inconsistent block sizes");
        for (Eigen::Index k = 0; k < b; ++k)
            labels(4 * k + static_cast<Eigen::Index>(c.index_of(symbol_blocks[i][k])), static_cast<Eigen::Index>(i)) =
                1.0;
    }
    return labels;
}

namespace {

void softmax_groups(const RMat& logits, RMat& q) {
    q.resize(logits.rows(), logits.cols());
    const Eigen::Index groups = logits.rows() / 4;
    for (Eigen::Index c = 0; c < logits.cols(); ++c)
        for (Eigen::Index g = 0; g < groups; ++g) {
            const auto z = logits.col(c).segment<4>(4 * g);
            const double mx = z.maxCoeff();
            Eigen::Vector4d e = (z.array() - mx).exp();
            q.col(c).segment<4>(4 * g) = e / e.sum();
        }
}

// Stacked-real expectation of the constellation: rows [Re(0..B-1); Im(0..B-1)].
void soft_demap(const RMat& q, RMat& s) {
    const auto& c = Constellation::qpsk();
    const Eigen::Index b = q.rows() / 4;
    s.resize(2 * b, q.cols());
    for (Eigen::Index col = 0; col < q.cols(); ++col)
        for (Eigen::Index k = 0; k < b; ++k) {
            double re = 0.0, im = 0.0;
            for (Eigen::Index i = 0; i < 4; ++i) {
                re += q(4 * k + i, col) * c.points[static_cast<std::size_t>(i)].real();
                im += q(4 * k + i, col) * c.points[static_cast<std::size_t>(i)].imag();
            }
            s(k, col) = re;
            s(b + k, col) = im;
        }
}

}  // namespace

LayerOutput layer_forward(const LayerParams& layer, const RMat& s, const RMat& hty, const std::vector<RMat>& gram,
                          const RMat* prev_v, const RMat* prev_logits) {
    const Eigen::Index r = s.rows();
    const Eigen::Index n = s.cols();
    if (hty.rows() != r || hty.cols() != n || static_cast<Eigen::Index>(gram.size()) != n ||
        layer.w1.cols() != 3 * r || layer.w2.rows() != 2 * r)
        throw DimensionError("layer_forward: input dimensions do not match the layer");
    if ((prev_v == nullptr) != (prev_logits == nullptr))
        throw DimensionError("layer_forward: residual inputs must be given together");

    LayerOutput out;
    out.gs.resize(r, n);
    for (Eigen::Index i = 0; i < n; ++i) out.gs.col(i).noalias() = gram[static_cast<std::size_t>(i)] * s.col(i);
    out.input.resize(3 * r, n);
    out.input.topRows(r) = s;
    out.input.middleRows(r, r) = layer.lambda1 * hty;
    out.input.bottomRows(r) = layer.lambda2 * out.gs;

    RMat pre = layer.w1 * out.input;
    pre.colwise() += layer.b1;
    if (prev_v != nullptr) pre += *prev_v;
    // tanh via the vectorized exp: tanh|x| = (1 - e^{-2|x|}) / (1 + e^{-2|x|})
    const auto t = (-2.0 * pre.array().abs()).exp();
    out.v = (pre.array().sign() * (1.0 - t) / (1.0 + t)).matrix();

    out.logits.noalias() = layer.w2 * out.v;
    out.logits.colwise() += layer.b2;
    if (prev_logits != nullptr) out.logits += *prev_logits;
    softmax_groups(out.logits, out.q);
    soft_demap(out.q, out.s_next);
    return out;
}

ForwardTrace forward(const UdnetModel& model, const BlockBatch& batch) {
    model.validate();
    if (batch.size() == 0 || batch.hty.rows() != static_cast<Eigen::Index>(model.real_dim()))
        throw DimensionError("forward: batch does not match model block size");
    ForwardTrace trace;
    trace.s0 = batch.s0;
    trace.gram = batch.gram;
    trace.hty = batch.hty;
    trace.zf_fallback = batch.zf_fallback;
    trace.layers.reserve(model.layer_count());
    const RMat* s = &batch.s0;
    for (std::size_t m = 0; m < model.layer_count(); ++m) {
        const LayerOutput* prev = m == 0 ? nullptr : &trace.layers.back();
        trace.layers.push_back(layer_forward(model.layers[m], *s, batch.hty, batch.gram,
                                             prev ? &prev->v : nullptr, prev ? &prev->logits : nullptr));
        s = &trace.layers.back().s_next;
    }
    return trace;
}

namespace {

void check_labels(const RMat& labels, const ForwardTrace& trace) {
    if (trace.layers.empty()) throw DimensionError("empty forward trace");
    const auto& q = trace.final_q();
    if (labels.rows() != q.rows() || labels.cols() != q.cols())
        throw DimensionError("labels do not match the trace shape");
    for (Eigen::Index c = 0; c < labels.cols(); ++c)
        for (Eigen::Index g = 0; g < labels.rows() / 4; ++g) {
            const auto row = labels.col(c).segment<4>(4 * g);
            int ones = 0;
            for (int i = 0; i < 4; ++i) {
                if (row[i] == 1.0)
                    ++ones;
                else if (row[i] != 0.0)
                    ones = -100;
            }
            if (ones != 1)
                throw ParameterError("labels must be exact one-hot rows (block " + std::to_string(c) + ", symbol " +
                                     std::to_string(g) + ")");
        }
}

}  // namespace

double loss_kl(const ForwardTrace& trace, const RMat& labels) {
    check_labels(labels, trace);
    // -log q from the logits (log-sum-exp) with compensated summation, so
    // the loss is accurate to a few ulp; finite-difference checks rely on it.
    double total = 0.0, carry = 0.0;
    auto add = [&](double x) {
        const double t = total + x;
        carry += std::abs(total) >= std::abs(x) ? (total - t) + x : (x - t) + total;
        total = t;
    };
    for (const auto& layer : trace.layers)
        for (Eigen::Index c = 0; c < labels.cols(); ++c)
            for (Eigen::Index g = 0; g < labels.rows() / 4; ++g) {
                const auto z = layer.logits.col(c).segment<4>(4 * g);
                const auto p = labels.col(c).segment<4>(4 * g);
                const double mx = z.maxCoeff();
                Eigen::Index hot = 0;
                p.maxCoeff(&hot);
                add(std::log((z.array() - mx).exp().sum()) - (z[hot] - mx));
            }
    return (total + carry) / static_cast<double>(labels.cols());
}

UdnetGradients backward(const UdnetModel& model, const ForwardTrace& trace, const RMat& labels) {
    model.validate();
    if (trace.layers.size() != model.layer_count())
        throw DimensionError("backward: trace has " + std::to_string(trace.layers.size()) + " layers, model has " +
                             std::to_string(model.layer_count()));
    check_labels(labels, trace);
    const auto n = labels.cols();
    if (static_cast<Eigen::Index>(trace.gram.size()) != n) throw DimensionError("backward: trace lacks Gram matrices");
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto r = static_cast<Eigen::Index>(model.real_dim());
    const auto b = static_cast<Eigen::Index>(model.block_size);
    const auto& c = Constellation::qpsk();

    UdnetGradients grads = model;
    for (auto& l : grads.layers) l = LayerParams::zeros(model.block_size, model.hidden_dim);

    RMat dz_next = RMat::Zero(4 * b, n);
    RMat da_next = RMat::Zero(static_cast<Eigen::Index>(model.hidden_dim), n);
    RMat ds_next = RMat::Zero(r, n);  // gradient w.r.t. the layer's output S
    RMat dq(4 * b, n);
    for (std::size_t mi = model.layer_count(); mi-- > 0;) {
        const auto& p = model.layers[mi];
        const auto& out = trace.layers[mi];
        auto& g = grads.layers[mi];

        for (Eigen::Index col = 0; col < n; ++col)
            for (Eigen::Index k = 0; k < b; ++k)
                for (Eigen::Index i = 0; i < 4; ++i)
                    dq(4 * k + i, col) = ds_next(k, col) * c.points[static_cast<std::size_t>(i)].real() +
                                         ds_next(b + k, col) * c.points[static_cast<std::size_t>(i)].imag();

        RMat dz = (out.q - labels) * inv_n + dz_next;
        for (Eigen::Index col = 0; col < n; ++col)
            for (Eigen::Index k = 0; k < b; ++k) {
                const auto q = out.q.col(col).segment<4>(4 * k);
                const auto d = dq.col(col).segment<4>(4 * k);
                const double dot = q.dot(d);
                dz.col(col).segment<4>(4 * k) += (q.array() * (d.array() - dot)).matrix();
            }

        g.w2.noalias() = dz * out.v.transpose();
        g.b2 = dz.rowwise().sum();
        RMat da = p.w2.transpose() * dz + da_next;
        da.array() *= 1.0 - out.v.array().square();
        g.w1.noalias() = da * out.input.transpose();
        g.b1 = da.rowwise().sum();
        const RMat dx = p.w1.transpose() * da;

        const auto dx_s = dx.topRows(r);
        const auto dx_g = dx.middleRows(r, r);
        const auto dx_gs = dx.bottomRows(r);
        g.lambda1 = (dx_g.array() * trace.hty.array()).sum();
        g.lambda2 = (dx_gs.array() * out.gs.array()).sum();

        ds_next = dx_s;
        if (p.lambda2 != 0.0)
            for (Eigen::Index col = 0; col < n; ++col)
                ds_next.col(col).noalias() += p.lambda2 * (trace.gram[static_cast<std::size_t>(col)] * dx_gs.col(col));
        dz_next = std::move(dz);
        da_next = std::move(da);
    }
    return grads;
}

AdamState make_adam_state(const UdnetModel& model) {
    model.validate();
    AdamState st;
    st.m = model;
    for (auto& l : st.m.layers) l = LayerParams::zeros(model.block_size, model.hidden_dim);
    st.v = st.m;
    return st;
}

void adam_step(UdnetModel& model, const UdnetGradients& grads, AdamState& state, const TrainConfig& cfg) {
    if (grads.layer_count() != model.layer_count() || state.m.layer_count() != model.layer_count())
        throw DimensionError("adam_step: gradient and state must match the model");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2, lr = cfg.learning_rate, eps = cfg.adam_epsilon;
    auto update = [&](auto&& w, const auto& gw, auto&& m, auto&& v) {
        m = b1 * m + (1.0 - b1) * gw;
        v = b2 * v + (1.0 - b2) * gw.square();
        w -= lr * (m / c1) / ((v / c2).sqrt() + eps);
    };
    auto update_scalar = [&](double& w, double gw, double& m, double& v) {
        m = b1 * m + (1.0 - b1) * gw;
        v = b2 * v + (1.0 - b2) * gw * gw;
        w -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    };
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
        auto& w = model.layers[i];
        const auto& g = grads.layers[i];
        auto& m = state.m.layers[i];
        auto& v = state.v.layers[i];
        if (g.w1.rows() != w.w1.rows() || g.w1.cols() != w.w1.cols() || g.w2.rows() != w.w2.rows() ||
            g.w2.cols() != w.w2.cols())
            throw DimensionError("adam_step: gradient shape mismatch in layer " + std::to_string(i));
        update(w.w1.array(), g.w1.array(), m.w1.array(), v.w1.array());
        update(w.b1.array(), g.b1.array(), m.b1.array(), v.b1.array());
        update(w.w2.array(), g.w2.array(), m.w2.array(), v.w2.array());
        update(w.b2.array(), g.b2.array(), m.b2.array(), v.b2.array());
        update_scalar(w.lambda1, g.lambda1, m.lambda1, v.lambda1);
        update_scalar(w.lambda2, g.lambda2, m.lambda2, v.lambda2);
    }
}

}  // namespace uwaeq
