#pragma once

// Central finite differences of the UDNet loss against the analytic gradient.

#include "uwaeq/udnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradcheck {

using namespace uwaeq;

struct Problem {
    UdnetModel model;
    BlockBatch batch;
    RMat labels;
};

// Random model with nonzero biases and lambdas away from 1, plus a batch of
// well-conditioned noisy blocks.
inline Problem random_problem(std::size_t block_size, std::size_t hidden, std::size_t layers, std::size_t batch,
                              Rng& rng) {
    Problem p{init_model(block_size, hidden, layers, rng), {}, {}};
    std::normal_distribution<double> nd;
    for (auto& l : p.model.layers) {
        for (auto& x : l.b1) x = 0.3 * nd(rng);
        for (auto& x : l.b2) x = 0.3 * nd(rng);
        l.lambda1 = 0.5 + 0.2 * nd(rng);
        l.lambda2 = 0.3 * nd(rng);
    }
    const auto& c = Constellation::qpsk();
    std::uniform_int_distribution<int> pick(0, 3);
    const auto b = static_cast<Eigen::Index>(block_size);
    std::vector<CVec> ys, ss;
    std::vector<CMat> hs;
    for (std::size_t i = 0; i < batch; ++i) {
        CMat h(b, b);
        for (auto& x : h.reshaped()) x = 0.5 * cd(nd(rng), nd(rng));
        h.diagonal().array() += 1.0;
        CVec s(b);
        for (auto& x : s) x = c.points[static_cast<std::size_t>(pick(rng))];
        CVec y = h * s;
        for (auto& x : y) x += 0.1 * cd(nd(rng), nd(rng));
        ys.push_back(std::move(y));
        hs.push_back(std::move(h));
        ss.push_back(std::move(s));
    }
    p.batch = make_block_batch(ys, hs);
    p.labels = make_labels(ss);
    return p;
}

struct Report {
    double max_relative = 0.0;  // denominator floored at the resolvable gradient size
    double max_relative_unfloored = 0.0;
    double resolution = 0.0;  // absolute roundoff bound of one central difference
    std::size_t unresolved = 0;  // parameters with |gradient| below resolution / tolerance
    std::size_t parameters = 0;
};

inline constexpr double kTolerance = 1e-5;

// A central difference of a double-precision loss L cannot resolve gradients
// to better than about 2 eps |L| / (2 step); gradients smaller than that
// bound divided by the tolerance are compared against it absolutely.
inline Report check(Problem& p, double step = 1e-5) {
    const UdnetGradients g = backward(p.model, forward(p.model, p.batch), p.labels);
    auto loss = [&] { return loss_kl(forward(p.model, p.batch), p.labels); };
    Report r;
    r.resolution = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(loss()) / (2.0 * step);
    const double floor = r.resolution / kTolerance;
    auto one = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + step;
        const double up = loss();
        param = saved - step;
        const double down = loss();
        param = saved;
        const double fd = (up - down) / (2 * step);
        const double diff = std::abs(fd - analytic);
        const double size = std::max(std::abs(fd), std::abs(analytic));
        r.max_relative = std::max(r.max_relative, diff / std::max(size, floor));
        r.max_relative_unfloored = std::max(r.max_relative_unfloored, diff / std::max(size, 1e-300));
        r.unresolved += size < floor;
        ++r.parameters;
    };
    for (std::size_t m = 0; m < p.model.layer_count(); ++m) {
        auto& l = p.model.layers[m];
        const auto& d = g.layers[m];
        for (Eigen::Index i = 0; i < l.w1.size(); ++i) one(l.w1.data()[i], d.w1.data()[i]);
        for (Eigen::Index i = 0; i < l.b1.size(); ++i) one(l.b1.data()[i], d.b1.data()[i]);
        for (Eigen::Index i = 0; i < l.w2.size(); ++i) one(l.w2.data()[i], d.w2.data()[i]);
        for (Eigen::Index i = 0; i < l.b2.size(); ++i) one(l.b2.data()[i], d.b2.data()[i]);
        one(l.lambda1, d.lambda1);
        one(l.lambda2, d.lambda2);
    }
    return r;
}

}  // namespace gradcheck
