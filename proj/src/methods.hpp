#pragma once

// Method-name dispatch shared by the sweep and timing harnesses.

#include "uwaeq/harness.hpp"

#include <atomic>

namespace uwaeq::detail {

struct MethodContext {
    const OfdmConfig& ofdm;
    const SlidingPlan& plan;
    const SlidingPlan& full_plan;  // one block spanning all subcarriers
    const UdnetModel* model;
    std::atomic<std::size_t>* block_failures = nullptr;
};

// Symbol estimates (hard decisions) of `method` for one OFDM symbol.
CVec run_method(const std::string& method, const CVec& y, const FreqChannelMatrix& h, double noise_var,
                const MethodContext& ctx);

void check_methods(const std::vector<std::string>& methods, const UdnetModel* model, std::size_t block_size);

}  // namespace uwaeq::detail
