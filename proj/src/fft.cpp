#include "uwaeq/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace uwaeq::fft {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // The planner is not thread safe; the scratch arrays only shape the plan.
        auto* a = fftw_alloc_complex(n);
        auto* b = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(a);
        fftw_free(b);
        if (plan == nullptr) throw Error("FFTW failed to create a plan of length " + std::to_string(n));
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void run(const cd* in, cd* out, std::size_t n, int sign) {
    if (n == 0) return;
    fftw_plan plan = cache().get(n, sign);
    // fftw_execute_dft never writes to `in` for out-of-place plans.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(const cd* in, cd* out, std::size_t n) {
    if (in == out) {
        CVec tmp = Eigen::Map<const CVec>(in, static_cast<Eigen::Index>(n));
        run(tmp.data(), out, n, FFTW_FORWARD);
        return;
    }
    run(in, out, n, FFTW_FORWARD);
}

void backward(const cd* in, cd* out, std::size_t n) {
    if (in == out) {
        CVec tmp = Eigen::Map<const CVec>(in, static_cast<Eigen::Index>(n));
        run(tmp.data(), out, n, FFTW_BACKWARD);
        return;
    }
    run(in, out, n, FFTW_BACKWARD);
}

CVec forward(const CVec& x) {
    CVec out(x.size());
    forward(x.data(), out.data(), static_cast<std::size_t>(x.size()));
    return out;
}

CVec backward(const CVec& x) {
    CVec out(x.size());
    backward(x.data(), out.data(), static_cast<std::size_t>(x.size()));
    return out;
}

}  // namespace uwaeq::fft
