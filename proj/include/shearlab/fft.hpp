#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace shearlab {

// Thin wrapper over FFTW complex transforms with a process-wide plan cache.
// Plans are created with FFTW_UNALIGNED so they can be executed on any
// buffer of the right size; plan creation is serialized (FFTW requirement),
// execution is concurrent-safe.
namespace fft_detail {

struct PlanKey {
    int n0;
    int n1;  // 0 for 1-d transforms
    int sign;
    bool operator<(const PlanKey& o) const {
        if (n0 != o.n0) return n0 < o.n0;
        if (n1 != o.n1) return n1 < o.n1;
        return sign < o.sign;
    }
};

class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n0, int n1, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        PlanKey key{n0, n1, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<std::complex<double>> scratch(static_cast<size_t>(n0) * (n1 > 0 ? n1 : 1));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = n1 > 0
            ? fftw_plan_dft_2d(n0, n1, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_1d(n0, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

  private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

}  // namespace fft_detail

// In-place capable; in == out is allowed.
inline void fft2(const std::complex<double>* in, std::complex<double>* out, int n0, int n1,
                 int sign) {
    fftw_plan plan = fft_detail::PlanCache::instance().get(n0, n1, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

inline void fft1(const std::complex<double>* in, std::complex<double>* out, int n, int sign) {
    fftw_plan plan = fft_detail::PlanCache::instance().get(n, 0, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace shearlab
