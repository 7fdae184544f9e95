#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace cmbo::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  Plan(std::size_t n, int sign) : n_(n) {
    std::lock_guard lock(planner_mutex());
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, sign, FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(out_);
    fftw_free(in_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void run(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    auto* src = reinterpret_cast<std::complex<double>*>(in_);
    std::copy(in.begin(), in.end(), src);
    fftw_execute(plan_);
    const auto* dst = reinterpret_cast<const std::complex<double>*>(out_);
    std::copy(dst, dst + n_, out.begin());
  }

 private:
  std::size_t n_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

Plan& cached_plan(std::size_t n, int sign) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> forward, backward;
  auto& cache = sign == FFTW_FORWARD ? forward : backward;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<Plan>(n, sign)).first;
  }
  return *it->second;
}

}  // namespace

void dft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  cached_plan(in.size(), FFTW_FORWARD).run(in, out);
}

void dft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  cached_plan(in.size(), FFTW_BACKWARD).run(in, out);
}

}  // namespace cmbo::detail
