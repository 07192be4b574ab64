#include "gemeit/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace gemeit {

namespace {
// FFTW plan creation is not thread safe; execution on distinct arrays is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

void transform(std::vector<cplx>& data, int sign) {
    if (data.empty()) throw std::invalid_argument("fft: empty input");
    const int n = static_cast<int>(data.size());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}
} // namespace

void fft_forward(std::vector<cplx>& data) { transform(data, FFTW_FORWARD); }

void fft_inverse(std::vector<cplx>& data) {
    transform(data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

std::vector<double> fft_freqs(std::size_t n, double dt) {
    std::vector<double> f(n);
    const double df = 1.0 / (static_cast<double>(n) * dt);
    for (std::size_t i = 0; i < n; ++i) {
        const auto half = static_cast<long>((n - 1) / 2);
        const long k = static_cast<long>(i) <= half ? static_cast<long>(i)
                                                    : static_cast<long>(i) - static_cast<long>(n);
        f[i] = df * static_cast<double>(k);
    }
    return f;
}

} // namespace gemeit
