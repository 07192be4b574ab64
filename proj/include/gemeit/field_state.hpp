#pragma once

#include <cmath>
#include <vector>

#include "gemeit/envelope.hpp"
#include "gemeit/grid.hpp"

namespace gemeit {

// Full space-time record of the signal envelope and atomic coherences on
// the output sampling grid. Arrays are stored time-major: index
// (sample * nz + iz), so one time slice is contiguous.
struct FieldState {
    std::size_t nz = 0;
    std::size_t n_samples = 0;
    std::vector<cplx> E;
    std::vector<cplx> sigma_ge;
    std::vector<cplx> sigma_gs;

    static FieldState zeros(const SimGrid& grid) {
        FieldState st;
        st.nz = grid.nz;
        st.n_samples = grid.n_samples;
        const std::size_t n = grid.nz * grid.n_samples;
        st.E.assign(n, cplx{});
        st.sigma_ge.assign(n, cplx{});
        st.sigma_gs.assign(n, cplx{});
        return st;
    }

    std::size_t idx(std::size_t sample, std::size_t iz) const { return sample * nz + iz; }

    bool all_finite() const {
        auto ok = [](const std::vector<cplx>& v) {
            for (const auto& x : v)
                if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
            return true;
        };
        return ok(E) && ok(sigma_ge) && ok(sigma_gs);
    }
};

} // namespace gemeit
