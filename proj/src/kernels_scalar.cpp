#include "bna/kernels.hpp"

#include "kernels_detail.hpp"

namespace bna::kernels {

double ref_exp(double x) { return detail::exp_core(x); }

namespace {

void gated_sums_scalar(const double* px, const double* py, std::size_t n,
                       const double* bx, const double* by, const double* tgt,
                       std::size_t m, double* sums) {
    for (std::size_t i = 0; i < n; ++i) {
        sums[i] = detail::gated_sum_point(px[i], py[i], bx, by, tgt, m);
    }
}

void raw_concentrations_scalar(double x, double y, const double* bx, const double* by,
                               std::size_t m, double* out) {
    detail::raw_point(x, y, bx, by, m, out);
}

}  // namespace

const KernelTable scalar_table = {gated_sums_scalar, raw_concentrations_scalar, "scalar"};

}  // namespace bna::kernels
