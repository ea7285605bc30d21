#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bna::kernels {

// Scalar reference exponential. Every SIMD backend mirrors its operation
// sequence exactly (same correctly-rounded primitives in the same order), so
// kernel outputs are bitwise identical across backends and trajectory
// determinism does not depend on which backend the dispatcher picks.
double ref_exp(double x);

// For n candidate points, sums the gated concentration over m beacons:
//   sums[i] = sum_j ( c_ij < tgt[j] ? c_ij : 0 ),  c_ij = exp(-|p_i - b_j|^2)
using GatedSumsFn = void (*)(const double* px, const double* py, std::size_t n,
                             const double* bx, const double* by, const double* tgt,
                             std::size_t m, double* sums);

// Raw (ungated) concentrations of every beacon at a single point.
using RawConcFn = void (*)(double x, double y, const double* bx, const double* by,
                           std::size_t m, double* out);

struct KernelTable {
    GatedSumsFn gated_sums;
    RawConcFn raw_concentrations;
    const char* name;
};

// Always available; the definition of correct behaviour.
extern const KernelTable scalar_table;

// Null when the CPU lacks AVX2+FMA (or on non-x86 builds).
const KernelTable* avx2_table_or_null();

// Currently dispatched table. Defaults to the widest backend the CPU supports.
const KernelTable& active();
const char* active_name();

// "auto", "scalar" or "avx2". Returns false (and leaves the selection
// unchanged) when the request names an unavailable backend. Process-global;
// intended to be called once at startup or from tests.
bool select_backend(std::string_view name);

std::vector<std::string> available_backends();

}  // namespace bna::kernels
