#include "bna/kernels.hpp"

namespace bna::kernels {

#if defined(__x86_64__) || defined(__amd64__) || defined(_M_X64)
extern const KernelTable avx2_table;

namespace {
bool cpu_has_avx2_fma() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
}  // namespace

const KernelTable* avx2_table_or_null() {
    return cpu_has_avx2_fma() ? &avx2_table : nullptr;
}
#else
const KernelTable* avx2_table_or_null() { return nullptr; }
#endif

namespace {
const KernelTable* widest() {
    if (const KernelTable* t = avx2_table_or_null()) return t;
    return &scalar_table;
}

const KernelTable* g_active = widest();
}  // namespace

const KernelTable& active() { return *g_active; }

const char* active_name() { return g_active->name; }

bool select_backend(std::string_view name) {
    if (name == "auto") {
        g_active = widest();
        return true;
    }
    if (name == "scalar") {
        g_active = &scalar_table;
        return true;
    }
    if (name == "avx2") {
        if (const KernelTable* t = avx2_table_or_null()) {
            g_active = t;
            return true;
        }
        return false;
    }
    return false;
}

std::vector<std::string> available_backends() {
    std::vector<std::string> out = {"scalar"};
    if (avx2_table_or_null()) out.emplace_back("avx2");
    return out;
}

}  // namespace bna::kernels
