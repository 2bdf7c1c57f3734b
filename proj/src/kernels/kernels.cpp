#include "ufe/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace ufe::kernels {
namespace {

bool cpu_has_avx2()
{
#if defined(UFE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect()
{
    if (const char* env = std::getenv("UFE_KERNELS"); env && std::strcmp(env, "scalar") == 0)
        return Isa::Scalar;
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<const KernelTable*>& current()
{
    static std::atomic<const KernelTable*> t{&table(detect())};
    return t;
}

std::atomic<Isa>& current_isa()
{
    static std::atomic<Isa> isa{detect()};
    return isa;
}

} // namespace

bool available(Isa isa)
{
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
        return cpu_has_avx2();
    }
    return false;
}

const KernelTable& table(Isa isa)
{
#ifdef UFE_HAVE_AVX2
    if (isa == Isa::Avx2 && cpu_has_avx2())
        return detail::avx2_table();
#else
    (void)isa;
#endif
    return detail::scalar_table();
}

Isa active_isa() { return current_isa().load(); }

void set_active(Isa isa)
{
    if (!available(isa))
        isa = Isa::Scalar;
    current_isa().store(isa);
    current().store(&table(isa));
}

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

} // namespace ufe::kernels
