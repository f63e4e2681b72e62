#include <cstdlib>
#include <cstring>

#include "nafd/kernels.hpp"

namespace nafd::kernels {
namespace {

bool scalar_forced() {
    const char* env = std::getenv("NAFD_FORCE_SCALAR");
    return env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0';
}

}  // namespace

Isa active_isa() {
    static const Isa isa = (!scalar_forced() && avx2_table() != nullptr) ? Isa::Avx2 : Isa::Scalar;
    return isa;
}

const KernelTable& active() {
    static const KernelTable& table = active_isa() == Isa::Avx2 ? *avx2_table() : scalar_table();
    return table;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace nafd::kernels
