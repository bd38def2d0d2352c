#include "apernet/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace apernet::kernels {

namespace {

const Ops* pick() {
  const char* mode = std::getenv("APERNET_KERNELS");
  if (mode) {
    if (std::strcmp(mode, "scalar") == 0) return &scalar_ops();
#if defined(APERNET_HAVE_AVX2)
    if (std::strcmp(mode, "avx2") == 0) return &avx2_ops();
#endif
#if defined(APERNET_HAVE_NEON)
    if (std::strcmp(mode, "neon") == 0) return &neon_ops();
#endif
    // unknown or unavailable name falls through to the probe
  }
#if defined(APERNET_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return &avx2_ops();
#endif
#if defined(APERNET_HAVE_NEON)
  return &neon_ops();
#endif
  return &scalar_ops();
}

}  // namespace

const Ops& active_ops() {
  static const Ops* ops = pick();
  return *ops;
}

std::vector<const Ops*> available_ops() {
  std::vector<const Ops*> v{&scalar_ops()};
#if defined(APERNET_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) v.push_back(&avx2_ops());
#endif
#if defined(APERNET_HAVE_NEON)
  v.push_back(&neon_ops());
#endif
  return v;
}

}  // namespace apernet::kernels
