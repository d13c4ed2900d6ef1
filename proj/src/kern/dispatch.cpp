#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "zcsk/kern/kernels.hpp"

namespace zcsk::kern {

#ifdef ZCSK_HAVE_AVX2_TU
const Backend* avx2_impl();  // defined in avx2.cpp
#endif

const Backend* avx2_backend() {
#ifdef ZCSK_HAVE_AVX2_TU
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return avx2_impl();
  }
#endif
  return nullptr;
}

std::vector<const Backend*> available_backends() {
  std::vector<const Backend*> backends{&scalar_backend()};
  if (const Backend* avx2 = avx2_backend()) backends.push_back(avx2);
  return backends;
}

namespace {

const Backend* select_backend() {
  const char* request = std::getenv("ZCSK_KERNEL");
  if (request == nullptr || *request == '\0') {
    const Backend* avx2 = avx2_backend();
    return avx2 != nullptr ? avx2 : &scalar_backend();
  }
  const std::string name(request);
  if (name == "scalar") return &scalar_backend();
  if (name == "avx2") {
    const Backend* avx2 = avx2_backend();
    if (avx2 == nullptr) {
      throw std::runtime_error(
          "ZCSK_KERNEL=avx2 requested but AVX2 is unavailable on this "
          "build/CPU");
    }
    return avx2;
  }
  throw std::runtime_error("unknown ZCSK_KERNEL value '" + name +
                           "' (expected scalar or avx2)");
}

const Backend*& forced_backend() {
  static const Backend* forced = nullptr;
  return forced;
}

}  // namespace

void force_backend(const Backend* backend) { forced_backend() = backend; }

const Backend& active_backend() {
  if (const Backend* forced = forced_backend()) return *forced;
  static const Backend* selected = select_backend();
  return *selected;
}

}  // namespace zcsk::kern
