// SPDX-License-Identifier: Apache-2.0
#include "kern/kernels.hpp"

// Reference kernels. These define the semantics the SIMD variants must
// reproduce bit-for-bit.

namespace wsc::kern {
namespace {

void add_(float* dst, const float* a, const float* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}
void sub_(float* dst, const float* a, const float* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}
void mul_(float* dst, const float* a, const float* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}
void fmac_(float* dst, const float* a, const float* b, float k, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    float p = b[i] * k;
    dst[i] = a[i] + p;
  }
}
void scale_(float* dst, const float* a, float k, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] * k;
}
void fill_(float* dst, float v, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = v;
}
void mov_(float* dst, const float* src, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = src[i];
}
void reduce_add_(float* dst, const float* src, int64_t reps, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = src[i];
  for (int64_t r = 1; r < reps; ++r) {
    const float* row = src + r * n;
    for (int64_t i = 0; i < n; ++i) dst[i] = dst[i] + row[i];
  }
}

} // namespace

const Kernels& scalar_ref() {
  static const Kernels k = {add_, sub_, mul_, fmac_, scale_, fill_, mov_, reduce_add_};
  return k;
}

} // namespace wsc::kern
