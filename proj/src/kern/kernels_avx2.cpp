// SPDX-License-Identifier: Apache-2.0

// AVX2 variants. Compiled with -mavx2 in its own translation unit; only
// reached after the runtime CPU check. Each lane performs the same two
// roundings as the scalar reference (no FMA contraction), so outputs are
// bit-identical to kernels_scalar.cpp.

#if defined(__x86_64__) || defined(_M_X64)
#include "kern/kernels.hpp"

#include <immintrin.h>

namespace wsc::kern {
namespace {

void add_(float* dst, const float* a, const float* b, int64_t n) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_(float* dst, const float* a, const float* b, int64_t n) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(dst + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_(float* dst, const float* a, const float* b, int64_t n) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(dst + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void fmac_(float* dst, const float* a, const float* b, float k, int64_t n) {
  const __m256 vk = _mm256_set1_ps(k);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 p = _mm256_mul_ps(_mm256_loadu_ps(b + i), vk);
    _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(a + i), p));
  }
  for (; i < n; ++i) {
    float p = b[i] * k;
    dst[i] = a[i] + p;
  }
}

void scale_(float* dst, const float* a, float k, int64_t n) {
  const __m256 vk = _mm256_set1_ps(k);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(dst + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), vk));
  for (; i < n; ++i) dst[i] = a[i] * k;
}

void fill_(float* dst, float v, int64_t n) {
  const __m256 vv = _mm256_set1_ps(v);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(dst + i, vv);
  for (; i < n; ++i) dst[i] = v;
}

void mov_(float* dst, const float* src, int64_t n) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(dst + i, _mm256_loadu_ps(src + i));
  for (; i < n; ++i) dst[i] = src[i];
}

void reduce_add_(float* dst, const float* src, int64_t reps, int64_t n) {
  mov_(dst, src, n);
  for (int64_t r = 1; r < reps; ++r) add_(dst, dst, src + r * n, n);
}

} // namespace

const Kernels& avx2_kernels() {
  static const Kernels k = {add_, sub_, mul_, fmac_, scale_, fill_, mov_, reduce_add_};
  return k;
}

} // namespace wsc::kern
#endif
