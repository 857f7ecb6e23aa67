// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

// Elementwise f32 kernels used by the PE simulator's vector builtins and the
// grid evaluators. Every kernel has a scalar reference implementation and an
// AVX2 variant selected once at startup; both perform the same IEEE-754
// binary32 operations per element in the same order, so results are
// bit-identical across variants (the build disables FP contraction).
//
// Strided forms address element i of a stream as base[offset + i*stride].

namespace wsc::kern {

struct Stream {
  float* base;
  int64_t offset;
  int64_t stride;
  float& at(int64_t i) const { return base[offset + i * stride]; }
};
struct ConstStream {
  const float* base;
  int64_t offset;
  int64_t stride;
  float at(int64_t i) const { return base[offset + i * stride]; }
};

struct Kernels {
  // dst[i] = a[i] + b[i]
  void (*add)(float* dst, const float* a, const float* b, int64_t n);
  // dst[i] = a[i] - b[i]
  void (*sub)(float* dst, const float* a, const float* b, int64_t n);
  // dst[i] = a[i] * b[i]
  void (*mul)(float* dst, const float* a, const float* b, int64_t n);
  // dst[i] = a[i] + b[i] * k, rounded per operation (mul then add)
  void (*fmac)(float* dst, const float* a, const float* b, float k, int64_t n);
  // dst[i] = a[i] * k
  void (*scale)(float* dst, const float* a, float k, int64_t n);
  // dst[i] = v
  void (*fill)(float* dst, float v, int64_t n);
  // dst[i] = src[i]
  void (*mov)(float* dst, const float* src, int64_t n);
  // dst[i] = src[0*n + i] + src[1*n + i] + ... + src[(reps-1)*n + i],
  // accumulated in ascending rep order.
  void (*reduce_add)(float* dst, const float* src, int64_t reps, int64_t n);
};

// Active kernel table (scalar or AVX2, chosen at load time).
const Kernels& active();
const Kernels& scalar_ref();
const char* active_name();

// Overrides runtime dispatch; "scalar" or "avx2". Returns false if the
// requested variant is unavailable on this machine.
bool force_variant(const char* name);

// Strided wrappers over the active table. Contiguous streams (stride 1) take
// the vector path; anything else falls back to scalar loops.
void add_s(Stream dst, ConstStream a, ConstStream b, int64_t n);
void sub_s(Stream dst, ConstStream a, ConstStream b, int64_t n);
void mul_s(Stream dst, ConstStream a, ConstStream b, int64_t n);
void fmac_s(Stream dst, ConstStream a, ConstStream b, float k, int64_t n);
void scale_s(Stream dst, ConstStream a, float k, int64_t n);
void fill_s(Stream dst, float v, int64_t n);
void mov_s(Stream dst, ConstStream src, int64_t n);

} // namespace wsc::kern
