// SPDX-License-Identifier: Apache-2.0
#include "kern/kernels.hpp"

#include <cstring>

namespace wsc::kern {

#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();
static bool have_avx2() { return __builtin_cpu_supports("avx2"); }
#else
static bool have_avx2() { return false; }
#endif

namespace {

struct Dispatch {
  const Kernels* table;
  const char* name;
  Dispatch() {
#if defined(__x86_64__) || defined(_M_X64)
    if (have_avx2()) {
      table = &avx2_kernels();
      name = "avx2";
      return;
    }
#endif
    table = &scalar_ref();
    name = "scalar";
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

} // namespace

const Kernels& active() { return *dispatch().table; }
const char* active_name() { return dispatch().name; }

bool force_variant(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    dispatch().table = &scalar_ref();
    dispatch().name = "scalar";
    return true;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (std::strcmp(name, "avx2") == 0 && have_avx2()) {
    dispatch().table = &avx2_kernels();
    dispatch().name = "avx2";
    return true;
  }
#endif
  return false;
}

namespace {
bool contiguous(const Stream& s) { return s.stride == 1; }
bool contiguous(const ConstStream& s) { return s.stride == 1; }
} // namespace

void add_s(Stream dst, ConstStream a, ConstStream b, int64_t n) {
  if (contiguous(dst) && contiguous(a) && contiguous(b)) {
    active().add(dst.base + dst.offset, a.base + a.offset, b.base + b.offset, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) dst.at(i) = a.at(i) + b.at(i);
}

void sub_s(Stream dst, ConstStream a, ConstStream b, int64_t n) {
  if (contiguous(dst) && contiguous(a) && contiguous(b)) {
    active().sub(dst.base + dst.offset, a.base + a.offset, b.base + b.offset, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) dst.at(i) = a.at(i) - b.at(i);
}

void mul_s(Stream dst, ConstStream a, ConstStream b, int64_t n) {
  if (contiguous(dst) && contiguous(a) && contiguous(b)) {
    active().mul(dst.base + dst.offset, a.base + a.offset, b.base + b.offset, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) dst.at(i) = a.at(i) * b.at(i);
}

void fmac_s(Stream dst, ConstStream a, ConstStream b, float k, int64_t n) {
  if (contiguous(dst) && contiguous(a) && contiguous(b)) {
    active().fmac(dst.base + dst.offset, a.base + a.offset, b.base + b.offset, k, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) {
    float p = b.at(i) * k;
    dst.at(i) = a.at(i) + p;
  }
}

void scale_s(Stream dst, ConstStream a, float k, int64_t n) {
  if (contiguous(dst) && contiguous(a)) {
    active().scale(dst.base + dst.offset, a.base + a.offset, k, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) dst.at(i) = a.at(i) * k;
}

void fill_s(Stream dst, float v, int64_t n) {
  if (contiguous(dst)) {
    active().fill(dst.base + dst.offset, v, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) dst.at(i) = v;
}

void mov_s(Stream dst, ConstStream src, int64_t n) {
  if (contiguous(dst) && contiguous(src)) {
    active().mov(dst.base + dst.offset, src.base + src.offset, n);
    return;
  }
  for (int64_t i = 0; i < n; ++i) dst.at(i) = src.at(i);
}

} // namespace wsc::kern
