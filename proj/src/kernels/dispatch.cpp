#include <atomic>
#include <cstdlib>
#include <string_view>

#include "anisoflow/kernels.hpp"

namespace anisoflow::kernels {

#ifndef ANISOFLOW_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* lookup(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2" && avx2_table() != nullptr && cpu_has_avx2()) return avx2_table();
  return nullptr;
}

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("ANISOFLOW_KERNELS")) {
    if (const KernelTable* t = lookup(env)) return t;
  }
  if (const KernelTable* t = lookup("avx2")) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

std::vector<std::string_view> available() {
  std::vector<std::string_view> names{"scalar"};
  if (lookup("avx2") != nullptr) names.emplace_back("avx2");
  return names;
}

bool select(std::string_view name) {
  const KernelTable* t = lookup(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace anisoflow::kernels
