#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ncg::cli {

/// out[i] = f(in[i]) on up to `workers` threads; order follows the input.
template <class In, class F>
auto parallel_map(const std::vector<In>& in, int workers, F f) -> std::vector<decltype(f(in.front()))> {
  using Out = decltype(f(in.front()));
  std::vector<Out> out(in.size());
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto run = [&] {
    for (size_t i = next++; i < in.size(); i = next++) {
      try {
        out[i] = f(in[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(in.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace ncg::cli
