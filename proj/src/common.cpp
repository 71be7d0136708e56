// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "common.h"

#include <cstdlib>
#include <thread>

namespace hr {

int worker_count() {
  if (const char* env = std::getenv("HYBRIDRENDER_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

}  // namespace hr
