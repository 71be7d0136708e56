// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "dataset.h"

namespace hr {

// Appendix-style training-set degradation: each train frame is blurred with
// probability `probability` by a random linear-motion kernel of size k and
// shake intensity phi.
struct SyntheticBlurSpec {
  double probability = 0.75;
  int k_min = 3, k_max = 15;          // size range [3, 16)
  double phi_min = 0.0, phi_max = 0.1;  // intensity range [0, 0.1)
  std::uint64_t seed = 0;

  void validate() const {
    if (!(probability >= 0 && probability <= 1))
      throw ParamError("blur probability must be in [0,1]");
    if (k_min < 3 || k_max >= 16 || k_min > k_max)
      throw ParamError("blur size range must stay within [3,16)");
    if (phi_min < 0 || phi_max >= 0.1 + 1e-12 || phi_min > phi_max)
      throw ParamError("blur intensity range must stay within [0,0.1)");
  }
};

// A normalized linear-motion blur kernel: a k-step line in a random
// direction with per-step shake of amplitude phi, bilinearly rasterized.
Image<double> make_motion_kernel(int k, double phi, Rng& rng);

// Convolves with a random motion kernel (reflective borders, output clamped
// to [0,1]). Deterministic for a fixed seed.
Image<float> synthesize_motion_blur(const Image<float>& image, int k, double phi,
                                    std::uint64_t seed);

struct BlurEvent {
  int frame_index = 0;
  bool blurred = false;
  int k = 0;
  double phi = 0;
};

// Applies the recipe to every train frame of the dataset in place.
std::vector<BlurEvent> apply_synthetic_blur(SceneDataset& dataset, const SyntheticBlurSpec& spec);

// Correlation-style filtering with reflect-101 borders; kernel dims odd.
Image<float> convolve_reflect(const Image<float>& image, const Image<double>& kernel);

}  // namespace hr
