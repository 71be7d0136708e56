// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "blur_synth.h"

#include <cmath>

namespace hr {

Image<double> make_motion_kernel(int k, double phi, Rng& rng) {
  if (k < 3) throw ParamError("motion kernel size must be >= 3");
  if (phi < 0) throw ParamError("motion kernel intensity must be >= 0");

  const double theta = rng.uniform(0.0, 2.0 * M_PI);
  const double dx = std::cos(theta), dy = std::sin(theta);

  // Shake jitters each step along the moving direction.
  const int ksize = (k % 2 == 1 ? k : k + 1) + 2 * int(std::ceil(phi * k));
  const double center = (ksize - 1) / 2.0;
  Image<double> kernel(ksize, ksize, 1, 0.0);

  for (int s = 0; s < k; ++s) {
    const double along = s - (k - 1) / 2.0 + phi * k * rng.uniform(-1.0, 1.0);
    const double px = center + along * dx;
    const double py = center + along * dy;
    const int x0 = int(std::floor(px)), y0 = int(std::floor(py));
    const double fx = px - x0, fy = py - y0;
    auto splat = [&](int x, int y, double w) {
      if (x >= 0 && x < ksize && y >= 0 && y < ksize) kernel.at(x, y) += w;
    };
    splat(x0, y0, (1 - fx) * (1 - fy));
    splat(x0 + 1, y0, fx * (1 - fy));
    splat(x0, y0 + 1, (1 - fx) * fy);
    splat(x0 + 1, y0 + 1, fx * fy);
  }

  double sum = 0;
  for (double v : kernel.data) sum += v;
  for (double& v : kernel.data) v /= sum;
  return kernel;
}

Image<float> convolve_reflect(const Image<float>& image, const Image<double>& kernel) {
  const int rx = kernel.width / 2, ry = kernel.height / 2;
  Image<float> out(image.width, image.height, image.channels);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        double acc = 0;
        for (int oy = -ry; oy <= ry; ++oy) {
          const int sy = reflect_index(y + oy, image.height);
          for (int ox = -rx; ox <= rx; ++ox) {
            const int sx = reflect_index(x + ox, image.width);
            acc += kernel.at(ox + rx, oy + ry) * image.at(sx, sy, c);
          }
        }
        out.at(x, y, c) = float(acc);
      }
    }
  }
  return out;
}

Image<float> synthesize_motion_blur(const Image<float>& image, int k, double phi,
                                    std::uint64_t seed) {
  if (k < 3) throw ParamError("blur size k must be >= 3");
  if (phi < 0) throw ParamError("blur intensity must be >= 0");
  if (k > std::min(image.width, image.height))
    throw ParamError("blur size k exceeds the smallest image dimension");

  Rng rng = make_stream(seed, stream_tag("motion_blur"));
  const Image<double> kernel = make_motion_kernel(k, phi, rng);
  Image<float> out = convolve_reflect(image, kernel);
  for (float& v : out.data) v = clamp01(v);
  return out;
}

std::vector<BlurEvent> apply_synthetic_blur(SceneDataset& dataset,
                                            const SyntheticBlurSpec& spec) {
  spec.validate();
  std::vector<BlurEvent> events;
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    if (!dataset.is_train(i)) continue;
    Frame& fr = dataset.frames[i];
    Rng rng = make_stream(spec.seed, stream_tag("blur_recipe"), std::uint64_t(fr.index));
    BlurEvent ev;
    ev.frame_index = fr.index;
    if (rng.uniform() < spec.probability) {
      ev.blurred = true;
      ev.k = int(rng.uniform_int(spec.k_min, spec.k_max));
      ev.phi = rng.uniform(spec.phi_min, spec.phi_max);
      fr.rgb = synthesize_motion_blur(fr.rgb, ev.k, ev.phi,
                                      splitmix64(spec.seed ^ std::uint64_t(fr.index)));
    }
    events.push_back(ev);
  }
  return events;
}

}  // namespace hr
