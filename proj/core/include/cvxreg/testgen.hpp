#pragma once
#include <cstdint>

#include "cvxreg/types.hpp"

namespace cvxreg {

/// Seeded synthetic instances. The seed fully determines the dataset: each
/// array is filled from its own named sub-stream (tags: Lambda=1, x=2, eps=3,
/// p=4, affine=5) of a xoshiro256++ generator, in row-major order, one normal
/// draw per two uniforms (see rng.hpp).
struct GeneratorSpec {
  enum class Kind { quadratic, exponential, affine_noiseless, custom_1d };
  Kind kind = Kind::quadratic;
  Index n = 1;
  Index N = 0;
  double noise = 1.0;
  std::uint64_t seed = 1;
};

/// quadratic:        y_l = 1/2 x_l^T Lambda^T Lambda x_l + noise * eps_l,
///                   Lambda and x iid N(0,1)
/// exponential:      y_l = exp(p^T x_l) + noise * eps_l, p iid U[0,1)
/// affine_noiseless: y_l = a + b^T x_l exactly, (a, b) iid N(0,1)
/// custom_1d:        x_l = l on {0..N-1}, y_l = |x_l - (N-1)/2| + noise*eps_l
Dataset gen_instance(const GeneratorSpec& spec);

const char* to_string(GeneratorSpec::Kind kind);
GeneratorSpec::Kind kind_from_string(const std::string& name);

}  // namespace cvxreg
