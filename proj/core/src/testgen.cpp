#include "cvxreg/testgen.hpp"

#include <cmath>
#include <stdexcept>

#include "cvxreg/rng.hpp"

namespace cvxreg {

namespace {

constexpr std::uint64_t kTagLambda = 1;
constexpr std::uint64_t kTagX = 2;
constexpr std::uint64_t kTagEps = 3;
constexpr std::uint64_t kTagP = 4;
constexpr std::uint64_t kTagAffine = 5;

MatrixXd normal_matrix(std::uint64_t seed, std::uint64_t tag, Index rows,
                       Index cols) {
  Xoshiro256pp gen = rng_stream(seed, tag);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)       // row-major fill order
    for (Index j = 0; j < cols; ++j) m(i, j) = gen.normal();
  return m;
}

VectorXd normal_vector(std::uint64_t seed, std::uint64_t tag, Index size) {
  Xoshiro256pp gen = rng_stream(seed, tag);
  VectorXd v(size);
  for (Index i = 0; i < size; ++i) v(i) = gen.normal();
  return v;
}

}  // namespace

Dataset gen_instance(const GeneratorSpec& spec) {
  if (spec.N < spec.n + 1)
    throw std::invalid_argument("generator: need N >= n+1");
  if (spec.n < 1) throw std::invalid_argument("generator: need n >= 1");

  Dataset data;
  switch (spec.kind) {
    case GeneratorSpec::Kind::quadratic: {
      const MatrixXd Lambda = normal_matrix(spec.seed, kTagLambda, spec.n, spec.n);
      const MatrixXd Q = Lambda.transpose() * Lambda;
      data.xs = normal_matrix(spec.seed, kTagX, spec.N, spec.n);
      const VectorXd eps = normal_vector(spec.seed, kTagEps, spec.N);
      data.ys.resize(spec.N);
      for (Index l = 0; l < spec.N; ++l) {
        const VectorXd x = data.xs.row(l).transpose();
        data.ys(l) = 0.5 * x.dot(Q * x) + spec.noise * eps(l);
      }
      break;
    }
    case GeneratorSpec::Kind::exponential: {
      data.xs = normal_matrix(spec.seed, kTagX, spec.N, spec.n);
      const VectorXd eps = normal_vector(spec.seed, kTagEps, spec.N);
      Xoshiro256pp pgen = rng_stream(spec.seed, kTagP);
      VectorXd p(spec.n);
      for (Index j = 0; j < spec.n; ++j) p(j) = pgen.uniform();
      data.ys.resize(spec.N);
      for (Index l = 0; l < spec.N; ++l)
        data.ys(l) = std::exp(p.dot(data.xs.row(l).transpose())) +
                     spec.noise * eps(l);
      break;
    }
    case GeneratorSpec::Kind::affine_noiseless: {
      data.xs = normal_matrix(spec.seed, kTagX, spec.N, spec.n);
      const VectorXd coef = normal_vector(spec.seed, kTagAffine, spec.n + 1);
      data.ys = VectorXd::Constant(spec.N, coef(0)) + data.xs * coef.tail(spec.n);
      break;
    }
    case GeneratorSpec::Kind::custom_1d: {
      if (spec.n != 1) throw std::invalid_argument("custom-1d: n must be 1");
      data.xs.resize(spec.N, 1);
      for (Index l = 0; l < spec.N; ++l) data.xs(l, 0) = static_cast<double>(l);
      const VectorXd eps = normal_vector(spec.seed, kTagEps, spec.N);
      const double mid = 0.5 * static_cast<double>(spec.N - 1);
      data.ys.resize(spec.N);
      for (Index l = 0; l < spec.N; ++l)
        data.ys(l) = std::abs(data.xs(l, 0) - mid) + spec.noise * eps(l);
      break;
    }
  }
  validate_dataset(data);
  return data;
}

const char* to_string(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::quadratic: return "quadratic";
    case GeneratorSpec::Kind::exponential: return "exponential";
    case GeneratorSpec::Kind::affine_noiseless: return "affine-noiseless";
    case GeneratorSpec::Kind::custom_1d: return "custom-1d";
  }
  return "unknown";
}

GeneratorSpec::Kind kind_from_string(const std::string& name) {
  if (name == "quadratic") return GeneratorSpec::Kind::quadratic;
  if (name == "exponential") return GeneratorSpec::Kind::exponential;
  if (name == "affine-noiseless") return GeneratorSpec::Kind::affine_noiseless;
  if (name == "custom-1d") return GeneratorSpec::Kind::custom_1d;
  throw std::invalid_argument("unknown generator kind: " + name);
}

}  // namespace cvxreg
