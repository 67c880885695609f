#include "cvxreg/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cvxreg {

void validate_dataset(const Dataset& data) {
  const Index N = data.N();
  const Index n = data.n();
  if (data.ys.size() != N)
    throw std::invalid_argument("dataset: xs/ys row count mismatch");
  if (n < 1) throw std::invalid_argument("dataset: need at least one feature");
  if (N < n + 1)
    throw std::invalid_argument("dataset: need N >= n+1 observations");
  if (!data.xs.allFinite() || !data.ys.allFinite())
    throw std::invalid_argument("dataset: non-finite entry");

  // duplicate x rows break the full-column-rank structure of A4
  std::vector<Index> order(static_cast<size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < n; ++j) {
      if (data.xs(a, j) != data.xs(b, j)) return data.xs(a, j) < data.xs(b, j);
    }
    return false;
  });
  for (size_t k = 1; k < order.size(); ++k) {
    if (data.xs.row(order[k - 1]) == data.xs.row(order[k])) {
      throw std::invalid_argument(
          "dataset: duplicate x rows (observations " +
          std::to_string(order[k - 1]) + " and " + std::to_string(order[k]) +
          ")");
    }
  }
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("empty dataset file: " + path);

  // header x1,...,xn,y
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  if (header.size() < 2 || header.back() != "y")
    throw std::invalid_argument("dataset header must be x1,...,xn,y");
  const Index n = static_cast<Index>(header.size()) - 1;
  for (Index j = 0; j < n; ++j) {
    if (header[static_cast<size_t>(j)] != "x" + std::to_string(j + 1))
      throw std::invalid_argument("dataset header must be x1,...,xn,y");
  }

  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    Index count = 0;
    while (std::getline(ss, tok, ',')) {
      size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric field '" + tok + "' in " + path);
      }
      values.push_back(v);
      ++count;
    }
    if (count != n + 1)
      throw std::invalid_argument("row with " + std::to_string(count) +
                                  " fields, expected " + std::to_string(n + 1));
    ++rows;
  }

  Dataset data;
  data.xs.resize(rows, n);
  data.ys.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < n; ++j)
      data.xs(i, j) = values[static_cast<size_t>(i * (n + 1) + j)];
    data.ys(i) = values[static_cast<size_t>(i * (n + 1) + n)];
  }
  validate_dataset(data);
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write dataset: " + path);
  for (Index j = 0; j < data.n(); ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  char buf[40];
  for (Index i = 0; i < data.N(); ++i) {
    for (Index j = 0; j < data.n(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.xs(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", data.ys(i));
    out << buf << "\n";
  }
}

Partition make_partition(const Dataset& data, Index K) {
  if (K < 1) throw std::invalid_argument("partition: K must be >= 1");
  if (data.N() % K != 0)
    throw std::invalid_argument("partition: N = " + std::to_string(data.N()) +
                                " not divisible by K = " + std::to_string(K));
  Partition part{K, data.N() / K};
  if (part.nbar < data.n() + 1)
    throw std::invalid_argument("partition: block size must be >= n+1");
  return part;
}

}  // namespace cvxreg
