#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kairos {

/// Named, ordered real-valued features. The schema is shared between fit
/// and transform phases and never derived from data content.
struct FeatureVector {
  std::vector<std::string> schema;
  std::vector<double> values;

  void push(std::string name, double value) {
    schema.push_back(std::move(name));
    values.push_back(value);
  }

  void append(const FeatureVector& other, const std::string& prefix = "") {
    for (std::size_t i = 0; i < other.schema.size(); ++i)
      push(prefix + other.schema[i], other.values[i]);
  }

  std::size_t size() const { return values.size(); }
};

/// Sparse vector with a fixed dimensionality, entries sorted by index.
struct SparseVector {
  std::vector<std::pair<int, double>> entries;
  int dim = 0;
};

double sparse_cosine(const SparseVector& a, const SparseVector& b);

}  // namespace kairos
