// Copyright 2026 The symaug Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYMAUG_PERMUTATION_HPP_
#define SYMAUG_PERMUTATION_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symaug {

/// A bijection on {0, ..., n-1}, stored as its image table.
///
/// Acting on a vector follows the positional convention
///   permuted(y)[k] = y[pi(k)],
/// so applying `a` and then `b` to a vector equals applying `a.compose(b)`,
/// where `a.compose(b)(k) = a(b(k))`.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
    if (!is_bijection(image_)) {
      throw std::invalid_argument("Permutation: image table is not a bijection");
    }
  }
  Permutation(std::initializer_list<int> image)
      : Permutation(std::vector<int>(image)) {}

  static Permutation identity(std::size_t n) {
    std::vector<int> image(n);
    for (std::size_t i = 0; i < n; ++i) image[i] = static_cast<int>(i);
    Permutation p;
    p.image_ = std::move(image);
    return p;
  }

  /// Swaps a and b, fixes everything else.
  static Permutation transposition(std::size_t n, int a, int b) {
    Permutation p = identity(n);
    std::swap(p.image_.at(a), p.image_.at(b));
    return p;
  }

  static bool is_bijection(std::span<const int> image) {
    std::vector<char> seen(image.size(), 0);
    for (int v : image) {
      if (v < 0 || static_cast<std::size_t>(v) >= image.size() || seen[v]) {
        return false;
      }
      seen[v] = 1;
    }
    return true;
  }

  std::size_t size() const { return image_.size(); }
  int operator()(int i) const { return image_[i]; }
  const std::vector<int>& image() const { return image_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i) {
      if (image_[i] != static_cast<int>(i)) return false;
    }
    return true;
  }

  Permutation inverse() const {
    Permutation p;
    p.image_.resize(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) {
      p.image_[image_[i]] = static_cast<int>(i);
    }
    return p;
  }

  /// (this o other)(k) = this(other(k)).
  Permutation compose(const Permutation& other) const {
    if (other.size() != size()) {
      throw std::invalid_argument("Permutation::compose: size mismatch");
    }
    Permutation p;
    p.image_.resize(image_.size());
    for (std::size_t k = 0; k < image_.size(); ++k) {
      p.image_[k] = image_[other.image_[k]];
    }
    return p;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < image_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(image_[i]);
    }
    return s + "]";
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

/// Returns pi^v(y): out[k] = y[pi(k)].
template <typename T>
std::vector<T> permute_vector(const Permutation& pi, std::span<const T> y) {
  if (pi.size() != y.size()) {
    throw std::invalid_argument("permute_vector: size mismatch");
  }
  std::vector<T> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = y[pi(static_cast<int>(k))];
  return out;
}

template <typename T>
std::vector<T> permute_vector(const Permutation& pi, const std::vector<T>& y) {
  return permute_vector(pi, std::span<const T>(y));
}

}  // namespace symaug

#endif  // SYMAUG_PERMUTATION_HPP_
