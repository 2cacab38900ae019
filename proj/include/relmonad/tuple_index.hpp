#pragma once

#include <span>
#include <vector>

namespace relmonad {

/// Mixed-radix encoding of tuples. The first coordinate is the most
/// significant, so encoded order is lexicographic order on tuples.
class TupleIndex {
 public:
  TupleIndex() = default;
  explicit TupleIndex(std::vector<int> radices);

  int arity() const { return static_cast<int>(radices_.size()); }
  int size() const { return size_; }
  int radix(int pos) const { return radices_[pos]; }

  int encode(std::span<const int> tuple) const;
  std::vector<int> decode(int index) const;
  int component(int index, int pos) const { return (index / stride_[pos]) % radices_[pos]; }
  int with(int index, int pos, int value) const {
    return index + (value - component(index, pos)) * stride_[pos];
  }

 private:
  std::vector<int> radices_;
  std::vector<int> stride_;
  int size_ = 1;
};

}  // namespace relmonad
