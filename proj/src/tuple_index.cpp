#include "relmonad/tuple_index.hpp"

namespace relmonad {

TupleIndex::TupleIndex(std::vector<int> radices) : radices_(std::move(radices)) {
  stride_.assign(radices_.size(), 1);
  size_ = 1;
  for (int pos = arity() - 1; pos >= 0; --pos) {
    stride_[pos] = size_;
    size_ *= radices_[pos];
  }
}

int TupleIndex::encode(std::span<const int> tuple) const {
  int index = 0;
  for (int pos = 0; pos < arity(); ++pos) index += tuple[pos] * stride_[pos];
  return index;
}

std::vector<int> TupleIndex::decode(int index) const {
  std::vector<int> tuple(radices_.size());
  for (int pos = 0; pos < arity(); ++pos) tuple[pos] = component(index, pos);
  return tuple;
}

}  // namespace relmonad
