// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "rfeig/common.hpp"

namespace rfeig {

/// Abstract square linear operator y = G x on complex vectors.
struct MatVecOperator {
  virtual ~MatVecOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(const cd* x, cd* y) const = 0;
};

}  // namespace rfeig
