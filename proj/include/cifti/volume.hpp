#ifndef CIFTI_VOLUME_HPP
#define CIFTI_VOLUME_HPP

#include "cifti/types.hpp"

#include <optional>
#include <utility>

namespace cifti {

//! Spatial layout of the pixel axis: pixel j sits at (j % nx, j / nx).
struct SpatialShape {
  t_index nx = 0;
  t_index ny = 0;
};

//! Hyperspectral cube stored as N_xi x N_p, one spectrum per column.
struct HSVolume {
  RealMatrix X;
  std::optional<SpatialShape> shape;

  t_index bands() const { return X.rows(); }
  t_index pixels() const { return X.cols(); }
  //! Throws DimensionError when the spatial shape disagrees with N_p or entries are not finite.
  void validate() const;
};

} // namespace cifti

#endif
