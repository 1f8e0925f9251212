#include "cifti/volume.hpp"

#include <string>

namespace cifti {

void HSVolume::validate() const {
  if(shape && shape->nx * shape->ny != X.cols())
    throw DimensionError("HS volume: spatial shape " + std::to_string(shape->nx) + "x"
                         + std::to_string(shape->ny) + " does not match " + std::to_string(X.cols())
                         + " pixels");
  if(!X.allFinite())
    throw DomainError("HS volume: non-finite entries");
}

} // namespace cifti
