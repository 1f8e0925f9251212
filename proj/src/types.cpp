#include "cifti/types.hpp"

namespace cifti {

std::string_view to_string(Basis basis) { return basis == Basis::dft ? "dft" : "dhw"; }

std::string_view to_string(Approach approach) {
  return approach == Approach::initial_vds ? "initial-vds" : "mls-this-work";
}

Basis parse_basis(std::string_view name) {
  if(name == "dft")
    return Basis::dft;
  if(name == "dhw")
    return Basis::dhw;
  throw DomainError("unknown basis '" + std::string(name) + "' (expected dft or dhw)");
}

Approach parse_approach(std::string_view name) {
  if(name == "initial-vds")
    return Approach::initial_vds;
  if(name == "mls-this-work")
    return Approach::mls_this_work;
  throw DomainError("unknown approach '" + std::string(name)
                    + "' (expected initial-vds or mls-this-work)");
}

int log2_exact(t_index n) {
  if(!is_power_of_two(n))
    throw SizeError("length " + std::to_string(n) + " is not a power of two");
  int r = 0;
  while((t_index(1) << r) < n)
    ++r;
  return r;
}

} // namespace cifti
