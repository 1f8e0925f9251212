#ifndef CIFTI_TYPES_HPP
#define CIFTI_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cifti {

using t_real = double;
using t_complex = std::complex<t_real>;
using t_index = Eigen::Index;

template <class T> using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T> using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using RealVector = Vector<t_real>;
using ComplexVector = Vector<t_complex>;
using RealMatrix = Matrix<t_real>;
using ComplexMatrix = Matrix<t_complex>;

//! Orthonormal 1-D bases used for sensing (Phi) and sparsity (Psi).
enum class Basis { dft, dhw };

//! Reconstruction approaches, each with its own constraint scaling and error-bound constants.
enum class Approach { initial_vds, mls_this_work };

std::string_view to_string(Basis basis);
std::string_view to_string(Approach approach);
Basis parse_basis(std::string_view name);
Approach parse_approach(std::string_view name);

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Transform or scheme length is not a supported size.
class SizeError : public Error {
public:
  using Error::Error;
};

//! Operands have incompatible shapes.
class DimensionError : public Error {
public:
  using Error::Error;
};

//! An argument lies outside its admissible range.
class DomainError : public Error {
public:
  using Error::Error;
};

//! Input data could not be parsed.
class ParseError : public Error {
public:
  using Error::Error;
};

//! Brute-force enumeration would exceed the configured cap.
class EnumerationCapError : public Error {
public:
  using Error::Error;
};

//! File system failure.
class IoError : public Error {
public:
  using Error::Error;
};

inline bool is_power_of_two(t_index n) { return n >= 1 && (n & (n - 1)) == 0; }

//! log2 of a power of two; throws SizeError otherwise.
int log2_exact(t_index n);

} // namespace cifti

#endif
