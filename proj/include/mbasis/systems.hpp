#pragma once

#include "mbasis/biorth.hpp"

namespace mbasis {

/// (e_n, e_n), n = 1..n, in dimension n.
System canonical_system(int n, ToleranceConfig tol = {});

/// x_n = e_n + coupling * e_{n+1} for n < size, x_size = e_size, with the
/// exact biorthogonal functionals. A complete, norming, non-orthogonal test
/// system whose head spans leak into the following coordinate.
System coupled_system(int size, double coupling, ToleranceConfig tol = {});

/// Biorthogonal completion of arbitrary independent vectors inside their own
/// span (the unique dual sequence of a complete minimal system).
System system_from_vectors(const Matrix& xs, ToleranceConfig tol = {});

/// Gram-Schmidt orthonormalization of `xs` in order: z_n = z_n^* orthonormal
/// with span{z_1..z_m} = span{x_1..x_m} for every m.
System gram_schmidt_system(const Matrix& xs, ToleranceConfig tol = {});

}  // namespace mbasis
