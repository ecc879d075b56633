#pragma once

#include <complex>
#include <vector>

namespace prach {

// Zadoff-Chu sequence of odd length N: x_u[n] = exp(-j*pi*u*n*(n+1)/N).
struct ZcSequence {
    int root = 0;
    int length = 0;
    std::vector<std::complex<double>> samples;
};

// Throws ConfigError for even or short lengths and for roots not coprime with the length.
ZcSequence generate_zc(int root, int length);

}  // namespace prach
