#include "prach/zc.hpp"

#include "prach/core.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace prach {

ZcSequence generate_zc(int root, int length) {
    if (length < 3 || length % 2 == 0)
        throw ConfigError("ZC length must be odd and >= 3, got " + std::to_string(length));
    if (root < 1 || root >= length)
        throw ConfigError("ZC root must lie in [1, length), got " + std::to_string(root));
    if (std::gcd(root, length) != 1)
        throw ConfigError("ZC root " + std::to_string(root) + " is not coprime with length " +
                          std::to_string(length));

    ZcSequence zc{root, length, {}};
    zc.samples.reserve(static_cast<std::size_t>(length));
    // u*n*(n+1) is reduced mod 2N before scaling so the phase argument stays small.
    const auto two_n = 2 * static_cast<long long>(length);
    for (long long n = 0; n < length; ++n) {
        const long long k = (static_cast<long long>(root) * ((n * (n + 1)) % two_n)) % two_n;
        const double phase = -std::numbers::pi * static_cast<double>(k) / length;
        zc.samples.emplace_back(std::cos(phase), std::sin(phase));
    }
    return zc;
}

}  // namespace prach
