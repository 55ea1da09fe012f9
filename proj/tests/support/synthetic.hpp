#pragma once

// Small HAR-shaped datasets for tests: six classes that differ in gravity
// direction, oscillation frequency and amplitude, plus Gaussian noise.

#include "ngrc/har.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ngrc::testing {

inline Dataset synthetic_har(std::size_t windows, std::size_t steps, Split split, std::uint64_t seed,
                             double noise = 0.15)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    Dataset d;
    d.split = split;
    d.windows.reserve(windows);
    for (std::size_t w = 0; w < windows; ++w) {
        const int label = static_cast<int>(w % kHarClassCount) + 1;
        const double freq = 0.05 + 0.04 * (label <= 3 ? label : 0);
        const double amp = label <= 3 ? 0.3 + 0.1 * label : 0.02;
        const Eigen::Vector3d gravity = label == 6 ? Eigen::Vector3d(0.1, 0.2, 0.95)
                                        : label == 4 ? Eigen::Vector3d(0.7, 0.3, 0.6)
                                                     : Eigen::Vector3d(0.95, -0.2, 0.1);
        const double ph = phase(gen);
        Window win;
        win.label = label;
        win.samples.resize(3, static_cast<Eigen::Index>(steps));
        for (std::size_t t = 0; t < steps; ++t) {
            const double s = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) + ph);
            for (int a = 0; a < 3; ++a) {
                win.samples(a, static_cast<Eigen::Index>(t)) =
                    gravity(a) + s * (a == 0 ? 1.0 : 0.5) + noise * gauss(gen);
            }
        }
        d.windows.push_back(std::move(win));
    }
    return d;
}

} // namespace ngrc::testing
