// Writes a HAR-shaped synthetic dataset (7352 train / 2947 test windows of 128
// samples) for exercising the pipeline at full size without the real data.
//
// Usage: make_synthetic_har <out_root> [seed]

#include "ngrc/har.hpp"

#include "../tests/support/synthetic.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: make_synthetic_har <out_root> [seed]\n";
        return 1;
    }
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
    using namespace ngrc;
    write_har_split(argv[1], testing::synthetic_har(kHarTrainWindows, kHarWindowLength, Split::Train, seed, 0.6));
    write_har_split(argv[1], testing::synthetic_har(kHarTestWindows, kHarWindowLength, Split::Test, seed + 1, 0.6));
    std::cout << "wrote " << argv[1] << '\n';
    return 0;
}
