#pragma once

// Summed-area table. Entry (x, y) of the padded table holds the sum of all
// intensities with x' < x and y' < y, so any rectangle sum costs exactly
// 4 lookups and 3 add/subtract operations.

#include <vector>

#include "emotraj/error.hpp"
#include "emotraj/image.hpp"

namespace emotraj {

struct IntegralImage {
    int width = 0;  // source image width
    int height = 0; // source image height
    // (width+1) x (height+1), zero-padded first row and column. Doubles keep
    // integer sums exact far beyond any desk-scale image (2^53 headroom).
    std::vector<double> table;

    double at(int x, int y) const { return table[static_cast<size_t>(y) * (width + 1) + x]; }
    double& at(int x, int y) { return table[static_cast<size_t>(y) * (width + 1) + x]; }
};

// Single left-to-right, top-to-bottom pass:
// I(x,y) = i(x,y) + I(x-1,y) + I(x,y-1) - I(x-1,y-1).
inline IntegralImage integral_image(const GrayImage& img) {
    IntegralImage ii;
    ii.width = img.width;
    ii.height = img.height;
    ii.table.assign(static_cast<size_t>(img.width + 1) * (img.height + 1), 0.0);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            ii.at(x + 1, y + 1) =
                img.at(x, y) + ii.at(x, y + 1) + ii.at(x + 1, y) - ii.at(x, y);
        }
    }
    return ii;
}

// Sum of intensities over the w x h rectangle whose top-left pixel is (x, y).
inline double rect_sum(const IntegralImage& ii, int x, int y, int w, int h) {
    if (w < 0 || h < 0 || x < 0 || y < 0 || x + w > ii.width || y + h > ii.height)
        fail(ErrorCode::OutOfBounds, "rectangle outside image bounds");
    return ii.at(x + w, y + h) - ii.at(x, y + h) - ii.at(x + w, y) + ii.at(x, y);
}

} // namespace emotraj
