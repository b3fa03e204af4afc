#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wayfind::vision {

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct KernelTooLarge : std::runtime_error {
    explicit KernelTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyList : std::runtime_error {
    explicit EmptyList(const std::string& what) : std::runtime_error(what) {}
};

/// Grayscale raster. Rendered frames keep pixels in [0,1]; intermediate
/// fields (normalized images, differences) are unbounded reals.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> px;  // row-major, px[y * width + x]

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), px(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return px[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return px[static_cast<size_t>(y) * width + x]; }

    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

/// Separable 2D Gaussian stored as a full (2k+1)^2 tap grid, k = ceil(3*sigma).
/// Taps are normalized to sum to 1.
struct Kernel {
    double sigma = 1.5;
    int radius = 0;  // k
    std::vector<double> taps;  // (2k+1) x (2k+1), row-major

    static Kernel gaussian(double sigma);

    /// Single-tap identity kernel (k = 0).
    static Kernel identity();

    double tap(int dx, int dy) const {
        int n = 2 * radius + 1;
        return taps[static_cast<size_t>(dy + radius) * n + (dx + radius)];
    }
};

/// Per-image standardization: subtract mean, divide by population std.
/// A (near-)constant image (std < 1e-12) maps to all zeros.
Image normalize(const Image& f);

/// 2D convolution with edge-clamp (replicate border) padding.
Image blur(const Image& f, const Kernel& k);

/// dist(u, v) = || blur(normalize(u) - normalize(v)) ||_2 over pixels.
double dist(const Image& u, const Image& v, const Kernel& k);

/// Pixelwise arithmetic mean of a nonempty list of equal-shape images.
Image average(const std::vector<Image>& frames);

/// Binary PGM (P5), 8-bit. Saving clamps to [0,1] and rounds; loading
/// rescales to [0,1].
void save_pgm(const Image& img, const std::filesystem::path& file);
Image load_pgm(const std::filesystem::path& file);

}  // namespace wayfind::vision
