#include "wayfind/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace wayfind::vision {

Kernel Kernel::gaussian(double sigma) {
    Kernel k;
    k.sigma = sigma;
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    int n = 2 * k.radius + 1;
    k.taps.assign(static_cast<size_t>(n) * n, 0.0);
    double sum = 0.0;
    for (int dy = -k.radius; dy <= k.radius; ++dy) {
        for (int dx = -k.radius; dx <= k.radius; ++dx) {
            double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.taps[static_cast<size_t>(dy + k.radius) * n + (dx + k.radius)] = v;
            sum += v;
        }
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

Kernel Kernel::identity() {
    Kernel k;
    k.sigma = 0.0;
    k.radius = 0;
    k.taps = {1.0};
    return k;
}

Image normalize(const Image& f) {
    Image out(f.width, f.height);
    size_t n = f.px.size();
    if (n == 0) return out;
    double mean = 0.0;
    for (double v : f.px) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : f.px) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    double sd = std::sqrt(var);
    if (sd < 1e-12) return out;  // constant image -> all zeros
    for (size_t i = 0; i < n; ++i) out.px[i] = (f.px[i] - mean) / sd;
    return out;
}

Image blur(const Image& f, const Kernel& k) {
    if (2 * k.radius + 1 > f.width || 2 * k.radius + 1 > f.height)
        throw KernelTooLarge("kernel wider than image");
    Image out(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int dy = -k.radius; dy <= k.radius; ++dy) {
                int sy = std::clamp(y + dy, 0, f.height - 1);
                for (int dx = -k.radius; dx <= k.radius; ++dx) {
                    int sx = std::clamp(x + dx, 0, f.width - 1);
                    acc += k.tap(dx, dy) * f.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

double dist(const Image& u, const Image& v, const Kernel& k) {
    if (!u.same_shape(v)) throw DimensionMismatch("dist: frame shapes differ");
    Image nu = normalize(u);
    Image nv = normalize(v);
    for (size_t i = 0; i < nu.px.size(); ++i) nu.px[i] -= nv.px[i];
    Image b = blur(nu, k);
    double acc = 0.0;
    for (double d : b.px) acc += d * d;
    return std::sqrt(acc);
}

Image average(const std::vector<Image>& frames) {
    if (frames.empty()) throw EmptyList("average: no frames");
    Image out(frames[0].width, frames[0].height);
    for (const Image& f : frames) {
        if (!f.same_shape(out)) throw DimensionMismatch("average: frame shapes differ");
        for (size_t i = 0; i < out.px.size(); ++i) out.px[i] += f.px[i];
    }
    double inv = 1.0 / static_cast<double>(frames.size());
    for (double& v : out.px) v *= inv;
    return out;
}

void save_pgm(const Image& img, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + file.string());
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (double v : img.px) {
        double c = std::clamp(v, 0.0, 1.0);
        os.put(static_cast<char>(static_cast<uint8_t>(std::lround(c * 255.0))));
    }
}

Image load_pgm(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + file.string());
    std::string magic;
    is >> magic;
    if (magic != "P5") throw std::runtime_error("not a P5 PGM: " + file.string());
    int w = 0, h = 0, maxval = 0;
    is >> w >> h >> maxval;
    if (!is || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error("bad PGM header: " + file.string());
    is.get();  // single whitespace after maxval
    Image img(w, h);
    std::vector<char> raw(static_cast<size_t>(w) * h);
    is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (is.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("truncated PGM: " + file.string());
    for (size_t i = 0; i < raw.size(); ++i)
        img.px[i] = static_cast<uint8_t>(raw[i]) / static_cast<double>(maxval);
    return img;
}

}  // namespace wayfind::vision
