#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace latedit {

// Dense H x W x C grid of real-valued intensities, row-major with the
// channel index fastest. Every latent, noise estimate and guidance image
// in the pipeline uses this representation regardless of timestep.
struct LatentImage {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    LatentImage() = default;
    LatentImage(int h, int w, int c, double fill = 0.0);

    std::size_t size() const { return data.size(); }

    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width + c) * channels + ch;
    }
    double& at(int r, int c, int ch) { return data[index(r, c, ch)]; }
    double at(int r, int c, int ch) const { return data[index(r, c, ch)]; }

    bool same_shape(const LatentImage& other) const {
        return height == other.height && width == other.width &&
               channels == other.channels;
    }
    bool all_finite() const;

    LatentImage& operator+=(const LatentImage& rhs);
    LatentImage& operator-=(const LatentImage& rhs);
    LatentImage& operator*=(double s);
};

LatentImage operator+(LatentImage lhs, const LatentImage& rhs);
LatentImage operator-(LatentImage lhs, const LatentImage& rhs);
LatentImage operator*(double s, LatentImage rhs);

double dot(const LatentImage& a, const LatentImage& b);
double norm(const LatentImage& a);

// Throws std::invalid_argument naming `what` when shapes differ.
void require_same_shape(const LatentImage& a, const LatentImage& b,
                        const char* what);

}  // namespace latedit
