#include "latedit/latent.hpp"

#include <stdexcept>
#include <string>

namespace latedit {

LatentImage::LatentImage(int h, int w, int c, double fill)
    : height(h), width(w), channels(c) {
    if (h <= 0 || w <= 0 || c <= 0) {
        throw std::invalid_argument("LatentImage dimensions must be positive");
    }
    data.assign(static_cast<std::size_t>(h) * w * c, fill);
}

bool LatentImage::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

LatentImage& LatentImage::operator+=(const LatentImage& rhs) {
    require_same_shape(*this, rhs, "operator+=");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += rhs.data[i];
    return *this;
}

LatentImage& LatentImage::operator-=(const LatentImage& rhs) {
    require_same_shape(*this, rhs, "operator-=");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= rhs.data[i];
    return *this;
}

LatentImage& LatentImage::operator*=(double s) {
    for (double& v : data) v *= s;
    return *this;
}

LatentImage operator+(LatentImage lhs, const LatentImage& rhs) {
    lhs += rhs;
    return lhs;
}

LatentImage operator-(LatentImage lhs, const LatentImage& rhs) {
    lhs -= rhs;
    return lhs;
}

LatentImage operator*(double s, LatentImage rhs) {
    rhs *= s;
    return rhs;
}

double dot(const LatentImage& a, const LatentImage& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
    return acc;
}

double norm(const LatentImage& a) { return std::sqrt(dot(a, a)); }

void require_same_shape(const LatentImage& a, const LatentImage& b,
                        const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                    std::to_string(a.height) + "x" +
                                    std::to_string(a.width) + "x" +
                                    std::to_string(a.channels) + " vs " +
                                    std::to_string(b.height) + "x" +
                                    std::to_string(b.width) + "x" +
                                    std::to_string(b.channels) + ")");
    }
}

}  // namespace latedit
