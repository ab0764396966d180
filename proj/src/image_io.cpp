#include "latedit/image_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace latedit {

namespace {

void write_u16_be(std::ofstream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    out.write(bytes, 2);
}

std::uint16_t read_u16_be(std::istream& in) {
    unsigned char bytes[2];
    in.read(reinterpret_cast<char*>(bytes), 2);
    if (!in) throw std::runtime_error("netpbm: truncated sample data");
    return static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
}

// Skips whitespace and '#' comments between header tokens.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (in) {
        if (c == '#') {
            while (in && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (in && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (tok.empty()) throw std::runtime_error("netpbm: malformed header");
    return tok;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path.string());
    }
    return in;
}

}  // namespace

std::uint16_t IntensityMapping::quantize(double v) const {
    const double scaled = (v - lo) / (hi - lo) * 65535.0;
    const double clamped = std::min(65535.0, std::max(0.0, scaled));
    return static_cast<std::uint16_t>(std::lround(clamped));
}

void write_netpbm16(const std::filesystem::path& path, const LatentImage& img,
                    const IntensityMapping& mapping) {
    if (img.channels != 1 && img.channels != 3) {
        throw std::invalid_argument("write_netpbm16: needs 1 or 3 channels");
    }
    std::ofstream out = open_out(path);
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n65535\n";
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                write_u16_be(out, mapping.quantize(img.at(r, c, ch)));
            }
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

LatentImage read_netpbm16(const std::filesystem::path& path,
                          const IntensityMapping& mapping) {
    std::ifstream in = open_in(path);
    const std::string magic = next_token(in);
    int channels = 0;
    if (magic == "P6") {
        channels = 3;
    } else if (magic == "P5") {
        channels = 1;
    } else {
        throw std::runtime_error("netpbm: unsupported magic '" + magic + "' in " +
                                 path.string());
    }
    const int width = std::stoi(next_token(in));
    const int height = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (maxval != 65535) {
        throw std::runtime_error("netpbm: expected 16-bit maxval in " + path.string());
    }
    LatentImage img(height, width, channels);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                img.at(r, c, ch) = mapping.dequantize(read_u16_be(in));
            }
        }
    }
    return img;
}

void write_pgm16_map(const std::filesystem::path& path,
                     const std::vector<double>& map, int height, int width) {
    if (map.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("write_pgm16_map: size mismatch");
    }
    std::ofstream out = open_out(path);
    out << "P5\n" << width << " " << height << "\n65535\n";
    for (double v : map) {
        const double clamped = std::min(1.0, std::max(0.0, v));
        write_u16_be(out, static_cast<std::uint16_t>(std::lround(clamped * 65535.0)));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_pbm(const std::filesystem::path& path,
               const std::vector<std::uint8_t>& map, int height, int width) {
    if (map.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("write_pbm: size mismatch");
    }
    std::ofstream out = open_out(path);
    out << "P4\n" << width << " " << height << "\n";
    for (int r = 0; r < height; ++r) {
        int bit = 7;
        unsigned char byte = 0;
        for (int c = 0; c < width; ++c) {
            if (map[static_cast<std::size_t>(r) * width + c]) {
                byte |= static_cast<unsigned char>(1u << bit);
            }
            if (--bit < 0) {
                out.put(static_cast<char>(byte));
                bit = 7;
                byte = 0;
            }
        }
        if (bit != 7) out.put(static_cast<char>(byte));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::uint8_t> read_pbm(const std::filesystem::path& path, int& height,
                                   int& width) {
    std::ifstream in = open_in(path);
    if (next_token(in) != "P4") {
        throw std::runtime_error("read_pbm: not a P4 bitmap: " + path.string());
    }
    width = std::stoi(next_token(in));
    height = std::stoi(next_token(in));
    std::vector<std::uint8_t> map(static_cast<std::size_t>(height) * width, 0);
    for (int r = 0; r < height; ++r) {
        int bit = -1;
        unsigned char byte = 0;
        for (int c = 0; c < width; ++c) {
            if (bit < 0) {
                const int raw = in.get();
                if (raw == EOF) throw std::runtime_error("read_pbm: truncated data");
                byte = static_cast<unsigned char>(raw);
                bit = 7;
            }
            map[static_cast<std::size_t>(r) * width + c] =
                (byte >> bit) & 1u ? 1 : 0;
            --bit;
        }
    }
    return map;
}

LatentImage contact_sheet(const std::vector<LatentImage>& tiles, int rows,
                          int cols, double fill) {
    if (tiles.empty() || rows <= 0 || cols <= 0) {
        throw std::invalid_argument("contact_sheet: empty layout");
    }
    const LatentImage& first = tiles.front();
    for (const LatentImage& t : tiles) {
        require_same_shape(first, t, "contact_sheet");
    }
    const int th = first.height;
    const int tw = first.width;
    LatentImage sheet(rows * th + (rows - 1), cols * tw + (cols - 1),
                      first.channels, fill);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const int gr = static_cast<int>(i) / cols;
        const int gc = static_cast<int>(i) % cols;
        if (gr >= rows) break;
        const int r0 = gr * (th + 1);
        const int c0 = gc * (tw + 1);
        for (int r = 0; r < th; ++r) {
            for (int c = 0; c < tw; ++c) {
                for (int ch = 0; ch < first.channels; ++ch) {
                    sheet.at(r0 + r, c0 + c, ch) = tiles[i].at(r, c, ch);
                }
            }
        }
    }
    return sheet;
}

}  // namespace latedit
