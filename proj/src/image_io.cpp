#include "voidd/image_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "voidd/error.hpp"

namespace voidd {

namespace {

[[noreturn]] void format_error(std::size_t offset, const std::string& what) {
    throw Error(ErrorKind::Format, "PGM byte " + std::to_string(offset) + ": " + what);
}

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    void expect_magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P') format_error(0, "missing PGM magic");
        if (bytes_[1] != '5') format_error(1, std::string("unsupported PGM variant P") + bytes_[1]);
        pos_ = 2;
    }

    int read_int(const char* name) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) format_error(start, std::string(name) + " too large");
            ++pos_;
        }
        if (pos_ == start) {
            if (pos_ >= bytes_.size()) format_error(pos_, std::string("truncated header before ") + name);
            format_error(pos_, std::string("expected ") + name);
        }
        return static_cast<int>(value);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void expect_single_space() {
        if (pos_ >= bytes_.size()) format_error(pos_, "truncated header after maxval");
        if (!std::isspace(static_cast<unsigned char>(bytes_[pos_]))) format_error(pos_, "expected whitespace");
        ++pos_;
    }

    [[nodiscard]] std::size_t pos() const { return pos_; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

PgmHeader parse_header(std::string_view bytes) {
    HeaderReader r(bytes);
    r.expect_magic();
    PgmHeader h;
    h.width = r.read_int("width");
    h.height = r.read_int("height");
    const std::size_t maxval_pos = r.pos();
    h.maxval = r.read_int("maxval");
    r.expect_single_space();
    if (h.width < 1 || h.height < 1) format_error(maxval_pos, "image dimensions must be positive");
    if (h.maxval != 255 && h.maxval != 65535) {
        format_error(maxval_pos, "unsupported maxval " + std::to_string(h.maxval));
    }
    h.data_offset = r.pos();
    return h;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

GrayImage decode_pgm(std::string_view bytes) {
    const PgmHeader h = parse_header(bytes);
    const int bytes_per_sample = h.maxval == 255 ? 1 : 2;
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    const std::size_t need = n * bytes_per_sample;
    if (bytes.size() - h.data_offset < need) {
        format_error(bytes.size(), "truncated payload: expected " + std::to_string(need) + " bytes, found " +
                                       std::to_string(bytes.size() - h.data_offset));
    }
    GrayImage img(h.width, h.height, bytes_per_sample == 1 ? 8 : 16);
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
    for (std::size_t i = 0; i < n; ++i) {
        img.pixels[i] = bytes_per_sample == 1 ? data[i]
                                              : static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]);
    }
    return img;
}

std::string encode_pgm(const GrayImage& img) {
    img.validate();
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                      std::to_string(img.max_value()) + "\n";
    const std::size_t header = out.size();
    if (img.bit_depth == 8) {
        out.resize(header + img.size());
        for (std::size_t i = 0; i < img.size(); ++i) out[header + i] = static_cast<char>(img.pixels[i]);
    } else {
        out.resize(header + 2 * img.size());
        for (std::size_t i = 0; i < img.size(); ++i) {
            out[header + 2 * i] = static_cast<char>(img.pixels[i] >> 8);
            out[header + 2 * i + 1] = static_cast<char>(img.pixels[i] & 0xFF);
        }
    }
    return out;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    try {
        return decode_pgm(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

PgmHeader read_pgm_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::string head(512, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    try {
        return parse_header(head);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    const std::string bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

}  // namespace voidd
