#include "shapeservo/mask.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "shapeservo/errors.hpp"

namespace shapeservo {

int Mask::count_set() const {
    int n = 0;
    for (std::uint8_t p : pixels) {
        if (p) ++n;
    }
    return n;
}

namespace {

// Next whitespace-separated token, skipping '#' comments.
bool next_token(std::istream& in, std::string& tok) {
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return true;
    }
    return false;
}

long parse_int(const std::string& tok, const char* what) {
    try {
        size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("PGM: bad ") + what + " '" + tok + "'");
    }
}

}  // namespace

Mask read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("PGM: cannot open " + path.string());

    std::string tok;
    if (!next_token(in, tok) || tok != "P2") {
        throw ParseError("PGM: expected magic 'P2' in " + path.string());
    }
    if (!next_token(in, tok)) throw ParseError("PGM: missing width");
    const long w = parse_int(tok, "width");
    if (!next_token(in, tok)) throw ParseError("PGM: missing height");
    const long h = parse_int(tok, "height");
    if (!next_token(in, tok)) throw ParseError("PGM: missing maxval");
    const long maxval = parse_int(tok, "maxval");
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw ParseError("PGM: invalid header in " + path.string());
    }

    Mask m(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < m.pixels.size(); ++i) {
        if (!next_token(in, tok)) throw ParseError("PGM: truncated pixel data");
        const long v = parse_int(tok, "pixel");
        if (v < 0 || v > maxval) throw ParseError("PGM: pixel value out of range");
        m.pixels[i] = v > 0 ? 255 : 0;
    }
    return m;
}

void write_pgm(const Mask& mask, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("PGM: cannot write " + path.string());
    out << "P2\n" << mask.width << " " << mask.height << "\n255\n";
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            out << int(mask.at(x, y)) << (x + 1 == mask.width ? '\n' : ' ');
        }
    }
    if (!out) throw IoError("PGM: write failed for " + path.string());
}

}  // namespace shapeservo
