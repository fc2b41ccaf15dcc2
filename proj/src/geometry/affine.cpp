#include "vecseg/geometry/affine.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vecseg/error.hpp"

namespace vecseg {

AffineTransform2D AffineTransform2D::rotate_degrees(double degrees) {
    // quarter turns exactly, cos(pi/2) would leave 6e-17 behind
    const double turns = degrees / 90.0;
    if (turns == std::floor(turns) && std::abs(turns) < 1e15) {
        static constexpr double kCos[] = {1, 0, -1, 0}, kSin[] = {0, 1, 0, -1};
        const auto q = static_cast<std::size_t>(((static_cast<long long>(turns) % 4) + 4) % 4);
        return {kCos[q], kSin[q], -kSin[q], kCos[q], 0.0, 0.0};
    }
    const double r = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(r), s = std::sin(r);
    return {c, s, -s, c, 0.0, 0.0};
}

namespace {

bool is_sep(char ch) { return std::isspace(static_cast<unsigned char>(ch)) || ch == ','; }

std::vector<double> parse_args(std::string_view args, std::string_view whole) {
    std::vector<double> out;
    std::size_t i = 0;
    while (true) {
        while (i < args.size() && is_sep(args[i])) ++i;
        if (i >= args.size()) break;
        const char* first = args.data() + i;
        if (*first == '+') ++first;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, args.data() + args.size(), v);
        if (ec != std::errc()) {
            throw Error(ErrorKind::BadFormat, "invalid number in transform '" + std::string(whole) + "'");
        }
        out.push_back(v);
        i = static_cast<std::size_t>(ptr - args.data());
    }
    return out;
}

}  // namespace

AffineTransform2D parse_transform_list(std::string_view text) {
    AffineTransform2D result;
    std::size_t i = 0;
    while (true) {
        while (i < text.size() && is_sep(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t name_start = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '-' || text[i] == '_')) ++i;
        std::string name(text.substr(name_start, i - name_start));
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (name.empty() || i >= text.size() || text[i] != '(') {
            throw Error(ErrorKind::BadFormat, "malformed transform '" + std::string(text) + "'");
        }
        std::size_t close = text.find(')', i);
        if (close == std::string_view::npos) {
            throw Error(ErrorKind::BadFormat, "unterminated transform '" + std::string(text) + "'");
        }
        std::vector<double> v = parse_args(text.substr(i + 1, close - i - 1), text);
        i = close + 1;

        auto need = [&](std::initializer_list<std::size_t> counts) {
            for (std::size_t c : counts)
                if (v.size() == c) return;
            throw Error(ErrorKind::BadFormat, "wrong argument count for " + name + " in '" + std::string(text) + "'");
        };

        AffineTransform2D t;
        if (name == "matrix") {
            need({6});
            t = {v[0], v[1], v[2], v[3], v[4], v[5]};
        } else if (name == "translate") {
            need({1, 2});
            t = AffineTransform2D::translate(v[0], v.size() > 1 ? v[1] : 0.0);
        } else if (name == "scale") {
            need({1, 2});
            t = AffineTransform2D::scale(v[0], v.size() > 1 ? v[1] : v[0]);
        } else if (name == "rotate") {
            need({1, 3});
            t = AffineTransform2D::rotate_degrees(v[0]);
            if (v.size() == 3) {
                t = AffineTransform2D::translate(v[1], v[2]) * t * AffineTransform2D::translate(-v[1], -v[2]);
            }
        } else if (name == "skewX") {
            need({1});
            t = {1, 0, std::tan(v[0] * std::numbers::pi / 180.0), 1, 0, 0};
        } else if (name == "skewY") {
            need({1});
            t = {1, std::tan(v[0] * std::numbers::pi / 180.0), 0, 1, 0, 0};
        } else {
            throw Error(ErrorKind::UnsupportedTransformKind, name);
        }
        result = result * t;
    }
    return result;
}

}  // namespace vecseg
