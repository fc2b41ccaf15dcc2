#include "vecseg/svg/path_data.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "vecseg/error.hpp"

namespace vecseg {

namespace {

[[noreturn]] void bad_path(std::string_view d, std::size_t offset, const std::string& why) {
    std::size_t end = offset;
    while (end < d.size() && end - offset < 12 && !std::isspace(static_cast<unsigned char>(d[end]))) ++end;
    throw Error(ErrorKind::BadPathData, "offset " + std::to_string(offset) + ", token '" +
                                            std::string(d.substr(offset, end - offset)) + "': " + why);
}

bool is_command_letter(char ch) {
    switch (std::toupper(static_cast<unsigned char>(ch))) {
        case 'M': case 'L': case 'H': case 'V': case 'C':
        case 'S': case 'Q': case 'T': case 'A': case 'Z': return true;
        default: return false;
    }
}

CommandKind kind_of(char ch) {
    switch (std::toupper(static_cast<unsigned char>(ch))) {
        case 'M': return CommandKind::M;
        case 'L': return CommandKind::L;
        case 'H': return CommandKind::H;
        case 'V': return CommandKind::V;
        case 'C': return CommandKind::C;
        case 'S': return CommandKind::S;
        case 'Q': return CommandKind::Q;
        case 'T': return CommandKind::T;
        case 'A': return CommandKind::A;
        default: return CommandKind::Z;
    }
}

class Scanner {
public:
    explicit Scanner(std::string_view d) : d_(d) {}

    void skip_separators() {
        while (pos_ < d_.size() && (std::isspace(static_cast<unsigned char>(d_[pos_])) || d_[pos_] == ',')) ++pos_;
    }
    bool done() {
        skip_separators();
        return pos_ >= d_.size();
    }
    char peek() const { return d_[pos_]; }
    std::size_t pos() const { return pos_; }
    void advance() { ++pos_; }

    bool at_number() {
        skip_separators();
        if (pos_ >= d_.size()) return false;
        char ch = d_[pos_];
        return std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '.';
    }

    double number() {
        skip_separators();
        std::size_t start = pos_;
        std::size_t p = pos_;
        if (p < d_.size() && (d_[p] == '+' || d_[p] == '-')) ++p;
        bool digits = false;
        while (p < d_.size() && std::isdigit(static_cast<unsigned char>(d_[p]))) { ++p; digits = true; }
        if (p < d_.size() && d_[p] == '.') {
            ++p;
            while (p < d_.size() && std::isdigit(static_cast<unsigned char>(d_[p]))) { ++p; digits = true; }
        }
        if (!digits) bad_path(d_, start, "expected a number");
        if (p < d_.size() && (d_[p] == 'e' || d_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < d_.size() && (d_[q] == '+' || d_[q] == '-')) ++q;
            if (q < d_.size() && std::isdigit(static_cast<unsigned char>(d_[q]))) {
                while (q < d_.size() && std::isdigit(static_cast<unsigned char>(d_[q]))) ++q;
                p = q;
            }
        }
        const char* first = d_.data() + start;
        if (*first == '+') ++first;  // from_chars rejects a leading plus
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, d_.data() + p, value);
        if (ec != std::errc() || ptr != d_.data() + p) bad_path(d_, start, "invalid number");
        pos_ = p;
        return value;
    }

    // Arc flags may be packed without separators ("a1 1 0 00 1 1").
    double flag() {
        skip_separators();
        if (pos_ < d_.size() && (d_[pos_] == '0' || d_[pos_] == '1')) return d_[pos_++] == '1' ? 1.0 : 0.0;
        bad_path(d_, pos_, "expected arc flag 0 or 1");
    }

private:
    std::string_view d_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<RawPathCommand> tokenize_path_data(std::string_view d) {
    std::vector<RawPathCommand> out;
    Scanner sc(d);
    bool first = true;
    while (!sc.done()) {
        std::size_t offset = sc.pos();
        char letter = sc.peek();
        if (!is_command_letter(letter)) bad_path(d, offset, "expected a command letter");
        sc.advance();
        CommandKind kind = kind_of(letter);
        bool relative = std::islower(static_cast<unsigned char>(letter)) != 0;
        if (first && kind != CommandKind::M) bad_path(d, offset, "path data must begin with a moveto");
        first = false;
        const int n = arity(kind);
        if (n == 0) {
            out.push_back({kind, relative, {}, offset});
            continue;
        }
        bool repeated = false;
        do {
            RawPathCommand cmd{kind, relative, {}, offset};
            // Extra coordinate pairs after a moveto are implicit linetos.
            if (repeated && kind == CommandKind::M) cmd.kind = CommandKind::L;
            for (int i = 0; i < n; ++i) {
                if (kind == CommandKind::A && (i == 3 || i == 4)) {
                    cmd.params.push_back(sc.flag());
                } else {
                    if (!sc.at_number()) bad_path(d, sc.pos(), "missing parameter for command");
                    cmd.params.push_back(sc.number());
                }
            }
            out.push_back(std::move(cmd));
            repeated = true;
            offset = sc.pos();
        } while (sc.at_number());
    }
    return out;
}

std::vector<PathCommand> canonicalize_commands(const std::vector<RawPathCommand>& raw) {
    std::vector<PathCommand> out;
    out.reserve(raw.size());
    Vec2 current{};
    Vec2 subpath_start{};
    Vec2 last_cubic_ctrl{};
    Vec2 last_quad_ctrl{};
    CommandKind previous = CommandKind::Z;
    bool after_close = false;

    for (const RawPathCommand& cmd : raw) {
        const auto& p = cmd.params;
        const Vec2 base = cmd.relative ? current : Vec2{};
        auto pt = [&](std::size_t i) { return Vec2{p[i], p[i + 1]} + base; };

        if (after_close && cmd.kind != CommandKind::M && cmd.kind != CommandKind::Z) {
            out.push_back(PathCommand::move_to(subpath_start));
        }
        after_close = false;

        CommandKind emitted = cmd.kind;
        switch (cmd.kind) {
            case CommandKind::M: {
                current = pt(0);
                subpath_start = current;
                out.push_back(PathCommand::move_to(current));
                break;
            }
            case CommandKind::L: {
                current = pt(0);
                out.push_back(PathCommand::line_to(current));
                break;
            }
            case CommandKind::H: {
                current = {cmd.relative ? current.x + p[0] : p[0], current.y};
                out.push_back(PathCommand::line_to(current));
                emitted = CommandKind::L;
                break;
            }
            case CommandKind::V: {
                current = {current.x, cmd.relative ? current.y + p[0] : p[0]};
                out.push_back(PathCommand::line_to(current));
                emitted = CommandKind::L;
                break;
            }
            case CommandKind::C: {
                Vec2 c1 = pt(0), c2 = pt(2), end = pt(4);
                out.push_back(PathCommand::cubic_to(c1, c2, end));
                last_cubic_ctrl = c2;
                current = end;
                break;
            }
            case CommandKind::S: {
                Vec2 c1 = (previous == CommandKind::C) ? current * 2.0 - last_cubic_ctrl : current;
                Vec2 c2 = pt(0), end = pt(2);
                out.push_back(PathCommand::cubic_to(c1, c2, end));
                last_cubic_ctrl = c2;
                current = end;
                emitted = CommandKind::C;
                break;
            }
            case CommandKind::Q: {
                Vec2 c = pt(0), end = pt(2);
                out.push_back(PathCommand::quad_to(c, end));
                last_quad_ctrl = c;
                current = end;
                break;
            }
            case CommandKind::T: {
                Vec2 c = (previous == CommandKind::Q) ? current * 2.0 - last_quad_ctrl : current;
                Vec2 end = pt(0);
                out.push_back(PathCommand::quad_to(c, end));
                last_quad_ctrl = c;
                current = end;
                emitted = CommandKind::Q;
                break;
            }
            case CommandKind::A: {
                Vec2 end = pt(5);
                double rx = std::abs(p[0]), ry = std::abs(p[1]);
                if (rx == 0.0 || ry == 0.0) {
                    out.push_back(PathCommand::line_to(end));
                    emitted = CommandKind::L;
                } else {
                    out.push_back(PathCommand::arc_to(rx, ry, p[2], p[3] != 0.0, p[4] != 0.0, end));
                }
                current = end;
                break;
            }
            case CommandKind::Z: {
                if (!out.empty() && out.back().kind() != CommandKind::Z) out.push_back(PathCommand::close());
                current = subpath_start;
                after_close = true;
                break;
            }
        }
        previous = emitted;
    }
    return out;
}

std::vector<PathCommand> canonicalize_commands(std::string_view d) {
    return canonicalize_commands(tokenize_path_data(d));
}

}  // namespace vecseg
